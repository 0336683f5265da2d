use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::Complex;

use crate::dynamics::SubspaceSystem;
use crate::error::{Error, Result};
use crate::scalar::{cabs, cplx, fro, CMatrix, Real};

/// Eigenvalues and component matrices of `K0` and `M`.
///
/// `k_proj` are orthogonal projectors with `Σ K_k = I`, `Σ ξ_k K_k = K0`.
/// `m_proj` satisfy `Σ Λ_j^p M_j = M^p` for `p < dim_c`. A repeated eigenvalue
/// is listed once with the projector onto its eigenspace and once more per
/// extra multiplicity with a zero matrix, so both lists always have the full
/// subspace dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData<T: Real> {
    pub xi: Vec<T>,
    pub k_proj: Vec<CMatrix<T>>,
    pub lambda: Vec<Complex<T>>,
    pub m_proj: Vec<CMatrix<T>>,
}

/// Relative residuals of the decomposition identities.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResiduals<T> {
    /// `‖Σ K_k - I‖ / ‖I‖`.
    pub k_identity: T,
    /// `‖Σ ξ_k K_k - K0‖ / ‖K0‖`.
    pub k_reconstruction: T,
    /// `‖Σ Λ_j^p M_j - M^p‖ / ‖M^p‖` for `p = 0..dim_c`.
    pub m_powers: Vec<T>,
}

impl<T: Real> DecompositionResiduals<T> {
    pub fn max(&self) -> T {
        self.m_powers
            .iter()
            .copied()
            .fold(self.k_identity.max(self.k_reconstruction), |a, b| a.max(b))
    }
}

impl<T: Real> SpectralData<T> {
    /// Largest imaginary part among the eigenvalues of `M` (non-positive for
    /// decaying dynamics).
    pub fn max_imag_lambda(&self) -> T {
        self.lambda.iter().map(|l| l.im).fold(T::min_value().unwrap_or(-T::one()), |a, b| a.max(b))
    }

    pub fn residuals(&self, s: &SubspaceSystem<T>) -> DecompositionResiduals<T> {
        let tiny = T::tiny();
        let dd = s.dim_d();
        let (k_identity, k_reconstruction) = if dd == 0 {
            (T::zero(), T::zero())
        } else {
            let mut sum = CMatrix::<T>::zeros(dd, dd);
            let mut recon = CMatrix::<T>::zeros(dd, dd);
            for (xi, kk) in self.xi.iter().zip(&self.k_proj) {
                sum += kk;
                recon += kk * cplx(*xi);
            }
            let id = CMatrix::<T>::identity(dd, dd);
            (
                fro(&(sum - &id)) / fro(&id),
                fro(&(recon - s.k0())) / fro(s.k0()).max(tiny),
            )
        };
        let dc = s.dim_c();
        let mut power = CMatrix::<T>::identity(dc, dc);
        let mut m_powers = Vec::with_capacity(dc);
        for p in 0..dc {
            let mut acc = CMatrix::<T>::zeros(dc, dc);
            for (l, mj) in self.lambda.iter().zip(&self.m_proj) {
                acc += mj * l.powi(p as i32);
            }
            m_powers.push(fro(&(acc - &power)) / fro(&power).max(tiny));
            power = &power * s.m();
        }
        DecompositionResiduals { k_identity, k_reconstruction, m_powers }
    }
}

/// Decomposes `K0` and `M` of a subspace.
///
/// `K0` is Hermitian; a degenerate pair (`|ξ1 - ξ2| ≤ 1e-12 ‖K0‖`) yields
/// `(ξ, I)` and `(ξ, 0)`. For `M` the component matrices come from the
/// Vandermonde system in the distinct eigenvalues, centred on their centroid.
/// Eigenvalues closer than `1e-9 ‖M‖` are treated as one eigenvalue; if `M`
/// is not diagonalizable there, or the component matrices blow up because
/// the spectrum is nearly defective, a degenerate-spectrum error is returned.
pub fn spectral_decompose<T: Real>(s: &SubspaceSystem<T>) -> Result<SpectralData<T>> {
    let (xi, k_proj) = decompose_hermitian(s.k0());
    let (lambda, m_proj) = decompose_general(s.m())?;
    Ok(SpectralData { xi, k_proj, lambda, m_proj })
}

fn decompose_hermitian<T: Real>(k0: &CMatrix<T>) -> (Vec<T>, Vec<CMatrix<T>>) {
    let d = k0.nrows();
    match d {
        0 => (Vec::new(), Vec::new()),
        1 => (vec![k0[(0, 0)].re], vec![CMatrix::identity(1, 1)]),
        _ => {
            let eig = SymmetricEigen::new(k0.clone());
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&i, &j| {
                eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).expect("finite eigenvalues")
            });
            let scale = fro(k0).max(T::tiny());
            let lo = eig.eigenvalues[order[0]];
            let hi = eig.eigenvalues[order[d - 1]];
            if hi - lo <= T::tol(1e-12) * scale {
                let mean = eig.eigenvalues.iter().fold(T::zero(), |a, &b| a + b)
                    / T::from_usize(d).expect("small dimension");
                let mut xi = vec![mean; d];
                xi[0] = mean;
                let mut proj = vec![CMatrix::zeros(d, d); d];
                proj[0] = CMatrix::identity(d, d);
                return (xi, proj);
            }
            let xi = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let proj = order
                .iter()
                .map(|&i| {
                    let u = eig.eigenvectors.column(i);
                    u * u.adjoint()
                })
                .collect();
            (xi, proj)
        }
    }
}

/// Ceiling on the Frobenius norm of any component matrix of `M`. Beyond it the
/// eigenbasis is too ill-conditioned for the Vandermonde inversion to be
/// trusted (the spectrum is numerically defective).
const MAX_PROJECTOR_NORM: f64 = 1e6;

fn decompose_general<T: Real>(m: &CMatrix<T>) -> Result<(Vec<Complex<T>>, Vec<CMatrix<T>>)> {
    let d = m.nrows();
    if d == 1 {
        let l = m[(0, 0)];
        check_growth(l, fro(m))?;
        return Ok((vec![l], vec![CMatrix::identity(1, 1)]));
    }
    let scale = fro(m).max(T::tiny());

    let (_, tri) = Schur::new(m.clone()).unpack();
    let mut eigs: Vec<Complex<T>> = (0..d).map(|i| tri[(i, i)]).collect();
    eigs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .expect("finite eigenvalues")
            .then(a.im.partial_cmp(&b.im).expect("finite eigenvalues"))
    });
    for &l in &eigs {
        check_growth(l, scale)?;
    }
    let closest = closest_pair(&eigs);

    // Group numerically coincident eigenvalues.
    let merge = T::tol(1e-9) * scale;
    let mut clusters: Vec<(Complex<T>, usize)> = Vec::new();
    for &l in &eigs {
        match clusters.iter_mut().find(|(c, _)| cabs(*c - l) <= merge) {
            Some((c, k)) => {
                let kk = T::from_usize(*k).expect("small count");
                *c = (*c * cplx(kk) + l) / cplx(kk + T::one());
                *k += 1;
            }
            None => clusters.push((l, 1)),
        }
    }

    let r = clusters.len();
    let centroid = clusters.iter().fold(Complex::new(T::zero(), T::zero()), |a, (c, _)| a + c)
        / cplx(T::from_usize(r).expect("small count"));
    let spread = clusters
        .iter()
        .map(|(c, _)| cabs(*c - centroid))
        .fold(T::zero(), |a, b| a.max(b));
    let spread = if spread > T::zero() { spread } else { T::one() };
    let spread_c = cplx(spread);

    // V[p][i] = ((λ_i - c)/s)^p; component matrices M_i = Σ_p (V⁻¹)[i][p] ((M - c)/s)^p.
    let nodes: Vec<Complex<T>> = clusters.iter().map(|(c, _)| (*c - centroid) / spread_c).collect();
    let vandermonde = CMatrix::from_fn(r, r, |p, i| nodes[i].powi(p as i32));
    let inverse = vandermonde.try_inverse().ok_or_else(|| degenerate(closest))?;

    let mut shifted = m.clone();
    for i in 0..d {
        shifted[(i, i)] -= centroid;
    }
    shifted /= spread_c;
    let mut powers = Vec::with_capacity(r);
    let mut pw = CMatrix::<T>::identity(d, d);
    for _ in 0..r {
        let next = &pw * &shifted;
        powers.push(pw);
        pw = next;
    }

    let limit = T::lit(MAX_PROJECTOR_NORM);
    let semisimple_tol = T::tol(1e-8) * scale;
    let mut lambda = Vec::with_capacity(d);
    let mut proj = Vec::with_capacity(d);
    for (i, &(value, mult)) in clusters.iter().enumerate() {
        let mut pi = CMatrix::<T>::zeros(d, d);
        for (p, mp) in powers.iter().enumerate() {
            pi += mp * inverse[(i, p)];
        }
        let pn = fro(&pi);
        if !(pn <= limit) {
            return Err(degenerate(closest));
        }
        if mult > 1 {
            let mut shifted_m = m.clone();
            for k in 0..d {
                shifted_m[(k, k)] -= value;
            }
            if fro(&(shifted_m * &pi)) > semisimple_tol * pn.max(T::one()) {
                return Err(degenerate(closest));
            }
        }
        lambda.push(value);
        proj.push(pi);
        for _ in 1..mult {
            lambda.push(value);
            proj.push(CMatrix::zeros(d, d));
        }
    }
    Ok((lambda, proj))
}

fn check_growth<T: Real>(l: Complex<T>, scale: T) -> Result<()> {
    if l.im > T::tol(1e-12) * scale.max(T::one()) {
        return Err(Error::GrowingMode((l.re.as_f64(), l.im.as_f64())));
    }
    Ok(())
}

fn closest_pair<T: Real>(eigs: &[Complex<T>]) -> (Complex<T>, Complex<T>) {
    let mut best = (eigs[0], eigs[eigs.len() - 1]);
    let mut dist = None;
    for i in 0..eigs.len() {
        for j in i + 1..eigs.len() {
            let dij = cabs(eigs[i] - eigs[j]);
            if dist.is_none_or(|d| dij < d) {
                dist = Some(dij);
                best = (eigs[i], eigs[j]);
            }
        }
    }
    best
}

fn degenerate<T: Real>((a, b): (Complex<T>, Complex<T>)) -> Error {
    Error::DegenerateSpectrum {
        first: (a.re.as_f64(), a.im.as_f64()),
        second: (b.re.as_f64(), b.im.as_f64()),
    }
}
