use nalgebra::Complex;

use crate::dynamics::{SpectralData, SubspaceSystem};
use crate::error::{Error, Result};
use crate::scalar::{abs2, cabs, cexp, cln, cplx, exp_neg_i, fro, imag_unit, phase, CMatrix, CVector, Real};

/// Which form of the continuum amplitude to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeMode {
    /// Full solution with the transient bound-state term.
    Exact,
    /// Outgoing part that survives once the bound amplitudes have decayed.
    LongTime,
}

/// One `(k, j)` term of the Sylvester kernel: `K_k B2 M_j / (E_d + ξ_k - Λ_j)`.
#[derive(Debug, Clone, PartialEq)]
struct KernelTerm<T: Real> {
    xi: T,
    lambda: Complex<T>,
    coef: CMatrix<T>,
}

/// The nonvanishing products `K_k B2 M_j` of a decomposed subspace.
///
/// Terms whose product is zero (dark bound states, or the zero placeholder of
/// a degenerate eigenvalue) are dropped; they carry no amplitude and would
/// otherwise produce spurious resonances.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterTerms<T: Real> {
    terms: Vec<KernelTerm<T>>,
    dim_d: usize,
    dim_c: usize,
}

impl<T: Real> SylvesterTerms<T> {
    pub fn new(s: &SubspaceSystem<T>, sd: &SpectralData<T>) -> Self {
        let mut terms = Vec::new();
        let b2_norm = fro(s.b2());
        for (lambda, mj) in sd.lambda.iter().zip(&sd.m_proj) {
            let bm = s.b2() * mj;
            // Dark projectors: B2 M_j vanishes up to rounding.
            let cutoff = T::tol(1e-10) * b2_norm * fro(mj);
            if fro(&bm) <= cutoff {
                continue;
            }
            for (xi, kk) in sd.xi.iter().zip(&sd.k_proj) {
                let coef = kk * &bm;
                if fro(&coef) > cutoff {
                    terms.push(KernelTerm { xi: *xi, lambda: *lambda, coef });
                }
            }
        }
        Self { terms, dim_d: s.dim_d(), dim_c: s.dim_c() }
    }

    /// `T(E_d)`, the solution of `K(E_d) T - T M = B2`.
    pub fn kernel(&self, e_d: T) -> Result<CMatrix<T>> {
        let mut t = CMatrix::zeros(self.dim_d, self.dim_c);
        for term in &self.terms {
            let den = resonant_denominator(e_d, term.xi, term.lambda)?;
            t += &term.coef / den;
        }
        Ok(t)
    }

    /// Binds an initial bound vector, producing the outgoing wave.
    pub fn apply(&self, c0: &CVector<T>) -> OutgoingWave<T> {
        assert_eq!(c0.len(), self.dim_c, "initial vector length must equal dim_c");
        let terms = self
            .terms
            .iter()
            .map(|t| WaveTerm { xi: t.xi, lambda: t.lambda, v: &t.coef * c0 })
            .collect();
        OutgoingWave { terms, dim_d: self.dim_d }
    }
}

fn resonant_denominator<T: Real>(e_d: T, xi: T, lambda: Complex<T>) -> Result<Complex<T>> {
    let den = cplx(e_d + xi) - lambda;
    let scale = e_d.abs() + xi.abs() + cabs(lambda);
    if cabs(den) <= T::tol(1e-14) * scale.max(T::one()) {
        return Err(Error::ResonanceSingularity { e_d: e_d.as_f64() });
    }
    Ok(den)
}

#[derive(Debug, Clone, PartialEq)]
struct WaveTerm<T: Real> {
    xi: T,
    lambda: Complex<T>,
    v: CVector<T>,
}

/// Continuum amplitudes of one subspace for a fixed initial bound vector,
/// stored as the vectors `K_k B2 M_j c(0)` with their eigenvalue pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutgoingWave<T: Real> {
    terms: Vec<WaveTerm<T>>,
    dim_d: usize,
}

impl<T: Real> OutgoingWave<T> {
    pub fn dim_d(&self) -> usize {
        self.dim_d
    }

    /// Long-time amplitude `exp(-i K(E_d) t) T(E_d) c(0)`.
    pub fn long_time(&self, e_d: T, t: T) -> Result<CVector<T>> {
        let mut out = CVector::zeros(self.dim_d);
        for term in &self.terms {
            let den = resonant_denominator(e_d, term.xi, term.lambda)?;
            out += &term.v * (phase((e_d + term.xi) * t) / den);
        }
        Ok(out)
    }

    /// Full amplitude `{exp(-i K t) T - T exp(-i M t)} c(0)`, evaluated per
    /// term as `e^{-iΛt} (e^{-iΔt} - 1)/Δ` with `Δ = E_d + ξ - Λ`; this is
    /// exactly zero at `t = 0` and finite at `Δ = 0`.
    pub fn exact(&self, e_d: T, t: T) -> CVector<T> {
        let mut out = CVector::zeros(self.dim_d);
        if t == T::zero() {
            return out;
        }
        for term in &self.terms {
            let delta = cplx(e_d + term.xi) - term.lambda;
            out += &term.v * (exp_neg_i(term.lambda * cplx(t)) * phi(delta, t));
        }
        out
    }

    /// Sum over channels of `|d_out(E_d)|²`.
    pub fn long_time_density(&self, e_d: T, t: T) -> Result<T> {
        Ok(self.long_time(e_d, t)?.iter().fold(T::zero(), |a, z| a + abs2(*z)))
    }

    /// Closed form of `∫ d_out d_out† dE_d` over the whole real line.
    pub fn moment_matrix(&self, t: T) -> Result<CMatrix<T>> {
        let two_pi = cplx(T::two_pi());
        let i = imag_unit::<T>();
        let mut out = CMatrix::zeros(self.dim_d, self.dim_d);
        for a in &self.terms {
            for b in &self.terms {
                let den = i * (cplx(b.xi - a.xi) - b.lambda.conj() + a.lambda);
                if den == cplx(T::zero()) {
                    return Err(Error::NonDecayingChannel);
                }
                // exp(+i (ξ_b - ξ_a) t)
                let ph = phase((a.xi - b.xi) * t);
                out += (&a.v * b.v.adjoint()) * (two_pi * ph / den);
            }
        }
        Ok(out)
    }

    /// `∫_{lo}^{hi} d_out d_out† dE_d` in closed form (complex logarithms of
    /// the Lorentzian partial fractions).
    pub fn window_moment(&self, lo: T, hi: T, t: T) -> Result<CMatrix<T>> {
        let mut out = CMatrix::zeros(self.dim_d, self.dim_d);
        for a in &self.terms {
            let za = a.lambda - cplx(a.xi);
            for b in &self.terms {
                let wb = b.lambda.conj() - cplx(b.xi);
                let gap = za - wb;
                if gap == cplx(T::zero()) {
                    return Err(Error::NonDecayingChannel);
                }
                let prim = |e: T| cln(cplx(e) - za) - cln(cplx(e) - wb);
                let integral = (prim(hi) - prim(lo)) / gap;
                let ph = phase((a.xi - b.xi) * t);
                out += (&a.v * b.v.adjoint()) * (ph * integral);
            }
        }
        Ok(out)
    }

    /// Slowest decay rate `min |Im Λ|` among contributing terms.
    pub fn narrowest_width(&self) -> Option<T> {
        self.terms.iter().map(|t| -t.lambda.im).reduce(|a, b| a.min(b))
    }

    /// Real parts of `Λ_j - ξ_k`: the energies where long-time peaks sit.
    pub fn peak_positions(&self) -> Vec<T> {
        self.terms.iter().map(|t| t.lambda.re - t.xi).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `(e^{-iΔt} - 1)/Δ` with a series near `Δt = 0`.
fn phi<T: Real>(delta: Complex<T>, t: T) -> Complex<T> {
    let z = delta * cplx(-t) * imag_unit::<T>();
    if cabs(z) < T::lit(1e-3) {
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        for k in 2..8 {
            term = term * z / cplx(T::from_usize(k).expect("small integer"));
            sum += term;
        }
        sum * imag_unit::<T>() * cplx(-t)
    } else {
        (cexp(z) - Complex::new(T::one(), T::zero())) / delta
    }
}

/// The Sylvester kernel `T(E_d) = Σ_k Σ_j K_k B2 M_j / (E_d + ξ_k - Λ_j)`.
pub fn sylvester_kernel<T: Real>(
    s: &SubspaceSystem<T>,
    sd: &SpectralData<T>,
    e_d: T,
) -> Result<CMatrix<T>> {
    SylvesterTerms::new(s, sd).kernel(e_d)
}

/// Relative residual `‖K(E_d) T - T M - B2‖ / (‖B2‖ + ‖T‖ ‖M‖)`.
pub fn sylvester_residual<T: Real>(s: &SubspaceSystem<T>, kernel: &CMatrix<T>, e_d: T) -> T {
    let r = s.k_at(e_d) * kernel - kernel * s.m() - s.b2();
    let scale = fro(s.b2()) + fro(kernel) * fro(s.m());
    if scale == T::zero() {
        fro(&r)
    } else {
        fro(&r) / scale
    }
}

/// Bound amplitudes `c(t) = Σ_j e^{-iΛ_j t} M_j c(0)`.
pub fn evolve_bound<T: Real>(sd: &SpectralData<T>, c0: &CVector<T>, t: T) -> CVector<T> {
    if t == T::zero() {
        return c0.clone();
    }
    let mut out = CVector::zeros(c0.len());
    for (lambda, mj) in sd.lambda.iter().zip(&sd.m_proj) {
        out += (mj * c0) * exp_neg_i(*lambda * cplx(t));
    }
    out
}

/// Continuum amplitudes at one energy.
pub fn continuum_amplitudes<T: Real>(
    s: &SubspaceSystem<T>,
    sd: &SpectralData<T>,
    c0: &CVector<T>,
    e_d: T,
    t: T,
    mode: AmplitudeMode,
) -> Result<CVector<T>> {
    let wave = SylvesterTerms::new(s, sd).apply(c0);
    match mode {
        AmplitudeMode::LongTime => wave.long_time(e_d, t),
        AmplitudeMode::Exact => {
            // Same singularity contract as the kernel itself.
            SylvesterTerms::new(s, sd).kernel(e_d)?;
            Ok(wave.exact(e_d, t))
        }
    }
}

/// Closed-form `∫ d_out d_out† dE_d` (dim_d × dim_d, Hermitian PSD).
pub fn ionization_moment_matrix<T: Real>(
    s: &SubspaceSystem<T>,
    sd: &SpectralData<T>,
    c0: &CVector<T>,
    t: T,
) -> Result<CMatrix<T>> {
    SylvesterTerms::new(s, sd).apply(c0).moment_matrix(t)
}

/// Bound vector and continuum amplitudes of one subspace at time `t`, the
/// continuum sampled on a list of energies.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState<T: Real> {
    pub n: usize,
    pub t: T,
    pub c: CVector<T>,
    pub energies: Vec<T>,
    /// `dim_d` rows (`d0`, `d1`) by one column per energy.
    pub d: CMatrix<T>,
}

impl<T: Real> AmplitudeState<T> {
    /// `|c|² + Σ_i w_i Σ_ch |d_ch(E_i)|²` with the supplied quadrature weights.
    pub fn norm_sqr(&self, weights: &[T]) -> T {
        let bound = self.c.iter().fold(T::zero(), |a, z| a + abs2(*z));
        let mut cont = T::zero();
        for (col, w) in self.d.column_iter().zip(weights) {
            cont += *w * col.iter().fold(T::zero(), |a, z| a + abs2(*z));
        }
        bound + cont
    }
}

/// Closed-form state (bound amplitudes and the exact continuum form) on an energy list.
pub fn closed_form_state<T: Real>(
    s: &SubspaceSystem<T>,
    sd: &SpectralData<T>,
    c0: &CVector<T>,
    energies: &[T],
    t: T,
) -> AmplitudeState<T> {
    let wave = SylvesterTerms::new(s, sd).apply(c0);
    let mut d = CMatrix::zeros(s.dim_d(), energies.len());
    for (i, &e) in energies.iter().enumerate() {
        d.set_column(i, &wave.exact(e, t));
    }
    AmplitudeState { n: s.n(), t, c: evolve_bound(sd, c0, t), energies: energies.to_vec(), d }
}
