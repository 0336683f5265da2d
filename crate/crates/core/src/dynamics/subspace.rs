use nalgebra::Complex;

use crate::params::{Couplings, Energies};
use crate::scalar::{cabs, cplx, fro, imag_unit, CMatrix, Real};

/// Matrices of the invariant subspace with total excitation `n`.
///
/// Bound amplitudes are ordered `(c00, c10, c01, c11)` and continuum channels
/// `(d0, d1)`; for `n = 1` the `c11` and `d1` components are absent and for
/// `n = 0` only `c00` remains.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSystem<T: Real> {
    n: usize,
    a: CMatrix<T>,
    b1: CMatrix<T>,
    b2: CMatrix<T>,
    k0: CMatrix<T>,
    m: CMatrix<T>,
}

impl<T: Real> SubspaceSystem<T> {
    /// Assembles a system from its bound Hamiltonian `a`, bound-continuum
    /// coupling `b1` and continuum block `k0`; `B2 = B1†` and
    /// `M = A - iπ B1 B2` are derived.
    ///
    /// # Panics
    /// On inconsistent shapes.
    pub fn from_parts(n: usize, a: CMatrix<T>, b1: CMatrix<T>, k0: CMatrix<T>) -> Self {
        assert!(a.is_square() && k0.is_square(), "A and K0 must be square");
        assert_eq!(b1.nrows(), a.nrows(), "B1 rows must match A");
        assert_eq!(b1.ncols(), k0.nrows(), "B1 columns must match K0");
        let b2 = b1.adjoint();
        let m = &a - (&b1 * &b2) * (imag_unit::<T>() * cplx(T::pi()));
        Self { n, a, b1, b2, k0, m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_c(&self) -> usize {
        self.a.nrows()
    }

    pub fn dim_d(&self) -> usize {
        self.k0.nrows()
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn b1(&self) -> &CMatrix<T> {
        &self.b1
    }

    pub fn b2(&self) -> &CMatrix<T> {
        &self.b2
    }

    /// Continuum block at `E_d = 0`.
    pub fn k0(&self) -> &CMatrix<T> {
        &self.k0
    }

    /// Effective non-Hermitian generator of the bound amplitudes.
    pub fn m(&self) -> &CMatrix<T> {
        &self.m
    }

    /// `K(E_d) = E_d I + K0`.
    pub fn k_at(&self, e_d: T) -> CMatrix<T> {
        let mut k = self.k0.clone();
        for i in 0..k.nrows() {
            k[(i, i)] += cplx(e_d);
        }
        k
    }

    /// Largest entrywise deviation of `A` and `K0` from Hermiticity, relative
    /// to the respective Frobenius norm.
    pub fn hermiticity_defect(&self) -> T {
        let rel = |x: &CMatrix<T>| {
            if x.is_empty() {
                return T::zero();
            }
            let d = x - x.adjoint();
            let scale = fro(x).max(T::tiny());
            d.iter().map(|z| cabs(*z)).fold(T::zero(), |a, b| a.max(b)) / scale
        };
        rel(&self.a).max(rel(&self.k0))
    }
}

/// Builds the subspace matrices for excitation number `n`.
pub fn build_subspace<T: Real>(n: usize, c: &Couplings<T>, e: &Energies<T>) -> SubspaceSystem<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let el = cplx(e.e_l);
    let ea = cplx(e.e_a);
    let eb = cplx(e.e_b);
    match n {
        0 => SubspaceSystem::from_parts(
            0,
            CMatrix::from_element(1, 1, el + el),
            CMatrix::zeros(1, 0),
            CMatrix::zeros(0, 0),
        ),
        1 => {
            #[rustfmt::skip]
            let a = CMatrix::from_row_slice(3, 3, &[
                el + el,    c.mu_a.conj(), c.mu_b.conj(),
                c.mu_a,     ea + el,       c.j_ab.conj(),
                c.mu_b,     c.j_ab,        eb + el,
            ]);
            let b1 = CMatrix::from_row_slice(3, 1, &[c.mu.conj(), c.j.conj(), c.v.conj()]);
            SubspaceSystem::from_parts(1, a, b1, CMatrix::from_element(1, 1, el))
        }
        _ => {
            let s = cplx(T::from_usize(n).expect("photon number fits scalar").sqrt());
            let s1 = cplx(T::from_usize(n - 1).expect("photon number fits scalar").sqrt());
            let (ma, mb) = (c.mu_a, c.mu_b);
            #[rustfmt::skip]
            let a = CMatrix::from_row_slice(4, 4, &[
                el + el,    ma.conj() * s, mb.conj() * s,  zero,
                ma * s,     ea + el,       c.j_ab.conj(),  mb.conj() * s1,
                mb * s,     c.j_ab,        eb + el,        ma.conj() * s1,
                zero,       mb * s1,       ma * s1,        ea + eb,
            ]);
            #[rustfmt::skip]
            let b1 = CMatrix::from_row_slice(4, 2, &[
                c.mu.conj() * s, zero,
                c.j.conj(),      c.mu.conj() * s1,
                c.v.conj(),      zero,
                zero,            c.v.conj(),
            ]);
            #[rustfmt::skip]
            let k0 = CMatrix::from_row_slice(2, 2, &[
                el,      ma.conj() * s1,
                ma * s1, ea,
            ]);
            SubspaceSystem::from_parts(n, a, b1, k0)
        }
    }
}
