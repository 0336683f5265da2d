//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All model code is written against [`Real`] so that it runs in `f64`
//! (the production precision) and `f32` alike. Complex quantities are
//! `nalgebra::Complex<T>`.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable throughout the model.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::Debug + std::fmt::Display
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance calibrated for `f64`, widened for coarser scalar types by the
    /// square root of the precision ratio.
    fn tol(x: f64) -> Self {
        let ratio = Self::default_epsilon().as_f64() / f64::EPSILON;
        Self::lit(x * ratio.max(1.0).sqrt())
    }

    /// Smallest positive normal number shared by every supported type.
    fn tiny() -> Self {
        Self::lit(f32::MIN_POSITIVE as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `exp(-i * phase)` for a real phase.
#[inline]
pub(crate) fn phase<T: Real>(angle: T) -> Complex<T> {
    Complex::new(angle.cos(), -angle.sin())
}

/// `exp(-i * z)` for a complex argument.
#[inline]
pub(crate) fn exp_neg_i<T: Real>(z: Complex<T>) -> Complex<T> {
    // -i z = im(z) - i re(z)
    let mag = z.im.exp();
    Complex::new(mag * z.re.cos(), -mag * z.re.sin())
}

/// Frobenius norm of a complex matrix as a real scalar.
#[inline]
pub(crate) fn fro<T: Real>(m: &CMatrix<T>) -> T {
    let mut acc = T::zero();
    for z in m.iter() {
        acc += z.re * z.re + z.im * z.im;
    }
    acc.sqrt()
}

#[inline]
pub(crate) fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub(crate) fn cln<T: Real>(z: Complex<T>) -> Complex<T> {
    ComplexField::ln(z)
}

#[inline]
pub(crate) fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    ComplexField::exp(z)
}
