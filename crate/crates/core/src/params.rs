//! Physical constants of the model and the reduced (Fano-style) parametrization.
//!
//! Units are dimensionless with ħ = 1. `V` and `J` are taken real and
//! non-negative when derived from reduced parameters; raw couplings may carry
//! arbitrary phases.

use std::str::FromStr;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, cplx, Real};

/// Level energies `E_a`, `E_b` and photon energy `E_L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies<T> {
    pub e_a: T,
    pub e_b: T,
    pub e_l: T,
}

impl<T: Real> Energies<T> {
    pub fn new(e_a: T, e_b: T, e_l: T) -> Result<Self> {
        for (name, v) in [("E_a", e_a), ("E_b", e_b), ("E_L", e_l)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameters {
                    op: "Energies::new",
                    reason: format!("{name} is not finite"),
                });
            }
        }
        Ok(Self { e_a, e_b, e_l })
    }

    /// `E_a = E_b = E_L = 1`, the resonant configuration used throughout.
    pub fn resonant() -> Self {
        Self { e_a: T::one(), e_b: T::one(), e_l: T::one() }
    }
}

impl<T: Real> Default for Energies<T> {
    fn default() -> Self {
        Self::resonant()
    }
}

/// Raw coupling constants of the single-mode Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings<T> {
    /// Coulomb configuration coupling of the auto-ionizing level to the continuum.
    pub v: Complex<T>,
    /// Dipole-dipole coupling of atom a's excitation to atom b's continuum.
    pub j: Complex<T>,
    /// Dipole-dipole coupling between the discrete excited levels.
    pub j_ab: Complex<T>,
    /// Direct optical ionization strength.
    pub mu: Complex<T>,
    /// Optical coupling of atom a.
    pub mu_a: Complex<T>,
    /// Optical coupling to the auto-ionizing level.
    pub mu_b: Complex<T>,
}

impl<T: Real> Couplings<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { v: z, j: z, j_ab: z, mu: z, mu_a: z, mu_b: z }
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.j, self.j_ab, self.mu, self.mu_a, self.mu_b]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Multiplies every optical coupling (`mu`, `mu_a`, `mu_b`) by `factor`.
    pub fn scale_optical(&self, factor: Complex<T>) -> Self {
        Self {
            mu: self.mu * factor,
            mu_a: self.mu_a * factor,
            mu_b: self.mu_b * factor,
            ..*self
        }
    }
}

/// Reduced parameters `(q_a, γ_a, q_b, γ_b, Ω, q_trans)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams<T> {
    pub q_a: T,
    pub gamma_a: T,
    pub q_b: T,
    pub gamma_b: T,
    pub omega: T,
    pub q_trans: T,
}

impl<T: Real> ReducedParams<T> {
    pub fn new(q_a: T, gamma_a: T, q_b: T, gamma_b: T, omega: T, q_trans: T) -> Result<Self> {
        let p = Self { q_a, gamma_a, q_b, gamma_b, omega, q_trans };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidParameters { op: "ReducedParams", reason: reason.to_owned() })
        };
        let all = [self.q_a, self.gamma_a, self.q_b, self.gamma_b, self.omega, self.q_trans];
        if all.iter().any(|v| !v.is_finite()) {
            return fail("non-finite value");
        }
        if self.gamma_a < T::zero() || self.gamma_b < T::zero() {
            return fail("widths gamma_a, gamma_b must be non-negative");
        }
        if self.gamma_a + self.gamma_b <= T::zero() {
            return fail("gamma_a + gamma_b must be positive");
        }
        if self.omega < T::zero() {
            return fail("Omega must be non-negative");
        }
        Ok(())
    }

    /// Total width `Γ = γ_a + γ_b`.
    pub fn gamma_total(&self) -> T {
        self.gamma_a + self.gamma_b
    }

    /// Width-weighted asymmetry `Q = (γ_a q_a + γ_b q_b) / Γ`.
    pub fn q_mean(&self) -> T {
        (self.gamma_a * self.q_a + self.gamma_b * self.q_b) / self.gamma_total()
    }

    pub fn with_omega(self, omega: T) -> Self {
        Self { omega, ..self }
    }
}

/// Energies and couplings together: everything the dynamics needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model<T> {
    pub energies: Energies<T>,
    pub couplings: Couplings<T>,
}

impl<T: Real> Model<T> {
    pub fn new(energies: Energies<T>, couplings: Couplings<T>) -> Self {
        Self { energies, couplings }
    }

    pub fn from_reduced(energies: Energies<T>, params: &ReducedParams<T>) -> Result<Self> {
        Ok(Self { energies, couplings: derive_couplings(params)? })
    }
}

/// Maps reduced parameters to raw couplings.
///
/// When `γ_a = 0` the literal formula `μ_a = π J* μ q_a` would vanish for
/// any `q_a`; in that case `V` stands in for `J`, so `q_a` keeps its role as
/// the optical excitation strength of atom a.
pub fn derive_couplings<T: Real>(p: &ReducedParams<T>) -> Result<Couplings<T>> {
    p.validate().map_err(|e| match e {
        Error::InvalidParameters { reason, .. } => {
            Error::InvalidParameters { op: "derive_couplings", reason }
        }
        other => other,
    })?;
    let pi = T::pi();
    let v = (p.gamma_b / pi).sqrt();
    let j = (p.gamma_a / pi).sqrt();
    let q = p.q_mean();
    let mu = p.omega / (T::lit(4.0) * pi * p.gamma_total() * (q * q + T::one())).sqrt();
    let mu_a = if p.gamma_a > T::zero() { pi * j * mu * p.q_a } else { pi * v * mu * p.q_a };
    Ok(Couplings {
        v: cplx(v),
        j: cplx(j),
        j_ab: cplx(pi * v * j * p.q_trans),
        mu: cplx(mu),
        mu_a: cplx(mu_a),
        mu_b: cplx(pi * v * mu * p.q_b),
    })
}

/// Recovers reduced parameters from raw couplings.
///
/// All three asymmetry parameters must come out real (to `1e-12` relative);
/// couplings with incompatible phases have no reduced representation.
pub fn reduce_couplings<T: Real>(c: &Couplings<T>) -> Result<ReducedParams<T>> {
    if !c.is_finite() {
        return Err(Error::InvalidParameters {
            op: "reduce_couplings",
            reason: "non-finite coupling".into(),
        });
    }
    let pi = T::pi();
    let zero = T::zero();
    let ratio = |num: Complex<T>, den: Complex<T>, quantity: &'static str| -> Result<T> {
        if den.norm_sqr() == zero {
            return Err(Error::UndefinedParameter { quantity });
        }
        let q = num / den;
        if q.im.abs() > T::lit(1e-12) * q.re.abs().max(T::one()) {
            return Err(Error::InvalidParameters {
                op: "reduce_couplings",
                reason: format!("{quantity} is not real for the given coupling phases"),
            });
        }
        Ok(q.re)
    };
    let pi_c = cplx(pi);
    let q_b = ratio(c.mu_b, pi_c * c.v.conj() * c.mu, "q_b")?;
    let q_a = ratio(c.mu_a, pi_c * c.j.conj() * c.mu, "q_a")?;
    let q_trans = ratio(c.j_ab, pi_c * c.v.conj() * c.j, "q_trans")?;
    let gamma_a = pi * c.j.norm_sqr();
    let gamma_b = pi * c.v.norm_sqr();
    let gamma = gamma_a + gamma_b;
    let q = (gamma_a * q_a + gamma_b * q_b) / gamma;
    let omega = (T::lit(4.0) * pi * gamma * (q * q + T::one())).sqrt() * cabs(c.mu);
    ReducedParams::new(q_a, gamma_a, q_b, gamma_b, omega, q_trans)
}

/// Whether the two dipole-dipole paths balance so that the Fano zero of the
/// isolated auto-ionizing atom survives: `J_ab / J = μ_b / μ`, tested in
/// cross-multiplied form with relative tolerance `1e-10`.
pub fn fano_zero_preserved<T: Real>(c: &Couplings<T>) -> Result<bool> {
    if c.j.norm_sqr() == T::zero() {
        return Err(Error::UndefinedCondition("J"));
    }
    if c.mu.norm_sqr() == T::zero() {
        return Err(Error::UndefinedCondition("mu"));
    }
    let lhs = c.j_ab * c.mu;
    let rhs = c.mu_b * c.j;
    Ok(cabs(lhs - rhs) <= T::tol(1e-10) * (cabs(lhs) + cabs(rhs)))
}

/// The four parameter sets used to illustrate the model, all with
/// `E_a = E_b = E_L = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Isolated auto-ionizing atom: `q_a = 0, γ_a = 0`.
    A,
    /// Neighbor coupled only through the field: `q_a = 100, γ_a = 0`.
    APrime,
    /// Adds continuum dipole-dipole coupling: `γ_a = 1e-4`.
    B,
    /// Adds discrete dipole-dipole coupling: `q_trans = 1`.
    C,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::A, Preset::APrime, Preset::B, Preset::C];

    pub fn name(self) -> &'static str {
        match self {
            Preset::A => "a",
            Preset::APrime => "a-prime",
            Preset::B => "b",
            Preset::C => "c",
        }
    }

    /// Reduced parameters with the default `Ω = 0.1`.
    pub fn reduced<T: Real>(self) -> ReducedParams<T> {
        let (q_a, gamma_a, q_trans) = match self {
            Preset::A => (0.0, 0.0, 0.0),
            Preset::APrime => (100.0, 0.0, 0.0),
            Preset::B => (100.0, 1e-4, 0.0),
            Preset::C => (100.0, 1e-4, 1.0),
        };
        ReducedParams {
            q_a: T::lit(q_a),
            gamma_a: T::lit(gamma_a),
            q_b: T::one(),
            gamma_b: T::one(),
            omega: T::lit(0.1),
            q_trans: T::lit(q_trans),
        }
    }

    pub fn model<T: Real>(self) -> Model<T> {
        Model::from_reduced(Energies::resonant(), &self.reduced())
            .expect("preset parameters are valid")
    }

    pub fn model_with_omega<T: Real>(self, omega: T) -> Result<Model<T>> {
        Model::from_reduced(Energies::resonant(), &self.reduced().with_omega(omega))
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Preset::A),
            "a-prime" | "a'" | "aprime" | "a_prime" => Ok(Preset::APrime),
            "b" => Ok(Preset::B),
            "c" => Ok(Preset::C),
            other => Err(format!("unknown preset '{other}' (expected a, a-prime, b, c)")),
        }
    }
}
