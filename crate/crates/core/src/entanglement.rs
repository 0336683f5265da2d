//! Two-qubit reduction of the atom-a/photoelectron state at a pair of
//! continuum energies, and its negativity.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, Matrix4};

use crate::error::{Error, Result};
use crate::field::PumpState;
use crate::grid::EnergyGrid;
use crate::observables::{FieldSample, OutgoingField, PairingMode};
use crate::params::Model;
use crate::scalar::{cabs, Real};

/// Smallest admissible normalization of the two-qubit state.
pub const NORMALIZATION_FLOOR: f64 = 1e-12;
/// Negative eigenvalues of smaller magnitude are rounding noise.
pub const EIGEN_CLAMP: f64 = 1e-14;

/// Normalized 4×4 state in the basis `(0,E), (0,E'), (1,E), (1,E')`, the
/// first label being atom a's level.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState<T: Real> {
    pub e: T,
    pub e_prime: T,
    pub t: T,
    pub rho4: Matrix4<Complex<T>>,
    /// `Σ_j ρ_jj(E,E) + ρ_jj(E',E')` before normalization.
    pub normalization: T,
}

pub fn two_qubit_state<T: Real>(
    model: &Model<T>,
    pump: &PumpState,
    e: T,
    e_prime: T,
    t: T,
    mode: PairingMode,
) -> Result<TwoQubitState<T>> {
    let field = OutgoingField::new(model, pump, t)?;
    let (x, y) = (field.sample(e)?, field.sample(e_prime)?);
    state_from_samples(&field, mode, (e, &x), (e_prime, &y))
}

fn state_from_samples<T: Real>(
    field: &OutgoingField<T>,
    mode: PairingMode,
    (e, x): (T, &FieldSample<T>),
    (e_prime, y): (T, &FieldSample<T>),
) -> Result<TwoQubitState<T>> {
    if e == e_prime {
        return Err(Error::InvalidInput {
            module: "entanglement",
            op: "two_qubit_state",
            reason: format!("the two energies must differ (both {e})"),
        });
    }
    let samples = [x, y];
    let rho = Matrix4::from_fn(|r, c| {
        let (j, a) = (r / 2, r % 2);
        let (k, b) = (c / 2, c % 2);
        field.rho(mode, j, k, samples[a], samples[b])
    });
    TwoQubitState::from_unnormalized(e, e_prime, field.t(), rho)
}

impl<T: Real> TwoQubitState<T> {
    /// Normalizes a joint 4×4 block by `Σ_j ρ_jj(E,E) + ρ_jj(E',E')`.
    pub fn from_unnormalized(e: T, e_prime: T, t: T, rho: Matrix4<Complex<T>>) -> Result<Self> {
        let normalization = (0..4).fold(T::zero(), |acc, i| acc + rho[(i, i)].re);
        if !(normalization > T::lit(NORMALIZATION_FLOOR)) {
            return Err(Error::UndefinedState(normalization.as_f64()));
        }
        Ok(TwoQubitState {
            e,
            e_prime,
            t,
            rho4: rho.map(|z| z / Complex::new(normalization, T::zero())),
            normalization,
        })
    }
}

/// Transposes atom a's index: the `(0,·)(1,·)` and `(1,·)(0,·)` blocks swap.
pub fn partial_transpose<T: Real>(rho4: &Matrix4<Complex<T>>) -> Matrix4<Complex<T>> {
    Matrix4::from_fn(|r, c| {
        let (j, a) = (r / 2, r % 2);
        let (k, b) = (c / 2, c % 2);
        rho4[(2 * k + a, 2 * j + b)]
    })
}

/// Eigenvalues of the partial transpose, ascending.
pub fn partial_transpose_spectrum<T: Real>(state: &TwoQubitState<T>) -> [T; 4] {
    let pt = partial_transpose(&state.rho4);
    let mut ev: Vec<T> = SymmetricEigen::new(pt).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Largest `|M - M†|` entry of the partial transpose.
pub fn partial_transpose_hermiticity_defect<T: Real>(state: &TwoQubitState<T>) -> T {
    let pt = partial_transpose(&state.rho4);
    (pt - pt.adjoint()).iter().fold(T::zero(), |a, z| a.max(cabs(*z)))
}

/// `Σ_l (|λ_l| - λ_l)/2` over the eigenvalues of the partial transpose.
pub fn negativity<T: Real>(state: &TwoQubitState<T>) -> T {
    let clamp = T::lit(EIGEN_CLAMP);
    partial_transpose_spectrum(state)
        .iter()
        .filter(|&&l| l < -clamp)
        .fold(T::zero(), |acc, &l| acc - l)
}

/// Negativity over all ordered pairs of a grid, row-major in `(E, E')`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativityMap<T: Real> {
    pub grid: EnergyGrid<T>,
    pub t: T,
    pub mode: PairingMode,
    /// `None` on the diagonal and where the state is undefined.
    pub values: Vec<Option<T>>,
}

impl<T: Real> NegativityMap<T> {
    pub fn get(&self, i: usize, ip: usize) -> Option<T> {
        self.values[i * self.grid.count() + ip]
    }

    pub fn max(&self) -> Option<T> {
        self.values.iter().flatten().copied().reduce(|a, b| a.max(b))
    }

    /// Largest `|N(E,E') - N(E',E)|` over cells defined on both sides.
    pub fn asymmetry(&self) -> T {
        let n = self.grid.count();
        let mut worst = T::zero();
        for i in 0..n {
            for k in (i + 1)..n {
                if let (Some(a), Some(b)) = (self.get(i, k), self.get(k, i)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }
}

pub fn negativity_map<T: Real>(
    model: &Model<T>,
    pump: &PumpState,
    grid: &EnergyGrid<T>,
    t: T,
    mode: PairingMode,
) -> Result<NegativityMap<T>> {
    let field = OutgoingField::new(model, pump, t)?;
    let nodes = grid.nodes();
    let samples = field.sample_all(&nodes)?;
    let n = nodes.len();
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            values.push(if i == k {
                None
            } else {
                state_from_samples(&field, mode, (nodes[i], &samples[i]), (nodes[k], &samples[k]))
                    .ok()
                    .map(|s| negativity(&s))
            });
        }
    }
    Ok(NegativityMap { grid: *grid, t, mode, values })
}
