//! Initial state of the pump mode and its expansion over photon-number
//! subspaces.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, CVector, Real};

/// Default truncation of the coherent-state photon-number sum.
pub const DEFAULT_EPSILON: f64 = 1e-10;
/// Default largest photon number a coherent pump may require.
pub const DEFAULT_CAP: usize = 4096;

/// Pump-field state at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpState {
    /// Coherent state with real, non-negative amplitude `√n̄`.
    Coherent { mean_n: f64, epsilon: f64, cap: usize },
    Fock { n: usize },
}

impl PumpState {
    pub fn coherent(mean_n: f64) -> Self {
        PumpState::Coherent { mean_n, epsilon: DEFAULT_EPSILON, cap: DEFAULT_CAP }
    }

    pub fn fock(n: usize) -> Self {
        PumpState::Fock { n }
    }

    pub fn validate(&self) -> Result<()> {
        if let PumpState::Coherent { mean_n, epsilon, .. } = *self {
            if !(mean_n.is_finite() && mean_n >= 0.0) {
                return Err(invalid(format!("mean photon number {mean_n} must be finite and >= 0")));
            }
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(invalid(format!("truncation epsilon {epsilon} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

fn invalid(reason: String) -> Error {
    Error::InvalidPump { op: "subspace_weights", reason }
}

/// Photon-number amplitudes `(n, α_n)` of the pump, ascending in `n`.
///
/// For a coherent pump this is the smallest contiguous block of photon numbers
/// holding probability at least `1 - ε`. It is grown from the Poisson mode,
/// always taking the heavier neighbor, which for a unimodal distribution picks
/// the largest weights first.
pub fn subspace_weights<T: Real>(pump: &PumpState) -> Result<Vec<(usize, Complex<T>)>> {
    pump.validate()?;
    let (mean_n, epsilon, cap) = match *pump {
        PumpState::Fock { n } => return Ok(vec![(n, cplx(T::one()))]),
        PumpState::Coherent { mean_n, epsilon, cap } => (mean_n, epsilon, cap),
    };
    if mean_n == 0.0 {
        return Ok(vec![(0, cplx(T::one()))]);
    }

    let ln_mean = mean_n.ln();
    let mode = mean_n.floor() as usize;
    if mode > cap {
        return Err(Error::TruncationOverflow { needed: mode, cap });
    }
    // ln n! is accumulated on demand; the mode is at most `cap`.
    let mut ln_fact = vec![0.0f64; mode + 1];
    for k in 1..=mode {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_p = |n: usize, ln_fact_n: f64| -mean_n + n as f64 * ln_mean - ln_fact_n;

    let (mut lo, mut hi) = (mode, mode);
    let mut lo_ln_fact = ln_fact[mode];
    let mut hi_ln_fact = ln_fact[mode];
    let mut probs = std::collections::VecDeque::from([ln_p(mode, ln_fact[mode]).exp()]);
    let mut total = probs[0];
    while total < 1.0 - epsilon {
        let below = (lo > 0).then(|| ln_p(lo - 1, lo_ln_fact - (lo as f64).ln()).exp());
        let above_ln_fact = hi_ln_fact + ((hi + 1) as f64).ln();
        let above = ln_p(hi + 1, above_ln_fact).exp();
        match below {
            Some(b) if b >= above => {
                lo_ln_fact -= (lo as f64).ln();
                lo -= 1;
                probs.push_front(b);
                total += b;
            }
            _ => {
                if hi + 1 > cap {
                    return Err(Error::TruncationOverflow { needed: hi + 1, cap });
                }
                hi += 1;
                hi_ln_fact = above_ln_fact;
                probs.push_back(above);
                total += above;
            }
        }
        if below.is_none_or(|b| b == 0.0) && above == 0.0 {
            // Probability underflow; nothing more can be gained.
            break;
        }
    }
    Ok(probs
        .into_iter()
        .enumerate()
        .map(|(i, p)| (lo + i, cplx(T::lit(p.sqrt()))))
        .collect())
}

/// Bound-state vector of subspace `n` with the atoms in their ground states:
/// `c_00 = amplitude`, all other entries zero.
pub fn initial_bound_vector<T: Real>(n: usize, amplitude: Complex<T>) -> CVector<T> {
    let dim = match n {
        0 => 1,
        1 => 3,
        _ => 4,
    };
    let mut c = CVector::zeros(dim);
    c[0] = amplitude;
    c
}
