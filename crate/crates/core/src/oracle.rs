//! Brute-force reference solutions.
//!
//! [`integrate`] discretizes the continuum on a uniform grid and steps the
//! full coupled bound/continuum system with classic RK4. [`integrate_markov`]
//! steps the reduced equations in which the continuum has already been
//! eliminated from the bound dynamics (`dc/dt = -iMc`) while each continuum
//! amplitude is driven pointwise; it checks the time-domain solution without
//! any finite-band error.

use nalgebra::Complex;

use crate::dynamics::{build_subspace, AmplitudeState, SubspaceSystem};
use crate::error::{Error, Result};
use crate::field::initial_bound_vector;
use crate::grid::EnergyGrid;
use crate::params::Model;
use crate::scalar::{abs2, cabs, cplx, CMatrix, CVector, Real};

/// Edge amplitude above which the grid is considered too narrow.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

type C<T> = Complex<T>;

/// A subspace with its continuum replaced by grid nodes carrying couplings
/// scaled by `√ΔE`.
#[derive(Debug, Clone)]
pub struct DiscretizedSystem<T: Real> {
    system: SubspaceSystem<T>,
    grid: EnergyGrid<T>,
    h: T,
}

/// Result of an oracle integration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun<T: Real> {
    pub state: AmplitudeState<T>,
    /// Largest deviation of the discrete norm from its initial value.
    pub norm_drift: T,
    /// Largest continuum amplitude at the two grid edges at the final time.
    pub boundary_amplitude: T,
    pub leakage_warning: bool,
}

impl<T: Real> DiscretizedSystem<T> {
    pub fn new(n: usize, model: &Model<T>, grid: EnergyGrid<T>, h: T) -> Result<Self> {
        if !(h > T::zero() && h.is_finite()) {
            return Err(oracle_err("integrate", format!("step h = {h} must be positive")));
        }
        Ok(Self { system: build_subspace(n, &model.couplings, &model.energies), grid, h })
    }

    pub fn system(&self) -> &SubspaceSystem<T> {
        &self.system
    }

    /// Integrates from `c(0) = c0`, `d(0) = 0` up to `t_final`.
    pub fn integrate(&self, c0: &CVector<T>, t_final: T) -> Result<OracleRun<T>> {
        let s = &self.system;
        let (dc, dd) = (s.dim_c(), s.dim_d());
        if c0.len() != dc {
            return Err(oracle_err("integrate", format!("initial vector has {} entries, expected {dc}", c0.len())));
        }
        let nodes = self.grid.nodes();
        let sq = cplx(self.grid.spacing().sqrt());
        let a = dense(s.a());
        let b1 = dense(&(s.b1() * sq));
        let b2 = dense(&(s.b2() * sq));
        let k0 = dense(s.k0());

        let mut y = vec![C::new(T::zero(), T::zero()); dc + dd * nodes.len()];
        y[..dc].copy_from_slice(c0.as_slice());
        let norm0 = norm_sqr(&y);
        let mut drift = T::zero();

        let rhs = |y: &[C<T>], out: &mut [C<T>]| {
            let (c, d) = y.split_at(dc);
            let (oc, od) = out.split_at_mut(dc);
            for r in 0..dc {
                let mut acc = C::new(T::zero(), T::zero());
                for q in 0..dc {
                    acc += a[r * dc + q] * c[q];
                }
                oc[r] = acc;
            }
            for (i, e) in nodes.iter().enumerate() {
                let di = &d[i * dd..(i + 1) * dd];
                let odi = &mut od[i * dd..(i + 1) * dd];
                for r in 0..dd {
                    let mut acc = di[r] * *e;
                    for q in 0..dd {
                        acc += k0[r * dd + q] * di[q];
                    }
                    for q in 0..dc {
                        acc += b2[r * dc + q] * c[q];
                    }
                    odi[r] = acc;
                }
                for r in 0..dc {
                    for q in 0..dd {
                        oc[r] += b1[r * dd + q] * di[q];
                    }
                }
            }
            mul_neg_i(out);
        };
        rk4(&mut y, t_final, self.h, rhs, |y| {
            drift = drift.max((norm_sqr(y) - norm0).abs());
        })?;

        let inv = T::one() / self.grid.spacing().sqrt();
        let d = CMatrix::from_fn(dd, nodes.len(), |r, i| y[dc + i * dd + r] * inv);
        let edge = |i: usize| d.column(i).iter().fold(T::zero(), |m, z| m.max(cabs(*z)));
        let boundary_amplitude = if dd == 0 { T::zero() } else { edge(0).max(edge(nodes.len() - 1)) };
        Ok(OracleRun {
            state: AmplitudeState {
                n: s.n(),
                t: t_final,
                c: CVector::from_column_slice(&y[..dc]),
                energies: nodes.clone(),
                d,
            },
            norm_drift: drift,
            boundary_amplitude,
            leakage_warning: boundary_amplitude > T::lit(LEAKAGE_THRESHOLD),
        })
    }
}

/// Full discretized-continuum run of subspace `n` from the atomic ground
/// state with bound amplitude `amplitude`.
pub fn integrate<T: Real>(
    n: usize,
    model: &Model<T>,
    amplitude: Complex<T>,
    grid: &EnergyGrid<T>,
    t_final: T,
    h: T,
) -> Result<OracleRun<T>> {
    DiscretizedSystem::new(n, model, *grid, h)?.integrate(&initial_bound_vector(n, amplitude), t_final)
}

/// Reduced run: `dc/dt = -iMc` and, at each listed energy,
/// `dd/dt = -iK(E)d - iB2 c`.
pub fn integrate_markov<T: Real>(
    n: usize,
    model: &Model<T>,
    amplitude: Complex<T>,
    energies: &[T],
    t_final: T,
    h: T,
) -> Result<AmplitudeState<T>> {
    if !(h > T::zero() && h.is_finite()) {
        return Err(oracle_err("integrate_markov", format!("step h = {h} must be positive")));
    }
    let s = build_subspace(n, &model.couplings, &model.energies);
    let (dc, dd) = (s.dim_c(), s.dim_d());
    let m = dense(s.m());
    let b2 = dense(s.b2());
    let k0 = dense(s.k0());
    let mut y = vec![C::new(T::zero(), T::zero()); dc + dd * energies.len()];
    y[..dc].copy_from_slice(initial_bound_vector(n, amplitude).as_slice());

    let rhs = |y: &[C<T>], out: &mut [C<T>]| {
        let (c, d) = y.split_at(dc);
        let (oc, od) = out.split_at_mut(dc);
        for r in 0..dc {
            let mut acc = C::new(T::zero(), T::zero());
            for q in 0..dc {
                acc += m[r * dc + q] * c[q];
            }
            oc[r] = acc;
        }
        for (i, e) in energies.iter().enumerate() {
            for r in 0..dd {
                let mut acc = d[i * dd + r] * *e;
                for q in 0..dd {
                    acc += k0[r * dd + q] * d[i * dd + q];
                }
                for q in 0..dc {
                    acc += b2[r * dc + q] * c[q];
                }
                od[i * dd + r] = acc;
            }
        }
        mul_neg_i(out);
    };
    rk4(&mut y, t_final, h, rhs, |_| {})?;
    Ok(AmplitudeState {
        n,
        t: t_final,
        c: CVector::from_column_slice(&y[..dc]),
        energies: energies.to_vec(),
        d: CMatrix::from_fn(dd, energies.len(), |r, i| y[dc + i * dd + r]),
    })
}

/// Pointwise discrepancy between two amplitude states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport<T> {
    pub max_c_error: T,
    pub max_d_error: T,
    /// Difference of the two discrete norms `|c|² + Σ ΔE |d|²`.
    pub norm_drift: T,
}

pub fn compare<T: Real>(closed: &AmplitudeState<T>, brute: &AmplitudeState<T>) -> Result<ComparisonReport<T>> {
    let mismatch = |what: String| Err(oracle_err("compare", format!("shape mismatch: {what}")));
    if closed.n != brute.n {
        return mismatch(format!("subspace {} vs {}", closed.n, brute.n));
    }
    if (closed.t - brute.t).abs() > T::tol(1e-12) * closed.t.abs().max(T::one()) {
        return mismatch(format!("time {} vs {}", closed.t, brute.t));
    }
    if closed.c.len() != brute.c.len() || closed.d.shape() != brute.d.shape() {
        return mismatch(format!(
            "dimensions ({}, {:?}) vs ({}, {:?})",
            closed.c.len(),
            closed.d.shape(),
            brute.c.len(),
            brute.d.shape()
        ));
    }
    if closed.energies.len() != brute.energies.len()
        || closed.energies.iter().zip(&brute.energies).any(|(a, b)| (*a - *b).abs() > T::tol(1e-12) * a.abs().max(T::one()))
    {
        return mismatch("energy grids differ".into());
    }
    let max_diff = |a: &[C<T>], b: &[C<T>]| a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max(cabs(*x - *y)));
    let norm = |s: &AmplitudeState<T>| {
        let spacing = match s.energies.len() {
            0 | 1 => T::zero(),
            k => (s.energies[k - 1] - s.energies[0]) / T::from_usize(k - 1).unwrap(),
        };
        s.c.iter().fold(T::zero(), |a, z| a + abs2(*z)) + spacing * s.d.iter().fold(T::zero(), |a, z| a + abs2(*z))
    };
    Ok(ComparisonReport {
        max_c_error: max_diff(closed.c.as_slice(), brute.c.as_slice()),
        max_d_error: max_diff(closed.d.as_slice(), brute.d.as_slice()),
        norm_drift: (norm(closed) - norm(brute)).abs(),
    })
}

fn oracle_err(op: &'static str, reason: String) -> Error {
    Error::Oracle { op, reason }
}

fn dense<T: Real>(m: &CMatrix<T>) -> Vec<C<T>> {
    let mut v = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for q in 0..m.ncols() {
            v.push(m[(r, q)]);
        }
    }
    v
}

fn mul_neg_i<T: Real>(v: &mut [C<T>]) {
    for z in v {
        *z = C::new(z.im, -z.re);
    }
}

fn norm_sqr<T: Real>(y: &[C<T>]) -> T {
    y.iter().fold(T::zero(), |a, z| a + abs2(*z))
}

/// Fixed-step RK4 from 0 to `t_final`. The step is `h` shrunk just enough to
/// land on `t_final` exactly.
fn rk4<T: Real>(
    y: &mut [C<T>],
    t_final: T,
    h: T,
    mut f: impl FnMut(&[C<T>], &mut [C<T>]),
    mut observe: impl FnMut(&[C<T>]),
) -> Result<()> {
    if !(t_final >= T::zero() && t_final.is_finite()) {
        return Err(oracle_err("integrate", format!("final time {t_final} must be finite and >= 0")));
    }
    let steps = (t_final / h - T::lit(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
    if steps == 0 {
        return Ok(());
    }
    let h = t_final / T::from_usize(steps).unwrap();
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let len = y.len();
    let zero = C::new(T::zero(), T::zero());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    for _ in 0..steps {
        f(y, &mut k1);
        axpy(&mut tmp, y, half, &k1);
        f(&tmp, &mut k2);
        axpy(&mut tmp, y, half, &k2);
        f(&tmp, &mut k3);
        axpy(&mut tmp, y, h, &k3);
        f(&tmp, &mut k4);
        for i in 0..len {
            y[i] += (k1[i] + (k2[i] + k3[i]) * T::lit(2.0) + k4[i]) * sixth;
        }
        observe(y);
    }
    Ok(())
}

fn axpy<T: Real>(out: &mut [C<T>], y: &[C<T>], a: T, k: &[C<T>]) {
    for i in 0..out.len() {
        out[i] = y[i] + k[i] * a;
    }
}
