//! Long-time joint statistical matrix of atom a and the photoelectron, the
//! photoelectron spectra derived from it, and the marginal populations of
//! atom a's levels.

use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::Complex;

use crate::dynamics::{build_subspace, spectral_decompose, OutgoingWave, SylvesterTerms};
use crate::error::{Error, Result};
use crate::field::{initial_bound_vector, subspace_weights, PumpState};
use crate::grid::EnergyGrid;
use crate::params::Model;
use crate::scalar::{abs2, phase, CMatrix, CVector, Real};

/// Populations below this are treated as absent when conditioning.
pub const CONDITIONING_FLOOR: f64 = 1e-8;

/// How atom-a amplitudes from different photon-number subspaces are paired in
/// the off-diagonal blocks of the joint matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingMode {
    /// Products taken within one subspace `n`.
    #[default]
    Literal,
    /// Products of equal residual photon number: `d0` from subspace `n` with
    /// `d1` from subspace `n + 1`, as a partial trace over the field gives.
    Trace,
}

impl FromStr for PairingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "literal" => Ok(PairingMode::Literal),
            "trace" | "strict-trace" => Ok(PairingMode::Trace),
            other => Err(format!("unknown pairing mode '{other}' (expected literal or trace)")),
        }
    }
}

impl PairingMode {
    pub fn name(self) -> &'static str {
        match self {
            PairingMode::Literal => "literal",
            PairingMode::Trace => "trace",
        }
    }
}

#[derive(Debug, Clone)]
struct Sector<T: Real> {
    n: usize,
    alpha: Complex<T>,
    wave: OutgoingWave<T>,
}

/// The long-time outgoing photoelectron amplitudes of every populated
/// subspace, weighted by the pump amplitudes.
#[derive(Debug, Clone)]
pub struct OutgoingField<T: Real> {
    t: T,
    e_l: T,
    weights: Vec<(usize, Complex<T>)>,
    sectors: Vec<Sector<T>>,
}

/// Long-time amplitudes of all sectors at one energy, `d_j` per sector.
pub type FieldSample<T> = Vec<CVector<T>>;

impl<T: Real> OutgoingField<T> {
    pub fn new(model: &Model<T>, pump: &PumpState, t: T) -> Result<Self> {
        if !(t >= T::zero() && t.is_finite()) {
            return Err(Error::InvalidInput {
                module: "observables",
                op: "joint_matrix",
                reason: format!("time t = {t} must be finite and >= 0"),
            });
        }
        let weights = subspace_weights::<T>(pump)?;
        let mut sectors = Vec::new();
        for &(n, alpha) in &weights {
            if n == 0 {
                continue;
            }
            let s = build_subspace(n, &model.couplings, &model.energies);
            let sd = spectral_decompose(&s).map_err(|e| e.in_subspace(n))?;
            let wave = SylvesterTerms::new(&s, &sd).apply(&initial_bound_vector(n, Complex::new(T::one(), T::zero())));
            sectors.push(Sector { n, alpha, wave });
        }
        Ok(Self { t, e_l: model.energies.e_l, weights, sectors })
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Pump amplitudes `(n, α_n)` including the non-ionizing `n = 0` term.
    pub fn pump_weights(&self) -> &[(usize, Complex<T>)] {
        &self.weights
    }

    /// Long-time amplitudes of every sector at energy `e`.
    pub fn sample(&self, e: T) -> Result<FieldSample<T>> {
        self.sectors
            .iter()
            .map(|s| s.wave.long_time(e, self.t).map_err(|err| err.in_subspace(s.n)))
            .collect()
    }

    pub fn sample_all(&self, energies: &[T]) -> Result<Vec<FieldSample<T>>> {
        energies.iter().map(|&e| self.sample(e)).collect()
    }

    /// `ρ_jk(E, E')` from samples taken at `E` and `E'`.
    pub fn rho(&self, mode: PairingMode, j: usize, k: usize, at_e: &FieldSample<T>, at_ep: &FieldSample<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        match mode {
            PairingMode::Literal => {
                for (i, s) in self.sectors.iter().enumerate() {
                    let (x, y) = (&at_e[i], &at_ep[i]);
                    if x.len() > j && y.len() > k {
                        acc += x[j] * y[k].conj() * s.alpha.norm_sqr();
                    }
                }
            }
            PairingMode::Trace => {
                // Equal residual photon number: n - 1 - j = n' - 1 - k.
                for (i, s) in self.sectors.iter().enumerate() {
                    let Some(np) = (s.n + k).checked_sub(j) else { continue };
                    let Some(ip) = self.sector_index(np) else { continue };
                    let (x, y) = (&at_e[i], &at_ep[ip]);
                    if x.len() > j && y.len() > k {
                        let pair = s.alpha * self.sectors[ip].alpha.conj();
                        // Energy offsets of adjacent subspaces differ by E_L.
                        let shift = T::from_usize(s.n).unwrap() - T::from_usize(np).unwrap();
                        acc += x[j] * y[k].conj() * pair * phase(shift * self.e_l * self.t);
                    }
                }
            }
        }
        acc
    }

    fn sector_index(&self, n: usize) -> Option<usize> {
        self.sectors.binary_search_by_key(&n, |s| s.n).ok()
    }

    /// Smallest resonance width among all sectors.
    pub fn narrowest_width(&self) -> Option<T> {
        self.sectors.iter().filter_map(|s| s.wave.narrowest_width()).reduce(|a, b| a.min(b))
    }

    /// `(p0, p1)` from the closed-form moment matrices.
    pub fn populations(&self) -> Result<(T, T)> {
        self.populations_with(|w| w.moment_matrix(self.t))
    }

    /// `(p0, p1)` restricted to photoelectron energies in `[lo, hi]`.
    pub fn window_populations(&self, lo: T, hi: T) -> Result<(T, T)> {
        self.populations_with(|w| w.window_moment(lo, hi, self.t))
    }

    fn populations_with(&self, moment: impl Fn(&OutgoingWave<T>) -> Result<CMatrix<T>>) -> Result<(T, T)> {
        let (mut p0, mut p1) = (T::zero(), T::zero());
        for s in &self.sectors {
            let m = moment(&s.wave).map_err(|e| e.in_subspace(s.n))?;
            let w = s.alpha.norm_sqr();
            p0 += w * m[(0, 0)].re;
            if m.nrows() > 1 {
                p1 += w * m[(1, 1)].re;
            }
        }
        Ok((p0, p1))
    }

    /// Grid whose span captures `fraction` of the ionized probability,
    /// found by widening around the resonance positions.
    pub fn auto_grid(&self, count: usize, fraction: T) -> Result<EnergyGrid<T>> {
        let peaks: Vec<T> = self.sectors.iter().flat_map(|s| s.wave.peak_positions()).collect();
        let (mut lo, mut hi) = match peaks.iter().copied().reduce(|a, b| a.min(b)) {
            Some(min) => (min, peaks.iter().copied().fold(min, |a, b| a.max(b))),
            None => (T::zero(), T::one()),
        };
        let center = (lo + hi) / T::lit(2.0);
        let mut half = (hi - lo) / T::lit(2.0) + T::one();
        let (f0, f1) = self.populations()?;
        let total = f0 + f1;
        for _ in 0..64 {
            lo = center - half;
            hi = center + half;
            if total <= T::zero() {
                break;
            }
            let (w0, w1) = self.window_populations(lo, hi)?;
            if w0 + w1 >= fraction * total {
                break;
            }
            half *= T::lit(2.0);
        }
        EnergyGrid::new(lo, hi, count)
    }
}

/// `ρ_jk(E, E')` for `j, k ∈ {0, 1}` over a pair of energy lists.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMatrix<T: Real> {
    pub energies: Vec<T>,
    pub energies_prime: Vec<T>,
    pub mode: PairingMode,
    /// `blocks[j][k]` has one row per `E` and one column per `E'`.
    pub blocks: [[CMatrix<T>; 2]; 2],
}

impl<T: Real> JointMatrix<T> {
    pub fn get(&self, j: usize, k: usize, i: usize, ip: usize) -> Complex<T> {
        self.blocks[j][k][(i, ip)]
    }
}

pub fn joint_matrix<T: Real>(
    model: &Model<T>,
    pump: &PumpState,
    energies: &[T],
    energies_prime: &[T],
    t: T,
    mode: PairingMode,
) -> Result<JointMatrix<T>> {
    let field = OutgoingField::new(model, pump, t)?;
    let xs = field.sample_all(energies)?;
    let ys = field.sample_all(energies_prime)?;
    let block = |j, k| {
        CMatrix::from_fn(xs.len(), ys.len(), |a, b| field.rho(mode, j, k, &xs[a], &ys[b]))
    };
    Ok(JointMatrix {
        energies: energies.to_vec(),
        energies_prime: energies_prime.to_vec(),
        mode,
        blocks: [[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]],
    })
}

/// Photoelectron spectra on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet<T: Real> {
    pub grid: EnergyGrid<T>,
    pub t: T,
    pub w0: Vec<T>,
    pub w1: Vec<T>,
    pub w_total: Vec<T>,
    /// `None` when the corresponding population is below [`CONDITIONING_FLOOR`].
    pub w_cond0: Option<Vec<T>>,
    pub w_cond1: Option<Vec<T>>,
    pub p0: T,
    pub p1: T,
    /// Total spectrum of each pump photon number `N`, weighted by `|α_N|²`.
    pub fock_components: BTreeMap<usize, Vec<T>>,
    /// `|α_N|²` for every `N` in `fock_components`.
    pub fock_weights: BTreeMap<usize, T>,
}

impl<T: Real> SpectrumSet<T> {
    /// Fock component divided by its pump weight (the single-Fock spectrum).
    pub fn fock_component_unweighted(&self, n: usize) -> Option<Vec<T>> {
        let w = *self.fock_weights.get(&n)?;
        let v = self.fock_components.get(&n)?;
        Some(v.iter().map(|x| if w > T::zero() { *x / w } else { T::zero() }).collect())
    }
}

pub fn spectra<T: Real>(model: &Model<T>, pump: &PumpState, grid: &EnergyGrid<T>, t: T) -> Result<SpectrumSet<T>> {
    let field = OutgoingField::new(model, pump, t)?;
    spectra_from_field(&field, grid)
}

pub fn spectra_from_field<T: Real>(field: &OutgoingField<T>, grid: &EnergyGrid<T>) -> Result<SpectrumSet<T>> {
    let count = grid.count();
    let mut w0 = vec![T::zero(); count];
    let mut w1 = vec![T::zero(); count];
    let mut fock_components: BTreeMap<usize, Vec<T>> = BTreeMap::new();
    let mut fock_weights = BTreeMap::new();
    for &(n, alpha) in field.pump_weights() {
        fock_components.insert(n, vec![T::zero(); count]);
        fock_weights.insert(n, alpha.norm_sqr());
    }
    for (i, e) in grid.nodes().into_iter().enumerate() {
        let sample = field.sample(e)?;
        for (s, d) in field.sectors.iter().zip(&sample) {
            let w = s.alpha.norm_sqr();
            let a0 = w * abs2(d[0]);
            let a1 = if d.len() > 1 { w * abs2(d[1]) } else { T::zero() };
            w0[i] += a0;
            w1[i] += a1;
            fock_components.get_mut(&s.n).expect("sector in pump")[i] += a0 + a1;
        }
    }
    let w_total = w0.iter().zip(&w1).map(|(a, b)| *a + *b).collect();
    let (p0, p1) = field.populations()?;
    let cond = |w: &[T], p: T| (p >= T::lit(CONDITIONING_FLOOR)).then(|| w.iter().map(|x| *x / p).collect());
    Ok(SpectrumSet {
        grid: *grid,
        t: field.t(),
        w_cond0: cond(&w0, p0),
        w_cond1: cond(&w1, p1),
        w0,
        w1,
        w_total,
        p0,
        p1,
        fock_components,
        fock_weights,
    })
}

/// `(p0, p1)`: long-time probabilities that an electron has left with atom a
/// in its ground (0) or excited (1) level.
pub fn marginal_populations<T: Real>(model: &Model<T>, pump: &PumpState, t: T) -> Result<(T, T)> {
    OutgoingField::new(model, pump, t)?.populations()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn pairing_parse() {
        assert_eq!("literal".parse::<PairingMode>().unwrap(), PairingMode::Literal);
        assert_eq!("strict-trace".parse::<PairingMode>().unwrap(), PairingMode::Trace);
        assert!("x".parse::<PairingMode>().is_err());
    }

    #[test]
    fn vacuum_pump_has_no_ionization() {
        let m = Preset::B.model::<f64>();
        assert_eq!(marginal_populations(&m, &PumpState::coherent(0.0), 2.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn single_photon_never_excites_atom_a() {
        let m = Preset::B.model::<f64>();
        let (p0, p1) = marginal_populations(&m, &PumpState::fock(1), 2.0).unwrap();
        assert_eq!(p1, 0.0);
        assert!((p0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fock_one_joint_blocks_vanish() {
        let m = Preset::APrime.model::<f64>();
        let e = [-1.0, 0.5, 2.0];
        for mode in [PairingMode::Literal, PairingMode::Trace] {
            let j = joint_matrix(&m, &PumpState::fock(1), &e, &e, 2.0, mode).unwrap();
            for (a, b) in [(0, 1), (1, 0), (1, 1)] {
                assert!(j.blocks[a][b].iter().all(|z| *z == Complex::new(0.0, 0.0)));
            }
        }
    }

    #[test]
    fn fock_two_trace_mode_has_no_coherence() {
        let m = Preset::B.model::<f64>();
        let e = [0.5, 1.0, 1.5];
        let tr = joint_matrix(&m, &PumpState::fock(2), &e, &e, 2.0, PairingMode::Trace).unwrap();
        assert!(tr.blocks[0][1].iter().all(|z| z.norm() == 0.0));
        let lit = joint_matrix(&m, &PumpState::fock(2), &e, &e, 2.0, PairingMode::Literal).unwrap();
        assert!(lit.blocks[0][1].iter().any(|z| z.norm() > 1e-6));
    }

    #[test]
    fn joint_matrix_is_hermitian() {
        let m = Preset::C.model::<f64>();
        let e = [0.2, 0.9, 1.4, 2.2];
        for mode in [PairingMode::Literal, PairingMode::Trace] {
            let jm = joint_matrix(&m, &PumpState::coherent(1.5), &e, &e, 2.0, mode).unwrap();
            for j in 0..2 {
                for k in 0..2 {
                    for a in 0..4 {
                        for b in 0..4 {
                            let d = jm.get(j, k, a, b) - jm.get(k, j, b, a).conj();
                            assert!(d.norm() < 1e-15);
                        }
                    }
                }
                for a in 0..4 {
                    assert!(jm.get(j, j, a, a).re >= 0.0 && jm.get(j, j, a, a).im.abs() < 1e-18);
                }
            }
        }
    }

    #[test]
    fn zero_field_gives_empty_spectra() {
        let m = Preset::APrime.model_with_omega::<f64>(0.0).unwrap();
        let g = EnergyGrid::new(-2.0, 3.0, 51).unwrap();
        let s = spectra(&m, &PumpState::coherent(1.0), &g, 2.0).unwrap();
        assert!(s.w_total.iter().all(|x| *x == 0.0));
        assert_eq!((s.p0, s.p1), (0.0, 0.0));
        assert!(s.w_cond0.is_none() && s.w_cond1.is_none());
    }

    #[test]
    fn auto_grid_captures_fraction() {
        let m = Preset::B.model::<f64>();
        let f = OutgoingField::new(&m, &PumpState::coherent(1.0), 2.0).unwrap();
        let g = f.auto_grid(2001, 0.999).unwrap();
        let (p0, p1) = f.populations().unwrap();
        let (w0, w1) = f.window_populations(g.min(), g.max()).unwrap();
        assert!(w0 + w1 >= 0.999 * (p0 + p1));
    }
}
