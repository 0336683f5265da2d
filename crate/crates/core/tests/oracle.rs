use autoion::dynamics::{build_subspace, closed_form_state, spectral_decompose};
use autoion::field::initial_bound_vector;
use autoion::oracle::{compare, integrate, integrate_markov};
use autoion::{EnergyGrid, Preset};
use nalgebra::Complex;

fn one() -> Complex<f64> {
    Complex::new(1.0, 0.0)
}

fn closed(p: Preset, n: usize, energies: &[f64], t: f64) -> autoion::f64::AmplitudeState {
    let m = p.model::<f64>();
    let s = build_subspace(n, &m.couplings, &m.energies);
    let sd = spectral_decompose(&s).unwrap();
    closed_form_state(&s, &sd, &initial_bound_vector(n, one()), energies, t)
}

#[test]
fn reduced_oracle_matches_closed_form() {
    let energies: Vec<f64> = (0..61).map(|i| -4.0 + 0.15 * i as f64).collect();
    for p in Preset::ALL {
        let m = p.model::<f64>();
        for n in 1..=3 {
            let brute = integrate_markov(n, &m, one(), &energies, 2.0, 1e-3).unwrap();
            let r = compare(&closed(p, n, &energies, 2.0), &brute).unwrap();
            assert!(r.max_c_error <= 1e-6 && r.max_d_error <= 1e-6, "{p:?} n={n}: {r:?}");
        }
    }
}

#[test]
fn discretized_oracle_case_a_single_photon() {
    let m = Preset::A.model::<f64>();
    let grid = EnergyGrid::new(-20.0, 22.0, 4001).unwrap();
    let run = integrate(1, &m, one(), &grid, 2.0, 1e-3).unwrap();
    let r = compare(&closed(Preset::A, 1, &grid.nodes(), 2.0), &run.state).unwrap();
    assert!(r.max_d_error <= 1e-3, "{r:?}");
    assert!(run.norm_drift <= 1e-8, "{}", run.norm_drift);
}

#[test]
fn discretization_error_shrinks_with_band_width() {
    // The residual discrepancy is a finite-band level shift; doubling the band
    // at fixed spacing should roughly halve it.
    let m = Preset::B.model::<f64>();
    let narrow = EnergyGrid::new(-20.0, 22.0, 4001).unwrap();
    let wide = EnergyGrid::new(-41.0, 43.0, 8001).unwrap();
    let err = |g: &EnergyGrid<f64>| {
        let run = integrate(2, &m, one(), g, 2.0, 1e-3).unwrap();
        compare(&closed(Preset::B, 2, &g.nodes(), 2.0), &run.state).unwrap().max_c_error
    };
    let (a, b) = (err(&narrow), err(&wide));
    assert!(b <= 0.6 * a, "narrow {a:e}, wide {b:e}");
}

#[test]
fn narrow_grid_raises_leakage_warning() {
    let m = Preset::A.model::<f64>();
    let grid = EnergyGrid::new(0.0, 2.0, 201).unwrap();
    let run = integrate(1, &m, one(), &grid, 2.0, 1e-2).unwrap();
    assert!(run.leakage_warning);
}

#[test]
fn coarse_step_breaks_agreement() {
    let m = Preset::A.model::<f64>();
    let grid = EnergyGrid::new(-20.0, 22.0, 401).unwrap();
    let run = integrate(1, &m, one(), &grid, 2.0, 0.5).unwrap();
    let r = compare(&closed(Preset::A, 1, &grid.nodes(), 2.0), &run.state).unwrap();
    assert!(!(r.max_c_error <= 1e-3 && r.max_d_error <= 1e-3));
}
