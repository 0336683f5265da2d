//! The `spectra`, `negativity`, `fock-components` and `oracle` subcommands.

use std::path::PathBuf;

use autoion::dynamics::{build_subspace, closed_form_state, spectral_decompose};
use autoion::entanglement::negativity_map;
use autoion::field::initial_bound_vector;
use autoion::observables::{spectra_from_field, OutgoingField, SpectrumSet};
use autoion::oracle::{compare, integrate};
use autoion::{Complex, EnergyGrid};
use serde_json::json;

use crate::error::CliError;
use crate::output::{artifact, num, opt, write_json, Csv};
use crate::scenario::{Scenario, DEFAULT_GRID_COUNT};

/// Fraction of the ionized probability the automatic window must hold.
pub const AUTO_WINDOW_FRACTION: f64 = 0.999;

/// Whether Fock components are scaled by the pump weight `|α_N|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FockNormalization {
    Weighted,
    Unweighted,
}

fn spectrum_grid(sc: &Scenario, field: &OutgoingField<f64>) -> Result<EnergyGrid<f64>, CliError> {
    match sc.grid {
        Some(g) => Ok(g),
        None => Ok(field.auto_grid(DEFAULT_GRID_COUNT, AUTO_WINDOW_FRACTION)?),
    }
}

fn compute_spectra(sc: &Scenario) -> Result<SpectrumSet<f64>, CliError> {
    let field = OutgoingField::new(&sc.model()?, &sc.pump, sc.t)?;
    let grid = spectrum_grid(sc, &field)?;
    Ok(spectra_from_field(&field, &grid)?)
}

fn meta(sc: &Scenario, s: &SpectrumSet<f64>) -> Vec<(&'static str, String)> {
    vec![
        ("scenario_hash", sc.hash()),
        ("scenario", sc.name.clone()),
        ("t", num(sc.t)),
        ("p0", num(s.p0)),
        ("p1", num(s.p1)),
    ]
}

pub fn run_spectra(sc: &Scenario) -> Result<Vec<PathBuf>, CliError> {
    let s = compute_spectra(sc)?;
    let mut csv = Csv::new(&meta(sc, &s), &["E_d", "W0", "W1", "W_total", "W_cond0", "W_cond1"]);
    for (i, e) in s.grid.nodes().into_iter().enumerate() {
        let cond = |c: &Option<Vec<f64>>| opt(c.as_ref().map(|v| v[i]));
        csv.row(&[num(e), num(s.w0[i]), num(s.w1[i]), num(s.w_total[i]), cond(&s.w_cond0), cond(&s.w_cond1)]);
    }
    let csv_path = artifact(&sc.out, &sc.name, "spectra.csv");
    csv.write(&csv_path)?;

    let json_path = artifact(&sc.out, &sc.name, "populations.json");
    write_json(
        &json_path,
        &json!({
            "scenario_hash": sc.hash(),
            "scenario": sc.name,
            "t": sc.t,
            "p0": s.p0,
            "p1": s.p1,
            "conditional_defined": [s.w_cond0.is_some(), s.w_cond1.is_some()],
            "grid": { "min": s.grid.min(), "max": s.grid.max(), "count": s.grid.count() },
        }),
    )?;
    Ok(vec![csv_path, json_path])
}

pub fn run_fock_components(sc: &Scenario, norm: FockNormalization) -> Result<Vec<PathBuf>, CliError> {
    let s = compute_spectra(sc)?;
    let mut paths = Vec::new();
    for (&n, weighted) in &s.fock_components {
        let values = match norm {
            FockNormalization::Weighted => weighted.clone(),
            FockNormalization::Unweighted => s.fock_component_unweighted(n).expect("component present"),
        };
        let mut m = meta(sc, &s);
        m.push(("fock_n", n.to_string()));
        m.push(("pump_weight", num(s.fock_weights[&n])));
        m.push((
            "normalization",
            match norm {
                FockNormalization::Weighted => "weighted",
                FockNormalization::Unweighted => "unweighted",
            }
            .to_owned(),
        ));
        let mut csv = Csv::new(&m, &["E_d", "W_out"]);
        for (e, w) in s.grid.nodes().into_iter().zip(&values) {
            csv.row(&[num(e), num(*w)]);
        }
        let path = artifact(&sc.out, &sc.name, &format!("fock{n}.csv"));
        csv.write(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn run_negativity(sc: &Scenario) -> Result<Vec<PathBuf>, CliError> {
    let map = negativity_map(&sc.model()?, &sc.pump, &sc.map_grid, sc.t, sc.pairing)?;
    let meta = [
        ("scenario_hash", sc.hash()),
        ("scenario", sc.name.clone()),
        ("t", num(sc.t)),
        ("pairing", sc.pairing.name().to_owned()),
    ];
    let mut csv = Csv::new(&meta, &["E", "E_prime", "negativity"]);
    let nodes = sc.map_grid.nodes();
    for (i, e) in nodes.iter().enumerate() {
        for (k, ep) in nodes.iter().enumerate() {
            csv.row(&[num(*e), num(*ep), opt(map.get(i, k))]);
        }
    }
    let path = artifact(&sc.out, &sc.name, "negativity.csv");
    csv.write(&path)?;
    Ok(vec![path])
}

/// Discretized-continuum run of one subspace compared with the closed form.
pub fn run_oracle(sc: &Scenario, n: usize) -> Result<serde_json::Value, CliError> {
    let model = sc.model()?;
    let one = Complex::new(1.0, 0.0);
    let run = integrate(n, &model, one, &sc.oracle_grid, sc.t, sc.oracle_h)?;
    let s = build_subspace(n, &model.couplings, &model.energies);
    let sd = spectral_decompose(&s)?;
    let closed = closed_form_state(&s, &sd, &initial_bound_vector(n, one), &sc.oracle_grid.nodes(), sc.t);
    let r = compare(&closed, &run.state)?;
    Ok(json!({
        "scenario_hash": sc.hash(),
        "n": n,
        "t": sc.t,
        "h": sc.oracle_h,
        "max_c_error": r.max_c_error,
        "max_d_error": r.max_d_error,
        "norm_gap": r.norm_drift,
        "oracle_norm_drift": run.norm_drift,
        "boundary_amplitude": run.boundary_amplitude,
        "leakage_warning": run.leakage_warning,
    }))
}
