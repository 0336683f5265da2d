//! Scenario files and their resolution into model inputs.

use std::path::{Path, PathBuf};

use autoion::field::{DEFAULT_CAP, DEFAULT_EPSILON};
use autoion::params::{derive_couplings, Couplings, Energies, Model, ReducedParams};
use autoion::{Complex, EnergyGrid, PairingMode, Preset, PumpState};
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Scenario file as written by the user.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: Option<String>,
    pub t: Option<f64>,
    pub pairing: Option<String>,
    pub output: Option<PathBuf>,
    pub energies: Option<EnergiesFile>,
    pub preset: Option<String>,
    pub reduced: Option<ReducedFile>,
    pub raw: Option<RawFile>,
    pub pump: Option<PumpFile>,
    pub grid: Option<GridFile>,
    pub map_grid: Option<GridFile>,
    pub oracle: Option<OracleFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergiesFile {
    pub e_a: f64,
    pub e_b: f64,
    pub e_l: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedFile {
    pub q_a: f64,
    pub gamma_a: f64,
    pub q_b: f64,
    pub gamma_b: f64,
    pub omega: f64,
    #[serde(default)]
    pub q_trans: f64,
}

/// A complex number written as `x` or `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexFile {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexFile {
    fn value(self) -> Complex<f64> {
        match self {
            ComplexFile::Real(x) => Complex::new(x, 0.0),
            ComplexFile::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFile {
    pub v: Option<ComplexFile>,
    pub j: Option<ComplexFile>,
    pub j_ab: Option<ComplexFile>,
    pub mu: Option<ComplexFile>,
    pub mu_a: Option<ComplexFile>,
    pub mu_b: Option<ComplexFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpFile {
    pub kind: String,
    pub mean_n: Option<f64>,
    pub fock_n: Option<usize>,
    pub epsilon: Option<f64>,
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub h: Option<f64>,
    pub grid: Option<GridFile>,
}

/// How the couplings were specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamMode {
    Reduced(ReducedParams<f64>),
    Raw(Couplings<f64>),
}

/// Command-line values that take precedence over the scenario file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub t: Option<f64>,
    pub grid: Option<String>,
    pub map_grid: Option<String>,
    pub pump: Option<String>,
    pub pairing: Option<String>,
    pub out: Option<PathBuf>,
    pub omega: Option<f64>,
    pub h: Option<f64>,
    pub cap: Option<usize>,
    pub epsilon: Option<f64>,
}

/// Fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub energies: Energies<f64>,
    pub params: ParamMode,
    pub pump: PumpState,
    pub t: f64,
    /// `None` selects the automatic window.
    pub grid: Option<EnergyGrid<f64>>,
    pub map_grid: EnergyGrid<f64>,
    pub pairing: PairingMode,
    pub out: PathBuf,
    pub oracle_grid: EnergyGrid<f64>,
    pub oracle_h: f64,
}

pub const DEFAULT_T: f64 = 2.0;
pub const DEFAULT_GRID_COUNT: usize = 2001;

fn config(op: &'static str, msg: impl Into<String>) -> CliError {
    CliError::Config { op, msg: msg.into() }
}

pub fn load_file(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config("load_scenario", format!("cannot read {}: {e}", path.display())))?;
    parse_file(&text).map_err(|e| match e {
        CliError::Config { op, msg } => CliError::Config { op, msg: format!("{}: {msg}", path.display()) },
        other => other,
    })
}

pub fn parse_file(text: &str) -> Result<ScenarioFile, CliError> {
    toml::from_str(text).map_err(|e| {
        let at = e
            .span()
            .map(|s| {
                let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                format!("line {line}: ")
            })
            .unwrap_or_default();
        config("load_scenario", format!("{at}{}", e.message()))
    })
}

/// Scenario equivalent to a built-in preset.
pub fn preset_file(p: Preset) -> ScenarioFile {
    let r = p.reduced::<f64>();
    ScenarioFile {
        name: Some(p.name().to_owned()),
        reduced: Some(ReducedFile {
            q_a: r.q_a,
            gamma_a: r.gamma_a,
            q_b: r.q_b,
            gamma_b: r.gamma_b,
            omega: r.omega,
            q_trans: r.q_trans,
        }),
        ..ScenarioFile::default()
    }
}

fn grid_from(g: GridFile, what: &str) -> Result<EnergyGrid<f64>, CliError> {
    EnergyGrid::new(g.min, g.max, g.count).map_err(|e| config("resolve", format!("{what}: {e}")))
}

fn parse_grid(s: &str, what: &str) -> Result<EnergyGrid<f64>, CliError> {
    s.parse().map_err(|e| config("resolve", format!("{what}: {e}")))
}

fn parse_pump(s: &str, epsilon: f64, cap: usize) -> Result<PumpState, CliError> {
    let bad = || config("resolve", format!("--pump {s:?}: expected coherent:MEAN or fock:N"));
    let (kind, value) = s.split_once(':').ok_or_else(bad)?;
    match kind {
        "coherent" => {
            let mean_n = value.parse().map_err(|_| bad())?;
            Ok(PumpState::Coherent { mean_n, epsilon, cap })
        }
        "fock" => Ok(PumpState::Fock { n: value.parse().map_err(|_| bad())? }),
        _ => Err(bad()),
    }
}

impl ScenarioFile {
    pub fn resolve(self, ov: &Overrides) -> Result<Scenario, CliError> {
        let energies = match &self.energies {
            Some(e) => Energies::new(e.e_a, e.e_b, e.e_l).map_err(|e| config("resolve", e.to_string()))?,
            None => Energies::resonant(),
        };

        let modes = [self.preset.is_some(), self.reduced.is_some(), self.raw.is_some()];
        if modes.iter().filter(|m| **m).count() != 1 {
            return Err(config("resolve", "exactly one of `preset`, `[reduced]` or `[raw]` must be given"));
        }
        let mut params = if let Some(name) = &self.preset {
            let p: Preset = name.parse().map_err(|e: String| config("resolve", e))?;
            ParamMode::Reduced(p.reduced())
        } else if let Some(r) = &self.reduced {
            ParamMode::Reduced(ReducedParams {
                q_a: r.q_a,
                gamma_a: r.gamma_a,
                q_b: r.q_b,
                gamma_b: r.gamma_b,
                omega: r.omega,
                q_trans: r.q_trans,
            })
        } else {
            let r = self.raw.as_ref().expect("checked above");
            let z = |x: Option<ComplexFile>| x.map(ComplexFile::value).unwrap_or_default();
            ParamMode::Raw(Couplings {
                v: z(r.v),
                j: z(r.j),
                j_ab: z(r.j_ab),
                mu: z(r.mu),
                mu_a: z(r.mu_a),
                mu_b: z(r.mu_b),
            })
        };
        if let Some(omega) = ov.omega {
            match &mut params {
                ParamMode::Reduced(r) => r.omega = omega,
                ParamMode::Raw(_) => return Err(config("resolve", "--omega applies to reduced parameters only")),
            }
        }
        match &params {
            ParamMode::Reduced(r) => {
                derive_couplings(r).map_err(|e| config("resolve", e.to_string()))?;
            }
            ParamMode::Raw(c) if !c.is_finite() => return Err(config("resolve", "raw couplings must be finite")),
            ParamMode::Raw(_) => {}
        }

        let pf = self.pump.as_ref();
        let epsilon = ov.epsilon.or(pf.and_then(|p| p.epsilon)).unwrap_or(DEFAULT_EPSILON);
        let cap = ov.cap.or(pf.and_then(|p| p.cap)).unwrap_or(DEFAULT_CAP);
        let pump = match (&ov.pump, pf) {
            (Some(s), _) => parse_pump(s, epsilon, cap)?,
            (None, Some(p)) => match p.kind.as_str() {
                "coherent" => PumpState::Coherent {
                    mean_n: p.mean_n.ok_or_else(|| config("resolve", "pump.mean_n is required for a coherent pump"))?,
                    epsilon,
                    cap,
                },
                "fock" => PumpState::Fock {
                    n: p.fock_n.ok_or_else(|| config("resolve", "pump.fock_n is required for a Fock pump"))?,
                },
                other => return Err(config("resolve", format!("pump.kind {other:?}: expected coherent or fock"))),
            },
            (None, None) => PumpState::Coherent { mean_n: 1.0, epsilon, cap },
        };
        pump.validate().map_err(|e| config("resolve", e.to_string()))?;

        let t = ov.t.or(self.t).unwrap_or(DEFAULT_T);
        if !(t.is_finite() && t >= 0.0) {
            return Err(config("resolve", format!("t = {t} must be finite and >= 0")));
        }
        let grid = match (&ov.grid, self.grid) {
            (Some(s), _) if s == "auto" => None,
            (Some(s), _) => Some(parse_grid(s, "--grid")?),
            (None, Some(g)) => Some(grid_from(g, "grid")?),
            (None, None) => None,
        };
        let map_grid = match (&ov.map_grid, self.map_grid) {
            (Some(s), _) => parse_grid(s, "--map-grid")?,
            (None, Some(g)) => grid_from(g, "map_grid")?,
            (None, None) => EnergyGrid::new(-2.0, 3.0, 101).expect("valid default"),
        };
        let pairing = match ov.pairing.as_ref().or(self.pairing.as_ref()) {
            Some(s) => s.parse().map_err(|e: String| config("resolve", e))?,
            None => PairingMode::Literal,
        };
        let of = self.oracle.as_ref();
        let oracle_h = ov.h.or(of.and_then(|o| o.h)).unwrap_or(1e-3);
        if !(oracle_h > 0.0 && oracle_h.is_finite()) {
            return Err(config("resolve", format!("oracle step h = {oracle_h} must be positive")));
        }
        let oracle_grid = match of.and_then(|o| o.grid) {
            Some(g) => grid_from(g, "oracle.grid")?,
            None => EnergyGrid::new(-20.0, 22.0, 4001).expect("valid default"),
        };

        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".to_owned()),
            energies,
            params,
            pump,
            t,
            grid,
            map_grid,
            pairing,
            out: ov.out.clone().or(self.output.clone()).unwrap_or_else(|| PathBuf::from(".")),
            oracle_grid,
            oracle_h,
        })
    }
}

fn c_json(z: Complex<f64>) -> serde_json::Value {
    json!([z.re, z.im])
}

fn grid_json(g: &EnergyGrid<f64>) -> serde_json::Value {
    json!({ "min": g.min(), "max": g.max(), "count": g.count() })
}

impl Scenario {
    pub fn model(&self) -> Result<Model<f64>, CliError> {
        match &self.params {
            ParamMode::Reduced(r) => Model::from_reduced(self.energies, r).map_err(|e| config("resolve", e.to_string())),
            ParamMode::Raw(c) => Ok(Model::new(self.energies, *c)),
        }
    }

    /// Canonical description of every input that affects results (the output
    /// directory excluded).
    pub fn canonical(&self) -> serde_json::Value {
        let params = match &self.params {
            ParamMode::Reduced(r) => json!({
                "mode": "reduced",
                "q_a": r.q_a, "gamma_a": r.gamma_a, "q_b": r.q_b,
                "gamma_b": r.gamma_b, "omega": r.omega, "q_trans": r.q_trans,
            }),
            ParamMode::Raw(c) => json!({
                "mode": "raw",
                "v": c_json(c.v), "j": c_json(c.j), "j_ab": c_json(c.j_ab),
                "mu": c_json(c.mu), "mu_a": c_json(c.mu_a), "mu_b": c_json(c.mu_b),
            }),
        };
        let pump = match self.pump {
            PumpState::Coherent { mean_n, epsilon, cap } => {
                json!({ "kind": "coherent", "mean_n": mean_n, "epsilon": epsilon, "cap": cap })
            }
            PumpState::Fock { n } => json!({ "kind": "fock", "fock_n": n }),
        };
        json!({
            "name": self.name,
            "energies": { "e_a": self.energies.e_a, "e_b": self.energies.e_b, "e_l": self.energies.e_l },
            "params": params,
            "pump": pump,
            "t": self.t,
            "grid": self.grid.as_ref().map(grid_json),
            "map_grid": grid_json(&self.map_grid),
            "pairing": self.pairing.name(),
            "oracle": { "h": self.oracle_h, "grid": grid_json(&self.oracle_grid) },
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.canonical()).expect("serializable");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
