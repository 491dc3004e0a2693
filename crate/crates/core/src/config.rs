//! Flat `key=value` run configuration.
//!
//! One pair per line; `#` starts a comment. Unknown keys are rejected and
//! every error names the offending line. Lists are comma separated.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::str::FromStr;

use crate::analysis::{OracleOptions, RunOptions};
use crate::dynamics::Method;
use crate::error::{Error, Result};
use crate::model::{PulseParams, SystemParams, DEFAULT_GAMMA0, DEFAULT_OMEGA0};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    DetuningScan,
    BandwidthScan,
    Equivalence,
    OracleCheck,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(Mode::Single),
            "detuning_scan" => Ok(Mode::DetuningScan),
            "bandwidth_scan" => Ok(Mode::BandwidthScan),
            "equivalence" => Ok(Mode::Equivalence),
            "oracle_check" => Ok(Mode::OracleCheck),
            other => Err(format!(
                "mode must be one of single, detuning_scan, bandwidth_scan, equivalence, oracle_check; got '{other}'"
            )),
        }
    }
}

/// Thresholds for the exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Identity residuals, in ħΓ₀ for work splits and ħω₀ for residuals
    /// carrying ω₀ terms.
    pub identity: f64,
    /// Relative error allowed on the enforced equivalences.
    pub equivalence: f64,
    /// |W₁(δ_L) + W₁(−δ_L)| in ħΓ₀.
    pub antisymmetry: f64,
    pub norm_drift: f64,
    /// max_t ||ψ_oracle| − |ψ_closed||.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-8,
            equivalence: 0.05,
            antisymmetry: 1e-6,
            norm_drift: 1e-9,
            oracle: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub system: SystemParams,
    pub pulse: PulseParams,
    pub method: Method,
    pub options: RunOptions,
    pub delta_l_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub oracle: OracleOptions,
    pub tolerances: Tolerances,
    /// Every n-th sample goes to the trajectory CSV.
    pub trajectory_stride: usize,
    pub out: String,
}

pub const DEFAULT_OUT: &str = "photon-work";
const DEFAULT_DETUNINGS: [f64; 7] = [-1.0, -0.5, -0.2, 0.0, 0.2, 0.5, 1.0];
const DEFAULT_BANDWIDTHS: [f64; 4] = [0.1, 0.3, 1.0, 3.0];

const KEYS: &[&str] = &[
    "mode",
    "gamma0",
    "rho0",
    "omega0",
    "delta",
    "omegaL",
    "deltaL",
    "method",
    "step",
    "cycle_tol",
    "max_samples",
    "allow_partial",
    "deltaL_list",
    "delta_list",
    "oracle_half_width",
    "oracle_modes",
    "oracle_t_max",
    "oracle_sample_step",
    "tol_identity",
    "tol_equivalence",
    "tol_antisymmetry",
    "tol_norm",
    "tol_oracle",
    "trajectory_stride",
    "out",
];

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

struct Entries {
    values: HashMap<&'static str, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> usize {
        self.values.get(key).map_or(0, |(l, _)| *l)
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.values.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn number(&self, key: &str) -> Result<Option<(usize, f64)>> {
        let Some((line, v)) = self.raw(key) else { return Ok(None) };
        let x: f64 = v
            .parse()
            .map_err(|_| err(line, format!("{key}: cannot parse '{v}' as a number")))?;
        if !x.is_finite() {
            return Err(err(line, format!("{key} must be finite")));
        }
        Ok(Some((line, x)))
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64> {
        match self.number(key)? {
            None => Ok(default),
            Some((_, x)) if x > 0.0 => Ok(x),
            Some((line, _)) => Err(err(line, format!("{key} must be positive"))),
        }
    }

    fn count(&self, key: &str, min: usize, default: usize) -> Result<usize> {
        let Some((line, v)) = self.raw(key) else { return Ok(default) };
        let n: usize = v
            .parse()
            .map_err(|_| err(line, format!("{key}: cannot parse '{v}' as an integer")))?;
        if n < min {
            return Err(err(line, format!("{key} must be at least {min}")));
        }
        Ok(n)
    }

    fn list(&self, key: &str, positive: bool, default: &[f64]) -> Result<Vec<f64>> {
        let Some((line, v)) = self.raw(key) else { return Ok(default.to_vec()) };
        let items = v
            .split(',')
            .map(|s| {
                let s = s.trim();
                let x: f64 = s
                    .parse()
                    .map_err(|_| err(line, format!("{key}: cannot parse '{s}' as a number")))?;
                if !x.is_finite() || (positive && x <= 0.0) {
                    let need = if positive { "positive" } else { "finite" };
                    return Err(err(line, format!("{key} entries must be {need}")));
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(items)
    }
}

/// Parses configuration text; an empty text is a default single run at
/// resonance.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut values = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key=value, got '{content}'")))?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
            return Err(err(line, format!("unknown key '{key}'")));
        };
        if values.insert(known, (line, value.trim().to_string())).is_some() {
            return Err(err(line, format!("duplicate key '{key}'")));
        }
    }
    let e = Entries { values };

    let mode = match e.raw("mode") {
        None => Mode::Single,
        Some((line, v)) => v.parse().map_err(|m: String| err(line, m))?,
    };
    let method = match e.raw("method") {
        None => Method::ClosedForm,
        Some((_, "closed_form")) => Method::ClosedForm,
        Some((_, "ode")) => Method::Ode,
        Some((line, other)) => {
            return Err(err(line, format!("method must be closed_form or ode; got '{other}'")))
        }
    };

    let gamma0 = e.positive("gamma0", DEFAULT_GAMMA0)?;
    let rho0 = e.positive("rho0", 1.0 / (2.0 * PI))?;
    let omega0 = e.positive("omega0", DEFAULT_OMEGA0)?;
    let system = SystemParams::new(gamma0, omega0, rho0).map_err(|x| at(&e, x))?;

    let delta = e.positive("delta", 1.0)?;
    let pulse = match (e.number("omegaL")?, e.number("deltaL")?) {
        (Some((l1, _)), Some((l2, _))) => {
            return Err(err(l1.max(l2), "omegaL and deltaL are mutually exclusive"));
        }
        (Some((line, w)), None) if w <= 0.0 => return Err(err(line, "omegaL must be positive")),
        (Some((_, w)), None) => PulseParams::new(delta, w, &system),
        (None, Some((_, dl))) => PulseParams::detuned(delta, dl, &system),
        (None, None) => PulseParams::detuned(delta, 0.0, &system),
    }
    .map_err(|x| at(&e, x))?;

    let defaults = RunOptions::default();
    let cycle_tol = e.positive("cycle_tol", defaults.cycle_tol)?;
    if cycle_tol >= 1.0 {
        return Err(err(e.line("cycle_tol"), "cycle_tol must be below 1"));
    }
    let allow_partial = match e.raw("allow_partial") {
        None => false,
        Some((_, "true")) => true,
        Some((_, "false")) => false,
        Some((line, other)) => {
            return Err(err(line, format!("allow_partial must be true or false; got '{other}'")))
        }
    };
    let options = RunOptions {
        step: e.positive("step", defaults.step)?,
        cycle_tol,
        max_samples: e.count("max_samples", 3, defaults.max_samples)?,
        allow_partial,
    };

    let od = OracleOptions::default();
    let oracle = OracleOptions {
        half_width: e.positive("oracle_half_width", od.half_width)?,
        n_modes: e.count("oracle_modes", 3, od.n_modes)?,
        t_max: e.positive("oracle_t_max", od.t_max)?,
        sample_step: e.positive("oracle_sample_step", od.sample_step)?,
    };

    let td = Tolerances::default();
    let tolerances = Tolerances {
        identity: e.positive("tol_identity", td.identity)?,
        equivalence: e.positive("tol_equivalence", td.equivalence)?,
        antisymmetry: e.positive("tol_antisymmetry", td.antisymmetry)?,
        norm_drift: e.positive("tol_norm", td.norm_drift)?,
        oracle: e.positive("tol_oracle", td.oracle)?,
    };

    let delta_list = match mode {
        Mode::Equivalence => e.list("delta_list", true, &[delta])?,
        _ => e.list("delta_list", true, &DEFAULT_BANDWIDTHS)?,
    };
    let out = match e.raw("out") {
        None => DEFAULT_OUT.to_string(),
        Some((line, "")) => return Err(err(line, "out must not be empty")),
        Some((_, v)) => v.to_string(),
    };

    Ok(RunConfig {
        mode,
        system,
        pulse,
        method,
        options,
        delta_l_list: e.list("deltaL_list", false, &DEFAULT_DETUNINGS)?,
        delta_list,
        oracle,
        tolerances,
        trajectory_stride: e.count("trajectory_stride", 1, 1)?,
        out,
    })
}

/// Attaches the line of the offending key to a model validation error.
fn at(e: &Entries, error: Error) -> Error {
    match error {
        Error::Validation { field, requirement } => err(e.line(field), format!("{field} must be {requirement}")),
        other => other,
    }
}

impl RunConfig {
    /// Applies command-line overrides, validated like config entries.
    pub fn with_overrides(mut self, out: Option<String>, step: Option<f64>, cycle_tol: Option<f64>) -> Result<Self> {
        if let Some(out) = out {
            if out.is_empty() {
                return Err(Error::Validation {
                    field: "out",
                    requirement: "non-empty",
                });
            }
            self.out = out;
        }
        if let Some(step) = step {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::Validation {
                    field: "step",
                    requirement: "positive",
                });
            }
            self.options.step = step;
        }
        if let Some(tol) = cycle_tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Validation {
                    field: "cycle_tol",
                    requirement: "in (0, 1)",
                });
            }
            self.options.cycle_tol = tol;
        }
        Ok(self)
    }
}
