//! Executes a [`RunConfig`] and writes its CSV artifacts.
//!
//! Files are named `<out>_<kind>.csv`. A run that completes but breaks an
//! enforced invariant reports the offending residuals; the binary turns
//! that into exit status 2.

use std::path::{Path, PathBuf};

use crate::analysis::{
    amplitude_run, bandwidth_scan, detuning_scan, equivalence_scan, oracle_check, ScanPoint,
};
use crate::config::{Mode, RunConfig, Tolerances};
use crate::effective::EffectiveTrajectory;
use crate::error::Result;
use crate::model::PulseParams;
use crate::output::{self, write_csv, write_trajectory};
use crate::pulse::PulseEnvelope;
use crate::thermo::{self, ThermoReport};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// One line per violated invariant, naming the residual.
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }
}

fn artifact(out: &str, kind: &str) -> Result<PathBuf> {
    let path = PathBuf::from(format!("{out}_{kind}.csv"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(path)
}

fn check(name: &str, value: f64, limit: f64, at: &PulseParams, violations: &mut Vec<String>) {
    if value.is_nan() || value.abs() > limit {
        violations.push(format!(
            "{name} = {value:e} exceeds {limit:e} (delta = {}, deltaL = {})",
            at.delta(),
            at.delta_l()
        ));
    }
}

fn check_thermo(r: &ThermoReport, at: &PulseParams, omega0: f64, tol: &Tolerances, violations: &mut Vec<String>) {
    check("res_first_law", r.residual_first_law, tol.identity * omega0, at, violations);
    check("res_q_split", r.residual_q_split, tol.identity * omega0, at, violations);
    check("res_w_split", r.residual_w_split, tol.identity, at, violations);
}

fn check_points(points: &[ScanPoint], config: &RunConfig, violations: &mut Vec<String>) {
    for p in points {
        check_thermo(&p.report, &p.pulse, config.system.omega0(), &config.tolerances, violations);
    }
}

fn write_scan(path: &Path, points: &[ScanPoint]) -> Result<()> {
    write_csv(path, &output::scan_header(), points.iter().map(output::scan_row))
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let tol = &config.tolerances;
    let system = &config.system;
    match config.mode {
        Mode::Single => {
            let envelope = PulseEnvelope::new(*system, config.pulse);
            let traj = amplitude_run(&envelope, config.method, &config.options)?;
            let report = thermo::analyze(&traj, &config.options.policy())?;
            let eff = EffectiveTrajectory::from_amplitudes(&traj);
            let path = artifact(&config.out, "trajectory")?;
            write_trajectory(&path, &traj, &eff, config.trajectory_stride)?;
            outcome.files.push(path);
            let path = artifact(&config.out, "summary")?;
            write_csv(&path, &output::SUMMARY_HEADER, [output::summary_row(&report)])?;
            outcome.files.push(path);
            check_thermo(&report, &config.pulse, system.omega0(), tol, &mut outcome.violations);
        }
        Mode::DetuningScan => {
            let delta = config.pulse.delta();
            let scan = detuning_scan(system, delta, &config.delta_l_list, config.method, &config.options)?;
            let path = artifact(&config.out, "scan")?;
            write_scan(&path, &scan.points)?;
            outcome.files.push(path);
            let path = artifact(&config.out, "antisymmetry")?;
            let rows = scan
                .antisymmetry
                .iter()
                .map(|&(dl, r)| vec![output::number(dl), output::number(r)]);
            write_csv(&path, &output::ANTISYMMETRY_HEADER, rows)?;
            outcome.files.push(path);
            check_points(&scan.points, config, &mut outcome.violations);
            for &(dl, r) in &scan.antisymmetry {
                let at = PulseParams::detuned(delta, dl, system)?;
                check("W1_sum", r, tol.antisymmetry, &at, &mut outcome.violations);
            }
        }
        Mode::BandwidthScan => {
            let points = bandwidth_scan(
                system,
                config.pulse.delta_l(),
                &config.delta_list,
                config.method,
                &config.options,
            )?;
            let path = artifact(&config.out, "scan")?;
            write_scan(&path, &points)?;
            outcome.files.push(path);
            check_points(&points, config, &mut outcome.violations);
        }
        Mode::Equivalence => {
            let reports = equivalence_scan(system, config.pulse.delta_l(), &config.delta_list, &config.options)?;
            let path = artifact(&config.out, "equivalence")?;
            write_csv(&path, &output::EQUIVALENCE_HEADER, reports.iter().map(output::equivalence_row))?;
            outcome.files.push(path);
            for r in &reports {
                check(
                    "max_residual",
                    r.max_residual,
                    tol.identity * system.omega0(),
                    &r.params,
                    &mut outcome.violations,
                );
                if r.enforced() {
                    for name in r.violations(tol.equivalence) {
                        let value = match name {
                            "rel_err_eq8" => r.rel_err_eq8,
                            "rel_err_eq9" => r.rel_err_eq9,
                            _ => r.rel_err_eq10,
                        };
                        check(name, value, tol.equivalence, &r.params, &mut outcome.violations);
                    }
                }
            }
        }
        Mode::OracleCheck => {
            let check_result = oracle_check(system, config.pulse, &config.oracle)?;
            let path = artifact(&config.out, "oracle")?;
            write_csv(&path, &output::ORACLE_HEADER, check_result.levels.iter().map(output::oracle_row))?;
            outcome.files.push(path);
            let finest = check_result.finest();
            check("norm_drift", finest.max_drift, tol.norm_drift, &config.pulse, &mut outcome.violations);
            check("max_error", finest.max_error, tol.oracle, &config.pulse, &mut outcome.violations);
        }
    }
    Ok(outcome)
}
