//! CSV artifacts.
//!
//! Numbers are written with 17 significant digits so every column parses
//! back to the exact in-memory value; masked samples are written as `NaN`.
//! Lines end in LF.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analysis::{EquivalenceReport, OracleLevel, ScanPoint};
use crate::dynamics::AmplitudeTrajectory;
use crate::effective::EffectiveTrajectory;
use crate::error::{Error, Result};
use crate::thermo::ThermoReport;

pub const TRAJECTORY_HEADER: [&str; 8] = ["t", "psi_re", "psi_im", "pop", "delta_eff", "gamma_t", "h_int", "valid"];

pub const SUMMARY_HEADER: [&str; 10] = [
    "W1",
    "Q1",
    "Q1_abs",
    "Q1_em",
    "W1_int",
    "W1_reac",
    "dU",
    "res_first_law",
    "res_q_split",
    "res_w_split",
];

pub const EQUIVALENCE_HEADER: [&str; 19] = [
    "delta",
    "deltaL",
    "W1",
    "W_reac_alpha",
    "Q1_abs",
    "W_abs_alpha",
    "Q1_em",
    "Q_alpha",
    "rel_err_eq8",
    "rel_err_eq9",
    "rel_err_eq10",
    "W_reac_freq",
    "W_abs_freq",
    "max_residual",
    "delta_over_gamma0",
    "max_pop_quantum",
    "max_pop_semiclassical",
    "enforced",
    "samples",
];

pub const ORACLE_HEADER: [&str; 6] = ["half_width", "n_modes", "max_error", "norm_drift", "captured_mass", "valid"];

pub const ANTISYMMETRY_HEADER: [&str; 2] = ["deltaL", "W1_sum"];

/// 17 significant digits, `NaN` for masked values.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

pub fn summary_row(r: &ThermoReport) -> Vec<String> {
    [
        r.w1,
        r.q1,
        r.q1_abs,
        r.q1_em,
        r.w1_int,
        r.w1_reac,
        r.du,
        r.residual_first_law,
        r.residual_q_split,
        r.residual_w_split,
    ]
    .iter()
    .map(|&x| number(x))
    .collect()
}

pub fn scan_header() -> Vec<&'static str> {
    let mut h = vec!["delta", "deltaL"];
    h.extend(SUMMARY_HEADER);
    h
}

pub fn scan_row(p: &ScanPoint) -> Vec<String> {
    let mut row = vec![number(p.pulse.delta()), number(p.pulse.delta_l())];
    row.extend(summary_row(&p.report));
    row
}

pub fn equivalence_row(r: &EquivalenceReport) -> Vec<String> {
    let mut row: Vec<String> = [
        r.params.delta(),
        r.params.delta_l(),
        r.w1,
        r.w_reac_alpha,
        r.q1_abs,
        r.w_abs_alpha,
        r.q1_em,
        r.q_alpha,
        r.rel_err_eq8,
        r.rel_err_eq9,
        r.rel_err_eq10,
        r.w_reac_freq,
        r.w_abs_freq,
        r.max_residual,
        r.regime.delta_over_gamma0,
        r.regime.max_pop_quantum,
        r.regime.max_pop_semiclassical,
    ]
    .iter()
    .map(|&x| number(x))
    .collect();
    row.push(flag(r.enforced()));
    row.push(r.samples.to_string());
    row
}

pub fn oracle_row(l: &OracleLevel) -> Vec<String> {
    vec![
        number(l.half_width),
        l.n_modes.to_string(),
        number(l.max_error),
        number(l.max_drift),
        number(l.captured_mass),
        flag(l.valid),
    ]
}

/// Writes a header and rows to `path`.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = BufWriter::new(File::create(path)?);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(e.into_error()))?
        .flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Domain(format!("csv: {other:?}")),
    }
}

/// Trajectory CSV, every `stride`-th sample plus the last one.
pub fn write_trajectory(path: &Path, traj: &AmplitudeTrajectory, eff: &EffectiveTrajectory, stride: usize) -> Result<()> {
    let n = traj.len();
    let stride = stride.max(1);
    let rows = (0..n).filter(|k| k % stride == 0 || k + 1 == n).map(|k| {
        vec![
            number(traj.grid.time(k)),
            number(traj.psi[k].re),
            number(traj.psi[k].im),
            number(eff.pop[k]),
            number(eff.delta_eff[k]),
            number(eff.gamma_t[k]),
            number(eff.h_int[k]),
            flag(eff.valid_mask[k]),
        ]
    });
    write_csv(path, &TRAJECTORY_HEADER, rows)
}
