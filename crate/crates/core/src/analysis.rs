//! Quantum/semiclassical equivalences, detuning and bandwidth scans, and the
//! discretized-mode cross-check.
//!
//! The equivalences compare, on full-cycle grids,
//!
//! ```text
//! W₁ ≈ W_α^reac      Q₁^abs ≈ W_α^abs      Q₁^em ≈ Q_α
//! ```
//!
//! with the semiclassical side taken from the time-domain table forms of a
//! nonlinear Bloch run driven by α(t) = φ(0,t). The linear-response
//! frequency-domain values are reported alongside as diagnostics.

use rayon::prelude::*;

use crate::dynamics::{closed_form_trajectory, full_cycle_horizon, integrate_psi, max_step, AmplitudeTrajectory, Method};
use crate::error::{Error, Result};
use crate::model::{PulseParams, SystemParams, TimeGrid};
use crate::oracle::{self, init_single_photon, propagate, ModeGrid};
use crate::pulse::{Envelope, PulseEnvelope};
use crate::semiclassical::{integrate_bloch, work_absorptive, work_reactive, work_total_and_decomposition};
use crate::thermo::{self, CyclePolicy, ThermoReport, DEFAULT_CYCLE_TOL};

/// Absolute floor (ħΓ₀) for relative errors between near-zero quantities.
pub const ERROR_FLOOR: f64 = 1e-8;

/// Equivalences are only enforced for Δ/Γ₀ up to this value...
pub const REGIME_MAX_BANDWIDTH: f64 = 0.01;
/// ...and peak excited populations up to this value in both models.
pub const REGIME_MAX_POPULATION: f64 = 0.02;

/// Environment variable capping the worker threads of scans.
pub const THREADS_ENV: &str = "PHOTON_WORK_THREADS";

/// Grid and cycle settings shared by all runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub step: f64,
    pub cycle_tol: f64,
    /// Upper bound on samples per trajectory; long horizons coarsen the
    /// step (within the integrator guard) rather than exceed it.
    pub max_samples: usize,
    pub allow_partial: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            cycle_tol: DEFAULT_CYCLE_TOL,
            max_samples: 2_000_000,
            allow_partial: false,
        }
    }
}

impl RunOptions {
    pub fn policy(&self) -> CyclePolicy {
        CyclePolicy {
            cycle_tol: self.cycle_tol,
            allow_partial: self.allow_partial,
        }
    }
}

/// |a − b| / max(|a|, |b|, floor).
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(ERROR_FLOOR)
}

/// Full-cycle grid for `pulse` following the step policy of `opts`.
pub fn run_grid(pulse: &PulseEnvelope, opts: &RunOptions) -> Result<TimeGrid> {
    let tf = full_cycle_horizon(pulse, opts.cycle_tol)?;
    let guard = max_step(pulse.system(), &pulse.params());
    let step = opts.step.max(tf / opts.max_samples as f64).min(guard);
    TimeGrid::with_max_step(tf, step)
}

/// Amplitude trajectory by closed form or RK4.
pub fn amplitude_run(pulse: &PulseEnvelope, method: Method, opts: &RunOptions) -> Result<AmplitudeTrajectory> {
    let grid = run_grid(pulse, opts)?;
    match method {
        Method::ClosedForm => Ok(closed_form_trajectory(pulse, &grid)),
        Method::Ode => integrate_psi(pulse.system(), pulse, &grid),
        Method::Oracle => Err(Error::Domain(
            "the oracle runs on its own time window; use oracle_check".into(),
        )),
    }
}

/// One thermodynamic run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub pulse: PulseParams,
    pub report: ThermoReport,
}

pub fn thermo_point(system: &SystemParams, pulse: PulseParams, method: Method, opts: &RunOptions) -> Result<ScanPoint> {
    let envelope = PulseEnvelope::new(*system, pulse);
    let traj = amplitude_run(&envelope, method, opts)?;
    Ok(ScanPoint {
        pulse,
        report: thermo::analyze(&traj, &opts.policy())?,
    })
}

/// Worker pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))
}

/// Evaluates `f` on every item in parallel, keeping input order.
fn ordered<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    thread_pool()?.install(|| items.par_iter().map(f).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetuningScan {
    pub points: Vec<ScanPoint>,
    /// (δ_L, W₁(δ_L) + W₁(−δ_L)) for every δ_L > 0 whose mirror is listed.
    pub antisymmetry: Vec<(f64, f64)>,
}

impl DetuningScan {
    pub fn max_antisymmetry_residual(&self) -> f64 {
        self.antisymmetry.iter().map(|(_, r)| r.abs()).fold(0.0, f64::max)
    }
}

/// W₁, Q₁ and the heat split across detunings at fixed bandwidth.
pub fn detuning_scan(system: &SystemParams, delta: f64, delta_ls: &[f64], method: Method, opts: &RunOptions) -> Result<DetuningScan> {
    let pulses = delta_ls
        .iter()
        .map(|&dl| PulseParams::detuned(delta, dl, system))
        .collect::<Result<Vec<_>>>()?;
    let points = ordered(&pulses, |p| thermo_point(system, *p, method, opts))?;
    let mut antisymmetry = Vec::new();
    for p in points.iter().filter(|p| p.pulse.delta_l() > 0.0) {
        let dl = p.pulse.delta_l();
        if let Some(m) = points.iter().find(|m| m.pulse.delta_l() == -dl) {
            antisymmetry.push((dl, p.report.w1 + m.report.w1));
        }
    }
    Ok(DetuningScan { points, antisymmetry })
}

/// (|W₁(δ_L = near)|, |W₁(δ_L = far)|) at bandwidth Δ.
pub fn far_detuned_suppression(system: &SystemParams, delta: f64, near: f64, far: f64, opts: &RunOptions) -> Result<(f64, f64)> {
    let scan = detuning_scan(system, delta, &[near, far], Method::ClosedForm, opts)?;
    Ok((scan.points[0].report.w1.abs(), scan.points[1].report.w1.abs()))
}

/// W₁, Q₁ and the heat split across bandwidths at fixed detuning.
pub fn bandwidth_scan(system: &SystemParams, delta_l: f64, deltas: &[f64], method: Method, opts: &RunOptions) -> Result<Vec<ScanPoint>> {
    let pulses = deltas
        .iter()
        .map(|&d| PulseParams::detuned(d, delta_l, system))
        .collect::<Result<Vec<_>>>()?;
    ordered(&pulses, |p| thermo_point(system, *p, method, opts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeFlags {
    pub delta_over_gamma0: f64,
    pub max_pop_quantum: f64,
    pub max_pop_semiclassical: f64,
}

impl RegimeFlags {
    /// Low-excitation, quasi-monochromatic regime where the equivalences
    /// are asserted.
    pub fn in_regime(&self) -> bool {
        self.delta_over_gamma0 <= REGIME_MAX_BANDWIDTH
            && self.max_pop_quantum <= REGIME_MAX_POPULATION
            && self.max_pop_semiclassical <= REGIME_MAX_POPULATION
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub params: PulseParams,
    pub w1: f64,
    pub w_reac_alpha: f64,
    pub q1_abs: f64,
    pub w_abs_alpha: f64,
    pub q1_em: f64,
    pub q_alpha: f64,
    pub rel_err_eq8: f64,
    pub rel_err_eq9: f64,
    pub rel_err_eq10: f64,
    /// Linear-response −ħΔg∫χ̃′|α̃|² dω.
    pub w_reac_freq: f64,
    /// Linear-response ħω_L 2g∫χ̃″|α̃|² dω.
    pub w_abs_freq: f64,
    /// Largest identity residual of either pipeline (ħΓ₀, ω₀ terms included).
    pub max_residual: f64,
    pub regime: RegimeFlags,
    pub samples: usize,
}

impl EquivalenceReport {
    pub fn enforced(&self) -> bool {
        self.regime.in_regime()
    }

    /// Names of the equivalences whose relative error exceeds `tol`.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        [
            ("rel_err_eq8", self.rel_err_eq8),
            ("rel_err_eq9", self.rel_err_eq9),
            ("rel_err_eq10", self.rel_err_eq10),
        ]
        .into_iter()
        .filter(|(_, e)| e.is_nan() || *e > tol)
        .map(|(name, _)| name)
        .collect()
    }
}

/// Runs the single-photon and coherent-pulse pipelines on the same
/// full-cycle grid and compares them.
pub fn compare_equivalences(system: &SystemParams, pulse: PulseParams, opts: &RunOptions) -> Result<EquivalenceReport> {
    let envelope = PulseEnvelope::new(*system, pulse);
    let grid = run_grid(&envelope, opts)?;
    let policy = opts.policy();

    let quantum = closed_form_trajectory(&envelope, &grid);
    let thermo = thermo::analyze(&quantum, &policy)?;
    let max_pop_quantum = quantum.peak_population().0;
    drop(quantum);

    let bloch = integrate_bloch(system, &envelope, &grid)?;
    let semi = work_total_and_decomposition(&bloch, &policy)?;
    let max_pop_semiclassical = bloch.peak_population();
    drop(bloch);

    let max_residual = [
        thermo.residual_first_law,
        thermo.residual_q_split,
        thermo.residual_w_split,
        semi.residual_decomposition,
        semi.residual_first_law,
    ]
    .iter()
    .map(|r| r.abs())
    .fold(0.0, f64::max);

    Ok(EquivalenceReport {
        params: pulse,
        w1: thermo.w1,
        w_reac_alpha: semi.w_reac,
        q1_abs: thermo.q1_abs,
        w_abs_alpha: semi.w_abs,
        q1_em: thermo.q1_em,
        q_alpha: semi.q_alpha,
        rel_err_eq8: relative_error(thermo.w1, semi.w_reac),
        rel_err_eq9: relative_error(thermo.q1_abs, semi.w_abs),
        rel_err_eq10: relative_error(thermo.q1_em, semi.q_alpha),
        w_reac_freq: work_reactive(&envelope),
        w_abs_freq: work_absorptive(&envelope),
        max_residual,
        regime: RegimeFlags {
            delta_over_gamma0: pulse.delta() / system.gamma0(),
            max_pop_quantum,
            max_pop_semiclassical,
        },
        samples: grid.len(),
    })
}

/// Equivalence reports across bandwidths at fixed detuning.
pub fn equivalence_scan(system: &SystemParams, delta_l: f64, deltas: &[f64], opts: &RunOptions) -> Result<Vec<EquivalenceReport>> {
    let pulses = deltas
        .iter()
        .map(|&d| PulseParams::detuned(d, delta_l, system))
        .collect::<Result<Vec<_>>>()?;
    ordered(&pulses, |p| compare_equivalences(system, *p, opts))
}

/// Settings of a discretized-mode check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub half_width: f64,
    pub n_modes: usize,
    pub t_max: f64,
    /// Spacing of the recorded samples (the integrator substeps below it).
    pub sample_step: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            half_width: 100.0,
            n_modes: 4001,
            t_max: 10.0,
            sample_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleLevel {
    pub half_width: f64,
    pub n_modes: usize,
    /// max_t ||ψ_oracle| − |ψ_closed||.
    pub max_error: f64,
    pub max_drift: f64,
    pub captured_mass: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub params: PulseParams,
    /// Ascending half widths at the spacing of the requested grid, ending
    /// with the requested grid itself.
    pub levels: Vec<OracleLevel>,
}

impl OracleCheck {
    pub fn finest(&self) -> &OracleLevel {
        self.levels.last().expect("at least one level")
    }

    /// Errors shrink (or stay within `noise`) as the window widens.
    pub fn converging(&self, noise: f64) -> bool {
        self.levels.windows(2).all(|w| w[1].max_error < w[0].max_error + noise)
    }
}

/// Oracle propagation against the closed form, on the requested comb and on
/// combs of half and quarter width at the same mode spacing.
pub fn oracle_check(system: &SystemParams, pulse: PulseParams, opts: &OracleOptions) -> Result<OracleCheck> {
    let envelope = PulseEnvelope::new(*system, pulse);
    let finest = ModeGrid::new(system, opts.half_width, opts.n_modes)?;
    let grid = TimeGrid::with_max_step(opts.t_max, opts.sample_step)?;
    let exact = closed_form_trajectory(&envelope, &grid);
    let mut combs = Vec::new();
    for div in [4.0, 2.0] {
        let half = opts.half_width / div;
        if half / finest.spacing >= 2.0 {
            combs.push(ModeGrid::with_spacing(system, half, finest.spacing)?);
        }
    }
    combs.push(finest);
    let levels = ordered(&combs, |modes| {
        let photon = init_single_photon(modes, &envelope);
        let run = propagate(&photon, modes, system, &grid)?;
        Ok(OracleLevel {
            half_width: modes.half_width,
            n_modes: modes.n_modes,
            max_error: oracle::max_amplitude_error(&run, &exact),
            max_drift: run.max_drift,
            captured_mass: photon.captured_mass,
            valid: run.recurrence_valid && run.window_valid,
        })
    })?;
    Ok(OracleCheck { params: pulse, levels })
}
