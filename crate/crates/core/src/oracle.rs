//! Brute-force Schrödinger propagation in the single-excitation subspace.
//!
//! The continuum is replaced by a uniform comb of modes at detunings
//! Δ_k ∈ [−W, W] from ω₀, in the frame rotating at ω₀. The decay rate
//! Γ₀ = 4πg²ϱ₀ counts two field branches of density ϱ₀ each, while the
//! incoming photon occupies one of them. Only the symmetric combination of
//! the two branches couples to the emitter, with ḡ = g√(2ϱ₀δω), so the
//! discrete golden rule 2πḡ²/δω = Γ₀ holds. The photon starts with half of
//! its weight in the coupled combination and half in the dark one:
//!
//! ```text
//! ∂ₜψ = −ḡ Σ s_k      ∂ₜs_k = −iΔ_k s_k + ḡψ      ∂ₜd_k = −iΔ_k d_k
//! ```
//!
//! With these choices the free field reaching the emitter is exactly
//! √(2ϱ₀δω)Σ d_k(t), and eliminating the s_k in the wide-band limit gives back
//! the amplitude equation of [`crate::dynamics`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{AmplitudeTrajectory, Method};
use crate::error::{Error, Result};
use crate::model::{PulseParams, SystemParams, TimeGrid};
use crate::pulse::{Envelope, PulseEnvelope};

/// RK4 substeps satisfy h ≤ STEP_FACTOR / max(W, Γ₀).
pub const STEP_FACTOR: f64 = 0.02;

/// Norm drift beyond which propagation is reported as failed.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Share of the photon spectrum a grid must capture to be free of warnings.
pub const MASS_THRESHOLD: f64 = 0.999;

/// A window must be this many times wider than max(Γ₀, Δ, |δ_L|).
pub const WINDOW_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGrid {
    pub center: f64,
    pub half_width: f64,
    pub n_modes: usize,
    pub spacing: f64,
    pub coupling: f64,
}

impl ModeGrid {
    pub fn new(system: &SystemParams, half_width: f64, n_modes: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Validation {
                field: "half_width",
                requirement: "positive",
            });
        }
        if n_modes < 3 {
            return Err(Error::Validation {
                field: "n_modes",
                requirement: "at least 3",
            });
        }
        let spacing = 2.0 * half_width / (n_modes - 1) as f64;
        Ok(Self {
            center: system.omega0(),
            half_width,
            n_modes,
            spacing,
            coupling: system.g() * (2.0 * system.rho0() * spacing).sqrt(),
        })
    }

    /// Grid of the given half width whose spacing is as close as possible
    /// to `spacing` (the mode count is odd so ω₀ is a mode).
    pub fn with_spacing(system: &SystemParams, half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Validation {
                field: "spacing",
                requirement: "positive",
            });
        }
        let half = (half_width / spacing).round().max(1.0) as usize;
        Self::new(system, half_width, 2 * half + 1)
    }

    /// Δ_k = ω_k − ω₀.
    pub fn detuning(&self, k: usize) -> f64 {
        -self.half_width + k as f64 * self.spacing
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.center + self.detuning(k)
    }

    /// Time after which the discrete comb rephases, 2π/δω.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing
    }

    /// Continuum decay rate implied by the comb, 2πḡ²/δω.
    pub fn golden_rule_rate(&self) -> f64 {
        2.0 * PI * self.coupling * self.coupling / self.spacing
    }

    pub fn max_step(&self, system: &SystemParams) -> f64 {
        STEP_FACTOR / self.half_width.max(system.gamma0())
    }

    /// Whether the window is wide enough for validity-tagged runs.
    pub fn covers(&self, system: &SystemParams, pulse: &PulseParams) -> bool {
        let scale = system.gamma0().max(pulse.delta()).max(pulse.delta_l().abs());
        self.half_width >= WINDOW_FACTOR * scale
    }
}

/// ψ, coupled-branch amplitudes s_k and dark-branch amplitudes d_k.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalState {
    pub psi: Complex64,
    pub coupled: Vec<Complex64>,
    pub dark: Vec<Complex64>,
}

impl GlobalState {
    /// ⟨ξ|ξ⟩ = |ψ|² + Σ|s_k|² + Σ|d_k|².
    pub fn norm(&self) -> f64 {
        let field: f64 = self.coupled.iter().chain(&self.dark).map(|a| a.norm_sqr()).sum();
        self.psi.norm_sqr() + field
    }

    /// Total photon weight per mode, |s_k|² + |d_k|².
    pub fn mode_weights(&self) -> Vec<f64> {
        self.coupled
            .iter()
            .zip(&self.dark)
            .map(|(s, d)| s.norm_sqr() + d.norm_sqr())
            .collect()
    }
}

/// Initial state together with how much of the spectrum the grid held.
#[derive(Debug, Clone)]
pub struct SinglePhoton {
    pub state: GlobalState,
    pub pulse: PulseParams,
    /// Σ_k |α̃(ω_k)|² δω / (2πϱ₀) before renormalization.
    pub captured_mass: f64,
}

impl SinglePhoton {
    pub fn mass_warning(&self) -> bool {
        self.captured_mass < MASS_THRESHOLD
    }
}

/// Samples the photon spectrum on the comb and renormalizes it to one
/// excitation, with ψ(0) = 0.
pub fn init_single_photon(modes: &ModeGrid, pulse: &PulseEnvelope) -> SinglePhoton {
    let rho0 = pulse.system().rho0();
    let weight = (modes.spacing / (2.0 * PI * rho0)).sqrt();
    let raw: Vec<Complex64> = (0..modes.n_modes)
        .map(|k| pulse.spectrum_at(modes.frequency(k)) * weight)
        .collect();
    let mass: f64 = raw.iter().map(|r| r.norm_sqr()).sum();
    let scale = if mass > 0.0 { (0.5 / mass).sqrt() } else { 0.0 };
    let branch: Vec<Complex64> = raw.iter().map(|r| r * scale).collect();
    SinglePhoton {
        state: GlobalState {
            psi: Complex64::new(0.0, 0.0),
            coupled: branch.clone(),
            dark: branch,
        },
        pulse: pulse.params(),
        captured_mass: mass,
    }
}

/// Sampled output of a propagation.
#[derive(Debug, Clone)]
pub struct OracleTrajectory {
    pub system: SystemParams,
    pub modes: ModeGrid,
    pub pulse: PulseParams,
    pub grid: TimeGrid,
    pub substeps: usize,
    pub psi: Vec<Complex64>,
    pub norm: Vec<f64>,
    /// Free field at the emitter, √(2ϱ₀δω)Σ d_k.
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    pub final_state: GlobalState,
    /// max_t |1 − ⟨ξ|ξ⟩|.
    pub max_drift: f64,
    /// Run ended before the comb recurrence time.
    pub recurrence_valid: bool,
    /// Window wide enough for the pulse and the emitter line.
    pub window_valid: bool,
    pub mass_warning: bool,
}

impl OracleTrajectory {
    /// Valid on all counts: no recurrence, wide window, spectrum captured.
    pub fn is_valid(&self) -> bool {
        self.recurrence_valid && self.window_valid && !self.mass_warning
    }

    /// Reinterprets the run as an amplitude trajectory so it can feed the
    /// thermodynamic functionals.
    pub fn to_amplitude_trajectory(&self) -> AmplitudeTrajectory {
        AmplitudeTrajectory {
            system: self.system,
            pulse: self.pulse,
            grid: self.grid,
            psi: self.psi.clone(),
            phi: self.phi.clone(),
            dphi: self.dphi.clone(),
            method: Method::Oracle,
        }
    }
}

/// Writes ∂ₜs into `ds` and returns ∂ₜψ.
fn derivative(detunings: &[f64], gbar: f64, psi: Complex64, s: &[Complex64], ds: &mut [Complex64]) -> Complex64 {
    let drive = gbar * psi;
    let mut sum = Complex64::new(0.0, 0.0);
    for ((d, &x), &w) in ds.iter_mut().zip(s).zip(detunings) {
        *d = Complex64::new(w * x.im, -w * x.re) + drive;
        sum += x;
    }
    -gbar * sum
}

/// RK4 propagation of `photon` over `grid`, recording ψ, the norm and the
/// incident field at every grid sample. Each grid interval is split into
/// enough substeps to respect the step bound of the comb.
pub fn propagate(
    photon: &SinglePhoton,
    modes: &ModeGrid,
    system: &SystemParams,
    grid: &TimeGrid,
) -> Result<OracleTrajectory> {
    let n_modes = modes.n_modes;
    if photon.state.coupled.len() != n_modes || photon.state.dark.len() != n_modes {
        return Err(Error::Domain(format!(
            "state has {} modes, grid has {n_modes}",
            photon.state.coupled.len()
        )));
    }
    let substeps = (grid.spacing() / modes.max_step(system)).ceil().max(1.0) as usize;
    let h = grid.spacing() / substeps as f64;
    let gbar = modes.coupling;
    let field_scale = (2.0 * system.rho0() * modes.spacing).sqrt();
    let detunings: Vec<f64> = (0..n_modes).map(|k| modes.detuning(k)).collect();
    let dark_step: Vec<Complex64> = detunings
        .iter()
        .map(|&w| Complex64::from_polar(1.0, -w * grid.spacing()))
        .collect();

    let mut psi = photon.state.psi;
    let mut s = photon.state.coupled.clone();
    let mut dark = photon.state.dark.clone();
    let mut tmp = vec![Complex64::new(0.0, 0.0); n_modes];
    let mut ds = vec![Complex64::new(0.0, 0.0); n_modes];
    let mut acc = vec![Complex64::new(0.0, 0.0); n_modes];

    let n = grid.len();
    let mut out_psi = Vec::with_capacity(n);
    let mut out_norm = Vec::with_capacity(n);
    let mut out_phi = Vec::with_capacity(n);
    let mut out_dphi = Vec::with_capacity(n);
    let mut max_drift = 0.0f64;
    for k in 0..n {
        let norm = psi.norm_sqr()
            + s.iter().map(|x| x.norm_sqr()).sum::<f64>()
            + dark.iter().map(|x| x.norm_sqr()).sum::<f64>();
        max_drift = max_drift.max((1.0 - norm).abs());
        if max_drift > DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift: max_drift,
                limit: DRIFT_LIMIT,
            });
        }
        let mut field = Complex64::new(0.0, 0.0);
        let mut dfield = Complex64::new(0.0, 0.0);
        for (d, &w) in dark.iter().zip(&detunings) {
            field += d;
            dfield += Complex64::new(w * d.im, -w * d.re);
        }
        out_psi.push(psi);
        out_norm.push(norm);
        out_phi.push(field * field_scale);
        out_dphi.push(dfield * field_scale);
        if k + 1 == n {
            break;
        }

        for _ in 0..substeps {
            let p1 = derivative(&detunings, gbar, psi, &s, &mut ds);
            for ((a, t), (&x, &d)) in acc.iter_mut().zip(tmp.iter_mut()).zip(s.iter().zip(&ds)) {
                *a = d;
                *t = x + 0.5 * h * d;
            }
            let p2 = derivative(&detunings, gbar, psi + 0.5 * h * p1, &tmp, &mut ds);
            for ((a, t), (&x, &d)) in acc.iter_mut().zip(tmp.iter_mut()).zip(s.iter().zip(&ds)) {
                *a += 2.0 * d;
                *t = x + 0.5 * h * d;
            }
            let p3 = derivative(&detunings, gbar, psi + 0.5 * h * p2, &tmp, &mut ds);
            for ((a, t), (&x, &d)) in acc.iter_mut().zip(tmp.iter_mut()).zip(s.iter().zip(&ds)) {
                *a += 2.0 * d;
                *t = x + h * d;
            }
            let p4 = derivative(&detunings, gbar, psi + h * p3, &tmp, &mut ds);
            for ((x, a), &d) in s.iter_mut().zip(&acc).zip(&ds) {
                *x += h / 6.0 * (a + d);
            }
            psi += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
        }
        for (d, &r) in dark.iter_mut().zip(&dark_step) {
            *d *= r;
        }
    }

    Ok(OracleTrajectory {
        system: *system,
        modes: *modes,
        pulse: photon.pulse,
        grid: *grid,
        substeps,
        psi: out_psi,
        norm: out_norm,
        phi: out_phi,
        dphi: out_dphi,
        final_state: GlobalState {
            psi,
            coupled: s,
            dark,
        },
        max_drift,
        recurrence_valid: grid.tf() < modes.recurrence_time(),
        window_valid: modes.covers(system, &photon.pulse),
        mass_warning: photon.mass_warning(),
    })
}

/// max_k ||ψ_oracle(t_k)| − |ψ_closed(t_k)||.
pub fn max_amplitude_error(oracle: &OracleTrajectory, exact: &AmplitudeTrajectory) -> f64 {
    oracle
        .psi
        .iter()
        .zip(&exact.psi)
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max)
}
