//! Effective time-dependent emitter parameters.
//!
//! With X = φ̃(0,t) ψ̃*(t) the ratio quantities are
//!
//! ```text
//! δ_eff = g Im X / |ψ|²          (Stark shift, ω_s = ω₀ + δ_eff)
//! Γ(t)  = Γ₀ + 2g Re X / |ψ|²    (may go negative)
//! ⟨H_int⟩ = 2g Im X              (regular everywhere)
//! ```
//!
//! Ratios are only reported where |ψ|² ≥ η·max|ψ|². Thermodynamic
//! integrands never divide by |ψ|² except through [`Sample::cross_ratio`],
//! which is bounded by |φ̃|².

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::AmplitudeTrajectory;
use crate::model::TimeGrid;

/// Relative population threshold below which ratio quantities are masked.
pub const MASK_ETA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("amplitude below threshold at sample {0}")]
pub struct BelowThreshold(pub usize);

/// Products of the amplitudes at one sample.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub pop: f64,
    /// X = φ̃ ψ̃*.
    pub cross: Complex64,
}

impl Sample {
    pub fn new(psi: Complex64, phi: Complex64) -> Self {
        Self {
            pop: psi.norm_sqr(),
            cross: phi * psi.conj(),
        }
    }

    /// Re X · Im X / |ψ|², bounded by |φ̃|²/2 and zero at ψ = 0.
    pub fn cross_ratio(&self) -> f64 {
        if self.pop > 0.0 {
            self.cross.re * self.cross.im / self.pop
        } else {
            0.0
        }
    }
}

/// ⟨H_int⟩ at sample k: −iħgφψ* + c.c. = 2ħg Im[φ̃ψ̃*].
pub fn interaction_energy(traj: &AmplitudeTrajectory, k: usize) -> f64 {
    2.0 * traj.system.g() * Sample::new(traj.psi[k], traj.phi[k]).cross.im
}

/// ∂ₜ|ψ|² from the amplitude equation: −Γ₀|ψ|² − 2g Re[φ̃ψ̃*].
pub fn population_rate(traj: &AmplitudeTrajectory, k: usize) -> f64 {
    let s = Sample::new(traj.psi[k], traj.phi[k]);
    -traj.system.gamma0() * s.pop - 2.0 * traj.system.g() * s.cross.re
}

/// Derived parameters sampled on the trajectory grid.
///
/// `delta_eff` and `gamma_t` hold NaN where `valid_mask` is false.
#[derive(Debug, Clone)]
pub struct EffectiveTrajectory {
    pub grid: TimeGrid,
    pub gamma0: f64,
    pub omega0: f64,
    pub delta_eff: Vec<f64>,
    pub gamma_t: Vec<f64>,
    pub h_int: Vec<f64>,
    pub pop: Vec<f64>,
    pub valid_mask: Vec<bool>,
}

impl EffectiveTrajectory {
    pub fn from_amplitudes(traj: &AmplitudeTrajectory) -> Self {
        let g = traj.system.g();
        let gamma0 = traj.system.gamma0();
        let samples: Vec<Sample> = traj
            .psi
            .iter()
            .zip(&traj.phi)
            .map(|(&psi, &phi)| Sample::new(psi, phi))
            .collect();
        let max_pop = samples.iter().map(|s| s.pop).fold(0.0, f64::max);
        let floor = MASK_ETA * max_pop;
        let n = samples.len();
        let mut out = Self {
            grid: traj.grid,
            gamma0,
            omega0: traj.system.omega0(),
            delta_eff: Vec::with_capacity(n),
            gamma_t: Vec::with_capacity(n),
            h_int: Vec::with_capacity(n),
            pop: Vec::with_capacity(n),
            valid_mask: Vec::with_capacity(n),
        };
        for s in samples {
            let valid = max_pop > 0.0 && s.pop >= floor;
            out.pop.push(s.pop);
            out.h_int.push(2.0 * g * s.cross.im);
            out.valid_mask.push(valid);
            if valid {
                out.delta_eff.push(g * s.cross.im / s.pop);
                out.gamma_t.push(gamma0 + 2.0 * g * s.cross.re / s.pop);
            } else {
                out.delta_eff.push(f64::NAN);
                out.gamma_t.push(f64::NAN);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.pop.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pop.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid_mask.iter().filter(|&&v| v).count()
    }

    /// Stark shift δ_eff(t_k).
    pub fn stark_shift(&self, k: usize) -> Result<f64, BelowThreshold> {
        self.masked(k, &self.delta_eff)
    }

    /// Effective transition frequency ω_s(t_k) = ω₀ + δ_eff(t_k).
    pub fn frequency(&self, k: usize) -> Result<f64, BelowThreshold> {
        Ok(self.omega0 + self.stark_shift(k)?)
    }

    /// Effective decay rate Γ(t_k); negative values flag non-Markovian
    /// backflow from the pulse.
    pub fn decay_rate(&self, k: usize) -> Result<f64, BelowThreshold> {
        self.masked(k, &self.gamma_t)
    }

    pub fn interaction_energy(&self, k: usize) -> f64 {
        self.h_int[k]
    }

    fn masked(&self, k: usize, values: &[f64]) -> Result<f64, BelowThreshold> {
        if self.valid_mask[k] {
            Ok(values[k])
        } else {
            Err(BelowThreshold(k))
        }
    }
}
