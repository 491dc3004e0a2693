//! Shared parameter types and the time grid.
//!
//! Frequencies and rates are in units of the spontaneous emission rate Γ₀,
//! energies in ħΓ₀. The transition frequency ω₀ stays an explicit finite
//! parameter so that the ω₀-proportional heat terms keep their true scale.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default flat spectral density; makes the pulse normalization N = √Δ.
pub const DEFAULT_RHO0: f64 = 1.0 / (2.0 * PI);
pub const DEFAULT_GAMMA0: f64 = 1.0;
pub const DEFAULT_OMEGA0: f64 = 100.0;

/// Emitter and bath constants.
///
/// The vacuum Rabi frequency `g` is always derived from Γ₀ = 4πg²ϱ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    gamma0: f64,
    omega0: f64,
    rho0: f64,
    g: f64,
}

impl SystemParams {
    pub fn new(gamma0: f64, omega0: f64, rho0: f64) -> Result<Self> {
        positive("gamma0", gamma0)?;
        positive("omega0", omega0)?;
        positive("rho0", rho0)?;
        let g = (gamma0 / (4.0 * PI * rho0)).sqrt();
        Ok(Self {
            gamma0,
            omega0,
            rho0,
            g,
        })
    }

    /// Γ₀ = 1, ϱ₀ = 1/(2π), with the given transition frequency.
    pub fn natural(omega0: f64) -> Result<Self> {
        Self::new(DEFAULT_GAMMA0, omega0, DEFAULT_RHO0)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    /// Vacuum Rabi frequency g.
    pub fn g(&self) -> f64 {
        self.g
    }

    /// Test hook: the same emitter with the field coupling switched off.
    ///
    /// Breaks Γ₀ = 4πg²ϱ₀ on purpose; Γ₀ keeps acting as a bare decay rate.
    #[doc(hidden)]
    pub fn decoupled(mut self) -> Self {
        self.g = 0.0;
        self
    }
}

/// Exponential wavepacket constants: bandwidth Δ, carrier ω_L and the
/// derived detuning δ_L = ω_L − ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    delta: f64,
    omega_l: f64,
    delta_l: f64,
}

impl PulseParams {
    pub fn new(delta: f64, omega_l: f64, system: &SystemParams) -> Result<Self> {
        positive("delta", delta)?;
        finite("omegaL", omega_l)?;
        Ok(Self {
            delta,
            omega_l,
            delta_l: omega_l - system.omega0(),
        })
    }

    /// Builds a pulse from its detuning rather than its carrier.
    pub fn detuned(delta: f64, delta_l: f64, system: &SystemParams) -> Result<Self> {
        finite("deltaL", delta_l)?;
        Self::new(delta, system.omega0() + delta_l, system)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }

    pub fn delta_l(&self) -> f64 {
        self.delta_l
    }
}

/// Uniform grid on [0, tf].
///
/// The number of intervals is always even so composite Simpson applies
/// without an end correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    tf: f64,
    intervals: usize,
}

impl TimeGrid {
    /// Grid on [0, tf] whose spacing does not exceed `max_step`.
    pub fn with_max_step(tf: f64, max_step: f64) -> Result<Self> {
        positive("tf", tf)?;
        positive("step", max_step)?;
        let raw = (tf / max_step).ceil();
        if raw > 5.0e8 {
            return Err(Error::Domain(format!(
                "grid of {raw:e} intervals is too large (tf = {tf}, step = {max_step})"
            )));
        }
        Self::with_intervals(tf, raw as usize)
    }

    /// Grid with (at least) the given number of intervals, rounded up to even.
    pub fn with_intervals(tf: f64, intervals: usize) -> Result<Self> {
        positive("tf", tf)?;
        if intervals == 0 {
            return Err(Error::Validation {
                field: "intervals",
                requirement: "positive",
            });
        }
        let intervals = intervals + intervals % 2;
        Ok(Self { tf, intervals })
    }

    pub fn t0(&self) -> f64 {
        0.0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    /// Number of samples (intervals + 1).
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn spacing(&self) -> f64 {
        self.tf / self.intervals as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.intervals {
            self.tf
        } else {
            k as f64 * self.spacing()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time(k))
    }

    /// Same horizon, half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            tf: self.tf,
            intervals: 2 * self.intervals,
        }
    }

    /// Same spacing, truncated to the samples with t ≤ t_end.
    pub fn truncated(&self, t_end: f64) -> Result<Self> {
        let k = (t_end / self.spacing()).floor() as usize;
        let k = k.min(self.intervals);
        let k = k - k % 2;
        if k == 0 {
            return Err(Error::Domain(format!("cannot truncate grid at t = {t_end}")));
        }
        Ok(Self {
            tf: self.time(k),
            intervals: k,
        })
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation {
            field,
            requirement: "positive",
        })
    }
}

fn finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation {
            field,
            requirement: "finite",
        })
    }
}
