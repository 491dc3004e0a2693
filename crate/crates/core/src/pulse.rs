//! The single-photon envelope at the emitter and its spectrum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::model::{PulseParams, SystemParams};
use crate::quadrature::adaptive_simpson;

/// A drive amplitude at the emitter, in the frame rotating at ω₀.
///
/// Amplitudes are causal: zero for t < 0, with the t → 0⁺ limit at t = 0.
pub trait Envelope: Send + Sync {
    fn amplitude(&self, t: f64) -> Complex64;

    /// d/dt of [`Envelope::amplitude`] for t ≥ 0 (one-sided at t = 0).
    fn derivative(&self, t: f64) -> Complex64;

    /// Bandwidth and carrier of the packet.
    fn params(&self) -> PulseParams;
}

/// Truncated exponential wavepacket, φ̃(0,t) = N e^{−(Δ/2 + iδ_L)t} Θ(t)
/// with N = √(2πϱ₀Δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnvelope {
    params: PulseParams,
    system: SystemParams,
    scale: f64,
}

impl PulseEnvelope {
    pub fn new(system: SystemParams, params: PulseParams) -> Self {
        Self {
            params,
            system,
            scale: 1.0,
        }
    }

    /// Test hook: multiply the amplitude by `factor`, breaking the
    /// single-excitation normalization on purpose.
    #[doc(hidden)]
    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    pub fn system(&self) -> &SystemParams {
        &self.system
    }

    /// Normalization N = √(2πϱ₀Δ) (times the test scale, if any).
    pub fn normalization(&self) -> f64 {
        self.scale * (2.0 * PI * self.system.rho0() * self.params.delta()).sqrt()
    }

    /// Complex rate b = Δ/2 + iδ_L of the rotating-frame envelope.
    pub fn rate(&self) -> Complex64 {
        Complex64::new(0.5 * self.params.delta(), self.params.delta_l())
    }

    /// Lab-frame amplitude φ(0,t) = φ̃(0,t) e^{−iω₀t}.
    pub fn lab_amplitude(&self, t: f64) -> Complex64 {
        self.amplitude(t) * Complex64::from_polar(1.0, -self.system.omega0() * t)
    }

    /// α̃(ω) = √(ϱ₀Δ) / (Δ/2 + i(ω_L − ω)), scaled like the envelope.
    pub fn spectrum_at(&self, omega: f64) -> Complex64 {
        let num = self.scale * (self.system.rho0() * self.params.delta()).sqrt();
        Complex64::new(num, 0.0)
            / Complex64::new(0.5 * self.params.delta(), self.params.omega_l() - omega)
    }

    /// |α̃(ω)|².
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.spectrum_at(omega).norm_sqr()
    }

    /// ∫ f(ω) |α̃(ω)|² dω over the whole real line.
    ///
    /// Uses ω = ω_L + (Δ/2) tan θ, under which |α̃|² dω = 2ϱ₀ s² dθ with s the
    /// test scale, so only `f` has to be resolved.
    pub fn spectral_average<F: Fn(f64) -> f64>(&self, f: F, tol: f64) -> f64 {
        let half = 0.5 * self.params.delta();
        let omega_l = self.params.omega_l();
        let weight = 2.0 * self.system.rho0() * self.scale * self.scale;
        let edge = 0.5 * PI;
        weight * adaptive_simpson(|theta| f(omega_l + half * theta.tan()), -edge, edge, tol, 256)
    }
}

impl Envelope for PulseEnvelope {
    fn amplitude(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        (-self.rate() * t).exp() * self.normalization()
    }

    fn derivative(&self, t: f64) -> Complex64 {
        -self.rate() * self.amplitude(t)
    }

    fn params(&self) -> PulseParams {
        self.params
    }
}

/// Free-function form of [`Envelope::amplitude`].
pub fn envelope_at<E: Envelope + ?Sized>(pulse: &E, t: f64) -> Complex64 {
    pulse.amplitude(t)
}
