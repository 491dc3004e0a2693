//! Excited-state amplitude of the emitter.
//!
//! In the frame rotating at ω₀ the amplitude obeys
//! ∂ₜψ̃ = −(Γ₀/2)ψ̃ − g φ̃(0,t), ψ̃(0) = 0. For the exponential pulse this has
//! the closed form ψ̃ = gN (e^{−at} − e^{−bt}) / (a − b) with a = Γ₀/2 and
//! b = Δ/2 + iδ_L. Both the closed form and a fixed-step RK4 solution are
//! provided; each serves as the other's check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{PulseParams, SystemParams, TimeGrid};
use crate::pulse::{Envelope, PulseEnvelope};

/// Below this |a − b| (in units of Γ₀) the closed form switches to the
/// confluent limit −gN t e^{−bt}.
pub const CONFLUENT_THRESHOLD: f64 = 1e-8;

/// RK4 steps must satisfy h ≤ STEP_GUARD / max(Γ₀, Δ, |δ_L|).
pub const STEP_GUARD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Ode,
    /// Discretized-mode propagation (see [`crate::oracle`]).
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Ode => "ode",
            Method::Oracle => "oracle",
        }
    }
}

/// Sampled rotating-frame amplitudes ψ̃(t_k) together with the drive
/// φ̃(0,t_k) and its time derivative.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    pub system: SystemParams,
    pub pulse: PulseParams,
    pub grid: TimeGrid,
    pub psi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    pub method: Method,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn population(&self, k: usize) -> f64 {
        self.psi[k].norm_sqr()
    }

    pub fn final_population(&self) -> f64 {
        self.psi.last().map_or(0.0, |p| p.norm_sqr())
    }

    /// Largest |ψ̃|² on the grid and the time where it occurs.
    pub fn peak_population(&self) -> (f64, f64) {
        self.psi
            .iter()
            .enumerate()
            .map(|(k, p)| (p.norm_sqr(), self.grid.time(k)))
            .fold((0.0, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best })
    }

    /// Lab-frame amplitude ψ(t_k) = ψ̃(t_k) e^{−iω₀t_k}.
    pub fn lab_psi(&self, k: usize) -> Complex64 {
        self.psi[k] * Complex64::from_polar(1.0, -self.system.omega0() * self.grid.time(k))
    }

    /// Derivative ∂ₜψ̃ at sample k from the equation of motion.
    pub fn dpsi(&self, k: usize) -> Complex64 {
        -0.5 * self.system.gamma0() * self.psi[k] - self.system.g() * self.phi[k]
    }
}

/// (e^z − 1)/z, accurate near z = 0.
fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        // Taylor series; |z| < 1e-3 makes the z⁵ remainder < 1e-17.
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..=6 {
            term = term * z / n as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Closed-form rotating-frame amplitude ψ̃(t).
pub fn closed_form_psi(pulse: &PulseEnvelope, t: f64) -> Result<Complex64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("closed_form_psi needs t >= 0, got {t}")));
    }
    let system = pulse.system();
    let gn = system.g() * pulse.normalization();
    let a = Complex64::new(0.5 * system.gamma0(), 0.0);
    let b = pulse.rate();
    let diff = a - b;
    if diff.norm() < CONFLUENT_THRESHOLD * system.gamma0() {
        return Ok(-gn * t * (-b * t).exp());
    }
    let z = -diff * t;
    if z.norm() < 0.1 {
        Ok(-gn * t * (-b * t).exp() * exprel(z))
    } else {
        Ok(gn * ((-a * t).exp() - (-b * t).exp()) / diff)
    }
}

/// Samples the closed form on `grid`.
pub fn closed_form_trajectory(pulse: &PulseEnvelope, grid: &TimeGrid) -> AmplitudeTrajectory {
    let n = grid.len();
    let mut psi = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    for t in grid.times() {
        psi.push(closed_form_psi(pulse, t).expect("grid times are nonnegative"));
        phi.push(pulse.amplitude(t));
        dphi.push(pulse.derivative(t));
    }
    AmplitudeTrajectory {
        system: *pulse.system(),
        pulse: pulse.params(),
        grid: *grid,
        psi,
        phi,
        dphi,
        method: Method::ClosedForm,
    }
}

/// Largest RK4 step accepted for this emitter and pulse.
pub fn max_step(system: &SystemParams, pulse: &PulseParams) -> f64 {
    STEP_GUARD
        / system
            .gamma0()
            .max(pulse.delta())
            .max(pulse.delta_l().abs())
}

pub(crate) fn check_step(system: &SystemParams, pulse: &PulseParams, grid: &TimeGrid) -> Result<()> {
    let limit = max_step(system, pulse);
    if grid.spacing() > limit {
        return Err(Error::StepTooLarge {
            step: grid.spacing(),
            limit,
        });
    }
    Ok(())
}

/// Fixed-step RK4 integration of the amplitude equation from ψ̃(0) = 0.
pub fn integrate_psi<E: Envelope>(
    system: &SystemParams,
    pulse: &E,
    grid: &TimeGrid,
) -> Result<AmplitudeTrajectory> {
    let params = pulse.params();
    check_step(system, &params, grid)?;
    let half_gamma = 0.5 * system.gamma0();
    let g = system.g();
    let rhs = |t: f64, psi: Complex64| -half_gamma * psi - g * pulse.amplitude(t);

    let n = grid.len();
    let h = grid.spacing();
    let mut psi = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    let mut y = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let t = grid.time(k);
        psi.push(y);
        phi.push(pulse.amplitude(t));
        dphi.push(pulse.derivative(t));
        if k + 1 < n {
            let k1 = rhs(t, y);
            let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
            let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
            let k4 = rhs(t + h, y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    Ok(AmplitudeTrajectory {
        system: *system,
        pulse: params,
        grid: *grid,
        psi,
        phi,
        dphi,
        method: Method::Ode,
    })
}

/// Upper envelope of |ψ̃(t)|: gN ∫₀ᵗ e^{−a(t−s)} e^{−βs} ds with β = Δ/2.
///
/// Holds for any detuning since |e^{−bs}| = e^{−βs}; the same bound caps
/// |ρ_eg| of the nonlinear Bloch equations because |1 − 2ρ_ee| ≤ 1.
fn amplitude_bound(gn: f64, a: f64, beta: f64, t: f64) -> f64 {
    let slow = a.min(beta);
    let gap = (a - beta).abs();
    let x = gap * t;
    let shape = if x < 1e-8 { 1.0 } else { -(-x).exp_m1() / x };
    gn * t * (-slow * t).exp() * shape
}

/// Bound on ∫_{t}^{∞} |ψ̃|² ds, from B ≤ gN t e^{−r t} and B ≤ gN e^{−r t}/d
/// with r the slower rate and d the rate gap.
fn tail_bound(gn: f64, a: f64, beta: f64, t: f64) -> f64 {
    let r = a.min(beta);
    let d = (a - beta).abs();
    let decay = (-2.0 * r * t).exp();
    let linear = decay * (t * t / (2.0 * r) + t / (2.0 * r * r) + 1.0 / (4.0 * r * r * r));
    let flat = if d > 0.0 {
        decay / (2.0 * r * d * d)
    } else {
        f64::INFINITY
    };
    gn * gn * linear.min(flat)
}

/// Horizon t_f of a full cycle.
///
/// Past t_f the amplitude bound gives |ψ̃|² < `cycle_tol` and
/// Γ₀∫_{t_f}^∞|ψ̃|² < `cycle_tol`. Every full-cycle integrand is bounded by
/// ω₀Γ₀|ψ̃|² plus terms of order g|φ̃||ψ̃|, so the neglected tails are below
/// cycle_tol·(ω₀/Γ₀) in units of ħΓ₀.
pub fn full_cycle_horizon(pulse: &PulseEnvelope, cycle_tol: f64) -> Result<f64> {
    if !(cycle_tol > 0.0 && cycle_tol < 1.0) {
        return Err(Error::Validation {
            field: "cycle_tol",
            requirement: "in (0, 1)",
        });
    }
    let system = pulse.system();
    let gamma0 = system.gamma0();
    let gn = system.g() * pulse.normalization();
    let a = 0.5 * gamma0;
    let beta = 0.5 * pulse.params().delta();
    if gn == 0.0 {
        return Ok(1.0 / a.min(beta));
    }
    let done = |t: f64| {
        amplitude_bound(gn, a, beta, t).powi(2) < cycle_tol
            && gamma0 * tail_bound(gn, a, beta, t) < cycle_tol
    };
    // The bound rises then decays; start the search past its maximum.
    let peak = if (a - beta).abs() < 1e-12 * a {
        1.0 / a
    } else {
        (a / beta).ln() / (a - beta)
    };
    let mut lo = peak;
    let mut hi = peak.max(1.0 / a.min(beta));
    while !done(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if done(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Uniform grid covering a full cycle with spacing at most `step`.
pub fn full_cycle_grid(pulse: &PulseEnvelope, cycle_tol: f64, step: f64) -> Result<TimeGrid> {
    TimeGrid::with_max_step(full_cycle_horizon(pulse, cycle_tol)?, step)
}
