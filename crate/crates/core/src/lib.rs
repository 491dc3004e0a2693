//! Quantum work and generalized quantum heat transferred by a single-photon
//! pulse to a two-level emitter, together with the coherent-pulse
//! (optical Bloch) counterparts.
//!
//! Natural units are used throughout: ħ = 1 and, by default, Γ₀ = 1. All
//! amplitudes are stored in the frame rotating at the emitter frequency ω₀,
//! so the only fast scale of the lab-frame problem never reaches an
//! integrator. Populations and amplitude ratios are frame invariant.
//!
//! Module map:
//!
//! - [`model`]: parameters, unit conventions, time grids.
//! - [`pulse`]: the exponential single-photon envelope and its spectrum.
//! - [`dynamics`]: excited-state amplitude, closed form and RK4.
//! - [`effective`]: Stark shift, decay rate and interaction energy.
//! - [`thermo`]: work, heat, their decompositions and identity residuals.
//! - [`semiclassical`]: optical Bloch equations and linear susceptibility.
//! - [`oracle`]: discretized-mode Schrödinger propagation.
//! - [`analysis`]: equivalence comparisons and parameter scans.
//! - [`config`], [`output`], [`run`]: the batch front end.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod model;
pub mod oracle;
pub mod output;
pub mod pulse;
pub mod quadrature;
pub mod run;
pub mod semiclassical;
pub mod thermo;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use model::{PulseParams, SystemParams, TimeGrid};
pub use num_complex::Complex64;
