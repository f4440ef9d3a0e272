//! Bloch-picture laboratory for crystal electrons in a constant field.
//!
//! The Stark–Wannier Hamiltonian `-d²/dx² + V - x` with 2π-periodic `V` is
//! handled fiberwise: for each quasimomentum `k ∈ [0,1)` the state lives on
//! the lattice `ℓ²(ℤ)` and evolves under
//! `H(t)ψ(n) = (n+k+t)²ψ(n) + (2π)^{-1/2} Σ_m V̂(n-m)ψ(m)`.
//! The site index is the momentum window measured relative to the
//! field-driven drift, so window probabilities are read off directly.
//!
//! Modules:
//! - [`potential`]: Fourier coefficients, norms, the convolution operator.
//! - [`dynamics`]: free phases and the adaptive propagator.
//! - [`oracle`]: dense midpoint-exponential reference propagator.
//! - [`crossing`]: crossing schedule, two-level and stationary-phase
//!   amplitudes, reduced resolvent, integration-by-parts identity,
//!   backscattering sums.
//! - [`experiments`]: deviation scans, decay fits, persistence and
//!   bound-state probes.

pub mod banded;
pub mod crossing;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod integrator;
pub mod oracle;
pub mod phase;
pub mod potential;
pub mod state;

pub use dynamics::{propagate, propagator_row, time_reverse, PropagatorConfig, Scheme};
pub use error::{Error, Result};
pub use phase::{band_energy, free_phase};
pub use potential::FourierPotential;
pub use state::FiberState;
