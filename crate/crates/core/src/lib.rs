//! Two-qubit measurement-semantics simulator.
//!
//! The crate models a pair of spin-1/2 particles (or photon qubits) and
//! computes joint measurement statistics under two semantics:
//!
//! * **nonlocal collapse**: measuring particle `a` conditions the state of
//!   particle `b` before `b` is measured;
//! * **local independent**: each particle changes state only at its own
//!   measurement, and the joint statistics come from the final projection of
//!   the composite state onto product eigenstates.
//!
//! Both semantics reproduce the singlet correlation `-cos α` and the
//! three-axis Bell violation of `√2`, which is what the crate demonstrates
//! analytically and by seeded Monte Carlo.
//!
//! Modules:
//! * [`spin`]: single-qubit states, Bloch axes, Pauli components, projections.
//! * [`pair`]: composite states, basis expansions, joint expectations,
//!   partial traces and the Bell quantity.
//! * [`measurement`]: seeded sampling, trial records, coincidence tables and
//!   the coincidence-rate estimators.
//! * [`photon`]: double-slit fringe visibility and circular-polarization
//!   angular-momentum predictions for entangled photon pairs.
//! * [`cli`]: the command-line front end used by the `bellsim` binary.

pub mod cli;
mod error;
pub mod measurement;
pub mod pair;
pub mod photon;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;

/// Tolerance for exact-algebra checks at dimension ≤ 4.
pub const EXACT_TOL: f64 = 1e-12;

/// Version string embedded in every emitted result.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
