//! Steady states of the dissipative, strongly driven Fano model.
//!
//! A ground state `|g⟩` is driven both to a discrete excited state `|e⟩` and to
//! a flat continuum `|k⟩`, with `|e⟩` coupled to the continuum and all excited
//! populations relaxing back to `|g⟩`. This crate computes the stationary
//! continuum population (and the photocurrent) three independent ways:
//!
//! * [`profiles`]: closed-form effective Fano parameters,
//! * [`effective`]: the kernel of the 4×4 effective Liouvillian on the
//!   discrete block plus a linear continuum readout,
//! * [`oracle`]: a brute-force discretized-continuum Lindblad steady state,
//!
//! and [`fit`] extracts effective Fano parameters from sampled lineshapes so
//! that the three routes can be compared. [`validation`] bundles the
//! cross-checks into a pass/fail report.
//!
//! Energies and rates are dimensionless, in units of the radiative width
//! `γ = nπV²/ħ` of the discrete state.

pub mod effective;
pub mod error;
pub mod exec;
pub mod fit;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod profiles;
pub mod validation;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Detuning, ModelParams, PhysicalParams};
pub use profiles::EffectiveFano;
