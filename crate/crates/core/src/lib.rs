//! Learning bosonic states from phase-space measurements.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: incomplete gamma, Takagi factorization, Gaussian sampling, PSD checks.
//! * [`states`]: the peak-state family and its closed-form phase-space descriptors.
//! * [`fock_oracle`]: truncated Fock-basis matrices used to cross-check the closed forms.
//! * [`measurements`]: Bell and heterodyne outcome densities and exact samplers.
//! * [`estimators`]: characteristic-function estimators and sample-size planning.
//! * [`bounds`]: sample-complexity lower and upper bounds, thresholds, curve tables.
//! * [`game`]: the two-hypothesis discrimination game and total-variation tools.
//! * [`channel_bridge`]: random-displacement channel correspondence and its limits.
//! * [`cli`]: the command-line front end.

pub mod bounds;
pub mod channel_bridge;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod fock_oracle;
pub mod game;
pub mod measurements;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
pub use numerics::{Cn, SymmetricUnitary, TakagiFactor};
pub use states::PeakState;

/// Version tag for the numerical constants baked into planners and bound tables.
pub const CONSTANTS_VERSION: &str = "hoeffding-2b2-v1";
