//! Finite-past linear predictors of stationary processes.
//!
//! Predictor coefficients are computed two independent ways: from the MA and
//! AR expansions of the outer function through an explicit series of Hankel
//! kernel iterates ([`explicit`]), and from autocovariances through the
//! Durbin–Levinson recursion or the normal equations ([`levinson`]).
//! [`asymptotics`] compares both against long-memory limit laws.

pub mod asymptotics;
pub mod coeffs;
pub mod error;
pub mod explicit;
pub mod hankel;
pub mod levinson;
pub mod poly;
pub mod quad;
pub mod series;
pub mod special;

pub use error::{Error, Result};
