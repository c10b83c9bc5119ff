//! Two-sided estimates of the Shannon entropy from known power sums of
//! probabilities, and their use in uncertainty and certainty relations for
//! measurements built from quantum designs.

pub mod bounds;
pub mod coefficients;
pub mod dd;
pub mod designs;
pub mod error;
pub mod estimators;
pub mod figures;
pub mod poly;
pub mod relations;
pub mod sampling;
pub mod suite;

pub use error::{Error, Result};
