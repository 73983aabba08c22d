//! Linear forms in logarithms: logarithmic heights, Matveev's lower bound,
//! bounds symbolic in `n1`, the seven bounding steps and the final
//! unwrapping of `n1 / (log n1)^r < H`.

pub mod height;
pub mod matveev;
pub mod nonvanishing;
pub mod polylog;
pub mod steps;
pub mod unwrap;

pub use height::{height_upper_bound, Atom, Exponent, GapVar, HeightExpr, LinearHeight};
pub use matveev::{matveev_coefficient, matveev_constant, MatveevInput};
pub use nonvanishing::{form_oracle, nonvanishing_check, FormId, Witness};
pub use polylog::PolyLogBound;
pub use steps::{step_bound, step_inputs, BoundContext, Case, StepDerivation, StepId, StepInputs};
pub use unwrap::{guzman_oracle, guzman_unwrap};

use thiserror::Error;

use crate::realnum::RealError;

/// Precision at which bound coefficients are evaluated.
pub(crate) const BOUND_BITS: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinformsError {
    #[error("{step} needs the bound from {needs}")]
    MissingPrior { step: StepId, needs: StepId },
    #[error("H = {h} does not exceed (4r^2)^r = {threshold} for r = {r}")]
    GuzmanPrecondition {
        r: u32,
        h: String,
        threshold: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("undecided: {what}")]
    Undecided { what: String },
    #[error(transparent)]
    Real(#[from] RealError),
}
