//! Baker-Davenport reduction in the Dujella-Pethő form.
//!
//! Given `|u tau - v + mu| < A B^-w` with `u <= M`, pick a convergent `p/q`
//! of `tau` with `q > 6M` and put `eps = ||mu q|| - M ||tau q||`. If
//! `eps > 0` there is no solution with `w >= log(A q / eps) / log B`.
//! Families of `mu` are handled in one pass per convergent: fractional
//! parts of the shared components are computed once and members are their
//! signed sums.

mod engine;
mod family;
mod linearize;

pub use engine::{
    bd_reduce, bd_reduce_family, GroupOutcome, ReductionConfig, ReductionOutcome, ReductionProblem,
};
pub use family::{Axis, MuFamily};
pub use linearize::{linearize_small_form, required_gap, required_gap_alpha, required_gap_pow2};

use thiserror::Error;

use crate::realnum::RealError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid reduction problem {label}: {what}")]
    InvalidProblem { label: String, what: String },
    #[error("{label}: no convergent among {tried} tried gives eps > 0 for {member}")]
    NoConvergent {
        label: String,
        member: String,
        tried: usize,
    },
    #[error("y = {y} exceeds 1/2; linearization needs a power-of-two gap of at least {gap}")]
    NotSmall { y: String, gap: u32 },
    #[error(transparent)]
    Real(#[from] RealError),
}

impl ReductionError {
    pub fn is_precision_cap(&self) -> bool {
        matches!(self, ReductionError::Real(e) if e.is_precision_cap())
    }
}
