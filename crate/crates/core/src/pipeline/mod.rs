//! End-to-end orchestration: exhaustive search below the cutoff, the seven
//! symbolic bound steps, the seven reductions and the final certificate.

pub mod bounds;
pub mod certificate;
pub mod published;
pub mod reduce;

pub use bounds::{absolute_n1_bound, derive_upper_bound, BoundCheck, BoundReport};
pub use certificate::{
    build_certificate, full_certificate, Certificate, Discrepancy, RealValue, SolutionReport,
};
pub use reduce::{run_reduction, GridRange, ReductionReport, SideCondition, StepReduction, Target};

use num_bigint::BigInt;
use thiserror::Error;

use crate::linforms::{BoundContext, LinformsError, StepId};
use crate::realnum::{PrecisionPolicy, RealError};
use crate::reduction::ReductionError;
use crate::search::SearchError;

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    /// Exhaustive search covers `n1 <= search_cutoff`.
    pub search_cutoff: usize,
    /// Standing assumptions of the bound derivation.
    pub bounds: BoundContext,
    pub policy: PrecisionPolicy,
    /// Use the printed `M`, `A` values and side-condition grid minima.
    pub paper_constants: bool,
    /// Forces `M` instead of the computed absolute bound.
    pub m_override: Option<BigInt>,
    pub max_convergents: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            search_cutoff: published::SEARCH_CUTOFF,
            bounds: BoundContext::default(),
            policy: PrecisionPolicy::default(),
            paper_constants: false,
            m_override: None,
            max_convergents: 20,
        }
    }
}

impl PipelineConfig {
    /// `M` for the reductions given the derived absolute bound.
    pub fn reduction_m(&self, bounds: &BoundReport) -> BigInt {
        match (&self.m_override, self.paper_constants) {
            (Some(m), _) => m.clone(),
            (None, true) => published::m(),
            (None, false) => bounds.m(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("{step}: computed bound {computed} exceeds the printed {published}")]
    BoundExceedsPublished {
        step: StepId,
        computed: String,
        published: String,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Linforms(#[from] LinformsError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Real(#[from] RealError),
}

impl PipelineError {
    /// Whether the failure is precision exhaustion rather than a wrong claim.
    pub fn is_precision_cap(&self) -> bool {
        match self {
            PipelineError::Real(e) => e.is_precision_cap(),
            PipelineError::Reduction(e) => e.is_precision_cap(),
            PipelineError::Linforms(LinformsError::Real(e)) => e.is_precision_cap(),
            PipelineError::Linforms(LinformsError::Undecided { .. }) => true,
            _ => false,
        }
    }
}
