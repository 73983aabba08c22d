//! Certified real arithmetic: outward-rounded intervals, constant oracles,
//! continued fractions and nearest-integer distances.
//!
//! Every comparison made through this module either returns a certified
//! answer or reports that it could not decide; nothing is guessed from a
//! floating-point approximation.

pub mod contfrac;
pub mod decimal;
pub mod interval;
pub mod oracle;

pub use contfrac::{
    certify_approximation, cf_expand, convergents, expand_interval, first_convergent_q_exceeding,
    nearest_int_distance, Convergent, ConvergentStream,
};
pub use decimal::{format_dyadic, format_ratio, parse_decimal, Rounding};
pub use interval::{DomainFault, Interval};
pub use oracle::{constants, RealOracle};

use thiserror::Error;

/// Working-precision escalation policy: start at `initial` bits and double
/// until a result is certified, never exceeding `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub initial: u32,
    pub cap: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial: 256,
            cap: 1 << 16,
        }
    }
}

impl PrecisionPolicy {
    /// Successive precisions `initial, 2*initial, ...` up to and including `cap`.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap;
        std::iter::successors(Some(self.initial.max(16).min(cap)), move |&b| {
            (b < cap).then(|| (b.saturating_mul(2)).min(cap))
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealError {
    #[error("constant {label} is undefined")]
    Undefined { label: String },
    #[error("precision cap of {bits} bits reached while certifying {label}")]
    PrecisionCap { label: String, bits: u32 },
    #[error("requested precision {requested} is below the minimum of {minimum} bits")]
    PrecisionTooSmall { requested: u32, minimum: u32 },
    #[error("cannot parse decimal constant {text:?}")]
    Parse { text: String },
    #[error("undecided: {what}")]
    Undecided { what: String },
}

impl RealError {
    pub fn is_precision_cap(&self) -> bool {
        matches!(
            self,
            RealError::PrecisionCap { .. } | RealError::Undecided { .. }
        )
    }
}
