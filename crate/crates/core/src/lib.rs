//! Certified resolution of `B(n1) + B(n2) = 2^a1 + 2^a2 + 2^a3` over the
//! balancing numbers.
//!
//! The crate combines an exact exhaustive search for small indices with a
//! linear-forms-in-logarithms upper bound and a Baker-Davenport style
//! reduction, and packages the whole argument as a machine-checkable
//! certificate.

pub mod linforms;
pub mod pipeline;
pub mod realnum;
pub mod reduction;
pub mod search;
pub mod sequence;
