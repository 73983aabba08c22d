//! Constants as printed in the published resolution of the equation.
//! They are acceptance gates and comparison targets only; nothing in the
//! pipeline is derived from them unless published constants are requested
//! explicitly.

use crate::linforms::{Case, GapVar, StepId};

/// Solutions `(n1, n2, a1, a2, a3)` of the three-power equation.
pub const SOLUTIONS_K3: [[u64; 5]; 10] = [
    [2, 0, 1, 1, 1],
    [2, 0, 2, 0, 0],
    [2, 1, 2, 1, 0],
    [2, 2, 2, 2, 2],
    [2, 2, 3, 1, 1],
    [3, 0, 5, 1, 0],
    [3, 1, 4, 4, 2],
    [3, 1, 5, 1, 1],
    [3, 2, 5, 3, 0],
    [3, 3, 6, 2, 1],
];

pub const SOLUTIONS_K2: [[u64; 4]; 4] = [[1, 1, 0, 0], [2, 0, 2, 1], [2, 2, 3, 2], [3, 1, 5, 2]];

pub const SOLUTIONS_K1: [[u64; 3]; 2] = [[1, 1, 0], [1, 1, 1]];

/// Published solutions for `k` powers as flat tuples.
pub fn solutions(k: usize) -> Vec<Vec<u64>> {
    match k {
        1 => SOLUTIONS_K1.iter().map(|s| s.to_vec()).collect(),
        2 => SOLUTIONS_K2.iter().map(|s| s.to_vec()).collect(),
        3 => SOLUTIONS_K3.iter().map(|s| s.to_vec()).collect(),
        _ => Vec::new(),
    }
}

/// Search range of the published proof.
pub const SEARCH_CUTOFF: usize = 100;
pub const A1_BOUND: u32 = 256;

/// Step bounds `c (1 + log n1)^k` as printed: `(step, c, k)`.
pub const STEP_BOUNDS: [(StepId, &str, u32); 7] = [
    (StepId::S1, "8.22e12", 1),
    (StepId::S2, "4e25", 2),
    (StepId::S3, "2e38", 3),
    (StepId::S4, "9.96e37", 3),
    (StepId::S5, "2e25", 2),
    (StepId::S6, "9.96e37", 3),
    (StepId::S7, "4.73e50", 4),
];

pub fn step_bound(step: StepId) -> (&'static str, u32) {
    let (_, c, k) = STEP_BOUNDS[usize::from(step.number() - 1)];
    (c, k)
}

/// Height bound used for the third multiplicand in step 7.
pub const STEP7_HEIGHT: &str = "9.97e37";

/// Absolute bound on `n1`.
pub const N1_UPPER: &str = "7.9e59";

/// Rows of both summary tables, in printed order.
pub const TABLE_ROWS: [GapVar; 3] = [GapVar::A1MinusA2, GapVar::A1MinusA3, GapVar::N1MinusN2];
pub const TABLE_COLUMNS: [Case; 3] = [Case::C1A, Case::C1B, Case::C2];

/// Which step bounds each `(row, column)` entry of the symbolic table.
pub fn bound_table_source(row: GapVar, column: Case) -> StepId {
    use Case::*;
    use GapVar::*;
    use StepId::*;
    match (row, column) {
        (A1MinusA2, C1A | C1B) => S1,
        (A1MinusA2, C2) => S5,
        (A1MinusA3, C1A) => S2,
        (A1MinusA3, C1B) => S4,
        (A1MinusA3, C2) => S6,
        (N1MinusN2, C1A) => S3,
        (N1MinusN2, C1B) => S2,
        (N1MinusN2, C2) => S1,
    }
}

/// Reduced gap bounds, indexed `[row][column]` as in [`TABLE_ROWS`] and
/// [`TABLE_COLUMNS`].
pub const REDUCTION_TABLE: [[i64; 3]; 3] = [[214, 214, 215], [218, 222, 222], [87, 86, 84]];

/// Final bound on `n1` after the last reduction.
pub const FINAL_N1_BOUND: i64 = 86;

/// One printed reduction step.
#[derive(Clone, Copy, Debug)]
pub struct PublishedReduction {
    pub step: StepId,
    /// Printed `A`.
    pub a: &'static str,
    /// Printed `eps` (a lower bound, or an equality for step 1).
    pub epsilon: Option<&'static str>,
    /// Printed index of the convergent used.
    pub convergent_index: Option<usize>,
    /// Printed constant `2c` after linearization.
    pub linearized: &'static str,
}

pub const REDUCTIONS: [PublishedReduction; 7] = [
    PublishedReduction {
        step: StepId::S1,
        a: "127",
        epsilon: Some("0.5"),
        convergent_index: Some(126),
        linearized: "87.44",
    },
    PublishedReduction {
        step: StepId::S2,
        a: "40",
        epsilon: Some("0.00179287"),
        convergent_index: Some(124),
        linearized: "27.52",
    },
    PublishedReduction {
        step: StepId::S3,
        a: "5",
        epsilon: Some("0.0000354843"),
        convergent_index: None,
        linearized: "3.4",
    },
    PublishedReduction {
        step: StepId::S4,
        a: "3.1",
        epsilon: Some("0.0000119685"),
        convergent_index: None,
        linearized: "2.2",
    },
    PublishedReduction {
        step: StepId::S5,
        a: "6.3",
        epsilon: Some("0.00225968"),
        convergent_index: None,
        linearized: "4.4",
    },
    PublishedReduction {
        step: StepId::S6,
        a: "3.1",
        epsilon: None,
        convergent_index: None,
        linearized: "2.2",
    },
    PublishedReduction {
        step: StepId::S7,
        a: "1.7",
        epsilon: Some("0.00001"),
        convergent_index: None,
        linearized: "1.2",
    },
];

pub fn reduction(step: StepId) -> &'static PublishedReduction {
    &REDUCTIONS[usize::from(step.number() - 1)]
}

/// Minimum gaps assumed when linearizing, as printed.
pub const SIDE_CONDITIONS: [(StepId, &str); 6] = [
    (StepId::S1, "min{a1-a2, n1-n2} >= 7"),
    (StepId::S2, "min{a1-a3, n1-n2} >= 5"),
    (StepId::S3, "n1-n2 >= 1"),
    (StepId::S4, "a1-a3 >= 2"),
    (StepId::S5, "a1-a2 >= 3"),
    (StepId::S6, "a1-a3 >= 2"),
];

/// The printed `M` as an exact integer: `7.9 * 10^59`.
pub fn m() -> num_bigint::BigInt {
    num_bigint::BigInt::from(79) * num_bigint::BigInt::from(10).pow(58)
}
