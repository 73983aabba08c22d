use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::{published, PipelineError};
use crate::linforms::{
    guzman_oracle, BoundContext, Case, GapVar, PolyLogBound, StepDerivation, StepId,
};
use crate::realnum::{constants, parse_decimal, Interval, PrecisionPolicy, RealOracle};

/// Bits used for every enclosure reported by this module.
pub const REPORT_BITS: u32 = 128;

/// Comparison of one step coefficient with its printed value.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub step: StepId,
    pub computed: PolyLogBound,
    pub published: (&'static str, u32),
    /// `computed / published`, enclosed.
    pub ratio: Interval,
}

impl BoundCheck {
    /// Within `[0.9, 1.0]` of the printed value with the printed exponent.
    pub fn in_window(&self) -> bool {
        self.computed.exponent == self.published.1
            && self.ratio.lo_gt_ratio(&BigInt::from(9), &BigInt::from(10))
            && self.ratio.hi_le_ratio(&BigInt::one(), &BigInt::one())
    }
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub context: BoundContext,
    pub derivations: Vec<StepDerivation>,
    /// `table[row][column]` over gaps and cases.
    pub table: Vec<Vec<PolyLogBound>>,
    pub checks: Vec<BoundCheck>,
    /// Final inequality `n1 log alpha < c (1 + log n1)^4`.
    pub final_bound: PolyLogBound,
    pub n1_upper: Interval,
}

impl BoundReport {
    pub fn derivation(&self, step: StepId) -> &StepDerivation {
        &self.derivations[usize::from(step.number() - 1)]
    }

    pub fn entry(&self, row: GapVar, column: Case) -> &PolyLogBound {
        let r = published::TABLE_ROWS
            .iter()
            .position(|&g| g == row)
            .expect("row");
        let c = published::TABLE_COLUMNS
            .iter()
            .position(|&k| k == column)
            .expect("column");
        &self.table[r][c]
    }

    /// Smallest integer `M >= n1_upper`.
    pub fn m(&self) -> BigInt {
        self.n1_upper.ceil_hi()
    }
}

fn decimal(text: &str) -> RealOracle {
    RealOracle::decimal(text).expect("valid published constant")
}

/// Absolute bound on `n1` from `n1 log alpha < c (1 + log n1)^r`.
///
/// With `L = 3 n1` we have `log L > 1 + log n1`, hence
/// `L / (log L)^r < 3 c / log alpha = H'` and the unwrapping lemma gives
/// `n1 < 2^r H' (log H')^r / 3`.
pub fn absolute_n1_bound(bound: &PolyLogBound) -> Result<RealOracle, PipelineError> {
    let three = RealOracle::integer(3);
    let h = three.mul(&bound.coefficient.div(&constants::ln_alpha())?);
    let unwrapped = guzman_oracle(bound.exponent, &h)?;
    Ok(unwrapped.div(&three)?.with_label("n1 upper bound"))
}

/// Runs the seven bounding steps, assembles the summary table and unwraps
/// the final inequality. Fails if any coefficient exceeds its printed value.
pub fn derive_upper_bound(context: &BoundContext) -> Result<BoundReport, PipelineError> {
    let policy = PrecisionPolicy::default();
    let derivations = context.derive_all()?;
    let mut checks = Vec::new();
    for d in &derivations {
        let published = published::step_bound(d.step);
        let computed = d.bound.coefficient_enclosure()?;
        let ratio = d
            .bound
            .coefficient
            .div(&decimal(published.0))?
            .eval(REPORT_BITS, &policy)?;
        let (num, den) = parse_decimal(published.0).expect("valid published constant");
        if d.bound.exponent != published.1 || !computed.hi_le_ratio(&num, &den) {
            return Err(PipelineError::BoundExceedsPublished {
                step: d.step,
                computed: format!("{}", d.bound),
                published: format!("{}(1+log n1)^{}", published.0, published.1),
            });
        }
        checks.push(BoundCheck {
            step: d.step,
            computed: d.bound.clone(),
            published,
            ratio,
        });
    }
    let by_step: BTreeMap<StepId, &StepDerivation> =
        derivations.iter().map(|d| (d.step, d)).collect();
    let table = published::TABLE_ROWS
        .iter()
        .map(|&row| {
            published::TABLE_COLUMNS
                .iter()
                .map(|&col| {
                    by_step[&published::bound_table_source(row, col)]
                        .bound
                        .clone()
                })
                .collect()
        })
        .collect();
    let final_bound = by_step[&StepId::S7].bound.clone();
    let n1_upper = absolute_n1_bound(&final_bound)?.eval(REPORT_BITS, &policy)?;
    Ok(BoundReport {
        context: *context,
        derivations,
        table,
        checks,
        final_bound,
        n1_upper,
    })
}
