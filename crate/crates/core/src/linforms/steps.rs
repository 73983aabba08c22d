//! The seven bounding steps. Each step rewrites the equation as a small
//! linear form `Gamma`, bounds the height of its third multiplicand from the
//! prior steps, applies Matveev's theorem and compares with the elementary
//! upper bound `|Gamma| < c * max{...}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::height::{height_upper_bound, Exponent, GapVar, HeightExpr};
use super::matveev::{matveev_coefficient, MatveevInput, A_FLOOR};
use super::nonvanishing::FormId;
use super::{LinformsError, PolyLogBound};
use crate::realnum::RealOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StepId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

impl StepId {
    pub const ALL: [StepId; 7] = [
        StepId::S1,
        StepId::S2,
        StepId::S3,
        StepId::S4,
        StepId::S5,
        StepId::S6,
        StepId::S7,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<StepId> {
        StepId::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }
}

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}", self.number())
    }
}

/// The three branches of the case split made in steps 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `a1-a2` small, then `a1-a3` small.
    C1A,
    /// `a1-a2` small, then `n1-n2` small.
    C1B,
    /// `n1-n2` small.
    C2,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::C1A, Case::C1B, Case::C2];

    pub fn label(self) -> &'static str {
        match self {
            Case::C1A => "1A",
            Case::C1B => "1B",
            Case::C2 => "2",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.label())
    }
}

/// Which prior step bounds each gap variable, per case.
pub type GapSources = Vec<(GapVar, StepId)>;

#[derive(Clone, Debug)]
pub struct StepInputs {
    pub id: StepId,
    pub form: FormId,
    /// The constant `c` in `|Gamma| < c * max{...}`.
    pub rhs: &'static str,
    /// The multiplicand whose height grows with the gaps.
    pub eta3: HeightExpr,
    pub cases: Vec<(Option<Case>, GapSources)>,
    /// The quantity bounded by this step.
    pub target: &'static str,
}

fn pow2_gap(v: GapVar) -> HeightExpr {
    HeightExpr::two().pow(Exponent::gap(v))
}

fn pow2_neg_gap(v: GapVar) -> HeightExpr {
    HeightExpr::two().pow(Exponent::neg_gap(v))
}

/// `(1 + alpha^m) / (4 sqrt 2 (2^d + 1))`.
fn mixed_quotient() -> HeightExpr {
    HeightExpr::sum(vec![
        HeightExpr::one(),
        HeightExpr::alpha().pow(Exponent::gap(GapVar::N1MinusN2)),
    ])
    .over(HeightExpr::four_sqrt2().times(HeightExpr::sum(vec![
        pow2_gap(GapVar::A1MinusA2),
        HeightExpr::one(),
    ])))
}

/// `4 sqrt 2 (1 + 2^-(a1-a2) + 2^-(a1-a3))`.
fn three_term_sum() -> HeightExpr {
    HeightExpr::four_sqrt2().times(HeightExpr::sum(vec![
        HeightExpr::one(),
        pow2_neg_gap(GapVar::A1MinusA2),
        pow2_neg_gap(GapVar::A1MinusA3),
    ]))
}

pub fn step_inputs(id: StepId) -> StepInputs {
    use GapVar::*;
    use StepId::*;
    let (form, rhs, eta3, cases, target) = match id {
        S1 => (
            FormId::Gamma,
            "43.72",
            HeightExpr::four_sqrt2(),
            vec![(None, vec![])],
            "min{(a1-a2) log 2, (n1-n2) log alpha}",
        ),
        S2 => (
            FormId::Gamma1,
            "13.57",
            HeightExpr::four_sqrt2().times(HeightExpr::sum(vec![
                pow2_gap(A1MinusA2),
                HeightExpr::one(),
            ])),
            vec![(None, vec![(A1MinusA2, S1)])],
            "min{(a1-a3) log 2, (n1-n2) log alpha}",
        ),
        S3 => (
            FormId::GammaA,
            "1.7",
            three_term_sum(),
            vec![(Some(Case::C1A), vec![(A1MinusA2, S1), (A1MinusA3, S2)])],
            "(n1-n2) log alpha",
        ),
        S4 => (
            FormId::GammaB,
            "1.1",
            mixed_quotient(),
            vec![(Some(Case::C1B), vec![(A1MinusA2, S1), (N1MinusN2, S2)])],
            "(a1-a3) log 2",
        ),
        S5 => (
            FormId::Gamma2,
            "2.2",
            HeightExpr::sum(vec![
                HeightExpr::one(),
                HeightExpr::alpha().pow(Exponent::gap(N1MinusN2)),
            ])
            .over(HeightExpr::four_sqrt2()),
            vec![(Some(Case::C2), vec![(N1MinusN2, S1)])],
            "(a1-a2) log 2",
        ),
        S6 => (
            FormId::GammaB,
            "1.1",
            mixed_quotient(),
            vec![(Some(Case::C2), vec![(N1MinusN2, S1), (A1MinusA2, S5)])],
            "(a1-a3) log 2",
        ),
        S7 => (
            FormId::Gamma3,
            "0.6",
            three_term_sum().over(HeightExpr::sum(vec![
                HeightExpr::one(),
                HeightExpr::alpha().pow(Exponent::neg_gap(N1MinusN2)),
            ])),
            vec![
                (
                    Some(Case::C1A),
                    vec![(A1MinusA2, S1), (A1MinusA3, S2), (N1MinusN2, S3)],
                ),
                (
                    Some(Case::C1B),
                    vec![(A1MinusA2, S1), (A1MinusA3, S4), (N1MinusN2, S2)],
                ),
                (
                    Some(Case::C2),
                    vec![(A1MinusA2, S5), (A1MinusA3, S6), (N1MinusN2, S1)],
                ),
            ],
            "n1 log alpha",
        ),
    };
    StepInputs {
        id,
        form,
        rhs,
        eta3,
        cases,
        target,
    }
}

/// Everything computed while deriving one step's bound.
#[derive(Clone, Debug)]
pub struct StepDerivation {
    pub step: StepId,
    /// Height bound for the third multiplicand, per case.
    pub case_heights: Vec<(Option<Case>, PolyLogBound)>,
    /// Largest of the per-case height bounds.
    pub height: PolyLogBound,
    pub a: [PolyLogBound; 3],
    /// Matveev's `C (1+log n1) A1 A2 A3`.
    pub matveev: PolyLogBound,
    /// Matveev's bound plus the absorbed additive constant.
    pub raw: PolyLogBound,
    /// `raw` rounded up to the working number of significant digits.
    pub bound: PolyLogBound,
}

/// Parameters shared by all steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundContext {
    /// The standing assumption is `n1 > cutoff`.
    pub cutoff: u64,
    /// Significant digits kept when a bound is published to the next step.
    pub digits: usize,
}

impl Default for BoundContext {
    fn default() -> Self {
        BoundContext {
            cutoff: 100,
            digits: 3,
        }
    }
}

const FIELD_DEGREE: u32 = 2;

impl BoundContext {
    /// `1 + log(cutoff)`, a lower bound for `1 + log n1`.
    pub fn l0(&self) -> Result<RealOracle, LinformsError> {
        Ok(RealOracle::integer(self.cutoff)
            .ln()?
            .add(&RealOracle::integer(1))
            .with_label(format!("1 + log {}", self.cutoff)))
    }

    /// `A = max{d h, 0.16}` from a height bound. For a positive real
    /// algebraic `eta` in a field of degree `d`, `|log eta| <= d h(eta)`, so
    /// the middle term of the admissibility condition never dominates.
    fn admissible_a(&self, height: &PolyLogBound) -> Result<PolyLogBound, LinformsError> {
        let scaled = height.scale(&RealOracle::integer(FIELD_DEGREE));
        let coefficient = scaled.coefficient.max(&RealOracle::decimal(A_FLOOR)?);
        Ok(PolyLogBound::new(coefficient, height.exponent))
    }

    fn fixed_a(&self, e: &HeightExpr) -> Result<PolyLogBound, LinformsError> {
        let h = height_upper_bound(e)?;
        debug_assert!(h.is_constant());
        self.admissible_a(&PolyLogBound::constant(h.constant))
    }

    /// Height of `eta3` as a bound symbolic in `n1`, given the sources of
    /// its gap variables.
    pub fn case_height(
        &self,
        eta3: &HeightExpr,
        sources: &GapSources,
        priors: &BTreeMap<StepId, PolyLogBound>,
        step: StepId,
    ) -> Result<PolyLogBound, LinformsError> {
        let h = height_upper_bound(eta3)?;
        let l0 = self.l0()?;
        let mut terms = vec![PolyLogBound::constant(h.constant.clone())];
        for (var, coef) in &h.coefficients {
            let source = sources
                .iter()
                .find(|(v, _)| v == var)
                .map(|(_, s)| *s)
                .ok_or_else(|| {
                    LinformsError::InvalidInput(format!("{step}: no source for gap {var}"))
                })?;
            let prior = priors.get(&source).ok_or(LinformsError::MissingPrior {
                step,
                needs: source,
            })?;
            // coef * var = (coef / unit) * (var * unit) < (coef / unit) * prior
            let factor = coef.div(&var.unit())?;
            terms.push(prior.scale(&factor));
        }
        PolyLogBound::sum(&terms, &l0)
    }

    pub fn derive(
        &self,
        step: StepId,
        priors: &BTreeMap<StepId, PolyLogBound>,
    ) -> Result<StepDerivation, LinformsError> {
        let inputs = step_inputs(step);
        let l0 = self.l0()?;
        let mut case_heights = Vec::new();
        for (case, sources) in &inputs.cases {
            let h = self.case_height(&inputs.eta3, sources, priors, step)?;
            case_heights.push((*case, h));
        }
        let exponent = case_heights
            .iter()
            .map(|(_, h)| h.exponent)
            .max()
            .unwrap_or(0);
        let mut coefficient: Option<RealOracle> = None;
        for (_, h) in &case_heights {
            let c = h.lift(exponent, &l0)?.coefficient;
            coefficient = Some(match coefficient {
                Some(prev) => prev.max(&c),
                None => c,
            });
        }
        let height = PolyLogBound::new(coefficient.expect("at least one case"), exponent);
        let a = [
            self.fixed_a(&HeightExpr::alpha())?,
            self.fixed_a(&HeightExpr::two())?,
            self.admissible_a(&height)?,
        ];
        let matveev = matveev_coefficient(&MatveevInput {
            l: 3,
            field_degree: FIELD_DEGREE,
            a: a.to_vec(),
        })?;
        // min{...} < log c - log|Gamma| < log c + matveev
        let rhs = RealOracle::decimal(inputs.rhs)?;
        let raw = if rhs
            .eval(64, &Default::default())?
            .lo_gt_ratio(&1.into(), &1.into())
        {
            let slack = PolyLogBound::constant(rhs.ln()?);
            PolyLogBound::sum(&[matveev.clone(), slack], &l0)?
        } else {
            matveev.clone()
        };
        let bound = raw.round_up(self.digits)?;
        Ok(StepDerivation {
            step,
            case_heights,
            height,
            a,
            matveev,
            raw,
            bound,
        })
    }

    /// Derives all seven steps in dependency order.
    pub fn derive_all(&self) -> Result<Vec<StepDerivation>, LinformsError> {
        let mut priors = BTreeMap::new();
        let mut out = Vec::new();
        for step in StepId::ALL {
            let d = self.derive(step, &priors)?;
            priors.insert(step, d.bound.clone());
            out.push(d);
        }
        Ok(out)
    }
}

/// The bound produced by `step` from already derived priors, with the
/// default context (`n1 > 100`, three significant digits).
pub fn step_bound(
    step: StepId,
    priors: &BTreeMap<StepId, PolyLogBound>,
) -> Result<PolyLogBound, LinformsError> {
    Ok(BoundContext::default().derive(step, priors)?.bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_numbers_round_trip() {
        for s in StepId::ALL {
            assert_eq!(StepId::from_number(s.number()), Some(s));
        }
        assert_eq!(StepId::from_number(0), None);
        assert_eq!(StepId::from_number(8), None);
    }

    #[test]
    fn first_step_needs_no_priors() {
        let b = step_bound(StepId::S1, &BTreeMap::new()).unwrap();
        assert_eq!(b.exponent, 1);
        assert_eq!(b.coefficient_upper(3).unwrap(), "8.22e12");
    }

    #[test]
    fn missing_prior_is_reported() {
        let err = step_bound(StepId::S3, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, LinformsError::MissingPrior { .. }));
    }
}
