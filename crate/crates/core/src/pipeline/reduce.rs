use std::fmt;

use num_bigint::BigInt;

use super::{published, PipelineConfig, PipelineError};
use crate::linforms::{step_inputs, GapVar, StepId};
use crate::realnum::{constants, RealOracle};
use crate::reduction::{
    bd_reduce_family, linearize_small_form, required_gap, Axis, MuFamily, ReductionConfig,
    ReductionOutcome, ReductionProblem,
};

/// Quantity bounded by a reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Gap(GapVar),
    N1,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Gap(g) => g.name(),
            Target::N1 => "n1",
        }
    }

    fn base(self) -> RealOracle {
        match self {
            Target::Gap(GapVar::N1MinusN2) | Target::N1 => constants::alpha(),
            Target::Gap(_) => RealOracle::integer(2),
        }
    }

    fn base_name(self) -> &'static str {
        match self {
            Target::Gap(GapVar::N1MinusN2) | Target::N1 => "alpha",
            Target::Gap(_) => "2",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A minimum-gap hypothesis and how it is discharged.
#[derive(Clone, Debug)]
pub struct SideCondition {
    pub step: StepId,
    pub condition: String,
    pub discharged_by: String,
    pub discharged: bool,
}

/// Inclusive parameter range of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridRange {
    pub var: GapVar,
    pub lo: i64,
    pub hi: i64,
}

impl fmt::Display for GridRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in [{}, {}]", self.var, self.lo, self.hi)
    }
}

#[derive(Clone, Debug)]
pub struct StepReduction {
    pub step: StepId,
    /// Case of the case split this step belongs to.
    pub case: &'static str,
    pub u: &'static str,
    pub v: &'static str,
    pub mu: String,
    /// Operative constant `2c` after linearization.
    pub linearized: RealOracle,
    pub a: RealOracle,
    pub grids: Vec<GridRange>,
    /// Gap thresholds making the linearization valid, per target variable.
    pub thresholds: Vec<(Target, u32)>,
    pub results: Vec<(Target, ReductionOutcome)>,
    pub side_condition: SideCondition,
}

impl StepReduction {
    pub fn bound(&self, target: Target) -> Option<i64> {
        self.results
            .iter()
            .find(|(t, _)| *t == target)
            .map(|(_, o)| o.w_bound)
    }
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub m: BigInt,
    pub paper_constants: bool,
    pub steps: Vec<StepReduction>,
    /// `table[row][column]` as in the published summary table.
    pub table: [[i64; 3]; 3],
    pub final_n1_bound: i64,
}

impl ReductionReport {
    pub fn step(&self, id: StepId) -> &StepReduction {
        self.steps
            .iter()
            .find(|s| s.step == id)
            .expect("all steps run")
    }

    pub fn side_conditions(&self) -> Vec<SideCondition> {
        self.steps
            .iter()
            .map(|s| s.side_condition.clone())
            .collect()
    }
}

fn log2_of(x: RealOracle) -> Result<RealOracle, PipelineError> {
    Ok(x.ln()?.div(&RealOracle::ln2())?)
}

/// `log(1/(4 sqrt 2)) / log 2`, which is exactly `-5/2`.
fn mu_constant() -> RealOracle {
    RealOracle::rational(-5, 2)
        .expect("nonzero denominator")
        .with_label("log(1/(4 sqrt 2))/log 2")
}

fn pow2(k: i64) -> RealOracle {
    RealOracle::integer(2).powi(k).expect("2 is nonzero")
}

fn alpha_pow(k: i64) -> RealOracle {
    constants::alpha().powi(k).expect("alpha is nonzero")
}

/// Axis over `m = n1-n2` with component `log2(1 + alpha^(sign m))`.
fn alpha_axis(range: &GridRange, exponent_sign: i64) -> Result<Axis, PipelineError> {
    let mut axis = Axis::new(&["n1-n2"], 1);
    for m in range.lo..=range.hi {
        let c = log2_of(RealOracle::integer(1).add(&alpha_pow(exponent_sign * m)))?;
        axis.push(vec![m], c);
    }
    Ok(axis)
}

/// Axis over `d = a1-a2` with component `log2(1 + 2^d)`, subtracted.
fn pow2_axis(range: &GridRange) -> Result<Axis, PipelineError> {
    let mut axis = Axis::new(&["a1-a2"], -1);
    for d in range.lo..=range.hi {
        axis.push(vec![d], log2_of(RealOracle::integer(1).add(&pow2(d)))?);
    }
    Ok(axis)
}

/// Axis over `a1-a2 = d <= e = a1-a3` with component
/// `log2(1 + 2^-d + 2^-e)`, subtracted.
fn three_term_axis(d: &GridRange, e: &GridRange) -> Result<Axis, PipelineError> {
    let mut axis = Axis::new(&["a1-a2", "a1-a3"], -1);
    for dv in d.lo..=d.hi {
        for ev in e.lo.max(dv)..=e.hi {
            let s = RealOracle::integer(1).add(&pow2(-dv)).add(&pow2(-ev));
            axis.push(vec![dv, ev], log2_of(s)?);
        }
    }
    Ok(axis)
}

struct Plan {
    step: StepId,
    case: &'static str,
    u: &'static str,
    v: &'static str,
    mu: &'static str,
    grids: Vec<GridRange>,
    targets: Vec<Target>,
}

/// Lower end of a family grid: 0, or the printed side-condition minimum.
fn grid_min(var: GapVar, paper: bool) -> i64 {
    match (paper, var) {
        (false, _) => 0,
        (true, GapVar::A1MinusA3) => 5,
        (true, _) => 7,
    }
}

fn range(var: GapVar, hi: i64, paper: bool) -> GridRange {
    GridRange {
        var,
        lo: grid_min(var, paper),
        hi,
    }
}

fn build_family(plan: &Plan) -> Result<MuFamily, PipelineError> {
    use StepId::*;
    let g = &plan.grids;
    let axes = match plan.step {
        S1 => vec![],
        S2 => vec![pow2_axis(&g[0])?],
        S3 => vec![three_term_axis(&g[0], &g[1])?],
        S4 | S6 => vec![alpha_axis(&g[1], 1)?, pow2_axis(&g[0])?],
        S5 => vec![alpha_axis(&g[0], 1)?],
        S7 => vec![alpha_axis(&g[0], -1)?, three_term_axis(&g[1], &g[2])?],
    };
    Ok(MuFamily {
        label: plan.mu.to_string(),
        constant: mu_constant(),
        axes,
    })
}

/// Runs one reduction step: certifies the linearization, then reduces the
/// family once per target base.
fn reduce_step(
    plan: Plan,
    m: &BigInt,
    config: &PipelineConfig,
    reduction_config: &ReductionConfig,
) -> Result<StepReduction, PipelineError> {
    let policy = &config.policy;
    let inputs = step_inputs(plan.step);
    let printed = published::reduction(plan.step);
    let c = RealOracle::decimal(inputs.rhs)?;

    let mut thresholds = Vec::new();
    for &t in &plan.targets {
        let g = match t {
            // 0.6 alpha^-n1 <= 1/2 already for n1 >= 1
            Target::N1 => required_gap(&c, &t.base(), policy)?.max(1),
            Target::Gap(_) => required_gap(&c, &t.base(), policy)?,
        };
        // certifies c B^-g <= 1/2 and yields the linear bound 2 c B^-g
        let y = c.mul(&t.base().powi(-i64::from(g))?);
        linearize_small_form(&y, policy)?;
        thresholds.push((t, g));
    }

    let two_c = RealOracle::integer(2).mul(&c);
    let printed_2c = RealOracle::decimal(printed.linearized)?;
    let linearized = if config.paper_constants {
        printed_2c
    } else {
        two_c.max(&printed_2c)
    };
    let a = if config.paper_constants {
        RealOracle::decimal(printed.a)?
    } else {
        linearized
            .div(&RealOracle::ln2())?
            .with_label(format!("{}/log 2", printed.linearized))
    };

    let family = build_family(&plan)?;
    let mut results = Vec::new();
    for &t in &plan.targets {
        let problem = ReductionProblem {
            label: format!("{} ({} with B = {})", plan.step, t, t.base_name()),
            tau: constants::tau(),
            mu: family.clone(),
            a: a.clone(),
            b: t.base(),
            m: m.clone(),
            side_condition: None,
        };
        results.push((t, bd_reduce_family(&problem, reduction_config)?));
    }

    let condition = thresholds
        .iter()
        .map(|(t, g)| format!("{t} >= {g}"))
        .collect::<Vec<_>>()
        .join(" and ");
    let mut discharged = true;
    let mut reasons = Vec::new();
    for ((t, g), (_, out)) in thresholds.iter().zip(&results) {
        match t {
            Target::N1 => {
                let cutoff = config.bounds.cutoff;
                discharged &= u64::from(*g) <= cutoff + 1;
                reasons.push(format!("n1 > {cutoff} is the standing assumption"));
            }
            Target::Gap(_) => {
                let ok = i64::from(*g) - 1 <= out.w_bound;
                discharged &= ok;
                reasons.push(format!(
                    "{t} <= {} already satisfies the conclusion {t} <= {}",
                    i64::from(*g) - 1,
                    out.w_bound
                ));
            }
        }
    }
    let side_condition = SideCondition {
        step: plan.step,
        condition,
        discharged_by: format!("complementary case: {}", reasons.join("; ")),
        discharged,
    };
    for (_, out) in results.iter_mut() {
        out.side_condition = Some(side_condition.condition.clone());
    }

    Ok(StepReduction {
        step: plan.step,
        case: plan.case,
        u: plan.u,
        v: plan.v,
        mu: plan.mu.to_string(),
        linearized,
        a,
        grids: plan.grids,
        thresholds,
        results,
        side_condition,
    })
}

/// Runs the seven reduction steps with bound `M` on `n1`.
pub fn run_reduction(
    m: &BigInt,
    config: &PipelineConfig,
) -> Result<ReductionReport, PipelineError> {
    use GapVar::*;
    use StepId::*;
    if m < &BigInt::from(1) {
        return Err(PipelineError::InvalidConfig(format!(
            "M = {m} must be positive"
        )));
    }
    let paper = config.paper_constants;
    let rc = ReductionConfig {
        policy: config.policy,
        max_convergents: config.max_convergents,
    };
    let gap = |s: &StepReduction, g: GapVar| s.bound(Target::Gap(g)).expect("target reduced");

    let s1 = reduce_step(
        Plan {
            step: S1,
            case: "all",
            u: "n1",
            v: "a1",
            mu: "log(1/(4 sqrt 2))/log 2",
            grids: vec![],
            targets: vec![Target::Gap(A1MinusA2), Target::Gap(N1MinusN2)],
        },
        m,
        config,
        &rc,
    )?;
    let s1_d = gap(&s1, A1MinusA2);
    let s1_m = gap(&s1, N1MinusN2);

    let s2 = reduce_step(
        Plan {
            step: S2,
            case: "1",
            u: "n1",
            v: "a2",
            mu: "log(1/(4 sqrt 2 (1 + 2^(a1-a2))))/log 2",
            grids: vec![range(A1MinusA2, s1_d, paper)],
            targets: vec![Target::Gap(A1MinusA3), Target::Gap(N1MinusN2)],
        },
        m,
        config,
        &rc,
    )?;
    let s2_e = gap(&s2, A1MinusA3);
    let s2_m = gap(&s2, N1MinusN2);

    let s3 = reduce_step(
        Plan {
            step: S3,
            case: "1A",
            u: "n1",
            v: "a1",
            mu: "log(1/(4 sqrt 2 (1 + 2^(a2-a1) + 2^(a3-a1))))/log 2",
            grids: vec![range(A1MinusA2, s1_d, paper), range(A1MinusA3, s2_e, paper)],
            targets: vec![Target::Gap(N1MinusN2)],
        },
        m,
        config,
        &rc,
    )?;

    let s4 = reduce_step(
        Plan {
            step: S4,
            case: "1B",
            u: "n2",
            v: "a2",
            mu: "log((1 + alpha^(n1-n2))/(4 sqrt 2 (2^(a1-a2) + 1)))/log 2",
            grids: vec![range(A1MinusA2, s1_d, paper), range(N1MinusN2, s2_m, paper)],
            targets: vec![Target::Gap(A1MinusA3)],
        },
        m,
        config,
        &rc,
    )?;

    let s5 = reduce_step(
        Plan {
            step: S5,
            case: "2",
            u: "n2",
            v: "a1",
            mu: "log((1 + alpha^(n1-n2))/(4 sqrt 2))/log 2",
            grids: vec![range(N1MinusN2, s1_m, paper)],
            targets: vec![Target::Gap(A1MinusA2)],
        },
        m,
        config,
        &rc,
    )?;
    let s5_d = gap(&s5, A1MinusA2);

    let s6 = reduce_step(
        Plan {
            step: S6,
            case: "2",
            u: "n2",
            v: "a2",
            mu: "log((1 + alpha^(n1-n2))/(4 sqrt 2 (2^(a1-a2) + 1)))/log 2",
            grids: vec![range(A1MinusA2, s5_d, paper), range(N1MinusN2, s1_m, paper)],
            targets: vec![Target::Gap(A1MinusA3)],
        },
        m,
        config,
        &rc,
    )?;

    let table = [
        [s1_d, s1_d, s5_d],
        [s2_e, gap(&s4, A1MinusA3), gap(&s6, A1MinusA3)],
        [gap(&s3, N1MinusN2), s2_m, s1_m],
    ];
    // The last step runs once over the per-row maxima across the cases.
    let row_max = |r: usize| table[r].iter().copied().max().expect("three cases");
    let s7 = reduce_step(
        Plan {
            step: S7,
            case: "merged",
            u: "n1",
            v: "a1",
            mu: "log((1 + alpha^(n2-n1))/(4 sqrt 2 (1 + 2^(a2-a1) + 2^(a3-a1))))/log 2",
            grids: vec![
                range(N1MinusN2, row_max(2), paper),
                range(A1MinusA2, row_max(0), paper),
                range(A1MinusA3, row_max(1), paper),
            ],
            targets: vec![Target::N1],
        },
        m,
        config,
        &rc,
    )?;
    let final_n1_bound = s7.bound(Target::N1).expect("target reduced");

    Ok(ReductionReport {
        m: m.clone(),
        paper_constants: paper,
        steps: vec![s1, s2, s3, s4, s5, s6, s7],
        table,
        final_n1_bound,
    })
}
