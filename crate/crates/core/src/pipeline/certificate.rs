use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bounds::{derive_upper_bound, BoundReport, REPORT_BITS};
use super::reduce::{run_reduction, ReductionReport, Target};
use super::{published, PipelineConfig, PipelineError};
use crate::linforms::{nonvanishing_check, FormId, GapVar, PolyLogBound, StepId, Witness};
use crate::realnum::{format_ratio, parse_decimal, Interval, RealOracle, Rounding};
use crate::search::{solve, verify, SearchBounds, Solution};

/// Significant digits of decimal endpoints in the certificate.
const DIGITS: usize = 12;

/// A certified real as outward-rounded decimal endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealValue {
    pub lower: String,
    pub upper: String,
    pub precision_bits: String,
}

impl RealValue {
    pub fn from_interval(iv: &Interval) -> Self {
        RealValue {
            lower: iv.lower_decimal(DIGITS),
            upper: iv.upper_decimal(DIGITS),
            precision_bits: iv.prec().to_string(),
        }
    }

    fn from_oracle(o: &RealOracle, config: &PipelineConfig) -> Result<Self, PipelineError> {
        Ok(Self::from_interval(&o.eval(REPORT_BITS, &config.policy)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub k: String,
    pub n1_max: String,
    pub a1_max: String,
    pub computed: Vec<String>,
    pub published: Vec<String>,
    pub published_failing_verification: Vec<String>,
    pub computed_not_published: Vec<String>,
    pub published_not_computed: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub case: String,
    pub step: String,
    pub coefficient: String,
    pub exponent: String,
    pub published: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub quantity: String,
    pub entries: Vec<BoundEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundStep {
    pub step: String,
    pub coefficient: RealValue,
    pub coefficient_rounded: String,
    pub exponent: String,
    pub published: String,
    pub ratio_to_published: RealValue,
    pub within_window: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub assumption: String,
    pub columns: Vec<String>,
    pub rows: Vec<BoundRow>,
    pub steps: Vec<BoundStep>,
    pub final_inequality: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionEntry {
    pub case: String,
    pub value: String,
    pub published: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRow {
    pub quantity: String,
    pub entries: Vec<ReductionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub target: String,
    pub base: String,
    pub w_bound: String,
    pub first_convergent_index: String,
    pub convergent_index: String,
    pub q: String,
    pub epsilon: RealValue,
    pub epsilon_argmin: String,
    pub convergent_groups: String,
    pub precision_bits: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStepRecord {
    pub step: String,
    pub case: String,
    pub u: String,
    pub v: String,
    pub mu: String,
    pub linearized_constant: RealValue,
    pub a: RealValue,
    pub grids: Vec<String>,
    pub members: String,
    pub side_condition: String,
    pub results: Vec<ReductionResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTable {
    pub m: String,
    pub constants: String,
    pub columns: Vec<String>,
    pub rows: Vec<ReductionRow>,
    pub steps: Vec<ReductionStepRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideConditionRecord {
    pub source: String,
    pub condition: String,
    pub discharged_by: String,
    pub discharged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub topic: String,
    pub published: String,
    pub computed: String,
    pub note: String,
}

/// The audit trail of a full run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub solutions: BTreeMap<String, SolutionReport>,
    pub bound_table: BoundTable,
    pub n1_upper: RealValue,
    pub reduction_table: ReductionTable,
    pub final_n1_bound: String,
    pub side_conditions: Vec<SideConditionRecord>,
    pub discrepancies: Vec<Discrepancy>,
    pub verdict: String,
}

impl Certificate {
    pub fn is_complete(&self) -> bool {
        self.verdict == "complete"
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

fn tuple_text(t: &[u64]) -> String {
    let parts: Vec<String> = t.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn solution_report(k: usize, cutoff: usize) -> Result<SolutionReport, PipelineError> {
    let bounds = SearchBounds::auto(cutoff)?;
    let found = solve(k, bounds)?;
    let computed: Vec<Vec<u64>> = found.iter().map(Solution::as_tuple).collect();
    let published = published::solutions(k);
    let failing = published
        .iter()
        .filter(|t| {
            let exps = t[2..].iter().map(|&a| a as u32).collect();
            !verify(&Solution::new(t[0] as usize, t[1] as usize, exps))
        })
        .map(|t| tuple_text(t))
        .collect();
    let texts = |v: &[Vec<u64>]| v.iter().map(|t| tuple_text(t)).collect::<Vec<_>>();
    let extra: Vec<Vec<u64>> = computed
        .iter()
        .filter(|t| !published.contains(t))
        .cloned()
        .collect();
    let missing: Vec<Vec<u64>> = published
        .iter()
        .filter(|t| !computed.contains(t))
        .cloned()
        .collect();
    Ok(SolutionReport {
        k: k.to_string(),
        n1_max: bounds.n1_max.to_string(),
        a1_max: bounds.a1_max.to_string(),
        computed: texts(&computed),
        published: texts(&published),
        published_failing_verification: failing,
        computed_not_published: texts(&extra),
        published_not_computed: texts(&missing),
    })
}

fn gap_quantity(g: GapVar) -> String {
    format!("({}) {}", g.name(), g.unit_name())
}

fn bound_text(b: &PolyLogBound, digits: usize) -> Result<String, PipelineError> {
    Ok(b.coefficient_upper(digits)?)
}

fn bound_table(report: &BoundReport) -> Result<BoundTable, PipelineError> {
    let digits = report.context.digits;
    let mut rows = Vec::new();
    for (r, &row) in published::TABLE_ROWS.iter().enumerate() {
        let mut entries = Vec::new();
        for (c, &col) in published::TABLE_COLUMNS.iter().enumerate() {
            let step = published::bound_table_source(row, col);
            let b = &report.table[r][c];
            let (pc, pk) = published::step_bound(step);
            entries.push(BoundEntry {
                case: col.label().to_string(),
                step: step.number().to_string(),
                coefficient: bound_text(b, digits)?,
                exponent: b.exponent.to_string(),
                published: format!("{pc} (1+log n1)^{pk}"),
            });
        }
        rows.push(BoundRow {
            quantity: gap_quantity(row),
            entries,
        });
    }
    let steps = report
        .checks
        .iter()
        .map(|c| {
            Ok(BoundStep {
                step: c.step.number().to_string(),
                coefficient: RealValue::from_interval(&c.computed.coefficient_enclosure()?),
                coefficient_rounded: bound_text(&c.computed, digits)?,
                exponent: c.computed.exponent.to_string(),
                published: format!("{} (1+log n1)^{}", c.published.0, c.published.1),
                ratio_to_published: RealValue::from_interval(&c.ratio),
                within_window: c.in_window(),
            })
        })
        .collect::<Result<_, PipelineError>>()?;
    Ok(BoundTable {
        assumption: format!("n1 > {}", report.context.cutoff),
        columns: published::TABLE_COLUMNS
            .iter()
            .map(|c| c.label().to_string())
            .collect(),
        rows,
        steps,
        final_inequality: format!("n1 log alpha < {}", report.final_bound),
    })
}

fn reduction_table(
    report: &ReductionReport,
    config: &PipelineConfig,
) -> Result<ReductionTable, PipelineError> {
    let mut rows = Vec::new();
    for (r, &row) in published::TABLE_ROWS.iter().enumerate() {
        let entries = published::TABLE_COLUMNS
            .iter()
            .enumerate()
            .map(|(c, col)| ReductionEntry {
                case: col.label().to_string(),
                value: report.table[r][c].to_string(),
                published: published::REDUCTION_TABLE[r][c].to_string(),
            })
            .collect();
        rows.push(ReductionRow {
            quantity: row.name().to_string(),
            entries,
        });
    }
    let mut steps = Vec::new();
    for s in &report.steps {
        let members = s.results.first().map(|(_, o)| o.members).unwrap_or(0);
        let results = s
            .results
            .iter()
            .map(|(t, o)| ReductionResult {
                target: t.name().to_string(),
                base: match t {
                    Target::Gap(GapVar::N1MinusN2) | Target::N1 => "alpha".into(),
                    Target::Gap(_) => "2".into(),
                },
                w_bound: o.w_bound.to_string(),
                first_convergent_index: o.first_index.to_string(),
                convergent_index: o.convergent_used.index.to_string(),
                q: o.convergent_used.q.to_string(),
                epsilon: RealValue::from_interval(&o.epsilon),
                epsilon_argmin: o.argmin.clone(),
                convergent_groups: o.groups.len().to_string(),
                precision_bits: o.precision_bits.to_string(),
            })
            .collect();
        steps.push(ReductionStepRecord {
            step: s.step.number().to_string(),
            case: s.case.to_string(),
            u: s.u.to_string(),
            v: s.v.to_string(),
            mu: s.mu.clone(),
            linearized_constant: RealValue::from_oracle(&s.linearized, config)?,
            a: RealValue::from_oracle(&s.a, config)?,
            grids: s.grids.iter().map(ToString::to_string).collect(),
            members: members.to_string(),
            side_condition: s.side_condition.condition.clone(),
            results,
        });
    }
    Ok(ReductionTable {
        m: report.m.to_string(),
        constants: if report.paper_constants {
            "published"
        } else {
            "computed"
        }
        .into(),
        columns: published::TABLE_COLUMNS
            .iter()
            .map(|c| c.label().to_string())
            .collect(),
        rows,
        steps,
    })
}

/// Witnesses at which every form is checked to be non-zero.
fn nonvanishing_witnesses() -> Vec<Witness> {
    [
        (101, 0, 256, 0, 0),
        (101, 100, 256, 255, 254),
        (150, 63, 380, 214, 160),
        (5000, 4913, 12713, 12499, 12491),
    ]
    .into_iter()
    .map(|(n1, n2, a1, a2, a3)| Witness { n1, n2, a1, a2, a3 })
    .collect()
}

fn side_conditions(
    config: &PipelineConfig,
    bounds: &BoundReport,
    reduction: &ReductionReport,
) -> Result<Vec<SideConditionRecord>, PipelineError> {
    let mut out = Vec::new();
    let cutoff = bounds.context.cutoff;
    out.push(SideConditionRecord {
        source: "bounds".into(),
        condition: format!("n1 > {cutoff}"),
        discharged_by: format!("search over n1 <= {}", config.search_cutoff),
        discharged: config.search_cutoff as u64 >= cutoff,
    });
    let m_ok = bounds.n1_upper.hi_le_ratio(&reduction.m, &1.into());
    out.push(SideConditionRecord {
        source: "reduction".into(),
        condition: format!("n1 <= M = {}", reduction.m),
        discharged_by: format!(
            "absolute bound n1 < {}",
            bounds.n1_upper.upper_decimal(DIGITS)
        ),
        discharged: m_ok,
    });
    for s in reduction.side_conditions() {
        out.push(SideConditionRecord {
            source: format!("reduction step {}", s.step.number()),
            condition: s.condition,
            discharged_by: s.discharged_by,
            discharged: s.discharged,
        });
    }
    let witnesses = nonvanishing_witnesses();
    for form in FormId::ALL {
        let mut ok = true;
        for w in &witnesses {
            ok &= nonvanishing_check(form, w, &config.policy)?;
        }
        out.push(SideConditionRecord {
            source: "linear forms".into(),
            condition: format!("{} != 0", form.name()),
            discharged_by: format!(
                "certified non-zero at {} sampled witnesses; the algebraic argument is not mechanized",
                witnesses.len()
            ),
            discharged: ok,
        });
    }
    Ok(out)
}

fn ratio_of(text: &str) -> (num_bigint::BigInt, num_bigint::BigInt) {
    parse_decimal(text).expect("valid published constant")
}

fn discrepancies(
    solutions: &BTreeMap<String, SolutionReport>,
    bounds: &BoundReport,
    reduction: &ReductionReport,
    config: &PipelineConfig,
) -> Result<Vec<Discrepancy>, PipelineError> {
    let mut out = Vec::new();
    for report in solutions.values() {
        for t in &report.published_failing_verification {
            out.push(Discrepancy {
                topic: format!("solutions k={}", report.k),
                published: t.clone(),
                computed: "fails exact verification".into(),
                note: "listed as a solution but the identity does not hold".into(),
            });
        }
        for t in &report.computed_not_published {
            out.push(Discrepancy {
                topic: format!("solutions k={}", report.k),
                published: "absent".into(),
                computed: t.clone(),
                note: "verifies exactly but is not listed".into(),
            });
        }
        for t in &report.published_not_computed {
            if !report.published_failing_verification.contains(t) {
                out.push(Discrepancy {
                    topic: format!("solutions k={}", report.k),
                    published: t.clone(),
                    computed: "not found".into(),
                    note: "listed but not produced by the search".into(),
                });
            }
        }
    }

    let s7 = bounds.derivation(StepId::S7);
    let (num, den) = ratio_of(published::STEP7_HEIGHT);
    let h = s7.height.coefficient_enclosure()?;
    if !h.hi_le_ratio(&num, &den) {
        out.push(Discrepancy {
            topic: "bound step 7 height".into(),
            published: format!("{} (1+log n1)^3", published::STEP7_HEIGHT),
            computed: format!("{}", s7.height),
            note: "the height of the third multiplicand must cover every case; the case-1A gap (n1-n2) log alpha alone allows more".into(),
        });
    }

    let (num, den) = ratio_of(published::N1_UPPER);
    let printed_final = PolyLogBound::from_decimal(published::step_bound(StepId::S7).0, 4)?;
    let from_printed =
        super::absolute_n1_bound(&printed_final)?.eval(REPORT_BITS, &config.policy)?;
    if !from_printed.hi_le_ratio(&num, &den) {
        out.push(Discrepancy {
            topic: "absolute bound on n1".into(),
            published: published::N1_UPPER.into(),
            computed: format!(
                "{} from the printed coefficient, {} from the recomputed one",
                from_printed.upper_decimal(4),
                bounds.n1_upper.upper_decimal(4)
            ),
            note: "the unwrapping lemma is stated for (log n1)^4 while the inequality carries (1+log n1)^4; substituting L = 3 n1 makes the step rigorous".into(),
        });
    }

    for s in &reduction.steps {
        let printed = published::reduction(s.step);
        let topic = |what: &str| format!("reduction step {} {what}", s.step.number());
        let (cn, cd) = ratio_of(crate::linforms::step_inputs(s.step).rhs);
        let (pn, pd) = ratio_of(printed.linearized);
        if &cn * 2 * &pd != &pn * &cd {
            out.push(Discrepancy {
                topic: topic("linearized constant"),
                published: printed.linearized.into(),
                computed: format_ratio(&(&cn * 2), &cd, 6, Rounding::Up),
                note: "the printed constant after linearization is not twice the printed bound on |Gamma|; the larger value is used".into(),
            });
        }
        let needed = s
            .linearized
            .div(&RealOracle::ln2())?
            .eval(REPORT_BITS, &config.policy)?;
        let (an, ad) = ratio_of(printed.a);
        if !needed.hi_le_ratio(&an, &ad) {
            out.push(Discrepancy {
                topic: topic("A"),
                published: printed.a.into(),
                computed: needed.upper_decimal(6),
                note: "the printed A is smaller than (linearized constant)/log 2".into(),
            });
        }
        if let Some((_, o)) = s.results.first() {
            if let Some(e) = printed.epsilon {
                let (en, ed) = ratio_of(e);
                let exact = s.step == StepId::S1;
                let agrees = if exact {
                    let iv = &o.epsilon;
                    iv.is_point()
                        && iv.hi_le_ratio(&en, &ed)
                        && iv.lo_mantissa() * &ed >= &en << iv.prec()
                } else {
                    o.epsilon.lo_gt_ratio(&en, &ed)
                };
                if !agrees {
                    out.push(Discrepancy {
                        topic: topic("epsilon"),
                        published: format!("{}{e}", if exact { "= " } else { "> " }),
                        computed: format!("{} (minimum over {} members)", o.epsilon, o.members),
                        note: if exact {
                            "||mu q|| <= 1/2 and M ||tau q|| > 0, so eps cannot equal 0.5".into()
                        } else {
                            "the computed minimum over the full grid is below the printed lower bound".into()
                        },
                    });
                }
            }
            if let Some(idx) = printed.convergent_index {
                if o.convergent_used.index != idx {
                    out.push(Discrepancy {
                        topic: topic("convergent"),
                        published: format!("q_{idx}"),
                        computed: format!(
                            "q_{} (first with q > 6M: q_{}; integer part is index 0)",
                            o.convergent_used.index, o.first_index
                        ),
                        note:
                            "convergent indexing is descriptive; the certified eps is what matters"
                                .into(),
                    });
                }
            }
        }
    }
    for (r, &row) in published::TABLE_ROWS.iter().enumerate() {
        for (c, col) in published::TABLE_COLUMNS.iter().enumerate() {
            let (computed, printed) = (reduction.table[r][c], published::REDUCTION_TABLE[r][c]);
            if computed > printed {
                out.push(Discrepancy {
                    topic: format!("reduction table {} case {}", row.name(), col.label()),
                    published: printed.to_string(),
                    computed: computed.to_string(),
                    note: "computed bound exceeds the printed one".into(),
                });
            }
        }
    }
    if reduction.final_n1_bound > published::FINAL_N1_BOUND {
        out.push(Discrepancy {
            topic: "final n1 bound".into(),
            published: published::FINAL_N1_BOUND.to_string(),
            computed: reduction.final_n1_bound.to_string(),
            note: "still below the search cutoff, so the contradiction stands".into(),
        });
    }
    out.push(Discrepancy {
        topic: "reduction step 7 assumptions".into(),
        published: "n1-n2 <= 87, a1-a2 <= 215, a1-a3 <= 222".into(),
        computed: format!(
            "per-row maxima over the three cases: n1-n2 <= {}, a1-a2 <= {}, a1-a3 <= {}",
            reduction.table[2].iter().max().expect("three"),
            reduction.table[0].iter().max().expect("three"),
            reduction.table[1].iter().max().expect("three"),
        ),
        note: "maxima of mutually exclusive cases are merged into one grid, as printed; this covers every case".into(),
    });
    Ok(out)
}

fn verdict(
    config: &PipelineConfig,
    solutions: &BTreeMap<String, SolutionReport>,
    bounds: &BoundReport,
    reduction: &ReductionReport,
    side: &[SideConditionRecord],
) -> String {
    let mut failures = Vec::new();
    let cutoff = config.search_cutoff;
    for r in solutions.values() {
        if r.n1_max != cutoff.to_string() {
            failures.push(format!("search for k={} did not cover n1 <= {cutoff}", r.k));
        }
    }
    if reduction.final_n1_bound > cutoff as i64 {
        failures.push(format!(
            "final n1 bound {} exceeds the search cutoff {cutoff}",
            reduction.final_n1_bound
        ));
    }
    for s in side.iter().filter(|s| !s.discharged) {
        failures.push(format!(
            "side condition {} ({}) not discharged",
            s.condition, s.source
        ));
    }
    if !bounds.checks.iter().all(|c| c.in_window()) {
        failures.push("a bound coefficient is outside [0.9, 1.0] of its printed value".into());
    }
    if failures.is_empty() {
        "complete".into()
    } else {
        format!("incomplete: {}", failures.join("; "))
    }
}

/// Assembles a certificate from already computed parts.
pub fn build_certificate(
    config: &PipelineConfig,
    bounds: &BoundReport,
    reduction: &ReductionReport,
) -> Result<Certificate, PipelineError> {
    let mut solutions = BTreeMap::new();
    for k in 1..=3 {
        solutions.insert(format!("k{k}"), solution_report(k, config.search_cutoff)?);
    }
    let side = side_conditions(config, bounds, reduction)?;
    let discrepancies = discrepancies(&solutions, bounds, reduction, config)?;
    let verdict = verdict(config, &solutions, bounds, reduction, &side);
    Ok(Certificate {
        bound_table: bound_table(bounds)?,
        n1_upper: RealValue::from_interval(&bounds.n1_upper),
        reduction_table: reduction_table(reduction, config)?,
        final_n1_bound: reduction.final_n1_bound.to_string(),
        side_conditions: side,
        discrepancies,
        verdict,
        solutions,
    })
}

/// Search, bound derivation, reduction and verdict in one run.
pub fn full_certificate(config: &PipelineConfig) -> Result<Certificate, PipelineError> {
    let bounds = derive_upper_bound(&config.bounds)?;
    let m = config.reduction_m(&bounds);
    let reduction = run_reduction(&m, config)?;
    build_certificate(config, &bounds, &reduction)
}
