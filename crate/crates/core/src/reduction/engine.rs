use std::collections::hash_map::Entry;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use super::{MuFamily, ReductionError};
use crate::realnum::interval::{ceil_shr, floor_shr};
use crate::realnum::{
    nearest_int_distance, Convergent, ConvergentStream, Interval, PrecisionPolicy, RealOracle,
};

/// Fixed-point scale for fractional parts inside the member loop.
const FRAC_BITS: u32 = 120;
/// Widest fractional enclosure accepted before precision is raised.
const MAX_WIDTH: i128 = 1 << (FRAC_BITS - 8);
const ONE: i128 = 1 << FRAC_BITS;
const HALF: i128 = 1 << (FRAC_BITS - 1);
const CHUNK: usize = 1 << 15;
/// Precision at which the final `log(A q / eps) / log B` is enclosed.
const RATIO_BITS: u32 = 128;

/// A Baker-Davenport instance: rule out `0 < |u tau - v + mu| < A B^-w` with
/// `u <= M` and `w` beyond the returned bound, for every `mu` in a family.
#[derive(Clone, Debug)]
pub struct ReductionProblem {
    pub label: String,
    pub tau: RealOracle,
    pub mu: MuFamily,
    pub a: RealOracle,
    pub b: RealOracle,
    pub m: BigInt,
    /// Hypothesis under which the form was linearized, reported verbatim.
    pub side_condition: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct ReductionConfig {
    pub policy: PrecisionPolicy,
    /// Convergents tried after the first one with `q > 6M`.
    pub max_convergents: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            policy: PrecisionPolicy::default(),
            max_convergents: 20,
        }
    }
}

/// Members settled by one convergent.
#[derive(Clone, Debug)]
pub struct GroupOutcome {
    pub convergent: Convergent,
    pub members: usize,
    /// Smallest `eps` over the group, as a certified enclosure.
    pub epsilon: Interval,
    /// Parameters of the member attaining the smallest lower bound.
    pub argmin: String,
    /// Enclosure of `log(A q / eps) / log B` at the smallest `eps`.
    pub log_ratio: Interval,
    pub w_bound: i64,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub label: String,
    pub members: usize,
    /// Convergent of the group that produced `w_bound`.
    pub convergent_used: Convergent,
    /// Smallest `eps` over the whole family.
    pub epsilon: Interval,
    pub argmin: String,
    /// Every solution has `w <= w_bound`.
    pub w_bound: i64,
    pub side_condition: Option<String>,
    /// Index of the first convergent with `q > 6M`.
    pub first_index: usize,
    pub groups: Vec<GroupOutcome>,
    /// Highest working precision used.
    pub precision_bits: u32,
}

/// Reduces a single `mu` (a family with no parameters).
pub fn bd_reduce(
    problem: &ReductionProblem,
    config: &ReductionConfig,
) -> Result<ReductionOutcome, ReductionError> {
    bd_reduce_family(problem, config)
}

/// Reduces every member of the family, grouping members by the convergent
/// that certified them. The result is independent of thread scheduling.
pub fn bd_reduce_family(
    problem: &ReductionProblem,
    config: &ReductionConfig,
) -> Result<ReductionOutcome, ReductionError> {
    let policy = &config.policy;
    validate(problem, policy)?;
    let fam = &problem.mu;
    let total = fam.len();
    let six_m = &problem.m * 6;
    let mut stream = ConvergentStream::new(problem.tau.clone(), *policy);
    let first = stream.first_q_exceeding(&six_m)?;

    let mut cache: HashMap<u32, Components> = HashMap::new();
    let mut pending: Vec<u32> = (0..u32::try_from(total).expect("family too large")).collect();
    let mut groups = Vec::new();
    let mut bits = policy.initial.max(FRAC_BITS + 8);
    let mut max_bits = bits;

    for attempt in 0..config.max_convergents {
        if pending.is_empty() {
            break;
        }
        let conv = stream.get(first.index + attempt)?.clone();
        let mut current = std::mem::take(&mut pending);
        let mut best: Option<Best> = None;
        let mut settled = 0usize;
        loop {
            max_bits = max_bits.max(bits);
            if let Entry::Vacant(slot) = cache.entry(bits) {
                slot.insert(Components::evaluate(fam, bits)?);
            }
            let comps = &cache[&bits];
            let pass = classify(
                fam,
                comps,
                &problem.tau,
                &conv.q,
                &problem.m,
                bits,
                &current,
            )?;
            settled += pass.settled;
            best = Best::merge(best, pass.best);
            pending.extend(pass.nonpositive);
            if pass.undecided.is_empty() {
                break;
            }
            if bits >= policy.cap {
                pending.extend(pass.undecided);
                break;
            }
            bits = (bits * 2).min(policy.cap);
            current = pass.undecided;
        }
        pending.sort_unstable();
        if let Some(b) = best {
            groups.push(group_outcome(problem, conv, settled, &b, policy)?);
        }
    }

    if let Some(&idx) = pending.first() {
        return Err(ReductionError::NoConvergent {
            label: problem.label.clone(),
            member: fam.describe(idx as usize),
            tried: config.max_convergents,
        });
    }

    let used = groups
        .iter()
        .max_by(|a, b| {
            a.w_bound
                .cmp(&b.w_bound)
                .then(b.convergent.index.cmp(&a.convergent.index))
        })
        .expect("non-empty family yields at least one group");
    let global = groups
        .iter()
        .min_by(|a, b| a.epsilon.lo_mantissa().cmp(b.epsilon.lo_mantissa()))
        .expect("non-empty");
    let eps_hi = groups
        .iter()
        .map(|g| g.epsilon.hi_mantissa())
        .min()
        .expect("non-empty");
    Ok(ReductionOutcome {
        label: problem.label.clone(),
        members: total,
        convergent_used: used.convergent.clone(),
        epsilon: Interval::from_mantissas(
            global.epsilon.lo_mantissa().clone(),
            eps_hi.clone(),
            FRAC_BITS,
        ),
        argmin: global.argmin.clone(),
        w_bound: used.w_bound,
        side_condition: problem.side_condition.clone(),
        first_index: first.index,
        groups,
        precision_bits: max_bits,
    })
}

fn validate(problem: &ReductionProblem, policy: &PrecisionPolicy) -> Result<(), ReductionError> {
    let invalid = |what: String| {
        Err(ReductionError::InvalidProblem {
            label: problem.label.clone(),
            what,
        })
    };
    if problem.m < BigInt::one() {
        return invalid(format!("M = {} must be a positive integer", problem.m));
    }
    if problem.mu.is_empty() {
        return invalid("empty family".into());
    }
    if !problem.a.eval(64, policy)?.is_positive() {
        return invalid("A must be positive".into());
    }
    let b = problem.b.eval(64, policy)?;
    if b.certain_cmp(&Interval::from_i64(1, b.prec())) != Some(std::cmp::Ordering::Greater) {
        return invalid("B must exceed 1".into());
    }
    Ok(())
}

/// Raw enclosures of the constant and all axis entries at one precision.
struct Components {
    constant: (BigInt, BigInt),
    axes: Vec<Vec<(BigInt, BigInt)>>,
}

impl Components {
    fn evaluate(fam: &MuFamily, bits: u32) -> Result<Self, ReductionError> {
        let raw = |o: &RealOracle| -> Result<(BigInt, BigInt), ReductionError> {
            let iv = o.enclosure_at(bits)?;
            debug_assert_eq!(iv.prec(), bits);
            Ok((iv.lo_mantissa().clone(), iv.hi_mantissa().clone()))
        };
        let constant = raw(&fam.constant)?;
        let axes = fam
            .axes
            .iter()
            .map(|a| a.entries.par_iter().map(|(_, o)| raw(o)).collect())
            .collect::<Result<_, _>>()?;
        Ok(Components { constant, axes })
    }
}

/// `q x mod 1` as a fixed-point enclosure, or `None` when too wide.
fn frac_times(lo: &BigInt, hi: &BigInt, q: &BigInt, bits: u32) -> Option<(i128, i128)> {
    let (lo, hi) = (lo * q, hi * q);
    let k = floor_shr(&lo, bits);
    let base = &k << bits;
    let lo = floor_shr(&(lo - &base), bits - FRAC_BITS);
    let hi = ceil_shr(&(hi - &base), bits - FRAC_BITS);
    let lo = lo.to_i128()?;
    let hi = hi.to_i128()?;
    (hi - lo <= MAX_WIDTH).then_some((lo, hi))
}

/// Enclosure of `||x||` for a fixed-point enclosure `[lo, hi]` narrower than 1/2.
fn distance(lo: i128, hi: i128) -> (i128, i128) {
    let nearest = |x: i128| (x + HALF).div_euclid(ONE);
    let (z_lo, z_hi) = (nearest(lo), nearest(hi));
    if z_lo == z_hi {
        let (a, b) = (lo - z_lo * ONE, hi - z_lo * ONE);
        let d_lo = if a <= 0 && b >= 0 {
            0
        } else {
            a.abs().min(b.abs())
        };
        (d_lo, a.abs().max(b.abs()))
    } else {
        let d = (lo - z_lo * ONE).abs().min((hi - z_hi * ONE).abs());
        (d, HALF)
    }
}

#[derive(Clone, Debug)]
struct Best {
    eps_lo: i128,
    eps_hi: i128,
    index: u32,
}

impl Best {
    fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                let (keep, other) = if (b.eps_lo, b.index) < (a.eps_lo, a.index) {
                    (b, a)
                } else {
                    (a, b)
                };
                Some(Best {
                    eps_hi: keep.eps_hi.min(other.eps_hi),
                    ..keep
                })
            }
        }
    }
}

#[derive(Default)]
struct Pass {
    settled: usize,
    best: Option<Best>,
    nonpositive: Vec<u32>,
    undecided: Vec<u32>,
}

impl Pass {
    fn join(mut self, other: Pass) -> Pass {
        self.settled += other.settled;
        self.best = Best::merge(self.best, other.best);
        self.nonpositive.extend(other.nonpositive);
        self.undecided.extend(other.undecided);
        self
    }
}

fn classify(
    fam: &MuFamily,
    comps: &Components,
    tau: &RealOracle,
    q: &BigInt,
    m: &BigInt,
    bits: u32,
    members: &[u32],
) -> Result<Pass, ReductionError> {
    let all_undecided = || Pass {
        undecided: members.to_vec(),
        ..Pass::default()
    };
    // M ||q tau||
    let t = tau.enclosure_at(bits)?.mul_int(q);
    let mtq = match nearest_int_distance(&t) {
        Ok(d) => d.mul_int(m),
        Err(_) => return Ok(all_undecided()),
    };
    let mtq_lo = floor_shr(mtq.lo_mantissa(), bits - FRAC_BITS);
    let mtq_hi = ceil_shr(mtq.hi_mantissa(), bits - FRAC_BITS);
    if &mtq_hi - &mtq_lo > BigInt::from(MAX_WIDTH) {
        return Ok(all_undecided());
    }
    if mtq_lo >= BigInt::from(HALF) {
        return Ok(Pass {
            nonpositive: members.to_vec(),
            ..Pass::default()
        });
    }
    let mtq_lo = mtq_lo.to_i128().expect("bounded");
    let mtq_hi = mtq_hi.to_i128().expect("bounded");

    let Some(constant) = frac_times(&comps.constant.0, &comps.constant.1, q, bits) else {
        return Ok(all_undecided());
    };
    let mut axes = Vec::with_capacity(comps.axes.len());
    for (axis, raw) in fam.axes.iter().zip(&comps.axes) {
        let fracs: Option<Vec<(i128, i128)>> = raw
            .par_iter()
            .map(|(lo, hi)| {
                let (a, b) = frac_times(lo, hi, q, bits)?;
                Some(if axis.sign > 0 { (a, b) } else { (-b, -a) })
            })
            .collect();
        match fracs {
            Some(f) => axes.push(f),
            None => return Ok(all_undecided()),
        }
    }
    let radices: Vec<usize> = axes.iter().map(Vec::len).collect();

    let pass = members
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut pass = Pass::default();
            for &idx in chunk {
                let (mut lo, mut hi) = constant;
                let mut rest = idx as usize;
                for (k, axis) in axes.iter().enumerate().rev() {
                    let (a, b) = axis[rest % radices[k]];
                    rest /= radices[k];
                    lo += a;
                    hi += b;
                }
                if hi - lo >= HALF {
                    pass.undecided.push(idx);
                    continue;
                }
                let (d_lo, d_hi) = distance(lo, hi);
                let eps_lo = d_lo - mtq_hi;
                let eps_hi = d_hi - mtq_lo;
                if eps_lo > 0 {
                    pass.settled += 1;
                    pass.best = Best::merge(
                        pass.best.take(),
                        Some(Best {
                            eps_lo,
                            eps_hi,
                            index: idx,
                        }),
                    );
                } else if eps_hi <= 0 {
                    pass.nonpositive.push(idx);
                } else {
                    pass.undecided.push(idx);
                }
            }
            pass
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Pass::default(), Pass::join);
    Ok(pass)
}

fn group_outcome(
    problem: &ReductionProblem,
    convergent: Convergent,
    members: usize,
    best: &Best,
    policy: &PrecisionPolicy,
) -> Result<GroupOutcome, ReductionError> {
    // X = log(A q 2^F / eps_lo) / log B, using the certified lower bound of eps.
    let scaled_q = &convergent.q << FRAC_BITS;
    let ratio = problem
        .a
        .mul(&RealOracle::integer(scaled_q))
        .div(&RealOracle::integer(best.eps_lo))?
        .ln()?
        .div(&problem.b.ln()?)?;
    let x = ratio.eval(RATIO_BITS, policy)?;
    let ceil = x.ceil_hi();
    let w_bound = (ceil - 1i32).to_i64().expect("bound fits in i64");
    Ok(GroupOutcome {
        convergent,
        members,
        epsilon: Interval::from_mantissas(
            BigInt::from(best.eps_lo),
            BigInt::from(best.eps_hi),
            FRAC_BITS,
        ),
        argmin: problem.mu.describe(best.index as usize),
        log_ratio: x,
        w_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_cases() {
        let q = ONE / 4;
        assert_eq!(distance(q, q), (q, q));
        assert_eq!(distance(-q, -q), (q, q));
        assert_eq!(distance(-1, 1), (0, 1));
        assert_eq!(distance(3 * q, 3 * q + 1), (q - 1, q));
        // straddles 1/2
        assert_eq!(distance(HALF - 2, HALF + 1), (HALF - 2, HALF));
        assert_eq!(distance(5 * ONE + 1, 5 * ONE + 3), (1, 3));
    }

    #[test]
    fn frac_reduces_mod_one() {
        let bits = 200;
        let x = BigInt::from(7) << (bits - 2); // 1.75
        let (lo, hi) = frac_times(&x, &x, &BigInt::from(3), bits).unwrap();
        assert_eq!((lo, hi), (ONE / 4, ONE / 4)); // 5.25
        let neg = -x;
        let (lo, _) = frac_times(&neg, &neg, &BigInt::from(1), bits).unwrap();
        assert_eq!(lo, ONE / 4); // -1.75 = -2 + 0.25
    }
}
