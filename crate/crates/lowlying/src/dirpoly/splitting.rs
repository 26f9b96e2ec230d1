//! Witness search for the block-splitting dichotomy: an admissible dyadic
//! tuple either has a sub-product landing in the window (N^lo, N^hi], or all
//! but two of its blocks multiply to at most the case-B bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{theta_k, CoefKind, DyadicTuple};
use crate::error::{Error, Result};

/// Outcome of the splitting search. Indices refer to tuple slots.
///
/// `CaseA`: the named slots multiply into the window (N^lo, N^hi].
/// `CaseB`: every slot outside the named pair multiplies to ≤ N^case_b.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SplitWitness {
    CaseA { subset: Vec<usize> },
    CaseB { pair: (usize, usize) },
}

/// Window exponents (lo, hi, case_b) for the given mode. Maass mode
/// (`holo_weight = None`) uses lo = 3/4 + ε/100, hi = 9/8 − ε/100 and the
/// case-B bound hi; weight-k mode uses lo = (4k−2)/(5k−2) + ε/100,
/// hi = Θ_k − lo and the stricter case-B bound lo. At k = 2 the two modes
/// agree on (lo, hi).
pub fn split_window(epsilon: f64, holo_weight: Option<u32>) -> Result<(f64, f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must be positive")));
    }
    match holo_weight {
        None => {
            let lo = 0.75 + epsilon / 100.0;
            let hi = 1.125 - epsilon / 100.0;
            Ok((lo, hi, hi))
        }
        Some(k) => {
            let theta = theta_k(k)?;
            let kf = f64::from(k);
            let lo = (4.0 * kf - 2.0) / (5.0 * kf - 2.0) + epsilon / 100.0;
            let hi = theta - lo;
            Ok((lo, hi, lo))
        }
    }
}

struct Window {
    lo_ln: f64,
    hi_ln: f64,
    case_b_ln: f64,
}

fn window(t: &DyadicTuple, holo_weight: Option<u32>) -> Result<Window> {
    let (lo, hi, case_b) = split_window(t.epsilon, holo_weight)?;
    let l = t.scale.ln();
    Ok(Window {
        lo_ln: lo * l,
        hi_ln: hi * l,
        case_b_ln: case_b * l,
    })
}

fn budget_exponent(t: &DyadicTuple, holo_weight: Option<u32>) -> Result<f64> {
    Ok(match holo_weight {
        None => 15.0 / 8.0 - t.epsilon,
        Some(k) => theta_k(k)? - t.epsilon,
    })
}

/// Splitting witness under the Maass product budget Π N_j ≤ N^(15/8 − ε).
/// Always succeeds on admissible input: if three blocks each overshoot the
/// window, the product already exceeds N^(15/8 − ε/20).
pub fn splitting_witness(t: &DyadicTuple) -> Result<SplitWitness> {
    let w = window(t, None)?;
    check_budget(t, None)?;
    let witness = search(t, &w)?;
    witness.validate(t, None)?;
    Ok(witness)
}

/// Splitting witness under the weight-k budget Π N_j ≤ N^(Θ_k − ε); k must
/// be even and at least 2. The no-witness chain closes the same way:
/// 3·hi − 2·lo = Θ_k − ε/20 exactly.
pub fn splitting_witness_holo(t: &DyadicTuple, k: u32) -> Result<SplitWitness> {
    let w = window(t, Some(k))?;
    check_budget(t, Some(k))?;
    let witness = search(t, &w)?;
    witness.validate(t, Some(k))?;
    Ok(witness)
}

fn check_budget(t: &DyadicTuple, holo_weight: Option<u32>) -> Result<()> {
    let budget = budget_exponent(t, holo_weight)?;
    if t.product_ln() > budget * t.scale.ln() + 1e-9 {
        return Err(Error::Invariant(format!(
            "block-size product exceeds N^{budget:.6}"
        )));
    }
    Ok(())
}

fn search(t: &DyadicTuple, w: &Window) -> Result<SplitWitness> {
    let ln_sizes = t.ln_sizes();
    let mut order: Vec<usize> = (0..ln_sizes.len()).collect();
    order.sort_by(|&a, &b| ln_sizes[a].total_cmp(&ln_sizes[b]));

    // Absorb blocks smallest-first while the running product stays ≤ N^lo.
    // Anything rejected here keeps overshooting later: the running product
    // only grows, so each rejected block satisfies absorbed + ln N_j > lo
    // at the end as well.
    let mut in_set = vec![false; ln_sizes.len()];
    let mut absorbed = 0.0_f64;
    let mut rejected: Vec<usize> = Vec::new();
    for &j in &order {
        if absorbed + ln_sizes[j] <= w.lo_ln {
            absorbed += ln_sizes[j];
            in_set[j] = true;
        } else {
            rejected.push(j);
        }
    }

    // Any rejected block that lands the product inside (lo, hi] settles
    // case A; smallest candidates are tried first.
    for &j in &rejected {
        let landed = absorbed + ln_sizes[j];
        if landed <= w.hi_ln {
            in_set[j] = true;
            let subset = shed_small_blocks(&ln_sizes, in_set, landed, w.hi_ln);
            return Ok(SplitWitness::CaseA { subset });
        }
    }

    // Every rejected block overshoots hi. With at most two of them, the
    // remaining product is the absorbed mass, which sits under N^lo and a
    // fortiori under the case-B bound.
    match rejected.len() {
        0 => Ok(SplitWitness::CaseB { pair: (0, 1) }),
        1 => {
            let j = rejected[0];
            let other = if j == 0 { 1 } else { 0 };
            Ok(SplitWitness::CaseB { pair: (j, other) })
        }
        2 => Ok(SplitWitness::CaseB {
            pair: (rejected[0], rejected[1]),
        }),
        _ => Err(Error::NoWitness(
            "three blocks overshoot the window; the tuple cannot be admissible".into(),
        )),
    }
}

/// Drop sub-unit blocks (padding and other N_j < 1) from a case-A subset
/// while the product stays inside the window. Removal only raises the
/// product, so the lower edge stays safe.
fn shed_small_blocks(ln_sizes: &[f64], mut in_set: Vec<bool>, mut product: f64, hi_ln: f64) -> Vec<usize> {
    for j in 0..ln_sizes.len() {
        if in_set[j] && ln_sizes[j] < 0.0 && product - ln_sizes[j] <= hi_ln {
            in_set[j] = false;
            product -= ln_sizes[j];
        }
    }
    (0..ln_sizes.len()).filter(|&j| in_set[j]).collect()
}

impl SplitWitness {
    /// Check the witness against the tuple it was produced for. `holo_weight`
    /// selects the window, as in the search functions.
    pub fn validate(&self, t: &DyadicTuple, holo_weight: Option<u32>) -> Result<()> {
        let w = window(t, holo_weight)?;
        let ln_sizes = t.ln_sizes();
        let tol = 1e-9 * t.scale.ln().max(1.0);
        match self {
            SplitWitness::CaseA { subset } => {
                let mut seen = vec![false; ln_sizes.len()];
                let mut sum = 0.0;
                for &j in subset {
                    if j >= ln_sizes.len() || seen[j] {
                        return Err(Error::Invariant(format!(
                            "case-A subset has a bad or repeated slot index {j}"
                        )));
                    }
                    seen[j] = true;
                    sum += ln_sizes[j];
                }
                if !(sum > w.lo_ln - tol) || sum > w.hi_ln + tol {
                    return Err(Error::Invariant(format!(
                        "case-A product exponent {:.6} falls outside ({:.6}, {:.6}]",
                        sum / t.scale.ln(),
                        w.lo_ln / t.scale.ln(),
                        w.hi_ln / t.scale.ln()
                    )));
                }
                Ok(())
            }
            SplitWitness::CaseB { pair: (j1, j2) } => {
                if j1 == j2 || *j1 >= ln_sizes.len() || *j2 >= ln_sizes.len() {
                    return Err(Error::Invariant(format!(
                        "case-B pair ({j1}, {j2}) is not two distinct slots"
                    )));
                }
                let rest = t.product_ln() - ln_sizes[*j1] - ln_sizes[*j2];
                if rest > w.case_b_ln + tol {
                    return Err(Error::Invariant(format!(
                        "case-B remainder exponent {:.6} exceeds {:.6}",
                        rest / t.scale.ln(),
                        w.case_b_ln / t.scale.ln()
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Tallies from a sweep of witness searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SplitSweepSummary {
    pub tuples_checked: u64,
    pub case_a: u64,
    pub case_b: u64,
    pub failures: u64,
}

impl SplitSweepSummary {
    fn absorb(&mut self, other: SplitSweepSummary) {
        self.tuples_checked += other.tuples_checked;
        self.case_a += other.case_a;
        self.case_b += other.case_b;
        self.failures += other.failures;
    }

    fn record(&mut self, built: Result<DyadicTuple>, holo_weight: Option<u32>) {
        self.tuples_checked += 1;
        let witness = built.and_then(|t| match holo_weight {
            None => splitting_witness(&t),
            Some(k) => splitting_witness_holo(&t, k),
        });
        // an Ok witness has already passed validation inside the search
        match witness {
            Ok(SplitWitness::CaseA { .. }) => self.case_a += 1,
            Ok(SplitWitness::CaseB { .. }) => self.case_b += 1,
            Err(_) => self.failures += 1,
        }
    }
}

fn build_tuple(
    active: &[(f64, CoefKind)],
    epsilon: f64,
    scale: f64,
    holo_weight: Option<u32>,
) -> Result<DyadicTuple> {
    match holo_weight {
        None => DyadicTuple::new(active, epsilon, scale),
        Some(k) => DyadicTuple::new_holo(active, k, epsilon, scale),
    }
}

/// Run the witness search on every tuple whose active exponents are
/// positive multiples of 1/`grid`, taken in nondecreasing order, with at
/// most `max_active` slots and total exponent inside the product budget.
/// The empty tuple is included. A failure is any tuple the search could
/// not handle; on admissible input the count must come back zero.
pub fn grid_split_sweep(
    grid: u32,
    epsilon: f64,
    holo_weight: Option<u32>,
    max_active: usize,
    scale: f64,
) -> Result<SplitSweepSummary> {
    if grid == 0 || grid > 100 {
        return Err(Error::Budget(format!(
            "grid denominator {grid} outside 1..=100"
        )));
    }
    if max_active == 0 || max_active > 5 {
        return Err(Error::Budget(format!(
            "active-slot cap {max_active} outside 1..=5"
        )));
    }
    // building the empty tuple doubles as the epsilon/scale argument check
    let empty = build_tuple(&[], epsilon, scale, holo_weight)?;
    let budget = budget_exponent(&empty, holo_weight)?;
    let mut summary = SplitSweepSummary::default();
    summary.record(Ok(empty), holo_weight);

    let s_cap = (budget * f64::from(grid)).floor() as u32;
    let per_first: Vec<SplitSweepSummary> = (1..=s_cap)
        .into_par_iter()
        .map(|first| {
            let mut acc = SplitSweepSummary::default();
            let mut parts = vec![first];
            grid_walk(
                &mut parts,
                s_cap - first,
                grid,
                epsilon,
                holo_weight,
                max_active,
                scale,
                &mut acc,
            );
            acc
        })
        .collect();
    for p in per_first {
        summary.absorb(p);
    }
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
fn grid_walk(
    parts: &mut Vec<u32>,
    room: u32,
    grid: u32,
    epsilon: f64,
    holo_weight: Option<u32>,
    max_active: usize,
    scale: f64,
    acc: &mut SplitSweepSummary,
) {
    let active: Vec<(f64, CoefKind)> = parts
        .iter()
        .map(|&p| (scale.powf(f64::from(p) / f64::from(grid)), CoefKind::One))
        .collect();
    acc.record(build_tuple(&active, epsilon, scale, holo_weight), holo_weight);
    if parts.len() < max_active {
        let lo = *parts.last().unwrap();
        for next in lo..=room {
            parts.push(next);
            grid_walk(
                parts,
                room - next,
                grid,
                epsilon,
                holo_weight,
                max_active,
                scale,
                acc,
            );
            parts.pop();
        }
    }
}

/// Run the witness search on `count` seeded random admissible tuples: up
/// to six active exponents drawn sequentially from the remaining budget on
/// a 1/200 grid, coefficient kinds mixed, Moebius kept clear of its size
/// cutoff. Reproducible for a fixed seed.
pub fn random_split_sweep(
    count: u64,
    seed: u64,
    epsilon: f64,
    holo_weight: Option<u32>,
    scale: f64,
) -> Result<SplitSweepSummary> {
    if count > 1_000_000 {
        return Err(Error::Budget(format!("trial count {count} exceeds 1e6")));
    }
    let probe = build_tuple(&[], epsilon, scale, holo_weight)?;
    let budget = budget_exponent(&probe, holo_weight)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = SplitSweepSummary::default();
    for _ in 0..count {
        let m = rng.gen_range(0..=6usize);
        let mut remaining = budget;
        let mut active: Vec<(f64, CoefKind)> = Vec::new();
        for _ in 0..m {
            let cap = (remaining * 200.0).floor().max(0.0) as u64;
            let e = rng.gen_range(0..=cap) as f64 / 200.0;
            remaining -= e;
            let kind = if e > 0.095 {
                [CoefKind::One, CoefKind::Log][rng.gen_range(0..2)]
            } else {
                [CoefKind::One, CoefKind::Log, CoefKind::Moebius][rng.gen_range(0..3)]
            };
            active.push((scale.powf(e), kind));
        }
        summary.record(build_tuple(&active, epsilon, scale, holo_weight), holo_weight);
    }
    Ok(summary)
}
