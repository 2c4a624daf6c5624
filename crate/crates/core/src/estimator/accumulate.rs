use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{ConstantInterval, ConstantName, REPORT_DIGITS};
use crate::arith;
use crate::certified::{self, Enclosure};
use crate::error::{Error, Result};
use crate::graph::{obs2_applies, run_containing, ReductionTriple};
use crate::stats::{StatCache, StatKind};

/// Consecutive triples `(i, d, t)`, `t0 <= t < t1`, sharing one component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Run {
    pub i: u64,
    pub d: u64,
    pub t0: u64,
    pub t1: u64,
}

type Segments = BTreeMap<BigUint, (BigUint, BigRational)>;

/// Exact running sums for one statistic.
///
/// Coverage is tracked per block as disjoint `t`-intervals, so a triple
/// reached twice (directly and through a scaled image, or by two
/// images) counts once, and the sums do not depend on insertion order.
#[derive(Clone, Debug)]
pub struct BoundAccumulator {
    pub kind: StatKind,
    pub covered_mass: BigRational,
    pub low_sum: BigRational,
    pub high_sum: BigRational,
    pub origin_covered: bool,
    pub terms_evaluated: u64,
    pub terms_skipped: u64,
    blocks: HashMap<(u64, BigUint), Segments>,
    density: HashMap<u64, BigRational>,
}

fn ln2_hi() -> BigRational {
    certified::ln2().hi
}

fn to_big(x: u64) -> BigUint {
    BigUint::from(x)
}

impl BoundAccumulator {
    pub fn new(kind: StatKind) -> Self {
        BoundAccumulator {
            kind,
            covered_mass: BigRational::zero(),
            low_sum: BigRational::zero(),
            high_sum: BigRational::zero(),
            origin_covered: false,
            terms_evaluated: 0,
            terms_skipped: 0,
            blocks: HashMap::new(),
            density: HashMap::new(),
        }
    }

    fn density(&mut self, i: u64) -> BigRational {
        self.density
            .entry(i)
            .or_insert_with(|| {
                let (n, d) = arith::rough_density(i);
                BigRational::new(BigInt::from(n), BigInt::from(d))
            })
            .clone()
    }

    /// Term transform `(lo, hi)`: a clamped `ln` enclosure for ratio kinds,
    /// the value itself otherwise.
    fn transform(&self, value: &BigRational) -> (BigRational, BigRational) {
        if self.kind.is_ratio() {
            let Enclosure { lo, hi } = certified::ln(value);
            let cap = ln2_hi();
            let lo = if lo.is_zero() || lo < BigRational::zero() { BigRational::zero() } else { lo };
            (lo, hi.min(cap))
        } else {
            (value.clone(), value.clone())
        }
    }

    /// Covers `t` in `[t0, t1)` of block `(i, d)` with `value`, counting only
    /// the part not covered before.
    pub fn cover(&mut self, i: u64, d: &BigUint, t0: &BigUint, t1: &BigUint, value: &BigRational) -> Result<()> {
        if t0 >= t1 {
            return Ok(());
        }
        let key = (i, d.clone());
        let segs = self.blocks.entry(key).or_default();
        let mut gaps = Vec::new();
        let mut cursor = t0.clone();
        // the segment starting at or before t0 may reach into [t0, t1)
        let first = segs.range(..=t0.clone()).next_back().map(|(a, b)| (a.clone(), b.clone()));
        let later: Vec<_> = segs.range(t0.clone()..t1.clone()).map(|(a, b)| (a.clone(), b.clone())).collect();
        for (a, (b, v)) in first.into_iter().chain(later) {
            if b <= cursor {
                continue;
            }
            if v != *value {
                return Err(Error::invalid(format!(
                    "conflicting values {v} and {value} for block ({i}, {d}) near t = {a}"
                )));
            }
            if a > cursor {
                gaps.push((cursor.clone(), a.clone()));
            }
            if b > cursor {
                cursor = b;
            }
            if cursor >= *t1 {
                break;
            }
        }
        if cursor < *t1 {
            gaps.push((cursor, t1.clone()));
        }
        if gaps.is_empty() {
            return Ok(());
        }
        for (a, b) in &gaps {
            segs.insert(a.clone(), (b.clone(), value.clone()));
        }
        let rho = self.density(i);
        let (tlo, thi) = self.transform(value);
        for (a, b) in gaps {
            if i == 1 && a.is_one() {
                self.origin_covered = true;
            }
            let mass = &rho * BigRational::new(BigInt::from(&b - &a), BigInt::from(&a * &b));
            self.low_sum += &mass * &tlo;
            self.high_sum += &mass * &thi;
            self.covered_mass += mass;
        }
        Ok(())
    }

    /// Covers part `[t0, t1)` of `run` and credits the scaled
    /// images of the whole run for each prime in `primes`.
    fn cover_with_images(
        &mut self,
        run: &Run,
        t0: u64,
        t1: u64,
        value: &BigRational,
        primes: &[u64],
        jmax: u32,
    ) -> Result<()> {
        self.cover(run.i, &to_big(run.d), &to_big(t0), &to_big(t1), value)?;
        for &p in primes {
            let p = to_big(p);
            let mut scale = BigUint::one();
            for _ in 0..jmax {
                scale *= &p;
                let d = &scale * run.d;
                self.cover(run.i, &d, &(&scale * run.t0), &(&scale * run.t1), value)?;
            }
        }
        Ok(())
    }

    pub fn uncovered_mass(&self) -> BigRational {
        BigRational::one() - &self.covered_mass
    }
}

/// Primes `p <= i` for which the scaled images of `run` are valid.
fn image_primes(run: &Run) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for p in arith::primes_upto(run.i) {
        if obs2_applies(run.d, run.t0, p)? {
            out.push(p);
        }
    }
    Ok(out)
}

type Evaluated = Result<Option<(BigRational, Vec<u64>)>>;

fn evaluate(kind: StatKind, run: &Run, jmax: u32, cache: &StatCache) -> Evaluated {
    match cache.stat(kind, run.d, run.t0) {
        Ok(v) => {
            let primes = if jmax > 0 { image_primes(run)? } else { Vec::new() };
            Ok(Some((v.value, primes)))
        }
        Err(e) if e.is_budget() => {
            log::warn!("skipping run ({}, {}, {}..{}): {e}", run.i, run.d, run.t0, run.t1);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Evaluates `runs` (in parallel on the current rayon pool) and folds the
/// results in the given order.
pub fn accumulate_runs(kind: StatKind, runs: &[Run], obs2_jmax: u32, cache: &StatCache) -> Result<BoundAccumulator> {
    let values: Vec<Evaluated> = runs.par_iter().map(|r| evaluate(kind, r, obs2_jmax, cache)).collect();
    let mut acc = BoundAccumulator::new(kind);
    for (run, value) in runs.iter().zip(values) {
        match value? {
            Some((v, primes)) => {
                acc.terms_evaluated += 1;
                acc.cover_with_images(run, run.t0, run.t1, &v, &primes, obs2_jmax)?;
            }
            None => acc.terms_skipped += 1,
        }
    }
    Ok(acc)
}

/// Accumulates an arbitrary collection of triples. Adjacent triples of the
/// same run are grouped and evaluated once.
pub fn accumulate(
    kind: StatKind,
    triples: impl IntoIterator<Item = ReductionTriple>,
    obs2_jmax: u32,
    cache: &StatCache,
) -> Result<BoundAccumulator> {
    let mut pieces: Vec<(Run, u64, u64)> = Vec::new();
    for tr in triples {
        let tr = ReductionTriple::new(tr.i, tr.d, tr.t)?;
        let (t0, t1) = run_containing(&tr);
        let run = Run { i: tr.i, d: tr.d, t0, t1 };
        match pieces.last_mut() {
            Some((r, _, hi)) if *r == run && *hi == tr.t => *hi = tr.t + 1,
            _ => pieces.push((run, tr.t, tr.t + 1)),
        }
    }
    let values: Vec<Evaluated> = pieces
        .par_iter()
        .map(|(r, _, _)| evaluate(kind, r, obs2_jmax, cache))
        .collect();
    let mut acc = BoundAccumulator::new(kind);
    for ((run, lo, hi), value) in pieces.iter().zip(values) {
        match value? {
            Some((v, primes)) => {
                acc.terms_evaluated += 1;
                acc.cover_with_images(run, *lo, *hi, &v, &primes, obs2_jmax)?;
            }
            None => acc.terms_skipped += 1,
        }
    }
    Ok(acc)
}

/// Turns accumulated sums into an interval for `name`, filling uncovered
/// weight with the statistic's range: `[0, ln 2]` for the ratio kinds,
/// `[0, 1]` for `G`, and `[-1, 0]` for `V` (whose only positive value sits
/// at the origin triple, filled with `[-1, 1]` while uncovered).
pub fn bounds(acc: &BoundAccumulator, name: ConstantName, budget: &str, obs2_jmax: u32) -> ConstantInterval {
    assert_eq!(acc.kind, name.kind(), "accumulator kind does not match constant");
    let rest = acc.uncovered_mass();
    let (lo, hi) = match acc.kind {
        StatKind::G => (acc.low_sum.clone(), &acc.high_sum + &rest),
        StatKind::V => {
            let lo = &acc.low_sum - &rest;
            let hi = if acc.origin_covered {
                acc.high_sum.clone()
            } else {
                &acc.high_sum + BigRational::new(1.into(), 2.into())
            };
            (lo, hi)
        }
        _ => {
            let lo = certified::exp(&acc.low_sum).lo;
            let hi = certified::exp(&(&acc.high_sum + &rest * ln2_hi())).hi;
            (lo, hi)
        }
    };
    ConstantInterval {
        name,
        lo: certified::decimal_floor(&lo, REPORT_DIGITS),
        hi: certified::decimal_ceil(&hi, REPORT_DIGITS),
        digits: REPORT_DIGITS,
        covered_mass: acc.covered_mass.to_string(),
        budget: budget.to_string(),
        obs2_jmax,
        terms_evaluated: acc.terms_evaluated,
        terms_skipped: acc.terms_skipped,
        lo_exact: lo,
        hi_exact: hi,
        mass_exact: acc.covered_mass.clone(),
    }
}
