//! Certified intervals for the limiting constants.
//!
//! Each constant is a weighted mean of one local statistic over all
//! canonical triples: `log alpha = sum weight(i,d,t) * ln r(d,t)` and so on,
//! with weights summing to one. A budget selects finitely many blocks
//! `(i, d)`; the statistic is evaluated once per run of each block and the
//! weight of everything not covered is filled with the statistic's range.

mod accumulate;
pub mod cache;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::graph::{block_runs, ReductionTriple};
use crate::stats::{StatCache, StatKind};

pub use accumulate::{accumulate, accumulate_runs, bounds, BoundAccumulator, Run};

/// Scaled images `(p^j d, p^j t)` credited per applicable prime by default.
pub const DEFAULT_OBS2_JMAX: u32 = 40;

/// Decimal digits in reported bounds.
pub const REPORT_DIGITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantName {
    Alpha,
    Beta,
    Eta,
    Theta,
    B,
    C,
}

impl ConstantName {
    pub const ALL: [ConstantName; 6] = [
        ConstantName::Alpha,
        ConstantName::Beta,
        ConstantName::Eta,
        ConstantName::Theta,
        ConstantName::B,
        ConstantName::C,
    ];

    /// Statistic whose weighted mean gives the constant.
    pub fn kind(self) -> StatKind {
        match self {
            ConstantName::Alpha => StatKind::R,
            ConstantName::Beta => StatKind::S,
            ConstantName::Eta => StatKind::W,
            ConstantName::Theta => StatKind::H,
            ConstantName::B => StatKind::G,
            ConstantName::C => StatKind::V,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstantName::Alpha => "alpha",
            ConstantName::Beta => "beta",
            ConstantName::Eta => "eta",
            ConstantName::Theta => "theta",
            ConstantName::B => "b",
            ConstantName::C => "c",
        }
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstantName::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown constant '{s}'")))
    }
}

/// Exact weight of a triple: `prod_{p <= i} (1 - 1/p) / (t (t + 1))`.
pub fn weight(i: u64, d: u64, t: u64) -> Result<BigRational> {
    let triple = ReductionTriple::new(i, d, t)?;
    let (num, den) = arith::rough_density(triple.i);
    let t = BigUint::from(triple.t);
    let den = BigUint::from(den) * &t * (t + 1u32);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Extra blocks beyond the product bound: every `d <= d_max` for `i` in
/// `i_lo..=i_hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRule {
    pub i_lo: u64,
    pub i_hi: u64,
    pub d_max: u64,
}

/// Which blocks `(i, d)` to evaluate: all with `d * i^5 <= product`, plus
/// those admitted by any rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub product: u64,
    pub rules: Vec<BlockRule>,
}

impl BudgetSpec {
    pub fn product(product: u64) -> Self {
        BudgetSpec {
            product,
            rules: Vec::new(),
        }
    }

    pub fn with_rule(mut self, i_lo: u64, i_hi: u64, d_max: u64) -> Self {
        self.rules.push(BlockRule { i_lo, i_hi, d_max });
        self
    }

    /// Largest admitted `d` for a given `i` (0 if none).
    pub fn d_max(&self, i: u64) -> u64 {
        let by_product = match (i as u128).checked_pow(5) {
            Some(p5) if p5 <= self.product as u128 => (self.product as u128 / p5) as u64,
            _ => 0,
        };
        self.rules
            .iter()
            .filter(|r| r.i_lo <= i && i <= r.i_hi)
            .map(|r| r.d_max)
            .fold(by_product, u64::max)
    }

    fn i_max(&self) -> u64 {
        let by_product = arith::iroot(self.product, 5);
        self.rules.iter().map(|r| r.i_hi).fold(by_product, u64::max)
    }

    pub fn admits(&self, i: u64, d: u64) -> bool {
        d <= self.d_max(i)
    }
}

impl fmt::Display for BudgetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d*i^5<={}", self.product)?;
        for r in &self.rules {
            if r.i_lo == r.i_hi {
                write!(f, ";i={}:d<={}", r.i_lo, r.d_max)?;
            } else {
                write!(f, ";i={}..{}:d<={}", r.i_lo, r.i_hi, r.d_max)?;
            }
        }
        Ok(())
    }
}

/// Named budgets for long reproduction runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Desk,
    PaperAlpha,
    PaperEta,
    PaperTheta,
    PaperC,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Desk,
        Preset::PaperAlpha,
        Preset::PaperEta,
        Preset::PaperTheta,
        Preset::PaperC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::PaperAlpha => "paper-alpha",
            Preset::PaperEta => "paper-eta",
            Preset::PaperTheta => "paper-theta",
            Preset::PaperC => "paper-c",
        }
    }

    pub fn budget(self) -> BudgetSpec {
        const E8: u64 = 100_000_000;
        match self {
            Preset::Desk => BudgetSpec::product(1_000_000),
            Preset::PaperAlpha => BudgetSpec::product(E8)
                .with_rule(5, 5, 11_249_999)
                .with_rule(6, 6, 2_399_999)
                .with_rule(7, 7, 27_439),
            Preset::PaperEta => {
                let table: [(u64, u64, u64); 26] = [
                    (5, 5, 3_600_000),
                    (6, 6, 1_000_000),
                    (7, 7, 32_000),
                    (8, 8, 6_400),
                    (9, 9, 2_160),
                    (10, 10, 1_176),
                    (11, 11, 625),
                    (12, 12, 405),
                    (13, 13, 270),
                    (14, 14, 189),
                    (15, 15, 169),
                    (16, 16, 160),
                    (17, 17, 119),
                    (18, 18, 112),
                    (19, 19, 88),
                    (20, 20, 44),
                    (21, 26, 30),
                    (27, 30, 25),
                    (31, 35, 14),
                    (36, 40, 11),
                    (41, 50, 10),
                    (51, 60, 9),
                    (61, 70, 8),
                    (71, 80, 7),
                    (81, 90, 6),
                    (91, 100, 5),
                ];
                let mut b = BudgetSpec::product(0);
                for i in 1..=4 {
                    b = b.with_rule(i, i, E8 / i.pow(5));
                }
                table.iter().fold(b, |b, &(lo, hi, d)| b.with_rule(lo, hi, d))
            }
            Preset::PaperTheta => {
                let table: [(u64, u64, u64); 12] = [
                    (12, 12, 6_144),
                    (13, 15, 1_536),
                    (16, 20, 1_152),
                    (21, 24, 256),
                    (25, 25, 150),
                    (26, 30, 16),
                    (31, 40, 12),
                    (41, 55, 8),
                    (56, 60, 7),
                    (61, 75, 4),
                    (76, 100, 3),
                    (101, 250, 1),
                ];
                let mut b = BudgetSpec::product(0);
                for i in 1..=11 {
                    b = b.with_rule(i, i, E8 / i.pow(5));
                }
                table.iter().fold(b, |b, &(lo, hi, d)| b.with_rule(lo, hi, d))
            }
            Preset::PaperC => {
                let table: [(u64, u64, u64); 10] = [
                    (6, 6, 10_000),
                    (7, 7, 120),
                    (8, 8, 36),
                    (9, 9, 32),
                    (10, 10, 14),
                    (11, 11, 12),
                    (12, 12, 8),
                    (13, 13, 8),
                    (14, 14, 7),
                    (15, 18, 6),
                ];
                let mut b = BudgetSpec::product(0);
                for i in 1..=5 {
                    b = b.with_rule(i, i, E8 / i.pow(5));
                }
                table.iter().fold(b, |b, &(lo, hi, d)| b.with_rule(lo, hi, d))
            }
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown preset '{s}'")))
    }
}

/// A block `(i, d)`: the triples `(i, d, t)` for `t` in `[i*d, (i+1)*d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub i: u64,
    pub d: u64,
}

impl Block {
    /// `d * i^5`, the scheduling key.
    pub fn cost(&self) -> u128 {
        self.d as u128 * (self.i as u128).pow(5)
    }

    pub fn runs(&self) -> Vec<Run> {
        block_runs(self.i, self.d)
            .into_iter()
            .map(|(t0, t1)| Run {
                i: self.i,
                d: self.d,
                t0,
                t1,
            })
            .collect()
    }

    pub fn triples(&self) -> impl Iterator<Item = ReductionTriple> {
        let Block { i, d } = *self;
        (i * d..(i + 1) * d).map(move |t| ReductionTriple { i, d, t })
    }
}

/// Admitted blocks in increasing `d * i^5`, ties by `i` then `d`.
pub fn schedule_blocks(budget: &BudgetSpec) -> Vec<Block> {
    let mut blocks = Vec::new();
    for i in 1..=budget.i_max() {
        let d_max = budget.d_max(i);
        if d_max == 0 {
            continue;
        }
        for d in arith::smooth_in_range(1, d_max, i) {
            blocks.push(Block { i, d });
        }
    }
    blocks.sort_by_key(|b| (b.cost(), b.i, b.d));
    blocks
}

/// All admitted triples, block by block in schedule order, `t` ascending.
pub fn schedule(budget: &BudgetSpec) -> impl Iterator<Item = ReductionTriple> {
    schedule_blocks(budget).into_iter().flat_map(|b| b.triples())
}

/// A certified interval for one constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantInterval {
    pub name: ConstantName,
    /// Lower bound rounded down to `digits` decimals.
    pub lo: String,
    /// Upper bound rounded up to `digits` decimals.
    pub hi: String,
    pub digits: u32,
    /// Exact weight of the covered triples, as `p/q`.
    pub covered_mass: String,
    pub budget: String,
    pub obs2_jmax: u32,
    /// Statistic evaluations, one per run.
    pub terms_evaluated: u64,
    /// Runs left out because a kernel hit its resource guard.
    pub terms_skipped: u64,
    #[serde(skip)]
    pub lo_exact: BigRational,
    #[serde(skip)]
    pub hi_exact: BigRational,
    #[serde(skip)]
    pub mass_exact: BigRational,
}

impl ConstantInterval {
    /// `lo` as an `f64` that is guaranteed not to exceed the true bound.
    pub fn lo_f64(&self) -> f64 {
        let x: f64 = self.lo.parse().expect("decimal string");
        x.next_down()
    }

    /// `hi` as an `f64` that is guaranteed not to fall below the true bound.
    pub fn hi_f64(&self) -> f64 {
        let x: f64 = self.hi.parse().expect("decimal string");
        x.next_up()
    }

    /// Whether `[lo, hi]` meets the closed interval `[a, b]`.
    pub fn intersects(&self, a: f64, b: f64) -> bool {
        self.lo_f64() <= b && a <= self.hi_f64()
    }
}

/// Estimates a constant with the given budget, reading and extending an
/// optional term cache file.
pub fn estimate_constant(
    name: ConstantName,
    budget: &BudgetSpec,
    obs2_jmax: u32,
    cache_path: Option<&Path>,
) -> Result<ConstantInterval> {
    let cache = StatCache::default();
    if let Some(path) = cache_path {
        cache::attach(&cache, path)?;
    }
    estimate_with(name, budget, obs2_jmax, &cache)
}

/// Like [`estimate_constant`] with a caller-provided statistic cache.
pub fn estimate_with(
    name: ConstantName,
    budget: &BudgetSpec,
    obs2_jmax: u32,
    cache: &StatCache,
) -> Result<ConstantInterval> {
    let runs: Vec<Run> = schedule_blocks(budget).iter().flat_map(|b| b.runs()).collect();
    log::info!("{name}: {} runs under {budget}", runs.len());
    let acc = accumulate_runs(name.kind(), &runs, obs2_jmax, cache)?;
    Ok(bounds(&acc, name, &budget.to_string(), obs2_jmax))
}
