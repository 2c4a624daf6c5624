//! The six local statistics on anchor components.
//!
//! Each statistic compares the component `C` of `d` in `[d, t]` with what is
//! left after deleting the anchor (a disjoint union of smaller components):
//!
//! | kind | value                              | range      |
//! |------|------------------------------------|------------|
//! | `R`  | independent sets, ratio            | `[1, 2]`   |
//! | `S`  | maximum independent sets, ratio    | `[1, 2]`   |
//! | `W`  | maximal independent sets, ratio    | `[1, 2]`   |
//! | `H`  | GP-free subsets, ratio             | `[1, 2]`   |
//! | `G`  | largest GP-free subset, difference | `{0, 1}`   |
//! | `V`  | path cover number, difference      | `{-1,0,1}` |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::graph::{build_component, reduce, Component};
use crate::kernels::{
    count_independent_sets, count_maximal_independent_sets, gp_free_count, gp_free_max,
    max_independent_set, min_path_cover, KernelLimits,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatKind {
    R,
    S,
    W,
    H,
    G,
    V,
}

impl StatKind {
    pub const ALL: [StatKind; 6] = [
        StatKind::R,
        StatKind::S,
        StatKind::W,
        StatKind::H,
        StatKind::G,
        StatKind::V,
    ];

    pub fn code(self) -> &'static str {
        match self {
            StatKind::R => "r",
            StatKind::S => "s",
            StatKind::W => "w",
            StatKind::H => "h",
            StatKind::G => "g",
            StatKind::V => "v",
        }
    }

    /// Ratio statistics telescope into products, the others into sums.
    pub fn is_ratio(self) -> bool {
        matches!(self, StatKind::R | StatKind::S | StatKind::W | StatKind::H)
    }

    /// Closed range of admissible values.
    pub fn range(self) -> (BigRational, BigRational) {
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        match self {
            StatKind::G => (int(0), int(1)),
            StatKind::V => (int(-1), int(1)),
            _ => (int(1), int(2)),
        }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r" => Ok(StatKind::R),
            "s" => Ok(StatKind::S),
            "w" => Ok(StatKind::W),
            "h" => Ok(StatKind::H),
            "g" => Ok(StatKind::G),
            "v" => Ok(StatKind::V),
            _ => Err(Error::invalid(format!("unknown statistic kind '{s}'"))),
        }
    }
}

/// A statistic value; always an exact rational, integral for `G` and `V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatValue {
    pub kind: StatKind,
    pub value: BigRational,
}

impl StatValue {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value)
    }
}

impl fmt::Display for StatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Maximum independent set bookkeeping behind `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxSetDetail {
    pub size_with: usize,
    pub count_with: BigUint,
    pub size_without: usize,
    pub count_without: BigUint,
    pub value: BigRational,
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Evaluates `kind` directly on a component, without canonicalization.
pub fn evaluate(kind: StatKind, c: &Component, limits: &KernelLimits) -> Result<BigRational> {
    let parts = crate::graph::remove_anchor(c);
    let value = match kind {
        StatKind::R => {
            let top = count_independent_sets(&c.graph()?, limits)?.into_inner();
            let mut bottom = BigUint::one();
            for p in &parts {
                bottom *= count_independent_sets(&p.graph()?, limits)?.into_inner();
            }
            ratio(top, bottom)
        }
        StatKind::S => max_set_detail(c, &parts, limits)?.value,
        StatKind::W => {
            let top = count_maximal_independent_sets(&c.graph()?, limits)?.into_inner();
            let mut bottom = BigUint::one();
            for p in &parts {
                bottom *= count_maximal_independent_sets(&p.graph()?, limits)?.into_inner();
            }
            ratio(top, bottom)
        }
        StatKind::H => {
            let top = gp_free_count(c.vertices(), limits)?.into_inner();
            let bottom = gp_free_count(&c.vertices()[1..], limits)?.into_inner();
            ratio(top, bottom)
        }
        StatKind::G => {
            let top = gp_free_max(c.vertices(), limits)?;
            let bottom = gp_free_max(&c.vertices()[1..], limits)?;
            int(top as i64 - bottom as i64)
        }
        StatKind::V => {
            let top = min_path_cover(&c.graph()?, limits)?;
            let mut bottom = 0;
            for p in &parts {
                bottom += min_path_cover(&p.graph()?, limits)?;
            }
            int(top as i64 - bottom as i64)
        }
    };
    check_range(kind, c, &value)?;
    Ok(value)
}

fn max_set_detail(c: &Component, parts: &[Component], limits: &KernelLimits) -> Result<MaxSetDetail> {
    let with = max_independent_set(&c.graph()?, limits)?;
    let mut size_without = 0;
    let mut count_without = BigUint::one();
    for p in parts {
        let m = max_independent_set(&p.graph()?, limits)?;
        size_without += m.size;
        count_without *= m.count;
    }
    let value = ratio(with.count.clone(), count_without.clone());
    Ok(MaxSetDetail {
        size_with: with.size,
        count_with: with.count,
        size_without,
        count_without,
        value,
    })
}

fn check_range(kind: StatKind, c: &Component, value: &BigRational) -> Result<()> {
    let (lo, hi) = kind.range();
    let integral = matches!(kind, StatKind::G | StatKind::V);
    let isolated = c.len() == 1;
    let bad = *value < lo
        || *value > hi
        || (integral && !value.is_integer())
        || (kind == StatKind::V && value.is_one() && !isolated);
    if bad {
        let t = *c.vertices().last().expect("component is nonempty");
        return Err(Error::RangeViolation {
            kind: kind.code(),
            d: c.anchor(),
            t,
            value: value.to_string(),
        });
    }
    Ok(())
}

fn direct(kind: StatKind, d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    let c = build_component(d, t)?;
    Ok(StatValue {
        kind,
        value: evaluate(kind, &c, limits)?,
    })
}

/// Independent-set ratio on the component of `d` in `[d, t]`.
pub fn stat_r(d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    direct(StatKind::R, d, t, limits)
}

/// Ratio of maximum independent set counts, taken at the respective maxima.
pub fn stat_s(d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    direct(StatKind::S, d, t, limits)
}

/// `stat_s` together with both independence numbers and counts.
pub fn stat_s_detail(d: u64, t: u64, limits: &KernelLimits) -> Result<MaxSetDetail> {
    let c = build_component(d, t)?;
    let parts = crate::graph::remove_anchor(&c);
    let detail = max_set_detail(&c, &parts, limits)?;
    check_range(StatKind::S, &c, &detail.value)?;
    Ok(detail)
}

/// Maximal independent set ratio.
pub fn stat_w(d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    direct(StatKind::W, d, t, limits)
}

/// GP-free subset ratio.
pub fn stat_h(d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    direct(StatKind::H, d, t, limits)
}

/// Growth of the largest GP-free subset when the anchor is added.
pub fn stat_g(d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    direct(StatKind::G, d, t, limits)
}

/// Change in path cover number when the anchor is added.
pub fn stat_v(d: u64, t: u64, limits: &KernelLimits) -> Result<StatValue> {
    direct(StatKind::V, d, t, limits)
}

/// Key under which a statistic is memoized: the kind and a canonical triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermKey {
    pub kind: StatKind,
    pub i: u64,
    pub d: u64,
    pub t: u64,
}

/// Smallest representative `(i, d, t)` of the class of the component of `d`
/// in `[d, t]`.
///
/// After the canonical reduction, `t` is lowered to the start of its run
/// (the component only contains `i`-smooth numbers) and any prime `p` that
/// divides every vertex is divided out.
pub fn canonical(d: u64, t: u64) -> Result<(u64, u64, u64)> {
    let mut tr = reduce(d, t)?;
    loop {
        let t0 = crate::graph::run_containing(&tr).0;
        let c = build_component(tr.d, t0)?;
        let common = arith::primes_upto(tr.i)
            .into_iter()
            .find(|&p| tr.d % p == 0 && c.vertices().iter().all(|v| v % p == 0));
        match common {
            Some(p) => tr = reduce(tr.d / p, t0 / p)?,
            None => return Ok((tr.i, tr.d, t0)),
        }
    }
}

type Sink = Box<dyn Fn(&TermKey, &BigRational) -> Result<()> + Send + Sync>;

/// Thread-safe memo of statistic values keyed by canonical triple, with an
/// optional sink that sees every freshly computed value.
pub struct StatCache {
    limits: KernelLimits,
    map: RwLock<HashMap<TermKey, BigRational>>,
    sink: Mutex<Option<Sink>>,
    computed: std::sync::atomic::AtomicU64,
}

impl Default for StatCache {
    fn default() -> Self {
        StatCache::new(KernelLimits::default())
    }
}

impl fmt::Debug for StatCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StatCache")
            .field("limits", &self.limits)
            .field("entries", &self.len())
            .finish()
    }
}

impl StatCache {
    pub fn new(limits: KernelLimits) -> Self {
        StatCache {
            limits,
            map: RwLock::new(HashMap::new()),
            sink: Mutex::new(None),
            computed: Default::default(),
        }
    }

    pub fn limits(&self) -> &KernelLimits {
        &self.limits
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of values computed (not served from memory) so far.
    pub fn computed(&self) -> u64 {
        self.computed.load(std::sync::atomic::Ordering::Relaxed)
    }

    pub fn get(&self, key: &TermKey) -> Option<BigRational> {
        self.map.read().expect("cache lock").get(key).cloned()
    }

    /// Seeds a value, for instance from a persisted cache. A conflicting
    /// value already present is an error.
    pub fn seed(&self, key: TermKey, value: BigRational) -> std::result::Result<(), BigRational> {
        let mut map = self.map.write().expect("cache lock");
        match map.get(&key) {
            Some(old) if *old != value => Err(old.clone()),
            _ => {
                map.insert(key, value);
                Ok(())
            }
        }
    }

    pub fn set_sink(&self, sink: Sink) {
        *self.sink.lock().expect("sink lock") = Some(sink);
    }

    /// Memoized statistic of the component of `d` in `[d, t]`.
    pub fn stat(&self, kind: StatKind, d: u64, t: u64) -> Result<StatValue> {
        let (i, d, t) = canonical(d, t)?;
        let key = TermKey { kind, i, d, t };
        if let Some(value) = self.get(&key) {
            return Ok(StatValue { kind, value });
        }
        let value = direct(kind, d, t, &self.limits)?.value;
        self.computed.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let fresh = self.map.write().expect("cache lock").insert(key, value.clone()).is_none();
        if fresh {
            if let Some(sink) = self.sink.lock().expect("sink lock").as_ref() {
                sink(&key, &value)?;
            }
        }
        Ok(StatValue { kind, value })
    }
}

/// Memoized statistic through a shared cache.
pub fn stat(kind: StatKind, d: u64, t: u64, cache: &StatCache) -> Result<StatValue> {
    cache.stat(kind, d, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> KernelLimits {
        KernelLimits::default()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn r_examples() {
        assert_eq!(stat_r(1, 1, &lim()).unwrap().value, q(2, 1));
        assert_eq!(stat_r(1, 2, &lim()).unwrap().value, q(3, 2));
        assert_eq!(stat_r(2, 9, &lim()).unwrap().value, q(6, 5));
    }

    #[test]
    fn s_examples() {
        assert_eq!(stat_s(1, 1, &lim()).unwrap().value, q(1, 1));
        // {1},{2} against {2}
        assert_eq!(stat_s(1, 2, &lim()).unwrap().value, q(2, 1));
        // {2},{4} against {4}
        assert_eq!(stat_s(2, 4, &lim()).unwrap().value, q(2, 1));
        let det = stat_s_detail(2, 9, &lim()).unwrap();
        assert_eq!((det.size_with, det.size_without), (3, 3));
    }

    #[test]
    fn w_examples() {
        assert_eq!(stat_w(1, 1, &lim()).unwrap().value, q(1, 1));
        assert_eq!(stat_w(1, 2, &lim()).unwrap().value, q(2, 1));
        assert_eq!(stat_w(2, 5, &lim()).unwrap().value, q(2, 1));
    }

    #[test]
    fn h_examples() {
        assert_eq!(stat_h(1, 1, &lim()).unwrap().value, q(2, 1));
        assert_eq!(stat_h(1, 4, &lim()).unwrap().value, q(7, 4));
        assert_eq!(stat_h(2, 9, &lim()).unwrap().value, q(7, 4));
    }

    #[test]
    fn g_examples() {
        assert_eq!(stat_g(1, 1, &lim()).unwrap().value, q(1, 1));
        assert_eq!(stat_g(1, 4, &lim()).unwrap().value, q(0, 1));
        assert_eq!(stat_g(5, 9, &lim()).unwrap().value, q(1, 1));
    }

    #[test]
    fn v_examples() {
        assert_eq!(stat_v(1, 1, &lim()).unwrap().value, q(1, 1));
        assert_eq!(stat_v(1, 2, &lim()).unwrap().value, q(0, 1));
        assert_eq!(stat_v(6, 50, &lim()).unwrap().value, q(-1, 1));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical(2, 4).unwrap(), (2, 1, 2));
        assert_eq!(canonical(2, 5).unwrap(), (2, 1, 2));
        assert_eq!(canonical(7, 7).unwrap(), (1, 1, 1));
        assert_eq!(canonical(10, 35).unwrap(), (3, 2, 6));
    }

    #[test]
    fn dispatch_uses_observations() {
        let cache = StatCache::default();
        assert_eq!(cache.stat(StatKind::R, 2, 4).unwrap().value, q(3, 2));
        assert_eq!(cache.stat(StatKind::R, 2, 5).unwrap().value, q(3, 2));
        assert_eq!(cache.stat(StatKind::R, 1, 2).unwrap().value, q(3, 2));
        assert_eq!(cache.computed(), 1);
        assert_eq!(cache.stat(StatKind::V, 1, 1).unwrap().value, q(1, 1));
    }

    #[test]
    fn seed_rejects_conflict() {
        let cache = StatCache::default();
        let key = TermKey { kind: StatKind::R, i: 1, d: 1, t: 1 };
        cache.seed(key, q(2, 1)).unwrap();
        assert!(cache.seed(key, q(2, 1)).is_ok());
        assert!(cache.seed(key, q(3, 2)).is_err());
    }

    #[test]
    fn kinds_round_trip() {
        for k in StatKind::ALL {
            assert_eq!(k.code().parse::<StatKind>().unwrap(), k);
        }
        assert!("x".parse::<StatKind>().is_err());
    }
}
