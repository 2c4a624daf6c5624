use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use divgraph::analysis::{binary_entropy, entropy_inverse};
use divgraph::certified;
use divgraph::estimator::{accumulate, bounds, estimate_with, schedule, BudgetSpec};
use divgraph::graph::{obs2_applies, reduce, run_containing};
use divgraph::kernels::{self, Graph};
use divgraph::oracle::brute;
use divgraph::{ConstantName, KernelLimits, ReductionTriple, StatCache, StatKind};

/// Anchor component of `k` in the divisor graph of `[k, n]`, by breadth-first
/// search over the whole interval.
fn direct_component(k: u64, n: u64) -> Vec<u64> {
    let mut seen = vec![false; (n - k + 1) as usize];
    let mut queue = VecDeque::from([k]);
    seen[0] = true;
    let mut out = Vec::new();
    while let Some(a) = queue.pop_front() {
        out.push(a);
        for b in k..=n {
            let idx = (b - k) as usize;
            if !seen[idx] && (a % b == 0 || b % a == 0) {
                seen[idx] = true;
                queue.push_back(b);
            }
        }
    }
    out.sort_unstable();
    out
}

fn random_graph(n: usize, mask: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut it = mask.iter().cycle();
    for u in 0..n {
        for v in u + 1..n {
            if *it.next().unwrap() {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// The statistic, or `None` when a kernel guard trips on a large component.
fn guarded(cache: &StatCache, kind: StatKind, d: u64, t: u64) -> Option<BigRational> {
    match cache.stat(kind, d, t) {
        Ok(v) => Some(v.value),
        Err(e) if e.is_budget() => None,
        Err(e) => panic!("stat({kind}, {d}, {t}): {e}"),
    }
}

fn legal_triple() -> impl Strategy<Value = ReductionTriple> {
    (1u64..=200, 1u64..=2000).prop_filter_map("no legal triple", |(n, k)| {
        let k = k % n + 1;
        reduce(k, n).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduction_preserves_local_statistics(n in 1u64..=120, k in 1u64..=120) {
        let k = k % n + 1;
        let comp = direct_component(k, n);
        prop_assume!(comp.len() <= 48);
        let rest: Vec<u64> = comp.iter().copied().filter(|&x| x != k).collect();
        let (g, h) = (Graph::divisor(&comp).unwrap(), Graph::divisor(&rest).unwrap());
        let lim = KernelLimits::default();
        let tr = reduce(k, n).unwrap();
        let cache = StatCache::default();

        let r = BigRational::new(
            kernels::count_independent_sets(&g, &lim).unwrap().into_inner().into(),
            kernels::count_independent_sets(&h, &lim).unwrap().into_inner().into(),
        );
        prop_assert_eq!(cache.stat(StatKind::R, tr.d, tr.t).unwrap().value, r);

        let v = int(kernels::min_path_cover(&g, &lim).unwrap() as i64)
            - int(kernels::min_path_cover(&h, &lim).unwrap() as i64);
        prop_assert_eq!(cache.stat(StatKind::V, tr.d, tr.t).unwrap().value, v);

        let gmax = int(kernels::gp_free_max(&comp, &lim).unwrap() as i64)
            - int(kernels::gp_free_max(&rest, &lim).unwrap() as i64);
        prop_assert_eq!(cache.stat(StatKind::G, tr.d, tr.t).unwrap().value, gmax);
    }

    #[test]
    fn statistics_are_constant_on_runs(tr in legal_triple(), kind in 0usize..6) {
        let kind = StatKind::ALL[kind];
        let (t0, t1) = run_containing(&tr);
        prop_assert!(t0 <= tr.t && tr.t < t1);
        let cache = StatCache::default();
        let Some(here) = guarded(&cache, kind, tr.d, tr.t) else { return Ok(()) };
        prop_assert_eq!(guarded(&cache, kind, tr.d, t0), Some(here.clone()));
        prop_assert_eq!(guarded(&cache, kind, tr.d, t1 - 1), Some(here));
    }

    #[test]
    fn scaling_images_share_statistics(tr in legal_triple(), p in prop::sample::select(vec![2u64, 3, 5, 7]), kind in 0usize..6) {
        prop_assume!(p <= tr.i);
        let kind = StatKind::ALL[kind];
        if obs2_applies(tr.d, tr.t, p).unwrap() {
            let cache = StatCache::default();
            let Some(base) = guarded(&cache, kind, tr.d, tr.t) else { return Ok(()) };
            prop_assert_eq!(guarded(&cache, kind, p * tr.d, p * tr.t), Some(base));
        }
    }

    #[test]
    fn statistic_ranges(tr in legal_triple()) {
        let cache = StatCache::default();
        for kind in StatKind::ALL {
            let Some(v) = guarded(&cache, kind, tr.d, tr.t) else { continue };
            let (lo, hi) = kind.range();
            prop_assert!(lo <= v && v <= hi, "{} at {} = {}", kind, tr, v);
        }
    }

    #[test]
    fn kernels_match_enumeration(n in 0usize..=13, mask in prop::collection::vec(any::<bool>(), 1..40)) {
        let g = random_graph(n, &mask);
        let lim = KernelLimits::default();
        prop_assert_eq!(kernels::count_independent_sets(&g, &lim).unwrap().into_inner(), brute::count_independent_sets(&g));
        let m = kernels::max_independent_set(&g, &lim).unwrap();
        prop_assert_eq!((m.size, m.count), brute::max_independent_set(&g));
        prop_assert_eq!(
            kernels::count_maximal_independent_sets(&g, &lim).unwrap().into_inner(),
            brute::count_maximal_independent_sets(&g)
        );
        if n > 0 {
            prop_assert_eq!(kernels::min_path_cover(&g, &lim).unwrap(), brute::min_path_cover(&g));
        }
    }

    #[test]
    fn gp_kernels_match_enumeration(vals in prop::collection::btree_set(1u64..=100, 0..=13)) {
        let vals: Vec<u64> = vals.into_iter().collect();
        let lim = KernelLimits::default();
        prop_assert_eq!(kernels::gp_free_count(&vals, &lim).unwrap().into_inner(), brute::gp_free_count(&vals));
        prop_assert_eq!(kernels::gp_free_max(&vals, &lim).unwrap(), brute::gp_free_max(&vals));
    }

    #[test]
    fn entropy_round_trip(l in 1e-6f64..=0.5) {
        let y = binary_entropy(l).unwrap();
        let back = entropy_inverse(y).unwrap();
        prop_assert!((binary_entropy(back).unwrap() - y).abs() < 1e-8);
        if l < 0.49 {
            prop_assert!((back - l).abs() < 1e-8);
        }
    }

    #[test]
    fn binomial_partial_sums_obey_entropy_bound(n in 1u64..=300, l in 0.01f64..=0.5) {
        // n H(l) - 2 log2(n + 1) <= log2 sum_{k <= l n} C(n, k) <= n H(l)
        let top = (l * n as f64).floor() as u64;
        let mut c = BigUint::one();
        let mut sum = BigUint::one();
        for k in 1..=top {
            c = c * (n - k + 1) / k;
            sum += &c;
        }
        let log2_sum = sum.to_f64().unwrap().log2();
        let nh = binary_entropy(l).unwrap() * n as f64;
        prop_assert!(log2_sum <= nh + 1e-9);
        prop_assert!(log2_sum >= nh - 2.0 * ((n + 1) as f64).log2());
    }

    #[test]
    fn certified_enclosures_are_tight_and_consistent(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let (num, den) = (a.max(b), a.min(b));
        let q = BigRational::new(num.into(), den.into());
        let l = certified::ln(&q);
        prop_assert!(l.lo <= l.hi);
        prop_assert!(l.width() < BigRational::new(1.into(), BigInt::one() << 150));
        // exp of the ln enclosure must bracket q exactly
        prop_assert!(certified::exp(&l.lo).lo <= q);
        prop_assert!(certified::exp(&l.hi).hi >= q);
        let f = (num as f64 / den as f64).ln();
        prop_assert!((l.lo.to_f64().unwrap() - f).abs() <= 1e-12 * f.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accumulation_is_order_independent(budget in 1u64..4000, seed in any::<u64>(), kind in 0usize..6) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let name = ConstantName::ALL[kind];
        let mut triples: Vec<ReductionTriple> = schedule(&BudgetSpec::product(budget)).collect();
        let cache = StatCache::default();
        let a = accumulate(name.kind(), triples.clone(), 40, &cache).unwrap();
        triples.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let b = accumulate(name.kind(), triples, 40, &cache).unwrap();
        prop_assert_eq!(&a.covered_mass, &b.covered_mass);
        prop_assert_eq!(&a.low_sum, &b.low_sum);
        prop_assert_eq!(&a.high_sum, &b.high_sum);
        let (x, y) = (bounds(&a, name, "", 40), bounds(&b, name, "", 40));
        prop_assert_eq!((x.lo, x.hi), (y.lo, y.hi));
    }

    #[test]
    fn bounds_are_monotone_in_budget(b1 in 1u64..20_000, b2 in 1u64..20_000, kind in 0usize..6) {
        let (small, large) = (b1.min(b2), b1.max(b2));
        let name = ConstantName::ALL[kind];
        let cache = StatCache::default();
        let s = estimate_with(name, &BudgetSpec::product(small), 40, &cache).unwrap();
        let l = estimate_with(name, &BudgetSpec::product(large), 40, &cache).unwrap();
        prop_assert!(s.lo_exact <= l.lo_exact);
        prop_assert!(s.hi_exact >= l.hi_exact);
        prop_assert!(s.mass_exact <= l.mass_exact);
        prop_assert!(l.mass_exact < BigRational::one());
    }
}
