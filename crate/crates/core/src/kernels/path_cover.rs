//! Minimum number of vertex-disjoint simple paths covering a graph.
//!
//! Small components go through an exact subset dynamic program. Larger ones
//! use branch and bound on oriented path covers: a cover with `k` paths is a
//! set of `n - k` arcs with in- and out-degree at most one and no directed
//! cycle. Dropping acyclicity leaves a bipartite matching between out-slots
//! and in-slots, which bounds the arc count from above; a directed cycle in
//! the matching is broken by branching on which of its arcs is absent.

use super::{bits, Bits, Graph, KernelLimits};
use crate::error::{Error, Result};

/// Components up to this size are solved by the subset dynamic program.
pub const PATH_COVER_DP_THRESHOLD: usize = 20;

/// Minimum path cover number; single vertices count as paths, empty graph is 0.
pub fn min_path_cover(g: &Graph, limits: &KernelLimits) -> Result<usize> {
    limits.check("min_path_cover", g.len())?;
    let mut total = 0;
    for comp in g.components() {
        total += component_cover(&g.induced(&comp), limits)?;
    }
    Ok(total)
}

fn component_cover(g: &Graph, limits: &KernelLimits) -> Result<usize> {
    let n = g.len();
    if n <= 2 {
        return Ok(1);
    }
    if n <= PATH_COVER_DP_THRESHOLD {
        return Ok(subset_dp(g));
    }
    if n > limits.max_path_cover_vertices {
        return Err(Error::budget(
            "min_path_cover",
            format!("component of {n} vertices exceeds limit {}", limits.max_path_cover_vertices),
        ));
    }
    let arcs = BranchAndBound::new(g, limits.path_cover_nodes).solve()?;
    Ok(n - arcs)
}

/// For each vertex subset, the fewest paths covering it while the last path
/// is still open, together with every vertex that can be that path's end.
/// Keeping only the minimum is exact: a state with one more path is never
/// better, since the cheaper state can open a new path at the same vertex.
fn subset_dp(g: &Graph) -> usize {
    let n = g.len();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v) as u32).collect();
    let size = 1usize << n;
    let mut best = vec![u8::MAX; size];
    let mut ends = vec![0u32; size];
    for v in 0..n {
        best[1 << v] = 1;
        ends[1 << v] = 1 << v;
    }
    for mask in 1..size {
        let c = best[mask];
        if c == u8::MAX || mask as u32 == full {
            continue;
        }
        let m = mask as u32;
        let mut ext = 0u32;
        let mut e = ends[mask];
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            ext |= adj[v];
        }
        ext &= !m & full;
        let mut rest = !m & full;
        while rest != 0 {
            let u = rest.trailing_zeros();
            rest &= rest - 1;
            let cost = if ext >> u & 1 == 1 { c } else { c + 1 };
            let next = (m | 1 << u) as usize;
            if cost < best[next] {
                best[next] = cost;
                ends[next] = 1 << u;
            } else if cost == best[next] {
                ends[next] |= 1 << u;
            }
        }
    }
    best[full as usize] as usize
}

const NONE: u8 = u8::MAX;

#[derive(Clone)]
struct Node {
    forbid: Vec<Bits>,
    succ: Vec<u8>,
    pred: Vec<u8>,
    forced: usize,
}

struct BranchAndBound<'a> {
    g: &'a Graph,
    n: usize,
    best: usize,
    ceiling: usize,
    nodes: u64,
    node_limit: u64,
}

impl<'a> BranchAndBound<'a> {
    fn new(g: &'a Graph, node_limit: u64) -> Self {
        BranchAndBound {
            g,
            n: g.len(),
            best: 0,
            ceiling: usize::MAX,
            nodes: 0,
            node_limit,
        }
    }

    /// Maximum number of arcs in an oriented linear forest.
    fn solve(mut self) -> Result<usize> {
        let root = Node {
            forbid: vec![0; self.n],
            succ: vec![NONE; self.n],
            pred: vec![NONE; self.n],
            forced: 0,
        };
        self.best = self.greedy();
        let (bound, _) = self.relax(&root);
        self.ceiling = bound;
        if self.best < self.ceiling {
            self.search(root)?;
        }
        Ok(self.best)
    }

    /// Greedy chain cover along increasing labels, as a starting incumbent.
    fn greedy(&self) -> usize {
        let mut used: Bits = 0;
        let mut arcs = 0;
        for start in 0..self.n {
            if used >> start & 1 == 1 {
                continue;
            }
            used |= 1 << start;
            let mut cur = start;
            loop {
                let cand = self.g.neighbors(cur) & !used;
                let Some(next) = bits(cand).min_by_key(|&v| (self.g.neighbors(v) & !used).count_ones()) else {
                    break;
                };
                used |= 1 << next;
                arcs += 1;
                cur = next;
            }
        }
        arcs
    }

    fn chain_start(&self, node: &Node, mut v: usize) -> usize {
        while node.pred[v] != NONE {
            v = node.pred[v] as usize;
        }
        v
    }

    /// Upper bound on arcs below `node`, with the matching that attains it.
    fn relax(&self, node: &Node) -> (usize, Vec<u8>) {
        let n = self.n;
        let mut free_in: Bits = 0;
        for v in 0..n {
            if node.pred[v] == NONE {
                free_in |= 1 << v;
            }
        }
        let mut allowed = vec![0 as Bits; n];
        for u in 0..n {
            if node.succ[u] != NONE {
                continue;
            }
            let start = self.chain_start(node, u);
            allowed[u] = self.g.neighbors(u) & free_in & !node.forbid[u] & !(1 << start);
        }
        let mut match_in = vec![NONE; n];
        let mut match_out = vec![NONE; n];
        let mut size = 0;
        // cheapest vertices first gives Kuhn fewer long augmentations
        let mut order: Vec<usize> = (0..n).filter(|&u| allowed[u] != 0).collect();
        order.sort_by_key(|&u| allowed[u].count_ones());
        for &u in &order {
            let mut seen: Bits = 0;
            if augment(u, &allowed, &mut match_in, &mut match_out, &mut seen) {
                size += 1;
            }
        }
        (node.forced + size, match_out)
    }

    fn search(&mut self, node: Node) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::budget(
                "min_path_cover",
                format!("branch-and-bound exceeded {} nodes on {} vertices", self.node_limit, self.n),
            ));
        }
        let (bound, matched) = self.relax(&node);
        if bound <= self.best {
            return Ok(());
        }
        let cycles = self.cycles(&node, &matched);
        if cycles.is_empty() {
            self.best = bound;
            return Ok(());
        }
        // each cycle loses one arc when broken
        self.best = self.best.max(bound - cycles.len());
        if self.best >= self.ceiling {
            return Ok(());
        }
        let cycle = cycles
            .into_iter()
            .min_by_key(|c| c.len())
            .expect("nonempty");
        let mut child = node.clone();
        for &(u, v) in &cycle {
            let mut branch = child.clone();
            branch.forbid[u] |= 1 << v;
            self.search(branch)?;
            if self.best >= self.ceiling {
                return Ok(());
            }
            if child.succ[u] != NONE || child.pred[v] != NONE || self.chain_start(&child, u) == v {
                break;
            }
            child.succ[u] = v as u8;
            child.pred[v] = u as u8;
            child.forced += 1;
        }
        Ok(())
    }

    /// Directed cycles of forced plus matched arcs, each listed by its
    /// matched (unforced) arcs.
    fn cycles(&self, node: &Node, matched: &[u8]) -> Vec<Vec<(usize, usize)>> {
        let n = self.n;
        let next = |u: usize| -> Option<(usize, bool)> {
            if node.succ[u] != NONE {
                Some((node.succ[u] as usize, false))
            } else if matched[u] != NONE {
                Some((matched[u] as usize, true))
            } else {
                None
            }
        };
        let mut state = vec![0u8; n];
        let mut out = Vec::new();
        for s in 0..n {
            if state[s] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut u = s;
            while state[u] == 0 {
                state[u] = 1;
                path.push(u);
                match next(u) {
                    Some((v, _)) => u = v,
                    None => break,
                }
            }
            if state[u] == 1 && next(*path.last().unwrap()).is_some() {
                // u was reached again on this walk
                if let Some(pos) = path.iter().position(|&x| x == u) {
                    let mut cyc = Vec::new();
                    for &a in &path[pos..] {
                        if let Some((b, free)) = next(a) {
                            if free {
                                cyc.push((a, b));
                            }
                        }
                    }
                    out.push(cyc);
                }
            }
            for &a in &path {
                state[a] = 2;
            }
        }
        out
    }
}

fn augment(u: usize, allowed: &[Bits], match_in: &mut [u8], match_out: &mut [u8], seen: &mut Bits) -> bool {
    let cand = allowed[u] & !*seen;
    for v in bits(cand) {
        *seen |= 1 << v;
        let holder = match_in[v];
        if holder == NONE || augment(holder as usize, allowed, match_in, match_out, seen) {
            match_in[v] = u as u8;
            match_out[u] = v as u8;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> KernelLimits {
        KernelLimits::default()
    }

    fn interval(n: u64) -> Graph {
        Graph::divisor(&(1..=n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(min_path_cover(&interval(7), &lim()).unwrap(), 2);
        assert_eq!(min_path_cover(&interval(3), &lim()).unwrap(), 1);
        assert_eq!(min_path_cover(&Graph::divisor(&[5]).unwrap(), &lim()).unwrap(), 1);
        assert_eq!(min_path_cover(&Graph::empty(), &lim()).unwrap(), 0);
    }

    #[test]
    fn star_and_cycle() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(min_path_cover(&star, &lim()).unwrap(), 3);
        let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        assert_eq!(min_path_cover(&c6, &lim()).unwrap(), 1);
    }

    #[test]
    fn branch_and_bound_agrees_with_dp() {
        for n in 3..=18u64 {
            let g = interval(n);
            let dp = subset_dp(&g);
            let bb = n as usize - BranchAndBound::new(&g, 1_000_000).solve().unwrap();
            assert_eq!(dp, bb, "n = {n}");
        }
        for (d, t) in [(2, 30), (3, 40), (4, 50), (6, 45)] {
            let c = crate::graph::build_component(d, t).unwrap();
            let g = c.graph().unwrap();
            if g.len() <= PATH_COVER_DP_THRESHOLD {
                let bb = g.len() - BranchAndBound::new(&g, 1_000_000).solve().unwrap();
                assert_eq!(subset_dp(&g), bb, "component ({d}, {t})");
            }
        }
    }
}
