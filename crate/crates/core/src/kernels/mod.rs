//! Exact counting on small graphs and vertex sets.
//!
//! All kernels work on [`Graph`], a bitset graph of at most 128 vertices,
//! split the input into connected components (counts multiply, sizes add)
//! and branch with a per-call memo keyed by the residual vertex set.

mod gp;
mod independent;
mod maximal;
mod path_cover;

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gp::{gp_free_count, gp_free_max, gp_triples, GpTriple};
pub use independent::{count_independent_sets, max_independent_set, MaxISResult};
pub use maximal::count_maximal_independent_sets;
pub use path_cover::{min_path_cover, PATH_COVER_DP_THRESHOLD};

pub(crate) type Bits = u128;

/// Hard ceiling from the bitset width.
pub const MAX_GRAPH_VERTICES: usize = 128;

/// Resource guards for the kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelLimits {
    /// Largest vertex count accepted by the counting kernels.
    pub max_vertices: usize,
    /// Largest single connected component handed to the path-cover search.
    pub max_path_cover_vertices: usize,
    /// Branch-and-bound node budget per path-cover component.
    pub path_cover_nodes: u64,
}

impl Default for KernelLimits {
    fn default() -> Self {
        KernelLimits {
            max_vertices: MAX_GRAPH_VERTICES,
            max_path_cover_vertices: 64,
            path_cover_nodes: 2_000_000,
        }
    }
}

impl KernelLimits {
    pub(crate) fn check(&self, what: &'static str, n: usize) -> Result<()> {
        let cap = self.max_vertices.min(MAX_GRAPH_VERTICES);
        if n > cap {
            return Err(Error::budget(what, format!("{n} vertices exceeds limit {cap}")));
        }
        Ok(())
    }
}

/// Arbitrary-precision nonnegative count; never rounded.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCount(pub BigUint);

impl ExactCount {
    pub fn one() -> Self {
        ExactCount(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl From<u64> for ExactCount {
    fn from(v: u64) -> Self {
        ExactCount(BigUint::from(v))
    }
}

impl PartialEq<u64> for ExactCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected simple graph on at most 128 vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<u64>,
    adj: Vec<Bits>,
}

impl Graph {
    pub fn empty() -> Self {
        Graph {
            labels: Vec::new(),
            adj: Vec::new(),
        }
    }

    /// Graph on `n` vertices labelled `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_GRAPH_VERTICES {
            return Err(Error::budget("graph", format!("{n} vertices exceeds {MAX_GRAPH_VERTICES}")));
        }
        let mut adj = vec![0 as Bits; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u != v {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        Ok(Graph {
            labels: (0..n as u64).collect(),
            adj,
        })
    }

    /// Divisor graph on the given distinct positive integers.
    pub fn divisor(vertices: &[u64]) -> Result<Self> {
        let n = vertices.len();
        if n > MAX_GRAPH_VERTICES {
            return Err(Error::budget("graph", format!("{n} vertices exceeds {MAX_GRAPH_VERTICES}")));
        }
        let mut adj = vec![0 as Bits; n];
        for a in 0..n {
            for b in a + 1..n {
                let (x, y) = (vertices[a], vertices[b]);
                if x % y == 0 || y % x == 0 {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
            }
        }
        Ok(Graph {
            labels: vertices.to_vec(),
            adj,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub(crate) fn neighbors(&self, v: usize) -> Bits {
        self.adj[v]
    }

    pub(crate) fn all(&self) -> Bits {
        full_mask(self.len())
    }

    /// Induced subgraph on the vertices whose local index is in `keep`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut adj = vec![0 as Bits; keep.len()];
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate() {
                if self.has_edge(u, v) {
                    adj[a] |= 1 << b;
                }
            }
        }
        Graph {
            labels: keep.iter().map(|&u| self.labels[u]).collect(),
            adj,
        }
    }

    /// Graph with vertex `v` deleted.
    pub fn without(&self, v: usize) -> Graph {
        let keep: Vec<usize> = (0..self.len()).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    /// Connected components of the subgraph induced on `set`.
    pub(crate) fn components_of(&self, set: Bits) -> Vec<Bits> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let seed = rest & rest.wrapping_neg();
            let mut comp = seed;
            let mut frontier = seed;
            while frontier != 0 {
                let mut next = 0;
                for v in bits(frontier) {
                    next |= self.adj[v];
                }
                next &= set & !comp;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    /// Local index sets of the connected components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_of(self.all())
            .into_iter()
            .map(|c| bits(c).collect())
            .collect()
    }
}

pub(crate) fn full_mask(n: usize) -> Bits {
    if n == 128 {
        Bits::MAX
    } else {
        (1 << n) - 1
    }
}

/// Indices of the set bits, ascending.
pub(crate) fn bits(mut x: Bits) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let v = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(v)
        }
    })
}

pub(crate) fn pow2(k: u32) -> BigUint {
    BigUint::one() << k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_graph_edges() {
        let g = Graph::divisor(&[2, 3, 4, 6, 8, 9]).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.has_edge(0, 2));
        assert!(!g.has_edge(0, 1));
    }

    #[test]
    fn components_split() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3], vec![4]]);
    }

    #[test]
    fn limits_reject_large() {
        let lim = KernelLimits {
            max_vertices: 4,
            ..KernelLimits::default()
        };
        assert!(lim.check("x", 5).unwrap_err().is_budget());
        assert!(lim.check("x", 4).is_ok());
    }
}
