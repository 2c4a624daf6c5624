//! Certified bounds for the counting constants of the divisor graph.
//!
//! Every quantity handled here (primitive sets, maximum and maximal
//! primitive sets, geometric-progression-free sets, path covers) telescopes
//! into a sum of local statistics `f(k, n)` that only depend on the
//! connected component of `k` in the divisor graph of `[k, n]`. Those
//! components fall into canonical classes `(i, d, t)`, and each class has an
//! exact density. Summing `density * f` over enough classes, and filling the
//! rest with the known range of `f`, gives rigorous intervals for the
//! limiting constants.
//!
//! Modules, bottom-up:
//!
//! * [`arith`]: primes and smooth numbers.
//! * [`graph`]: interval divisor graphs, anchor components, canonical triples.
//! * [`kernels`]: exact counting on small graphs and vertex sets.
//! * [`stats`]: the six local statistics and their memo cache.
//! * [`certified`]: fixed-point enclosures of `ln` and `exp`.
//! * [`estimator`]: triple schedule, bound accumulation, term cache.
//! * [`oracle`]: brute-force ground truth on small `n`.
//! * [`analysis`]: entropy bounds on the median size of a primitive set.

pub mod analysis;
pub mod arith;
pub mod certified;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod kernels;
pub mod oracle;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::{ConstantInterval, ConstantName};
pub use graph::{Component, ReductionTriple, SmoothnessBound};
pub use kernels::{ExactCount, Graph, KernelLimits};
pub use stats::{StatCache, StatKind, StatValue};
