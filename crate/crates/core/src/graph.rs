//! Coupling topologies and half/half partitions.
//!
//! Every builder returns a [`CouplingGraph`]: a symmetric weight matrix with a
//! zero diagonal. An edge `(i, j)` exists iff `weight(i, j) != 0`. Random
//! builders draw unordered pairs in lexicographic `(i, j)` order with `i < j`,
//! so the output is a pure function of the parameters and the generator state.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Closed,
}

impl FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "open" => Ok(Boundary::Open),
            "closed" => Ok(Boundary::Closed),
            other => Err(format!("expected `open` or `closed`, got `{other}`")),
        }
    }
}

/// How a pair reached by more than one ring offset is weighted.
///
/// `Single` keeps the graph simple: every coupled pair has weight 1.
/// `Double` counts every `(side, offset)` route separately, so on a closed
/// ring the antipodal pair at `n_c = n/2` gets weight 2, and `n_c = n` gives
/// every pair weight 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BondConvention {
    #[default]
    Single,
    Double,
}

impl FromStr for BondConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" => Ok(BondConvention::Single),
            "double" => Ok(BondConvention::Double),
            other => Err(format!("expected `single` or `double`, got `{other}`")),
        }
    }
}

impl fmt::Display for BondConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BondConvention::Single => f.write_str("single"),
            BondConvention::Double => f.write_str("double"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    weights: DMatrix<f64>,
}

impl CouplingGraph {
    /// Graph on `n` sites with no edges.
    pub fn empty(n: usize) -> Self {
        CouplingGraph {
            weights: DMatrix::zeros(n, n),
        }
    }

    /// Validates symmetry, zero diagonal and finiteness.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::DimensionMismatch {
                expected: weights.nrows(),
                found: weights.ncols(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = weights.nrows();
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::invalid("weights", format!("nonzero diagonal at site {i}")));
            }
            for j in 0..i {
                if weights[(i, j)] != weights[(j, i)] {
                    return Err(Error::NotSymmetric {
                        asymmetry: (weights[(i, j)] - weights[(j, i)]).abs(),
                    });
                }
            }
        }
        Ok(CouplingGraph { weights })
    }

    /// Complete graph with every pair at weight 1 (`Single`) or 2 (`Double`).
    pub fn complete(n: usize, convention: BondConvention) -> Self {
        let w = match convention {
            BondConvention::Single => 1.0,
            BondConvention::Double => 2.0,
        };
        let weights = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { w });
        CouplingGraph { weights }
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Edges as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| {
                let w = self.weights[(i, j)];
                (w != 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Number of neighbors of `i`.
    pub fn degree(&self, i: usize) -> usize {
        self.weights.row(i).iter().filter(|w| **w != 0.0).count()
    }

    /// Sum of edge weights at `i`.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.weights[(i, j)] != 0.0).collect()
    }

    /// Breadth-first connectivity check. The empty graph on zero or one site
    /// counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Edge-list text: `n=<n>` header, then `i j w` per edge with `i < j`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n());
        for (i, j, w) in self.edges() {
            out.push_str(&format!("{i} {j} {w}\n"));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("edge list", "missing `n=` header"))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::invalid("edge list", format!("bad header `{header}`")))?;
        let mut weights = DMatrix::zeros(n, n);
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [i, j, w] => i
                    .parse::<usize>()
                    .ok()
                    .zip(j.parse::<usize>().ok())
                    .zip(w.parse::<f64>().ok()),
                _ => None,
            };
            let ((i, j), w) =
                parsed.ok_or_else(|| Error::invalid("edge list", format!("bad line `{line}`")))?;
            if i >= j || j >= n {
                return Err(Error::invalid(
                    "edge list",
                    format!("edge ({i}, {j}) needs i < j < n"),
                ));
            }
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
        CouplingGraph::from_weights(weights)
    }
}

fn check_probability(c_p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c_p) {
        return Err(Error::invalid("c_p", format!("{c_p} is outside [0, 1]")));
    }
    Ok(())
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::invalid("n", format!("{n} must be a positive even number")));
    }
    Ok(())
}

/// Chain where every site couples to `n_c` neighbors on each side, with the
/// simple-graph (`Single`) bond convention.
pub fn build_chain(n: usize, n_c: usize, boundary: Boundary) -> Result<CouplingGraph> {
    build_chain_with(n, n_c, boundary, BondConvention::Single)
}

/// Open chains truncate at the ends. On a closed ring with `Double` bonds
/// `n_c` may go up to `n`; with `Single` bonds it stops at `n/2`.
pub fn build_chain_with(
    n: usize,
    n_c: usize,
    boundary: Boundary,
    convention: BondConvention,
) -> Result<CouplingGraph> {
    if n < 2 {
        return Err(Error::invalid("n", format!("{n} is below the minimum of 2")));
    }
    let max_nc = match (boundary, convention) {
        (Boundary::Open, _) => n - 1,
        (Boundary::Closed, BondConvention::Single) => n / 2,
        (Boundary::Closed, BondConvention::Double) => n,
    };
    if n_c == 0 || n_c > max_nc {
        return Err(Error::invalid(
            "n_c",
            format!("{n_c} is outside 1..={max_nc} for n = {n}"),
        ));
    }
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let routes = match boundary {
                Boundary::Open => usize::from(i.abs_diff(j) <= n_c),
                Boundary::Closed => {
                    let fwd = (j + n - i) % n;
                    let bwd = (i + n - j) % n;
                    usize::from(fwd <= n_c) + usize::from(bwd <= n_c)
                }
            };
            weights[(i, j)] = match convention {
                BondConvention::Single => routes.min(1) as f64,
                BondConvention::Double => routes as f64,
            };
        }
    }
    Ok(CouplingGraph { weights })
}

/// Erdős–Rényi graph: each unordered pair gets a unit edge with probability `c_p`.
pub fn build_random<R: Rng + ?Sized>(n: usize, c_p: f64, rng: &mut R) -> Result<CouplingGraph> {
    check_probability(c_p)?;
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < c_p {
                weights[(i, j)] = 1.0;
                weights[(j, i)] = 1.0;
            }
        }
    }
    Ok(CouplingGraph { weights })
}

/// Random bipartite graph between even (A) and odd (B) sites.
pub fn build_bipartite_random<R: Rng + ?Sized>(
    n: usize,
    c_p: f64,
    rng: &mut R,
) -> Result<CouplingGraph> {
    check_even(n)?;
    check_probability(c_p)?;
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1..n).filter(|j| (j - i) % 2 == 1) {
            if rng.random::<f64>() < c_p {
                weights[(i, j)] = 1.0;
                weights[(j, i)] = 1.0;
            }
        }
    }
    Ok(CouplingGraph { weights })
}

/// Ring offsets `±(2j - 1) mod n` for `j = 1..=n_c`, rejecting collisions.
pub(crate) fn bipartite_offsets(n: usize, n_c: usize) -> Result<Vec<usize>> {
    check_even(n)?;
    if n_c == 0 {
        return Err(Error::invalid("n_c", "must be at least 1"));
    }
    let mut offsets = Vec::with_capacity(2 * n_c);
    for j in 1..=n_c {
        let d = (2 * j - 1) % n;
        offsets.push(d);
        offsets.push((n - d) % n);
    }
    let mut sorted = offsets.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != offsets.len() || sorted.contains(&0) {
        return Err(Error::invalid(
            "n_c",
            format!("{n_c} makes the odd offsets collide modulo n = {n}"),
        ));
    }
    Ok(offsets)
}

/// Regular bipartite ring: site `i` couples to `i ± (2j - 1)` for `j = 1..=n_c`.
/// The weight matrix has the circulant nonzero pattern of the bipartite
/// potential.
pub fn build_bipartite_regular(n: usize, n_c: usize) -> Result<CouplingGraph> {
    let offsets = bipartite_offsets(n, n_c)?;
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for &d in &offsets {
            weights[(i, (i + d) % n)] = 1.0;
        }
    }
    Ok(CouplingGraph { weights })
}

/// Replaces each existing edge weight with an independent uniform draw from
/// `[lo, hi]`. A degenerate interval `lo == hi` sets every edge to `lo`.
pub fn assign_random_weights<R: Rng + ?Sized>(
    g: &CouplingGraph,
    rng: &mut R,
    lo: f64,
    hi: f64,
) -> Result<CouplingGraph> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::invalid("weight interval", format!("[{lo}, {hi}] is not a valid interval")));
    }
    let mut weights = g.weights.clone();
    for (i, j, _) in g.edges() {
        let w = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        weights[(i, j)] = w;
        weights[(j, i)] = w;
    }
    Ok(CouplingGraph { weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionScheme {
    Contiguous,
    Parity,
}

impl FromStr for PartitionScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "contiguous" => Ok(PartitionScheme::Contiguous),
            "parity" => Ok(PartitionScheme::Parity),
            other => Err(format!("expected `contiguous` or `parity`, got `{other}`")),
        }
    }
}

impl fmt::Display for PartitionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionScheme::Contiguous => f.write_str("contiguous"),
            PartitionScheme::Parity => f.write_str("parity"),
        }
    }
}

/// Group membership: `+1` for A, `-1` for B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMask {
    signs: Vec<i8>,
}

impl PartitionMask {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::invalid("mask", format!("entry {bad} is not ±1")));
        }
        Ok(PartitionMask { signs })
    }

    /// Site `i` alone in A, everything else in B.
    pub fn single_site(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::invalid("site", format!("{i} out of range for n = {n}")));
        }
        Ok(PartitionMask {
            signs: (0..n).map(|j| if j == i { 1 } else { -1 }).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn negated(&self) -> Self {
        PartitionMask {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    pub fn group_a(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.signs[i] == 1).collect()
    }

    pub fn group_b(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.signs[i] == -1).collect()
    }
}

pub fn half_partition(n: usize, scheme: PartitionScheme) -> Result<PartitionMask> {
    check_even(n)?;
    let signs = (0..n)
        .map(|i| {
            let in_a = match scheme {
                PartitionScheme::Contiguous => i < n / 2,
                PartitionScheme::Parity => i % 2 == 0,
            };
            if in_a {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(PartitionMask { signs })
}
