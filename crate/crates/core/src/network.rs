//! Snapshots, dynamic networks and their structural invariants.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Whether edge weights are indicators or nonnegative counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Binary,
    Count,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Binary => "binary",
            EdgeKind::Count => "count",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EdgeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(EdgeKind::Binary),
            "count" => Ok(EdgeKind::Count),
            other => Err(format!("unknown edge kind `{other}`")),
        }
    }
}

/// One adjacency matrix `Y_t`, stored row-major with 0-based node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    n: usize,
    directed: bool,
    kind: EdgeKind,
    weights: Vec<u32>,
}

impl Snapshot {
    pub fn empty(n: usize, directed: bool, kind: EdgeKind) -> Self {
        Snapshot {
            n,
            directed,
            kind,
            weights: vec![0; n * n],
        }
    }

    /// Wraps a row-major `n × n` weight matrix without checking invariants;
    /// use [`DynamicNetwork::validate`] to audit the result.
    ///
    /// Panics if `weights.len() != n * n`.
    pub fn from_weights(n: usize, directed: bool, kind: EdgeKind, weights: Vec<u32>) -> Self {
        assert_eq!(weights.len(), n * n, "weight matrix must be n×n");
        Snapshot {
            n,
            directed,
            kind,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.weights[i * self.n + j]
    }

    /// Sets `w_ij`; for undirected snapshots `w_ji` is set as well.
    #[inline]
    pub fn set_edge(&mut self, i: usize, j: usize, w: u32) {
        self.weights[i * self.n + j] = w;
        if !self.directed {
            self.weights[j * self.n + i] = w;
        }
    }

    /// Raw entry write; does not mirror undirected edges.
    #[inline]
    pub fn set_entry(&mut self, i: usize, j: usize, w: u32) {
        self.weights[i * self.n + j] = w;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// Nonzero entries as `(i, j, w)`: every ordered pair when directed,
    /// pairs with `i < j` when undirected.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let n = self.n;
        let directed = self.directed;
        self.weights.iter().enumerate().filter_map(move |(idx, &w)| {
            let (i, j) = (idx / n, idx % n);
            if w == 0 || i == j || (!directed && j < i) {
                None
            } else {
                Some((i, j, w))
            }
        })
    }

    /// Applies a node relabelling: node `i` of `self` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Snapshot {
        assert_eq!(perm.len(), self.n);
        let mut out = Snapshot::empty(self.n, self.directed, self.kind);
        for i in 0..self.n {
            for j in 0..self.n {
                out.weights[perm[i] * self.n + perm[j]] = self.weight(i, j);
            }
        }
        out
    }
}

/// A length-`T` sequence of snapshots with Phase I cutoff `t1` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicNetwork {
    snapshots: Vec<Snapshot>,
    t1: usize,
}

/// A broken structural invariant. Times are 1-based, nodes 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { t: usize, node: usize, weight: u32 },
    NonBinaryWeight { t: usize, i: usize, j: usize, weight: u32 },
    Asymmetric { t: usize, i: usize, j: usize },
    ShapeMismatch { t: usize, field: &'static str },
    PhaseCutoff { t1: usize, len: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { t, node, weight } => {
                write!(f, "t={t}: self-loop at node {node} (weight {weight})")
            }
            Violation::NonBinaryWeight { t, i, j, weight } => {
                write!(f, "t={t}: binary snapshot has weight {weight} at ({i},{j})")
            }
            Violation::Asymmetric { t, i, j } => {
                write!(f, "t={t}: undirected snapshot asymmetric at ({i},{j})")
            }
            Violation::ShapeMismatch { t, field } => {
                write!(f, "t={t}: {field} differs from the first snapshot")
            }
            Violation::PhaseCutoff { t1, len } => {
                write!(f, "phase I cutoff t1={t1} must satisfy 1 <= t1 < T={len}")
            }
        }
    }
}

impl DynamicNetwork {
    /// Wraps snapshots without validation.
    pub fn new(snapshots: Vec<Snapshot>, t1: usize) -> Self {
        DynamicNetwork { snapshots, t1 }
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Snapshot at 1-based time `t`.
    pub fn at(&self, t: usize) -> &Snapshot {
        &self.snapshots[t - 1]
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn t1(&self) -> usize {
        self.t1
    }

    pub fn n(&self) -> usize {
        self.snapshots.first().map_or(0, Snapshot::n)
    }

    pub fn directed(&self) -> bool {
        self.snapshots.first().is_some_and(Snapshot::directed)
    }

    pub fn kind(&self) -> EdgeKind {
        self.snapshots.first().map_or(EdgeKind::Binary, Snapshot::kind)
    }

    pub fn into_snapshots(self) -> Vec<Snapshot> {
        self.snapshots
    }

    /// Lists every broken invariant; empty iff the network is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let len = self.snapshots.len();
        if self.t1 < 1 || self.t1 >= len {
            out.push(Violation::PhaseCutoff { t1: self.t1, len });
        }
        let Some(first) = self.snapshots.first() else {
            return out;
        };
        for (idx, s) in self.snapshots.iter().enumerate() {
            let t = idx + 1;
            if s.n != first.n {
                out.push(Violation::ShapeMismatch { t, field: "n" });
                continue;
            }
            if s.directed != first.directed {
                out.push(Violation::ShapeMismatch { t, field: "directed" });
            }
            if s.kind != first.kind {
                out.push(Violation::ShapeMismatch { t, field: "edge kind" });
            }
            for i in 0..s.n {
                let w = s.weight(i, i);
                if w != 0 {
                    out.push(Violation::SelfLoop { t, node: i, weight: w });
                }
            }
            for i in 0..s.n {
                for j in 0..s.n {
                    if i == j {
                        continue;
                    }
                    let w = s.weight(i, j);
                    if s.kind == EdgeKind::Binary && w > 1 {
                        out.push(Violation::NonBinaryWeight { t, i, j, weight: w });
                    }
                    if !s.directed && i < j && w != s.weight(j, i) {
                        out.push(Violation::Asymmetric { t, i, j });
                    }
                }
            }
        }
        out
    }
}
