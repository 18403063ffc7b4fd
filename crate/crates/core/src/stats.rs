//! Summary statistics of network snapshots.
//!
//! Per snapshot: density `W_t`, maximum degree `D_t`, and the two
//! combinations `M⁻_t = D_t/n − W_t`, `M⁺_t = D_t/n + W_t`. Across snapshots:
//! the scan statistic `S*_t`, built from order-`k` neighborhood sizes
//! (`k = 0, 1, 2`) standardized twice over a trailing window of length `m`.
//!
//! Density sums the adjacency matrix over all ordered pairs `i ≠ j` and
//! scales by `2 / (n(n−1))`. That is twice the fraction of occupied node
//! pairs, for directed and undirected networks alike, so a complete binary
//! network has density 2.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::network::{DynamicNetwork, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    Density,
    MaxDegree,
    Diff,
    Sum,
    Scan,
}

impl StatKind {
    pub const ALL: [StatKind; 5] = [
        StatKind::Density,
        StatKind::MaxDegree,
        StatKind::Diff,
        StatKind::Sum,
        StatKind::Scan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatKind::Density => "density",
            StatKind::MaxDegree => "max_degree",
            StatKind::Diff => "diff",
            StatKind::Sum => "sum",
            StatKind::Scan => "scan",
        }
    }

    /// Shewhart charts watch both tails; the scan threshold only the upper.
    pub fn two_sided(self) -> bool {
        self != StatKind::Scan
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "density" | "w" => Ok(StatKind::Density),
            "max_degree" | "degree" | "d" => Ok(StatKind::MaxDegree),
            "diff" | "m-" => Ok(StatKind::Diff),
            "sum" | "m+" => Ok(StatKind::Sum),
            "scan" => Ok(StatKind::Scan),
            other => Err(format!("unknown statistic `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("statistic needs at least {need} nodes, got {n}")]
    TooFewNodes { need: usize, n: usize },
    #[error("scan window m={m} needs T > 2m, got T={len}")]
    ScanTooShort { m: usize, len: usize },
    #[error("scan window must be at least 2, got {0}")]
    ScanWindow(usize),
    #[error("neighborhood order must be 0, 1 or 2, got {0}")]
    Order(usize),
}

/// A statistic over time, indexed from `t = 1`. Undefined entries are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct StatSeries {
    pub kind: StatKind,
    /// Scan window; `None` for per-snapshot statistics.
    pub m: Option<usize>,
    values: Vec<Option<f64>>,
}

impl StatSeries {
    pub fn new(kind: StatKind, m: Option<usize>, values: Vec<Option<f64>>) -> Self {
        StatSeries { kind, m, values }
    }

    /// A fully defined series.
    pub fn dense(kind: StatKind, values: Vec<f64>) -> Self {
        StatSeries {
            kind,
            m: None,
            values: values.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based `t`.
    pub fn get(&self, t: usize) -> Option<f64> {
        self.values.get(t.checked_sub(1)?).copied().flatten()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// First `t` with a defined value.
    pub fn first_defined(&self) -> Option<usize> {
        self.values.iter().position(Option::is_some).map(|i| i + 1)
    }

    /// Defined values for `t` in `from..=to`.
    pub fn range(&self, from: usize, to: usize) -> Vec<f64> {
        (from..=to.min(self.len())).filter_map(|t| self.get(t)).collect()
    }

    /// Writes `t,name,value` rows, skipping undefined entries.
    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(out, "t,name,value")?;
        }
        for (idx, v) in self.values.iter().enumerate() {
            if let Some(v) = v {
                writeln!(out, "{},{},{}", idx + 1, self.kind, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct CsvError {
    pub line: usize,
    pub reason: String,
}

/// Reads `t,name,value` rows back into one series per statistic, in order of
/// first appearance. Missing times are undefined; a scan series recovers `m`
/// from its first defined time `2m + 1`.
pub fn read_csv<R: BufRead>(reader: R) -> Result<Vec<StatSeries>, CsvError> {
    let mut order: Vec<StatKind> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let err = |reason: String| CsvError { line: lineno, reason };
        let line = line.map_err(|e| err(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || (lineno == 1 && line == "t,name,value") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [t, name, value] = fields[..] else {
            return Err(err(format!("expected 3 fields, got {}", fields.len())));
        };
        let t: usize = t.trim().parse().map_err(|_| err(format!("bad time `{t}`")))?;
        if t == 0 {
            return Err(err("times start at 1".into()));
        }
        let kind: StatKind = name.trim().parse().map_err(err)?;
        let value: f64 = value.trim().parse().map_err(|_| err(format!("bad value `{value}`")))?;
        let slot = match order.iter().position(|&k| k == kind) {
            Some(i) => i,
            None => {
                order.push(kind);
                rows.push(Vec::new());
                order.len() - 1
            }
        };
        if rows[slot].last().is_some_and(|&(prev, _)| prev >= t) {
            return Err(err(format!("times for {kind} must increase")));
        }
        rows[slot].push((t, value));
    }
    Ok(order
        .into_iter()
        .zip(rows)
        .map(|(kind, rows)| {
            let len = rows.last().map_or(0, |r| r.0);
            let mut values = vec![None; len];
            for (t, v) in &rows {
                values[t - 1] = Some(*v);
            }
            let m = (kind == StatKind::Scan).then(|| rows.first().map_or(0, |r| (r.0 - 1) / 2));
            StatSeries::new(kind, m, values)
        })
        .collect())
}

pub fn density(s: &Snapshot) -> Result<f64, StatsError> {
    let n = s.n();
    if n < 2 {
        return Err(StatsError::TooFewNodes { need: 2, n });
    }
    let total: u64 = s.weights().iter().map(|&w| w as u64).sum();
    Ok(2.0 * total as f64 / (n * (n - 1)) as f64)
}

/// Weighted degree of every node: in plus out for directed snapshots, the
/// row sum for undirected ones.
pub fn degrees(s: &Snapshot) -> Vec<f64> {
    let n = s.n();
    let mut deg = vec![0u64; n];
    for i in 0..n {
        for (j, &w) in s.row(i).iter().enumerate() {
            if w == 0 {
                continue;
            }
            deg[i] += w as u64;
            if s.directed() {
                deg[j] += w as u64;
            }
        }
    }
    deg.into_iter().map(|d| d as f64).collect()
}

pub fn max_degree(s: &Snapshot) -> f64 {
    degrees(s).into_iter().fold(0.0, f64::max)
}

pub fn diff_stat(d: f64, w: f64, n: usize) -> f64 {
    d / n as f64 - w
}

pub fn sum_stat(d: f64, w: f64, n: usize) -> f64 {
    d / n as f64 + w
}

/// Adjacency lists of a snapshot, used for neighborhood queries.
pub struct Neighborhoods<'a> {
    snap: &'a Snapshot,
    /// Neighbors ignoring direction.
    undirected: Vec<Vec<usize>>,
    /// Out-neighbors with weights (all neighbors for undirected snapshots).
    out: Vec<Vec<(usize, u32)>>,
}

impl<'a> Neighborhoods<'a> {
    pub fn new(snap: &'a Snapshot) -> Self {
        let n = snap.n();
        let mut undirected = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        for i in 0..n {
            for (j, &w) in snap.row(i).iter().enumerate() {
                if w == 0 || i == j {
                    continue;
                }
                out[i].push((j, w));
                if snap.directed() {
                    if snap.weight(j, i) == 0 || i < j {
                        undirected[i].push(j);
                        undirected[j].push(i);
                    }
                } else {
                    undirected[i].push(j);
                }
            }
        }
        Neighborhoods { snap, undirected, out }
    }

    /// Size of the order-`k` neighborhood of `i` given scratch buffers.
    fn size_with(
        &self,
        i: usize,
        k: usize,
        deg: &[f64],
        mark: &mut [u32],
        stamp: u32,
        members: &mut Vec<usize>,
    ) -> f64 {
        if k == 0 {
            return deg[i];
        }
        members.clear();
        members.push(i);
        mark[i] = stamp;
        let mut frontier_start = 0;
        for _ in 0..k {
            let frontier_end = members.len();
            for idx in frontier_start..frontier_end {
                let u = members[idx];
                for &v in &self.undirected[u] {
                    if mark[v] != stamp {
                        mark[v] = stamp;
                        members.push(v);
                    }
                }
            }
            frontier_start = frontier_end;
        }
        let directed = self.snap.directed();
        let mut total = 0u64;
        for &u in members.iter() {
            for &(v, w) in &self.out[u] {
                if mark[v] == stamp && (directed || u < v) {
                    total += w as u64;
                }
            }
        }
        total as f64
    }

    /// Order-`k` neighborhood sizes of all nodes.
    pub fn sizes(&self, k: usize) -> Vec<f64> {
        let n = self.snap.n();
        let deg = degrees(self.snap);
        let mut mark = vec![0u32; n];
        let mut members = Vec::with_capacity(n);
        (0..n)
            .map(|i| self.size_with(i, k, &deg, &mut mark, i as u32 + 1, &mut members))
            .collect()
    }
}

/// Edge weight inside the closed `k`-hop neighborhood of `i`. Hops ignore
/// edge direction; the induced count keeps it. `k = 0` gives the degree.
pub fn neighborhood_size(s: &Snapshot, i: usize, k: usize) -> Result<f64, StatsError> {
    if k > 2 {
        return Err(StatsError::Order(k));
    }
    let nb = Neighborhoods::new(s);
    let deg = degrees(s);
    let mut mark = vec![0u32; s.n()];
    let mut members = Vec::new();
    Ok(nb.size_with(i, k, &deg, &mut mark, 1, &mut members))
}

fn mean_sd(window: &[f64]) -> (f64, f64) {
    let m = window.len() as f64;
    let mean = window.iter().sum::<f64>() / m;
    let ss: f64 = window.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (m - 1.0)).sqrt())
}

/// `(x − mean(window)) / max(sd(window), 1)` with the `m − 1` denominator.
pub fn standardize(x: f64, window: &[f64]) -> f64 {
    let (mean, sd) = mean_sd(window);
    (x - mean) / sd.max(1.0)
}

/// Scan series for one order `k`; defined for `t > 2m`.
pub fn scan_order_series(net: &DynamicNetwork, m: usize, k: usize) -> Result<Vec<Option<f64>>, StatsError> {
    if k > 2 {
        return Err(StatsError::Order(k));
    }
    let sizes: Vec<Vec<f64>> = net.snapshots().iter().map(|s| Neighborhoods::new(s).sizes(k)).collect();
    scan_from_sizes(&sizes, m)
}

fn check_scan(len: usize, m: usize) -> Result<(), StatsError> {
    if m < 2 {
        return Err(StatsError::ScanWindow(m));
    }
    if len <= 2 * m {
        return Err(StatsError::ScanTooShort { m, len });
    }
    Ok(())
}

/// Two-stage standardization of per-node sizes (`sizes[t-1][i]`).
fn scan_from_sizes(sizes: &[Vec<f64>], m: usize) -> Result<Vec<Option<f64>>, StatsError> {
    let len = sizes.len();
    check_scan(len, m)?;
    let n = sizes.first().map_or(0, Vec::len);
    let mut local = vec![None; len];
    let mut column = vec![0.0; m];
    for t in (m + 1)..=len {
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            for (slot, s) in column.iter_mut().zip(&sizes[t - 1 - m..t - 1]) {
                *slot = s[i];
            }
            best = best.max(standardize(sizes[t - 1][i], &column));
        }
        local[t - 1] = Some(best);
    }
    let mut out = vec![None; len];
    let mut window: VecDeque<f64> = VecDeque::with_capacity(m);
    for t in (m + 1)..=len {
        let s = local[t - 1].expect("defined for t > m");
        if window.len() == m {
            let w: Vec<f64> = window.iter().copied().collect();
            out[t - 1] = Some(standardize(s, &w));
            window.pop_front();
        }
        window.push_back(s);
    }
    Ok(out)
}

/// `S*_t = max_k S*_t^(k)` over `k = 0, 1, 2`.
pub fn scan_series(net: &DynamicNetwork, m: usize) -> Result<StatSeries, StatsError> {
    check_scan(net.len(), m)?;
    let mut per_k: Vec<Vec<Vec<f64>>> = (0..3).map(|_| Vec::with_capacity(net.len())).collect();
    for s in net.snapshots() {
        let nb = Neighborhoods::new(s);
        for (k, dst) in per_k.iter_mut().enumerate() {
            dst.push(nb.sizes(k));
        }
    }
    let mut combined = vec![None; net.len()];
    for sizes in &per_k {
        for (c, v) in combined.iter_mut().zip(scan_from_sizes(sizes, m)?) {
            if let Some(v) = v {
                *c = Some(c.map_or(v, |c: f64| c.max(v)));
            }
        }
    }
    Ok(StatSeries::new(StatKind::Scan, Some(m), combined))
}

/// Per-snapshot statistic as a fully defined series.
pub fn snapshot_series(net: &DynamicNetwork, kind: StatKind) -> Result<StatSeries, StatsError> {
    assert_ne!(kind, StatKind::Scan, "scan needs a window");
    let n = net.n();
    let values = net
        .snapshots()
        .iter()
        .map(|s| {
            let w = density(s)?;
            let d = max_degree(s);
            Ok(match kind {
                StatKind::Density => w,
                StatKind::MaxDegree => d,
                StatKind::Diff => diff_stat(d, w, n),
                StatKind::Sum => sum_stat(d, w, n),
                StatKind::Scan => unreachable!(),
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;
    Ok(StatSeries::dense(kind, values))
}

/// Any statistic; `m` is used only for the scan.
pub fn series(net: &DynamicNetwork, kind: StatKind, m: usize) -> Result<StatSeries, StatsError> {
    match kind {
        StatKind::Scan => scan_series(net, m),
        other => snapshot_series(net, other),
    }
}

/// Several statistics at once, sharing the per-snapshot work.
pub fn all_series(net: &DynamicNetwork, kinds: &[StatKind], m: usize) -> Result<Vec<StatSeries>, StatsError> {
    let n = net.n();
    let mut w = Vec::with_capacity(net.len());
    let mut d = Vec::with_capacity(net.len());
    if kinds.iter().any(|&k| k != StatKind::Scan) {
        for s in net.snapshots() {
            w.push(density(s)?);
            d.push(max_degree(s));
        }
    }
    kinds
        .iter()
        .map(|&kind| {
            Ok(match kind {
                StatKind::Density => StatSeries::dense(kind, w.clone()),
                StatKind::MaxDegree => StatSeries::dense(kind, d.clone()),
                StatKind::Diff => {
                    StatSeries::dense(kind, d.iter().zip(&w).map(|(&d, &w)| diff_stat(d, w, n)).collect())
                }
                StatKind::Sum => StatSeries::dense(kind, d.iter().zip(&w).map(|(&d, &w)| sum_stat(d, w, n)).collect()),
                StatKind::Scan => scan_series(net, m)?,
            })
        })
        .collect()
}
