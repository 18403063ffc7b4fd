//! Dynamic degree-corrected stochastic block model (DDCSBM).
//!
//! Each node follows its own Markov chain over `K` communities. Node
//! propensities are a white-noise process around a node-specific level,
//!
//! ```text
//! θ*_it = φ θ*_i0 + (1 − φ) ε_it,   θ*_i0, ε_it ~ U(−1, 1)
//! θ_it  = δ θ*_it + 1
//! ```
//!
//! and are rescaled at every time step so that each community's mean
//! propensity is 1. Undirected edge counts are Poisson with rate
//! `θ_it θ_jt · a · ω[Z_it, Z_jt]`; binary networks threshold the counts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::anomaly::{odds_ratio_scale_poisson, AnomalyFamily, AnomalySpec};
use crate::dlsm::{default_t1, draw_poisson};
use crate::error::{ensure, ConfigError};
use crate::network::{DynamicNetwork, EdgeKind, Snapshot};
use crate::rng;

/// How propensities are normalized within a community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rescale {
    /// Divide by the community mean, giving mean 1 per community.
    #[default]
    Mean,
    /// Divide by the community sum.
    Sum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdcsbmConfig {
    pub n: usize,
    pub len: usize,
    pub t1: usize,
    pub k: usize,
    pub phi: f64,
    pub delta: f64,
    /// Row-stochastic `K × K` transition matrix, row-major.
    pub pi: Vec<f64>,
    /// Symmetric `K × K` community rate matrix, row-major.
    pub omega: Vec<f64>,
    pub a_scale: f64,
    pub edge_kind: EdgeKind,
    pub binarize_threshold: u32,
    pub rescale: Rescale,
    pub seed: u64,
}

impl DdcsbmConfig {
    /// Simulation defaults: three communities, `δ = 0.98`, sticky
    /// transitions (0.96 on the diagonal) and a distinct-diagonal `ω`.
    pub fn new(n: usize, len: usize, phi: f64, a_scale: f64, edge_kind: EdgeKind, seed: u64) -> Self {
        DdcsbmConfig {
            n,
            len,
            t1: default_t1(len),
            k: 3,
            phi,
            delta: 0.98,
            pi: vec![0.96, 0.02, 0.02, 0.02, 0.96, 0.02, 0.02, 0.02, 0.96],
            omega: vec![0.7, 0.2, 0.25, 0.2, 0.6, 0.3, 0.25, 0.3, 0.5],
            a_scale,
            edge_kind,
            binarize_threshold: 1,
            rescale: Rescale::Mean,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let k = self.k;
        ensure(self.n >= 2, "n", || format!("need at least 2 nodes, got {}", self.n))?;
        ensure(self.len >= 2, "T", || {
            format!("need at least 2 snapshots, got {}", self.len)
        })?;
        ensure(self.t1 >= 1 && self.t1 < self.len, "t1", || {
            format!("need 1 <= t1 < T, got t1={} T={}", self.t1, self.len)
        })?;
        ensure(k >= 1, "K", || "need at least one community".into())?;
        ensure(self.phi.abs() < 1.0, "phi", || {
            format!("|phi| must be < 1, got {}", self.phi)
        })?;
        ensure(self.delta > 0.0 && self.delta < 1.0, "delta", || {
            format!("must lie in (0, 1), got {}", self.delta)
        })?;
        ensure(self.a_scale > 0.0 && self.a_scale.is_finite(), "a_scale", || {
            format!("must be positive, got {}", self.a_scale)
        })?;
        ensure(self.binarize_threshold >= 1, "binarize_threshold", || {
            "must be at least 1".into()
        })?;
        ensure(self.pi.len() == k * k, "pi", || format!("expected {} entries", k * k))?;
        for row in self.pi.chunks(k) {
            ensure(row.iter().all(|&p| p >= 0.0), "pi", || {
                "entries must be nonnegative".into()
            })?;
            let s: f64 = row.iter().sum();
            ensure((s - 1.0).abs() <= 1e-9, "pi", || format!("row sums to {s}, expected 1"))?;
        }
        ensure(self.omega.len() == k * k, "omega", || {
            format!("expected {} entries", k * k)
        })?;
        for a in 0..k {
            for b in 0..k {
                let w = self.omega[a * k + b];
                ensure(w > 0.0 && w < 1.0, "omega", || format!("entry {w} outside (0, 1)"))?;
                ensure(w == self.omega[b * k + a], "omega", || {
                    "matrix must be symmetric".into()
                })?;
                if a < b {
                    ensure(self.omega[a * k + a] != self.omega[b * k + b], "omega", || {
                        "diagonal entries must be distinct".into()
                    })?;
                }
            }
        }
        Ok(())
    }
}

/// Community labels, `T × n`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityChain {
    n: usize,
    labels: Vec<usize>,
}

impl CommunityChain {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.labels.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels at 1-based time `t`.
    pub fn at(&self, t: usize) -> &[usize] {
        &self.labels[(t - 1) * self.n..t * self.n]
    }
}

/// Raw propensities `θ_it ∈ [1 − δ, 1 + δ]`, `T × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropensityField {
    n: usize,
    theta: Vec<f64>,
}

impl PropensityField {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.theta.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Propensities at 1-based time `t`.
    pub fn at(&self, t: usize) -> &[f64] {
        &self.theta[(t - 1) * self.n..t * self.n]
    }
}

fn sample_row<R: Rng + ?Sized>(rng: &mut R, row: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // Rounding can leave `acc` just below 1; fall back to the last positive entry.
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

pub fn generate_communities(cfg: &DdcsbmConfig) -> Result<CommunityChain, ConfigError> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, rng::STREAM_LATENT);
    let (n, k) = (cfg.n, cfg.k);
    let mut labels = Vec::with_capacity(n * cfg.len);
    labels.extend((0..n).map(|_| rng.random_range(0..k)));
    for t in 1..cfg.len {
        for i in 0..n {
            let prev = labels[(t - 1) * n + i];
            labels.push(sample_row(&mut rng, &cfg.pi[prev * k..(prev + 1) * k]));
        }
    }
    Ok(CommunityChain { n, labels })
}

pub fn generate_propensities(cfg: &DdcsbmConfig) -> Result<PropensityField, ConfigError> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, rng::STREAM_PROPENSITY);
    let n = cfg.n;
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut theta = Vec::with_capacity(n * cfg.len);
    for _ in 0..cfg.len {
        for &b in &base {
            let eps: f64 = rng.random_range(-1.0..1.0);
            let star = cfg.phi * b + (1.0 - cfg.phi) * eps;
            theta.push(cfg.delta * star + 1.0);
        }
    }
    Ok(PropensityField { n, theta })
}

/// Normalizes `theta` within each community of `labels`.
pub fn rescale_propensities(theta: &[f64], labels: &[usize], mode: Rescale) -> Vec<f64> {
    assert_eq!(theta.len(), labels.len());
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sum = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (&th, &z) in theta.iter().zip(labels) {
        sum[z] += th;
        count[z] += 1;
    }
    theta
        .iter()
        .zip(labels)
        .map(|(&th, &z)| match mode {
            Rescale::Mean => th * count[z] as f64 / sum[z],
            Rescale::Sum => th / sum[z],
        })
        .collect()
}

pub fn generate(cfg: &DdcsbmConfig, anomaly: Option<&AnomalySpec>) -> Result<DynamicNetwork, ConfigError> {
    let chain = generate_communities(cfg)?;
    let field = generate_propensities(cfg)?;
    generate_from_parts(cfg, &chain, &field, anomaly)
}

/// Draws edges given community labels and raw propensities.
pub fn generate_from_parts(
    cfg: &DdcsbmConfig,
    chain: &CommunityChain,
    field: &PropensityField,
    anomaly: Option<&AnomalySpec>,
) -> Result<DynamicNetwork, ConfigError> {
    cfg.validate()?;
    ensure(chain.n() == cfg.n && chain.len() == cfg.len, "communities", || {
        "shape does not match config".into()
    })?;
    ensure(field.n() == cfg.n && field.len() == cfg.len, "propensities", || {
        "shape does not match config".into()
    })?;
    if let Some(a) = anomaly {
        a.validate(cfg.n, cfg.t1, cfg.len)
            .map_err(|e| ConfigError::new("anomaly", e.to_string()))?;
    }
    let (n, k) = (cfg.n, cfg.k);
    let mask = anomaly.map(|a| a.mask(n)).unwrap_or_else(|| vec![false; n]);
    let mut snapshots = Vec::with_capacity(cfg.len);
    let mut theta = vec![0.0; n];

    for t in 1..=cfg.len {
        let mut rng = rng::edge_stream(cfg.seed, t);
        let z = chain.at(t);
        theta.copy_from_slice(field.at(t));
        let mut odds = 1.0;
        if let Some(a) = anomaly.filter(|a| a.is_active(t)) {
            let c = a.effective_or(t);
            match a.family {
                AnomalyFamily::DegreeParam => {
                    for &i in a.affected() {
                        theta[i] *= c;
                    }
                }
                AnomalyFamily::OddsRatio => odds = c,
            }
        }
        let scaled = rescale_propensities(&theta, z, cfg.rescale);

        let mut snap = Snapshot::empty(n, false, cfg.edge_kind);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut rate = scaled[i] * scaled[j] * cfg.a_scale * cfg.omega[z[i] * k + z[j]];
                if odds != 1.0 && mask[i] && mask[j] {
                    rate = odds_ratio_scale_poisson(rate, odds);
                }
                let y = draw_poisson(&mut rng, rate);
                let w = match cfg.edge_kind {
                    EdgeKind::Count => y,
                    EdgeKind::Binary => u32::from(y >= cfg.binarize_threshold),
                };
                if w > 0 {
                    snap.set_edge(i, j, w);
                }
            }
        }
        snapshots.push(snap);
    }
    Ok(DynamicNetwork::new(snapshots, cfg.t1))
}
