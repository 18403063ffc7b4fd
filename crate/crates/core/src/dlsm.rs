//! Dynamic latent space model (DLSM).
//!
//! Nodes carry latent positions `X_it ∈ ℝ²`. The log-odds of a directed edge
//! `i → j` is
//!
//! ```text
//! η_ijt = β_in (1 − d_ijt / r_j) + β_out (1 − d_ijt / r_i)
//! ```
//!
//! with `d_ijt` the Euclidean distance between the two positions and `r` the
//! per-node radii. Positions follow a VAR(1) prior
//! `X_t = φ X_{t−1} + ε_t`, `ε_t ~ N(0, a·σ² I₂)`, started from clustered
//! initial draws and burned in for `T` steps so the kept trajectory is
//! stationary. The random-walk prior (`φ = 1`, no burn-in) is kept for
//! comparison: its positions spread out and network density decays.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::anomaly::{odds_ratio_scale_bernoulli, odds_ratio_scale_poisson, AnomalyFamily, AnomalySpec};
use crate::error::{ensure, ConfigError};
use crate::network::{DynamicNetwork, EdgeKind, Snapshot};
use crate::rng;

/// Poisson rates are capped at `exp(10)`.
pub const MAX_LOG_RATE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorMode {
    Var1,
    OriginalRandomWalk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlsmConfig {
    pub n: usize,
    /// Number of snapshots `T`.
    pub len: usize,
    /// Phase I cutoff recorded on the generated network.
    pub t1: usize,
    pub phi: f64,
    pub sigma2: f64,
    pub a_scale: f64,
    pub beta_in: f64,
    pub beta_out: f64,
    pub radii: Vec<f64>,
    pub n_clusters: usize,
    pub edge_kind: EdgeKind,
    pub prior: PriorMode,
    /// During a radius anomaly, shrink unaffected radii so the total stays 1.
    pub renormalize_radii: bool,
    pub seed: u64,
}

/// Phase I length of 50, shortened for short sequences.
pub(crate) fn default_t1(len: usize) -> usize {
    if len > 50 {
        50
    } else {
        (len / 2).max(1)
    }
}

impl DlsmConfig {
    /// Simulation defaults: `σ² = 1 − φ²`, `β_in = 1`, `β_out = 2`,
    /// `r_i = 1/n`, five clusters, VAR(1) prior.
    pub fn new(n: usize, len: usize, phi: f64, a_scale: f64, edge_kind: EdgeKind, seed: u64) -> Self {
        DlsmConfig {
            n,
            len,
            t1: default_t1(len),
            phi,
            sigma2: 1.0 - phi * phi,
            a_scale,
            beta_in: 1.0,
            beta_out: 2.0,
            radii: vec![1.0 / n as f64; n],
            n_clusters: 5,
            edge_kind,
            prior: PriorMode::Var1,
            renormalize_radii: true,
            seed,
        }
    }

    /// Innovation variance of each latent coordinate.
    pub fn innovation_variance(&self) -> f64 {
        self.a_scale * self.sigma2
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        ensure(self.n >= 2, "n", || format!("need at least 2 nodes, got {}", self.n))?;
        ensure(self.len >= 2, "T", || {
            format!("need at least 2 snapshots, got {}", self.len)
        })?;
        ensure(self.t1 >= 1 && self.t1 < self.len, "t1", || {
            format!("need 1 <= t1 < T, got t1={} T={}", self.t1, self.len)
        })?;
        ensure(self.phi.abs() < 1.0, "phi", || {
            format!("|phi| must be < 1, got {}", self.phi)
        })?;
        ensure(self.sigma2 > 0.0 && self.sigma2.is_finite(), "sigma2", || {
            format!("must be positive, got {}", self.sigma2)
        })?;
        ensure(self.a_scale > 0.0 && self.a_scale.is_finite(), "a_scale", || {
            format!("must be positive, got {}", self.a_scale)
        })?;
        ensure(self.beta_in.is_finite() && self.beta_out.is_finite(), "beta", || {
            "coefficients must be finite".into()
        })?;
        ensure(self.radii.len() == self.n, "radii", || {
            format!("expected {} radii, got {}", self.n, self.radii.len())
        })?;
        ensure(self.radii.iter().all(|&r| r > 0.0 && r.is_finite()), "radii", || {
            "all radii must be positive".into()
        })?;
        let total: f64 = self.radii.iter().sum();
        ensure((total - 1.0).abs() <= 1e-9, "radii", || {
            format!("radii must sum to 1, got {total}")
        })?;
        ensure(self.n_clusters >= 1, "n_clusters", || {
            "need at least one cluster".into()
        })?;
        Ok(())
    }
}

/// Latent positions, `T × n` points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTrajectory {
    n: usize,
    positions: Vec<[f64; 2]>,
}

impl LatentTrajectory {
    pub fn from_positions(n: usize, positions: Vec<[f64; 2]>) -> Self {
        assert!(n > 0 && positions.len().is_multiple_of(n));
        LatentTrajectory { n, positions }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.positions.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Position of node `i` at 1-based time `t`.
    pub fn position(&self, t: usize, i: usize) -> [f64; 2] {
        self.positions[(t - 1) * self.n + i]
    }

    /// All positions at 1-based time `t`.
    pub fn at(&self, t: usize) -> &[[f64; 2]] {
        &self.positions[(t - 1) * self.n..t * self.n]
    }

    pub fn distance(&self, t: usize, i: usize, j: usize) -> f64 {
        let a = self.position(t, i);
        let b = self.position(t, j);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }
}

/// Counters collected while drawing edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerationReport {
    /// Poisson rates that hit the `exp(MAX_LOG_RATE)` cap.
    pub clamped_rates: u64,
}

pub fn generate_latent_positions(cfg: &DlsmConfig) -> Result<LatentTrajectory, ConfigError> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, rng::STREAM_LATENT);
    let n = cfg.n;
    let cluster_sd = 2.0 / n as f64;
    let step = Normal::new(0.0, cfg.innovation_variance().sqrt()).expect("finite sd");
    let spread = Normal::new(0.0, cluster_sd).expect("finite sd");

    let means: Vec<[f64; 2]> = (0..cfg.n_clusters)
        .map(|_| [spread.sample(&mut rng), spread.sample(&mut rng)])
        .collect();
    let mut current: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let m = means[i % cfg.n_clusters];
            [m[0] + step.sample(&mut rng), m[1] + step.sample(&mut rng)]
        })
        .collect();

    let (coef, burn_in) = match cfg.prior {
        PriorMode::Var1 => (cfg.phi, cfg.len),
        PriorMode::OriginalRandomWalk => (1.0, 0),
    };
    let total = burn_in + cfg.len;
    let mut positions = Vec::with_capacity(cfg.len * n);
    for k in 1..=total {
        if k > 1 {
            for x in current.iter_mut() {
                x[0] = coef * x[0] + step.sample(&mut rng);
                x[1] = coef * x[1] + step.sample(&mut rng);
            }
        }
        if k > burn_in {
            positions.extend_from_slice(&current);
        }
    }
    Ok(LatentTrajectory { n, positions })
}

/// Log-odds (or log-rate) of the directed edge `i → j`.
pub fn eta(d: f64, r_i: f64, r_j: f64, beta_in: f64, beta_out: f64) -> Result<f64, ConfigError> {
    ensure(r_i > 0.0 && r_j > 0.0, "radius", || {
        format!("radii must be positive, got r_i={r_i}, r_j={r_j}")
    })?;
    Ok(beta_in * (1.0 - d / r_j) + beta_out * (1.0 - d / r_i))
}

/// Rescales the radii outside `fixed` so that the total matches `baseline`.
fn renormalize(radii: &mut [f64], baseline: &[f64], fixed: &[bool]) {
    let total: f64 = baseline.iter().sum();
    let pinned: f64 = radii.iter().zip(fixed).filter(|p| *p.1).map(|p| *p.0).sum();
    let free: f64 = baseline.iter().zip(fixed).filter(|p| !*p.1).map(|p| *p.0).sum();
    if free <= 0.0 || pinned >= total {
        return;
    }
    let scale = (total - pinned) / free;
    for ((r, &b), &f) in radii.iter_mut().zip(baseline).zip(fixed) {
        if !f {
            *r = b * scale;
        }
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn generate(cfg: &DlsmConfig, anomaly: Option<&AnomalySpec>) -> Result<DynamicNetwork, ConfigError> {
    generate_with_report(cfg, anomaly).map(|(net, _)| net)
}

pub fn generate_with_report(
    cfg: &DlsmConfig,
    anomaly: Option<&AnomalySpec>,
) -> Result<(DynamicNetwork, GenerationReport), ConfigError> {
    let traj = generate_latent_positions(cfg)?;
    generate_from_positions(cfg, &traj, anomaly)
}

/// Draws edges given a latent trajectory. Each snapshot uses its own seeded
/// stream, so snapshots outside an anomaly window are unaffected by it.
pub fn generate_from_positions(
    cfg: &DlsmConfig,
    traj: &LatentTrajectory,
    anomaly: Option<&AnomalySpec>,
) -> Result<(DynamicNetwork, GenerationReport), ConfigError> {
    cfg.validate()?;
    ensure(traj.n() == cfg.n && traj.len() == cfg.len, "trajectory", || {
        format!(
            "shape {}x{} does not match config {}x{}",
            traj.len(),
            traj.n(),
            cfg.len,
            cfg.n
        )
    })?;
    if let Some(a) = anomaly {
        a.validate(cfg.n, cfg.t1, cfg.len)
            .map_err(|e| ConfigError::new("anomaly", e.to_string()))?;
    }
    let n = cfg.n;
    let mask = anomaly.map(|a| a.mask(n)).unwrap_or_else(|| vec![false; n]);
    let mut report = GenerationReport::default();
    let mut snapshots = Vec::with_capacity(cfg.len);
    let mut radii = cfg.radii.clone();
    let max_rate = MAX_LOG_RATE.exp();

    for t in 1..=cfg.len {
        let mut rng = rng::edge_stream(cfg.seed, t);
        let active = anomaly.filter(|a| a.is_active(t));
        radii.copy_from_slice(&cfg.radii);
        let mut odds = 1.0;
        if let Some(a) = active {
            match a.family {
                AnomalyFamily::DegreeParam => {
                    for &i in a.affected() {
                        radii[i] = a.radius_at(t, cfg.radii[i]);
                    }
                    if cfg.renormalize_radii {
                        renormalize(&mut radii, &cfg.radii, &mask);
                    }
                }
                AnomalyFamily::OddsRatio => odds = a.effective_or(t),
            }
        }

        let pos = traj.at(t);
        let mut snap = Snapshot::empty(n, true, cfg.edge_kind);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
                let e = cfg.beta_in * (1.0 - d / radii[j]) + cfg.beta_out * (1.0 - d / radii[i]);
                let boosted = odds != 1.0 && mask[i] && mask[j];
                let w = match cfg.edge_kind {
                    EdgeKind::Binary => {
                        let mut p = logistic(e);
                        if boosted {
                            p = odds_ratio_scale_bernoulli(p, odds);
                        }
                        u32::from(rng.random::<f64>() < p)
                    }
                    EdgeKind::Count => {
                        let mut rate = e.exp();
                        if rate > max_rate {
                            rate = max_rate;
                            report.clamped_rates += 1;
                        }
                        if boosted {
                            rate = odds_ratio_scale_poisson(rate, odds);
                        }
                        draw_poisson(&mut rng, rate)
                    }
                };
                if w > 0 {
                    snap.set_entry(i, j, w);
                }
            }
        }
        snapshots.push(snap);
    }
    Ok((DynamicNetwork::new(snapshots, cfg.t1), report))
}

/// Poisson draw that tolerates a zero or vanishing rate.
pub(crate) fn draw_poisson<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> u32 {
    if rate.is_nan() || rate <= 0.0 {
        // Keep the stream position independent of the rate.
        let _: f64 = rng.random();
        return 0;
    }
    let dist = Poisson::new(rate).expect("positive finite rate");
    dist.sample(rng) as u32
}
