//! Control charts for statistic series.
//!
//! Summary statistics are monitored with a two-sided Shewhart individuals
//! chart: Phase I (`t ≤ t1`) supplies `μ̂` and `σ̂`, and a Phase II value
//! signals when it leaves `μ̂ ± qσ̂`. The scan statistic is already
//! standardized, so it signals when `S*_t > q`.
//!
//! `q` is chosen empirically: on anomaly-free replicates, the false-alarm
//! rate of the chart's own signalling rule is evaluated over a grid and the
//! `q` closest to the target rate wins.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{StatKind, StatSeries};

/// Anti-biasing constant for moving ranges of two observations.
pub const D2: f64 = 1.13;
/// Scale factor turning the median moving range into a standard deviation.
pub const MMR_FACTOR: f64 = 1.047;
/// Lower clamp for the autocorrelation correction factor.
pub const GAMMA_MIN: f64 = 0.05;

pub const CALIBRATION_STEP: f64 = 0.05;
pub const CALIBRATION_MAX_Q: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error("estimator needs at least {need} Phase I values, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("series is undefined at t={0}")]
    Undefined(usize),
    #[error("no null replicates to calibrate on")]
    NoReplicates,
    #[error("target rate must lie in (0, 1), got {0}")]
    Target(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaEstimator {
    Amr,
    Mmr,
    #[default]
    CorrSd,
}

impl SigmaEstimator {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaEstimator::Amr => "amr",
            SigmaEstimator::Mmr => "mmr",
            SigmaEstimator::CorrSd => "corr_sd",
        }
    }

    pub fn estimate(self, x: &[f64]) -> Result<SigmaEstimate, MonitorError> {
        match self {
            SigmaEstimator::Amr => sigma_amr(x).map(SigmaEstimate::plain),
            SigmaEstimator::Mmr => sigma_mmr(x).map(SigmaEstimate::plain),
            SigmaEstimator::CorrSd => sigma_corr(x),
        }
    }
}

impl fmt::Display for SigmaEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SigmaEstimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amr" => Ok(SigmaEstimator::Amr),
            "mmr" => Ok(SigmaEstimator::Mmr),
            "corr_sd" | "corrsd" | "sd" => Ok(SigmaEstimator::CorrSd),
            other => Err(format!("unknown estimator `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaEstimate {
    pub sigma: f64,
    /// The autocorrelation correction hit its lower clamp.
    pub clamped: bool,
}

impl SigmaEstimate {
    fn plain(sigma: f64) -> Self {
        SigmaEstimate { sigma, clamped: false }
    }
}

fn moving_ranges(x: &[f64]) -> Result<Vec<f64>, MonitorError> {
    if x.len() < 2 {
        return Err(MonitorError::TooShort { need: 2, got: x.len() });
    }
    Ok(x.windows(2).map(|w| (w[1] - w[0]).abs()).collect())
}

pub fn sigma_amr(x: &[f64]) -> Result<f64, MonitorError> {
    let mr = moving_ranges(x)?;
    Ok(mr.iter().sum::<f64>() / mr.len() as f64 / D2)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

pub fn sigma_mmr(x: &[f64]) -> Result<f64, MonitorError> {
    Ok(median(moving_ranges(x)?) * MMR_FACTOR)
}

/// Biased sample autocorrelations at lags `1..len`.
pub fn sample_acf(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (1..n)
        .map(|lag| {
            if c0 == 0.0 {
                return 0.0;
            }
            let c: f64 = (0..n - lag).map(|t| (x[t] - mean) * (x[t + lag] - mean)).sum();
            c / c0
        })
        .collect()
}

/// `γ₁ = 1 − 2/(n−1) Σ_κ (1 − κ/n) ρ_κ` over all lags.
pub fn gamma1(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let s: f64 = sample_acf(x)
        .iter()
        .enumerate()
        .map(|(idx, rho)| (1.0 - (idx + 1) as f64 / n) * rho)
        .sum();
    1.0 - 2.0 / (n - 1.0) * s
}

/// Sample standard deviation inflated for autocorrelation, `sqrt(s²/γ₁)`.
pub fn sigma_corr(x: &[f64]) -> Result<SigmaEstimate, MonitorError> {
    let n = x.len();
    if n < 3 {
        return Err(MonitorError::TooShort { need: 3, got: n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let s2 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let g = gamma1(x);
    let clamped = g <= GAMMA_MIN;
    Ok(SigmaEstimate {
        sigma: (s2 / g.max(GAMMA_MIN)).sqrt(),
        clamped,
    })
}

/// Phase I estimates and threshold of one chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartState {
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub q: f64,
    pub two_sided: bool,
    pub clamped: bool,
}

impl ChartState {
    /// Fits `μ̂` and `σ̂` to the values at `t = 1..=t1`.
    pub fn fit(series: &StatSeries, t1: usize, estimator: SigmaEstimator, q: f64) -> Result<Self, MonitorError> {
        let phase1 = phase_one(series, t1)?;
        let est = estimator.estimate(&phase1)?;
        Ok(ChartState {
            mu_hat: phase1.iter().sum::<f64>() / phase1.len() as f64,
            sigma_hat: est.sigma,
            q,
            two_sided: series.kind.two_sided(),
            clamped: est.clamped,
        })
    }

    pub fn with_q(self, q: f64) -> Self {
        ChartState { q, ..self }
    }

    pub fn upper(&self) -> f64 {
        self.mu_hat + self.q * self.sigma_hat
    }

    pub fn lower(&self) -> f64 {
        self.mu_hat - self.q * self.sigma_hat
    }

    pub fn signals(&self, x: f64) -> bool {
        x > self.upper() || (self.two_sided && x < self.lower())
    }
}

fn phase_one(series: &StatSeries, t1: usize) -> Result<Vec<f64>, MonitorError> {
    (1..=t1)
        .map(|t| series.get(t).ok_or(MonitorError::Undefined(t)))
        .collect()
}

/// Binary signals `A_t` for `t = start..start + len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalStream {
    start: usize,
    signals: Vec<bool>,
}

impl SignalStream {
    pub fn new(start: usize, signals: Vec<bool>) -> Self {
        SignalStream { start, signals }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Last scored time.
    pub fn end(&self) -> usize {
        self.start + self.signals.len() - 1
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    /// Signal at `t`, or `None` outside the scored range.
    pub fn get(&self, t: usize) -> Option<bool> {
        self.signals.get(t.checked_sub(self.start)?).copied()
    }

    /// `(t, A_t)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.signals.iter().enumerate().map(move |(i, &a)| (self.start + i, a))
    }

    pub fn count(&self) -> usize {
        self.signals.iter().filter(|&&a| a).count()
    }
}

/// First scored time for a series: after Phase I, and after `2m` for the scan.
pub fn scoring_start(series: &StatSeries, t1: usize) -> usize {
    match series.m {
        Some(m) if series.kind == StatKind::Scan => t1.max(2 * m) + 1,
        _ => t1 + 1,
    }
}

/// Two-sided individuals chart over `t > t1`.
pub fn shewhart_monitor(series: &StatSeries, chart: &ChartState, t1: usize) -> Result<SignalStream, MonitorError> {
    let start = t1 + 1;
    let signals = (start..=series.len())
        .map(|t| {
            series
                .get(t)
                .map(|x| chart.signals(x))
                .ok_or(MonitorError::Undefined(t))
        })
        .collect::<Result<_, _>>()?;
    Ok(SignalStream::new(start, signals))
}

/// Scan threshold rule `S*_t > q` over `t > max(t1, 2m)`.
pub fn scan_monitor(series: &StatSeries, q: f64, t1: usize) -> Result<SignalStream, MonitorError> {
    let start = scoring_start(series, t1);
    let signals = (start..=series.len())
        .map(|t| series.get(t).map(|x| x > q).ok_or(MonitorError::Undefined(t)))
        .collect::<Result<_, _>>()?;
    Ok(SignalStream::new(start, signals))
}

/// Fits the chart (if any) and monitors with the rule for the series kind.
pub fn monitor(
    series: &StatSeries,
    t1: usize,
    estimator: SigmaEstimator,
    q: f64,
) -> Result<SignalStream, MonitorError> {
    if series.kind == StatKind::Scan {
        scan_monitor(series, q, t1)
    } else {
        let chart = ChartState::fit(series, t1, estimator, q)?;
        shewhart_monitor(series, &chart, t1)
    }
}

/// A replicate reduced to what calibration needs: the Phase II values and
/// the fitted chart (a unit chart for the scan).
#[derive(Debug, Clone)]
struct Scores {
    values: Vec<f64>,
    chart: ChartState,
}

impl Scores {
    fn new(series: &StatSeries, t1: usize, estimator: SigmaEstimator) -> Result<Self, MonitorError> {
        let start = scoring_start(series, t1);
        let values = (start..=series.len())
            .map(|t| series.get(t).ok_or(MonitorError::Undefined(t)))
            .collect::<Result<_, _>>()?;
        let chart = if series.kind == StatKind::Scan {
            ChartState {
                mu_hat: 0.0,
                sigma_hat: 1.0,
                q: 0.0,
                two_sided: false,
                clamped: false,
            }
        } else {
            ChartState::fit(series, t1, estimator, 0.0)?
        };
        Ok(Scores { values, chart })
    }

    fn signals(&self, q: f64) -> usize {
        let chart = self.chart.with_q(q);
        self.values.iter().filter(|&&x| chart.signals(x)).count()
    }
}

/// False-alarm rate of one null replicate at multiplier `q`, using the rule
/// the series is monitored with.
pub fn null_far(series: &StatSeries, t1: usize, estimator: SigmaEstimator, q: f64) -> Result<f64, MonitorError> {
    let s = Scores::new(series, t1, estimator)?;
    Ok(s.signals(q) as f64 / s.values.len().max(1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub q: f64,
    /// Pooled false-alarm rate at the chosen `q`.
    pub far: f64,
    /// `(q, FAR(q))` over the whole grid.
    pub curve: Vec<(f64, f64)>,
}

/// The calibration grid `0, 0.05, …, 6`.
pub fn calibration_grid() -> Vec<f64> {
    let steps = (CALIBRATION_MAX_Q / CALIBRATION_STEP).round() as usize;
    (0..=steps).map(|i| i as f64 * CALIBRATION_STEP).collect()
}

/// Picks the grid `q` whose pooled false-alarm rate on the null replicates
/// is closest to `p_target`; ties go to the larger `q`.
pub fn calibrate_q(
    null_replicates: &[StatSeries],
    t1: usize,
    estimator: SigmaEstimator,
    p_target: f64,
) -> Result<Calibration, MonitorError> {
    if null_replicates.is_empty() {
        return Err(MonitorError::NoReplicates);
    }
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(MonitorError::Target(p_target));
    }
    let scores = null_replicates
        .par_iter()
        .map(|s| Scores::new(s, t1, estimator))
        .collect::<Result<Vec<_>, _>>()?;
    let total: usize = scores.iter().map(|s| s.values.len()).sum();
    let curve: Vec<(f64, f64)> = calibration_grid()
        .into_iter()
        .map(|q| {
            let hits: usize = scores.iter().map(|s| s.signals(q)).sum();
            (q, hits as f64 / total.max(1) as f64)
        })
        .collect();
    let &(q, far) = curve
        .iter()
        .min_by(|a, b| {
            let da = (a.1 - p_target).abs();
            let db = (b.1 - p_target).abs();
            da.total_cmp(&db).then(b.0.total_cmp(&a.0))
        })
        .expect("non-empty grid");
    Ok(Calibration { q, far, curve })
}
