//! Parameter-level anomaly injection.
//!
//! Two families are supported. An odds-ratio anomaly rescales edge
//! probabilities (or Poisson rates) on pairs internal to the affected node
//! set. A degree-parameter anomaly changes the DLSM radius of affected nodes
//! or multiplies their DDCSBM propensity. Both come in a sustained form and a
//! gradual form that ramps linearly across the anomaly window.
//!
//! Generators consult an [`AnomalySpec`] per snapshot; outside the window
//! every hook is the identity, so generation there is unchanged.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyFamily {
    OddsRatio,
    DegreeParam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Sustained,
    Gradual,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnomalyError {
    #[error("affected node {node} out of range for n={n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("anomaly window [{start}, {end}] must lie in phase II ({t1}, {len}]")]
    Window {
        start: usize,
        end: usize,
        t1: usize,
        len: usize,
    },
    #[error("anomaly magnitude must be positive and finite, got {0}")]
    Magnitude(f64),
    #[error("change-point length must be at least 1")]
    EmptyWindow,
}

/// A planted anomaly. `t_start` is 1-based; nodes are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalySpec {
    pub family: AnomalyFamily,
    pub profile: Profile,
    affected: Vec<usize>,
    pub t_start: usize,
    pub cpl: usize,
    /// Target odds ratio / multiplier `C` / new radius, depending on family and model.
    pub magnitude: f64,
}

impl AnomalySpec {
    pub fn new(
        family: AnomalyFamily,
        profile: Profile,
        mut affected: Vec<usize>,
        t_start: usize,
        cpl: usize,
        magnitude: f64,
    ) -> Self {
        affected.sort_unstable();
        affected.dedup();
        AnomalySpec {
            family,
            profile,
            affected,
            t_start,
            cpl,
            magnitude,
        }
    }

    /// Affects nodes `0..count`.
    pub fn first_nodes(
        family: AnomalyFamily,
        profile: Profile,
        count: usize,
        t_start: usize,
        cpl: usize,
        magnitude: f64,
    ) -> Self {
        Self::new(family, profile, (0..count).collect(), t_start, cpl, magnitude)
    }

    pub fn affected(&self) -> &[usize] {
        &self.affected
    }

    /// Last anomalous time (inclusive).
    pub fn t_end(&self) -> usize {
        self.t_start + self.cpl - 1
    }

    pub fn window(&self) -> (usize, usize) {
        (self.t_start, self.t_end())
    }

    pub fn is_active(&self, t: usize) -> bool {
        self.cpl > 0 && t >= self.t_start && t <= self.t_end()
    }

    /// Membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.affected {
            if i < n {
                m[i] = true;
            }
        }
        m
    }

    pub fn validate(&self, n: usize, t1: usize, len: usize) -> Result<(), AnomalyError> {
        if let Some(&node) = self.affected.iter().find(|&&i| i >= n) {
            return Err(AnomalyError::NodeOutOfRange { node, n });
        }
        if self.cpl == 0 {
            return Err(AnomalyError::EmptyWindow);
        }
        if self.t_start <= t1 || self.t_end() > len {
            return Err(AnomalyError::Window {
                start: self.t_start,
                end: self.t_end(),
                t1,
                len,
            });
        }
        if !(self.magnitude > 0.0 && self.magnitude.is_finite()) {
            return Err(AnomalyError::Magnitude(self.magnitude));
        }
        Ok(())
    }

    /// Fraction of the ramp completed at time `t`: `s / cpl` with
    /// `s = t - t_start + 1`; 1 for sustained anomalies, 0 outside the window.
    fn ramp(&self, t: usize) -> f64 {
        if !self.is_active(t) {
            return 0.0;
        }
        match self.profile {
            Profile::Sustained => 1.0,
            Profile::Gradual => (t - self.t_start + 1) as f64 / self.cpl as f64,
        }
    }

    /// Odds ratio (or multiplier `C`) in force at time `t`. Gradual profiles
    /// ramp linearly from 1 and reach `magnitude` on the last anomalous step.
    pub fn effective_or(&self, t: usize) -> f64 {
        1.0 + (self.magnitude - 1.0) * self.ramp(t)
    }

    /// DLSM radius of an affected node at time `t`, interpolating from
    /// `baseline` to `magnitude` for gradual anomalies.
    pub fn radius_at(&self, t: usize, baseline: f64) -> f64 {
        baseline + (self.magnitude - baseline) * self.ramp(t)
    }
}

/// Rescales a Bernoulli probability so that the odds change by `or_val`:
/// `p1 = C·p0` with `C = OR / (1 - p0 + OR·p0)`.
pub fn odds_ratio_scale_bernoulli(p0: f64, or_val: f64) -> f64 {
    let denom = 1.0 - p0 + or_val * p0;
    if denom <= 0.0 {
        return p0;
    }
    (or_val / denom * p0).clamp(0.0, 1.0)
}

/// Poisson rates are scaled directly.
pub fn odds_ratio_scale_poisson(rate: f64, or_val: f64) -> f64 {
    rate * or_val
}
