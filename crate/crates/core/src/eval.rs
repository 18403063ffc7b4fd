//! Scoring signal streams against a planted anomaly window.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::monitor::{scoring_start, ChartState, MonitorError, SigmaEstimator, SignalStream};
use crate::stats::{StatKind, StatSeries};

pub const ROC_STEP: f64 = 0.05;
pub const ROC_MAX_Q: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("anomaly window [{0}, {1}] is empty")]
    EmptyWindow(usize, usize),
    #[error("anomaly window [{start}, {end}] does not overlap the scored range [{from}, {to}]")]
    WindowOutside {
        start: usize,
        end: usize,
        from: usize,
        to: usize,
    },
    #[error("no scored times outside the anomaly window")]
    NoNullTimes,
    #[error(transparent)]
    Monitor(#[from] MonitorError),
}

/// Inclusive anomaly window `[start, end]`.
pub type Window = (usize, usize);

fn in_window(t: usize, window: Option<Window>) -> bool {
    window.is_some_and(|(a, b)| t >= a && t <= b)
}

/// 1 if any signal falls inside the window, else 0.
pub fn detection_rate(signals: &SignalStream, window: Window) -> Result<u8, EvalError> {
    let (a, b) = window;
    if b < a {
        return Err(EvalError::EmptyWindow(a, b));
    }
    Ok(u8::from(signals.iter().any(|(t, s)| s && t >= a && t <= b)))
}

/// Fraction of scored times outside the window that signal.
pub fn false_alarm_rate(signals: &SignalStream, window: Option<Window>) -> Result<f64, EvalError> {
    let (mut hits, mut total) = (0usize, 0usize);
    for (t, s) in signals.iter() {
        if !in_window(t, window) {
            total += 1;
            hits += usize::from(s);
        }
    }
    if total == 0 {
        return Err(EvalError::NoNullTimes);
    }
    Ok(hits as f64 / total as f64)
}

/// The ROC grid `−6, −5.95, …, 6`.
pub fn roc_grid() -> Vec<f64> {
    let steps = (2.0 * ROC_MAX_Q / ROC_STEP).round() as usize;
    (0..=steps).map(|i| -ROC_MAX_Q + i as f64 * ROC_STEP).collect()
}

/// ROC points `(FPR, TPR)` from a threshold sweep, anchored at `(0, 0)` and
/// `(1, 1)` and sorted by FPR then TPR.
pub fn roc_curve(
    series: &StatSeries,
    t1: usize,
    estimator: SigmaEstimator,
    window: Window,
) -> Result<Vec<(f64, f64)>, EvalError> {
    let (a, b) = window;
    if b < a {
        return Err(EvalError::EmptyWindow(a, b));
    }
    let from = scoring_start(series, t1);
    let to = series.len();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for t in from..=to {
        let x = series.get(t).ok_or(MonitorError::Undefined(t))?;
        if t >= a && t <= b {
            pos.push(x);
        } else {
            neg.push(x);
        }
    }
    if pos.is_empty() {
        return Err(EvalError::WindowOutside {
            start: a,
            end: b,
            from,
            to,
        });
    }
    if neg.is_empty() {
        return Err(EvalError::NoNullTimes);
    }
    let base = if series.kind == StatKind::Scan {
        None
    } else {
        Some(ChartState::fit(series, t1, estimator, 0.0)?)
    };
    let rate = |xs: &[f64], q: f64| {
        let hits = match base {
            Some(chart) => {
                let chart = chart.with_q(q);
                xs.iter().filter(|&&x| chart.signals(x)).count()
            }
            None => xs.iter().filter(|&&x| x > q).count(),
        };
        hits as f64 / xs.len() as f64
    };
    let mut points: Vec<(f64, f64)> = roc_grid().into_iter().map(|q| (rate(&neg, q), rate(&pos, q))).collect();
    points.push((0.0, 0.0));
    points.push((1.0, 1.0));
    points.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    Ok(points)
}

/// Trapezoidal area under sorted ROC points.
pub fn auc_of(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

pub fn roc_auc(series: &StatSeries, t1: usize, estimator: SigmaEstimator, window: Window) -> Result<f64, EvalError> {
    Ok(auc_of(&roc_curve(series, t1, estimator, window)?))
}

/// Outcome of one statistic on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub scenario_id: String,
    pub replicate: usize,
    pub statistic: StatKind,
    pub dr: Option<u8>,
    pub auc: Option<f64>,
    pub far: Option<f64>,
    pub error: Option<String>,
}

impl EvalRecord {
    pub fn failed(scenario_id: &str, replicate: usize, statistic: StatKind, error: String) -> Self {
        EvalRecord {
            scenario_id: scenario_id.to_string(),
            replicate,
            statistic,
            dr: None,
            auc: None,
            far: None,
            error: Some(error),
        }
    }
}

/// Per-statistic means over replicates. Means skip undefined entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario_id: String,
    pub statistic: StatKind,
    pub mean_dr: Option<f64>,
    pub mean_auc: Option<f64>,
    pub mean_far: Option<f64>,
    pub n_reps: usize,
    pub n_errors: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (c > 0).then(|| s / c as f64)
}

/// Summaries in first-seen statistic order.
pub fn aggregate(records: &[EvalRecord]) -> Vec<Summary> {
    let mut order: Vec<StatKind> = Vec::new();
    for r in records {
        if !order.contains(&r.statistic) {
            order.push(r.statistic);
        }
    }
    order
        .into_iter()
        .map(|stat| {
            let rs: Vec<&EvalRecord> = records.iter().filter(|r| r.statistic == stat).collect();
            Summary {
                scenario_id: rs[0].scenario_id.clone(),
                statistic: stat,
                mean_dr: mean(rs.iter().filter_map(|r| r.dr.map(f64::from))),
                mean_auc: mean(rs.iter().filter_map(|r| r.auc)),
                mean_far: mean(rs.iter().filter_map(|r| r.far)),
                n_reps: rs.iter().filter(|r| r.error.is_none()).count(),
                n_errors: rs.iter().filter(|r| r.error.is_some()).count(),
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Long-format results: `scenario_id,replicate,statistic,metric,value`.
pub fn write_results_csv<W: Write>(records: &[EvalRecord], mut out: W, header: bool) -> std::io::Result<()> {
    if header {
        writeln!(out, "scenario_id,replicate,statistic,metric,value")?;
    }
    for r in records {
        let metrics = [("dr", r.dr.map(f64::from)), ("auc", r.auc), ("far", r.far)];
        for (name, v) in metrics {
            if let Some(v) = v {
                writeln!(out, "{},{},{},{},{}", r.scenario_id, r.replicate, r.statistic, name, v)?;
            }
        }
    }
    Ok(())
}

/// `scenario_id,statistic,mean_dr,mean_auc,mean_far,n_reps`; undefined means are blank.
pub fn write_summary_csv<W: Write>(summaries: &[Summary], mut out: W, header: bool) -> std::io::Result<()> {
    if header {
        writeln!(out, "scenario_id,statistic,mean_dr,mean_auc,mean_far,n_reps")?;
    }
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.scenario_id,
            s.statistic,
            opt(s.mean_dr),
            opt(s.mean_auc),
            opt(s.mean_far),
            s.n_reps
        )?;
    }
    Ok(())
}
