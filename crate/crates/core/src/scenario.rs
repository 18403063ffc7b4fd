//! Declarative Monte Carlo experiments.
//!
//! A scenario names a generator cell (model, edge kind, `φ`, target density),
//! an optional anomaly, and the statistics to monitor. [`run`] calibrates one
//! `q` per statistic on dedicated null replicates, then scores every
//! replicate. Replicate `r` uses seed `base_seed + r`; calibration replicate
//! `r'` uses `base_seed + reps + r'`, so results do not depend on scheduling.
//!
//! Scenario files are TOML with one `[[scenario]]` table per entry:
//!
//! ```toml
//! [[scenario]]
//! id = "ddcsbm-or"
//! model = "ddcsbm"
//! kind = "binary"
//! phi = 0.5
//! target_density = 0.11
//! grid = "phi_sweep"
//! reps = 200
//! statistics = ["density", "scan"]
//!
//! [scenario.anomaly]
//! family = "odds_ratio"
//! profile = "sustained"
//! n_affected = 33
//! cpl = 10
//! magnitude = 2.5
//! ```

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anomaly::{AnomalyFamily, AnomalySpec, Profile};
use crate::ddcsbm::{self, DdcsbmConfig, Rescale};
use crate::dlsm::{self, DlsmConfig, PriorMode};
use crate::error::ConfigError;
use crate::eval::{self, aggregate, EvalRecord, Summary};
use crate::monitor::{self, calibrate_q, Calibration, SigmaEstimator};
use crate::network::{DynamicNetwork, EdgeKind};
use crate::stats::{self, StatKind, StatSeries};

const BUILTIN_CATALOG: &str = include_str!("../data/catalog.toml");

pub const PHI_GRID: [f64; 7] = [0.1, 0.3, 0.5, 0.75, 0.9, 0.95, 0.99];
pub const DENSITY_GRID: [f64; 7] = [0.21, 0.18, 0.15, 0.12, 0.09, 0.06, 0.03];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("scenario `{id}`: {source}")]
    Invalid { id: String, source: ConfigError },
    #[error("no catalog cell for {model} {kind} {grid} at E[W]={target}")]
    MissingCell {
        model: Model,
        kind: EdgeKind,
        grid: Grid,
        target: f64,
    },
    #[error("calibration of {stat} failed: {reason}")]
    Calibration { stat: StatKind, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Dlsm,
    Ddcsbm,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Dlsm => "dlsm",
            Model::Ddcsbm => "ddcsbm",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dlsm" => Ok(Model::Dlsm),
            "ddcsbm" => Ok(Model::Ddcsbm),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

/// Which family of density constants a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    /// Density varies with `φ = 0.5`.
    #[default]
    Density,
    /// `φ` varies with density held near 0.11.
    PhiSweep,
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grid::Density => "density",
            Grid::PhiSweep => "phi_sweep",
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogCell {
    model: Model,
    kind: EdgeKind,
    grid: Grid,
    target: Vec<f64>,
    a: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[allow(dead_code)]
    version: u32,
    cell: Vec<CatalogCell>,
}

/// Density-scaling constants keyed by model, edge kind, grid and target.
#[derive(Debug, Clone)]
pub struct Catalog {
    cells: Vec<CatalogCell>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_CATALOG).expect("bundled catalog parses")
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let file: CatalogFile = toml::from_str(text)?;
        for c in &file.cell {
            if c.target.len() != c.a.len() {
                return Err(ScenarioError::Invalid {
                    id: "catalog".into(),
                    source: ConfigError::new("a", "target and a lengths differ"),
                });
            }
        }
        Ok(Catalog { cells: file.cell })
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Tabulated constant for an exact target; no interpolation.
    pub fn lookup_a_scale(&self, model: Model, kind: EdgeKind, grid: Grid, target: f64) -> Result<f64, ScenarioError> {
        self.cells
            .iter()
            .filter(|c| c.model == model && c.kind == kind && c.grid == grid)
            .flat_map(|c| c.target.iter().zip(&c.a))
            .find(|(t, _)| (**t - target).abs() < 1e-9)
            .map(|(_, a)| *a)
            .ok_or(ScenarioError::MissingCell {
                model,
                kind,
                grid,
                target,
            })
    }

    /// Every `(model, kind, grid, target, a)` entry.
    pub fn cells(&self) -> Vec<(Model, EdgeKind, Grid, f64, f64)> {
        self.cells
            .iter()
            .flat_map(|c| {
                c.target
                    .iter()
                    .zip(&c.a)
                    .map(move |(t, a)| (c.model, c.kind, c.grid, *t, *a))
            })
            .collect()
    }
}

pub fn lookup_a_scale(model: Model, kind: EdgeKind, grid: Grid, target: f64) -> Result<f64, ScenarioError> {
    Catalog::builtin().lookup_a_scale(model, kind, grid, target)
}

/// Anomaly declaration; affects nodes `0..n_affected`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnomalyDecl {
    pub family: AnomalyFamily,
    pub profile: Profile,
    pub n_affected: usize,
    #[serde(default = "default_t_start")]
    pub t_start: usize,
    pub cpl: usize,
    pub magnitude: f64,
}

impl AnomalyDecl {
    pub fn to_spec(&self) -> AnomalySpec {
        AnomalySpec::first_nodes(
            self.family,
            self.profile,
            self.n_affected,
            self.t_start,
            self.cpl,
            self.magnitude,
        )
    }
}

fn default_t_start() -> usize {
    61
}
fn default_n() -> usize {
    100
}
fn default_len() -> usize {
    110
}
fn default_t1() -> usize {
    50
}
fn default_reps() -> usize {
    200
}
fn default_m() -> usize {
    20
}
fn default_p() -> f64 {
    0.03
}
fn default_stats() -> Vec<StatKind> {
    StatKind::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub model: Model,
    pub kind: EdgeKind,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(rename = "T", alias = "len", default = "default_len")]
    pub len: usize,
    #[serde(default = "default_t1")]
    pub t1: usize,
    pub phi: f64,
    pub target_density: f64,
    #[serde(default)]
    pub grid: Grid,
    /// Overrides the catalog constant.
    #[serde(default)]
    pub a_scale: Option<f64>,
    #[serde(default)]
    pub anomaly: Option<AnomalyDecl>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_stats")]
    pub statistics: Vec<StatKind>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub estimator: SigmaEstimator,
    #[serde(default = "default_p")]
    pub p_target: f64,
    #[serde(default = "default_reps")]
    pub calibration_reps: usize,
    /// Uses this `q` for every statistic instead of calibrating.
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub prior: Option<PriorMode>,
    #[serde(default)]
    pub rescale: Rescale,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenario: Vec<Scenario>,
}

pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>, ScenarioError> {
    let file: ScenarioFile = toml::from_str(text)?;
    Ok(file.scenario)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>, ScenarioError> {
    parse_scenarios(&std::fs::read_to_string(path)?)
}

/// A generator ready to produce replicates.
#[derive(Debug, Clone)]
pub enum Generator {
    Dlsm(DlsmConfig),
    Ddcsbm(DdcsbmConfig),
}

impl Generator {
    pub fn generate(&self, seed: u64, anomaly: Option<&AnomalySpec>) -> Result<DynamicNetwork, ConfigError> {
        match self {
            Generator::Dlsm(c) => dlsm::generate(&DlsmConfig { seed, ..c.clone() }, anomaly),
            Generator::Ddcsbm(c) => ddcsbm::generate(&DdcsbmConfig { seed, ..c.clone() }, anomaly),
        }
    }
}

impl Scenario {
    /// A scenario with all defaults and no anomaly.
    pub fn new(id: &str, model: Model, kind: EdgeKind, phi: f64, target_density: f64) -> Self {
        Scenario {
            id: id.to_string(),
            model,
            kind,
            n: default_n(),
            len: default_len(),
            t1: default_t1(),
            phi,
            target_density,
            grid: Grid::Density,
            a_scale: None,
            anomaly: None,
            reps: default_reps(),
            base_seed: 0,
            statistics: default_stats(),
            m: default_m(),
            estimator: SigmaEstimator::CorrSd,
            p_target: default_p(),
            calibration_reps: default_reps(),
            q: None,
            prior: None,
            rescale: Rescale::Mean,
        }
    }

    fn invalid(&self, field: &'static str, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Invalid {
            id: self.id.clone(),
            source: ConfigError::new(field, reason),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.phi > -1.0 && self.phi < 1.0) {
            return Err(self.invalid("phi", format!("must lie in (-1, 1), got {}", self.phi)));
        }
        if !(self.target_density > 0.0 && self.target_density < 1.0) {
            return Err(self.invalid("target_density", "must lie in (0, 1)"));
        }
        if self.reps == 0 {
            return Err(self.invalid("reps", "must be at least 1"));
        }
        if self.calibration_reps == 0 && self.q.is_none() {
            return Err(self.invalid("calibration_reps", "must be at least 1"));
        }
        if self.statistics.is_empty() {
            return Err(self.invalid("statistics", "at least one statistic is required"));
        }
        if self.statistics.contains(&StatKind::Scan) && self.len <= 2 * self.m {
            return Err(self.invalid("m", format!("scan needs T > 2m, got T={} m={}", self.len, self.m)));
        }
        if let Some(a) = &self.anomaly {
            a.to_spec()
                .validate(self.n, self.t1, self.len)
                .map_err(|e| self.invalid("anomaly", e.to_string()))?;
        }
        Ok(())
    }

    /// Constant used to scale the generator, from the override or the catalog.
    pub fn resolve_a_scale(&self, catalog: &Catalog) -> Result<f64, ScenarioError> {
        match self.a_scale {
            Some(a) => Ok(a),
            None => catalog.lookup_a_scale(self.model, self.kind, self.grid, self.target_density),
        }
    }

    pub fn generator(&self, catalog: &Catalog) -> Result<Generator, ScenarioError> {
        self.validate()?;
        let a = self.resolve_a_scale(catalog)?;
        let wrap = |e: ConfigError| ScenarioError::Invalid {
            id: self.id.clone(),
            source: e,
        };
        let generator = match self.model {
            Model::Dlsm => {
                let mut cfg = DlsmConfig::new(self.n, self.len, self.phi, a, self.kind, self.base_seed);
                cfg.t1 = self.t1;
                cfg.sigma2 = 1.0;
                cfg.prior = self.prior.unwrap_or(PriorMode::Var1);
                cfg.validate().map_err(wrap)?;
                Generator::Dlsm(cfg)
            }
            Model::Ddcsbm => {
                let mut cfg = DdcsbmConfig::new(self.n, self.len, self.phi, a, self.kind, self.base_seed);
                cfg.t1 = self.t1;
                cfg.rescale = self.rescale;
                cfg.validate().map_err(wrap)?;
                Generator::Ddcsbm(cfg)
            }
        };
        Ok(generator)
    }

    pub fn replicate_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add(r as u64)
    }

    pub fn calibration_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add((self.reps + r) as u64)
    }

    /// Cells of the full design around this scenario: every `φ` at density
    /// 0.11, and every tabulated density at `φ = 0.5`.
    pub fn full_grid(&self) -> Vec<Scenario> {
        let sweep = PHI_GRID.iter().map(|&phi| Scenario {
            id: format!("{}-phi{}", self.id, phi),
            phi,
            target_density: 0.11,
            grid: Grid::PhiSweep,
            a_scale: None,
            ..self.clone()
        });
        let dens = DENSITY_GRID.iter().map(|&d| Scenario {
            id: format!("{}-w{}", self.id, d),
            phi: 0.5,
            target_density: d,
            grid: Grid::Density,
            a_scale: None,
            ..self.clone()
        });
        sweep.chain(dens).collect()
    }
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub scenario_id: String,
    pub calibrations: Vec<(StatKind, Calibration)>,
    pub records: Vec<EvalRecord>,
    pub summaries: Vec<Summary>,
}

impl ScenarioResult {
    pub fn q_for(&self, stat: StatKind) -> Option<f64> {
        self.calibrations.iter().find(|(s, _)| *s == stat).map(|(_, c)| c.q)
    }
}

/// Null series for calibration: `series[stat_index][replicate]`.
pub fn null_series(scenario: &Scenario, generator: &Generator, seeds: &[u64]) -> Result<Vec<Vec<StatSeries>>, String> {
    let per_rep: Vec<Vec<StatSeries>> = seeds
        .par_iter()
        .map(|&seed| {
            let net = generator.generate(seed, None).map_err(|e| e.to_string())?;
            stats::all_series(&net, &scenario.statistics, scenario.m).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let mut by_stat = vec![Vec::with_capacity(seeds.len()); scenario.statistics.len()];
    for rep in per_rep {
        for (dst, s) in by_stat.iter_mut().zip(rep) {
            dst.push(s);
        }
    }
    Ok(by_stat)
}

/// Calibrates one `q` per statistic on null replicates.
pub fn calibrate(scenario: &Scenario, catalog: &Catalog) -> Result<Vec<(StatKind, Calibration)>, ScenarioError> {
    let generator = scenario.generator(catalog)?;
    let seeds: Vec<u64> = (0..scenario.calibration_reps)
        .map(|r| scenario.calibration_seed(r))
        .collect();
    let by_stat = null_series(scenario, &generator, &seeds).map_err(|reason| ScenarioError::Calibration {
        stat: scenario.statistics[0],
        reason,
    })?;
    scenario
        .statistics
        .iter()
        .zip(by_stat)
        .map(|(&stat, series)| {
            calibrate_q(&series, scenario.t1, scenario.estimator, scenario.p_target)
                .map(|c| (stat, c))
                .map_err(|e| ScenarioError::Calibration {
                    stat,
                    reason: e.to_string(),
                })
        })
        .collect()
}

fn score(
    scenario: &Scenario,
    replicate: usize,
    series: &StatSeries,
    q: f64,
    window: Option<(usize, usize)>,
) -> Result<EvalRecord, String> {
    let signals = monitor::monitor(series, scenario.t1, scenario.estimator, q).map_err(|e| e.to_string())?;
    let (dr, auc) = match window {
        Some(w) => (
            Some(eval::detection_rate(&signals, w).map_err(|e| e.to_string())?),
            Some(eval::roc_auc(series, scenario.t1, scenario.estimator, w).map_err(|e| e.to_string())?),
        ),
        None => (None, None),
    };
    let far = eval::false_alarm_rate(&signals, window).ok();
    Ok(EvalRecord {
        scenario_id: scenario.id.clone(),
        replicate,
        statistic: series.kind,
        dr,
        auc,
        far,
        error: None,
    })
}

/// Scores replicates given the `q` of each statistic (in `statistics` order).
pub fn score_replicates(scenario: &Scenario, generator: &Generator, qs: &[f64]) -> Vec<EvalRecord> {
    let spec = scenario.anomaly.as_ref().map(AnomalyDecl::to_spec);
    let window = spec.as_ref().map(AnomalySpec::window);
    let per_rep: Vec<Vec<EvalRecord>> = (0..scenario.reps)
        .into_par_iter()
        .map(|r| {
            let fail = |e: String| {
                scenario
                    .statistics
                    .iter()
                    .map(|&s| EvalRecord::failed(&scenario.id, r, s, e.clone()))
                    .collect::<Vec<_>>()
            };
            let net = match generator.generate(scenario.replicate_seed(r), spec.as_ref()) {
                Ok(net) => net,
                Err(e) => return fail(e.to_string()),
            };
            let all = match stats::all_series(&net, &scenario.statistics, scenario.m) {
                Ok(all) => all,
                Err(e) => return fail(e.to_string()),
            };
            all.iter()
                .zip(qs)
                .map(|(series, &q)| {
                    score(scenario, r, series, q, window)
                        .unwrap_or_else(|e| EvalRecord::failed(&scenario.id, r, series.kind, e))
                })
                .collect()
        })
        .collect();
    per_rep.into_iter().flatten().collect()
}

pub fn run(scenario: &Scenario, catalog: &Catalog) -> Result<ScenarioResult, ScenarioError> {
    let generator = scenario.generator(catalog)?;
    let calibrations = match scenario.q {
        Some(q) => scenario
            .statistics
            .iter()
            .map(|&s| {
                (
                    s,
                    Calibration {
                        q,
                        far: f64::NAN,
                        curve: Vec::new(),
                    },
                )
            })
            .collect(),
        None => calibrate(scenario, catalog)?,
    };
    let qs: Vec<f64> = calibrations.iter().map(|(_, c)| c.q).collect();
    let records = score_replicates(scenario, &generator, &qs);
    let summaries = aggregate(&records);
    Ok(ScenarioResult {
        scenario_id: scenario.id.clone(),
        calibrations,
        records,
        summaries,
    })
}
