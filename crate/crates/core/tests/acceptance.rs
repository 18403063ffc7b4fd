//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Pass criterion numbers as arguments to run a subset:
//! `cargo test -p netmon --test acceptance -- 4 5`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use netmon::dlsm::{self, DlsmConfig, PriorMode};
use netmon::eval::roc_auc;
use netmon::monitor::{ChartState, SigmaEstimator};
use netmon::scenario::{self, parse_scenarios, Catalog, Grid, Model, Scenario, ScenarioResult};
use netmon::stats::{self, density};
use netmon::{DynamicNetwork, EdgeKind, Snapshot, StatKind, StatSeries};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const DENSITY_TOL: f64 = 0.02;
const DENSITY_REPS: usize = 50;
const PHASE_ONE: usize = 50;

const FAR_BAND: (f64, f64) = (0.015, 0.045);

const ESTIMATOR_Q: f64 = 3.0;
const ESTIMATOR_REPS: u64 = 200;
const ESTIMATOR_MIN_PANELS: usize = 3;

const ROW7_DR_DENSITY_MIN: f64 = 0.95;
const ROW7_DR_SCAN: (f64, f64) = (0.73, 0.15);
const ROW12_DR_DENSITY_MAX: f64 = 0.30;
const ROW12_DR_DEGREE_MIN: f64 = 0.90;
const ROW18_AUC_DENSITY_MIN: f64 = 0.95;
const ROW18_AUC_DIFF: (f64, f64) = (0.78, 0.10);

const TREND_REPS: u64 = 50;
const TREND_SE: f64 = 2.0;
const TREND_MIN_SHARE: f64 = 0.90;

const ORACLE_TOL: f64 = 1e-12;
const SCAN_FIXTURES: u64 = 100;
const ROC_FIXTURES: u64 = 50;

/// Phase I cutoff of the oracle ROC fixtures (`T = 30`).
const FIXTURE_T1: usize = 20;

/// `E[W] = 0.11` at `φ = 0.5` for the latent space model has no tabulated
/// constant; these were found by bisection on Phase I density.
const DLSM_MID_BINARY: f64 = 0.00043;
const DLSM_MID_COUNT: f64 = 0.0015;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: String) -> Self {
        Outcome {
            pass,
            summary,
            details: Vec::new(),
        }
    }
}

fn within(x: f64, (centre, tol): (f64, f64)) -> bool {
    (x - centre).abs() <= tol
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (s, c) = xs.into_iter().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    s / c as f64
}

fn phase_one_density(s: &Scenario, catalog: &Catalog) -> f64 {
    let g = s.generator(catalog).expect("catalog cell");
    let per_rep: Vec<f64> = (0..DENSITY_REPS as u64)
        .into_par_iter()
        .map(|r| {
            let net = g.generate(s.base_seed + r, None).expect("valid generator");
            mean((1..=PHASE_ONE).map(|t| density(net.at(t)).unwrap()))
        })
        .collect();
    mean(per_rep)
}

fn density_targeting() -> Outcome {
    let catalog = Catalog::builtin();
    let mut details = Vec::new();
    let (mut hit, mut total) = (0, 0);
    let mut worst: f64 = 0.0;
    for (model, kind, grid, target, a) in catalog.cells() {
        let s = Scenario {
            grid,
            base_seed: 7_000,
            ..Scenario::new("density", model, kind, 0.5, target)
        };
        let got = phase_one_density(&s, &catalog);
        let ok = (got - target).abs() <= DENSITY_TOL;
        let line = format!("{model:?} {kind} {grid:?} target {target} (a = {a}): mean density {got:.4}");
        if grid == Grid::Density {
            total += 1;
            hit += usize::from(ok);
            worst = worst.max((got - target).abs());
            if !ok {
                details.push(format!("miss  {line}"));
            }
        } else {
            details.push(format!("info  {line}"));
        }
    }
    Outcome {
        pass: hit == total,
        summary: format!(
            "density targeting: {hit}/{total} tabulated cells within ±{DENSITY_TOL} (largest gap {worst:.4})"
        ),
        details,
    }
}

fn mid_density(id: &str, model: Model, kind: EdgeKind) -> Scenario {
    let mut s = Scenario::new(id, model, kind, 0.5, 0.11);
    match model {
        Model::Ddcsbm => s.grid = Grid::PhiSweep,
        Model::Dlsm => {
            s.a_scale = Some(match kind {
                EdgeKind::Binary => DLSM_MID_BINARY,
                EdgeKind::Count => DLSM_MID_COUNT,
            })
        }
    }
    s
}

fn calibration() -> Outcome {
    let catalog = Catalog::builtin();
    let mut details = Vec::new();
    let mut pass = true;
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for (model, kind) in [
        (Model::Dlsm, EdgeKind::Binary),
        (Model::Dlsm, EdgeKind::Count),
        (Model::Ddcsbm, EdgeKind::Binary),
        (Model::Ddcsbm, EdgeKind::Count),
    ] {
        let s = Scenario {
            base_seed: 11_000,
            ..mid_density("null", model, kind)
        };
        let res = scenario::run(&s, &catalog).expect("null run");
        for sm in &res.summaries {
            let far = sm.mean_far.unwrap_or(f64::NAN);
            let ok = far >= FAR_BAND.0 && far <= FAR_BAND.1;
            pass &= ok;
            range = (range.0.min(far), range.1.max(far));
            details.push(format!(
                "{}  {model:?} {kind} {:10} q = {:.2}  held-out FAR {far:.4}",
                if ok { "ok  " } else { "miss" },
                sm.statistic.as_str(),
                res.q_for(sm.statistic).unwrap()
            ));
        }
    }
    Outcome {
        pass,
        summary: format!(
            "calibration: held-out null FAR in [{:.4}, {:.4}] across 4 models x 5 statistics (band {FAR_BAND:?})",
            range.0, range.1
        ),
        details,
    }
}

/// Upper-limit false-alarm rate over Phase II of null replicates.
fn upper_far(nets: &[DynamicNetwork], stat: StatKind, est: SigmaEstimator) -> f64 {
    let per_rep: Vec<f64> = nets
        .par_iter()
        .map(|net| {
            let x = stats::series(net, stat, 20).unwrap();
            let chart = ChartState {
                two_sided: false,
                ..ChartState::fit(&x, PHASE_ONE, est, ESTIMATOR_Q).unwrap()
            };
            let phase2 = PHASE_ONE + 1..=x.len();
            let n = phase2.clone().count() as f64;
            phase2.filter(|&t| chart.signals(x.get(t).unwrap())).count() as f64 / n
        })
        .collect();
    mean(per_rep)
}

fn estimator_comparison() -> Outcome {
    let catalog = Catalog::builtin();
    let panels = [
        Scenario::new("dlsm count 0.03", Model::Dlsm, EdgeKind::Count, 0.5, 0.03),
        Scenario::new("dlsm count 0.18", Model::Dlsm, EdgeKind::Count, 0.5, 0.18),
        Scenario {
            grid: Grid::PhiSweep,
            ..Scenario::new("ddcsbm count phi 0.10", Model::Ddcsbm, EdgeKind::Count, 0.1, 0.11)
        },
        Scenario {
            grid: Grid::PhiSweep,
            ..Scenario::new("ddcsbm count phi 0.95", Model::Ddcsbm, EdgeKind::Count, 0.95, 0.11)
        },
    ];
    let stats = [StatKind::Density, StatKind::Sum, StatKind::MaxDegree, StatKind::Diff];
    let mut held = 0;
    let mut details = Vec::new();
    for s in &panels {
        let g = s.generator(&catalog).unwrap();
        let nets: Vec<DynamicNetwork> = (0..ESTIMATOR_REPS)
            .into_par_iter()
            .map(|r| g.generate(13_000 + r, None).unwrap())
            .collect();
        let mmr = mean(stats.iter().map(|&k| upper_far(&nets, k, SigmaEstimator::Mmr)));
        let sd = mean(stats.iter().map(|&k| upper_far(&nets, k, SigmaEstimator::CorrSd)));
        let ok = mmr >= sd;
        held += usize::from(ok);
        details.push(format!(
            "{}  {}: FAR mmr {mmr:.4} vs corr_sd {sd:.4}",
            if ok { "ok  " } else { "miss" },
            s.id
        ));
    }
    Outcome {
        pass: held >= ESTIMATOR_MIN_PANELS,
        summary: format!(
            "estimator comparison: FAR(MMR) >= FAR(CorrSD) at q = {ESTIMATOR_Q} in {held}/4 panels (need {ESTIMATOR_MIN_PANELS})"
        ),
        details,
    }
}

fn run_row(text: &str) -> ScenarioResult {
    let s = parse_scenarios(text).unwrap().remove(0);
    scenario::run(&s, &Catalog::builtin()).unwrap()
}

fn summary_of(res: &ScenarioResult, stat: StatKind) -> &netmon::eval::Summary {
    res.summaries.iter().find(|s| s.statistic == stat).unwrap()
}

fn row_details(res: &ScenarioResult) -> Vec<String> {
    res.summaries
        .iter()
        .map(|s| {
            format!(
                "{:10} q = {:.2}  DR {:.3}  AUC {:.3}  FAR {:.4}",
                s.statistic.as_str(),
                res.q_for(s.statistic).unwrap(),
                s.mean_dr.unwrap_or(f64::NAN),
                s.mean_auc.unwrap_or(f64::NAN),
                s.mean_far.unwrap_or(f64::NAN)
            )
        })
        .collect()
}

const ROW7: &str = r#"
[[scenario]]
id = "sbm-or-2.5"
model = "ddcsbm"
kind = "binary"
phi = 0.5
target_density = 0.11
grid = "phi_sweep"
base_seed = 1000
[scenario.anomaly]
family = "odds_ratio"
profile = "sustained"
n_affected = 33
cpl = 10
magnitude = 2.5
"#;

const ROW12: &str = r#"
[[scenario]]
id = "lsm-radius"
model = "dlsm"
kind = "binary"
phi = 0.5
target_density = 0.11
a_scale = 0.00043
base_seed = 2000
[scenario.anomaly]
family = "degree_param"
profile = "sustained"
n_affected = 15
cpl = 10
magnitude = 0.020
"#;

const ROW18: &str = r#"
[[scenario]]
id = "sbm-or-1.5"
model = "ddcsbm"
kind = "binary"
phi = 0.5
target_density = 0.11
grid = "phi_sweep"
base_seed = 3000
[scenario.anomaly]
family = "odds_ratio"
profile = "sustained"
n_affected = 72
cpl = 10
magnitude = 1.5
"#;

fn odds_ratio_row() -> Outcome {
    let res = run_row(ROW7);
    let w = summary_of(&res, StatKind::Density).mean_dr.unwrap();
    let scan = summary_of(&res, StatKind::Scan).mean_dr.unwrap();
    Outcome {
        pass: w >= ROW7_DR_DENSITY_MIN && within(scan, ROW7_DR_SCAN),
        summary: format!(
            "SBM binary, 33 nodes, OR 2.5: DR(density) {w:.3} (need >= {ROW7_DR_DENSITY_MIN}), DR(scan) {scan:.3} (need {} ± {})",
            ROW7_DR_SCAN.0, ROW7_DR_SCAN.1
        ),
        details: row_details(&res),
    }
}

fn radius_row() -> Outcome {
    let res = run_row(ROW12);
    let w = summary_of(&res, StatKind::Density).mean_dr.unwrap();
    let d = summary_of(&res, StatKind::MaxDegree).mean_dr.unwrap();
    let diff = summary_of(&res, StatKind::Diff).mean_dr.unwrap();
    Outcome {
        pass: w <= ROW12_DR_DENSITY_MAX && d >= ROW12_DR_DEGREE_MIN && diff >= ROW12_DR_DEGREE_MIN,
        summary: format!(
            "latent space binary, 15-node radius shift: DR(density) {w:.3} (need <= {ROW12_DR_DENSITY_MAX}), DR(max degree) {d:.3}, DR(diff) {diff:.3} (need >= {ROW12_DR_DEGREE_MIN})"
        ),
        details: row_details(&res),
    }
}

fn weak_odds_ratio_row() -> Outcome {
    let res = run_row(ROW18);
    let w = summary_of(&res, StatKind::Density).mean_auc.unwrap();
    let diff = summary_of(&res, StatKind::Diff).mean_auc.unwrap();
    Outcome {
        pass: w >= ROW18_AUC_DENSITY_MIN && within(diff, ROW18_AUC_DIFF),
        summary: format!(
            "SBM binary, 72 nodes, OR 1.5: AUC(density) {w:.3} (need >= {ROW18_AUC_DENSITY_MIN}), AUC(diff) {diff:.3} (need {} ± {})",
            ROW18_AUC_DIFF.0, ROW18_AUC_DIFF.1
        ),
        details: row_details(&res),
    }
}

/// OLS slope of `y` on `t = 1..len` divided by its standard error.
fn slope_t(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let tbar = (n + 1.0) / 2.0;
    let ybar = mean(y.iter().copied());
    let sxx: f64 = (1..=y.len()).map(|t| (t as f64 - tbar).powi(2)).sum();
    let b = (1..=y.len())
        .map(|t| (t as f64 - tbar) * (y[t - 1] - ybar))
        .sum::<f64>()
        / sxx;
    let a = ybar - b * tbar;
    let rss: f64 = (1..=y.len()).map(|t| (y[t - 1] - a - b * t as f64).powi(2)).sum();
    b / (rss / (n - 2.0) / sxx).sqrt()
}

fn trend_stats(prior: PriorMode) -> Vec<f64> {
    (0..TREND_REPS)
        .into_par_iter()
        .map(|r| {
            let mut cfg = DlsmConfig::new(100, 100, 0.3, 1.0, EdgeKind::Binary, 17_000 + r);
            cfg.sigma2 = 0.0003;
            cfg.beta_in = 1.0;
            cfg.beta_out = 1.0;
            cfg.prior = prior;
            let net = dlsm::generate(&cfg, None).unwrap();
            let y: Vec<f64> = net.snapshots().iter().map(|s| density(s).unwrap()).collect();
            slope_t(&y)
        })
        .collect()
}

fn prior_trend() -> Outcome {
    let var1 = trend_stats(PriorMode::Var1);
    let walk = trend_stats(PriorMode::OriginalRandomWalk);
    let flat = var1.iter().filter(|t| t.abs() < TREND_SE).count() as f64 / var1.len() as f64;
    let decay = walk.iter().filter(|&&t| t <= -TREND_SE).count() as f64 / walk.len() as f64;
    Outcome::new(
        flat >= TREND_MIN_SHARE && decay >= TREND_MIN_SHARE,
        format!(
            "prior trend: VAR(1) flat in {:.0}% and random walk decaying in {:.0}% of {TREND_REPS} replicates (need {:.0}%)",
            flat * 100.0,
            decay * 100.0,
            TREND_MIN_SHARE * 100.0
        ),
    )
}

fn random_network(rng: &mut ChaCha8Rng) -> DynamicNetwork {
    let n = rng.random_range(2..=8);
    let len = rng.random_range(11..=30);
    let directed = rng.random_bool(0.5);
    let kind = if rng.random_bool(0.5) {
        EdgeKind::Binary
    } else {
        EdgeKind::Count
    };
    let p = rng.random_range(0.1..0.7);
    let snaps = (0..len)
        .map(|_| {
            let mut s = Snapshot::empty(n, directed, kind);
            for i in 0..n {
                for j in 0..n {
                    if i == j || (!directed && j < i) || !rng.random_bool(p) {
                        continue;
                    }
                    let w = match kind {
                        EdgeKind::Binary => 1,
                        EdgeKind::Count => rng.random_range(1..=4),
                    };
                    s.set_edge(i, j, w);
                }
            }
            s
        })
        .collect();
    DynamicNetwork::new(snaps, len / 2)
}

/// Closed `k`-hop set by repeated expansion over the weak adjacency.
#[allow(clippy::needless_range_loop)]
fn khop(s: &Snapshot, i: usize, k: usize) -> Vec<bool> {
    let n = s.n();
    let mut inside = vec![false; n];
    inside[i] = true;
    for _ in 0..k {
        let prev = inside.clone();
        for u in 0..n {
            for v in 0..n {
                if prev[u] && u != v && (s.weight(u, v) > 0 || s.weight(v, u) > 0) {
                    inside[v] = true;
                }
            }
        }
    }
    inside
}

fn brute_size(s: &Snapshot, i: usize, k: usize) -> f64 {
    let n = s.n();
    let mut total = 0u64;
    if k == 0 {
        for j in 0..n {
            if j != i {
                total += s.weight(i, j) as u64;
                if s.directed() {
                    total += s.weight(j, i) as u64;
                }
            }
        }
        return total as f64;
    }
    let inside = khop(s, i, k);
    for u in 0..n {
        for v in 0..n {
            let counted = if s.directed() { u != v } else { u < v };
            if counted && inside[u] && inside[v] {
                total += s.weight(u, v) as u64;
            }
        }
    }
    total as f64
}

fn brute_standardize(x: f64, window: &[f64]) -> f64 {
    let m = window.len() as f64;
    let mut sum = 0.0;
    for w in window {
        sum += w;
    }
    let mu = sum / m;
    let mut ss = 0.0;
    for w in window {
        ss += (w - mu) * (w - mu);
    }
    let sd = (ss / (m - 1.0)).sqrt();
    (x - mu) / if sd < 1.0 { 1.0 } else { sd }
}

#[allow(clippy::needless_range_loop)]
fn brute_scan(net: &DynamicNetwork, m: usize) -> Vec<Option<f64>> {
    let len = net.len();
    let n = net.n();
    let mut out = vec![None; len];
    for k in 0..=2 {
        let size: Vec<Vec<f64>> = (1..=len)
            .map(|t| (0..n).map(|i| brute_size(net.at(t), i, k)).collect())
            .collect();
        let mut local = vec![f64::NAN; len + 1];
        for t in m + 1..=len {
            let mut best = f64::NEG_INFINITY;
            for i in 0..n {
                let past: Vec<f64> = (t - m..t).map(|s| size[s - 1][i]).collect();
                let z = brute_standardize(size[t - 1][i], &past);
                if z > best {
                    best = z;
                }
            }
            local[t] = best;
        }
        for t in 2 * m + 1..=len {
            let past: Vec<f64> = (t - m..t).map(|s| local[s]).collect();
            let z = brute_standardize(local[t], &past);
            out[t - 1] = Some(match out[t - 1] {
                Some(prev) if prev >= z => prev,
                _ => z,
            });
        }
    }
    out
}

/// Fraction of (anomalous, null) pairs ordered correctly, ties counting half.
fn pairwise_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut hits = 0.0;
    for p in pos {
        for q in neg {
            hits += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    hits / (pos.len() * neg.len()) as f64
}

/// A fixture whose chart scores sit at centres of distinct threshold-grid
/// cells, so the grid sweep visits every vertex of the empirical ROC.
/// Returns the series, window and the per-time scores the chart ranks by.
fn roc_fixture(rng: &mut ChaCha8Rng, chart_kind: StatKind) -> (StatSeries, (usize, usize), Vec<(usize, f64)>) {
    let len = 30;
    let start = rng.random_range(FIXTURE_T1 + 1..=len);
    let end = rng.random_range(start..=len);
    let phase2 = len - FIXTURE_T1;
    let mut values = vec![None; len];
    let mut scores = Vec::new();
    if chart_kind == StatKind::Scan {
        let cells = sample(rng, 240, phase2);
        for (slot, cell) in cells.iter().enumerate() {
            let x = -6.0 + (cell as f64 + 0.5) * 0.05;
            values[FIXTURE_T1 + slot] = Some(x);
            scores.push((FIXTURE_T1 + slot + 1, x));
        }
        for v in values.iter_mut().take(FIXTURE_T1).skip(10) {
            *v = Some(0.0);
        }
        return (StatSeries::new(StatKind::Scan, Some(5), values), (start, end), scores);
    }
    // Alternating Phase I gives mean 0 and an average moving range of 1.13,
    // hence unit sigma under the moving-range estimator.
    for (t, v) in values.iter_mut().take(FIXTURE_T1).enumerate() {
        *v = Some(if t % 2 == 0 { 0.565 } else { -0.565 });
    }
    let cells = sample(rng, 119, phase2);
    for (slot, cell) in cells.iter().enumerate() {
        let z = (cell as f64 + 0.5) * 0.05;
        let x = if rng.random_bool(0.5) { z } else { -z };
        values[FIXTURE_T1 + slot] = Some(x);
        scores.push((FIXTURE_T1 + slot + 1, z));
    }
    let values = values.into_iter().map(Option::unwrap).collect();
    (StatSeries::dense(chart_kind, values), (start, end), scores)
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(19_000);
    let mut scan_worst: f64 = 0.0;
    let mut scan_ok = true;
    for _ in 0..SCAN_FIXTURES {
        let net = random_network(&mut rng);
        let fast = stats::scan_series(&net, 5).unwrap();
        for (a, b) in fast.values().iter().zip(brute_scan(&net, 5)) {
            match (a, b) {
                (Some(a), Some(b)) => scan_worst = scan_worst.max((a - b).abs()),
                (None, None) => {}
                _ => scan_ok = false,
            }
        }
    }
    scan_ok &= scan_worst <= ORACLE_TOL;

    let mut roc_worst: f64 = 0.0;
    for f in 0..ROC_FIXTURES {
        let kind = if f % 2 == 0 { StatKind::Scan } else { StatKind::Density };
        let (series, window, scores) = roc_fixture(&mut rng, kind);
        let inside = |t: usize| t >= window.0 && t <= window.1;
        let pos: Vec<f64> = scores.iter().filter(|(t, _)| inside(*t)).map(|p| p.1).collect();
        let neg: Vec<f64> = scores.iter().filter(|(t, _)| !inside(*t)).map(|p| p.1).collect();
        if neg.is_empty() {
            continue;
        }
        let got = roc_auc(&series, FIXTURE_T1, SigmaEstimator::Amr, window).unwrap();
        roc_worst = roc_worst.max((got - pairwise_auc(&pos, &neg)).abs());
    }
    let roc_ok = roc_worst <= ORACLE_TOL;
    Outcome::new(
        scan_ok && roc_ok,
        format!(
            "oracles: scan vs brute force max error {scan_worst:.1e} on {SCAN_FIXTURES} networks, AUC vs pairwise enumeration max error {roc_worst:.1e} on {ROC_FIXTURES} fixtures (tolerance {ORACLE_TOL:.0e})"
        ),
    )
}

fn invariants() -> Outcome {
    let mut details = Vec::new();
    let mut failed = 0;
    let suites = common::all();
    for (name, check) in &suites {
        match check(common::CASES) {
            Ok(()) => details.push(format!("ok    {name}")),
            Err(e) => {
                failed += 1;
                details.push(format!("fail  {name}: {e}"));
            }
        }
    }
    Outcome {
        pass: failed == 0,
        summary: format!(
            "invariants: {}/{} property suites hold over {} cases each",
            suites.len() - failed,
            suites.len(),
            common::CASES
        ),
        details,
    }
}

fn main() -> ExitCode {
    let criteria: [(u8, fn() -> Outcome); 9] = [
        (1, density_targeting),
        (2, calibration),
        (3, estimator_comparison),
        (4, odds_ratio_row),
        (5, radius_row),
        (6, weak_odds_ratio_row),
        (7, prior_trend),
        (8, oracles),
        (9, invariants),
    ];
    let wanted: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = Vec::new();
    for (id, criterion) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let clock = Instant::now();
        let outcome = criterion();
        for line in &outcome.details {
            println!("      {line}");
        }
        println!(
            "criterion {id}: {} {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            clock.elapsed().as_secs_f64()
        );
        if !outcome.pass {
            failures.push(id);
        }
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failures:?}");
        ExitCode::FAILURE
    }
}
