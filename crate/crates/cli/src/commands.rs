use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use netmon::anomaly::{AnomalyFamily, Profile};
use netmon::dlsm::PriorMode;
use netmon::edgelist::{read_edge_list, write_edge_list};
use netmon::eval::{write_results_csv, write_summary_csv};
use netmon::monitor::{self, ChartState, SigmaEstimator};
use netmon::scenario::{self, load_scenarios, AnomalyDecl, Catalog, Grid, Model, Scenario};
use netmon::stats::{self, read_csv, StatKind, StatSeries};
use netmon::{DynamicNetwork, EdgeKind};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::CliError;
use crate::{
    CalibrateArgs, EstimatorArg, FamilyArg, GenerateArgs, GridArg, KindArg, ModelArg, MonitorArgs, PriorArg,
    ProfileArg, ReportArgs, RunArgs, StatArg, StatsArgs, TableArg,
};

pub const SEED_VAR: &str = "NETMON_SEED";

type Out = Result<(), CliError>;

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_VAR} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_err(e: io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

fn catalog(path: Option<&Path>) -> Result<Catalog, CliError> {
    match path {
        Some(p) => Ok(Catalog::from_path(p)?),
        None => Ok(Catalog::builtin()),
    }
}

fn scenarios(path: &Path, id: Option<&str>) -> Result<Vec<Scenario>, CliError> {
    if !path.exists() {
        return Err(CliError::Runtime(format!("{}: no such file", path.display())));
    }
    let mut all = load_scenarios(path)?;
    if let Some(seed) = env_seed()? {
        for s in &mut all {
            s.base_seed = seed;
        }
    }
    match id {
        Some(id) => {
            all.retain(|s| s.id == id);
            if all.is_empty() {
                return Err(CliError::Usage(format!(
                    "no scenario with id `{id}` in {}",
                    path.display()
                )));
            }
            Ok(all)
        }
        None => Ok(all),
    }
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Dlsm => Model::Dlsm,
            ModelArg::Ddcsbm => Model::Ddcsbm,
        }
    }
}

impl From<KindArg> for EdgeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Binary => EdgeKind::Binary,
            KindArg::Count => EdgeKind::Count,
        }
    }
}

impl From<EstimatorArg> for SigmaEstimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Amr => SigmaEstimator::Amr,
            EstimatorArg::Mmr => SigmaEstimator::Mmr,
            EstimatorArg::CorrSd => SigmaEstimator::CorrSd,
        }
    }
}

impl StatArg {
    fn kinds(self) -> Vec<StatKind> {
        match self {
            StatArg::Density => vec![StatKind::Density],
            StatArg::MaxDegree => vec![StatKind::MaxDegree],
            StatArg::Diff => vec![StatKind::Diff],
            StatArg::Sum => vec![StatKind::Sum],
            StatArg::Scan => vec![StatKind::Scan],
            StatArg::All => StatKind::ALL.to_vec(),
        }
    }
}

fn scenario_from_flags(args: &GenerateArgs, catalog: &Catalog) -> Result<Scenario, CliError> {
    let (Some(model), Some(kind), Some(phi), Some(density)) = (args.model, args.kind, args.phi, args.density) else {
        return Err(CliError::Usage(
            "--model, --kind, --phi and --density are required".into(),
        ));
    };
    let (model, kind): (Model, EdgeKind) = (model.into(), kind.into());
    let mut s = Scenario::new("generate", model, kind, phi, density);
    s.n = args.n;
    s.len = args.len;
    s.t1 = args.t1;
    s.a_scale = args.a_scale;
    s.statistics = vec![StatKind::Density];
    s.base_seed = env_seed()?.unwrap_or(args.seed);
    s.prior = args.prior.map(|p| match p {
        PriorArg::Var1 => PriorMode::Var1,
        PriorArg::RandomWalk => PriorMode::OriginalRandomWalk,
    });
    s.grid = match args.grid {
        GridArg::Density => Grid::Density,
        GridArg::PhiSweep => Grid::PhiSweep,
        GridArg::Auto => {
            if catalog.lookup_a_scale(model, kind, Grid::Density, density).is_ok() {
                Grid::Density
            } else {
                Grid::PhiSweep
            }
        }
    };
    if let Some(family) = args.anomaly {
        s.anomaly = Some(AnomalyDecl {
            family: match family {
                FamilyArg::OddsRatio => AnomalyFamily::OddsRatio,
                FamilyArg::DegreeParam => AnomalyFamily::DegreeParam,
            },
            profile: match args.profile {
                ProfileArg::Sustained => Profile::Sustained,
                ProfileArg::Gradual => Profile::Gradual,
            },
            n_affected: args.affected.unwrap_or(0),
            t_start: args.t_start,
            cpl: args.cpl,
            magnitude: args.magnitude.unwrap_or(f64::NAN),
        });
    }
    s.validate()?;
    Ok(s)
}

pub fn generate(args: GenerateArgs) -> Out {
    let catalog = catalog(args.catalog.as_deref())?;
    let (scenario, seed) = match &args.scenario {
        Some(path) => {
            let s = scenarios(path, args.id.as_deref())?.remove(0);
            if args.replicate >= s.reps {
                return Err(CliError::Usage(format!(
                    "--replicate {} is outside the scenario's {} replicates",
                    args.replicate, s.reps
                )));
            }
            let seed = s.replicate_seed(args.replicate);
            (s, seed)
        }
        None => {
            let s = scenario_from_flags(&args, &catalog)?;
            let seed = s.base_seed;
            (s, seed)
        }
    };
    let generator = scenario.generator(&catalog)?;
    let spec = scenario.anomaly.as_ref().map(AnomalyDecl::to_spec);
    let net = generator
        .generate(seed, spec.as_ref())
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut out = sink(args.out.as_deref())?;
    write_edge_list(&net, &mut out).map_err(write_err)?;
    out.flush().map_err(write_err)
}

fn read_network(path: &Path) -> Result<DynamicNetwork, CliError> {
    Ok(read_edge_list(open(path)?)?)
}

fn write_series(all: &[StatSeries], out: Option<&Path>) -> Out {
    let mut out = sink(out)?;
    for (idx, s) in all.iter().enumerate() {
        s.write_csv(&mut out, idx == 0).map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}

pub fn stats(args: StatsArgs) -> Out {
    let net = read_network(&args.input)?;
    let all = stats::all_series(&net, &args.stat.kinds(), args.m).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_series(&all, args.out.as_deref())
}

fn is_edge_list(path: &Path) -> Result<bool, CliError> {
    let mut first = String::new();
    open(path)?.read_line(&mut first).map_err(|e| CliError::io(path, e))?;
    Ok(first.starts_with("#n="))
}

/// The `q` whose nominal normal false-alarm rate is `p` under the rule the
/// statistic is monitored with.
fn q_from_p(p: f64, two_sided: bool) -> Result<f64, CliError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::Usage(format!("--p must lie in (0, 1), got {p}")));
    }
    let tail = if two_sided { p / 2.0 } else { p };
    Ok(Normal::standard().inverse_cdf(1.0 - tail))
}

pub fn monitor(args: MonitorArgs) -> Out {
    let (series, t1) = if is_edge_list(&args.input)? {
        let net = read_network(&args.input)?;
        let kind = match args.stat.map(StatArg::kinds).as_deref() {
            Some([kind]) => *kind,
            _ => return Err(CliError::Usage("an edge-list input needs a single --stat".into())),
        };
        let series = stats::series(&net, kind, args.m).map_err(|e| CliError::Runtime(e.to_string()))?;
        (series, args.t1.unwrap_or(net.t1()))
    } else {
        let mut all = read_csv(open(&args.input)?)?;
        let series = match (args.stat.map(StatArg::kinds).as_deref(), all.len()) {
            (Some([kind]), _) => {
                let idx = all
                    .iter()
                    .position(|s| s.kind == *kind)
                    .ok_or_else(|| CliError::Schema(format!("{} has no `{kind}` rows", args.input.display())))?;
                all.swap_remove(idx)
            }
            (None, 1) => all.remove(0),
            _ => return Err(CliError::Usage("pick one statistic with --stat".into())),
        };
        (series, args.t1.unwrap_or(50))
    };
    let two_sided = series.kind.two_sided();
    let q = match (args.q, args.p) {
        (Some(q), _) => q,
        (None, Some(p)) => q_from_p(p, two_sided)?,
        (None, None) => unreachable!("clap requires one of --q and --p"),
    };
    let estimator: SigmaEstimator = args.estimator.into();
    let runtime = |e: monitor::MonitorError| CliError::Runtime(e.to_string());
    let signals = monitor::monitor(&series, t1, estimator, q).map_err(runtime)?;
    let chart = if two_sided {
        Some(ChartState::fit(&series, t1, estimator, q).map_err(runtime)?)
    } else {
        None
    };

    let mut out = sink(args.out.as_deref())?;
    writeln!(out, "t,statistic,value,lower,upper,signal").map_err(write_err)?;
    for (t, signal) in signals.iter() {
        let value = series.get(t).expect("monitored times are defined");
        let (lower, upper) = match &chart {
            Some(c) => (c.lower().to_string(), c.upper().to_string()),
            None => (String::new(), q.to_string()),
        };
        writeln!(out, "{t},{},{value},{lower},{upper},{}", series.kind, u8::from(signal)).map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}

pub fn calibrate(args: CalibrateArgs) -> Out {
    let catalog = catalog(args.catalog.as_deref())?;
    let mut all = scenarios(&args.scenario, args.id.as_deref())?;
    for s in &mut all {
        if let Some(p) = args.p {
            s.p_target = p;
        }
        if let Some(reps) = args.reps {
            s.calibration_reps = reps;
        }
        s.validate()?;
    }
    let mut out = sink(args.out.as_deref())?;
    let mut curve = match &args.curve {
        Some(p) => {
            let mut w = sink(Some(p))?;
            writeln!(w, "scenario_id,statistic,estimator,q,far").map_err(write_err)?;
            Some(w)
        }
        None => None,
    };
    writeln!(out, "scenario_id,statistic,q,far").map_err(write_err)?;
    for s in &all {
        for (stat, c) in scenario::calibrate(s, &catalog)? {
            writeln!(out, "{},{stat},{},{}", s.id, c.q, c.far).map_err(write_err)?;
            if let Some(w) = curve.as_mut() {
                for (q, far) in &c.curve {
                    writeln!(w, "{},{stat},{},{q},{far}", s.id, s.estimator).map_err(write_err)?;
                }
            }
        }
    }
    if let Some(w) = curve.as_mut() {
        w.flush().map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}

pub fn run(args: RunArgs) -> Out {
    let catalog = catalog(args.catalog.as_deref())?;
    let mut all = scenarios(&args.scenarios, None)?;
    if args.full {
        all = all.iter().flat_map(Scenario::full_grid).collect();
    }
    for s in &all {
        s.generator(&catalog)?;
    }
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let file = |name: &str| -> Result<Box<dyn Write>, CliError> { sink(Some(&args.out.join(name))) };
    let (mut results, mut summary, mut calib) = (file("results.csv")?, file("summary.csv")?, file("calibration.csv")?);
    writeln!(calib, "scenario_id,statistic,q,far").map_err(write_err)?;
    for (idx, s) in all.iter().enumerate() {
        let res = scenario::run(s, &catalog)?;
        write_results_csv(&res.records, &mut results, idx == 0).map_err(write_err)?;
        write_summary_csv(&res.summaries, &mut summary, idx == 0).map_err(write_err)?;
        for (stat, c) in &res.calibrations {
            writeln!(calib, "{},{stat},{},{}", s.id, c.q, c.far).map_err(write_err)?;
        }
        if let Some(e) = res.records.iter().find_map(|r| r.error.as_ref()) {
            eprintln!("{}: some replicates failed, first error: {e}", s.id);
        }
    }
    for w in [&mut results, &mut summary, &mut calib] {
        w.flush().map_err(write_err)?;
    }
    Ok(())
}

pub fn report(args: ReportArgs) -> Out {
    let path: PathBuf = if args.results.is_dir() {
        args.results.join("summary.csv")
    } else {
        args.results.clone()
    };
    let mut lines = open(&path)?.lines();
    let schema = |msg: String| CliError::Schema(format!("{}: {msg}", path.display()));
    let header = lines
        .next()
        .transpose()
        .map_err(|e| CliError::io(&path, e))?
        .ok_or_else(|| schema("empty file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| schema(format!("missing column `{name}`")))
    };
    let metric = match args.table {
        TableArg::Dr => "mean_dr",
        TableArg::Auc => "mean_auc",
        TableArg::Far => "mean_far",
    };
    let (id_col, stat_col, value_col) = (col("scenario_id")?, col("statistic")?, col(metric)?);

    let mut ids: Vec<String> = Vec::new();
    let mut stats: Vec<String> = Vec::new();
    let mut cells: Vec<(String, String, String)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|e| CliError::io(&path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(schema(format!("line {}: expected {} fields", idx + 2, columns.len())));
        }
        let (id, stat) = (fields[id_col].to_string(), fields[stat_col].to_string());
        if !ids.contains(&id) {
            ids.push(id.clone());
        }
        if !stats.contains(&stat) {
            stats.push(stat.clone());
        }
        cells.push((id, stat, fields[value_col].to_string()));
    }

    let mut out = sink(args.out.as_deref())?;
    writeln!(out, "scenario_id,{}", stats.join(",")).map_err(write_err)?;
    for id in &ids {
        let row: Vec<&str> = stats
            .iter()
            .map(|st| {
                cells
                    .iter()
                    .find(|(i, s, _)| i == id && s == st)
                    .map_or("", |(_, _, v)| v.as_str())
            })
            .collect();
        writeln!(out, "{id},{}", row.join(",")).map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}
