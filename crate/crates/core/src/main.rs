use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use biatsp::error::{Error, Result};
use biatsp::exact::{dp_pareto, enumerate_pareto, DEFAULT_ENUMERATION_LIMIT};
use biatsp::instance::{
    generate_contradicting, generate_ftv_derived, generate_random, parse_tsplib, Criterion, Instance,
};
use biatsp::metrics::{front_distances, wilcoxon_signed_rank};
use biatsp::moga::{run, CrossoverKind, MogaConfig, RunReport};
use biatsp::reduction::{
    default_grid, exclusion_percentage, parse_theta, theta_sweep, write_sweep_csv, Preference, Quantum,
    QuantumPair,
};
use biatsp::Front;

const WORKERS_ENV: &str = "BIATSP_WORKERS";

#[derive(Parser)]
#[command(name = "biatsp", version, about = "Bi-criteria ATSP: exact fronts, NSGA-II, Pareto set reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance series as JSON files.
    Gen(GenArgs),
    /// Run NSGA-II on an instance.
    Solve(SolveArgs),
    /// Compute the exact Pareto front of a small instance.
    Exact(ExactArgs),
    /// Reduce a front using relative importance of the criteria.
    Reduce(ReduceArgs),
    /// GD and IGD of an approximation against a reference front.
    Metrics(MetricsArgs),
    /// Wilcoxon signed-rank comparison of two batches of solve reports.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    Random,
    Contr,
    Ftv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    series: Series,
    /// Number of vertices (random and contr series).
    #[arg(long, required_if_eq_any = [("series", "random"), ("series", "contr")])]
    n: Option<usize>,
    /// Weight ranges `lo1,hi1,lo2,hi2` for the random series.
    #[arg(long, default_value = "1,10,1,10")]
    ranges: String,
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// TSPLIB ATSP file providing the first criterion (ftv series).
    #[arg(long, required_if_eq("series", "ftv"))]
    tsplib: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrossoverArg {
    Dec,
    Dpx,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "dec")]
    crossover: CrossoverArg,
    /// Population size; 50 below 30 vertices, 100 otherwise.
    #[arg(long)]
    pop: Option<usize>,
    /// Iterations; 1000 below 30 vertices, 5000 otherwise.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, default_value_t = 10)]
    tournament: usize,
    #[arg(long, default_value_t = 0.1)]
    pmut: f64,
    #[arg(long, default_value_t = 1, conflicts_with = "seed_range")]
    seed: u64,
    /// Inclusive seed range `A..B`, one run per seed.
    #[arg(long)]
    seed_range: Option<String>,
    /// Reference front CSV for GD/IGD traces.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Enum,
    Dp,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "dp")]
    method: Method,
    /// Largest instance the enumerator accepts.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    limit: usize,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    front: PathBuf,
    /// Coefficient for "criterion 1 is more important than criterion 2".
    #[arg(long)]
    theta12: Option<String>,
    /// Coefficient for "criterion 2 is more important than criterion 1".
    #[arg(long)]
    theta21: Option<String>,
    /// Sweep both coefficients over 0.1..0.9 and write the exclusion table.
    #[arg(long, conflicts_with_all = ["theta12", "theta21"])]
    sweep: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    approx: PathBuf,
    #[arg(long)]
    reference: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Gd,
    Igd,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum, default_value = "igd")]
    metric: MetricArg,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TooLarge { .. } => 4,
        _ => 3,
    }
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{WORKERS_ENV}={raw:?} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::InvalidArgument(format!("bad path {path:?}")))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&fs::read_to_string(path)?)
}

fn read_front(path: &Path) -> Result<Front> {
    Front::read_csv(fs::File::open(path)?)
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let series = match a.series {
        Series::Random => "random",
        Series::Contr => "contr",
        Series::Ftv => "ftv",
    };
    let base = match &a.tsplib {
        Some(p) if matches!(a.series, Series::Ftv) => Some(parse_tsplib(&fs::read_to_string(p)?)?),
        _ => None,
    };
    let ranges = parse_ranges(&a.ranges)?;
    for i in 0..a.count {
        let seed = a.seed.wrapping_add(i as u64);
        let inst = match a.series {
            Series::Random => {
                let (r1, r2) = ranges.clone();
                generate_random(a.n.expect("required by clap"), r1, r2, seed)?
            }
            Series::Contr => generate_contradicting(a.n.expect("required by clap"), seed)?,
            Series::Ftv => generate_ftv_derived(base.as_ref().expect("required by clap"), seed)?,
        };
        let path = a.out.join(format!("{series}{}_{i}.json", inst.n()));
        write_atomic(&path, inst.to_json()?.as_bytes())?;
        eprintln!("wrote {} ({})", path.display(), inst.name());
    }
    Ok(())
}

type Ranges = (std::ops::RangeInclusive<i64>, std::ops::RangeInclusive<i64>);

fn parse_ranges(text: &str) -> Result<Ranges> {
    let bad = || Error::InvalidArgument(format!("ranges must be lo1,hi1,lo2,hi2, got {text:?}"));
    let v: Vec<i64> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match v[..] {
        [a, b, c, d] => Ok((a..=b, c..=d)),
        _ => Err(bad()),
    }
}

fn parse_seed_range(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidArgument(format!("seed range must be A..B, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let reference = a.reference.as_deref().map(read_front).transpose()?;
    let seeds = match &a.seed_range {
        Some(r) => parse_seed_range(r)?,
        None => vec![a.seed],
    };
    let sized = MogaConfig::for_size(inst.n());
    let base = MogaConfig {
        population_size: a.pop.unwrap_or(sized.population_size),
        iterations: a.iters.unwrap_or(sized.iterations),
        tournament_size: a.tournament,
        mutation_probability: a.pmut,
        crossover: match a.crossover {
            CrossoverArg::Dec => CrossoverKind::Dec,
            CrossoverArg::Dpx => CrossoverKind::Dpx,
        },
        seed: 0,
    };
    base.validate()?;
    let reports: Vec<RunReport> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = MogaConfig { seed, ..base.clone() };
            let report = run(&inst, &cfg, reference.as_ref())?;
            let json = serde_json::to_string_pretty(&report)?;
            write_atomic(&a.out.join(format!("report_s{seed}.json")), json.as_bytes())?;
            write_atomic(&a.out.join(format!("front_s{seed}.csv")), report.front.to_csv_string().as_bytes())?;
            eprintln!(
                "seed {seed}: {} points after {} iterations in {} ms",
                report.front.len(),
                report.iterations,
                report.wall_ms
            );
            Ok(report)
        })
        .collect::<Result<_>>()?;
    for r in &reports {
        if let (Some(g), Some(i)) = (r.final_gd, r.final_igd) {
            println!("seed={} gd={g:.6} igd={i:.6}", r.config.seed);
        }
    }
    Ok(())
}

fn cmd_exact(a: ExactArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let front = match a.method {
        Method::Enum => enumerate_pareto(&inst, a.limit)?,
        Method::Dp => dp_pareto(&inst)?,
    };
    eprintln!("{}: {} Pareto points", inst.name(), front.len());
    emit(a.out.as_deref(), front.to_csv_string().as_bytes())
}

fn cmd_reduce(a: ReduceArgs) -> Result<()> {
    let front = read_front(&a.front)?;
    let mut buf = Vec::new();
    if a.sweep {
        let rows = theta_sweep(&front, &default_grid())?;
        write_sweep_csv(&rows, &mut buf)?;
        return emit(a.out.as_deref(), &buf);
    }
    let t12 = a.theta12.as_deref().map(parse_theta).transpose()?;
    let t21 = a.theta21.as_deref().map(parse_theta).transpose()?;
    let pref = match (t12, t21) {
        (Some(t), None) => Preference::Single(Quantum::new(Criterion::First, t)?),
        (None, Some(t)) => Preference::Single(Quantum::new(Criterion::Second, t)?),
        (Some(x), Some(y)) => Preference::Pair(QuantumPair::new(x, y)?),
        (None, None) => {
            return Err(Error::InvalidArgument(
                "give --theta12, --theta21, both, or --sweep".into(),
            ))
        }
    };
    let reduced = pref.reduce(&front);
    eprintln!(
        "{} of {} points kept, {:.4}% excluded",
        reduced.len(),
        front.len(),
        exclusion_percentage(&front, &reduced)?
    );
    reduced.write_csv(&mut buf)?;
    emit(a.out.as_deref(), &buf)
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let approx = read_front(&a.approx)?;
    let reference = read_front(&a.reference)?;
    let (g, i) = front_distances(&approx, &reference)?;
    println!("gd={g}");
    println!("igd={i}");
    Ok(())
}

/// Final metric of every `report_s*.json` in `dir`, keyed by seed.
fn final_metrics(dir: &Path, metric: MetricArg) -> Result<BTreeMap<u64, f64>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if !(name.starts_with("report_s") && name.ends_with(".json")) {
            continue;
        }
        let report: RunReport = serde_json::from_str(&fs::read_to_string(&path)?)?;
        let value = match metric {
            MetricArg::Gd => report.final_gd,
            MetricArg::Igd => report.final_igd,
        }
        .ok_or_else(|| Error::InvalidArgument(format!("{} was run without a reference front", path.display())))?;
        out.insert(report.config.seed, value);
    }
    Ok(out)
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let xa = final_metrics(&a.a, a.metric)?;
    let xb = final_metrics(&a.b, a.metric)?;
    if xa.len() != xb.len() || !xa.keys().eq(xb.keys()) {
        return Err(Error::InvalidArgument(format!(
            "run sets differ: {} reports with seeds {:?} vs {} with {:?}",
            xa.len(),
            xa.keys().collect::<Vec<_>>(),
            xb.len(),
            xb.keys().collect::<Vec<_>>()
        )));
    }
    let x: Vec<f64> = xa.values().copied().collect();
    let y: Vec<f64> = xb.values().copied().collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let w = wilcoxon_signed_rank(&x, &y, a.alpha)?;
    println!("runs={} mean_a={:.6} mean_b={:.6}", x.len(), mean(&x), mean(&y));
    println!("w_plus={} w_minus={} n_used={}", w.w_plus, w.w_minus, w.n_used);
    match w.p_value {
        None => println!("inconclusive: fewer than {} non-zero differences", biatsp::metrics::WILCOXON_MIN_PAIRS),
        Some(p) => {
            let verdict = if !w.significant {
                "no significant difference"
            } else if w.w_plus < w.w_minus {
                "a is significantly lower"
            } else {
                "b is significantly lower"
            };
            println!("p={p:.6} alpha={} {verdict}", a.alpha);
        }
    }
    Ok(())
}
