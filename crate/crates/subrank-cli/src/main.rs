//! `subrank` — set-function rank analysis from the command line.
//!
//! Subcommands: `gen`, `rank`, `facets`, `approx`, `metrics`, `optimize`,
//! `ratio`, `volume`, `study`. Exit codes: 0 success, 2 argument error,
//! 3 size-guard refusal, 4 non-convergence.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use subrank::cones::{
    elementary_submodular_rank, imset_rows, supermodular_rank, PairIndex, SignVector, DEFAULT_TOL,
};
use subrank::experiments::{
    rows_to_csv, run_metric_curves, run_split_study, single_cone_volume_bound, summarize_curves,
    volume_estimate, RankFamily, VolumeRequest, DEFAULT_VOLUME_SAMPLES,
};
use subrank::lattice::{table_from_csv, table_from_json, table_to_csv, table_to_json};
use subrank::metrics::{alpha_r, gamma_r, greedy_guarantee, metric_report};
use subrank::objectives::{
    BayesianAOptInstance, ColumnSubsetInstance, DeterminantalInstance, Family, ObjectiveInstance,
    Preset,
};
use subrank::optimize::{
    exhaustive_ratio_min, greedy, r_split, r_split_ratio, ratio_greedy, CardinalityMatroid,
    RatioSplitMode, RunTrace,
};
use subrank::project::{best_elementary_rank_r_approximation, OracleKind, ProjectionOptions};
use subrank::{Error, SetFunctionTable, Subset};

#[derive(Parser)]
#[command(
    name = "subrank",
    version,
    about = "Supermodular rank structure of set functions"
)]
struct Cli {
    /// Master RNG seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for reports and experiment rows.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark objective and write its table.
    Gen(GenArgs),
    /// Supermodular or elementary submodular rank of a table.
    Rank(RankArgs),
    /// Dump the oriented facet rows of a sign vector's cone as CSV.
    Facets(FacetsArgs),
    /// Best low-rank cone-sum approximation by projection.
    Approx(ApproxArgs),
    /// Curvature and submodularity-ratio report.
    Metrics(MetricsArgs),
    /// Constrained maximization with greedy or split greedy.
    Optimize(OptimizeArgs),
    /// Ratio-of-set-functions minimization.
    Ratio(RatioArgs),
    /// Monte Carlo relative volume of a union of cones.
    Volume(VolumeArgs),
    /// Batch experiment runners (metric curves, split studies).
    Study(StudyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Objective family: det, bayes, col, random.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    /// Hyperparameter preset.
    #[arg(long, value_enum, default_value_t = PresetArg::Curves)]
    preset: PresetArg,
    /// Noise scale override (det, bayes).
    #[arg(long)]
    sigma: Option<f64>,
    /// Prior scale override (bayes).
    #[arg(long)]
    beta: Option<f64>,
    /// Ambient dimension override (rows of the data matrix).
    #[arg(long)]
    rows: Option<usize>,
    /// Shift the table so f(∅) = 0.
    #[arg(long)]
    normalize: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Curves,
    Approx,
    Split,
    Large,
}

impl PresetArg {
    fn preset(self) -> Preset {
        match self {
            PresetArg::Curves => Preset::MetricCurves,
            PresetArg::Approx => Preset::RankApproximation,
            PresetArg::Split => Preset::SplitStudy,
            PresetArg::Large => Preset::LargeScale,
        }
    }
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    input: PathBuf,
    /// Compute the elementary submodular rank instead.
    #[arg(long)]
    elementary: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct FacetsArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated sign vector, e.g. `1,1,-1`.
    #[arg(long)]
    tau: String,
}

#[derive(Args)]
struct ApproxArgs {
    #[arg(long)]
    input: PathBuf,
    /// Number of elementary summands of the approximation.
    #[arg(long)]
    rank: usize,
    #[arg(long, value_enum, default_value_t = OracleArg::Deterministic)]
    oracle: OracleArg,
    /// Where the projected table is written.
    #[arg(long, default_value = "g.json")]
    g_out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OracleArg {
    Deterministic,
    Random,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Also tabulate α_r and γ_r for r = 0..=R.
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Constraint spec; currently `card:m`.
    #[arg(long)]
    constraint: String,
    #[arg(long, default_value = "greedy")]
    algo: String,
    /// Split size for `--algo rsplit`.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Subroutine run on each piece (greedy only).
    #[arg(long, default_value = "greedy")]
    subroutine: String,
}

#[derive(Args)]
struct RatioArgs {
    #[arg(long)]
    num: PathBuf,
    #[arg(long)]
    den: PathBuf,
    #[arg(long, default_value = "ratio")]
    algo: String,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::SplitF)]
    mode: ModeArg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    SplitF,
    SplitBoth,
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    n: usize,
    /// supermodular, elementary, or single-cone.
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = DEFAULT_VOLUME_SAMPLES)]
    samples: u64,
}

#[derive(Args)]
struct StudyArgs {
    /// curves or split.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: usize,
    /// Cardinality bound (split studies).
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Split sizes, comma separated (split studies).
    #[arg(long, default_value = "1")]
    r: String,
    /// Largest split budget (curve studies).
    #[arg(long, default_value_t = 4)]
    r_max: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
}

enum Failure {
    General(String),
    Usage(String),
    SizeGuard(String),
    NonConverged(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::General(_) => 1,
            Failure::Usage(_) => 2,
            Failure::SizeGuard(_) => 3,
            Failure::NonConverged(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::General(m)
            | Failure::Usage(m)
            | Failure::SizeGuard(m)
            | Failure::NonConverged(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Argument(_) | Error::Domain(_) | Error::Parse(_) => {
                Failure::Usage(e.to_string())
            }
            Error::SizeGuard(_) => Failure::SizeGuard(e.to_string()),
            Error::Numerical(_) => Failure::General(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::General(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the global pool may already exist under tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Rank(args) => cmd_rank(cli, args),
        Command::Facets(args) => cmd_facets(cli, args),
        Command::Approx(args) => cmd_approx(cli, args),
        Command::Metrics(args) => cmd_metrics(cli, args),
        Command::Optimize(args) => cmd_optimize(cli, args),
        Command::Ratio(args) => cmd_ratio(cli, args),
        Command::Volume(args) => cmd_volume(cli, args),
        Command::Study(args) => cmd_study(cli, args),
    }
}

fn read_table(path: &Path) -> Result<SetFunctionTable, Failure> {
    let text = std::fs::read_to_string(path)?;
    let table = if path.extension().is_some_and(|e| e == "csv") {
        table_from_csv(&text)?
    } else {
        table_from_json(&text)?
    };
    Ok(table)
}

fn write_table(path: &Path, table: &SetFunctionTable) -> Result<(), Failure> {
    let text = if path.extension().is_some_and(|e| e == "csv") {
        table_to_csv(table)
    } else {
        table_to_json(table)
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn emit(cli: &Cli, text: String) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None if text.ends_with('\n') => print!("{text}"),
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json(cli: &Cli, value: &Value) -> Result<(), Failure> {
    emit(
        cli,
        serde_json::to_string_pretty(value).expect("serializable"),
    )
}

fn elements(s: Subset) -> Vec<usize> {
    s.elements().collect()
}

fn trace_json(trace: &RunTrace, extra: Value) -> Value {
    let mut v = json!({
        "chosen_mask": trace.chosen.bits(),
        "chosen": elements(trace.chosen),
        "value": trace.value,
        "steps": trace.steps.iter().map(|s| json!({
            "element": s.element,
            "score": s.score,
        })).collect::<Vec<_>>(),
        "subproblem": trace.subproblem.map(|(a, b)| json!({
            "fixed_mask": a.bits(),
            "fixed": elements(a),
            "flip_set_mask": b.bits(),
            "flip_set": elements(b),
        })),
    });
    if let (Value::Object(map), Value::Object(extra)) = (&mut v, extra) {
        map.extend(extra);
    }
    v
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<(), Failure> {
    let family = Family::parse(&args.family)?;
    let preset = args.preset.preset();
    let n = args.n;
    let seed = cli.seed;

    // Resolve instance parameters: preset defaults, then explicit overrides.
    let (instance, params) = match family {
        Family::Determinantal => {
            let (d0, s0) = match preset {
                Preset::MetricCurves => (n, 0.1),
                Preset::RankApproximation | Preset::SplitStudy => (2 * n, 0.1),
                Preset::LargeScale => (n, 1.0),
            };
            let d = args.rows.unwrap_or(d0);
            let sigma = args.sigma.unwrap_or(s0);
            (
                ObjectiveInstance::Determinantal(DeterminantalInstance::sample(n, d, sigma, seed)?),
                json!({"d": d, "sigma": sigma}),
            )
        }
        Family::Bayesian => {
            let (b0, s0) = match preset {
                Preset::MetricCurves | Preset::LargeScale => (0.1, 0.1),
                Preset::RankApproximation | Preset::SplitStudy => (1.0, 0.01),
            };
            let d = args.rows.unwrap_or(60);
            let beta = args.beta.unwrap_or(b0);
            let sigma = args.sigma.unwrap_or(s0);
            (
                ObjectiveInstance::Bayesian(BayesianAOptInstance::sample(n, d, beta, sigma, seed)?),
                json!({"d": d, "beta": beta, "sigma": sigma}),
            )
        }
        Family::Column => {
            let d0 = match preset {
                Preset::MetricCurves => 20,
                Preset::RankApproximation => 60,
                Preset::SplitStudy | Preset::LargeScale => 40,
            };
            let d = args.rows.unwrap_or(d0);
            (
                ObjectiveInstance::Column(ColumnSubsetInstance::sample(n, d, seed)),
                json!({"d": d}),
            )
        }
        Family::Random => (
            ObjectiveInstance::generate(Family::Random, n, preset, seed)?,
            json!({}),
        ),
    };

    let mut table = instance.materialize()?;
    if args.normalize {
        let offset = table.value_at(Subset::EMPTY);
        table = SetFunctionTable::new(n, table.values().iter().map(|v| v - offset).collect())?;
    }

    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("f.json"));
    write_table(&out, &table)?;

    if let ObjectiveInstance::Column(inst) = &instance {
        let mut residual = inst.residual_table()?;
        if args.normalize {
            let offset = residual.value_at(Subset::EMPTY);
            residual =
                SetFunctionTable::new(n, residual.values().iter().map(|v| v - offset).collect())?;
        }
        let residual_path = sibling(&out, "-residual");
        write_table(&residual_path, &residual)?;
    }

    let meta = json!({
        "family": family.name(),
        "n": n,
        "seed": seed,
        "normalize": args.normalize,
        "params": params,
        "table": out,
    });
    let meta_path = out.with_extension("meta.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).unwrap())?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("json");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn cmd_rank(cli: &Cli, args: &RankArgs) -> Result<(), Failure> {
    let table = read_table(&args.input)?;
    let value = if args.elementary {
        let (rank, flip_set) = elementary_submodular_rank(&table, args.tol)?;
        json!({
            "kind": "elementary-submodular",
            "rank": rank,
            "witness": {
                "flip_set_mask": flip_set.bits(),
                "flip_set": elements(flip_set),
            },
        })
    } else {
        let (rank, witness) = supermodular_rank(&table, args.tol)?;
        json!({
            "kind": "supermodular",
            "rank": rank,
            "witness": {
                "taus": witness.iter().map(|t| t.taus().to_vec()).collect::<Vec<_>>(),
            },
        })
    };
    emit_json(cli, &value)
}

fn cmd_facets(cli: &Cli, args: &FacetsArgs) -> Result<(), Failure> {
    let taus: Vec<i8> = args
        .tau
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i8>()
                .map_err(|e| Error::Parse(format!("bad tau entry: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if taus.len() != args.n {
        return Err(Failure::Usage(format!(
            "tau has {} entries for n={}",
            taus.len(),
            args.n
        )));
    }
    let tau = SignVector::new(taus)?;
    let mut out =
        String::from("i,j,z_mask,orientation,plus_mask_1,plus_mask_2,minus_mask_1,minus_mask_2\n");
    for pair in PairIndex::all(args.n) {
        let orientation = tau.pair_sign(pair);
        for row in imset_rows(args.n, pair.i(), pair.j())? {
            let (p0, p1) = row.plus_masks();
            let (m0, m1) = row.minus_masks();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                pair.i(),
                pair.j(),
                row.context.bits(),
                orientation,
                p0.bits(),
                p1.bits(),
                m0.bits(),
                m1.bits()
            ));
        }
    }
    emit(cli, out)
}

fn cmd_approx(cli: &Cli, args: &ApproxArgs) -> Result<(), Failure> {
    let table = read_table(&args.input)?;
    let opts = ProjectionOptions {
        oracle: match args.oracle {
            OracleArg::Deterministic => OracleKind::Deterministic,
            OracleArg::Random => OracleKind::Random,
        },
        rng_seed: cli.seed,
        ..ProjectionOptions::default()
    };
    let approx = best_elementary_rank_r_approximation(&table, args.rank, &opts)?;
    write_table(&args.g_out, &approx.table)?;
    let report = json!({
        "flip_set_mask": approx.flip_set.bits(),
        "flip_set": elements(approx.flip_set),
        "rel_error": approx.rel_error,
        "iterations": approx.iterations,
        "converged": approx.all_converged,
        "output": args.g_out,
    });
    emit_json(cli, &report)?;
    if !approx.all_converged {
        return Err(Failure::NonConverged(
            "a candidate projection exhausted its iteration budget".to_string(),
        ));
    }
    Ok(())
}

fn cmd_metrics(cli: &Cli, args: &MetricsArgs) -> Result<(), Failure> {
    let table = read_table(&args.input)?;
    let report = metric_report(&table)?;
    let mut value = serde_json::to_value(&report).expect("serializable");
    if let Some(r_max) = args.r {
        let mut rows = Vec::new();
        for r in 0..=r_max {
            let a = alpha_r(&table, r)?;
            let g = gamma_r(&table, r)?;
            rows.push(json!({
                "r": r,
                "alpha_r": a,
                "gamma_r": g,
                "guarantee": greedy_guarantee(a, g),
            }));
        }
        value["per_r"] = Value::Array(rows);
    }
    emit_json(cli, &value)
}

fn parse_cardinality(spec: &str, n: usize) -> Result<CardinalityMatroid, Failure> {
    let m = spec
        .strip_prefix("card:")
        .ok_or_else(|| Failure::Usage(format!("unsupported constraint '{spec}', expected card:m")))?
        .parse::<usize>()
        .map_err(|e| Failure::Usage(format!("bad cardinality bound: {e}")))?;
    Ok(CardinalityMatroid::new(n, m))
}

fn cmd_optimize(cli: &Cli, args: &OptimizeArgs) -> Result<(), Failure> {
    if args.subroutine != "greedy" {
        return Err(Failure::Usage(format!(
            "unknown subroutine '{}'",
            args.subroutine
        )));
    }
    let table = read_table(&args.input)?;
    let matroid = parse_cardinality(&args.constraint, table.n())?;
    let trace = match args.algo.as_str() {
        "greedy" => greedy(&table, &matroid),
        "rsplit" => r_split(&table, args.r, &matroid, |f, m| greedy(f, m))?,
        other => return Err(Failure::Usage(format!("unknown algorithm '{other}'"))),
    };
    let extra = json!({
        "algorithm": args.algo,
        "r": if args.algo == "rsplit" { Some(args.r) } else { None },
        "constraint": args.constraint,
    });
    emit_json(cli, &trace_json(&trace, extra))
}

fn cmd_ratio(cli: &Cli, args: &RatioArgs) -> Result<(), Failure> {
    let num = read_table(&args.num)?;
    let den = read_table(&args.den)?;
    let mode = match args.mode {
        ModeArg::SplitF => RatioSplitMode::SplitNumerator,
        ModeArg::SplitBoth => RatioSplitMode::SplitBoth,
    };
    let trace = match args.algo.as_str() {
        "ratio" => ratio_greedy(&num, &den)?,
        "rsplit" => r_split_ratio(&num, &den, args.r, mode)?,
        "exhaustive" => exhaustive_ratio_min(&num, &den)?,
        other => return Err(Failure::Usage(format!("unknown algorithm '{other}'"))),
    };
    let extra = json!({
        "algorithm": args.algo,
        "r": if args.algo == "rsplit" { Some(args.r) } else { None },
        "mode": match args.mode { ModeArg::SplitF => "split-f", ModeArg::SplitBoth => "split-both" },
    });
    emit_json(cli, &trace_json(&trace, extra))
}

fn cmd_volume(cli: &Cli, args: &VolumeArgs) -> Result<(), Failure> {
    let family = RankFamily::parse(&args.family)?;
    let est = volume_estimate(&VolumeRequest {
        n: args.n,
        family,
        rank: args.r,
        samples: args.samples,
        seed: cli.seed,
    })?;
    match cli.format {
        Format::Csv => emit(cli, rows_to_csv(std::slice::from_ref(&est))),
        Format::Json => {
            let mut value = serde_json::to_value(&est).expect("serializable");
            if family == RankFamily::SingleCone {
                let bound = single_cone_volume_bound(args.n);
                value["decay_bound"] = json!(bound);
                value["within_bound"] = json!(est.fraction <= bound + 3.0 * est.std_error);
            }
            emit_json(cli, &value)
        }
    }
}

fn cmd_study(cli: &Cli, args: &StudyArgs) -> Result<(), Failure> {
    let family = Family::parse(&args.family)?;
    match args.kind.as_str() {
        "curves" => {
            let rows = run_metric_curves(family, args.n, args.r_max, args.trials, cli.seed)?;
            match cli.format {
                Format::Csv => emit(cli, rows_to_csv(&rows)),
                Format::Json => {
                    let summary = summarize_curves(&rows);
                    emit_json(cli, &json!({"rows": rows, "summary": summary}))
                }
            }
        }
        "split" => {
            let r_list: Vec<usize> = args
                .r
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Usage(format!("bad split list: {e}")))?;
            let rows = run_split_study(family, args.n, args.m, &r_list, args.trials, cli.seed)?;
            match cli.format {
                Format::Csv => emit(cli, rows_to_csv(&rows)),
                Format::Json => emit_json(cli, &json!({"rows": rows})),
            }
        }
        other => Err(Failure::Usage(format!("unknown study kind '{other}'"))),
    }
}
