use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sparsepca::simgen::{gen_montecarlo, gen_nonorthogonal_spectra, gen_orthogonal_spectra};
use sparsepca::{calibrate_sparsity, fit_method, stats_report, FactorModel, Method, ScoreMode, SparsityKnob};
use sparsepca_harness::{
    build_table, load_matrix_csv, run_experiment, save_matrix_csv, write_artifacts, ExperimentConfig, ExperimentKind,
    TableKind,
};

#[derive(Parser)]
#[command(name = "sparsepca", version, about = "Sparse PCA fitting and variance diagnostics")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug, -vvv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark dataset and write X (and optionally its factors) as CSV.
    Simulate(SimulateArgs),
    /// Fit one method to a CSV matrix.
    Fit(FitArgs),
    /// Statistics of given loadings (and optionally scores) against a CSV matrix.
    Stats(StatsArgs),
    /// Regenerate a comparison table or the Monte Carlo study.
    Reproduce(ReproduceArgs),
    /// Run an experiment described by a config file.
    Run { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Orthogonal,
    Nonorthogonal,
    Montecarlo,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    generator: Generator,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV for X.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the generating scores here.
    #[arg(long)]
    scores_out: Option<PathBuf>,
    /// Also write the generating loadings here.
    #[arg(long)]
    loadings_out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV matrix.
    data: PathBuf,
    #[arg(long, short)]
    method: Method,
    #[arg(long, short = 'a', default_value_t = 1)]
    components: usize,
    /// Absolute lasso weight (SPCA, SPCA-Sq).
    #[arg(long, group = "knob")]
    lambda1: Option<f64>,
    /// Nonzeros per loading (SPCA, SPCA-Sq).
    #[arg(long, group = "knob")]
    cardinality: Option<usize>,
    /// L1 budget (PMD variants).
    #[arg(long, group = "knob")]
    c2: Option<f64>,
    /// Group correlation threshold (GPCA variants).
    #[arg(long, group = "knob")]
    gamma: Option<f64>,
    /// Calibrate the knob to this many nonzero loadings.
    #[arg(long, group = "knob")]
    target_nnz: Option<usize>,
    #[arg(long, default_value = "naive")]
    score_mode: ScoreMode,
    /// Subtract column means before fitting.
    #[arg(long)]
    center: bool,
    #[arg(long)]
    loadings_out: Option<PathBuf>,
    #[arg(long)]
    scores_out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    data: PathBuf,
    #[arg(long, short)]
    loadings: PathBuf,
    /// Scores to evaluate; without them the least-squares scores are used
    /// when `--score-mode corrected`, and `X P` otherwise.
    #[arg(long, short)]
    scores: Option<PathBuf>,
    #[arg(long, default_value = "corrected")]
    score_mode: ScoreMode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Table1,
    Table2,
    Montecarlo,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: Target,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
    /// Monte Carlo repetitions (default 100).
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    center: bool,
}

/// Prints to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) -> std::io::Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn center_columns(x: &mut sparsepca::Matrix) {
    for mut col in x.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let d = match args.generator {
        Generator::Orthogonal => gen_orthogonal_spectra(),
        Generator::Nonorthogonal => gen_nonorthogonal_spectra(),
        Generator::Montecarlo => gen_montecarlo(args.seed),
    };
    save_matrix_csv(&d.x, &args.out)?;
    if let Some(p) = args.scores_out {
        save_matrix_csv(&d.t_true, p)?;
    }
    if let Some(p) = args.loadings_out {
        save_matrix_csv(&d.p_true, p)?;
    }
    eprintln!(
        "{}x{} matrix, {} nonzero loadings",
        d.x.nrows(),
        d.x.ncols(),
        d.nnz_true
    );
    Ok(())
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let mut x = load_matrix_csv(&args.data)?;
    if args.center {
        center_columns(&mut x);
    }
    let m = args.method;
    let (model, knob): (FactorModel, SparsityKnob) = if let Some(target) = args.target_nnz {
        let c = calibrate_sparsity(m, &x, target, args.components)?;
        (c.model, c.knob)
    } else {
        let knob = match (args.lambda1, args.cardinality, args.c2, args.gamma) {
            (Some(v), ..) => SparsityKnob::Lambda1(v),
            (_, Some(k), ..) => SparsityKnob::Cardinality(k),
            (_, _, Some(v), _) => SparsityKnob::C2(v),
            (.., Some(v)) => SparsityKnob::Gamma(v),
            _ if m == Method::Pca => SparsityKnob::None,
            _ => bail!("{m} needs a sparsity knob or --target-nnz"),
        };
        (fit_method(m, &x, args.components, knob)?, knob)
    };
    let model = model.in_mode(&x, args.score_mode)?;
    if let Some(p) = &args.loadings_out {
        save_matrix_csv(&model.loadings, p)?;
    }
    if let Some(p) = &args.scores_out {
        save_matrix_csv(&model.scores, p)?;
    }
    let summary = serde_json::json!({
        "method": m,
        "knob": knob,
        "nnz": model.nnz(),
        "stats": stats_report(&x, &model)?,
    });
    emit(&serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

fn stats(args: StatsArgs) -> anyhow::Result<()> {
    let x = load_matrix_csv(&args.data)?;
    let p = load_matrix_csv(&args.loadings)?;
    let scores = match (&args.scores, args.score_mode) {
        (Some(path), _) => load_matrix_csv(path)?,
        (None, ScoreMode::Naive) => sparsepca::diagnostics::naive_scores(&x, &p)?,
        (None, ScoreMode::Corrected) => sparsepca::diagnostics::corrected_scores(&x, &p)?,
    };
    let model = FactorModel {
        scores,
        loadings: p,
        aux_loadings: None,
        method: Method::Pca,
        deflation: sparsepca::Deflation::None,
        score_mode: args.score_mode,
    };
    let report = stats_report(&x, &model)?;
    emit(&serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn reproduce(args: ReproduceArgs) -> anyhow::Result<()> {
    let kind = match args.target {
        Target::Table1 | Target::Table2 => ExperimentKind::Nonorthogonal,
        Target::Montecarlo => ExperimentKind::Montecarlo,
    };
    let mut cfg = ExperimentConfig::new(kind);
    cfg.seed = args.seed;
    cfg.center = args.center;
    cfg.output_dir = args.output_dir;
    cfg.repetitions = args.repetitions;
    if !matches!(args.target, Target::Montecarlo) {
        cfg.methods = Method::SPARSE.to_vec();
    }
    let out = run_experiment(&cfg)?;
    for path in write_artifacts(&cfg, &out)? {
        eprintln!("wrote {}", path.display());
    }
    let table = match args.target {
        Target::Table1 => Some(TableKind::Correlation),
        Target::Table2 => Some(TableKind::Variance),
        Target::Montecarlo => None,
    };
    if let Some(kind) = table {
        let mut buf = Vec::new();
        build_table(&out, kind)?.write_csv(&mut buf)?;
        emit(String::from_utf8_lossy(&buf).trim_end())?;
    }
    report_failures(&out);
    Ok(())
}

fn report_failures(out: &sparsepca_harness::ExperimentOutput) {
    let failed = out.failures().count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed; see report.json", out.records.len());
    }
}

fn run(config: PathBuf) -> anyhow::Result<()> {
    let cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
    let out = run_experiment(&cfg)?;
    for path in write_artifacts(&cfg, &out)? {
        eprintln!("wrote {}", path.display());
    }
    report_failures(&out);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).init();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Stats(a) => stats(a),
        Command::Reproduce(a) => reproduce(a),
        Command::Run { config } => run(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
