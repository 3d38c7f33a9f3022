//! Batch front end: dataset ingestion, test execution, sweep execution and
//! report emission.
//!
//! Exit codes: 0 on a completed run (whether or not the null hypothesis was
//! rejected), 1 on a usage error, 2 on a runtime error.
//!
//! Every run writes its result JSON plus a `<out>.manifest.json` side file
//! recording the reproduction recipe. The result JSON itself is a pure
//! function of the inputs and the seed: the thread count is normalized out
//! of the embedded command echo and wall-clock time lives only in the side
//! file, so reruns compare byte for byte.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::TestConfig;
use crate::dataset::Dataset;
use crate::engine::run_permutation_test;
use crate::error::{Error, Result};
use crate::features::{featurize_records, read_series_csv};
use crate::ingest::{dataset_to_csv, ingest_csv};
use crate::models::RegressorSpec;
use crate::outcome::TestOutcome;
use crate::report::{
    outcome_csv, outcome_json, outcome_svg, parse_outcome_json, sweep_csv, RunManifest,
    SweepReport, TestReport,
};
use crate::simstudy::{
    compare_tests, default_grid, linspace, ScenarioName, ScenarioParams, ScenarioSpec, SweepAxis,
};
use crate::stats::GofStatistic;

#[derive(Debug, Parser)]
#[command(
    name = "refit",
    version,
    about = "Permutation test for whether a regression model predicts better than pure noise"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a CSV dataset: fit the model, refit on permuted responses,
    /// compare the observed statistic against the reference quantile.
    Test(TestArgs),
    /// Rejection-rate sweep over a scenario grid.
    Sweep(SweepArgs),
    /// Emit a synthetic dataset drawn from a named scenario.
    Simulate(SimulateArgs),
    /// Re-render a saved test result in another format.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Ols,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatisticArg {
    R2,
    Tstar,
    AbsRisk,
}

impl From<StatisticArg> for GofStatistic {
    fn from(value: StatisticArg) -> Self {
        match value {
            StatisticArg::R2 => GofStatistic::RSquared,
            StatisticArg::Tstar => GofStatistic::TStar,
            StatisticArg::AbsRisk => GofStatistic::AbsRisk,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args, Clone)]
struct ModelOpts {
    /// Regression model class to fit.
    #[arg(long, value_enum, default_value = "ols")]
    model: ModelArg,

    /// Hidden layer widths for the MLP, comma separated.
    #[arg(long, default_value = "30,30,30", value_delimiter = ',')]
    mlp_layers: Vec<usize>,

    /// Full-batch gradient steps for the MLP.
    #[arg(long, default_value_t = 500)]
    mlp_epochs: usize,

    /// Learning rate for the MLP.
    #[arg(long, default_value_t = 0.01)]
    mlp_learning_rate: f64,
}

impl ModelOpts {
    fn spec(&self) -> RegressorSpec {
        match self.model {
            ModelArg::Ols => RegressorSpec::ols(),
            ModelArg::Mlp => RegressorSpec::mlp(
                self.mlp_layers.clone(),
                self.mlp_epochs,
                self.mlp_learning_rate,
            ),
        }
    }
}

#[derive(Debug, Args, Clone)]
struct RunOpts {
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Number of sampled permutations B.
    #[arg(long, default_value_t = 200)]
    permutations: usize,

    /// Master seed for every random stream of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Enumerate all n! permutations instead of sampling (n <= 8).
    #[arg(long)]
    exhaustive: bool,

    /// Worker threads; the result does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

impl RunOpts {
    fn config(&self) -> TestConfig {
        TestConfig {
            alpha: self.alpha,
            n_permutations: self.permutations,
            master_seed: self.seed,
            exhaustive: self.exhaustive,
        }
    }
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Dataset CSV; with --series it must hold `obs_id` plus the response.
    data: PathBuf,

    /// Name of the response column.
    #[arg(long, default_value = "y")]
    response: String,

    /// Long-format series CSV (obs_id,channel,t_index,value) providing the
    /// predictors via Fourier featurization.
    #[arg(long)]
    series: Option<PathBuf>,

    /// Harmonic count for the Fourier featurization.
    #[arg(long, requires = "series")]
    fourier_k: Option<usize>,

    /// Statistic evaluated on each pairing.
    #[arg(long, value_enum, default_value = "r2")]
    statistic: StatisticArg,

    #[command(flatten)]
    model: ModelOpts,

    #[command(flatten)]
    run: RunOpts,

    /// Result JSON path.
    #[arg(long, default_value = "outcome.json")]
    out: PathBuf,

    /// Also write the reference sample as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Also write the reference histogram as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scenario name (null_uniform, quad_example, log_quad,
    /// log_quad_mean_sweep, bivariate_normal, lognormal_univariate,
    /// null_bivariate).
    #[arg(long)]
    scenario: String,

    /// Base sample size (ignored when the grid drives the sample size).
    #[arg(long, default_value_t = 100)]
    n: usize,

    /// Explicit grid values, comma separated; overrides min/max/steps.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,

    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_steps: Option<usize>,

    /// Replications per grid point.
    #[arg(long, default_value_t = 100)]
    replications: usize,

    /// Statistic(s); pass the flag repeatedly to compare tests on paired
    /// datasets.
    #[arg(long = "statistic", value_enum)]
    statistics: Vec<StatisticArg>,

    /// Scenario parameter `a` (mean shift).
    #[arg(long)]
    param_a: Option<f64>,
    /// Scenario parameter `rho` (correlation).
    #[arg(long)]
    param_rho: Option<f64>,
    /// Scenario parameter `sd2` (standard deviation of the second predictor).
    #[arg(long)]
    param_sd2: Option<f64>,
    /// Scenario parameter `noise_sd` (standard deviation of the noise).
    #[arg(long)]
    param_noise_sd: Option<f64>,

    #[command(flatten)]
    model: ModelOpts,

    #[command(flatten)]
    run: RunOpts,

    /// Result JSON path.
    #[arg(long, default_value = "sweep.json")]
    out: PathBuf,

    /// Also write the rejection-rate curve(s) as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario name.
    #[arg(long)]
    scenario: String,

    #[arg(long, default_value_t = 100)]
    n: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    param_a: Option<f64>,
    #[arg(long)]
    param_rho: Option<f64>,
    #[arg(long)]
    param_sd2: Option<f64>,
    #[arg(long)]
    param_noise_sd: Option<f64>,

    /// Dataset CSV path.
    #[arg(long, default_value = "dataset.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// A result JSON written by `refit test`.
    input: PathBuf,

    #[arg(long, value_enum)]
    format: FormatArg,

    #[arg(long)]
    out: PathBuf,
}

/// Remove `--threads` (both `--threads N` and `--threads=N`) from a command
/// echo; the thread count does not influence any result.
fn normalize_command(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip_next = false;
    for arg in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if arg == "--threads" {
            skip_next = true;
            continue;
        }
        if arg.starts_with("--threads=") {
            continue;
        }
        out.push(arg.clone());
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn manifest_side_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_side_manifest(out: &Path, manifest: &RunManifest, started: Instant) -> Result<()> {
    let mut side = manifest.clone();
    side.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    write_file(
        &manifest_side_path(out),
        &serde_json::to_string_pretty(&side)?,
    )
}

fn scenario_params(
    a: Option<f64>,
    rho: Option<f64>,
    sd2: Option<f64>,
    noise_sd: Option<f64>,
) -> ScenarioParams {
    ScenarioParams {
        a,
        rho,
        sd2,
        noise_sd,
    }
}

/// Join a response table (`obs_id`, response column) against featurized
/// series records.
fn dataset_from_series(
    series_path: &Path,
    data_path: &Path,
    response: &str,
    k: usize,
) -> Result<Dataset> {
    let records = read_series_csv(series_path)?;
    let (obs_ids, predictors) = featurize_records(&records, k)?;

    let text = std::fs::read_to_string(data_path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::ParseError {
        row: 1,
        column: "-".into(),
        message: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let obs_idx = cols
        .iter()
        .position(|c| *c == "obs_id")
        .ok_or_else(|| Error::MissingColumn("obs_id".into()))?;
    let resp_idx = cols
        .iter()
        .position(|c| *c == response)
        .ok_or_else(|| Error::MissingColumn(response.to_string()))?;

    let mut responses: HashMap<String, f64> = HashMap::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = line_no + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(Error::ParseError {
                row,
                column: "-".into(),
                message: format!("expected {} cells, found {}", cols.len(), cells.len()),
            });
        }
        let y: f64 = cells[resp_idx].parse().map_err(|_| Error::ParseError {
            row,
            column: response.to_string(),
            message: format!("`{}` is not a number", cells[resp_idx]),
        })?;
        responses.insert(cells[obs_idx].to_string(), y);
    }

    let ys: Vec<f64> = obs_ids
        .iter()
        .map(|obs| {
            responses
                .get(obs)
                .copied()
                .ok_or_else(|| Error::InvalidParams(format!("no response for observation `{obs}`")))
        })
        .collect::<Result<_>>()?;
    Dataset::new(predictors, ys)
}

fn run_test(args: &TestArgs, command: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let data = match (&args.series, args.fourier_k) {
        (Some(series), Some(k)) => dataset_from_series(series, &args.data, &args.response, k)?,
        (Some(_), None) => {
            return Err(Error::InvalidConfig("--series requires --fourier-k".into()))
        }
        _ => ingest_csv(&args.data, &args.response)?,
    };

    let mut manifest = RunManifest::new(command, args.run.seed);
    manifest.record_input(&args.data)?;
    if let Some(series) = &args.series {
        manifest.record_input(series)?;
    }

    let outcome = run_permutation_test(
        &data,
        &args.model.spec(),
        args.statistic.into(),
        &args.run.config(),
    )?;

    emit_outcome_files(
        &outcome,
        &manifest,
        &args.out,
        args.csv.as_deref(),
        args.svg.as_deref(),
    )?;
    write_side_manifest(&args.out, &manifest, started)?;

    let verdict = if outcome.reject {
        "rejected"
    } else {
        "not rejected"
    };
    println!(
        "statistic {} = {:.6}, {}%-quantile = {:.6}, p = {:.6}: null hypothesis {}",
        outcome.statistic_name,
        outcome.r0,
        100.0 * (1.0 - outcome.config.alpha),
        outcome.q,
        outcome.p_value,
        verdict
    );
    Ok(())
}

fn emit_outcome_files(
    outcome: &TestOutcome,
    manifest: &RunManifest,
    out: &Path,
    csv: Option<&Path>,
    svg: Option<&Path>,
) -> Result<()> {
    let report = TestReport {
        outcome: outcome.clone(),
        manifest: manifest.clone(),
    };
    write_file(out, &outcome_json(&report)?)?;
    if let Some(path) = csv {
        write_file(path, &outcome_csv(outcome))?;
    }
    if let Some(path) = svg {
        write_file(path, &outcome_svg(outcome))?;
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs, command: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let name = ScenarioName::parse(&args.scenario)?;
    let grid: Vec<f64> = if let Some(grid) = &args.grid {
        grid.clone()
    } else {
        match (args.grid_min, args.grid_max, args.grid_steps) {
            (Some(min), Some(max), Some(steps)) => linspace(min, max, steps),
            (None, None, None) => default_grid(name),
            _ => {
                return Err(Error::InvalidConfig(
                    "--grid-min, --grid-max and --grid-steps go together".into(),
                ))
            }
        }
    };

    let base = ScenarioSpec::new(name, args.n, args.run.seed).with_params(scenario_params(
        args.param_a,
        args.param_rho,
        args.param_sd2,
        args.param_noise_sd,
    ));
    // Grid values land on the swept axis; a fixed value there would be
    // silently overwritten, so reject the ambiguity early.
    match name.sweep_axis() {
        SweepAxis::Correlation if args.param_rho.is_some() => {
            return Err(Error::InvalidConfig(
                "the sweep grid drives `rho` for this scenario; drop --param-rho".into(),
            ))
        }
        SweepAxis::MeanShift if args.param_a.is_some() => {
            return Err(Error::InvalidConfig(
                "the sweep grid drives `a` for this scenario; drop --param-a".into(),
            ))
        }
        _ => {}
    }
    let statistics: Vec<GofStatistic> = if args.statistics.is_empty() {
        vec![GofStatistic::RSquared]
    } else {
        args.statistics.iter().map(|&s| s.into()).collect()
    };
    let entries: Vec<(GofStatistic, RegressorSpec)> =
        statistics.iter().map(|&s| (s, args.model.spec())).collect();

    let results = compare_tests(
        &base,
        &grid,
        &entries,
        &args.run.config(),
        args.replications,
    )?;

    let manifest = RunManifest::new(command, args.run.seed);
    let report = SweepReport {
        results: results.clone(),
        manifest: manifest.clone(),
    };
    write_file(&args.out, &serde_json::to_string_pretty(&report)?)?;
    if let Some(path) = &args.csv {
        let mut text = String::new();
        for result in &results {
            if results.len() > 1 {
                text.push_str(&format!("# statistic: {}\n", result.statistic_name));
            }
            text.push_str(&sweep_csv(result));
        }
        write_file(path, &text)?;
    }
    write_side_manifest(&args.out, &manifest, started)?;

    for result in &results {
        println!("statistic {}:", result.statistic_name);
        for (g, rate) in result.grid.iter().zip(&result.rates) {
            println!("  grid {g}: rejection rate {rate:.3}");
        }
    }
    Ok(())
}

fn run_simulate(args: &SimulateArgs, command: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let name = ScenarioName::parse(&args.scenario)?;
    let spec = ScenarioSpec::new(name, args.n, args.seed).with_params(scenario_params(
        args.param_a,
        args.param_rho,
        args.param_sd2,
        args.param_noise_sd,
    ));
    let data = crate::simstudy::generate(&spec)?;
    write_file(&args.out, &dataset_to_csv(&data))?;
    let manifest = RunManifest::new(command, args.seed);
    write_side_manifest(&args.out, &manifest, started)?;
    println!(
        "wrote {} rows x {} predictors to {}",
        data.n(),
        data.dim(),
        args.out.display()
    );
    Ok(())
}

fn run_report(args: &ReportArgs, command: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.input)?;
    let report = parse_outcome_json(&text)?;
    match args.format {
        FormatArg::Json => write_file(&args.out, &outcome_json(&report)?)?,
        FormatArg::Csv => write_file(&args.out, &outcome_csv(&report.outcome))?,
        FormatArg::Svg => write_file(&args.out, &outcome_svg(&report.outcome))?,
    }
    let mut manifest = RunManifest::new(command, report.outcome.config.master_seed);
    manifest.record_input(&args.input)?;
    write_side_manifest(&args.out, &manifest, started)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn dispatch(cli: &Cli, command: Vec<String>) -> Result<()> {
    let threads = match &cli.command {
        Command::Test(a) => a.run.threads,
        Command::Sweep(a) => a.run.threads,
        Command::Simulate(_) | Command::Report(_) => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Test(args) => run_test(args, command),
        Command::Sweep(args) => run_sweep(args, command),
        Command::Simulate(args) => run_simulate(args, command),
        Command::Report(args) => run_report(args, command),
    })
}

/// Entry point used by the binary. `args` excludes the program name.
/// Returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let mut argv = vec!["refit".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(&cli, normalize_command(&args)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}
