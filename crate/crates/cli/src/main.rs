use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cped_core::bench::{bootstrap, run_sweep, sweep_sets, SweepConfig};
use cped_core::report::{read_csv, render_line_chart, write_csv, ChartSpec};
use cped_core::{
    analyze, load_trials, parse_space, Error, EstimatorConfig, Extension, Method, QuantilePair,
    SweepResult, SyntheticObjective,
};

#[derive(Debug, Parser)]
#[command(
    name = "cped",
    version,
    about = "Hyperparameter importance for conditional search spaces"
)]
struct Cli {
    /// Worker threads for sweeps (defaults to all cores).
    #[arg(long, global = true, env = "HPI_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Importance of every parameter at one quantile pair, as JSON.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        gamma_prime: f64,
        #[command(flatten)]
        estimator: Estimator,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// HPI-vs-γ′ curves for a trials file, optionally bootstrapped.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        estimator: Estimator,
        /// Number of bootstrap resamples; without it the trials are used once.
        #[arg(long)]
        seeds: Option<u64>,
        /// CSV output path.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        chart: Chart,
    },
    /// Sweep on a synthetic objective over several seeds.
    Bench {
        /// activation-disjoint, activation-overlap or regime-domains.
        #[arg(long, value_parser = parse_objective)]
        objective: SyntheticObjective,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Number of seeds; runs use seeds 0, 1, …, K−1.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[command(flatten)]
        estimator: Estimator,
        #[arg(long)]
        output_csv: PathBuf,
        #[command(flatten)]
        chart: Chart,
    },
    /// Renders a sweep CSV as an SVG line chart.
    Plot {
        #[arg(long)]
        input_csv: PathBuf,
        #[arg(long)]
        output_svg: PathBuf,
        /// Scale the y axis to the data (for raw variances).
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Search-space JSON file.
    #[arg(long)]
    space: PathBuf,
    /// Trials JSON Lines file.
    #[arg(long)]
    trials: PathBuf,
}

#[derive(Debug, Args)]
struct Estimator {
    /// cped, ped, standard or naive-within.
    #[arg(long, default_value = "cped", value_parser = parse_method)]
    method: Method,
    /// filtering, imputation or expansion (only with --method ped).
    #[arg(long, value_parser = parse_extension)]
    extension: Option<Extension>,
    #[arg(long, default_value_t = cped_core::hpi::DEFAULT_GRID_SIZE)]
    grid_size: usize,
}

#[derive(Debug, Args)]
struct Chart {
    /// Also render the curves as SVG.
    #[arg(long)]
    output_svg: Option<PathBuf>,
    /// Aggregate raw variances instead of normalized importances.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    title: Option<String>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_extension(s: &str) -> Result<Extension, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_objective(s: &str) -> Result<SyntheticObjective, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Estimator {
    fn validate(&self) -> cped_core::Result<EstimatorConfig> {
        if self.extension.is_some() && self.method != Method::Ped {
            return Err(Error::InvalidArgument(format!(
                "--extension only applies to --method ped, not {}",
                self.method
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidArgument(format!(
                "--grid-size must be at least 2, got {}",
                self.grid_size
            )));
        }
        Ok(EstimatorConfig::with_grid_size(self.grid_size))
    }
}

fn load(input: &Input) -> cped_core::Result<cped_core::EvaluationSet> {
    let text = std::fs::read_to_string(&input.space).map_err(|source| Error::Io {
        path: input.space.clone(),
        source,
    })?;
    let space = parse_space(&text)?;
    load_trials(&input.trials, &space)
}

fn emit(result: &SweepResult, csv: &Path, chart: &Chart) -> cped_core::Result<()> {
    write_csv(result, csv)?;
    if let Some(svg) = &chart.output_svg {
        // Render from the CSV round trip so that `plot` on the CSV reproduces
        // the same bytes.
        render_line_chart(
            &read_csv(csv)?,
            &chart_spec(result, chart.raw, chart.title.as_deref()),
            svg,
        )?;
    }
    if !result.degenerate.is_empty() {
        log::warn!(
            "{} (seed, γ′) runs had all-zero importances and were left out of the means",
            result.degenerate.len()
        );
    }
    Ok(())
}

fn chart_spec(result: &SweepResult, raw: bool, title: Option<&str>) -> ChartSpec {
    let mut spec = ChartSpec::for_result(result, raw);
    if let Some(t) = title {
        spec.title = t.to_string();
    }
    spec
}

fn run(cli: Cli) -> cped_core::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::Analyze {
            input,
            gamma,
            gamma_prime,
            estimator,
            output,
        } => {
            let q = QuantilePair::new(gamma, gamma_prime)?;
            let config = estimator.validate()?;
            let set = load(&input)?;
            let report = analyze(&set, q, estimator.method, estimator.extension, &config)?;
            let json = serde_json::to_string_pretty(&report).expect("reports serialize");
            match output {
                Some(path) => std::fs::write(&path, json + "\n")
                    .map_err(|source| Error::Io { path, source })?,
                None => {
                    // A closed pipe (e.g. `| head`) is not an error.
                    let mut out = std::io::stdout().lock();
                    let _ = writeln!(out, "{json}");
                }
            }
        }
        Command::Sweep {
            input,
            gamma,
            step,
            estimator,
            seeds,
            output,
            chart,
        } => {
            QuantilePair::new(gamma, step)?;
            let config = estimator.validate()?;
            let set = load(&input)?;
            let sets: Vec<(u64, cped_core::EvaluationSet)> = match seeds {
                None => vec![(0, set)],
                Some(0) => return Err(Error::InvalidArgument("--seeds must be at least 1".into())),
                Some(k) => (0..k).map(|seed| (seed, bootstrap(&set, seed))).collect(),
            };
            let result = sweep_sets(
                &sets,
                gamma,
                step,
                estimator.method,
                estimator.extension,
                config,
                chart.raw,
            )?;
            emit(&result, &output, &chart)?;
        }
        Command::Bench {
            objective,
            n,
            gamma,
            step,
            seeds,
            estimator,
            output_csv,
            chart,
        } => {
            QuantilePair::new(gamma, step)?;
            let estimator_config = estimator.validate()?;
            if seeds == 0 {
                return Err(Error::InvalidArgument("--seeds must be at least 1".into()));
            }
            let config = SweepConfig {
                objective,
                n,
                gamma,
                gamma_prime_step: step,
                seeds: (0..seeds).collect(),
                estimator: estimator_config,
                raw: chart.raw,
            };
            let result = run_sweep(&config, estimator.method, estimator.extension)?;
            emit(&result, &output_csv, &chart)?;
        }
        Command::Plot {
            input_csv,
            output_svg,
            raw,
            title,
        } => {
            let result = read_csv(&input_csv)?;
            render_line_chart(
                &result,
                &chart_spec(&result, raw, title.as_deref()),
                &output_svg,
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // Everything before clap's usage hint, on one line.
            let message = e.to_string();
            let summary: Vec<&str> = message
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(|l| l.trim())
                .filter(|l| !l.is_empty())
                .collect();
            let summary = summary.join(" ");
            eprintln!("error: usage: {}", summary.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.kind();
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {message}", kind.code());
            ExitCode::from(kind.exit_code() as u8)
        }
    }
}
