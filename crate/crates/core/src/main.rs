use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use clgbn::bench::{bench_sweep, write_csv, SweepKind};
use clgbn::data::read_all;
use clgbn::greedy::{greedy_search, FssProblem, DEFAULT_THRESHOLD};
use clgbn::model::{read_model, read_structure, write_model};
use clgbn::sampling::{answer, parse_evidence, Query, SamplingConfig};
use clgbn::synthetic::{build_super_parent_network, generate_data, SyntheticSpec};
use clgbn::{available_workers, compute_mle, open_dataset, MleConfig};

/// Parallel learning and inference for CLG Bayesian networks.
#[derive(Debug, Parser)]
#[command(name = "clgbn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a super-parent network and sample a dataset from it.
    Gen(GenArgs),
    /// Learn maximum likelihood parameters for a structure.
    Mle(MleArgs),
    /// Answer queries by importance sampling.
    Is(IsArgs),
    /// Greedy wrapper feature-subset selection with naive Bayes.
    Fss(FssArgs),
    /// Time MLE across worker counts or batch sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Multinomial and Gaussian child counts, as `M,G`.
    #[arg(long, default_value = "10,10")]
    spec: String,
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset output path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the generating model here.
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long, default_value_t = available_workers())]
    workers: usize,
}

#[derive(Debug, Args)]
struct MleArgs {
    #[arg(long)]
    data: PathBuf,
    /// Model file whose variables and parent sets are used; parameters in it are ignored.
    #[arg(long)]
    structure: PathBuf,
    #[arg(long, default_value_t = clgbn::data::DEFAULT_BATCH_SIZE)]
    batch_size: usize,
    #[arg(long, default_value_t = available_workers())]
    workers: usize,
    /// Merge plain floating-point partial sums in completion order.
    #[arg(long)]
    unordered: bool,
    /// Write the model here instead of standard output.
    #[arg(long)]
    out_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IsArgs {
    #[arg(long)]
    model: PathBuf,
    /// `P(name=value)`, `P(name<value)` (also `<=`, `>`, `>=`) or `E(name)`; repeatable.
    #[arg(long, required = true)]
    query: Vec<String>,
    /// Observed values as `name=value,name=value`.
    #[arg(long, default_value = "")]
    evidence: String,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = available_workers())]
    workers: usize,
}

#[derive(Debug, Args)]
struct FssArgs {
    #[arg(long)]
    data: PathBuf,
    /// Name of the discrete class column.
    #[arg(long)]
    class: String,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = available_workers())]
    workers: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    structure: PathBuf,
    /// `workers` or `batch-size`.
    #[arg(long)]
    sweep: String,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Batch size while sweeping workers.
    #[arg(long, default_value_t = clgbn::data::DEFAULT_BATCH_SIZE)]
    batch_size: usize,
    /// Worker count while sweeping batch sizes.
    #[arg(long, default_value_t = available_workers())]
    workers: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn positive(name: &str, value: usize) -> Result<(), Failure> {
    if value == 0 {
        return Err(Failure::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create `{}`", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_text(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => {
            positive("workers", a.workers)?;
            let counts: Vec<usize> = a
                .spec
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Usage(format!("--spec expects `M,G`, got `{}`", a.spec)))?;
            let [m, g] = counts[..] else {
                return Err(Failure::Usage(format!("--spec expects `M,G`, got `{}`", a.spec)));
            };
            let bn = build_super_parent_network(&SyntheticSpec::new(m, g, a.seed)).map_err(anyhow::Error::from)?;
            if let Some(path) = &a.model_out {
                fs::write(path, write_model(&bn))
                    .with_context(|| format!("cannot write `{}`", path.display()))?;
            }
            let mut out = output(Some(&a.out))?;
            generate_data(&bn, a.n, a.seed, a.workers, &mut out)
                .with_context(|| format!("cannot write `{}`", a.out.display()))?;
        }
        Command::Mle(a) => {
            positive("batch-size", a.batch_size)?;
            positive("workers", a.workers)?;
            let dag = read_structure(&read_text(&a.structure)?).map_err(anyhow::Error::from)?;
            let mut source = open_dataset(&a.data, a.batch_size).map_err(anyhow::Error::from)?;
            let config = MleConfig {
                batch_size: a.batch_size,
                workers: a.workers,
                deterministic_reduce: !a.unordered,
            };
            let bn = compute_mle(&mut source, &dag, &config).map_err(anyhow::Error::from)?;
            let mut out = output(a.out_model.as_ref())?;
            out.write_all(write_model(&bn).as_bytes())
                .and_then(|()| out.flush())
                .context("cannot write model")?;
        }
        Command::Is(a) => {
            positive("workers", a.workers)?;
            if a.samples == 0 {
                return Err(Failure::Usage("--samples must be at least 1".into()));
            }
            let bn = read_model(&read_text(&a.model)?).map_err(anyhow::Error::from)?;
            let evidence =
                parse_evidence(&bn, &a.evidence).map_err(|e| Failure::Usage(e.to_string()))?;
            let queries = a
                .query
                .iter()
                .map(|q| Query::parse(&bn, q))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let config = SamplingConfig {
                samples: a.samples,
                seed: a.seed,
                workers: a.workers,
            };
            for q in &queries {
                let estimate = answer(&bn, &evidence, q, &config).map_err(anyhow::Error::from)?;
                println!("{q} = {}", estimate.value);
            }
        }
        Command::Fss(a) => {
            positive("workers", a.workers)?;
            if !(a.threshold.is_finite() && a.threshold >= 0.0) {
                return Err(Failure::Usage("--threshold must be finite and non-negative".into()));
            }
            let mut source = open_dataset(&a.data, clgbn::data::DEFAULT_BATCH_SIZE)
                .map_err(anyhow::Error::from)?;
            let data = read_all(&mut source).map_err(anyhow::Error::from)?;
            let problem = FssProblem::new(source.schema().clone(), data, &a.class)
                .map_err(anyhow::Error::from)?;
            let result = greedy_search(&problem, a.threshold, a.workers)
                .map_err(|e| anyhow!("{e}"))?;
            let mut names = Vec::new();
            for (k, c) in result.trace.iter().enumerate() {
                let name = problem.feature_name(c.item);
                println!("step {}: +{name} score={}", k + 1, c.score);
                names.push(name);
            }
            println!("selected: {}", names.join(","));
        }
        Command::Bench(a) => {
            positive("reps", a.reps)?;
            positive("batch-size", a.batch_size)?;
            positive("workers", a.workers)?;
            let sweep: SweepKind = a.sweep.parse().map_err(|e: clgbn::bench::BenchError| Failure::Usage(e.to_string()))?;
            if a.values.contains(&0) {
                return Err(Failure::Usage("--values must all be at least 1".into()));
            }
            let dag = read_structure(&read_text(&a.structure)?).map_err(anyhow::Error::from)?;
            let base = MleConfig {
                batch_size: a.batch_size,
                workers: a.workers,
                deterministic_reduce: true,
            };
            let rows = bench_sweep(&a.data, &dag, sweep, &a.values, a.reps, base)
                .map_err(anyhow::Error::from)?;
            let mut out = output(a.out_csv.as_ref())?;
            write_csv(&rows, &mut out)
                .and_then(|()| out.flush())
                .context("cannot write report")?;
        }
    }
    Ok(())
}
