//! `lpplab` command line: verification suites and sample export.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpplab::harness::{run_suite, sample_export, ExperimentConfig, OutputFormat, Suite};
use lpplab::LppError;

#[derive(Parser, Debug)]
#[command(name = "lpplab", version, about = "Exponential last-passage percolation experiments")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite (the default).
    Run(RunArgs),
    /// Write exact and prelimit Busemann samples as CSV, with histogram side files.
    Export(RunArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct RunArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// deterministic, busmar, invariance, burke, cdf, independence, shen, thin, lln or all.
    #[arg(long)]
    suite: Option<Suite>,
    /// Master seed. Falls back to LPPLAB_SEED, then the config file, then the built-in default.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Directions, comma separated and strictly increasing.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    /// Prelimit heights, comma separated and strictly increasing.
    #[arg(long, value_delimiter = ',')]
    heights: Option<Vec<usize>>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Permutations per permutation test.
    #[arg(long)]
    permutations: Option<usize>,
    /// Report file for runs, output directory for exports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Worker threads for replica-parallel sampling.
    #[arg(long)]
    jobs: Option<usize>,
    /// Reduced sample sizes with widened statistical bounds.
    #[arg(long)]
    quick: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig, LppError> {
        let mut seed_in_file = false;
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let raw: serde_json::Value = serde_json::from_str(&text)?;
                seed_in_file = raw.get("seed").is_some();
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.suite {
            cfg.suite = v;
        }
        match (self.seed, std::env::var("LPPLAB_SEED")) {
            (Some(seed), _) => cfg.seed = seed,
            (None, Ok(text)) if !seed_in_file => {
                cfg.seed = text
                    .trim()
                    .parse()
                    .map_err(|_| LppError::Config(format!("LPPLAB_SEED={text:?} is not an unsigned integer")))?;
            }
            _ => {}
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = Some(v);
                }
            )*};
        }
        set!(replicas, k, l, d, r, heights, out, jobs);
        if let Some(v) = self.burn_in {
            cfg.burn_in = v;
        }
        if let Some(v) = self.permutations {
            cfg.permutations = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.quick |= self.quick;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set_jobs(cfg: &ExperimentConfig) -> Result<(), LppError> {
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| LppError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cfg: &ExperimentConfig) -> Result<bool, LppError> {
    let report = run_suite(cfg)?;
    for case in &report.cases {
        println!("{}", case.summary_line());
    }
    let rendered = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, rendered)?,
        None if cfg.format == OutputFormat::Csv => print!("{rendered}"),
        None => {}
    }
    println!(
        "{} suite {} in {:.1} s",
        if report.pass { "PASS" } else { "FAIL" },
        report.suite,
        report.wall_time_ms as f64 / 1000.0
    );
    Ok(report.pass)
}

fn export(cfg: &ExperimentConfig) -> Result<bool, LppError> {
    let summary = sample_export(cfg)?;
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    println!("{} rows, {} columns per table", summary.rows, summary.columns);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, exporting) = match cli.command {
        Some(Command::Run(a)) => (a, false),
        Some(Command::Export(a)) => (a, true),
        None => (cli.run, false),
    };
    let outcome = args.into_config().and_then(|cfg| {
        set_jobs(&cfg)?;
        if exporting {
            export(&cfg)
        } else {
            run(&cfg)
        }
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("lpplab: {e}");
            ExitCode::from(2)
        }
    }
}
