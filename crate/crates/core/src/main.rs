use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sneakpath::channel::ChannelParams;
use sneakpath::harness::config::{parse_detector_selection, parse_dist, parse_list};
use sneakpath::harness::{
    bounds_table, lemma_curve, print_csv, run_experiment, verify_lemmas, write_bounds, write_lemma_curve,
    write_lemma_report, write_results, ConfigOverrides, Execution, ExperimentConfig, LemmaConfig, BOUNDS_HEADER,
    REPORT_HEADER, RESULTS_HEADER,
};
use sneakpath::Result;

#[derive(Parser)]
#[command(name = "sneakpath", version, about = "Crossbar sneak-path channel simulator and detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep over noise levels.
    Simulate(SimulateArgs),
    /// Analytical thresholds and BER bounds.
    Bounds(BoundsArgs),
    /// Monte Carlo checks of the line-type probabilities and structure rules.
    VerifyLemmas(LemmaArgs),
}

#[derive(Args)]
struct ExecArgs {
    /// Run trials on one thread in order.
    #[arg(long)]
    sequential: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl ExecArgs {
    #[cfg(feature = "parallel")]
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel { threads: self.threads }
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn execution(&self) -> Execution {
        Execution::Sequential
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Key = value file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    /// Comma-separated noise standard deviations in ohms.
    #[arg(long)]
    sigma: Option<String>,
    /// Failure-count probabilities `p0,p1,p2`.
    #[arg(long)]
    sf_dist: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// proposed, baseline or both.
    #[arg(long)]
    detector: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also run the reading with the true failure rows and columns.
    #[arg(long)]
    oracle_sf: bool,
    /// Record wall-clock time in `elapsed_ms`.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value = "30,60,90,120,150,180,210,240,270,300,330,360,390,420")]
    sigma: String,
    #[arg(long, default_value = "0.5,0.4,0.1")]
    sf_dist: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the closed forms for N = 3..=n to this file.
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[command(flatten)]
    exec: ExecArgs,
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let file = match &a.config {
        Some(p) => ConfigOverrides::from_file(p)?,
        None => ConfigOverrides::default(),
    };
    let flags = ConfigOverrides {
        n: a.n,
        q: a.q,
        sigmas: a.sigma.as_deref().map(|s| parse_list("sigma", s)).transpose()?,
        dist: a.sf_dist.as_deref().map(parse_dist).transpose()?,
        trials: a.trials,
        detectors: a.detector.as_deref().map(parse_detector_selection).transpose()?,
        oracle_sf: a.oracle_sf.then_some(true),
        seed: a.seed,
        out: a.out.clone(),
        timing: a.timing.then_some(true),
        ..Default::default()
    };
    let cfg = ExperimentConfig::merged(&[&file, &flags])?;
    let res = run_experiment(&cfg, a.exec.execution())?;
    match &cfg.out {
        Some(p) => write_results(&res.records, p),
        None => print_csv(&res.records, RESULTS_HEADER),
    }
}

fn bounds(a: &BoundsArgs) -> Result<()> {
    let dist = parse_dist(&a.sf_dist)?;
    let sigmas = parse_list("sigma", &a.sigma)?;
    let base = ChannelParams {
        q: a.q,
        ..ChannelParams::default()
    };
    let rows = bounds_table(a.n, &dist, &base, &sigmas)?;
    match &a.out {
        Some(p) => write_bounds(&rows, p),
        None => print_csv(&rows, BOUNDS_HEADER),
    }
}

fn lemmas(a: &LemmaArgs) -> Result<bool> {
    let cfg = LemmaConfig {
        n: a.n,
        q: a.q,
        trials: a.trials,
        seed: a.seed,
    };
    let checks = verify_lemmas(&cfg, a.exec.execution())?;
    match &a.out {
        Some(p) => write_lemma_report(&checks, p)?,
        None => print_csv(&checks, REPORT_HEADER)?,
    }
    if let Some(p) = &a.curve_out {
        let ns: Vec<usize> = (3..=a.n.max(3)).collect();
        write_lemma_curve(&lemma_curve(a.q, &ns)?, p)?;
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a).map(|()| true),
        Command::Bounds(a) => bounds(a).map(|()| true),
        Command::VerifyLemmas(a) => lemmas(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
