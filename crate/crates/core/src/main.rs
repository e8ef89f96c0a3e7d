use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use normgrad::bench::{
    cmd_ratefit, cmd_run, fit_sweep_rates, read_summaries, run_checks, run_sweep, write_sweep_csv,
    CheckOptions, ExitStatus, ExperimentConfig, Suite, SweepGrid,
};
use normgrad::learners::LearnerKind;
use normgrad::Error;

#[derive(Parser)]
#[command(name = "normgrad", version, about = "Normalized-gradient reduction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write trajectory CSVs and summary JSONs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep PowerNorm problems over exponents, learners, horizons, and seeds.
    Sweep {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        nu: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        learner: Option<Vec<LearnerKind>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        horizons: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        dim: Option<usize>,
        /// Distance of the start point from the minimizer.
        #[arg(long)]
        distance: Option<f64>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a rate fit per (nu, learner, seed) series to stderr.
        #[arg(long)]
        fit: bool,
    },
    /// Fit log gap against log T over summary files.
    Ratefit {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
    },
    /// Run the seeded property suites and print a JSON report.
    Check {
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Multiply every declared Hölder constant (e.g. 0.5 as a negative control).
        #[arg(long, default_value_t = 1.0)]
        scale_l_nu: f64,
    },
}

fn status_of(err: &Error) -> ExitStatus {
    match err {
        Error::Config(_) => ExitStatus::Usage,
        _ => ExitStatus::Failure,
    }
}

fn execute(command: Command) -> Result<ExitStatus, Error> {
    match command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let outcome = cmd_run(&cfg, &out)?;
            for s in &outcome.summaries {
                println!(
                    "T={} steps={} early_stop={} gap={:.6e} closed_form={:.6e}",
                    s.config.horizon, s.steps_taken, s.terminated_early, s.f_gap_avg, s.bound_closed_form
                );
            }
            for v in &outcome.violations {
                eprintln!("bound violation: {v}");
            }
            Ok(outcome.status())
        }
        Command::Sweep {
            nu,
            learner,
            horizons,
            seeds,
            dim,
            distance,
            out,
            fit,
        } => {
            let mut grid = SweepGrid::default();
            if let Some(v) = nu {
                grid.nus = v;
            }
            if let Some(v) = learner {
                grid.learners = v;
            }
            if let Some(v) = horizons {
                grid.horizons = v;
            }
            if let Some(v) = seeds {
                grid.seeds = v;
            }
            if let Some(v) = dim {
                grid.dimension = v;
            }
            if let Some(v) = distance {
                grid.distance = v;
            }
            let rows = run_sweep(&grid)?;
            match &out {
                Some(path) => {
                    let file = std::fs::File::create(path)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    write_sweep_csv(&rows, file)?;
                }
                None => write_sweep_csv(&rows, io::stdout().lock())?,
            }
            if fit {
                for f in fit_sweep_rates(&rows) {
                    match f.fit {
                        Ok(r) => eprintln!(
                            "nu={} learner={} seed={} slope={:.4} predicted={:.4} r2={:.4}",
                            f.nu, f.learner, f.seed, r.slope, r.predicted_slope, r.r_squared
                        ),
                        Err(e) => eprintln!("nu={} learner={} seed={}: {e}", f.nu, f.learner, f.seed),
                    }
                }
            }
            let bad: Vec<_> = rows.iter().filter(|r| !r.bounds_hold).collect();
            for r in &bad {
                eprintln!("bound violation: nu={} learner={} T={} seed={}", r.nu, r.learner, r.horizon, r.seed);
            }
            Ok(if bad.is_empty() { ExitStatus::Pass } else { ExitStatus::Failure })
        }
        Command::Ratefit { inputs } => {
            let summaries = read_summaries(&inputs)?;
            let fit = cmd_ratefit(&summaries)?;
            println!("{}", serde_json::to_string_pretty(&fit).expect("fit serializes"));
            Ok(ExitStatus::Pass)
        }
        Command::Check {
            suite,
            samples,
            seed,
            dim,
            scale_l_nu,
        } => {
            let opts = CheckOptions {
                samples,
                seed,
                dimension: dim,
                l_nu_scale: scale_l_nu,
            };
            let report = run_checks(suite, &opts)?;
            let mut stdout = io::stdout().lock();
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            for s in report.suites.iter().filter(|s| !s.passed) {
                eprintln!(
                    "suite {} failed {}/{}: {}",
                    s.suite,
                    s.failures,
                    s.samples,
                    s.worst_offender.as_deref().unwrap_or("no samples")
                );
            }
            Ok(if report.passed { ExitStatus::Pass } else { ExitStatus::Failure })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ExitStatus::Usage as u8 } else { 0 });
        }
    };
    let status = execute(cli.command).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        status_of(&e)
    });
    ExitCode::from(status as u8)
}
