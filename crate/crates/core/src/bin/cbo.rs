use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cbo::benchmarks::Surface;
use cbo::domain::{seeded_rng, DEFAULT_VOLUME_PROBES};
use cbo::error::{Error, Result};
use cbo::harness::{run_suite, write_suite, SuiteConfig};
use cbo::planner::Strategy;

#[derive(Parser)]
#[command(
    name = "cbo",
    version,
    about = "Constrained Bayesian optimization campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded, repeated campaigns on a benchmark surface.
    Run(RunArgs),
    /// Inspect the benchmark surfaces.
    Surfaces {
        #[command(subcommand)]
        command: SurfacesCommand,
    },
    /// Monte Carlo estimate of a surface's feasible fraction.
    Volume {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = DEFAULT_VOLUME_PROBES)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SurfacesCommand {
    List,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config file; flags given alongside it override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    surface: Option<String>,
    /// One strategy, or several separated by commas.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Lambda schedule, e.g. "1,-1".
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run_command(args),
        Command::Surfaces {
            command: SurfacesCommand::List,
        } => {
            println!(
                "{:<16} {:<10} {:>5} {:>8}  objectives",
                "name", "kind", "dims", "feasible"
            );
            for s in Surface::ALL {
                let bench = s.build();
                let kind = if s.is_discrete() {
                    "discrete"
                } else {
                    "continuous"
                };
                let feasible = bench
                    .feasible_count
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "-".into());
                let objectives: Vec<String> = s.objectives().into_iter().map(|o| o.name).collect();
                println!(
                    "{:<16} {:<10} {:>5} {:>8}  {}",
                    s.name(),
                    kind,
                    bench.space.dim(),
                    feasible,
                    objectives.join(",")
                );
            }
            Ok(())
        }
        Command::Volume {
            surface,
            probes,
            seed,
        } => {
            let s = Surface::from_name(&surface)?;
            let fraction = s
                .space()
                .estimate_feasible_fraction(probes, &mut seeded_rng(seed))?;
            println!("{fraction}");
            Ok(())
        }
    }
}

fn run_command(args: RunArgs) -> Result<()> {
    let mut value = match &args.config {
        Some(path) => {
            serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Config {
                pointer: String::new(),
                message: e.to_string(),
            })?
        }
        None => serde_json::json!({}),
    };
    let obj = value.as_object_mut().ok_or_else(|| Error::Config {
        pointer: String::new(),
        message: "config must be a JSON object".into(),
    })?;
    if let Some(s) = args.surface {
        obj.insert("surface".into(), s.into());
    }
    if let Some(s) = args.strategy {
        let names: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
        for name in &names {
            name.parse::<Strategy>().map_err(|m| Error::Config {
                pointer: "/strategy".into(),
                message: m,
            })?;
        }
        obj.insert("strategy".into(), names.into());
    }
    if let Some(b) = args.budget {
        obj.insert("budget".into(), b.into());
    }
    if let Some(r) = args.repeats {
        obj.insert("repeats".into(), r.into());
    }
    if let Some(s) = args.seed {
        obj.insert("seed".into(), s.into());
    }
    if let Some(l) = args.lambda {
        let schedule = l
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Config {
                pointer: "/lambda_schedule".into(),
                message: e.to_string(),
            })?;
        obj.insert("lambda_schedule".into(), schedule.into());
    }

    let config = SuiteConfig::from_value(&value)?;
    let report = run_suite(&config)?;
    write_suite(&report, &args.out)?;
    for agg in &report.summary.aggregates {
        let mut line = format!(
            "{:<16} runs={} failed={}",
            agg.strategy, agg.runs, agg.failed
        );
        if let Some(r) = agg.final_regret {
            line.push_str(&format!(" final_regret={:.6}±{:.6}", r.mean, r.ci_half));
        }
        if let Some(e) = agg.evals_to_optimum.as_ref().and_then(|e| e.stats) {
            line.push_str(&format!(" evals_to_optimum={:.1}±{:.1}", e.mean, e.ci_half));
        }
        println!("{line}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
