#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use regsel_cli::output::{
    write_config_echo, write_curve_outputs, write_run_outputs, write_sweep_outputs,
};
use regsel_cli::{parse_config, CliError};
use regsel_core::analysis::{burstiness, survival_probability_curve, sweep_typologies};
use regsel_core::universe::run;
use regsel_core::UniverseConfig;

#[derive(Debug, Parser)]
#[command(
    name = "regsel",
    version,
    about = "Selection of self-modelling regulators in a simulated universe"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one universe and write metrics, events and final state.
    Run {
        /// JSON configuration; omitted keys take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also render timeseries.svg and one snapshot_<step>.svg per snapshot step.
        #[arg(long)]
        svg: bool,
    },
    /// Sweep constant (epsilon, energy) typologies over several seeds (budget mode).
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        energy: Vec<f64>,
        /// Number of seeds; seed i is the config seed plus i.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Estimate the probability of an in-time warning over a grid of self-awareness values.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        /// start:stop:step, inclusive of stop.
        #[arg(long, default_value = "0:1:0.1")]
        grid: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load(path: Option<&Path>) -> Result<UniverseConfig, CliError> {
    match path {
        Some(p) => parse_config(p),
        None => Ok(UniverseConfig::default()),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid must be start:stop:step, got `{spec}`"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !(stop >= start) {
        return Err(bad());
    }
    let span = (stop - start) / step;
    let k = (span + 1e-9).floor();
    if k > 1e7 {
        return Err(CliError::Usage(format!(
            "grid `{spec}` has too many points"
        )));
    }
    let k = k as usize;
    // land exactly on `stop` when the step divides the span
    let exact = (span - k as f64).abs() < 1e-9;
    Ok((0..=k)
        .map(|i| {
            if exact && k > 0 {
                start + (stop - start) * i as f64 / k as f64
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            steps,
            out,
            svg,
        } => {
            let mut cfg = load(config.as_deref())?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(steps) = steps {
                cfg.steps = steps;
            }
            let result = run(&cfg)?;
            write_run_outputs(&result, &out, svg)?;
            let first = &result.frames[0];
            let last = result.frames.last().expect("at least the initial frame");
            let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
            println!(
                "steps {}  survivors {}/{}  deaths {}",
                cfg.steps,
                last.alive_count,
                first.alive_count,
                result.events.len()
            );
            println!(
                "delta_ave {} -> {}  tau_ave {} -> {}  rho_ratio {} -> {}",
                fmt(first.delta_ave),
                fmt(last.delta_ave),
                fmt(first.tau_ave),
                fmt(last.tau_ave),
                fmt(first.rho_ratio),
                fmt(last.rho_ratio)
            );
            println!(
                "burstiness {}",
                fmt(burstiness(&result.events).burstiness_index)
            );
            println!("wrote {}", out.display());
        }
        Command::Sweep {
            config,
            epsilon,
            energy,
            seeds,
            out,
        } => {
            let cfg = load(config.as_deref())?;
            let seed_list: Vec<u64> = (0..seeds).map(|i| cfg.seed.wrapping_add(i)).collect();
            let result = sweep_typologies(&cfg, &epsilon, &energy, &seed_list)?;
            write_sweep_outputs(&result, &out)?;
            write_config_echo(&cfg, &out)?;
            match result.capacity_lifetime_spearman() {
                Some(rho) => println!("spearman(epsilon*energy, mean lifetime) = {rho:.4}"),
                None => println!("spearman(epsilon*energy, mean lifetime) undefined"),
            }
            println!("wrote {}", out.display());
        }
        Command::Oracle {
            config,
            grid,
            samples,
            seed,
            out,
        } => {
            let cfg = load(config.as_deref())?;
            let grid = parse_grid(&grid)?;
            let curve = survival_probability_curve(&cfg, &grid, samples, seed.unwrap_or(cfg.seed))?;
            write_curve_outputs(&curve, &out)?;
            write_config_echo(&cfg, &out)?;
            for (d, p) in curve.delta_grid.iter().zip(&curve.probs) {
                println!("{d:.3}  {p:.4}");
            }
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
