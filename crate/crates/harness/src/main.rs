use clap::{Parser, Subcommand};
use scenesync_core::scene::Tempo;
use scenesync_harness::report::{
    drift_csv, probe_csv, read_drift_csv, summary_text, write_text,
};
use scenesync_harness::{
    classify, probe_demo, run_scenario, scalability, HarnessError, Scalability, ScenarioConfig,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "scenesync",
    about = "Scripted drift and probe-rate experiments for the scene sync engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scripted scenario; writes drift.csv and summary.txt.
    Run {
        /// Scenario file, flat key = value lines.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (defaults to the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the scripted action rate against the link's capacity.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run probes with no actions; writes probes.csv.
    ProbeDemo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare mean drift across runs with different client counts.
    Psi {
        /// One drift.csv per run.
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<ScenarioConfig, HarnessError> {
    let mut cfg = ScenarioConfig::from_file(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(out) = out {
        cfg.out = out;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let cfg = load(&config, seed, out)?;
            let outcome = run_scenario(&cfg)?;
            if outcome.report.tempo == Tempo::High {
                eprintln!(
                    "warning: scripted rate {} 1/s exceeds the {} 1/s the link sustains; replicas will trail",
                    outcome.report.action_rate, outcome.report.capacity_rate
                );
            }
            let drift_path = cfg.out.join("drift.csv");
            write_text(&drift_path, &drift_csv(&outcome.samples))?;
            write_text(&cfg.out.join("summary.txt"), &summary_text(&outcome.summary))?;
            println!(
                "wrote {} samples to {} (summary.txt beside it)",
                outcome.samples.len(),
                drift_path.display()
            );
            Ok(())
        }
        Command::Classify { config } => {
            let report = classify(&ScenarioConfig::from_file(&config)?)?;
            println!("action_rate_per_s = {}", report.action_rate);
            println!("capacity_rate_per_s = {}", report.capacity_rate);
            println!(
                "tempo = {}",
                match report.tempo {
                    Tempo::High => "high",
                    Tempo::Low => "low",
                }
            );
            Ok(())
        }
        Command::ProbeDemo { config, seed, out } => {
            let cfg = load(&config, seed, out)?;
            let outcome = probe_demo(&cfg)?;
            let path = cfg.out.join("probes.csv");
            write_text(&path, &probe_csv(&outcome.points))?;
            println!(
                "sent {} probes over {} s, final rate {} 1/s; series in {}",
                outcome.probes_sent,
                cfg.duration_s,
                outcome.final_gamma,
                path.display()
            );
            Ok(())
        }
        Command::Psi { inputs } => {
            let mut runs = Vec::new();
            for path in &inputs {
                runs.push(read_drift_csv(path)?);
            }
            let report = scalability(&runs)?;
            for (clients, psi) in &report.psi {
                println!("clients = {clients}: psi_deg = {psi}");
            }
            println!("ratio = {}", report.ratio);
            println!(
                "scalability = {}",
                match report.verdict {
                    Scalability::High => "high",
                    Scalability::Low => "low",
                }
            );
            Ok(())
        }
    }
}
