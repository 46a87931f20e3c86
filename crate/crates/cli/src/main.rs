//! `proprio` — simulate a tendon-driven continuum segment with resistive
//! tendon sensing and reconstruct its motion from the sensor readings.

mod calibfile;
mod commands;
mod config;
mod logfile;
mod plot;
mod trajfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "proprio",
    version,
    about = "Tendon-sensing simulator and path reconstruction for a continuum segment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured actuation protocol and write a sensor log.
    Simulate {
        /// Run configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output log CSV.
        #[arg(long)]
        out: PathBuf,
        /// Override the configured random seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit per-tendon resistance-to-length maps and write a calibration file.
    Calibrate {
        /// Run configuration file (sensor, geometry, and sweep settings).
        #[arg(long)]
        config: PathBuf,
        /// Calibrate from a recorded log instead of a synthetic sweep.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Output calibration file.
        #[arg(long)]
        out: PathBuf,
        /// Override the configured random seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reconstruct the end-effector trajectory from a sensor log.
    Reconstruct {
        /// Input log CSV.
        #[arg(long)]
        log: PathBuf,
        /// Calibration file from `calibrate`.
        #[arg(long)]
        calibration: PathBuf,
        /// Run configuration file (bridge, filter, and geometry settings).
        #[arg(long)]
        config: PathBuf,
        /// Output trajectory CSV.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG plot of the XY and XZ projections.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Compare a reconstructed trajectory against ground truth.
    Evaluate {
        /// Reconstructed trajectory CSV (or a log with ground truth).
        #[arg(long)]
        reconstructed: PathBuf,
        /// Ground-truth trajectory CSV or simulated log.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Run the full pipeline end to end into a directory.
    Demo {
        /// Output directory for config, log, calibration, trajectory, plot.
        #[arg(long, default_value = "demo-out")]
        out_dir: PathBuf,
        /// Override the default random seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out, seed } => commands::simulate(&config, &out, seed),
        Command::Calibrate {
            config,
            log,
            out,
            seed,
        } => commands::calibrate(&config, log.as_deref(), &out, seed),
        Command::Reconstruct {
            log,
            calibration,
            config,
            out,
            plot,
        } => commands::reconstruct(&log, &calibration, &config, &out, plot.as_deref()),
        Command::Evaluate {
            reconstructed,
            truth,
        } => commands::evaluate(&reconstructed, &truth),
        Command::Demo { out_dir, seed } => commands::demo(&out_dir, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
