//! Implementations of the CLI subcommands.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use proprio_core::calibration::{calibrate_from_samples, fit_report, CalibrationSample};
use proprio_core::reconstruction::{
    path_error, reconstruct_path, PathErrorReport, PathGeometry, SensorLog, Trajectory,
};
use proprio_core::sensing::bridge_invert;
use proprio_core::simulator::{calibration_sweep, simulate_run};

use crate::config::RunConfig;
use crate::{calibfile, logfile, plot, trajfile};

fn load_config(path: &Path, seed: Option<u64>) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("failed to read config {}", path.display()))?;
    let config =
        RunConfig::parse(&text).with_context(|| format!("invalid config {}", path.display()))?;
    Ok(match seed {
        Some(seed) => config.with_seed(seed),
        None => config,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("failed to write {}", path.display()))
}

fn load_log(path: &Path) -> Result<SensorLog<f64>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("failed to read log {}", path.display()))?;
    logfile::parse(&text).with_context(|| format!("invalid log {}", path.display()))
}

/// `simulate`: run the configured protocol and write the sensor log; the
/// resolved configuration echoes to standard output.
pub fn simulate(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config_path, seed)?;
    let run = simulate_run(&config.protocol, &config.geometry, &config.sensor)?;
    write_file(out, &logfile::render(&run))?;
    print!("{}", config.render());
    println!("# wrote {} samples to {}", run.log.len(), out.display());
    Ok(())
}

/// Calibration samples from a recorded log: measured resistance per channel
/// paired with the ground-truth active-length change.
fn samples_from_log(
    log: &SensorLog<f64>,
    config: &RunConfig,
) -> Result<Vec<Vec<CalibrationSample<f64>>>> {
    let truth = log
        .ground_truth()
        .context("log carries no ground-truth channels; calibrate needs l1..l3")?;
    let mut per_tendon = Vec::with_capacity(3);
    for c in 0..3 {
        let mut samples = Vec::with_capacity(log.len());
        for (i, v) in log.channels()[c].iter().enumerate() {
            let resistance = bridge_invert(*v, &config.sensor.bridge)
                .with_context(|| format!("row {}: channel {} is saturated", i + 1, c + 1))?;
            let change = truth.lengths[i][c] - config.geometry.base_length;
            samples.push(CalibrationSample::new(resistance, change)?);
        }
        per_tendon.push(samples);
    }
    Ok(per_tendon)
}

/// `calibrate`: fit per-tendon cubic maps either from a synthetic sweep or
/// from a recorded log, write the record, and print the fit report.
pub fn calibrate(
    config_path: &Path,
    log: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let config = load_config(config_path, seed)?;
    let samples = match log {
        Some(log_path) => samples_from_log(&load_log(log_path)?, &config)?,
        None => calibration_sweep(
            &config.geometry,
            &config.sensor,
            config.sweep_steps,
            config.sweep_max_bend,
        )?,
    };
    let record = calibrate_from_samples(&samples)?;
    write_file(out, &calibfile::render(&record))?;
    print!("{}", fit_report(&record)?);
    Ok(())
}

/// `reconstruct`: run the inverse pipeline over a log and write the
/// trajectory (and optionally an XY/XZ projection plot).
pub fn reconstruct(
    log_path: &Path,
    calibration_path: &Path,
    config_path: &Path,
    out: &Path,
    plot_path: Option<&Path>,
) -> Result<()> {
    let config = load_config(config_path, None)?;
    let log = load_log(log_path)?;
    let calibration_text = fs::read_to_string(calibration_path)
        .with_context(|| format!("failed to read calibration {}", calibration_path.display()))?;
    let record = calibfile::parse(&calibration_text)
        .with_context(|| format!("invalid calibration {}", calibration_path.display()))?;
    let trajectory = reconstruct_path(
        &log,
        &config.sensor.bridge,
        &record,
        &config.filter,
        &PathGeometry::new(config.geometry.d, config.geometry.n_links)?,
        &config.reconstruction,
    )?;
    write_file(out, &trajfile::render(&trajectory))?;
    if let Some(plot_path) = plot_path {
        let truth = truth_from_log(&log).ok();
        write_file(plot_path, &plot::render(&trajectory, truth.as_ref()))?;
    }
    println!(
        "# reconstructed {} samples to {}",
        trajectory.len(),
        out.display()
    );
    Ok(())
}

fn truth_from_log(log: &SensorLog<f64>) -> Result<Trajectory<f64>> {
    let truth = log
        .ground_truth()
        .context("log carries no ground-truth channels")?;
    Ok(Trajectory::new(
        log.timestamps().to_vec(),
        truth.positions.clone(),
        truth.configs.clone(),
    )?)
}

/// Loads a trajectory from either a trajectory CSV or a ground-truth log.
fn load_trajectory(path: &Path) -> Result<Trajectory<f64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("failed to read {}", path.display()))?;
    let header = text.lines().next().unwrap_or_default();
    if header.starts_with("t,v1") {
        truth_from_log(&logfile::parse(&text)?)
            .with_context(|| format!("{} holds no ground truth", path.display()))
    } else {
        trajfile::parse(&text).with_context(|| format!("invalid trajectory {}", path.display()))
    }
}

pub fn render_error_report(report: &PathErrorReport<f64>) -> String {
    format!(
        "rmse_m={:.9}\nmax_m={:.9}\nrmse_x_m={:.9}\nrmse_y_m={:.9}\nrmse_z_m={:.9}\n",
        report.rmse,
        report.max_error,
        report.per_axis_rmse[0],
        report.per_axis_rmse[1],
        report.per_axis_rmse[2]
    )
}

/// `evaluate`: pointwise error metrics between a reconstructed trajectory
/// and a ground truth (trajectory file or simulated log).
pub fn evaluate(reconstructed: &Path, truth: &Path) -> Result<()> {
    let reconstructed = load_trajectory(reconstructed)?;
    let truth = load_trajectory(truth)?;
    let report = path_error(&reconstructed, &truth)?;
    print!("{}", render_error_report(&report));
    Ok(())
}

/// `demo`: the full pipeline in one shot — simulate, calibrate,
/// reconstruct, plot, and evaluate against ground truth.
pub fn demo(out_dir: &Path, seed: Option<u64>) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("failed to create {}", out_dir.display()))?;
    let config = match seed {
        Some(seed) => RunConfig::default().with_seed(seed),
        None => RunConfig::default(),
    };
    let config_path = out_dir.join("demo.cfg");
    write_file(&config_path, &config.render())?;
    println!("wrote {}", config_path.display());

    let run = simulate_run(&config.protocol, &config.geometry, &config.sensor)?;
    let log_path = out_dir.join("run.csv");
    write_file(&log_path, &logfile::render(&run))?;
    println!("wrote {} ({} samples)", log_path.display(), run.log.len());

    // Calibrate on a noiseless sweep so the map reflects the sensor, not
    // one noise draw.
    let mut sweep_sensor = config.sensor;
    sweep_sensor.noise.sigma = 0.0;
    let samples = calibration_sweep(
        &config.geometry,
        &sweep_sensor,
        config.sweep_steps,
        config.sweep_max_bend,
    )?;
    let record = calibrate_from_samples(&samples)?;
    let calibration_path = out_dir.join("calibration.txt");
    write_file(&calibration_path, &calibfile::render(&record))?;
    print!("{}", fit_report(&record)?);

    let trajectory = reconstruct_path(
        &run.log,
        &config.sensor.bridge,
        &record,
        &config.filter,
        &PathGeometry::new(config.geometry.d, config.geometry.n_links)?,
        &config.reconstruction,
    )?;
    let trajectory_path = out_dir.join("trajectory.csv");
    write_file(&trajectory_path, &trajfile::render(&trajectory))?;
    let truth = truth_from_log(&run.log)?;
    let plot_path = out_dir.join("path.svg");
    write_file(&plot_path, &plot::render(&trajectory, Some(&truth)))?;
    println!("wrote {}", trajectory_path.display());
    println!("wrote {}", plot_path.display());

    let report = path_error(&trajectory, &truth)?;
    print!("{}", render_error_report(&report));
    let budget = 0.05 * truth.diameter();
    println!("error_budget_m={budget:.9}");
    if report.rmse > budget {
        bail!(
            "demo reconstruction rmse {:.9} m exceeds 5% of the path diameter ({budget:.9} m)",
            report.rmse
        );
    }
    println!("demo ok: rmse within budget");
    Ok(())
}
