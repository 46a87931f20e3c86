//! Cross-module pipeline invariants that need both the simulator and the
//! reconstruction stack.

use std::f64::consts::PI;

use proprio_core::calibration::calibrate_from_samples;
use proprio_core::reconstruction::{
    path_error, reconstruct_path, FilterSpec, PathGeometry, ReconstructionOptions, SensorLog,
    Trajectory,
};
use proprio_core::simulator::{
    calibration_sweep, simulate_run, ActuationProtocol, ManipulatorGeometry, ProtocolKind,
    SensorModel,
};

fn geometry() -> ManipulatorGeometry<f64> {
    ManipulatorGeometry::default()
}

fn cyclic(duration: f64) -> ActuationProtocol<f64> {
    ActuationProtocol::new(
        ProtocolKind::Cyclic {
            frequency: 0.0625,
            phase_shift: 2.0 * PI / 3.0,
            peak_bend: 20f64.to_radians(),
        },
        duration,
        50.0,
    )
    .unwrap()
}

fn calibration() -> proprio_core::calibration::CalibrationRecord<f64> {
    let sweep = calibration_sweep(
        &geometry(),
        &SensorModel::default().noiseless(),
        21,
        30f64.to_radians(),
    )
    .unwrap();
    calibrate_from_samples(&sweep).unwrap()
}

fn reconstruct(log: &SensorLog<f64>, filter: &FilterSpec) -> Trajectory<f64> {
    let g = geometry();
    reconstruct_path(
        log,
        &SensorModel::default().bridge,
        &calibration(),
        filter,
        &PathGeometry::new(g.d, g.n_links).unwrap(),
        &ReconstructionOptions::delta_from_base(g.base_length),
    )
    .unwrap()
}

/// Replaces one channel with a constant-shifted copy, reusing the original
/// timestamps.
fn shifted_log(log: &SensorLog<f64>, channel: usize, delta: f64) -> SensorLog<f64> {
    let mut channels = log.channels().clone();
    for v in channels[channel].iter_mut() {
        *v += delta;
    }
    SensorLog::from_rate(log.sample_rate(), channels).unwrap()
}

#[test]
fn quantization_error_stays_below_propagated_half_lsb_bound() {
    let g = geometry();
    let clean_sensor = SensorModel::default().noiseless();
    let mut quantized_sensor = SensorModel::default();
    quantized_sensor.noise.sigma = 0.0;

    let clean = simulate_run(&cyclic(16.0), &g, &clean_sensor).unwrap();
    let quantized = simulate_run(&cyclic(16.0), &g, &quantized_sensor).unwrap();

    let filter = FilterSpec::identity();
    let base_traj = reconstruct(&clean.log, &filter);
    let quant_traj = reconstruct(&quantized.log, &filter);
    let quant_rmse = path_error(&quant_traj, &base_traj).unwrap().rmse;

    // Propagate a half-LSB voltage perturbation through the full inverse
    // pipeline per channel and bound the combined effect pointwise by the
    // triangle inequality (1.05 covers second-order curvature).
    let half_lsb = quantized_sensor.adc.unwrap().lsb() / 2.0;
    let n = clean.log.len();
    let mut pointwise_bound = vec![0.0f64; n];
    for channel in 0..3 {
        let mut worst = vec![0.0f64; n];
        for sign in [-1.0, 1.0] {
            let perturbed =
                reconstruct(&shifted_log(&clean.log, channel, sign * half_lsb), &filter);
            for (w, (p, q)) in worst
                .iter_mut()
                .zip(perturbed.points().iter().zip(base_traj.points()))
            {
                *w = w.max(p.distance(q));
            }
        }
        for (bound, w) in pointwise_bound.iter_mut().zip(worst) {
            *bound += w;
        }
    }
    let bound = 1.05 * pointwise_bound.iter().cloned().fold(0.0, f64::max);
    println!("quantization rmse {quant_rmse:.3e} m, propagated half-LSB bound {bound:.3e} m");
    assert!(
        quant_rmse <= bound,
        "quantization rmse {quant_rmse} exceeds propagated bound {bound}"
    );
}

#[test]
fn path_error_grows_monotonically_with_noise() {
    let g = geometry();
    let calib = calibration();
    let filter = FilterSpec::new(21).unwrap();
    let opts = ReconstructionOptions::delta_from_base(g.base_length);
    let path_geometry = PathGeometry::new(g.d, g.n_links).unwrap();

    let mean_rmse = |sigma: f64| -> f64 {
        let mut total = 0.0;
        let seeds = 20u64;
        for seed in 0..seeds {
            let mut sensor = SensorModel::default();
            sensor.noise.sigma = sigma;
            sensor.noise.seed = 3000 + seed;
            let run = simulate_run(&cyclic(8.0), &g, &sensor).unwrap();
            let traj = reconstruct_path(
                &run.log,
                &sensor.bridge,
                &calib,
                &filter,
                &path_geometry,
                &opts,
            )
            .unwrap();
            let truth = Trajectory::new(
                run.log.timestamps().to_vec(),
                run.log.ground_truth().unwrap().positions.clone(),
                run.log.ground_truth().unwrap().configs.clone(),
            )
            .unwrap();
            total += path_error(&traj, &truth).unwrap().rmse;
        }
        total / seeds as f64
    };

    let rmse: Vec<f64> = [0.0, 0.001, 0.005, 0.010]
        .iter()
        .map(|&s| mean_rmse(s))
        .collect();
    println!("mean rmse by sigma: {rmse:?}");
    for pair in rmse.windows(2) {
        assert!(
            pair[1] >= pair[0],
            "mean rmse decreased with rising noise: {} -> {}",
            pair[0],
            pair[1]
        );
    }
}
