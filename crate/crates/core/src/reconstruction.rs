//! Inverse sensing pipeline: from raw bridge voltages back to tendon
//! lengths, segment configuration, and end-effector path.
//!
//! Per channel the pipeline is: moving-average filter, bridge inversion,
//! resistance normalization, cubic map evaluation, and length
//! interpretation. The lengths then feed the joint-to-configuration mapping
//! and the discrete forward kinematics. A streaming variant processes
//! samples in arrival order and produces bit-identical results to the batch
//! form.

use crate::calibration::{eval_cubic, normalize_resistance, CalibrationRecord};
use crate::error::{Error, Result};
use crate::kinematics::{
    forward_kinematics_discrete, joint_to_config, ConfigState, EndEffectorPosition, TendonLengths,
};
use crate::num::{real, real_usize, Real};
use crate::sensing::{bridge_invert, BridgeParams};

/// Number of sensor channels (one per tendon).
pub const CHANNELS: usize = 3;

/// Relative tolerance for timestamp uniformity and alignment checks.
const TIMESTAMP_TOLERANCE: f64 = 1e-9;

/// Ground-truth series recorded by the simulator alongside the corrupted
/// sensor channels.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthChannels<T> {
    /// Active tendon lengths inside the segment (m).
    pub lengths: Vec<[T; 3]>,
    pub configs: Vec<ConfigState<T>>,
    pub positions: Vec<EndEffectorPosition<T>>,
}

/// Time series of per-tendon bridge output voltages, optionally with ADC
/// codes and ground-truth channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorLog<T> {
    sample_rate: T,
    timestamps: Vec<T>,
    channels: [Vec<T>; 3],
    codes: Option<[Vec<u32>; 3]>,
    ground_truth: Option<GroundTruthChannels<T>>,
}

impl<T: Real> SensorLog<T> {
    /// Builds a log with timestamps `i / sample_rate`.
    pub fn from_rate(sample_rate: T, channels: [Vec<T>; 3]) -> Result<Self> {
        if !sample_rate.is_finite() || sample_rate <= T::zero() {
            return Err(Error::invalid(format!(
                "sample rate must be > 0, got {sample_rate}"
            )));
        }
        let n = channels[0].len();
        if channels.iter().any(|c| c.len() != n) {
            return Err(Error::LengthMismatch(
                "sensor channels differ in length".into(),
            ));
        }
        let timestamps = (0..n).map(|i| real_usize::<T>(i) / sample_rate).collect();
        Ok(Self {
            sample_rate,
            timestamps,
            channels,
            codes: None,
            ground_truth: None,
        })
    }

    /// Builds a log from explicit timestamps (e.g. parsed from disk),
    /// recovering the sample rate from the first step and validating that
    /// the spacing is uniform and strictly increasing.
    pub fn from_timestamps(timestamps: Vec<T>, channels: [Vec<T>; 3]) -> Result<Self> {
        if timestamps.len() < 2 {
            return Err(Error::invalid(
                "at least two samples are needed to recover the sample rate",
            ));
        }
        let n = timestamps.len();
        if channels.iter().any(|c| c.len() != n) {
            return Err(Error::LengthMismatch(
                "sensor channels and timestamps differ in length".into(),
            ));
        }
        if timestamps.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("timestamps must be finite"));
        }
        let step = timestamps[1] - timestamps[0];
        if step <= T::zero() {
            return Err(Error::invalid("timestamps must be strictly increasing"));
        }
        let tol = real::<T>(TIMESTAMP_TOLERANCE);
        for (i, pair) in timestamps.windows(2).enumerate() {
            let dt = pair[1] - pair[0];
            if ((dt - step) / step).abs() > tol {
                return Err(Error::invalid(format!(
                    "non-uniform sampling at row {}: step {dt} vs {step}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            sample_rate: T::one() / step,
            timestamps,
            channels,
            codes: None,
            ground_truth: None,
        })
    }

    pub fn with_codes(mut self, codes: [Vec<u32>; 3]) -> Result<Self> {
        if codes.iter().any(|c| c.len() != self.len()) {
            return Err(Error::LengthMismatch(
                "code channels differ in length from sensor channels".into(),
            ));
        }
        self.codes = Some(codes);
        Ok(self)
    }

    pub fn with_ground_truth(mut self, truth: GroundTruthChannels<T>) -> Result<Self> {
        let n = self.len();
        if truth.lengths.len() != n || truth.configs.len() != n || truth.positions.len() != n {
            return Err(Error::LengthMismatch(
                "ground-truth channels differ in length from sensor channels".into(),
            ));
        }
        self.ground_truth = Some(truth);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn timestamps(&self) -> &[T] {
        &self.timestamps
    }

    pub fn channels(&self) -> &[Vec<T>; 3] {
        &self.channels
    }

    pub fn codes(&self) -> Option<&[Vec<u32>; 3]> {
        self.codes.as_ref()
    }

    pub fn ground_truth(&self) -> Option<&GroundTruthChannels<T>> {
        self.ground_truth.as_ref()
    }
}

/// Centered moving-average filter specification. The window must be odd so
/// the filter is symmetric; a window of 1 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterSpec {
    window: usize,
}

impl FilterSpec {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 || window.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "filter window must be odd and >= 1, got {window}"
            )));
        }
        Ok(Self { window })
    }

    pub fn identity() -> Self {
        Self { window: 1 }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    fn half(&self) -> usize {
        self.window / 2
    }
}

/// Mean of the window centered at `i` with symmetric edge replication.
/// Both the batch filter and the streaming reconstructor evaluate exactly
/// this expression, which keeps their outputs bit-identical.
fn moving_average_at<T: Real>(series: &[T], i: usize, window: usize) -> T {
    let half = window / 2;
    let last = series.len() - 1;
    let mut sum = T::zero();
    for k in 0..window {
        let idx = (i + k).saturating_sub(half).min(last);
        sum = sum + series[idx];
    }
    sum / real_usize(window)
}

/// Centered moving average with symmetric edge replication; output length
/// equals input length and the DC gain is one.
pub fn filter_signal<T: Real>(series: &[T], spec: &FilterSpec) -> Result<Vec<T>> {
    if spec.window() > series.len() {
        return Err(Error::invalid(format!(
            "filter window {} exceeds series length {}",
            spec.window(),
            series.len()
        )));
    }
    Ok((0..series.len())
        .map(|i| moving_average_at(series, i, spec.window()))
        .collect())
}

/// How the cubic map output turns into an absolute tendon length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthInterpretation<T> {
    /// The map yields a signed length change added to the calibrated
    /// straight-pose active length.
    DeltaFromBase { base_length: T },
    /// The map yields the absolute active length directly.
    Absolute,
}

/// Tunable reconstruction behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionOptions<T> {
    pub interpretation: LengthInterpretation<T>,
    /// Fraction of saturated/invalid samples tolerated per channel before
    /// the reconstruction fails.
    pub max_invalid_fraction: T,
}

impl<T: Real> ReconstructionOptions<T> {
    /// Length-change interpretation around the given straight-pose active
    /// length, with the default 10% saturation budget.
    pub fn delta_from_base(base_length: T) -> Self {
        Self {
            interpretation: LengthInterpretation::DeltaFromBase { base_length },
            max_invalid_fraction: real(0.1),
        }
    }

    /// Absolute-length interpretation with the default saturation budget.
    pub fn absolute() -> Self {
        Self {
            interpretation: LengthInterpretation::Absolute,
            max_invalid_fraction: real(0.1),
        }
    }

    fn apply(&self, map_output: T) -> T {
        match self.interpretation {
            LengthInterpretation::DeltaFromBase { base_length } => base_length + map_output,
            LengthInterpretation::Absolute => map_output,
        }
    }
}

/// Reconstructed tendon-length series plus per-channel saturation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthReconstruction<T> {
    pub lengths: Vec<[T; 3]>,
    pub invalid_samples: [usize; 3],
}

fn check_calibration<T: Real>(calib: &CalibrationRecord<T>) -> Result<()> {
    if calib.tendon_count() != CHANNELS {
        return Err(Error::MismatchedCalibration(format!(
            "calibration holds {} tendons, sensor log has {CHANNELS} channels",
            calib.tendon_count()
        )));
    }
    Ok(())
}

/// Recovers per-tendon resistances from one filtered channel, replacing
/// saturated samples with the last valid value (leading saturated samples
/// take the first valid value) and counting them.
fn invert_channel<T: Real>(filtered: &[T], bridge: &BridgeParams<T>) -> (Vec<T>, usize) {
    let mut resistances = Vec::with_capacity(filtered.len());
    let mut invalid = 0usize;
    let mut last_valid: Option<T> = None;
    let mut leading = 0usize;
    for &v in filtered {
        match bridge_invert(v, bridge) {
            Ok(r) => {
                if last_valid.is_none() {
                    for slot in resistances.iter_mut().take(leading) {
                        *slot = r;
                    }
                }
                last_valid = Some(r);
                resistances.push(r);
            }
            Err(_) => {
                invalid += 1;
                match last_valid {
                    Some(r) => resistances.push(r),
                    None => {
                        leading += 1;
                        resistances.push(T::nan());
                    }
                }
            }
        }
    }
    (resistances, invalid)
}

/// Runs the length stage of the pipeline: filter, invert the bridge, map
/// resistances through the per-tendon calibration, and interpret the result
/// as an absolute active length.
pub fn reconstruct_lengths<T: Real>(
    log: &SensorLog<T>,
    bridge: &BridgeParams<T>,
    calib: &CalibrationRecord<T>,
    filter: &FilterSpec,
    opts: &ReconstructionOptions<T>,
) -> Result<LengthReconstruction<T>> {
    check_calibration(calib)?;
    let n = log.len();
    if n == 0 {
        return Err(Error::invalid("sensor log is empty"));
    }
    let mut per_channel: Vec<Vec<T>> = Vec::with_capacity(CHANNELS);
    let mut invalid_samples = [0usize; 3];
    for (c, raw) in log.channels().iter().enumerate() {
        let filtered = filter_signal(raw, filter)?;
        let (resistances, invalid) = invert_channel(&filtered, bridge);
        invalid_samples[c] = invalid;
        let budget = opts.max_invalid_fraction * real_usize::<T>(n);
        if invalid == n || real_usize::<T>(invalid) > budget {
            return Err(Error::TooManyInvalidSamples {
                channel: c,
                invalid,
                total: n,
            });
        }
        let tendon = &calib.tendons[c];
        per_channel.push(
            resistances
                .iter()
                .map(|&r| {
                    opts.apply(eval_cubic(
                        &tendon.map,
                        normalize_resistance(r, &tendon.range),
                    ))
                })
                .collect(),
        );
    }
    let lengths = (0..n)
        .map(|i| [per_channel[0][i], per_channel[1][i], per_channel[2][i]])
        .collect();
    Ok(LengthReconstruction {
        lengths,
        invalid_samples,
    })
}

/// Geometry needed to turn tendon lengths into a path: tendon circle radius
/// and link count of the discretized kinematics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGeometry<T> {
    pub d: T,
    pub n_links: usize,
}

impl<T: Real> PathGeometry<T> {
    pub fn new(d: T, n_links: usize) -> Result<Self> {
        if !d.is_finite() || d <= T::zero() {
            return Err(Error::invalid(format!(
                "tendon circle radius must be > 0, got {d}"
            )));
        }
        if n_links == 0 {
            return Err(Error::invalid("link count must be >= 1"));
        }
        Ok(Self { d, n_links })
    }
}

/// Timestamped end-effector path with the underlying configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    timestamps: Vec<T>,
    points: Vec<EndEffectorPosition<T>>,
    configs: Vec<ConfigState<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(
        timestamps: Vec<T>,
        points: Vec<EndEffectorPosition<T>>,
        configs: Vec<ConfigState<T>>,
    ) -> Result<Self> {
        if timestamps.len() != points.len() || points.len() != configs.len() {
            return Err(Error::LengthMismatch(
                "trajectory series differ in length".into(),
            ));
        }
        if timestamps.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("timestamps must be finite"));
        }
        if timestamps.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::invalid("timestamps must be strictly increasing"));
        }
        Ok(Self {
            timestamps,
            points,
            configs,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[T] {
        &self.timestamps
    }

    pub fn points(&self) -> &[EndEffectorPosition<T>] {
        &self.points
    }

    pub fn configs(&self) -> &[ConfigState<T>] {
        &self.configs
    }

    /// Largest pairwise distance between path points, estimated from the
    /// bounding box diagonal.
    pub fn diameter(&self) -> T {
        let mut min = [T::infinity(); 3];
        let mut max = [T::neg_infinity(); 3];
        for p in &self.points {
            for (axis, v) in [p.x, p.y, p.z].into_iter().enumerate() {
                min[axis] = min[axis].min(v);
                max[axis] = max[axis].max(v);
            }
        }
        let dx = max[0] - min[0];
        let dy = max[1] - min[1];
        let dz = max[2] - min[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Full inverse pipeline: reconstructed lengths feed the joint-to-
/// configuration mapping and the discrete forward kinematics per sample.
pub fn reconstruct_path<T: Real>(
    log: &SensorLog<T>,
    bridge: &BridgeParams<T>,
    calib: &CalibrationRecord<T>,
    filter: &FilterSpec,
    geometry: &PathGeometry<T>,
    opts: &ReconstructionOptions<T>,
) -> Result<Trajectory<T>> {
    let recon = reconstruct_lengths(log, bridge, calib, filter, opts)?;
    let mut points = Vec::with_capacity(recon.lengths.len());
    let mut configs = Vec::with_capacity(recon.lengths.len());
    for l in &recon.lengths {
        let tendons = TendonLengths::new(l[0], l[1], l[2], geometry.d)?;
        let config = joint_to_config(&tendons);
        points.push(forward_kinematics_discrete(&config, geometry.n_links)?);
        configs.push(config);
    }
    Trajectory::new(log.timestamps().to_vec(), points, configs)
}

/// Pointwise path error metrics between a reconstructed trajectory and the
/// ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathErrorReport<T> {
    pub rmse: T,
    pub max_error: T,
    pub per_axis_rmse: [T; 3],
}

/// Pointwise Euclidean error statistics. Requires equal lengths and aligned
/// timestamps.
pub fn path_error<T: Real>(
    reconstructed: &Trajectory<T>,
    truth: &Trajectory<T>,
) -> Result<PathErrorReport<T>> {
    if reconstructed.len() != truth.len() {
        return Err(Error::LengthMismatch(format!(
            "trajectories hold {} and {} samples",
            reconstructed.len(),
            truth.len()
        )));
    }
    if reconstructed.is_empty() {
        return Err(Error::invalid("trajectories are empty"));
    }
    let tol = real::<T>(TIMESTAMP_TOLERANCE);
    for (i, (a, b)) in reconstructed
        .timestamps()
        .iter()
        .zip(truth.timestamps())
        .enumerate()
    {
        if (*a - *b).abs() > tol * T::one().max(a.abs()) {
            return Err(Error::LengthMismatch(format!(
                "timestamps diverge at row {i}: {a} vs {b}"
            )));
        }
    }
    let n = real_usize::<T>(reconstructed.len());
    let mut sum_sq = T::zero();
    let mut max_error = T::zero();
    let mut axis_sq = [T::zero(); 3];
    for (a, b) in reconstructed.points().iter().zip(truth.points()) {
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dz = a.z - b.z;
        let sq = dx * dx + dy * dy + dz * dz;
        sum_sq = sum_sq + sq;
        max_error = max_error.max(sq.sqrt());
        axis_sq[0] = axis_sq[0] + dx * dx;
        axis_sq[1] = axis_sq[1] + dy * dy;
        axis_sq[2] = axis_sq[2] + dz * dz;
    }
    Ok(PathErrorReport {
        rmse: (sum_sq / n).sqrt(),
        max_error,
        per_axis_rmse: axis_sq.map(|s| (s / n).sqrt()),
    })
}

/// One fully reconstructed sample emitted by the streaming pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamedSample<T> {
    pub index: usize,
    pub lengths: [T; 3],
    pub config: ConfigState<T>,
    pub position: EndEffectorPosition<T>,
}

/// Incremental form of [`reconstruct_path`]: samples are pushed in arrival
/// order and outputs emerge as soon as the centered filter window and the
/// saturation backfill allow. The emitted values are bit-identical to the
/// batch pipeline over the same data.
pub struct StreamingReconstructor<T: Real> {
    bridge: BridgeParams<T>,
    calib: CalibrationRecord<T>,
    filter: FilterSpec,
    geometry: PathGeometry<T>,
    opts: ReconstructionOptions<T>,
    raw: [Vec<T>; 3],
    /// Resistances resolved so far per channel; `None` marks a leading
    /// saturated sample waiting for the first valid value.
    resistances: [Vec<Option<T>>; 3],
    last_valid: [Option<T>; 3],
    invalid: [usize; 3],
    /// Next sample index to emit.
    emitted: usize,
}

impl<T: Real> StreamingReconstructor<T> {
    pub fn new(
        bridge: BridgeParams<T>,
        calib: CalibrationRecord<T>,
        filter: FilterSpec,
        geometry: PathGeometry<T>,
        opts: ReconstructionOptions<T>,
    ) -> Result<Self> {
        check_calibration(&calib)?;
        Ok(Self {
            bridge,
            calib,
            filter,
            geometry,
            opts,
            raw: [Vec::new(), Vec::new(), Vec::new()],
            resistances: [Vec::new(), Vec::new(), Vec::new()],
            last_valid: [None; 3],
            invalid: [0; 3],
            emitted: 0,
        })
    }

    /// Feeds one voltage sample per channel; returns any samples that
    /// became fully determined.
    pub fn push(&mut self, sample: [T; 3]) -> Result<Vec<StreamedSample<T>>> {
        for (c, v) in sample.into_iter().enumerate() {
            self.raw[c].push(v);
        }
        // The window centered at index i is complete once index i + half
        // has arrived (the leading edge replicates the first sample).
        let available = self.raw[0].len();
        let ready = available.saturating_sub(self.filter.half());
        self.resolve_up_to(ready, false);
        self.drain()
    }

    /// Flushes the tail (where the trailing window edge replicates the last
    /// sample), applies the saturation-budget check, and returns the
    /// remaining samples.
    pub fn finish(mut self) -> Result<Vec<StreamedSample<T>>> {
        let n = self.raw[0].len();
        if self.filter.window() > n {
            return Err(Error::invalid(format!(
                "filter window {} exceeds series length {n}",
                self.filter.window()
            )));
        }
        self.resolve_up_to(n, true);
        let budget = self.opts.max_invalid_fraction * real_usize::<T>(n);
        for (c, &invalid) in self.invalid.iter().enumerate() {
            if invalid == n || real_usize::<T>(invalid) > budget {
                return Err(Error::TooManyInvalidSamples {
                    channel: c,
                    invalid,
                    total: n,
                });
            }
        }
        let out = self.drain()?;
        if self.emitted != n {
            // Leading samples never saw a valid value; the budget check
            // above must already have failed in that case.
            return Err(Error::TooManyInvalidSamples {
                channel: 0,
                invalid: self.invalid[0],
                total: n,
            });
        }
        Ok(out)
    }

    /// Filters and inverts channel samples up to (exclusive) `limit`.
    fn resolve_up_to(&mut self, limit: usize, at_end: bool) {
        for c in 0..CHANNELS {
            while self.resistances[c].len() < limit {
                let i = self.resistances[c].len();
                // Before the end of the stream the trailing edge must not
                // replicate a non-final sample.
                if !at_end && i + self.filter.half() >= self.raw[c].len() {
                    break;
                }
                let filtered = moving_average_at(&self.raw[c], i, self.filter.window());
                match bridge_invert(filtered, &self.bridge) {
                    Ok(r) => {
                        if self.last_valid[c].is_none() {
                            for slot in self.resistances[c].iter_mut() {
                                *slot = Some(r);
                            }
                        }
                        self.last_valid[c] = Some(r);
                        self.resistances[c].push(Some(r));
                    }
                    Err(_) => {
                        self.invalid[c] += 1;
                        self.resistances[c].push(self.last_valid[c]);
                    }
                }
            }
        }
    }

    /// Emits every sample whose resistances are resolved on all channels.
    fn drain(&mut self) -> Result<Vec<StreamedSample<T>>> {
        let mut out = Vec::new();
        loop {
            let i = self.emitted;
            let resolved =
                (0..CHANNELS).all(|c| matches!(self.resistances[c].get(i), Some(Some(_))));
            if !resolved {
                break;
            }
            let mut lengths = [T::zero(); 3];
            for (c, slot) in lengths.iter_mut().enumerate() {
                let r = self.resistances[c][i].expect("resolved above");
                let tendon = &self.calib.tendons[c];
                *slot = self.opts.apply(eval_cubic(
                    &tendon.map,
                    normalize_resistance(r, &tendon.range),
                ));
            }
            let tendons = TendonLengths::new(lengths[0], lengths[1], lengths[2], self.geometry.d)?;
            let config = joint_to_config(&tendons);
            let position = forward_kinematics_discrete(&config, self.geometry.n_links)?;
            out.push(StreamedSample {
                index: i,
                lengths,
                config,
                position,
            });
            self.emitted += 1;
        }
        Ok(out)
    }
}
