//! Synthetic motion and sensor-log generation.
//!
//! Actuation protocols produce per-tendon pull commands; a quasi-static
//! kinematic plant turns pulls into tendon lengths projected onto the
//! constant-curvature manifold; the sensor chain converts active lengths to
//! resistances, bridge voltages, optional ADC codes, and seeded noise. Runs
//! are fully deterministic given their seed.

use crate::calibration::CalibrationSample;
use crate::error::{Error, Result};
use crate::kinematics::{
    config_to_joint, forward_kinematics_discrete, joint_to_config, ConfigState,
    EndEffectorPosition, TendonLengths,
};
use crate::num::{real, real_usize, Real};
use crate::reconstruction::{GroundTruthChannels, SensorLog};
use crate::sensing::{
    adc_quantize, add_noise, bridge_forward, length_to_resistance, AdcModel, BridgeParams,
    NoiseModel, TendonResistorModel,
};

/// Peak bend angles of the increasing-amplitude validation protocol, in
/// degrees: four cycles returning to straight between peaks.
pub const INCREASING_AMPLITUDE_PEAKS_DEG: [f64; 4] = [20.0, 25.0, 30.0, 35.0];

/// Physical layout of the segment and its tendon routing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManipulatorGeometry<T> {
    /// Straight-pose segment length (m).
    pub base_length: T,
    /// Tendon circle radius around the backbone (m).
    pub d: T,
    /// Link count of the discretized kinematics.
    pub n_links: usize,
    /// Conductive thread routed outside the active segment (m); it adds
    /// resistance but does not change with the pose.
    pub tendon_slack_length: T,
}

impl<T: Real> ManipulatorGeometry<T> {
    pub fn new(base_length: T, d: T, n_links: usize, tendon_slack_length: T) -> Result<Self> {
        for (name, v) in [
            ("base_length", base_length),
            ("d", d),
            ("tendon_slack_length", tendon_slack_length),
        ] {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::invalid(format!(
                    "geometry parameter {name} must be > 0, got {v}"
                )));
            }
        }
        if n_links == 0 {
            return Err(Error::invalid("link count must be >= 1"));
        }
        Ok(Self {
            base_length,
            d,
            n_links,
            tendon_slack_length,
        })
    }
}

impl<T: Real> Default for ManipulatorGeometry<T> {
    /// Synthetic desk-scale defaults: 0.1 m segment, 0.02 m tendon circle,
    /// 10 links, 0.2 m of slack thread.
    fn default() -> Self {
        Self {
            base_length: real(0.1),
            d: real(0.02),
            n_links: 10,
            tendon_slack_length: real(0.2),
        }
    }
}

/// Waveform family of an actuation protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolKind<T> {
    /// Phase-shifted raised-cosine pulls on all three tendons, tracing a
    /// closed circular tip path at constant bend. `peak_bend` is the bend
    /// angle (rad) held around the cycle; tendon `i` lags tendon 1 by
    /// `(i - 1) * phase_shift / (2 pi frequency)` seconds.
    Cyclic {
        frequency: T,
        phase_shift: T,
        peak_bend: T,
    },
    /// Four straight-to-peak-and-back cycles on a single tendon with peaks
    /// at [`INCREASING_AMPLITUDE_PEAKS_DEG`]. `tendon` is the zero-based
    /// index of the actuated tendon.
    IncreasingAmplitude { tendon: usize },
    /// Constant equal pulls (m) on the masked subset of tendons.
    TendonCombination { mask: [bool; 3], pull: T },
    /// No actuation; the segment stays straight.
    Constant,
}

/// A sampled actuation protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuationProtocol<T> {
    pub kind: ProtocolKind<T>,
    /// Total run time (s).
    pub duration: T,
    /// Samples per second (Hz).
    pub sample_rate: T,
}

impl<T: Real> ActuationProtocol<T> {
    pub fn new(kind: ProtocolKind<T>, duration: T, sample_rate: T) -> Result<Self> {
        if !duration.is_finite() || duration <= T::zero() {
            return Err(Error::invalid(format!(
                "duration must be > 0, got {duration}"
            )));
        }
        if !sample_rate.is_finite() || sample_rate <= T::zero() {
            return Err(Error::invalid(format!(
                "sample rate must be > 0, got {sample_rate}"
            )));
        }
        match kind {
            ProtocolKind::Cyclic {
                frequency,
                peak_bend,
                phase_shift,
            } => {
                if !frequency.is_finite() || frequency < T::zero() {
                    return Err(Error::invalid(format!(
                        "frequency must be >= 0, got {frequency}"
                    )));
                }
                if !peak_bend.is_finite() || peak_bend < T::zero() {
                    return Err(Error::invalid(format!(
                        "peak bend must be >= 0, got {peak_bend}"
                    )));
                }
                if !phase_shift.is_finite() {
                    return Err(Error::invalid("phase shift must be finite"));
                }
            }
            ProtocolKind::IncreasingAmplitude { tendon } => {
                if tendon >= 3 {
                    return Err(Error::invalid(format!(
                        "tendon index must be 0..=2, got {tendon}"
                    )));
                }
            }
            ProtocolKind::TendonCombination { pull, .. } => {
                if !pull.is_finite() || pull < T::zero() {
                    return Err(Error::invalid(format!("pull must be >= 0, got {pull}")));
                }
            }
            ProtocolKind::Constant => {}
        }
        Ok(Self {
            kind,
            duration,
            sample_rate,
        })
    }

    /// Number of samples in the run, `round(duration * sample_rate)`.
    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate)
            .round()
            .to_usize()
            .unwrap_or(0)
    }
}

/// Pull (m of length reduction) on one tendon needed to bend the segment by
/// `bend` when only that tendon is actuated.
pub fn single_tendon_pull_for_bend<T: Real>(bend: T, d: T) -> T {
    real::<T>(1.5) * d * bend
}

/// Turns a protocol into per-sample, per-tendon pull commands (m of length
/// reduction, all non-negative). Cyclic peak-bend amplitudes convert to
/// pull amplitude `2 * d * peak_bend`.
pub fn protocol_to_commands<T: Real>(
    protocol: &ActuationProtocol<T>,
    geometry: &ManipulatorGeometry<T>,
) -> Result<Vec<[T; 3]>> {
    let n = protocol.sample_count();
    if n == 0 {
        return Err(Error::invalid("protocol produces no samples"));
    }
    let two_pi = T::PI() + T::PI();
    let half = real::<T>(0.5);
    let mut commands = Vec::with_capacity(n);
    for i in 0..n {
        let t = real_usize::<T>(i) / protocol.sample_rate;
        let command = match protocol.kind {
            ProtocolKind::Cyclic {
                frequency,
                phase_shift,
                peak_bend,
            } => {
                let amplitude = real::<T>(2.0) * geometry.d * peak_bend;
                let mut c = [T::zero(); 3];
                for (k, ck) in c.iter_mut().enumerate() {
                    let phase = two_pi * frequency * t - real_usize::<T>(k) * phase_shift;
                    *ck = amplitude * half * (T::one() - phase.cos());
                }
                c
            }
            ProtocolKind::IncreasingAmplitude { tendon } => {
                let quarters = real::<T>(4.0) * t / protocol.duration;
                let cycle = quarters
                    .floor()
                    .to_usize()
                    .unwrap_or(0)
                    .min(INCREASING_AMPLITUDE_PEAKS_DEG.len() - 1);
                let tau = quarters - real_usize::<T>(cycle);
                let peak = real::<T>(INCREASING_AMPLITUDE_PEAKS_DEG[cycle].to_radians());
                let bend = peak * half * (T::one() - (two_pi * tau).cos());
                let mut c = [T::zero(); 3];
                c[tendon] = single_tendon_pull_for_bend(bend, geometry.d);
                c
            }
            ProtocolKind::TendonCombination { mask, pull } => {
                let mut c = [T::zero(); 3];
                for (ck, active) in c.iter_mut().zip(mask) {
                    if active {
                        *ck = pull;
                    }
                }
                c
            }
            ProtocolKind::Constant => [T::zero(); 3],
        };
        commands.push(command);
    }
    Ok(commands)
}

/// Plant output for one command sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState<T> {
    /// Active tendon lengths after projection onto the constant-curvature
    /// manifold.
    pub tendons: TendonLengths<T>,
    pub config: ConfigState<T>,
    pub tip: EndEffectorPosition<T>,
}

/// Applies one command sample to the quasi-static plant.
///
/// Commands set tendon lengths directly (`l_i = base_length - command_i`);
/// the result is projected through the configuration space and back so the
/// ground truth lies exactly on the constant-curvature manifold.
pub fn plant_step<T: Real>(
    commands: [T; 3],
    geometry: &ManipulatorGeometry<T>,
) -> Result<PlantState<T>> {
    let mut lengths = [T::zero(); 3];
    for (i, (l, c)) in lengths.iter_mut().zip(commands).enumerate() {
        if !c.is_finite() || c < T::zero() {
            return Err(Error::InfeasibleCommand(format!(
                "pull command {} on tendon {} is not a non-negative length",
                c,
                i + 1
            )));
        }
        *l = geometry.base_length - c;
        if *l <= T::zero() {
            return Err(Error::InfeasibleCommand(format!(
                "pull {} collapses tendon {} (base length {})",
                c,
                i + 1,
                geometry.base_length
            )));
        }
    }
    let raw = TendonLengths::new(lengths[0], lengths[1], lengths[2], geometry.d)
        .map_err(|e| Error::InfeasibleCommand(e.to_string()))?;
    let config = joint_to_config(&raw);
    if config.theta() * geometry.d >= config.length() {
        return Err(Error::InfeasibleCommand(format!(
            "bend {} at radius {} exceeds segment length {}",
            config.theta(),
            geometry.d,
            config.length()
        )));
    }
    let tendons = config_to_joint(&config, geometry.d)
        .map_err(|e| Error::InfeasibleCommand(e.to_string()))?;
    let tip = forward_kinematics_discrete(&config, geometry.n_links)?;
    Ok(PlantState {
        tendons,
        config,
        tip,
    })
}

/// The full measurement chain applied to plant outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel<T> {
    pub resistor: TendonResistorModel<T>,
    pub bridge: BridgeParams<T>,
    /// Quantization stage; `None` records the analog voltage directly.
    pub adc: Option<AdcModel<T>>,
    /// Offset added before quantization and removed after, so the bipolar
    /// bridge voltage maps into the unipolar ADC range.
    pub adc_offset: T,
    pub noise: NoiseModel<T>,
}

impl<T: Real> Default for SensorModel<T> {
    /// Defaults match the synthetic desk-scale setup: 35 ohm/m thread (a
    /// straight pose with 0.3 m of active-plus-slack thread reads 10.5
    /// ohm), a symmetric 10 ohm bridge at 5 V, a 10-bit ADC offset to
    /// mid-rail, and 5 mV of measurement noise.
    fn default() -> Self {
        Self {
            resistor: TendonResistorModel {
                lambda: real(35.0),
                r_contact: T::zero(),
            },
            bridge: BridgeParams {
                r1: real(10.0),
                r2: real(10.0),
                r4: real(10.0),
                v_in: real(5.0),
            },
            adc: Some(AdcModel::new(10, real(5.0)).expect("valid default ADC")),
            adc_offset: real(2.5),
            noise: NoiseModel {
                sigma: real(0.005),
                seed: 0,
            },
        }
    }
}

impl<T: Real> SensorModel<T> {
    /// Same chain with quantization and noise disabled.
    pub fn noiseless(mut self) -> Self {
        self.adc = None;
        self.noise.sigma = T::zero();
        self
    }

    /// Measurement voltage for one active tendon length, before noise.
    fn measure(&self, active_length: T) -> Result<(T, Option<u32>)> {
        let resistance = length_to_resistance(active_length, &self.resistor)?;
        let v = bridge_forward(resistance, &self.bridge)?;
        match &self.adc {
            Some(adc) => {
                let (code, quantized) = adc_quantize(v + self.adc_offset, adc);
                Ok((quantized - self.adc_offset, Some(code)))
            }
            None => Ok((v, None)),
        }
    }
}

/// A complete simulated run: the corrupted sensor log with ground-truth
/// channels, plus echoes of the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthRun<T> {
    pub log: SensorLog<T>,
    pub protocol: ActuationProtocol<T>,
    pub geometry: ManipulatorGeometry<T>,
    pub seed: u64,
}

/// Decorrelates the per-channel noise streams of one run (splitmix64-style
/// scramble of the run seed and channel index).
fn channel_seed(seed: u64, channel: usize) -> u64 {
    let mut z = seed ^ ((channel as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Simulates a full run: protocol to commands, plant per sample, sensor
/// chain per tendon, noise last. Ground truth is recorded before any
/// corruption; identical inputs and seed give byte-identical output.
pub fn simulate_run<T: Real>(
    protocol: &ActuationProtocol<T>,
    geometry: &ManipulatorGeometry<T>,
    sensor: &SensorModel<T>,
) -> Result<GroundTruthRun<T>> {
    let commands = protocol_to_commands(protocol, geometry)?;
    let n = commands.len();
    let mut clean: [Vec<T>; 3] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    let mut codes: [Vec<u32>; 3] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    let mut truth = GroundTruthChannels {
        lengths: Vec::with_capacity(n),
        configs: Vec::with_capacity(n),
        positions: Vec::with_capacity(n),
    };
    for command in commands {
        let state = plant_step(command, geometry)?;
        let lengths = state.tendons.as_array();
        truth.lengths.push(lengths);
        truth.configs.push(state.config);
        truth.positions.push(state.tip);
        for (c, l) in lengths.into_iter().enumerate() {
            let (v, code) = sensor.measure(l + geometry.tendon_slack_length)?;
            clean[c].push(v);
            if let Some(code) = code {
                codes[c].push(code);
            }
        }
    }
    let channels = core::array::from_fn(|c| {
        let noise = NoiseModel {
            sigma: sensor.noise.sigma,
            seed: channel_seed(sensor.noise.seed, c),
        };
        add_noise(&clean[c], &noise)
    });
    let mut log = SensorLog::from_rate(protocol.sample_rate, channels)?;
    if sensor.adc.is_some() {
        log = log.with_codes(codes)?;
    }
    log = log.with_ground_truth(truth)?;
    Ok(GroundTruthRun {
        log,
        protocol: *protocol,
        geometry: *geometry,
        seed: sensor.noise.seed,
    })
}

/// Quasi-static per-tendon calibration sweep from straight to `max_bend`,
/// in `steps` evenly spaced poses per tendon.
///
/// Each sample pairs the resistance measured through the sensor chain with
/// the ground-truth change of the active tendon length relative to the
/// straight pose (negative under contraction).
pub fn calibration_sweep<T: Real>(
    geometry: &ManipulatorGeometry<T>,
    sensor: &SensorModel<T>,
    steps: usize,
    max_bend: T,
) -> Result<Vec<Vec<CalibrationSample<T>>>> {
    if steps < 4 {
        return Err(Error::invalid(format!(
            "sweep needs at least 4 steps to support a cubic fit, got {steps}"
        )));
    }
    if !max_bend.is_finite() || max_bend <= T::zero() {
        return Err(Error::invalid(format!(
            "sweep bend must be > 0, got {max_bend}"
        )));
    }
    let mut per_tendon = Vec::with_capacity(3);
    for tendon in 0..3 {
        let mut voltages = Vec::with_capacity(steps);
        let mut changes = Vec::with_capacity(steps);
        for k in 0..steps {
            let bend = max_bend * real_usize::<T>(k) / real_usize::<T>(steps - 1);
            let mut command = [T::zero(); 3];
            command[tendon] = single_tendon_pull_for_bend(bend, geometry.d);
            let state = plant_step(command, geometry)?;
            let active = state.tendons.as_array()[tendon];
            let (v, _) = sensor.measure(active + geometry.tendon_slack_length)?;
            voltages.push(v);
            changes.push(active - geometry.base_length);
        }
        let noise = NoiseModel {
            sigma: sensor.noise.sigma,
            seed: channel_seed(sensor.noise.seed, tendon),
        };
        let samples = add_noise(&voltages, &noise)
            .into_iter()
            .zip(changes)
            .map(|(v, change)| {
                let resistance = crate::sensing::bridge_invert(v, &sensor.bridge)?;
                CalibrationSample::new(resistance, change)
            })
            .collect::<Result<Vec<_>>>()?;
        per_tendon.push(samples);
    }
    Ok(per_tendon)
}
