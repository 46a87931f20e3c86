//! Run configuration: a flat sectioned `key = value` text format.
//!
//! Every key has a default, unknown sections or keys are rejected, and the
//! resolved configuration renders back to canonical text (the "config echo").

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use proprio_core::reconstruction::{FilterSpec, LengthInterpretation, ReconstructionOptions};
use proprio_core::sensing::{AdcModel, BridgeParams, NoiseModel, TendonResistorModel};
use proprio_core::simulator::{ActuationProtocol, ManipulatorGeometry, ProtocolKind, SensorModel};

/// Parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: ManipulatorGeometry<f64>,
    pub sensor: SensorModel<f64>,
    pub protocol: ActuationProtocol<f64>,
    pub filter: FilterSpec,
    pub reconstruction: ReconstructionOptions<f64>,
    pub sweep_steps: usize,
    pub sweep_max_bend: f64,
    pub seed: u64,
}

/// Raw key-value state before validation, pre-loaded with defaults.
#[derive(Debug, Clone)]
struct RawConfig {
    base_length: f64,
    d: f64,
    n_links: usize,
    slack: f64,

    lambda: f64,
    r_contact: f64,
    r1: f64,
    r2: f64,
    r4: f64,
    v_in: f64,
    adc_bits: u32,
    adc_v_ref: f64,
    adc_offset: f64,
    noise_sigma: f64,

    kind: String,
    frequency: f64,
    phase_shift: f64,
    amplitude: f64,
    duration: f64,
    sample_rate: f64,
    tendon: usize,
    tendons: [bool; 3],

    window: usize,

    interpretation: String,
    max_invalid_fraction: f64,

    sweep_steps: usize,
    sweep_max_bend: f64,

    seed: u64,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            base_length: 0.1,
            d: 0.02,
            n_links: 10,
            slack: 0.2,
            lambda: 35.0,
            r_contact: 0.0,
            r1: 10.0,
            r2: 10.0,
            r4: 10.0,
            v_in: 5.0,
            adc_bits: 10,
            adc_v_ref: 5.0,
            adc_offset: 2.5,
            noise_sigma: 0.005,
            kind: "cyclic".into(),
            frequency: 0.0625,
            phase_shift: 2.0 * std::f64::consts::PI / 3.0,
            amplitude: 20f64.to_radians(),
            duration: 16.0,
            sample_rate: 50.0,
            tendon: 2,
            tendons: [true, true, true],
            window: 21,
            interpretation: "delta".into(),
            max_invalid_fraction: 0.1,
            sweep_steps: 21,
            sweep_max_bend: 30f64.to_radians(),
            seed: 42,
        }
    }
}

fn parse_mask(value: &str) -> Result<[bool; 3]> {
    let mut mask = [false; 3];
    for part in value.split(',') {
        let idx: usize = part
            .trim()
            .parse()
            .with_context(|| format!("tendon index `{part}` is not an integer"))?;
        if !(1..=3).contains(&idx) {
            bail!("tendon index {idx} out of range 1..=3");
        }
        mask[idx - 1] = true;
    }
    if mask.iter().all(|m| !m) {
        bail!("tendon mask selects no tendons");
    }
    Ok(mask)
}

fn render_mask(mask: &[bool; 3]) -> String {
    let names: Vec<String> = mask
        .iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    names.join(",")
}

impl RawConfig {
    fn set(&mut self, section: &str, key: &str, value: &str, line: usize) -> Result<()> {
        let fail = || format!("line {line}: invalid value `{value}` for {section}.{key}");
        macro_rules! num {
            () => {
                value.parse().with_context(fail)?
            };
        }
        match (section, key) {
            ("geometry", "base_length") => self.base_length = num!(),
            ("geometry", "d") => self.d = num!(),
            ("geometry", "n_links") => self.n_links = num!(),
            ("geometry", "slack") => self.slack = num!(),
            ("sensor", "lambda") => self.lambda = num!(),
            ("sensor", "r_contact") => self.r_contact = num!(),
            ("sensor", "r1") => self.r1 = num!(),
            ("sensor", "r2") => self.r2 = num!(),
            ("sensor", "r4") => self.r4 = num!(),
            ("sensor", "v_in") => self.v_in = num!(),
            ("sensor", "adc_bits") => self.adc_bits = num!(),
            ("sensor", "adc_v_ref") => self.adc_v_ref = num!(),
            ("sensor", "adc_offset") => self.adc_offset = num!(),
            ("sensor", "noise_sigma") => self.noise_sigma = num!(),
            ("protocol", "kind") => self.kind = value.to_string(),
            ("protocol", "frequency") => self.frequency = num!(),
            ("protocol", "phase_shift") => self.phase_shift = num!(),
            ("protocol", "amplitude") => self.amplitude = num!(),
            ("protocol", "duration") => self.duration = num!(),
            ("protocol", "sample_rate") => self.sample_rate = num!(),
            ("protocol", "tendon") => self.tendon = num!(),
            ("protocol", "tendons") => self.tendons = parse_mask(value)?,
            ("filter", "window") => self.window = num!(),
            ("reconstruction", "interpretation") => self.interpretation = value.to_string(),
            ("reconstruction", "max_invalid_fraction") => self.max_invalid_fraction = num!(),
            ("sweep", "steps") => self.sweep_steps = num!(),
            ("sweep", "max_bend") => self.sweep_max_bend = num!(),
            ("run", "seed") => self.seed = num!(),
            _ => bail!("line {line}: unknown key `{key}` in section [{section}]"),
        }
        Ok(())
    }

    fn validate(self) -> Result<RunConfig> {
        let geometry = ManipulatorGeometry::new(self.base_length, self.d, self.n_links, self.slack)
            .map_err(|e| anyhow!("[geometry]: {e}"))?;
        let adc = match self.adc_bits {
            0 => None,
            bits => {
                Some(AdcModel::new(bits, self.adc_v_ref).map_err(|e| anyhow!("[sensor]: {e}"))?)
            }
        };
        let sensor = SensorModel {
            resistor: TendonResistorModel::new(self.lambda, self.r_contact)
                .map_err(|e| anyhow!("[sensor]: {e}"))?,
            bridge: BridgeParams::new(self.r1, self.r2, self.r4, self.v_in)
                .map_err(|e| anyhow!("[sensor]: {e}"))?,
            adc,
            adc_offset: self.adc_offset,
            noise: NoiseModel::new(self.noise_sigma, self.seed)
                .map_err(|e| anyhow!("[sensor]: {e}"))?,
        };
        let kind = match self.kind.as_str() {
            "cyclic" => ProtocolKind::Cyclic {
                frequency: self.frequency,
                phase_shift: self.phase_shift,
                peak_bend: self.amplitude,
            },
            "increasing-amplitude" => {
                if !(1..=3).contains(&self.tendon) {
                    bail!("[protocol]: tendon must be 1..=3, got {}", self.tendon);
                }
                ProtocolKind::IncreasingAmplitude {
                    tendon: self.tendon - 1,
                }
            }
            "tendon-combination" => ProtocolKind::TendonCombination {
                mask: self.tendons,
                pull: self.amplitude,
            },
            "constant" => ProtocolKind::Constant,
            other => bail!("[protocol]: unknown kind `{other}`"),
        };
        let protocol = ActuationProtocol::new(kind, self.duration, self.sample_rate)
            .map_err(|e| anyhow!("[protocol]: {e}"))?;
        let filter = FilterSpec::new(self.window).map_err(|e| anyhow!("[filter]: {e}"))?;
        let interpretation = match self.interpretation.as_str() {
            "delta" => LengthInterpretation::DeltaFromBase {
                base_length: self.base_length,
            },
            "absolute" => LengthInterpretation::Absolute,
            other => bail!("[reconstruction]: unknown interpretation `{other}`"),
        };
        if !(0.0..=1.0).contains(&self.max_invalid_fraction) {
            bail!(
                "[reconstruction]: max_invalid_fraction must lie in [0, 1], got {}",
                self.max_invalid_fraction
            );
        }
        if self.sweep_steps < 4 {
            bail!("[sweep]: steps must be >= 4, got {}", self.sweep_steps);
        }
        if !self.sweep_max_bend.is_finite() || self.sweep_max_bend <= 0.0 {
            bail!("[sweep]: max_bend must be > 0, got {}", self.sweep_max_bend);
        }
        Ok(RunConfig {
            geometry,
            sensor,
            protocol,
            filter,
            reconstruction: ReconstructionOptions {
                interpretation,
                max_invalid_fraction: self.max_invalid_fraction,
            },
            sweep_steps: self.sweep_steps,
            sweep_max_bend: self.sweep_max_bend,
            seed: self.seed,
        })
    }
}

impl RunConfig {
    /// Parses configuration text, applying defaults for every missing key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut section = String::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if ![
                    "geometry",
                    "sensor",
                    "protocol",
                    "filter",
                    "reconstruction",
                    "sweep",
                    "run",
                ]
                .contains(&name)
                {
                    bail!("line {line_no}: unknown section [{name}]");
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`, got `{line}`"))?;
            if section.is_empty() {
                bail!(
                    "line {line_no}: key `{}` appears before any section",
                    key.trim()
                );
            }
            raw.set(&section, key.trim(), value.trim(), line_no)?;
        }
        raw.validate()
    }

    /// Overrides the random seed (CLI `--seed` flag).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.sensor.noise.seed = seed;
        self
    }

    /// Canonical text form of the resolved configuration. Parsing the
    /// rendered text reproduces the same configuration.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let g = &self.geometry;
        let s = &self.sensor;
        writeln!(out, "[geometry]").unwrap();
        writeln!(out, "base_length = {}", g.base_length).unwrap();
        writeln!(out, "d = {}", g.d).unwrap();
        writeln!(out, "n_links = {}", g.n_links).unwrap();
        writeln!(out, "slack = {}", g.tendon_slack_length).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[sensor]").unwrap();
        writeln!(out, "lambda = {}", s.resistor.lambda).unwrap();
        writeln!(out, "r_contact = {}", s.resistor.r_contact).unwrap();
        writeln!(out, "r1 = {}", s.bridge.r1).unwrap();
        writeln!(out, "r2 = {}", s.bridge.r2).unwrap();
        writeln!(out, "r4 = {}", s.bridge.r4).unwrap();
        writeln!(out, "v_in = {}", s.bridge.v_in).unwrap();
        writeln!(out, "adc_bits = {}", s.adc.map_or(0, |a| a.bits())).unwrap();
        writeln!(out, "adc_v_ref = {}", s.adc.map_or(5.0, |a| a.v_ref())).unwrap();
        writeln!(out, "adc_offset = {}", s.adc_offset).unwrap();
        writeln!(out, "noise_sigma = {}", s.noise.sigma).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[protocol]").unwrap();
        match self.protocol.kind {
            ProtocolKind::Cyclic {
                frequency,
                phase_shift,
                peak_bend,
            } => {
                writeln!(out, "kind = cyclic").unwrap();
                writeln!(out, "frequency = {frequency}").unwrap();
                writeln!(out, "phase_shift = {phase_shift}").unwrap();
                writeln!(out, "amplitude = {peak_bend}").unwrap();
            }
            ProtocolKind::IncreasingAmplitude { tendon } => {
                writeln!(out, "kind = increasing-amplitude").unwrap();
                writeln!(out, "tendon = {}", tendon + 1).unwrap();
            }
            ProtocolKind::TendonCombination { mask, pull } => {
                writeln!(out, "kind = tendon-combination").unwrap();
                writeln!(out, "amplitude = {pull}").unwrap();
                writeln!(out, "tendons = {}", render_mask(&mask)).unwrap();
            }
            ProtocolKind::Constant => writeln!(out, "kind = constant").unwrap(),
        }
        writeln!(out, "duration = {}", self.protocol.duration).unwrap();
        writeln!(out, "sample_rate = {}", self.protocol.sample_rate).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[filter]").unwrap();
        writeln!(out, "window = {}", self.filter.window()).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[reconstruction]").unwrap();
        let interpretation = match self.reconstruction.interpretation {
            LengthInterpretation::DeltaFromBase { .. } => "delta",
            LengthInterpretation::Absolute => "absolute",
        };
        writeln!(out, "interpretation = {interpretation}").unwrap();
        writeln!(
            out,
            "max_invalid_fraction = {}",
            self.reconstruction.max_invalid_fraction
        )
        .unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[sweep]").unwrap();
        writeln!(out, "steps = {}", self.sweep_steps).unwrap();
        writeln!(out, "max_bend = {}", self.sweep_max_bend).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "[run]").unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        out
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RawConfig::default().validate().expect("defaults are valid")
    }
}
