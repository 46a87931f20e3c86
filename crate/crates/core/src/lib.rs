//! Simulation and proprioceptive state reconstruction for tendon-driven
//! continuum manipulators with resistive tendon sensing.
//!
//! A single-segment continuum manipulator is actuated by three tendons whose
//! conductive threads double as resistive length sensors. This crate models
//! the full sensing chain in both directions:
//!
//! - [`kinematics`] — constant-curvature forward kinematics of the segment
//!   and the mappings between tendon lengths and arc parameters.
//! - [`sensing`] — tendon-as-resistor model, Wheatstone bridge (forward and
//!   inverse), ADC quantization, and seeded Gaussian measurement noise.
//! - [`calibration`] — resistance normalization and the cubic
//!   resistance-to-length map with least-squares fitting diagnostics.
//! - [`simulator`] — actuation protocols, the kinematic plant, and synthetic
//!   sensor log generation with ground truth.
//! - [`reconstruction`] — the inverse pipeline: filter, invert the bridge,
//!   map to tendon lengths, and run kinematics to recover the end-effector
//!   path, with error metrics against ground truth.
//!
//! All math is generic over the floating-point scalar via [`Real`]; the
//! `*64` aliases at the crate root pin the common double-precision
//! instantiation.

pub mod calibration;
pub mod error;
pub mod kinematics;
pub mod num;
pub mod reconstruction;
pub mod sensing;
pub mod simulator;

pub use error::{Error, Result};
pub use num::Real;

/// Double-precision aliases for the principal domain types.
pub type ConfigState64 = kinematics::ConfigState<f64>;
pub type TendonLengths64 = kinematics::TendonLengths<f64>;
pub type EndEffectorPosition64 = kinematics::EndEffectorPosition<f64>;
pub type BridgeParams64 = sensing::BridgeParams<f64>;
pub type AdcModel64 = sensing::AdcModel<f64>;
pub type NoiseModel64 = sensing::NoiseModel<f64>;
pub type CalibrationRecord64 = calibration::CalibrationRecord<f64>;
pub type SensorLog64 = reconstruction::SensorLog<f64>;
pub type Trajectory64 = reconstruction::Trajectory<f64>;
pub type ManipulatorGeometry64 = simulator::ManipulatorGeometry<f64>;
pub type SensorModel64 = simulator::SensorModel<f64>;
pub type ActuationProtocol64 = simulator::ActuationProtocol<f64>;
