//! Resistive tendon sensing: linear resistance model, Wheatstone bridge,
//! ADC quantization, and seeded measurement noise.
//!
//! A conductive tendon of active length `l` has resistance `lambda * l +
//! r_contact`. The bridge converts that resistance into a differential
//! voltage and back; resistance depends only on length, never on force.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::num::{real, Real};

/// Linear tendon-as-resistor model: `R = lambda * l + r_contact`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TendonResistorModel<T> {
    /// Resistance per unit length (ohm/m, > 0).
    pub lambda: T,
    /// Fixed series resistance of the connections (ohm, >= 0).
    pub r_contact: T,
}

impl<T: Real> TendonResistorModel<T> {
    pub fn new(lambda: T, r_contact: T) -> Result<Self> {
        if !lambda.is_finite() || lambda <= T::zero() {
            return Err(Error::invalid(format!(
                "resistance per length must be > 0, got {lambda}"
            )));
        }
        if !r_contact.is_finite() || r_contact < T::zero() {
            return Err(Error::invalid(format!(
                "contact resistance must be >= 0, got {r_contact}"
            )));
        }
        Ok(Self { lambda, r_contact })
    }
}

/// Known resistors and supply voltage of the Wheatstone bridge. `r1` and
/// `r2` form the reference branch; `r4` pairs with the unknown resistance in
/// the measurement branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeParams<T> {
    pub r1: T,
    pub r2: T,
    pub r4: T,
    pub v_in: T,
}

impl<T: Real> BridgeParams<T> {
    pub fn new(r1: T, r2: T, r4: T, v_in: T) -> Result<Self> {
        for (name, v) in [("r1", r1), ("r2", r2), ("r4", r4), ("v_in", v_in)] {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::invalid(format!(
                    "bridge parameter {name} must be > 0, got {v}"
                )));
            }
        }
        Ok(Self { r1, r2, r4, v_in })
    }

    /// Voltage divider ratio of the reference branch, `r2 / (r1 + r2)`.
    fn reference_ratio(&self) -> T {
        self.r2 / (self.r1 + self.r2)
    }
}

/// Ideal ADC: `bits` of resolution over the range `[0, v_ref]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcModel<T> {
    bits: u32,
    v_ref: T,
}

impl<T: Real> AdcModel<T> {
    pub fn new(bits: u32, v_ref: T) -> Result<Self> {
        if !(1..=24).contains(&bits) {
            return Err(Error::invalid(format!(
                "ADC resolution must be within 1..=24 bits, got {bits}"
            )));
        }
        if !v_ref.is_finite() || v_ref <= T::zero() {
            return Err(Error::invalid(format!(
                "ADC reference voltage must be > 0, got {v_ref}"
            )));
        }
        Ok(Self { bits, v_ref })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn v_ref(&self) -> T {
        self.v_ref
    }

    /// Highest representable code, `2^bits - 1`.
    pub fn max_code(&self) -> u32 {
        (1u32 << self.bits) - 1
    }

    /// Voltage step of one least-significant bit.
    pub fn lsb(&self) -> T {
        self.v_ref / real(f64::from(self.max_code()))
    }
}

/// Additive zero-mean Gaussian voltage noise drawn from a seeded generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel<T> {
    pub sigma: T,
    pub seed: u64,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(sigma: T, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < T::zero() {
            return Err(Error::invalid(format!(
                "noise standard deviation must be >= 0, got {sigma}"
            )));
        }
        Ok(Self { sigma, seed })
    }
}

/// Resistance of a tendon with active length `l` (m, > 0).
pub fn length_to_resistance<T: Real>(l: T, model: &TendonResistorModel<T>) -> Result<T> {
    if !l.is_finite() || l <= T::zero() {
        return Err(Error::invalid(format!(
            "active length must be > 0, got {l}"
        )));
    }
    Ok(model.lambda * l + model.r_contact)
}

/// Bridge output voltage for an unknown resistance `r_x` (> 0):
/// `v_in * (r2 / (r1 + r2) - r4 / (r4 + r_x))`.
pub fn bridge_forward<T: Real>(r_x: T, p: &BridgeParams<T>) -> Result<T> {
    if !r_x.is_finite() || r_x <= T::zero() {
        return Err(Error::invalid(format!(
            "bridge input resistance must be > 0, got {r_x}"
        )));
    }
    Ok(p.v_in * (p.reference_ratio() - p.r4 / (p.r4 + r_x)))
}

/// Recovers the unknown resistance from a bridge output voltage:
/// `r4 * (1 - k) / k` with `k = r2 / (r1 + r2) - v_out / v_in`.
///
/// Voltages for which `k` leaves `(0, 1)` are physically unreachable and
/// signal a saturated or disconnected sensor.
pub fn bridge_invert<T: Real>(v_out: T, p: &BridgeParams<T>) -> Result<T> {
    let k = p.reference_ratio() - v_out / p.v_in;
    if !(k > T::zero() && k < T::one()) {
        return Err(Error::BridgeOutOfRange {
            k: k.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(p.r4 * (T::one() - k) / k)
}

/// Quantizes a voltage to the nearest ADC code (ties round half up,
/// out-of-range voltages clamp to the rails) and returns the code together
/// with its back-converted voltage `code * v_ref / (2^bits - 1)`.
pub fn adc_quantize<T: Real>(v: T, adc: &AdcModel<T>) -> (u32, T) {
    let max_code = real::<T>(f64::from(adc.max_code()));
    let clamped = v.max(T::zero()).min(adc.v_ref());
    let code = (clamped / adc.v_ref() * max_code).round();
    let code = code.to_u32().unwrap_or(adc.max_code()).min(adc.max_code());
    let back = real::<T>(f64::from(code)) * adc.v_ref() / max_code;
    (code, back)
}

/// Adds independent zero-mean Gaussian noise of standard deviation
/// `noise.sigma` to every sample. The generator is seeded from
/// `noise.seed`, so equal seeds produce identical output.
pub fn add_noise<T: Real>(series: &[T], noise: &NoiseModel<T>) -> Vec<T> {
    if noise.sigma == T::zero() {
        return series.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    series
        .iter()
        .map(|&v| {
            let gauss: f64 = rng.sample(StandardNormal);
            v + noise.sigma * real::<T>(gauss)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn default_bridge() -> BridgeParams<f64> {
        BridgeParams::new(10.0, 10.0, 10.0, 5.0).unwrap()
    }

    #[test]
    fn resistance_is_linear_in_length() {
        let model = TendonResistorModel::new(33.333, 0.0).unwrap();
        assert_relative_eq!(
            length_to_resistance(0.30, &model).unwrap(),
            9.9999,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            length_to_resistance(0.285, &model).unwrap(),
            9.499905,
            epsilon = 1e-12
        );
        // Proportionality: halving the length halves the resistance.
        let full = length_to_resistance(0.4, &model).unwrap();
        let half = length_to_resistance(0.2, &model).unwrap();
        assert_relative_eq!(half * 2.0, full, epsilon = 1e-15);
    }

    #[test]
    fn resistance_rejects_nonpositive_length() {
        let model = TendonResistorModel::new(35.0, 0.0).unwrap();
        assert!(length_to_resistance(0.0, &model).is_err());
        assert!(length_to_resistance(-0.1, &model).is_err());
    }

    #[test]
    fn balanced_bridge_reads_zero() {
        assert_relative_eq!(
            bridge_forward(10.0, &default_bridge()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bridge_forward_examples() {
        let p = default_bridge();
        assert_relative_eq!(
            bridge_forward(10.5, &p).unwrap(),
            5.0 * (0.5 - 10.0 / 20.5),
            epsilon = 1e-15
        );
        assert_relative_eq!(bridge_forward(10.5, &p).unwrap(), 0.060976, epsilon = 1e-6);
        assert_relative_eq!(
            bridge_forward(9.5, &p).unwrap(),
            5.0 * (0.5 - 10.0 / 19.5),
            epsilon = 1e-15
        );
        assert_relative_eq!(bridge_forward(9.5, &p).unwrap(), -0.064103, epsilon = 1e-6);
    }

    #[test]
    fn bridge_invert_examples() {
        let p = default_bridge();
        assert_relative_eq!(bridge_invert(0.0, &p).unwrap(), 10.0, epsilon = 1e-12);
        let v = bridge_forward(10.5, &p).unwrap();
        assert_relative_eq!(bridge_invert(v, &p).unwrap(), 10.5, epsilon = 1e-12);
    }

    #[test]
    fn bridge_invert_rejects_unreachable_voltage() {
        // k = 0.5 - 2.6/5 = -0.02, outside (0, 1).
        let err = bridge_invert(2.6, &default_bridge()).unwrap_err();
        match err {
            Error::BridgeOutOfRange { k } => assert_relative_eq!(k, -0.02, epsilon = 1e-12),
            other => panic!("expected out-of-range error, got {other:?}"),
        }
        // k = 1 at v_out = -v_in/2 for the symmetric bridge.
        assert!(bridge_invert(-2.5, &default_bridge()).is_err());
    }

    #[test]
    fn adc_rails_and_midpoint() {
        let adc = AdcModel::new(10, 5.0).unwrap();
        assert_eq!(adc.max_code(), 1023);
        assert_eq!(adc_quantize(0.0, &adc), (0, 0.0));
        let (code, back) = adc_quantize(5.0, &adc);
        assert_eq!(code, 1023);
        assert_relative_eq!(back, 5.0, epsilon = 1e-15);
        // 2.5 / 5 * 1023 = 511.5 rounds half up to 512.
        let (code, back) = adc_quantize(2.5, &adc);
        assert_eq!(code, 512);
        assert_relative_eq!(back, 2.502444, epsilon = 1e-6);
    }

    #[test]
    fn adc_clamps_out_of_range_voltages() {
        let adc = AdcModel::new(10, 5.0).unwrap();
        assert_eq!(adc_quantize(-1.0, &adc).0, 0);
        assert_eq!(adc_quantize(7.0, &adc).0, 1023);
    }

    #[test]
    fn adc_error_is_within_half_lsb() {
        let adc = AdcModel::new(10, 5.0).unwrap();
        let half_lsb = adc.lsb() / 2.0;
        for i in 0..500 {
            let v = 5.0 * (i as f64) / 499.0;
            let (_, back) = adc_quantize(v, &adc);
            assert!((back - v).abs() <= half_lsb * (1.0 + 1e-12));
        }
    }

    #[test]
    fn adc_rejects_invalid_resolution() {
        assert!(AdcModel::new(0, 5.0).is_err());
        assert!(AdcModel::new(25, 5.0).is_err());
        assert!(AdcModel::<f64>::new(10, 0.0).is_err());
    }

    #[test]
    fn zero_sigma_noise_is_identity() {
        let noise = NoiseModel::new(0.0, 7).unwrap();
        let series = vec![0.1, -0.2, 0.3];
        assert_eq!(add_noise(&series, &noise), series);
    }

    #[test]
    fn noise_is_deterministic_for_equal_seeds() {
        let noise = NoiseModel::new(0.01, 42).unwrap();
        let series: Vec<f64> = (0..100).map(|i| i as f64 * 0.001).collect();
        let a = add_noise(&series, &noise);
        let b = add_noise(&series, &noise);
        assert_eq!(a, b);
        let other = add_noise(&series, &NoiseModel::new(0.01, 43).unwrap());
        assert_ne!(a, other);
    }

    #[test]
    fn noise_sample_mean_is_near_zero() {
        let n = 1_000_000usize;
        let sigma = 0.01;
        let noise = NoiseModel::new(sigma, 11).unwrap();
        let zeros = vec![0.0f64; n];
        let noisy = add_noise(&zeros, &noise);
        let mean = noisy.iter().sum::<f64>() / n as f64;
        assert!(
            mean.abs() < 4.0 * sigma / (n as f64).sqrt(),
            "sample mean {mean} outside the four-sigma band"
        );
    }

    proptest! {
        #[test]
        fn bridge_round_trip_is_identity(
            r_x in 1.0f64..100.0,
            r1 in 1.0f64..100.0,
            r2 in 1.0f64..100.0,
            r4 in 1.0f64..100.0,
            v_in in 1.0f64..12.0,
        ) {
            let p = BridgeParams::new(r1, r2, r4, v_in).unwrap();
            let v = bridge_forward(r_x, &p).unwrap();
            let back = bridge_invert(v, &p).unwrap();
            prop_assert!((back - r_x).abs() <= 1e-12 * r_x);
        }

        #[test]
        fn bridge_forward_is_strictly_increasing(
            r_x in 1.0f64..100.0,
            step in 1e-6f64..10.0,
            r1 in 1.0f64..100.0,
            r2 in 1.0f64..100.0,
            r4 in 1.0f64..100.0,
        ) {
            let p = BridgeParams::new(r1, r2, r4, 5.0).unwrap();
            let low = bridge_forward(r_x, &p).unwrap();
            let high = bridge_forward(r_x + step, &p).unwrap();
            prop_assert!(high > low);
        }

        #[test]
        fn bridge_invert_is_strictly_increasing_on_valid_domain(
            r_x in 1.0f64..100.0,
            step in 1e-6f64..0.1,
            r1 in 1.0f64..100.0,
            r2 in 1.0f64..100.0,
            r4 in 1.0f64..100.0,
        ) {
            let p = BridgeParams::new(r1, r2, r4, 5.0).unwrap();
            let v_low = bridge_forward(r_x, &p).unwrap();
            let v_high = bridge_forward(r_x + step, &p).unwrap();
            prop_assert!(bridge_invert(v_high, &p).unwrap() > bridge_invert(v_low, &p).unwrap());
        }

        #[test]
        fn balanced_output_iff_rx_equals_r4(
            r in 1.0f64..100.0,
            r4 in 1.0f64..100.0,
        ) {
            // With r1 = r2 the bridge output is zero exactly when r_x = r4.
            let p = BridgeParams::new(10.0, 10.0, r4, 5.0).unwrap();
            let v = bridge_forward(r, &p).unwrap();
            if (r - r4).abs() > 1e-9 {
                prop_assert!(v.abs() > 0.0);
                prop_assert_eq!(v > 0.0, r > r4);
            }
            let balanced = bridge_forward(r4, &p).unwrap();
            prop_assert!(balanced.abs() < 1e-15);
        }
    }
}
