//! Constant-curvature kinematics of a single tendon-driven segment.
//!
//! The segment is modeled as a chain of `n` rigid links joined by rotary and
//! prismatic joints that approximate a circular arc of total bend `theta`,
//! deflection direction `phi`, and arc length `length`. Three tendons at
//! radius `d` around the backbone actuate the segment; their lengths map to
//! and from the arc parameters.

use crate::error::{Error, Result};
use crate::num::{real, real_usize, Real};

/// Bend angle below which the deflection direction is undefined and reported
/// as zero.
pub const THETA_STRAIGHT_EPSILON: f64 = 1e-9;

/// Bend angle below which the closed-form arc expressions switch to series
/// evaluation to avoid cancellation in `(1 - cos theta) / theta`.
pub const THETA_SERIES_EPSILON: f64 = 1e-4;

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle<T: Real>(angle: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut a = angle % two_pi;
    if a > T::PI() {
        a = a - two_pi;
    } else if a <= -T::PI() {
        a = a + two_pi;
    }
    a
}

/// Configuration-space pose of one segment: bend angle `theta` (rad, >= 0),
/// deflection angle `phi` (rad, wrapped to `(-pi, pi]`), and effective arc
/// length `length` (m, > 0). Direction is carried by `phi`; for a straight
/// segment (`theta` below [`THETA_STRAIGHT_EPSILON`]) `phi` is meaningless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigState<T> {
    theta: T,
    phi: T,
    length: T,
}

impl<T: Real> ConfigState<T> {
    /// Validates invariants and wraps `phi` into `(-pi, pi]`.
    pub fn new(theta: T, phi: T, length: T) -> Result<Self> {
        if !theta.is_finite() || theta < T::zero() {
            return Err(Error::invalid(format!(
                "bend angle must be finite and >= 0, got {theta}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("deflection angle must be finite"));
        }
        if !length.is_finite() || length <= T::zero() {
            return Err(Error::invalid(format!(
                "segment length must be finite and > 0, got {length}"
            )));
        }
        Ok(Self {
            theta,
            phi: normalize_angle(phi),
            length,
        })
    }

    /// Invariants guaranteed by the caller.
    fn new_unchecked(theta: T, phi: T, length: T) -> Self {
        Self { theta, phi, length }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// True when the segment is straight for all practical purposes.
    pub fn is_straight(&self) -> bool {
        self.theta < real(THETA_STRAIGHT_EPSILON)
    }
}

/// Active lengths of the three tendons (m, > 0) and the radius `d` (m, > 0)
/// of the circle on which they are routed around the backbone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TendonLengths<T> {
    l1: T,
    l2: T,
    l3: T,
    d: T,
}

impl<T: Real> TendonLengths<T> {
    /// Validates positivity and the physical-plausibility bound on the
    /// pairwise spread (`max |l_i - l_j| <= 3 * d * pi`).
    pub fn new(l1: T, l2: T, l3: T, d: T) -> Result<Self> {
        for (name, l) in [("l1", l1), ("l2", l2), ("l3", l3), ("d", d)] {
            if !l.is_finite() || l <= T::zero() {
                return Err(Error::invalid(format!(
                    "{name} must be finite and > 0, got {l}"
                )));
            }
        }
        let spread = max3((l1 - l2).abs(), (l2 - l3).abs(), (l1 - l3).abs());
        let bound = real::<T>(3.0) * d * T::PI();
        if spread > bound {
            return Err(Error::invalid(format!(
                "tendon length spread {spread} exceeds plausibility bound {bound}"
            )));
        }
        Ok(Self { l1, l2, l3, d })
    }

    pub fn l1(&self) -> T {
        self.l1
    }

    pub fn l2(&self) -> T {
        self.l2
    }

    pub fn l3(&self) -> T {
        self.l3
    }

    pub fn d(&self) -> T {
        self.d
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.l1, self.l2, self.l3]
    }
}

fn max3<T: Real>(a: T, b: T, c: T) -> T {
    a.max(b).max(c)
}

/// Cartesian position of the segment tip (m), base frame at the segment
/// root with Z along the straight backbone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndEffectorPosition<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> EndEffectorPosition<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Cumulative joint positions of the discretized link chain, starting at the
/// origin; `points.len() - 1` links of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct BackbonePolyline<T> {
    pub points: Vec<EndEffectorPosition<T>>,
}

impl<T: Real> BackbonePolyline<T> {
    pub fn link_count(&self) -> usize {
        self.points.len().saturating_sub(1)
    }
}

/// Walks the link chain, calling `visit(k, sin_sum, cos_sum)` with the
/// cumulative half-angle sums after `k` links. Both the discrete forward
/// kinematics and the backbone polyline reduce to this accumulation, which
/// keeps them bit-identical.
fn accumulate_links<T: Real>(theta: T, n: usize, mut visit: impl FnMut(usize, T, T)) {
    let half_step = theta / (real::<T>(2.0) * real_usize::<T>(n));
    let mut sin_sum = T::zero();
    let mut cos_sum = T::zero();
    for j in 1..=n {
        let angle = real_usize::<T>(2 * j - 1) * half_step;
        sin_sum = sin_sum + angle.sin();
        cos_sum = cos_sum + angle.cos();
        visit(j, sin_sum, cos_sum);
    }
}

fn point_from_sums<T: Real>(
    length: T,
    n: T,
    cos_phi: T,
    sin_phi: T,
    sin_sum: T,
    cos_sum: T,
) -> EndEffectorPosition<T> {
    // The (sum / n) grouping keeps the straight case exact: for theta = 0 the
    // cosine sum equals n and z reduces to length * (n / n) = length.
    let radial = sin_sum / n;
    EndEffectorPosition::new(
        length * (cos_phi * radial),
        length * (sin_phi * radial),
        length * (cos_sum / n),
    )
}

/// Tip position of the `n`-link chain approximation of the arc.
///
/// Each link `j` contributes a unit direction at half-angle `(2j - 1) *
/// theta / (2n)`; the tip is the scaled sum of these directions.
pub fn forward_kinematics_discrete<T: Real>(
    config: &ConfigState<T>,
    n: usize,
) -> Result<EndEffectorPosition<T>> {
    if n == 0 {
        return Err(Error::invalid("link count must be >= 1"));
    }
    let mut last = (T::zero(), T::zero());
    accumulate_links(config.theta(), n, |_, s, c| last = (s, c));
    Ok(point_from_sums(
        config.length(),
        real_usize(n),
        config.phi().cos(),
        config.phi().sin(),
        last.0,
        last.1,
    ))
}

/// Tip position of the exact circular arc (the `n -> infinity` limit of
/// [`forward_kinematics_discrete`]).
///
/// Below [`THETA_SERIES_EPSILON`] the arc factors `(1 - cos theta) / theta`
/// and `sin theta / theta` are evaluated by series to avoid catastrophic
/// cancellation near the straight configuration.
pub fn forward_kinematics_closed<T: Real>(config: &ConfigState<T>) -> EndEffectorPosition<T> {
    let theta = config.theta();
    let length = config.length();
    let (radial, axial) = if theta < real(THETA_SERIES_EPSILON) {
        let t2 = theta * theta;
        let radial = theta * (real::<T>(0.5) - t2 / real(24.0) + t2 * t2 / real(720.0));
        let axial = T::one() - t2 / real(6.0) + t2 * t2 / real(120.0);
        (radial, axial)
    } else {
        ((T::one() - theta.cos()) / theta, theta.sin() / theta)
    };
    EndEffectorPosition::new(
        length * (config.phi().cos() * radial),
        length * (config.phi().sin() * radial),
        length * axial,
    )
}

/// Maps tendon lengths (joint space) to arc parameters (configuration
/// space).
///
/// The deflection angle comes from a two-argument arctangent of the
/// numerator `(sqrt(3)/3) * (l3 + l2 - 2 l1)` and denominator `(l2 - l3)`,
/// covering all quadrants including `l2 = l3`. For a straight segment the
/// deflection is reported as zero by convention.
pub fn joint_to_config<T: Real>(tendons: &TendonLengths<T>) -> ConfigState<T> {
    let [l1, l2, l3] = tendons.as_array();
    let three = real::<T>(3.0);
    let length = (l1 + l2 + l3) / three;
    // Radicand of l1^2 + l2^2 + l3^2 - l1 l2 - l2 l3 - l1 l3 in the
    // cancellation-free half-sum-of-squared-differences form.
    let d12 = l1 - l2;
    let d23 = l2 - l3;
    let d13 = l1 - l3;
    let radicand = (d12 * d12 + d23 * d23 + d13 * d13) / real(2.0);
    let theta = real::<T>(2.0) * radicand.sqrt() / (three * tendons.d());
    let phi = if theta < real(THETA_STRAIGHT_EPSILON) {
        T::zero()
    } else {
        let numerator = (three.sqrt() / three) * (l3 + l2 - real::<T>(2.0) * l1);
        normalize_angle(numerator.atan2(d23))
    };
    ConfigState::new_unchecked(theta, phi, length)
}

/// Maps arc parameters back to tendon lengths for tendons at radius `d`.
///
/// Tendon `i` sits at angular station `pi/2 + (i - 1) * 2 pi / 3` around the
/// backbone (tendon 1 on the +Y axis), the unique station assignment under
/// which [`joint_to_config`] inverts this map. Each tendon shortens by
/// `theta * d * cos(station - phi)`.
pub fn config_to_joint<T: Real>(config: &ConfigState<T>, d: T) -> Result<TendonLengths<T>> {
    if !d.is_finite() || d <= T::zero() {
        return Err(Error::invalid(format!(
            "tendon circle radius must be > 0, got {d}"
        )));
    }
    let length = config.length();
    let depth = config.theta() * d;
    let sin_phi = config.phi().sin();
    let cos_phi = config.phi().cos();
    let half = real::<T>(0.5);
    let root3_half = real::<T>(3.0).sqrt() * half;
    // cos(station_i - phi) expanded per station; the three projections sum
    // to zero, which keeps the mean tendon length equal to `length`.
    let projections = [
        sin_phi,
        -root3_half * cos_phi - half * sin_phi,
        root3_half * cos_phi - half * sin_phi,
    ];
    let l = projections.map(|p| length - depth * p);
    for (i, li) in l.iter().enumerate() {
        if *li <= T::zero() {
            return Err(Error::invalid(format!(
                "tendon {} length collapses to {li} (theta * d too large for segment length)",
                i + 1
            )));
        }
    }
    TendonLengths::new(l[0], l[1], l[2], d)
}

/// Joint positions of the `n`-link chain from the base to the tip.
///
/// The final point equals [`forward_kinematics_discrete`] of the same
/// arguments exactly.
pub fn backbone_points<T: Real>(config: &ConfigState<T>, n: usize) -> Result<BackbonePolyline<T>> {
    if n == 0 {
        return Err(Error::invalid("link count must be >= 1"));
    }
    let n_t = real_usize::<T>(n);
    let cos_phi = config.phi().cos();
    let sin_phi = config.phi().sin();
    let mut points = Vec::with_capacity(n + 1);
    points.push(EndEffectorPosition::new(T::zero(), T::zero(), T::zero()));
    accumulate_links(config.theta(), n, |_, s, c| {
        points.push(point_from_sums(
            config.length(),
            n_t,
            cos_phi,
            sin_phi,
            s,
            c,
        ));
    });
    Ok(BackbonePolyline { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn config(theta: f64, phi: f64, length: f64) -> ConfigState<f64> {
        ConfigState::new(theta, phi, length).unwrap()
    }

    #[test]
    fn discrete_straight_configuration_is_exact() {
        for n in [1, 2, 10, 997] {
            let tip = forward_kinematics_discrete(&config(0.0, 1.234, 0.1), n).unwrap();
            assert_eq!(tip.x, 0.0);
            assert_eq!(tip.y, 0.0);
            assert_eq!(tip.z, 0.1);
        }
    }

    #[test]
    fn discrete_single_link_quarter_turn() {
        let tip = forward_kinematics_discrete(&config(PI / 2.0, 0.0, 0.1), 1).unwrap();
        // One link pointing at the half angle pi/4.
        assert_relative_eq!(tip.x, 0.1 * (PI / 4.0).sin(), epsilon = 1e-15);
        assert_relative_eq!(tip.y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(tip.z, 0.1 * (PI / 4.0).cos(), epsilon = 1e-15);
        assert_relative_eq!(tip.x, 0.070711, epsilon = 1e-6);
        assert_relative_eq!(tip.z, 0.070711, epsilon = 1e-6);
    }

    #[test]
    fn discrete_converges_to_arc_limit() {
        let tip = forward_kinematics_discrete(&config(PI / 2.0, 0.0, 0.1), 1_000_000).unwrap();
        let arc = 0.1 * 2.0 / PI;
        assert!((tip.x - arc).abs() < 1e-6, "x = {}", tip.x);
        assert!((tip.z - arc).abs() < 1e-6, "z = {}", tip.z);
        assert_relative_eq!(tip.x, 0.063662, epsilon = 1e-6);
    }

    #[test]
    fn discrete_rejects_zero_links() {
        let err = forward_kinematics_discrete(&config(0.5, 0.0, 0.1), 0).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn closed_form_examples() {
        let tip = forward_kinematics_closed(&config(1e-12, 0.0, 0.2));
        assert_relative_eq!(tip.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(tip.z, 0.2, epsilon = 1e-15);

        let tip = forward_kinematics_closed(&config(PI / 2.0, 0.0, 0.1));
        assert_relative_eq!(tip.x, 0.1 * 2.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(tip.y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(tip.z, 0.1 * 2.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(tip.x, 0.063662, epsilon = 1e-6);

        let tip = forward_kinematics_closed(&config(PI / 2.0, PI / 2.0, 0.1));
        assert_relative_eq!(tip.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(tip.y, 0.1 * 2.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(tip.z, 0.1 * 2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_series_matches_direct_evaluation_at_threshold() {
        // Just below the switch point the public function takes the series
        // branch; the direct arc expressions (with their ~1e-8 cancellation
        // noise at this angle) must agree with it.
        let theta = 0.99e-4;
        let length = 0.15;
        let phi: f64 = 0.3;
        let series = forward_kinematics_closed(&config(theta, phi, length));
        let direct_x = length * phi.cos() * (1.0 - theta.cos()) / theta;
        let direct_z = length * theta.sin() / theta;
        assert_relative_eq!(series.x, direct_x, max_relative = 1e-6);
        assert_relative_eq!(series.z, direct_z, epsilon = 1e-14);
    }

    #[test]
    fn joint_to_config_examples() {
        let straight = joint_to_config(&TendonLengths::new(0.1, 0.1, 0.1, 0.02).unwrap());
        assert_eq!(straight.theta(), 0.0);
        assert_eq!(straight.phi(), 0.0);
        assert_relative_eq!(straight.length(), 0.1, epsilon = 1e-15);

        let bent = joint_to_config(&TendonLengths::new(0.09, 0.105, 0.105, 0.02).unwrap());
        assert_relative_eq!(bent.theta(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(bent.phi(), PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(bent.length(), 0.1, epsilon = 1e-15);

        let bent = joint_to_config(&TendonLengths::new(0.105, 0.105, 0.09, 0.02).unwrap());
        assert_relative_eq!(bent.theta(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(bent.phi(), -PI / 6.0, epsilon = 1e-12);
        assert_relative_eq!(bent.length(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn config_to_joint_examples() {
        let straight = config_to_joint(&config(0.0, 0.0, 0.1), 0.02).unwrap();
        assert_eq!(straight.as_array(), [0.1, 0.1, 0.1]);

        let bent = config_to_joint(&config(0.5, PI / 2.0, 0.1), 0.02).unwrap();
        assert_relative_eq!(bent.l1(), 0.09, epsilon = 1e-15);
        assert_relative_eq!(bent.l2(), 0.105, epsilon = 1e-15);
        assert_relative_eq!(bent.l3(), 0.105, epsilon = 1e-15);

        let bent = config_to_joint(&config(0.5, -PI / 6.0, 0.1), 0.02).unwrap();
        assert_relative_eq!(bent.l1(), 0.105, epsilon = 1e-15);
        assert_relative_eq!(bent.l2(), 0.105, epsilon = 1e-15);
        assert_relative_eq!(bent.l3(), 0.09, epsilon = 1e-15);
    }

    #[test]
    fn config_to_joint_rejects_collapsing_tendon() {
        // theta * d exceeds the segment length, so one tendon would reach
        // zero or negative length.
        let err = config_to_joint(&config(2.0, PI / 2.0, 0.1), 0.06).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn backbone_straight_chain() {
        let line = backbone_points(&config(0.0, 0.0, 0.1), 4).unwrap();
        assert_eq!(line.link_count(), 4);
        let expected_z = [0.0, 0.025, 0.05, 0.075, 0.1];
        for (point, z) in line.points.iter().zip(expected_z) {
            assert_eq!(point.x, 0.0);
            assert_eq!(point.y, 0.0);
            assert_relative_eq!(point.z, z, epsilon = 1e-15);
        }
    }

    #[test]
    fn backbone_single_link_matches_discrete() {
        let line = backbone_points(&config(PI / 2.0, 0.0, 0.1), 1).unwrap();
        assert_eq!(line.points[0], EndEffectorPosition::new(0.0, 0.0, 0.0));
        let tip = forward_kinematics_discrete(&config(PI / 2.0, 0.0, 0.1), 1).unwrap();
        assert_eq!(line.points[1], tip);
    }

    #[test]
    fn backbone_final_point_equals_discrete_exactly() {
        let c = config(0.5, -PI / 6.0, 0.1);
        let line = backbone_points(&c, 50).unwrap();
        let tip = forward_kinematics_discrete(&c, 50).unwrap();
        assert_eq!(*line.points.last().unwrap(), tip);
    }

    #[test]
    fn backbone_links_have_equal_length() {
        let c = config(1.2, 0.7, 0.25);
        let n = 13;
        let line = backbone_points(&c, n).unwrap();
        let expected = 0.25 / n as f64;
        for pair in line.points.windows(2) {
            let step = pair[0].distance(&pair[1]);
            assert_relative_eq!(step, expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn discrete_converges_within_spec_tolerance_at_n_1000() {
        for theta in [0.1, 0.5, 1.0, PI / 2.0, PI] {
            let c = config(theta, 0.4, 0.1);
            let discrete = forward_kinematics_discrete(&c, 1000).unwrap();
            let closed = forward_kinematics_closed(&c);
            assert!(
                discrete.distance(&closed) < 1e-5 * c.length(),
                "theta = {theta}: deviation {}",
                discrete.distance(&closed)
            );
        }
    }

    #[test]
    fn discrete_matches_trigonometric_sum_identity() {
        // Independent closed sums for the link series: sum sin((2j-1)a) =
        // sin^2(na)/sin(a) and sum cos((2j-1)a) = sin(2na)/(2 sin(a)).
        for theta in [0.1, 0.5, 1.0, PI / 2.0, PI] {
            for phi in [0.0, PI / 3.0, -PI / 3.0, PI] {
                for n in [1usize, 7, 100] {
                    let length = 0.1;
                    let c = config(theta, phi, length);
                    let discrete = forward_kinematics_discrete(&c, n).unwrap();
                    let a = theta / (2.0 * n as f64);
                    let x = (length / n as f64) * phi.cos() * (theta / 2.0).sin().powi(2) / a.sin();
                    let z = (length / n as f64) * theta.sin() / (2.0 * a.sin());
                    assert_relative_eq!(discrete.x, x, epsilon = 1e-12, max_relative = 1e-12);
                    assert_relative_eq!(discrete.z, z, epsilon = 1e-12, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn joint_to_config_preserves_mean_length_exactly() {
        let tendons = TendonLengths::new(0.093, 0.1071, 0.0988, 0.02).unwrap();
        let c = joint_to_config(&tendons);
        let mean = (tendons.l1() + tendons.l2() + tendons.l3()) / 3.0;
        assert_eq!(c.length(), mean);
    }

    #[test]
    fn config_to_joint_preserves_total_length_to_roundoff() {
        let c = config(0.8, 1.1, 0.12);
        let tendons = config_to_joint(&c, 0.015).unwrap();
        let total = tendons.l1() + tendons.l2() + tendons.l3();
        assert_relative_eq!(total, 3.0 * c.length(), epsilon = 1e-15);
    }

    #[test]
    fn invalid_domain_values_are_rejected() {
        assert!(ConfigState::new(-0.1, 0.0, 0.1).is_err());
        assert!(ConfigState::new(0.5, 0.0, 0.0).is_err());
        assert!(ConfigState::new(f64::NAN, 0.0, 0.1).is_err());
        assert!(TendonLengths::new(0.0, 0.1, 0.1, 0.02).is_err());
        assert!(TendonLengths::new(0.1, 0.1, 0.1, 0.0).is_err());
        // Pairwise spread beyond 3 * d * pi.
        assert!(TendonLengths::new(0.2, 0.1, 0.1, 0.01).is_err());
    }

    #[test]
    fn phi_is_normalized_into_half_open_interval() {
        let c = config(0.5, 3.0 * PI, 0.1);
        assert_relative_eq!(c.phi(), PI, epsilon = 1e-12);
        let c = config(0.5, -PI, 0.1);
        assert_relative_eq!(c.phi(), PI, epsilon = 1e-12);
        let c = config(0.5, -2.5 * PI, 0.1);
        assert_relative_eq!(c.phi(), -PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let c = ConfigState::<f32>::new(0.5, 0.25, 0.1).unwrap();
        let tendons = config_to_joint(&c, 0.02f32).unwrap();
        let back = joint_to_config(&tendons);
        assert_relative_eq!(back.theta(), 0.5f32, epsilon = 1e-5);
        assert_relative_eq!(back.phi(), 0.25f32, epsilon = 1e-4);
        assert_relative_eq!(back.length(), 0.1f32, epsilon = 1e-6);
    }

    proptest! {
        #[test]
        fn round_trip_recovers_configuration(
            theta in 1e-4f64..2.8,
            phi in -PI..PI,
            length in 0.05f64..0.5,
            d_scale in 0.01f64..0.45,
        ) {
            // Keep theta * d below half the segment length so no tendon
            // collapses.
            let d = d_scale * length / theta.max(1.0);
            let c = config(theta, phi, length);
            let tendons = config_to_joint(&c, d).unwrap();
            let back = joint_to_config(&tendons);
            prop_assert!((back.theta() - theta).abs() < 1e-9);
            prop_assert!(normalize_angle(back.phi() - c.phi()).abs() < 1e-9);
            prop_assert!((back.length() - length).abs() < 1e-9);
        }

        #[test]
        fn rotation_equivariance(
            theta in 1e-3f64..PI,
            phi in -PI..PI,
            delta in -PI..PI,
            n in 1usize..60,
        ) {
            let base = forward_kinematics_discrete(&config(theta, phi, 0.1), n).unwrap();
            let rotated = forward_kinematics_discrete(&config(theta, phi + delta, 0.1), n).unwrap();
            let expected_x = base.x * delta.cos() - base.y * delta.sin();
            let expected_y = base.x * delta.sin() + base.y * delta.cos();
            prop_assert!((rotated.x - expected_x).abs() < 1e-12);
            prop_assert!((rotated.y - expected_y).abs() < 1e-12);
            prop_assert!((rotated.z - base.z).abs() < 1e-15);
        }

        #[test]
        fn chord_never_exceeds_arc_length(
            theta in 0.0f64..PI,
            phi in -PI..PI,
            length in 0.01f64..1.0,
            n in 1usize..200,
        ) {
            let tip = forward_kinematics_discrete(&config(theta, phi, length), n).unwrap();
            prop_assert!(tip.norm() <= length * (1.0 + 1e-12));
            let closed = forward_kinematics_closed(&config(theta, phi, length));
            prop_assert!(closed.norm() <= length * (1.0 + 1e-12));
        }
    }
}
