//! Resistance normalization and the cubic resistance-to-length map.
//!
//! Each tendon's resistance swing is normalized to `[0, 1]` over the range
//! observed during a calibration sweep, and a third-order polynomial maps
//! the normalized resistance to a tendon length (or length change). Fitting
//! is ordinary least squares on the 4x4 normal equations with partial
//! pivoting, with R^2 and RMSE diagnostics.

use crate::error::{Error, Result};
use crate::num::{real, real_usize, Real};

/// Per-tendon resistance bounds observed during calibration (ohm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRange<T> {
    r_min: T,
    r_max: T,
}

impl<T: Real> NormalizationRange<T> {
    pub fn new(r_min: T, r_max: T) -> Result<Self> {
        if !r_min.is_finite() || !r_max.is_finite() || r_max <= r_min {
            return Err(Error::invalid(format!(
                "degenerate normalization range [{r_min}, {r_max}]"
            )));
        }
        Ok(Self { r_min, r_max })
    }

    /// Range spanned by a list of observed resistances.
    pub fn from_samples(samples: &[CalibrationSample<T>]) -> Result<Self> {
        let mut r_min = T::infinity();
        let mut r_max = T::neg_infinity();
        for s in samples {
            r_min = r_min.min(s.resistance);
            r_max = r_max.max(s.resistance);
        }
        Self::new(r_min, r_max)
    }

    pub fn r_min(&self) -> T {
        self.r_min
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }
}

/// Cubic map `l(r) = offset + scale * (a + b r + c r^2 + d r^3)` over
/// normalized resistance `r`. `scale` converts map units to meters and
/// `offset` shifts the output; fits produced by [`fit_cubic`] use
/// `scale = 1`, `offset = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicMap<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub scale: T,
    pub offset: T,
}

impl<T: Real> CubicMap<T> {
    pub fn new(a: T, b: T, c: T, d: T, scale: T, offset: T) -> Result<Self> {
        for (name, v) in [
            ("a", a),
            ("b", b),
            ("c", c),
            ("d", d),
            ("scale", scale),
            ("offset", offset),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("coefficient {name} must be finite")));
            }
        }
        if scale == T::zero() {
            return Err(Error::invalid("scale must be nonzero"));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            scale,
            offset,
        })
    }

    /// Cubic with unit scale and zero offset.
    pub fn from_coefficients(a: T, b: T, c: T, d: T) -> Result<Self> {
        Self::new(a, b, c, d, T::one(), T::zero())
    }
}

/// One calibration observation: measured resistance paired with the
/// ground-truth tendon length change (signed; negative under contraction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSample<T> {
    pub resistance: T,
    pub length_change: T,
}

impl<T: Real> CalibrationSample<T> {
    pub fn new(resistance: T, length_change: T) -> Result<Self> {
        if !resistance.is_finite() || !length_change.is_finite() {
            return Err(Error::invalid("calibration sample must be finite"));
        }
        Ok(Self {
            resistance,
            length_change,
        })
    }
}

/// Fitted map and diagnostics for one tendon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TendonCalibration<T> {
    pub range: NormalizationRange<T>,
    pub map: CubicMap<T>,
    /// Coefficient of determination of the fit, in `[0, 1]`.
    pub r_squared: T,
    /// Root-mean-square residual of the fit (m).
    pub rmse: T,
}

/// Calibration of the full three-tendon sensor set.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRecord<T> {
    pub tendons: Vec<TendonCalibration<T>>,
}

impl<T: Real> CalibrationRecord<T> {
    pub fn tendon_count(&self) -> usize {
        self.tendons.len()
    }
}

/// Normalizes a resistance into `[0, 1]` over the calibration range,
/// clamping values outside it.
pub fn normalize_resistance<T: Real>(r: T, range: &NormalizationRange<T>) -> T {
    let unit = (r - range.r_min) / (range.r_max - range.r_min);
    unit.max(T::zero()).min(T::one())
}

/// Evaluates the cubic map at a normalized resistance (Horner's scheme).
pub fn eval_cubic<T: Real>(map: &CubicMap<T>, r_norm: T) -> T {
    let poly = map.a + r_norm * (map.b + r_norm * (map.c + r_norm * map.d));
    map.offset + map.scale * poly
}

/// Least-squares cubic fit of length change against normalized resistance.
///
/// Requires at least four samples with four distinct normalized abscissae;
/// solves the 4x4 normal equations with partial pivoting and reports
/// `R^2 = 1 - SS_res / SS_tot` and `RMSE = sqrt(SS_res / N)`.
pub fn fit_cubic<T: Real>(
    samples: &[CalibrationSample<T>],
    range: &NormalizationRange<T>,
) -> Result<TendonCalibration<T>> {
    if samples.is_empty() {
        return Err(Error::invalid("no calibration samples"));
    }
    let abscissae: Vec<T> = samples
        .iter()
        .map(|s| normalize_resistance(s.resistance, range))
        .collect();
    let distinct = count_distinct(&abscissae);
    if distinct < 4 {
        return Err(Error::RankDeficient {
            distinct,
            needed: 4,
        });
    }

    // Normal equations A x = b with A[i][j] = sum r^(i+j), b[i] = sum r^i * l.
    let mut power_sums = [T::zero(); 7];
    let mut b = [T::zero(); 4];
    for (r, s) in abscissae.iter().zip(samples) {
        let mut p = T::one();
        for (k, sum) in power_sums.iter_mut().enumerate() {
            *sum = *sum + p;
            if k < 6 {
                p = p * *r;
            }
        }
        let mut p = T::one();
        for bi in b.iter_mut() {
            *bi = *bi + p * s.length_change;
            p = p * *r;
        }
    }
    let mut a = [[T::zero(); 4]; 4];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = power_sums[i + j];
        }
    }
    let coeffs = solve_4x4(a, b)?;
    let map = CubicMap::from_coefficients(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?;

    let n = real_usize::<T>(samples.len());
    let mean = samples
        .iter()
        .fold(T::zero(), |acc, s| acc + s.length_change)
        / n;
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for (r, s) in abscissae.iter().zip(samples) {
        let residual = s.length_change - eval_cubic(&map, *r);
        ss_res = ss_res + residual * residual;
        let centered = s.length_change - mean;
        ss_tot = ss_tot + centered * centered;
    }
    let r_squared = if ss_tot > T::zero() {
        (T::one() - ss_res / ss_tot).max(T::zero())
    } else {
        T::one()
    };
    Ok(TendonCalibration {
        range: *range,
        map,
        r_squared,
        rmse: (ss_res / n).sqrt(),
    })
}

/// Fits one tendon per sample list, deriving each normalization range from
/// the observed resistances.
pub fn calibrate_from_samples<T: Real>(
    per_tendon: &[Vec<CalibrationSample<T>>],
) -> Result<CalibrationRecord<T>> {
    let tendons = per_tendon
        .iter()
        .map(|samples| {
            let range = NormalizationRange::from_samples(samples)?;
            fit_cubic(samples, &range)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibrationRecord { tendons })
}

/// Fits a single unified map over all tendons: each tendon keeps its own
/// normalization range, the pooled normalized samples share one cubic.
pub fn calibrate_shared_from_samples<T: Real>(
    per_tendon: &[Vec<CalibrationSample<T>>],
) -> Result<CalibrationRecord<T>> {
    let ranges = per_tendon
        .iter()
        .map(|samples| NormalizationRange::from_samples(samples))
        .collect::<Result<Vec<_>>>()?;
    // Pool samples on the normalized abscissa, where the tendons are
    // comparable.
    let pooled: Vec<CalibrationSample<T>> = per_tendon
        .iter()
        .zip(&ranges)
        .flat_map(|(samples, range)| {
            samples.iter().map(|s| CalibrationSample {
                resistance: normalize_resistance(s.resistance, range),
                length_change: s.length_change,
            })
        })
        .collect();
    let unit_range = NormalizationRange::new(T::zero(), T::one())?;
    let shared = fit_cubic(&pooled, &unit_range)?;
    let tendons = ranges
        .into_iter()
        .map(|range| TendonCalibration { range, ..shared })
        .collect();
    Ok(CalibrationRecord { tendons })
}

/// Deterministic per-tendon summary of ranges, coefficients, and fit
/// diagnostics. Field order is stable for golden-file comparison.
pub fn fit_report<T: Real>(record: &CalibrationRecord<T>) -> Result<String> {
    if record.tendons.is_empty() {
        return Err(Error::invalid("calibration record holds no tendons"));
    }
    let mut out = String::new();
    for (i, t) in record.tendons.iter().enumerate() {
        out.push_str(&format!(
            "tendon {}: r_min={} r_max={} a={} b={} c={} d={} scale={} offset={} r_squared={} rmse={}\n",
            i + 1,
            t.range.r_min(),
            t.range.r_max(),
            t.map.a,
            t.map.b,
            t.map.c,
            t.map.d,
            t.map.scale,
            t.map.offset,
            t.r_squared,
            t.rmse,
        ));
    }
    Ok(out)
}

fn count_distinct<T: Real>(values: &[T]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite abscissae"));
    let tol = real::<T>(1e-12);
    let mut distinct = 1;
    for pair in sorted.windows(2) {
        if pair[1] - pair[0] > tol {
            distinct += 1;
        }
    }
    distinct
}

/// Gaussian elimination with partial pivoting on a 4x4 system.
fn solve_4x4<T: Real>(mut a: [[T; 4]; 4], mut b: [T; 4]) -> Result<[T; 4]> {
    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("finite matrix")
            })
            .expect("nonempty range");
        if a[pivot_row][col].abs() <= T::zero() {
            return Err(Error::RankDeficient {
                distinct: col,
                needed: 4,
            });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col];
        for row in (col + 1)..4 {
            let factor = a[row][col] / pivot[col];
            for (cell, p) in a[row].iter_mut().zip(pivot).skip(col) {
                *cell = *cell - factor * p;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); 4];
    for row in (0..4).rev() {
        let mut sum = b[row];
        for col in (row + 1)..4 {
            sum = sum - a[row][col] * x[col];
        }
        x[row] = sum / a[row][row];
    }
    Ok(x)
}
