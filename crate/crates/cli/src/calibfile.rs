//! Versioned calibration record file: `key = value` per tendon section.

use anyhow::{anyhow, bail, Context, Result};
use proprio_core::calibration::{
    CalibrationRecord, CubicMap, NormalizationRange, TendonCalibration,
};

const FORMAT_LINE: &str = "proprio-calibration v1";

pub fn render(record: &CalibrationRecord<f64>) -> String {
    let mut out = format!("{FORMAT_LINE}\ntendons = {}\n", record.tendon_count());
    for (i, t) in record.tendons.iter().enumerate() {
        out.push_str(&format!(
            "[tendon {}]\nr_min = {}\nr_max = {}\na = {}\nb = {}\nc = {}\nd = {}\nscale = {}\noffset = {}\nr_squared = {}\nrmse = {}\n",
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
    out
}

pub fn parse(text: &str) -> Result<CalibrationRecord<f64>> {
    let mut lines = text.lines().enumerate();
    let (_, format) = lines.next().context("calibration file is empty")?;
    if format.trim() != FORMAT_LINE {
        bail!("unsupported calibration format `{}`", format.trim());
    }
    let (_, count_line) = lines.next().context("missing tendon count")?;
    let count: usize = count_line
        .trim()
        .strip_prefix("tendons =")
        .map(str::trim)
        .context("expected `tendons = N` on line 2")?
        .parse()
        .context("tendon count is not an integer")?;

    let mut tendons = Vec::new();
    let mut current: Option<Vec<(String, f64)>> = None;
    let mut flush = |fields: &mut Option<Vec<(String, f64)>>| -> Result<()> {
        if let Some(fields) = fields.take() {
            tendons.push(build_tendon(&fields)?);
        }
        Ok(())
    };
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            flush(&mut current)?;
            current = Some(Vec::new());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .with_context(|| format!("line {line_no}: `{}` is not a number", value.trim()))?;
        current
            .as_mut()
            .ok_or_else(|| anyhow!("line {line_no}: field outside a tendon section"))?
            .push((key.trim().to_string(), value));
    }
    flush(&mut current)?;
    if tendons.len() != count {
        bail!(
            "calibration file declares {count} tendons but holds {}",
            tendons.len()
        );
    }
    Ok(CalibrationRecord { tendons })
}

fn build_tendon(fields: &[(String, f64)]) -> Result<TendonCalibration<f64>> {
    let get = |name: &str| -> Result<f64> {
        fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| anyhow!("tendon section is missing `{name}`"))
    };
    let range = NormalizationRange::new(get("r_min")?, get("r_max")?)?;
    let map = CubicMap::new(
        get("a")?,
        get("b")?,
        get("c")?,
        get("d")?,
        get("scale")?,
        get("offset")?,
    )?;
    let r_squared = get("r_squared")?;
    let rmse = get("rmse")?;
    if !(0.0..=1.0 + 1e-12).contains(&r_squared) {
        bail!("r_squared {r_squared} outside [0, 1]");
    }
    if rmse < 0.0 {
        bail!("rmse {rmse} is negative");
    }
    Ok(TendonCalibration {
        range,
        map,
        r_squared,
        rmse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> CalibrationRecord<f64> {
        let tendon = TendonCalibration {
            range: NormalizationRange::new(9.95, 10.5).unwrap(),
            map: CubicMap::from_coefficients(0.102, -0.172, -0.205, -0.173).unwrap(),
            r_squared: 0.97,
            rmse: 1.25e-3,
        };
        CalibrationRecord {
            tendons: vec![tendon; 3],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let record = record();
        let text = render(&record);
        assert!(text.starts_with(FORMAT_LINE));
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, record);
        assert_eq!(render(&parsed), text);
    }

    #[test]
    fn version_and_count_are_enforced() {
        assert!(parse("proprio-calibration v9\ntendons = 0\n").is_err());
        let mut text = render(&record());
        text = text.replace("tendons = 3", "tendons = 2");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn missing_field_is_rejected() {
        let text = render(&record()).replace("scale = 1\n", "");
        assert!(parse(&text).is_err());
    }
}
