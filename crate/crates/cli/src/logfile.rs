//! Sensor log CSV schema.
//!
//! Columns: `t,v1,v2,v3[,code1,code2,code3][,l1,l2,l3,theta,phi,L,x,y,z]`.
//! The code group is present when the log was quantized; the ground-truth
//! group is present for simulated runs. Values use `.` decimals and the
//! shortest representation that parses back to the identical float.

use anyhow::{bail, Context, Result};
use proprio_core::kinematics::{ConfigState, EndEffectorPosition};
use proprio_core::reconstruction::{GroundTruthChannels, SensorLog};
use proprio_core::simulator::GroundTruthRun;

const BASE_HEADER: &str = "t,v1,v2,v3";
const CODE_HEADER: &str = "code1,code2,code3";
const TRUTH_HEADER: &str = "l1,l2,l3,theta,phi,L,x,y,z";

/// Renders a simulated run as CSV text.
pub fn render(run: &GroundTruthRun<f64>) -> String {
    render_log(&run.log)
}

/// Renders any sensor log as CSV text.
pub fn render_log(log: &SensorLog<f64>) -> String {
    let mut header = String::from(BASE_HEADER);
    if log.codes().is_some() {
        header.push(',');
        header.push_str(CODE_HEADER);
    }
    if log.ground_truth().is_some() {
        header.push(',');
        header.push_str(TRUTH_HEADER);
    }
    let mut out = header;
    out.push('\n');
    let channels = log.channels();
    for (i, t) in log.timestamps().iter().enumerate() {
        let mut row = format!(
            "{t},{},{},{}",
            channels[0][i], channels[1][i], channels[2][i]
        );
        if let Some(codes) = log.codes() {
            row.push_str(&format!(",{},{},{}", codes[0][i], codes[1][i], codes[2][i]));
        }
        if let Some(truth) = log.ground_truth() {
            let l = truth.lengths[i];
            let c = truth.configs[i];
            let p = truth.positions[i];
            row.push_str(&format!(
                ",{},{},{},{},{},{},{},{},{}",
                l[0],
                l[1],
                l[2],
                c.theta(),
                c.phi(),
                c.length(),
                p.x,
                p.y,
                p.z
            ));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn parse_f64(field: &str, row: usize, name: &str) -> Result<f64> {
    field
        .parse()
        .with_context(|| format!("row {row}: column {name} holds `{field}`, expected a number"))
}

/// Parses CSV text back into a sensor log, recovering the sample rate from
/// the timestamp column.
pub fn parse(text: &str) -> Result<SensorLog<f64>> {
    let mut lines = text.lines();
    let header = lines.next().context("log file is empty")?.trim();
    let (codes_present, truth_present) = match header {
        h if h == BASE_HEADER => (false, false),
        h if h == format!("{BASE_HEADER},{CODE_HEADER}") => (true, false),
        h if h == format!("{BASE_HEADER},{TRUTH_HEADER}") => (false, true),
        h if h == format!("{BASE_HEADER},{CODE_HEADER},{TRUTH_HEADER}") => (true, true),
        other => bail!("unrecognized log header `{other}`"),
    };
    let expected = 4 + if codes_present { 3 } else { 0 } + if truth_present { 9 } else { 0 };

    let mut timestamps = Vec::new();
    let mut channels: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut codes: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut truth = GroundTruthChannels {
        lengths: Vec::new(),
        configs: Vec::new(),
        positions: Vec::new(),
    };
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected {
            bail!(
                "row {row}: {} columns, expected {expected} (truncated or malformed log)",
                fields.len()
            );
        }
        timestamps.push(parse_f64(fields[0], row, "t")?);
        for c in 0..3 {
            channels[c].push(parse_f64(fields[1 + c], row, "v")?);
        }
        let mut cursor = 4;
        if codes_present {
            for c in 0..3 {
                let field = fields[cursor + c];
                codes[c].push(
                    field.parse().with_context(|| {
                        format!("row {row}: column code{} holds `{field}`", c + 1)
                    })?,
                );
            }
            cursor += 3;
        }
        if truth_present {
            let mut values = [0.0; 9];
            for (k, v) in values.iter_mut().enumerate() {
                *v = parse_f64(
                    fields[cursor + k],
                    row,
                    TRUTH_HEADER.split(',').nth(k).unwrap(),
                )?;
            }
            truth.lengths.push([values[0], values[1], values[2]]);
            truth.configs.push(
                ConfigState::new(values[3], values[4], values[5])
                    .with_context(|| format!("row {row}: invalid configuration"))?,
            );
            truth
                .positions
                .push(EndEffectorPosition::new(values[6], values[7], values[8]));
        }
    }
    let mut log = SensorLog::from_timestamps(timestamps, channels)?;
    if codes_present {
        log = log.with_codes(codes)?;
    }
    if truth_present {
        log = log.with_ground_truth(truth)?;
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proprio_core::simulator::{
        simulate_run, ActuationProtocol, ManipulatorGeometry, ProtocolKind, SensorModel,
    };

    fn run() -> GroundTruthRun<f64> {
        let protocol = ActuationProtocol::new(
            ProtocolKind::Cyclic {
                frequency: 0.0625,
                phase_shift: 2.0 * std::f64::consts::PI / 3.0,
                peak_bend: 20f64.to_radians(),
            },
            2.0,
            50.0,
        )
        .unwrap();
        simulate_run(
            &protocol,
            &ManipulatorGeometry::default(),
            &SensorModel::default(),
        )
        .unwrap()
    }

    #[test]
    fn render_parse_round_trip_is_exact() {
        let run = run();
        let text = render(&run);
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, run.log);
        // Shortest-representation floats re-render to identical bytes.
        assert_eq!(render_log(&parsed), text);
    }

    #[test]
    fn header_without_optional_groups_parses() {
        let text = "t,v1,v2,v3\n0,0.1,0.2,0.3\n0.02,0.1,0.2,0.3\n";
        let log = parse(text).unwrap();
        assert_eq!(log.len(), 2);
        assert!(log.codes().is_none());
        assert!(log.ground_truth().is_none());
        assert!((log.sample_rate() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn truncated_row_is_rejected() {
        let run = run();
        let mut text = render(&run);
        // Chop the final row mid-field.
        let cut = text.len() - 20;
        text.truncate(cut);
        assert!(parse(&text).is_err());
    }

    #[test]
    fn unknown_header_is_rejected() {
        assert!(parse("t,v1,v2\n0,0.1,0.2\n").is_err());
        assert!(parse("").is_err());
    }
}
