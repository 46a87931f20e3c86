//! Trajectory CSV schema: `t,x,y,z,theta,phi,L`.

use anyhow::{bail, Context, Result};
use proprio_core::kinematics::{ConfigState, EndEffectorPosition};
use proprio_core::reconstruction::Trajectory;

const HEADER: &str = "t,x,y,z,theta,phi,L";

pub fn render(trajectory: &Trajectory<f64>) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for ((t, p), c) in trajectory
        .timestamps()
        .iter()
        .zip(trajectory.points())
        .zip(trajectory.configs())
    {
        out.push_str(&format!(
            "{t},{},{},{},{},{},{}\n",
            p.x,
            p.y,
            p.z,
            c.theta(),
            c.phi(),
            c.length()
        ));
    }
    out
}

pub fn parse(text: &str) -> Result<Trajectory<f64>> {
    let mut lines = text.lines();
    let header = lines.next().context("trajectory file is empty")?.trim();
    if header != HEADER {
        bail!("unrecognized trajectory header `{header}`");
    }
    let mut timestamps = Vec::new();
    let mut points = Vec::new();
    let mut configs = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            bail!("row {row}: {} columns, expected 7", fields.len());
        }
        let mut values = [0.0f64; 7];
        for (k, v) in values.iter_mut().enumerate() {
            *v = fields[k]
                .parse()
                .with_context(|| format!("row {row}: `{}` is not a number", fields[k]))?;
        }
        timestamps.push(values[0]);
        points.push(EndEffectorPosition::new(values[1], values[2], values[3]));
        configs.push(
            ConfigState::new(values[4], values[5], values[6])
                .with_context(|| format!("row {row}: invalid configuration"))?,
        );
    }
    Ok(Trajectory::new(timestamps, points, configs)?)
}
