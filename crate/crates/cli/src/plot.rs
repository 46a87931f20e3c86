//! Static SVG plots of reconstructed paths: XY and XZ projections side by
//! side, with the ground-truth path overlaid when available.

use std::fmt::Write as _;

use proprio_core::kinematics::EndEffectorPosition;
use proprio_core::reconstruction::Trajectory;

const PANE_SIZE: f64 = 400.0;
const MARGIN: f64 = 45.0;
const RECONSTRUCTED_COLOR: &str = "#d62728";
const TRUTH_COLOR: &str = "#1f77b4";

struct Pane {
    label: &'static str,
    origin_x: f64,
    /// Projects a point onto the pane's (horizontal, vertical) data axes.
    project: fn(&EndEffectorPosition<f64>) -> (f64, f64),
}

/// Renders the XY and XZ projections of one or two trajectories.
pub fn render(reconstructed: &Trajectory<f64>, truth: Option<&Trajectory<f64>>) -> String {
    let panes = [
        Pane {
            label: "XY",
            origin_x: MARGIN,
            project: |p| (p.x, p.y),
        },
        Pane {
            label: "XZ",
            origin_x: MARGIN * 2.0 + PANE_SIZE,
            project: |p| (p.x, p.z),
        },
    ];
    let width = MARGIN * 3.0 + PANE_SIZE * 2.0;
    let height = MARGIN * 2.0 + PANE_SIZE;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" font-family="monospace" font-size="13">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    for pane in &panes {
        render_pane(&mut svg, pane, reconstructed, truth);
    }
    // Legend.
    let legend_y = height - 14.0;
    writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{RECONSTRUCTED_COLOR}" stroke-width="2"/>"#,
        MARGIN + 24.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}">reconstructed</text>"#,
        MARGIN + 30.0,
        legend_y + 4.0
    )
    .unwrap();
    if truth.is_some() {
        let x = MARGIN + 160.0;
        writeln!(
            svg,
            r#"<line x1="{x}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{TRUTH_COLOR}" stroke-width="2" stroke-dasharray="6 3"/>"#,
            x + 24.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="{}">ground truth</text>"#,
            x + 30.0,
            legend_y + 4.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn render_pane(
    svg: &mut String,
    pane: &Pane,
    reconstructed: &Trajectory<f64>,
    truth: Option<&Trajectory<f64>>,
) {
    // Data bounds over everything drawn in this pane, padded 8%.
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let all_points = reconstructed
        .points()
        .iter()
        .chain(truth.into_iter().flat_map(|t| t.points().iter()));
    for p in all_points {
        let (u, v) = (pane.project)(p);
        lo = (lo.0.min(u), lo.1.min(v));
        hi = (hi.0.max(u), hi.1.max(v));
    }
    let span = ((hi.0 - lo.0).max(1e-6), (hi.1 - lo.1).max(1e-6));
    let pad = 0.08 * span.0.max(span.1);
    let lo = (lo.0 - pad, lo.1 - pad);
    let scale = PANE_SIZE / (span.0.max(span.1) + 2.0 * pad);

    let to_px = move |p: &EndEffectorPosition<f64>| {
        let (u, v) = (pane.project)(p);
        let x = pane.origin_x + (u - lo.0) * scale;
        // SVG y grows downward.
        let y = MARGIN + PANE_SIZE - (v - lo.1) * scale;
        (x, y)
    };

    writeln!(
        svg,
        r##"<rect x="{}" y="{MARGIN}" width="{PANE_SIZE}" height="{PANE_SIZE}" fill="none" stroke="#888"/>"##,
        pane.origin_x
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="{}">{} (m)</text>"#,
        pane.origin_x + 6.0,
        MARGIN - 8.0,
        pane.label
    )
    .unwrap();

    let mut polyline = |trajectory: &Trajectory<f64>, color: &str, dashed: bool| {
        let mut points = String::new();
        for p in trajectory.points() {
            let (x, y) = to_px(p);
            write!(points, "{x:.3},{y:.3} ").unwrap();
        }
        let dash = if dashed {
            r#" stroke-dasharray="6 3""#
        } else {
            ""
        };
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            points.trim_end()
        )
        .unwrap();
    };
    if let Some(truth) = truth {
        polyline(truth, TRUTH_COLOR, true);
    }
    polyline(reconstructed, RECONSTRUCTED_COLOR, false);
}
