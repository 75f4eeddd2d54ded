use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::{ValidationError, ValidationReport};

pub const SUMMARY_FILE: &str = "validation_summary.csv";
pub const SUMMARY_HEADER: &str =
    "trajectory,checkpoint,completed,waypoints_reached,interventions,mean_cross_track,sim_time";

const PX_PER_M: f64 = 200.0;

pub fn trace_csv(report: &ValidationReport) -> String {
    let mut s = String::from("t,x,y,yaw,theta,active_waypoint\n");
    for p in &report.trace {
        let _ = writeln!(s, "{},{},{},{},{},{}", p.t, p.x, p.y, p.yaw, p.theta, p.active);
    }
    s
}

/// Draws the course on a `width × height` platform centered on the course.
/// Path points outside the platform are clamped to its edge.
pub fn render_svg(report: &ValidationReport, width: f64, height: f64) -> String {
    let (x0, y0, x1, y1) = report.trajectory.bounds();
    let left = 0.5 * (x0 + x1) - 0.5 * width;
    let top = 0.5 * (y0 + y1) + 0.5 * height;
    let map = |x: f64, y: f64| {
        let u = (x - left).clamp(0.0, width) * PX_PER_M;
        let v = (top - y).clamp(0.0, height) * PX_PER_M;
        (u, v)
    };
    let (w_px, h_px) = (width * PX_PER_M, height * PX_PER_M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w_px:.0}" height="{h_px:.0}" viewBox="0 0 {w_px:.4} {h_px:.4}">"#
    );
    let _ = writeln!(
        s,
        r#"<title>{} (reached {}/{}, interventions {})</title>"#,
        report.trajectory.name,
        report.waypoints_reached,
        report.total_waypoints,
        report.interventions.len()
    );
    let _ = writeln!(
        s,
        r##"<rect class="platform" x="0" y="0" width="{w_px:.4}" height="{h_px:.4}" fill="#f8f8f8" stroke="#999"/>"##
    );
    let r_px = report.trajectory.reach_radius * PX_PER_M;
    for (i, &(x, y)) in report.trajectory.waypoints.iter().enumerate() {
        let (u, v) = map(x, y);
        let _ = writeln!(
            s,
            r##"<circle class="reach" cx="{u:.4}" cy="{v:.4}" r="{r_px:.4}" fill="none" stroke="#7aa"/>"##
        );
        let _ = writeln!(
            s,
            r##"<circle class="waypoint" cx="{u:.4}" cy="{v:.4}" r="3" fill="#066"><title>{i}</title></circle>"##
        );
    }
    let mut points = String::new();
    for p in &report.trace {
        let (u, v) = map(p.x, p.y);
        let _ = write!(points, "{u:.4},{v:.4} ");
    }
    let _ = writeln!(
        s,
        r##"<polyline class="path" points="{}" fill="none" stroke="#c33" stroke-width="2"/>"##,
        points.trim_end()
    );
    for iv in &report.interventions {
        let (u, v) = map(iv.x, iv.y);
        let _ = writeln!(
            s,
            r##"<circle class="intervention" cx="{u:.4}" cy="{v:.4}" r="6" fill="none" stroke="#000" stroke-width="2"/>"##
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<trajectory>_<checkpoint>.csv` and `.svg` into `dir` and appends a
/// line to `validation_summary.csv`.
pub fn emit_report(
    report: &ValidationReport,
    dir: &Path,
    checkpoint: &str,
    platform: (f64, f64),
) -> Result<(PathBuf, PathBuf), ValidationError> {
    if report.trace.is_empty() {
        return Err(ValidationError::EmptyTrace);
    }
    std::fs::create_dir_all(dir)?;
    let stem = format!("{}_{}", report.trajectory.name, checkpoint);
    let csv = dir.join(format!("{stem}.csv"));
    let svg = dir.join(format!("{stem}.svg"));
    std::fs::write(&csv, trace_csv(report))?;
    std::fs::write(&svg, render_svg(report, platform.0, platform.1))?;

    let summary = dir.join(SUMMARY_FILE);
    let fresh = !summary.exists();
    let mut f = OpenOptions::new().create(true).append(true).open(&summary)?;
    if fresh {
        writeln!(f, "{SUMMARY_HEADER}")?;
    }
    writeln!(
        f,
        "{},{},{},{},{},{},{}",
        report.trajectory.name,
        checkpoint,
        report.completed,
        report.waypoints_reached,
        report.interventions.len(),
        report.mean_cross_track,
        report.sim_time
    )?;
    Ok((csv, svg))
}
