use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use super::ValidationError;
use crate::angle::wrap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CourseKind {
    Line,
    Circle,
    Eight,
}

impl FromStr for CourseKind {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "line" => Ok(Self::Line),
            "circle" => Ok(Self::Circle),
            "eight" | "figure_eight" | "figure-eight" => Ok(Self::Eight),
            other => Err(ValidationError::UnknownCourse(other.to_string())),
        }
    }
}

impl CourseKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Line => "line",
            Self::Circle => "circle",
            Self::Eight => "eight",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub name: String,
    pub waypoints: Vec<(f64, f64)>,
    pub reach_radius: f64,
    /// Seconds of sim time between heading refreshes.
    pub heading_period: f64,
    /// Closed courses finish back at the first waypoint.
    pub closed: bool,
}

impl Trajectory {
    pub const DEFAULT_REACH: f64 = 0.15;
    pub const DEFAULT_PERIOD: f64 = 5.0;

    pub fn new(name: &str, waypoints: Vec<(f64, f64)>, closed: bool) -> Result<Self, ValidationError> {
        let t = Self {
            name: name.to_string(),
            waypoints,
            reach_radius: Self::DEFAULT_REACH,
            heading_period: Self::DEFAULT_PERIOD,
            closed,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let bad = |m: &str| Err(ValidationError::Trajectory(m.to_string()));
        if self.waypoints.len() < 2 {
            return bad("at least two waypoints are required");
        }
        if self.waypoints.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return bad("waypoints must be finite");
        }
        if self.waypoints.windows(2).any(|w| w[0] == w[1]) {
            return bad("consecutive waypoints must differ");
        }
        if !(self.reach_radius > 0.0) {
            return bad("reach radius must be positive");
        }
        if !(self.heading_period > 0.0) {
            return bad("heading period must be positive");
        }
        Ok(())
    }

    /// The points to visit in order. The robot starts on the first waypoint,
    /// so it is only a target again at the end of a closed course.
    pub fn targets(&self) -> Vec<(f64, f64)> {
        let mut t = self.waypoints[1..].to_vec();
        if self.closed {
            t.push(self.waypoints[0]);
        }
        t
    }

    pub fn total_targets(&self) -> usize {
        self.waypoints.len() - 1 + usize::from(self.closed)
    }

    /// Start pose: first waypoint, facing the second.
    pub fn start(&self) -> (f64, f64, f64) {
        let (x0, y0) = self.waypoints[0];
        let (x1, y1) = self.waypoints[1];
        (x0, y0, (y1 - y0).atan2(x1 - x0))
    }

    /// Axis-aligned bounding box `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.waypoints.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
        )
    }
}

/// Builds a course.
///
/// `scale` is the length `D` of a line or the radius of a circle or of each
/// loop of the eight; `points` is the waypoint count of a circle or of each
/// loop of the eight (ignored for lines).
pub fn build_trajectory(kind: CourseKind, scale: f64, points: usize) -> Result<Trajectory, ValidationError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(ValidationError::Trajectory("scale must be positive".into()));
    }
    match kind {
        CourseKind::Line => Trajectory::new("line", vec![(0.0, 0.0), (scale, 0.0)], false),
        CourseKind::Circle => {
            if points < 3 {
                return Err(ValidationError::Trajectory("a circle needs at least 3 points".into()));
            }
            let wps = (0..points)
                .map(|k| {
                    let a = TAU * k as f64 / points as f64;
                    (scale * a.cos(), scale * a.sin())
                })
                .collect();
            Trajectory::new("circle", wps, true)
        }
        CourseKind::Eight => {
            if points < 3 {
                return Err(ValidationError::Trajectory("each loop needs at least 3 points".into()));
            }
            // Right loop counter-clockwise from the crossing, then left loop
            // clockwise, so the course turns both ways.
            let step = TAU / points as f64;
            let mut wps = Vec::with_capacity(2 * points);
            for k in 0..points {
                let a = PI + step * k as f64;
                wps.push((scale + scale * a.cos(), scale * a.sin()));
            }
            for k in 0..points {
                let a = -step * k as f64;
                wps.push((-scale + scale * a.cos(), scale * a.sin()));
            }
            // the crossing point, computed once so both visits are identical
            wps[0] = (0.0, 0.0);
            wps[points] = (0.0, 0.0);
            for p in &mut wps {
                if p.1.abs() < 1e-15 {
                    p.1 = 0.0;
                }
            }
            Trajectory::new("eight", wps, true)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeadingCommand {
    Steer(f64),
    /// Position coincides with the waypoint; move on to the next one.
    Advance,
}

/// `θ = atan2(w_y − p_y, w_x − p_x)` wrapped to `(−π, π]`.
pub fn heading_controller(position: (f64, f64), waypoint: (f64, f64)) -> HeadingCommand {
    let dx = waypoint.0 - position.0;
    let dy = waypoint.1 - position.1;
    if dx == 0.0 && dy == 0.0 {
        return HeadingCommand::Advance;
    }
    HeadingCommand::Steer(wrap(dy.atan2(dx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn line_definition() {
        let t = build_trajectory(CourseKind::Line, 2.0, 0).unwrap();
        assert_eq!(t.waypoints, vec![(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(t.total_targets(), 1);
    }

    #[test]
    fn circle_points_on_radius() {
        let t = build_trajectory(CourseKind::Circle, 1.0, 8).unwrap();
        assert_eq!(t.waypoints[0], (1.0, 0.0));
        for (x, y) in &t.waypoints {
            assert!((x.hypot(*y) - 1.0).abs() < 1e-12);
        }
        assert_eq!(t.total_targets(), 8);
    }

    #[test]
    fn eight_has_sixteen_distinct_consecutive_points() {
        let t = build_trajectory(CourseKind::Eight, 0.75, 8).unwrap();
        assert_eq!(t.waypoints.len(), 16);
        let (x0, y0, x1, y1) = t.bounds();
        assert!((x0 + 1.5).abs() < 1e-12 && (x1 - 1.5).abs() < 1e-12);
        assert!((y0 + 0.75).abs() < 1e-12 && (y1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(build_trajectory(CourseKind::Line, 0.0, 0).is_err());
        assert!(build_trajectory(CourseKind::Circle, 1.0, 2).is_err());
        assert!("spiral".parse::<CourseKind>().is_err());
        assert!(Trajectory::new("x", vec![(0.0, 0.0), (0.0, 0.0)], false).is_err());
    }

    #[test]
    fn controller_axis_and_diagonal() {
        assert_eq!(heading_controller((0.0, 0.0), (0.0, 1.0)), HeadingCommand::Steer(FRAC_PI_2));
        match heading_controller((1.0, 1.0), (0.0, 0.0)) {
            HeadingCommand::Steer(t) => assert!((t + 3.0 * PI / 4.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(heading_controller((0.5, 0.5), (0.5, 0.5)), HeadingCommand::Advance);
        assert_eq!(heading_controller((0.0, 0.0), (-1.0, -0.0)), HeadingCommand::Steer(PI));
    }
}
