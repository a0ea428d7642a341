//! Static SVG rendering of a planning result: obstacles in grey, the
//! roadmap in light strokes, the chosen path solid, plus a speed-versus-
//! distance inset. Output is deterministic.

use crate::geometry::{InflatedObstacle, PieceKind};
use crate::roadmap::{EdgeGeometry, PathSegment, PlannedPath, Roadmap};
use crate::scenario::Scenario;
use crate::vec2::Vec2;
use crate::velocity::TrajectorySample;
use std::fmt::Write;

fn f(x: f64) -> String {
    format!("{x:.6}")
}

struct Frame {
    min: Vec2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn map(&self, p: Vec2) -> (String, String) {
        let x = (p.x - self.min.x) * self.scale + 20.0;
        let y = self.height - ((p.y - self.min.y) * self.scale + 20.0);
        (f(x), f(y))
    }
}

/// Renders the scene to an SVG document string.
pub fn render_scene(
    scenario: &Scenario,
    inflated: &[InflatedObstacle],
    roadmap: &Roadmap,
    path: &PlannedPath,
    samples: &[TrajectorySample],
) -> String {
    // World bounds.
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |p: Vec2| {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    };
    grow(scenario.start);
    grow(scenario.goal);
    for o in inflated {
        for i in 0..128 {
            grow(o.boundary_point(o.perimeter() * i as f64 / 128.0));
        }
    }
    if !min.is_finite() || !max.is_finite() {
        min = Vec2::new(-1.0, -1.0);
        max = Vec2::new(1.0, 1.0);
    }
    let span = (max.x - min.x).max(max.y - min.y).max(1e-6);
    let scale = 760.0 / span;
    let width = (max.x - min.x) * scale + 40.0;
    let height = (max.y - min.y) * scale + 40.0;
    let frame = Frame { min, scale, height };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        f(width),
        f(height),
        f(width),
        f(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // Source polygons dark grey, inflated boundaries light grey.
    for (poly, obs) in scenario.obstacles.iter().zip(inflated) {
        let mut d = String::new();
        for (i, v) in poly.vertices().iter().enumerate() {
            let (x, y) = frame.map(*v);
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, x, y);
        }
        d.push('Z');
        let _ = writeln!(out, r##"<path d="{d}" fill="#9a9a9a" stroke="none"/>"##);
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="#d9d9d9" fill-opacity="0.45" stroke="#8a8a8a" stroke-width="1" stroke-dasharray="4 3"/>"##,
            boundary_path(obs, &frame)
        );
    }

    // Roadmap edges, light.
    for e in roadmap.edges() {
        match e.geometry {
            EdgeGeometry::Straight { from, to } => {
                let (x1, y1) = frame.map(from);
                let (x2, y2) = frame.map(to);
                let _ = writeln!(
                    out,
                    r##"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#b8cfe6" stroke-width="0.7"/>"##
                );
            }
            EdgeGeometry::Boundary { .. } => {} // boundary spans coincide with obstacle outlines
        }
    }

    // Planned path.
    if !path.segments().is_empty() {
        let mut d = String::new();
        let (x0, y0) = frame.map(path.path_point(0.0).unwrap());
        let _ = write!(d, "M{} {}", x0, y0);
        for seg in path.segments() {
            match seg {
                PathSegment::Straight { to, .. } => {
                    let (x, y) = frame.map(*to);
                    let _ = write!(d, " L{} {}", x, y);
                }
                PathSegment::Arc {
                    center,
                    radius,
                    angle_from,
                    angle_to,
                    ccw,
                    ..
                } => {
                    let end = *center + Vec2::from_angle(*angle_to) * *radius;
                    let (x, y) = frame.map(end);
                    let r = f(radius * frame.scale);
                    let large = if (angle_to - angle_from).abs() > std::f64::consts::PI {
                        1
                    } else {
                        0
                    };
                    // The y axis is flipped in screen space, so sweep inverts.
                    let sweep = if *ccw { 0 } else { 1 };
                    let _ = write!(d, " A{r} {r} 0 {large} {sweep} {x} {y}");
                }
            }
        }
        let _ = writeln!(
            out,
            r##"<path d="{d}" fill="none" stroke="#c0392b" stroke-width="2.2"/>"##
        );
    }

    // Terminals.
    for (p, color) in [(scenario.start, "#1a7a2e"), (scenario.goal, "#1f4ea3")] {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="4" fill="{color}"/>"#);
    }

    // Speed-versus-distance inset, lower left.
    if samples.len() > 1 && path.total_length() > 0.0 {
        let iw = 220.0;
        let ih = 120.0;
        let ix = 30.0;
        let iy = height - ih - 30.0;
        let vmax = samples
            .iter()
            .map(|s| s.velocity.norm())
            .fold(0.0, f64::max)
            .max(1e-9);
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="white" fill-opacity="0.85" stroke="#666" stroke-width="0.8"/>"##,
            f(ix),
            f(iy),
            f(iw),
            f(ih)
        );
        let stride = (samples.len() / 400).max(1);
        let mut pts = String::new();
        for s in samples.iter().step_by(stride).chain(samples.last()) {
            let px = ix + (s.gamma / path.total_length()) * (iw - 16.0) + 8.0;
            let py = iy + ih - 10.0 - (s.velocity.norm() / vmax) * (ih - 24.0);
            let _ = write!(pts, "{},{} ", f(px), f(py));
        }
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#1f4ea3" stroke-width="1.4"/>"##,
            pts.trim_end()
        );
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-family="monospace" font-size="10" fill="#333">speed vs distance (peak {} m/s)</text>"##,
            f(ix + 6.0),
            f(iy + 14.0),
            f(vmax)
        );
    }

    out.push_str("</svg>\n");
    out
}

fn boundary_path(obs: &InflatedObstacle, frame: &Frame) -> String {
    let mut d = String::new();
    let start = obs.boundary_point(0.0);
    let (x0, y0) = frame.map(start);
    let _ = write!(d, "M{} {}", x0, y0);
    for piece in obs.pieces() {
        match &piece.kind {
            PieceKind::Segment { end, .. } => {
                let (x, y) = frame.map(*end);
                let _ = write!(d, " L{} {}", x, y);
            }
            PieceKind::Arc {
                center,
                radius,
                end_angle,
                ..
            } => {
                let end = *center + Vec2::from_angle(*end_angle) * *radius;
                let (x, y) = frame.map(end);
                let r = f(radius * frame.scale);
                let _ = write!(d, " A{r} {r} 0 0 0 {x} {y}");
            }
        }
    }
    d.push('Z');
    d
}
