//! Convex polygons and their inflated, arc-length-parameterized boundaries.
//!
//! An obstacle starts as a strictly convex polygon. Inflating it by a radius
//! `rho` produces a closed boundary that alternates circular arcs (one per
//! vertex, radius `rho`) with straight edges (the polygon edges pushed
//! outward along their normals). The boundary is parameterized by arc length,
//! so the tangent `dY/d(gamma)` has unit norm everywhere and position,
//! heading, and curvature are cheap to evaluate at any parameter value.

use crate::vec2::{point_segment_distance, segment_segment_distance, segments_intersect, Vec2};
use thiserror::Error;

/// Relative tolerance below which consecutive edges count as collinear.
const COLLINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices after normalization, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex at vertex {0}")]
    NotConvex(usize),
    #[error("repeated vertex at index {0}")]
    RepeatedVertex(usize),
    #[error("inflation radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("polygon has (near-)zero area")]
    DegenerateArea,
}

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Builds a polygon, normalizing the input: orientation is fixed to
    /// counterclockwise and collinear or repeated consecutive vertices are
    /// merged. Rejects inputs that are not strictly convex afterwards.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let mut verts = vertices;
        if signed_area(&verts) < 0.0 {
            verts.reverse();
        }
        if signed_area(&verts).abs() < 1e-15 {
            return Err(GeometryError::DegenerateArea);
        }

        // Drop consecutive duplicates, then merge collinear vertices.
        let mut cleaned: Vec<Vec2> = Vec::with_capacity(verts.len());
        for &v in &verts {
            if cleaned.last().is_none_or(|&p| p.distance(v) > 1e-9) {
                cleaned.push(v);
            }
        }
        while cleaned.len() > 1 && cleaned[0].distance(*cleaned.last().unwrap()) <= 1e-9 {
            cleaned.pop();
        }
        let mut merged: Vec<Vec2> = Vec::with_capacity(cleaned.len());
        let n = cleaned.len();
        for i in 0..n {
            let prev = cleaned[(i + n - 1) % n];
            let cur = cleaned[i];
            let next = cleaned[(i + 1) % n];
            let a = cur - prev;
            let b = next - cur;
            let sin_turn = a.cross(b) / (a.norm() * b.norm());
            if sin_turn.abs() > COLLINEAR_TOL {
                merged.push(cur);
            }
        }
        if merged.len() < 3 {
            return Err(GeometryError::TooFewVertices(merged.len()));
        }

        let m = merged.len();
        for i in 0..m {
            for j in (i + 1)..m {
                if merged[i].distance(merged[j]) <= 1e-9 {
                    return Err(GeometryError::RepeatedVertex(j));
                }
            }
        }
        for i in 0..m {
            let a = merged[(i + 1) % m] - merged[i];
            let b = merged[(i + 2) % m] - merged[(i + 1) % m];
            if a.cross(b) <= 0.0 {
                return Err(GeometryError::NotConvex((i + 1) % m));
            }
        }
        Ok(Polygon { vertices: merged })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].distance(self.vertices[(i + 1) % n]))
            .sum()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let mut acc = Vec2::ZERO;
        let mut area2 = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let w = a.cross(b);
            acc += (a + b) * w;
            area2 += w;
        }
        acc / (3.0 * area2)
    }

    /// Closed containment test.
    pub fn contains(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= 0.0
        })
    }

    /// Distance from a point to the polygon (zero inside).
    pub fn distance_to_point(&self, p: Vec2) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from the closed segment `[a, b]` to the polygon (zero on overlap).
    pub fn distance_to_segment(&self, a: Vec2, b: Vec2) -> f64 {
        if self.contains(a) || self.contains(b) {
            return 0.0;
        }
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let c = self.vertices[i];
            let d = self.vertices[(i + 1) % n];
            if segments_intersect(a, b, c, d) {
                return 0.0;
            }
            best = best.min(segment_segment_distance(a, b, c, d));
        }
        best
    }

    /// Distance between two polygons (zero on overlap).
    pub fn distance_to_polygon(&self, other: &Polygon) -> f64 {
        let n = other.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = other.vertices[i];
            let b = other.vertices[(i + 1) % n];
            best = best.min(self.distance_to_segment(a, b));
            if best == 0.0 {
                return 0.0;
            }
        }
        // One polygon may contain the other entirely.
        if self.contains(other.vertices[0]) || other.contains(self.vertices[0]) {
            return 0.0;
        }
        best
    }
}

fn signed_area(verts: &[Vec2]) -> f64 {
    let n = verts.len();
    0.5 * (0..n)
        .map(|i| verts[i].cross(verts[(i + 1) % n]))
        .sum::<f64>()
}

/// One piece of an inflated boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    /// Circular arc around a source vertex, traversed counterclockwise from
    /// `start_angle` to `end_angle` (`end_angle > start_angle`).
    Arc {
        center: Vec2,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    Segment {
        start: Vec2,
        end: Vec2,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPiece {
    pub kind: PieceKind,
    pub length: f64,
}

/// A convex polygon inflated by a disk of radius `rho`.
///
/// Pieces alternate arc, segment, arc, segment, ... counterclockwise,
/// starting with the arc around vertex 0. The boundary parameter `gamma` is
/// arc length from that starting point and wraps modulo the perimeter.
#[derive(Debug, Clone)]
pub struct InflatedObstacle {
    source: Polygon,
    radius: f64,
    pieces: Vec<BoundaryPiece>,
    /// Cumulative arc length at piece starts; last entry is the perimeter.
    breakpoints: Vec<f64>,
    /// Boundary angle of each junction point measured at the adjacent arc center.
    junction_angles: Vec<f64>,
    centroid: Vec2,
}

/// Inflates a polygon into its offset boundary.
pub fn inflate_polygon(polygon: &Polygon, radius: f64) -> Result<InflatedObstacle, GeometryError> {
    if radius <= 0.0 || radius.is_nan() {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    let verts = polygon.vertices();
    let n = verts.len();
    let normals: Vec<Vec2> = (0..n)
        .map(|i| {
            let e = verts[(i + 1) % n] - verts[i];
            Vec2::new(e.y, -e.x).normalized()
        })
        .collect();

    let mut pieces = Vec::with_capacity(2 * n);
    let mut junction_angles = Vec::with_capacity(2 * n);
    for i in 0..n {
        let n_in = normals[(i + n - 1) % n];
        let n_out = normals[i];
        let start_angle = n_in.angle();
        let turn = n_in.cross(n_out).atan2(n_in.dot(n_out));
        debug_assert!(turn > 0.0 && turn < std::f64::consts::PI);
        pieces.push(BoundaryPiece {
            kind: PieceKind::Arc {
                center: verts[i],
                radius,
                start_angle,
                end_angle: start_angle + turn,
            },
            length: radius * turn,
        });
        junction_angles.push(start_angle);
        let start = verts[i] + n_out * radius;
        let end = verts[(i + 1) % n] + n_out * radius;
        pieces.push(BoundaryPiece {
            kind: PieceKind::Segment { start, end },
            length: start.distance(end),
        });
        junction_angles.push(start_angle + turn);
    }

    let mut breakpoints = Vec::with_capacity(pieces.len() + 1);
    let mut acc = 0.0;
    breakpoints.push(0.0);
    for p in &pieces {
        acc += p.length;
        breakpoints.push(acc);
    }

    Ok(InflatedObstacle {
        centroid: polygon.centroid(),
        source: polygon.clone(),
        radius,
        pieces,
        breakpoints,
        junction_angles,
    })
}

impl InflatedObstacle {
    pub fn source(&self) -> &Polygon {
        &self.source
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    pub fn junction_angles(&self) -> &[f64] {
        &self.junction_angles
    }

    /// Cumulative arc length at piece starts; the last entry is the
    /// perimeter.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn perimeter(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Centroid of the source polygon.
    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    pub fn wrap_gamma(&self, gamma: f64) -> f64 {
        let p = self.perimeter();
        let g = gamma.rem_euclid(p);
        if g == p {
            0.0
        } else {
            g
        }
    }

    /// Shortest cyclic distance between two parameter values.
    pub fn cyclic_gamma_distance(&self, a: f64, b: f64) -> f64 {
        let p = self.perimeter();
        let d = (self.wrap_gamma(a) - self.wrap_gamma(b)).abs();
        d.min(p - d)
    }

    /// Forward (counterclockwise) parameter distance from `a` to `b`.
    pub fn forward_gamma_distance(&self, a: f64, b: f64) -> f64 {
        (self.wrap_gamma(b) - self.wrap_gamma(a)).rem_euclid(self.perimeter())
    }

    /// Piece index holding `gamma` and the local offset into that piece.
    /// Junction values belong to the following piece.
    pub fn piece_at(&self, gamma: f64) -> (usize, f64) {
        let g = self.wrap_gamma(gamma);
        let idx = match self
            .breakpoints
            .binary_search_by(|c| c.partial_cmp(&g).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let idx = idx.min(self.pieces.len() - 1);
        (idx, g - self.breakpoints[idx])
    }

    /// Boundary position at parameter `gamma`.
    pub fn boundary_point(&self, gamma: f64) -> Vec2 {
        self.boundary_frame(gamma).0
    }

    /// Unit tangent of the boundary at `gamma` (counterclockwise sense).
    pub fn boundary_tangent(&self, gamma: f64) -> Vec2 {
        self.boundary_frame(gamma).1
    }

    /// Position, first, and second derivative with respect to arc length.
    pub fn boundary_frame(&self, gamma: f64) -> (Vec2, Vec2, Vec2) {
        let (p, d1, d2, _) = self.boundary_derivatives(gamma);
        (p, d1, d2)
    }

    /// Position and derivatives up to third order with respect to arc length.
    pub fn boundary_derivatives(&self, gamma: f64) -> (Vec2, Vec2, Vec2, Vec2) {
        let (idx, local) = self.piece_at(gamma);
        match &self.pieces[idx].kind {
            PieceKind::Arc {
                center,
                radius,
                start_angle,
                ..
            } => {
                let psi = start_angle + local / radius;
                let radial = Vec2::from_angle(psi);
                let tangent = radial.perp();
                (
                    *center + radial * *radius,
                    tangent,
                    -radial / *radius,
                    -tangent / (radius * radius),
                )
            }
            PieceKind::Segment { start, end } => {
                let dir = (*end - *start).normalized();
                (*start + dir * local, dir, Vec2::ZERO, Vec2::ZERO)
            }
        }
    }

    /// Parameter intervals `(gamma_start, gamma_end)` of the arc pieces.
    pub fn arc_intervals(&self) -> Vec<(f64, f64)> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p.kind, PieceKind::Arc { .. }))
            .map(|(i, _)| (self.breakpoints[i], self.breakpoints[i + 1]))
            .collect()
    }

    /// Minimum distance from the source centroid to the inflated boundary.
    pub fn min_inradius(&self) -> f64 {
        let c = self.centroid;
        self.pieces
            .iter()
            .map(|p| match &p.kind {
                PieceKind::Segment { start, end } => point_segment_distance(c, *start, *end),
                PieceKind::Arc {
                    center,
                    radius,
                    start_angle,
                    end_angle,
                } => {
                    let rel = c - *center;
                    let phi = rel.angle();
                    let turn = (phi - start_angle).rem_euclid(std::f64::consts::TAU);
                    if turn <= end_angle - start_angle {
                        (rel.norm() - radius).abs()
                    } else {
                        let a = *center + Vec2::from_angle(*start_angle) * *radius;
                        let b = *center + Vec2::from_angle(*end_angle) * *radius;
                        c.distance(a).min(c.distance(b))
                    }
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed containment: true on the boundary as well as inside.
    pub fn contains(&self, p: Vec2) -> bool {
        self.signed_clearance(p) <= 0.0
    }

    /// Distance from a point to the inflated boundary, negative inside.
    pub fn signed_clearance(&self, p: Vec2) -> f64 {
        if self.source.contains(p) {
            // Depth inside the source polygon plus the inflation ring.
            let n = self.source.vertices().len();
            let depth = (0..n)
                .map(|i| {
                    point_segment_distance(
                        p,
                        self.source.vertices()[i],
                        self.source.vertices()[(i + 1) % n],
                    )
                })
                .fold(f64::INFINITY, f64::min);
            -(depth + self.radius)
        } else {
            self.source.distance_to_point(p) - self.radius
        }
    }

    /// Two inflated obstacles have intersecting closures iff the source
    /// polygons come closer than the sum of their inflation radii.
    pub fn closure_intersects(&self, other: &InflatedObstacle) -> bool {
        self.source.distance_to_polygon(&other.source) <= self.radius + other.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    pub(crate) fn unit_square() -> Polygon {
        Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn regular_polygon(n: usize, r: f64, phase: f64) -> Polygon {
        Polygon::new(
            (0..n)
                .map(|i| Vec2::from_angle(phase + TAU * i as f64 / n as f64) * r)
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn square_inflation_has_quarter_arcs_and_unit_segments() {
        let obs = inflate_polygon(&unit_square(), 0.5).unwrap();
        assert_eq!(obs.pieces().len(), 8);
        for (i, piece) in obs.pieces().iter().enumerate() {
            if i % 2 == 0 {
                assert_relative_eq!(piece.length, 0.5 * FRAC_PI_2, epsilon = 1e-12);
            } else {
                assert_relative_eq!(piece.length, 1.0, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(obs.perimeter(), 4.0 + PI, epsilon = 1e-12);
    }

    #[test]
    fn hexagon_inflation_perimeter() {
        let hex = regular_polygon(6, 1.0, 0.0);
        let side = hex.vertices()[0].distance(hex.vertices()[1]);
        assert_relative_eq!(side, 1.0, epsilon = 1e-12);
        let obs = inflate_polygon(&hex, 0.2).unwrap();
        for (i, piece) in obs.pieces().iter().enumerate() {
            if i % 2 == 0 {
                assert_relative_eq!(piece.length, 0.2 * PI / 3.0, epsilon = 1e-12);
            } else {
                assert_relative_eq!(piece.length, 1.0, epsilon = 1e-9);
            }
        }
        assert_relative_eq!(obs.perimeter(), 6.0 + 0.4 * PI, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_polygons_rejected() {
        let p = Vec2::new(1.0, 2.0);
        assert!(Polygon::new(vec![p]).is_err());
        assert!(Polygon::new(vec![p, p, p]).is_err());
        // Collinear points collapse below three vertices.
        assert!(Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0)
        ])
        .is_err());
    }

    #[test]
    fn collinear_vertices_are_merged() {
        let p = Polygon::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = Polygon::new(vec![
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(signed_area(p.vertices()) > 0.0);
    }

    #[test]
    fn boundary_point_examples() {
        let obs = inflate_polygon(&unit_square(), 0.5).unwrap();
        // Start of the arc around vertex 0: its incoming edge normal is (-1, 0).
        assert_relative_eq!(obs.boundary_point(0.0).x, -0.5, epsilon = 1e-12);
        assert_relative_eq!(obs.boundary_point(0.0).y, 0.0, epsilon = 1e-12);
        // Periodic wrap.
        let p0 = obs.boundary_point(0.0);
        let p1 = obs.boundary_point(obs.perimeter());
        assert!(p0.distance(p1) < 1e-12);
        // Midpoint of the bottom offset segment.
        let gamma = 0.5 * FRAC_PI_2 + 0.5;
        let p = obs.boundary_point(gamma);
        assert_relative_eq!(p.x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.y, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn tangent_is_unit_and_c1_at_junctions() {
        let obs = inflate_polygon(&regular_polygon(5, 1.3, 0.7), 0.4).unwrap();
        for k in 0..obs.pieces().len() {
            let junction = obs.breakpoints[k];
            let before = obs.boundary_tangent(junction - 1e-9);
            let after = obs.boundary_tangent(junction + 1e-9);
            assert!(before.distance(after) < 1e-7);
            assert_relative_eq!(after.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn finite_difference_matches_tangent() {
        let obs = inflate_polygon(&regular_polygon(7, 2.0, 0.1), 0.6).unwrap();
        let h = 1e-6;
        for i in 0..200 {
            let gamma = obs.perimeter() * i as f64 / 200.0 + 1e-3;
            // Skip points too close to junctions where the stencil straddles pieces.
            let (idx, local) = obs.piece_at(gamma);
            if local < 2.0 * h || obs.pieces()[idx].length - local < 2.0 * h {
                continue;
            }
            let fd = (obs.boundary_point(gamma + h) - obs.boundary_point(gamma - h)) / (2.0 * h);
            assert!(fd.distance(obs.boundary_tangent(gamma)) < 1e-9);
        }
    }

    #[test]
    fn vertices_sit_at_inflation_distance() {
        let poly = regular_polygon(6, 1.0, 0.3);
        let rho = 0.25;
        let obs = inflate_polygon(&poly, rho).unwrap();
        for &v in poly.vertices() {
            let mut best = f64::INFINITY;
            for i in 0..720 {
                let gamma = obs.perimeter() * i as f64 / 720.0;
                best = best.min(v.distance(obs.boundary_point(gamma)));
            }
            assert!((best - rho).abs() < 1e-6);
        }
        // Every sampled boundary point stays at least rho from the source.
        for i in 0..720 {
            let gamma = obs.perimeter() * i as f64 / 720.0;
            let d = poly.distance_to_point(obs.boundary_point(gamma));
            assert!(d >= rho - 1e-9);
        }
    }

    #[test]
    fn min_inradius_examples() {
        let obs = inflate_polygon(&unit_square(), 0.5).unwrap();
        assert_relative_eq!(obs.min_inradius(), 1.0, epsilon = 1e-12);

        // Near-circular polygon: apothem plus inflation.
        let gon = regular_polygon(64, 1.0, 0.0);
        let obs = inflate_polygon(&gon, 0.1).unwrap();
        let sagitta = 1.0 - (PI / 64.0).cos();
        assert_relative_eq!(obs.min_inradius(), 1.1 - sagitta, epsilon = 1e-9);
    }

    #[test]
    fn min_inradius_scales_homogeneously() {
        let poly = regular_polygon(5, 1.0, 0.2);
        let scaled = Polygon::new(poly.vertices().iter().map(|&v| v * 2.0).collect()).unwrap();
        let a = inflate_polygon(&poly, 0.3).unwrap().min_inradius();
        let b = inflate_polygon(&scaled, 0.6).unwrap().min_inradius();
        assert_relative_eq!(b, 2.0 * a, epsilon = 1e-9);
    }

    #[test]
    fn perimeter_additivity() {
        let poly = regular_polygon(8, 1.7, 0.9);
        let rho = 0.35;
        let obs = inflate_polygon(&poly, rho).unwrap();
        let total: f64 = obs.pieces().iter().map(|p| p.length).sum();
        assert_relative_eq!(total, poly.perimeter() + TAU * rho, epsilon = 1e-9);
        assert_relative_eq!(obs.perimeter(), total, epsilon = 1e-12);
    }

    #[test]
    fn signed_clearance_signs() {
        let obs = inflate_polygon(&unit_square(), 0.5).unwrap();
        assert!(obs.signed_clearance(Vec2::new(0.5, 0.5)) < 0.0);
        assert!(obs.signed_clearance(Vec2::new(3.0, 0.5)) > 0.0);
        assert!(obs.signed_clearance(Vec2::new(0.5, -0.5)).abs() < 1e-12);
        assert!(obs.contains(Vec2::new(0.5, -0.5)));
    }
}
