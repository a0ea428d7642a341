//! Common tangents between inflated obstacles.
//!
//! Two disjoint closed convex curves admit exactly four common tangent lines:
//! two external and two internal. The tangency parameters are the zeros of a
//! slope-matching objective; because that objective is undefined for vertical
//! lines, the solver works on the equivalent cross-product system
//!
//! ```text
//! g1(gamma1, gamma2) = (p2 - p1) x t1 = 0
//! g2(gamma1, gamma2) = (p2 - p1) x t2 = 0
//! ```
//!
//! where `p_i`, `t_i` are boundary points and unit tangents. The slope
//! objective, its gradient, and its Hessian are kept as verification
//! certificates for converged roots.

use crate::geometry::{InflatedObstacle, PieceKind};
use crate::vec2::Vec2;
use thiserror::Error;

/// Target threshold on the unit-chord cross residuals; iterations stop here.
const RESIDUAL_TARGET: f64 = 5e-15;
/// Residual below which a stalled iterate still counts as converged.
const RESIDUAL_TOL: f64 = 1e-12;
/// Verified tangency must keep cross residuals below this.
const VERIFY_TOL: f64 = 1e-9;
/// Two roots are the same tangent when both anchors agree to this arc length.
const DEDUP_TOL: f64 = 1e-7;
/// Interior penetration below inflation radius that counts as a collision.
const COLLISION_SLACK: f64 = 1e-9;

const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TangentError {
    #[error("vertical-slope: chord or tangent slope is undefined at this configuration")]
    VerticalSlope,
    #[error("degenerate chord: boundary points coincide")]
    DegenerateChord,
    #[error("overlapping-obstacles: inflated closures intersect")]
    OverlappingObstacles,
    #[error("solver-failure: found {found} of {expected} tangents after {seeds} seeds")]
    SolverFailure {
        found: usize,
        expected: usize,
        seeds: usize,
    },
    #[error("point-inside-obstacle: query point is not strictly outside")]
    PointInsideObstacle,
}

/// A converged tangency with its certificate values.
#[derive(Debug, Clone, Copy)]
pub struct TangencyPair {
    pub gamma1: f64,
    pub gamma2: f64,
    pub p1: Vec2,
    pub p2: Vec2,
    /// Slope objective evaluated at the root (rotated frame when needed).
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TangentKind {
    External,
    Internal,
    Terminal,
}

/// One common tangent between two obstacles.
#[derive(Debug, Clone, Copy)]
pub struct CommonTangent {
    pub pair: TangencyPair,
    pub kind: TangentKind,
    pub length: f64,
}

/// Tangent from a free point to an obstacle boundary.
#[derive(Debug, Clone, Copy)]
pub struct PointTangent {
    pub gamma: f64,
    pub point: Vec2,
    pub length: f64,
}

struct SlopeTerms {
    m: f64,
    m1: f64,
    m2: f64,
    mg1: f64,
    mg2: f64,
    m1p: f64,
    m2p: f64,
    m1pp: f64,
    m2pp: f64,
    dx: f64,
    x1p: f64,
    x2p: f64,
    x1pp: f64,
    x2pp: f64,
    y1pp: f64,
    y2pp: f64,
}

fn slope_terms(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
    rotation: f64,
) -> Result<SlopeTerms, TangentError> {
    let (p1, d11, d12, d13) = o1.boundary_derivatives(gamma1);
    let (p2, d21, d22, d23) = o2.boundary_derivatives(gamma2);
    let rot = |v: Vec2| if rotation == 0.0 { v } else { v.rotated(rotation) };
    let (p1, d11, d12, d13) = (rot(p1), rot(d11), rot(d12), rot(d13));
    let (p2, d21, d22, d23) = (rot(p2), rot(d21), rot(d22), rot(d23));

    if p1.distance(p2) < 1e-12 {
        return Err(TangentError::DegenerateChord);
    }
    let dx = p2.x - p1.x;
    let scale = 1.0 + p1.x.abs().max(p2.x.abs());
    if dx.abs() < 1e-12 * scale || d11.x.abs() < 1e-12 || d21.x.abs() < 1e-12 {
        return Err(TangentError::VerticalSlope);
    }

    let m = (p2.y - p1.y) / dx;
    let m1 = d11.y / d11.x;
    let m2 = d21.y / d21.x;
    let mg1 = (-d11.y + m * d11.x) / dx;
    let mg2 = (d21.y - m * d21.x) / dx;
    let m1p = (d12.y * d11.x - d11.y * d12.x) / (d11.x * d11.x);
    let m2p = (d22.y * d21.x - d21.y * d22.x) / (d21.x * d21.x);
    let m1pp = (d13.y * d11.x - d11.y * d13.x) / (d11.x * d11.x)
        - 2.0 * d12.x * (d12.y * d11.x - d11.y * d12.x) / (d11.x * d11.x * d11.x);
    let m2pp = (d23.y * d21.x - d21.y * d23.x) / (d21.x * d21.x)
        - 2.0 * d22.x * (d22.y * d21.x - d21.y * d22.x) / (d21.x * d21.x * d21.x);

    Ok(SlopeTerms {
        m,
        m1,
        m2,
        mg1,
        mg2,
        m1p,
        m2p,
        m1pp,
        m2pp,
        dx,
        x1p: d11.x,
        x2p: d21.x,
        x1pp: d12.x,
        x2pp: d22.x,
        y1pp: d12.y,
        y2pp: d22.y,
    })
}

/// Slope-matching objective: sums of squared differences between the chord
/// slope and the two tangent slopes. Zero exactly at common tangents.
pub fn tangency_objective(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> Result<f64, TangentError> {
    let t = slope_terms(o1, o2, gamma1, gamma2, 0.0)?;
    Ok((t.m - t.m1).powi(2) + (t.m - t.m2).powi(2))
}

/// Gradient of [`tangency_objective`] with respect to the two parameters.
pub fn tangency_gradient(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> Result<(f64, f64), TangentError> {
    let t = slope_terms(o1, o2, gamma1, gamma2, 0.0)?;
    let g1 = 2.0 * ((t.m - t.m1) * (t.mg1 - t.m1p) + (t.m - t.m2) * t.mg1);
    let g2 = 2.0 * ((t.m - t.m1) * t.mg2 + (t.m - t.m2) * (t.mg2 - t.m2p));
    Ok((g1, g2))
}

/// Full Hessian of [`tangency_objective`], derived symbolically from the
/// slope definitions (validated against finite differences in the tests).
pub fn tangency_hessian(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> Result<[[f64; 2]; 2], TangentError> {
    let t = slope_terms(o1, o2, gamma1, gamma2, 0.0)?;
    let mg11 = (-t.y1pp + t.m * t.x1pp + 2.0 * t.mg1 * t.x1p) / t.dx;
    let mg22 = (t.y2pp - t.m * t.x2pp - 2.0 * t.mg2 * t.x2p) / t.dx;
    let mg12 = (t.mg2 * t.x1p - t.mg1 * t.x2p) / t.dx;

    let f11 = 2.0
        * ((t.mg1 - t.m1p).powi(2)
            + (t.m - t.m1) * (mg11 - t.m1pp)
            + t.mg1 * t.mg1
            + (t.m - t.m2) * mg11);
    let f22 = 2.0
        * ((t.mg2 - t.m2p).powi(2)
            + (t.m - t.m2) * (mg22 - t.m2pp)
            + t.mg2 * t.mg2
            + (t.m - t.m1) * mg22);
    let f12 = 2.0
        * (t.mg2 * (t.mg1 - t.m1p)
            + (t.m - t.m1) * mg12
            + (t.mg2 - t.m2p) * t.mg1
            + (t.m - t.m2) * mg12);
    Ok([[f11, f12], [f12, f22]])
}

/// Picks the frame rotation keeping the chord and both tangents farthest
/// from vertical, so slope-based certificates stay well conditioned. Slopes
/// are invariant under a half-turn, so rotations sample `[0, pi)`.
fn best_certificate_frame(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> f64 {
    let p1 = o1.boundary_point(gamma1);
    let p2 = o2.boundary_point(gamma2);
    let t1 = o1.boundary_tangent(gamma1);
    let t2 = o2.boundary_tangent(gamma2);
    let d = p2 - p1;
    let u = if d.norm() > 1e-15 { d.normalized() } else { t1 };
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 0..8 {
        let rot = k as f64 * std::f64::consts::PI / 8.0;
        let cond = t1
            .rotated(rot)
            .x
            .abs()
            .min(t2.rotated(rot).x.abs())
            .min(u.rotated(rot).x.abs());
        if cond > best.1 {
            best = (rot, cond);
        }
    }
    best.0
}

/// Gradient of the slope objective in a well-conditioned frame. The gradient
/// vanishing at a root is frame independent, which is what the certificate
/// checks.
pub fn tangency_gradient_certificate(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> Result<(f64, f64), TangentError> {
    let rot = best_certificate_frame(o1, o2, gamma1, gamma2);
    let t = slope_terms(o1, o2, gamma1, gamma2, rot)?;
    let g1 = 2.0 * ((t.m - t.m1) * (t.mg1 - t.m1p) + (t.m - t.m2) * t.mg1);
    let g2 = 2.0 * ((t.m - t.m1) * t.mg2 + (t.m - t.m2) * (t.mg2 - t.m2p));
    Ok((g1, g2))
}

/// Hessian determinant certificate `4 (dm/dgamma1)^2 (dm/dgamma2)^2`, which is
/// the closed-form value of `det(H)` at a tangency in terms of chord-slope
/// partials, evaluated in a well-conditioned frame.
pub fn hessian_determinant_certificate(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> Result<f64, TangentError> {
    let rot = best_certificate_frame(o1, o2, gamma1, gamma2);
    let t = slope_terms(o1, o2, gamma1, gamma2, rot)?;
    Ok(4.0 * t.mg1 * t.mg1 * t.mg2 * t.mg2)
}

/// Objective value in a well-conditioned frame.
fn objective_any_frame(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> f64 {
    let rot = best_certificate_frame(o1, o2, gamma1, gamma2);
    match slope_terms(o1, o2, gamma1, gamma2, rot) {
        Ok(t) => (t.m - t.m1).powi(2) + (t.m - t.m2).powi(2),
        Err(_) => f64::NAN,
    }
}

/// Cross residuals of the unit chord against both unit tangents.
fn cross_residuals(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    gamma1: f64,
    gamma2: f64,
) -> (f64, f64) {
    let p1 = o1.boundary_point(gamma1);
    let p2 = o2.boundary_point(gamma2);
    let d = p2 - p1;
    let n = d.norm();
    if n < 1e-15 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let u = d / n;
    (
        u.cross(o1.boundary_tangent(gamma1)),
        u.cross(o2.boundary_tangent(gamma2)),
    )
}

fn newton_pair(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
    seed: (f64, f64),
) -> Option<(f64, f64)> {
    let mut g1 = seed.0;
    let mut g2 = seed.1;
    let res_norm = |a: f64, b: f64| a.abs().max(b.abs());

    for _ in 0..NEWTON_MAX_ITER {
        let (r1, r2) = cross_residuals(o1, o2, g1, g2);
        if res_norm(r1, r2) < RESIDUAL_TARGET {
            return Some((o1.wrap_gamma(g1), o2.wrap_gamma(g2)));
        }

        // Raw (unnormalized) system and its Jacobian.
        let (p1, t1, k1) = o1.boundary_frame(g1);
        let (p2, t2, k2) = o2.boundary_frame(g2);
        let d = p2 - p1;
        let f1 = d.cross(t1);
        let f2 = d.cross(t2);
        let j11 = d.cross(k1);
        let j12 = t2.cross(t1);
        let j21 = -t1.cross(t2);
        let j22 = d.cross(k2);
        let det = j11 * j22 - j12 * j21;
        let scale = (j11.abs() + j12.abs()) * (j21.abs() + j22.abs());

        let (mut dx1, mut dx2);
        if det.abs() > 1e-14 * scale.max(1e-30) {
            dx1 = (f1 * j22 - f2 * j12) / det;
            dx2 = (f2 * j11 - f1 * j21) / det;
        } else {
            // Levenberg step for (near-)singular Jacobians, e.g. tangents
            // collinear with flat edges.
            let mu = 1e-9 * (1.0 + scale);
            let a11 = j11 * j11 + j21 * j21 + mu;
            let a12 = j11 * j12 + j21 * j22;
            let a22 = j12 * j12 + j22 * j22 + mu;
            let b1 = j11 * f1 + j21 * f2;
            let b2 = j12 * f1 + j22 * f2;
            let adet = a11 * a22 - a12 * a12;
            if adet.abs() < 1e-300 {
                return None;
            }
            dx1 = (b1 * a22 - b2 * a12) / adet;
            dx2 = (b2 * a11 - b1 * a12) / adet;
        }

        // Keep steps below a quarter perimeter so the iterate cannot jump
        // to an unrelated basin across the wrap.
        let cap1 = 0.25 * o1.perimeter();
        let cap2 = 0.25 * o2.perimeter();
        if dx1.abs() > cap1 {
            dx1 = dx1.signum() * cap1;
        }
        if dx2.abs() > cap2 {
            dx2 = dx2.signum() * cap2;
        }

        let current = res_norm(r1, r2);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let c1 = o1.wrap_gamma(g1 - alpha * dx1);
            let c2 = o2.wrap_gamma(g2 - alpha * dx2);
            let (n1, n2) = cross_residuals(o1, o2, c1, c2);
            if res_norm(n1, n2) < current {
                g1 = c1;
                g2 = c2;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let (r1, r2) = cross_residuals(o1, o2, g1, g2);
    if res_norm(r1, r2) < RESIDUAL_TOL {
        Some((o1.wrap_gamma(g1), o2.wrap_gamma(g2)))
    } else {
        None
    }
}

/// Canonicalizes a converged anchor. Anchors inside a flat edge move to the
/// edge endpoint nearer the other contact, and when the tangent line runs
/// along a boundary edge the anchor slides across it toward `toward`, so an
/// edge-collinear family of roots collapses to one representative pair.
fn canonicalize_anchor(obs: &InflatedObstacle, gamma: f64, toward: Vec2) -> f64 {
    let mut g = obs.wrap_gamma(gamma);
    for _ in 0..obs.pieces().len() {
        let p = obs.boundary_point(g);
        let chord_len = toward.distance(p);
        if chord_len < 1e-12 {
            break;
        }
        let (idx, local) = obs.piece_at(g);
        let piece = &obs.pieces()[idx];
        if let PieceKind::Segment { start, end } = piece.kind {
            if local > 1e-9 && piece.length - local > 1e-9 {
                // Interior of a flat edge: the whole edge lies on the
                // tangent line; pick the end nearer the other contact.
                let g_start = breakpoint(obs, idx);
                g = obs.wrap_gamma(if toward.distance(start) <= toward.distance(end) {
                    g_start
                } else {
                    g_start + piece.length
                });
                continue;
            }
        }
        // At a piece junction: cross an adjacent edge that lies on the
        // tangent line when doing so shortens the chord. The anchor may sit
        // numerically at either side of the junction, so identify the pieces
        // ahead of and behind the junction point in both cases.
        let n = obs.pieces().len();
        let (junction, fwd, back) = if local < 1e-9 {
            (g - local, idx, (idx + n - 1) % n)
        } else if piece.length - local < 1e-9 {
            (g + (piece.length - local), (idx + 1) % n, idx)
        } else {
            break;
        };
        let mut moved = false;
        let line_tol = 1e-9 * (1.0 + chord_len);
        if let PieceKind::Segment { end, .. } = obs.pieces()[fwd].kind {
            if point_line_distance(end, p, toward) < line_tol
                && toward.distance(end) + 1e-12 < chord_len
            {
                g = obs.wrap_gamma(junction + obs.pieces()[fwd].length);
                moved = true;
            }
        }
        if !moved {
            if let PieceKind::Segment { start, .. } = obs.pieces()[back].kind {
                if point_line_distance(start, p, toward) < line_tol
                    && toward.distance(start) + 1e-12 < chord_len
                {
                    g = obs.wrap_gamma(junction - obs.pieces()[back].length);
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    g
}

fn point_line_distance(q: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len < 1e-15 {
        return q.distance(a);
    }
    ((q - a).cross(d) / len).abs()
}

fn breakpoint(obs: &InflatedObstacle, piece_idx: usize) -> f64 {
    obs.breakpoints()[piece_idx]
}

fn arc_seeds(obs: &InflatedObstacle, per_arc: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for (lo, hi) in obs.arc_intervals() {
        for k in 0..per_arc {
            let t = (k as f64 + 1.0) / (per_arc as f64 + 1.0);
            out.push(lo + t * (hi - lo));
        }
    }
    out
}

struct ArcPieceInfo {
    center: Vec2,
    radius: f64,
    start_angle: f64,
    end_angle: f64,
    gamma_lo: f64,
}

fn arc_piece_infos(obs: &InflatedObstacle) -> Vec<ArcPieceInfo> {
    let intervals = obs.arc_intervals();
    obs.pieces()
        .iter()
        .filter_map(|p| match p.kind {
            PieceKind::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => Some((center, radius, start_angle, end_angle)),
            PieceKind::Segment { .. } => None,
        })
        .zip(intervals)
        .map(
            |((center, radius, start_angle, end_angle), (gamma_lo, _))| ArcPieceInfo {
                center,
                radius,
                start_angle,
                end_angle,
                gamma_lo,
            },
        )
        .collect()
}

impl ArcPieceInfo {
    /// Boundary parameter of the point with radial angle `phi`, when that
    /// angle falls inside this arc's closed angular range.
    fn gamma_for_angle(&self, phi: f64) -> Option<f64> {
        let width = self.end_angle - self.start_angle;
        let turn = (phi - self.start_angle).rem_euclid(std::f64::consts::TAU);
        let tol = 1e-9;
        if turn <= width + tol {
            Some(self.gamma_lo + turn.min(width) * self.radius)
        } else if turn >= std::f64::consts::TAU - tol {
            Some(self.gamma_lo)
        } else {
            None
        }
    }
}

/// Radial angles `(phi1, phi2)` of the touch points of the four common
/// tangent lines of two disjoint circles.
fn circle_tangent_angles(c1: Vec2, r1: f64, c2: Vec2, r2: f64) -> Vec<(f64, f64)> {
    let d = c2 - c1;
    let dist = d.norm();
    if dist < 1e-12 {
        return Vec::new();
    }
    let axis = d / dist;
    let mut out = Vec::new();
    for (kappa, internal) in [((r2 - r1) / dist, false), (-(r1 + r2) / dist, true)] {
        if kappa.abs() > 1.0 {
            continue;
        }
        let beta = kappa.acos();
        for s in [1.0, -1.0] {
            let n = axis.rotated(s * beta);
            let phi1 = (-n).angle();
            let phi2 = if internal { n.angle() } else { phi1 };
            out.push((phi1, phi2));
        }
    }
    out
}

/// Exact tangency seeds from the analytic common tangents of every pair of
/// boundary arcs (each arc is a true circular arc, so a circle-circle
/// tangent whose touch angles land inside both arcs is already a root).
fn analytic_pair_seeds(o1: &InflatedObstacle, o2: &InflatedObstacle) -> Vec<(f64, f64)> {
    let arcs1 = arc_piece_infos(o1);
    let arcs2 = arc_piece_infos(o2);
    let mut out = Vec::new();
    for a1 in &arcs1 {
        for a2 in &arcs2 {
            for (phi1, phi2) in circle_tangent_angles(a1.center, a1.radius, a2.center, a2.radius) {
                if let (Some(g1), Some(g2)) = (a1.gamma_for_angle(phi1), a2.gamma_for_angle(phi2)) {
                    out.push((g1, g2));
                }
            }
        }
    }
    out
}

/// Analytic tangency seeds from a free point to every boundary arc.
fn analytic_point_seeds(q: Vec2, obs: &InflatedObstacle) -> Vec<f64> {
    let mut out = Vec::new();
    for arc in arc_piece_infos(obs) {
        let rel = q - arc.center;
        let dist = rel.norm();
        if dist <= arc.radius {
            continue;
        }
        let alpha = (arc.radius / dist).acos();
        let theta = rel.angle();
        for s in [1.0, -1.0] {
            if let Some(g) = arc.gamma_for_angle(theta + s * alpha) {
                out.push(g);
            }
        }
    }
    out
}

/// All four common tangents between two disjoint inflated obstacles.
///
/// Newton iterations are seeded on every ordered pair of boundary arcs;
/// converged roots are verified, canonicalized, and deduplicated. Returns the
/// tangents sorted externals-first, then by the first anchor parameter.
pub fn common_tangents(
    o1: &InflatedObstacle,
    o2: &InflatedObstacle,
) -> Result<Vec<CommonTangent>, TangentError> {
    if o1.closure_intersects(o2) {
        return Err(TangentError::OverlappingObstacles);
    }

    // Seed schedule: exact analytic candidates from the arc circles first,
    // then arc midpoints, then a denser sweep; converged roots accumulate.
    let mut seeds_tried = 0;
    let mut roots: Vec<(f64, f64)> = Vec::new();
    let midpoint_pairs = |per_arc: usize| -> Vec<(f64, f64)> {
        let s1 = arc_seeds(o1, per_arc);
        let s2 = arc_seeds(o2, per_arc);
        let mut out = Vec::with_capacity(s1.len() * s2.len());
        for &a in &s1 {
            for &b in &s2 {
                out.push((a, b));
            }
        }
        out
    };
    for seeds in [analytic_pair_seeds(o1, o2), midpoint_pairs(1), midpoint_pairs(3)] {
        for seed in seeds {
            seeds_tried += 1;
            if let Some((g1, g2)) = newton_pair(o1, o2, seed) {
                let g1 = canonicalize_anchor(o1, g1, o2.boundary_point(g2));
                let g2 = canonicalize_anchor(o2, g2, o1.boundary_point(g1));
                let g1 = canonicalize_anchor(o1, g1, o2.boundary_point(g2));
                let (r1, r2) = cross_residuals(o1, o2, g1, g2);
                if r1.abs().max(r2.abs()) < VERIFY_TOL {
                    roots.push((g1, g2));
                }
            }
        }
        roots.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        roots.dedup_by(|a, b| {
            o1.cyclic_gamma_distance(a.0, b.0) < DEDUP_TOL
                && o2.cyclic_gamma_distance(a.1, b.1) < DEDUP_TOL
        });
        // Wrap-around duplicates: first and last may alias after sorting.
        if roots.len() > 1 {
            let first = roots[0];
            let last = *roots.last().unwrap();
            if o1.cyclic_gamma_distance(first.0, last.0) < DEDUP_TOL
                && o2.cyclic_gamma_distance(first.1, last.1) < DEDUP_TOL
            {
                roots.pop();
            }
        }
        if roots.len() >= 4 {
            break;
        }
    }

    if roots.len() != 4 {
        return Err(TangentError::SolverFailure {
            found: roots.len(),
            expected: 4,
            seeds: seeds_tried,
        });
    }

    let mut out = Vec::with_capacity(4);
    for (g1, g2) in roots {
        let p1 = o1.boundary_point(g1);
        let p2 = o2.boundary_point(g2);
        let u = (p2 - p1).normalized();
        let s1 = u.cross(o1.centroid() - p1);
        let s2 = u.cross(o2.centroid() - p2);
        let kind = if s1 * s2 > 0.0 {
            TangentKind::External
        } else {
            TangentKind::Internal
        };
        out.push(CommonTangent {
            pair: TangencyPair {
                gamma1: g1,
                gamma2: g2,
                p1,
                p2,
                residual: objective_any_frame(o1, o2, g1, g2),
            },
            kind,
            length: p1.distance(p2),
        });
    }
    let externals = out.iter().filter(|t| t.kind == TangentKind::External).count();
    if externals != 2 {
        return Err(TangentError::SolverFailure {
            found: out.len(),
            expected: 4,
            seeds: seeds_tried,
        });
    }
    out.sort_by(|a, b| {
        (a.kind, a.pair.gamma1, a.pair.gamma2)
            .partial_cmp(&(b.kind, b.pair.gamma1, b.pair.gamma2))
            .unwrap()
    });
    Ok(out)
}

/// The two tangents from a free point to an obstacle boundary.
pub fn point_tangents(
    point: Vec2,
    obs: &InflatedObstacle,
) -> Result<[PointTangent; 2], TangentError> {
    // Closure test: points on the boundary (within float noise) count as
    // inside.
    if obs.signed_clearance(point) <= 1e-12 {
        return Err(TangentError::PointInsideObstacle);
    }

    let mut seeds_tried = 0;
    let mut roots: Vec<f64> = Vec::new();
    for seeds in [
        analytic_point_seeds(point, obs),
        arc_seeds(obs, 1),
        arc_seeds(obs, 3),
    ] {
        for seed in seeds {
            seeds_tried += 1;
            if let Some(g) = newton_point(point, obs, seed) {
                let g = canonicalize_anchor(obs, g, point);
                let r = point_cross_residual(point, obs, g);
                if r.abs() < VERIFY_TOL {
                    roots.push(g);
                }
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| obs.cyclic_gamma_distance(*a, *b) < DEDUP_TOL);
        if roots.len() > 1 {
            let (first, last) = (roots[0], *roots.last().unwrap());
            if obs.cyclic_gamma_distance(first, last) < DEDUP_TOL {
                roots.pop();
            }
        }
        if roots.len() >= 2 {
            break;
        }
    }

    if roots.len() != 2 {
        return Err(TangentError::SolverFailure {
            found: roots.len(),
            expected: 2,
            seeds: seeds_tried,
        });
    }
    let make = |gamma: f64| {
        let p = obs.boundary_point(gamma);
        PointTangent {
            gamma,
            point: p,
            length: point.distance(p),
        }
    };
    Ok([make(roots[0]), make(roots[1])])
}

fn point_cross_residual(q: Vec2, obs: &InflatedObstacle, gamma: f64) -> f64 {
    let p = obs.boundary_point(gamma);
    let d = p - q;
    let n = d.norm();
    if n < 1e-15 {
        return f64::INFINITY;
    }
    (d / n).cross(obs.boundary_tangent(gamma))
}

fn newton_point(q: Vec2, obs: &InflatedObstacle, seed: f64) -> Option<f64> {
    let mut g = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let r = point_cross_residual(q, obs, g);
        if r.abs() < RESIDUAL_TARGET {
            return Some(obs.wrap_gamma(g));
        }
        let (p, t, k) = obs.boundary_frame(g);
        let d = p - q;
        let f = d.cross(t);
        let df = d.cross(k);
        if df.abs() < 1e-300 {
            return None;
        }
        let mut step = f / df;
        let cap = 0.25 * obs.perimeter();
        if step.abs() > cap {
            step = step.signum() * cap;
        }
        let current = r.abs();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let cand = obs.wrap_gamma(g - alpha * step);
            if point_cross_residual(q, obs, cand).abs() < current {
                g = cand;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let r = point_cross_residual(q, obs, g);
    (r.abs() < RESIDUAL_TOL).then(|| obs.wrap_gamma(g))
}

/// True iff the open segment `(a, b)` penetrates the interior of any
/// inflated obstacle. Grazing a boundary does not count.
pub fn segment_collides(a: Vec2, b: Vec2, obstacles: &[InflatedObstacle]) -> bool {
    obstacles
        .iter()
        .any(|o| o.source().distance_to_segment(a, b) < o.radius() - COLLISION_SLACK)
}
