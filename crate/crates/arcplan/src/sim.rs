//! Independent numerical ground truth.
//!
//! Everything here integrates the governing equations directly with a fixed
//! step classical Runge-Kutta scheme, on purpose sharing no code with the
//! closed-form machinery in [`crate::velocity`]. Caps are recovered by
//! bisection on the acceleration laws rather than from their algebraic
//! solutions, so the two routes stay independent down to the constants.

use crate::roadmap::PlannedPath;
use crate::vec2::Vec2;
use crate::velocity::{DynParams, TrajectorySample};
use crate::geometry::InflatedObstacle;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("control-bound-violation at t={t}: |u|={norm} exceeds {limit}")]
    ControlBoundViolation { t: f64, norm: f64, limit: f64 },
    #[error("cap-exceeded: speed {v} left the feasible band [{lo}, {hi}]")]
    CapExceeded { v: f64, lo: f64, hi: f64 },
    #[error("integration stalled at distance {gamma} with speed {v}")]
    Stalled { gamma: f64, v: f64 },
    #[error("target speed {target} is not reachable within distance {max_distance}")]
    TargetUnreachable { target: f64, max_distance: f64 },
    #[error("terminal speeds are infeasible for this profile: {0}")]
    InfeasibleProfile(String),
}

/// Planar state of the simulated agent.
#[derive(Debug, Clone, Copy)]
pub struct SimState {
    pub t: f64,
    pub r: Vec2,
    pub v: Vec2,
}

/// One integration sample with the control that produced it.
#[derive(Debug, Clone, Copy)]
pub struct SimSample {
    pub state: SimState,
    pub u: Vec2,
}

/// Integrates the full planar dynamics `dr = v, dv = u - c_d |v| v` under a
/// caller-supplied control law. The control is audited against the
/// acceleration bound at every sample.
pub fn integrate_2d<F>(
    control: F,
    initial: SimState,
    dt: f64,
    t_end: f64,
    params: &DynParams,
) -> Result<Vec<SimSample>, SimError>
where
    F: Fn(f64, &SimState) -> Vec2,
{
    assert!(dt > 0.0, "dt must be positive");
    let limit = params.u_max * (1.0 + 1e-9);
    let deriv = |t: f64, r: Vec2, v: Vec2| -> (Vec2, Vec2) {
        let u = control(t, &SimState { t, r, v });
        (v, u - v * (params.c_d * v.norm()))
    };

    let mut out = Vec::with_capacity((t_end / dt).ceil() as usize + 2);
    let mut s = initial;
    loop {
        let u = control(s.t, &s);
        if u.norm() > limit {
            return Err(SimError::ControlBoundViolation {
                t: s.t,
                norm: u.norm(),
                limit: params.u_max,
            });
        }
        out.push(SimSample { state: s, u });
        if s.t >= t_end - 1e-15 {
            break;
        }
        let h = dt.min(t_end - s.t);
        let (k1r, k1v) = deriv(s.t, s.r, s.v);
        let (k2r, k2v) = deriv(s.t + 0.5 * h, s.r + k1r * (0.5 * h), s.v + k1v * (0.5 * h));
        let (k3r, k3v) = deriv(s.t + 0.5 * h, s.r + k2r * (0.5 * h), s.v + k2v * (0.5 * h));
        let (k4r, k4v) = deriv(s.t + h, s.r + k3r * h, s.v + k3v * h);
        s = SimState {
            t: s.t + h,
            r: s.r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0),
            v: s.v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0),
        };
    }
    Ok(out)
}

/// Which acceleration envelope to integrate along a path segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentLawKind {
    Straight,
    Arc { rho: f64 },
}

/// Exact envelope keeps the full acceleration-norm constraint; the
/// approximate one is the conservative polynomial envelope used by the
/// closed forms on arcs (identical on straights).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundModel {
    Exact,
    Approximate,
}

/// Maximum tangential acceleration at speed `v`.
pub fn accel_extreme(kind: SegmentLawKind, model: BoundModel, params: &DynParams, v: f64) -> f64 {
    let u = params.u_max;
    let c = params.c_d;
    match kind {
        SegmentLawKind::Straight => u - c * v * v,
        SegmentLawKind::Arc { rho } => match model {
            BoundModel::Exact => {
                let lat = v * v / rho;
                -c * v * v + (u * u - lat * lat).max(0.0).sqrt()
            }
            BoundModel::Approximate => {
                -c * v * v + (u * u * rho * rho - v.powi(4)) / (u * rho * rho)
            }
        },
    }
}

/// Minimum (most negative) tangential acceleration at speed `v`.
pub fn brake_extreme(kind: SegmentLawKind, model: BoundModel, params: &DynParams, v: f64) -> f64 {
    let u = params.u_max;
    let c = params.c_d;
    match kind {
        SegmentLawKind::Straight => -u - c * v * v,
        SegmentLawKind::Arc { rho } => match model {
            BoundModel::Exact => {
                let lat = v * v / rho;
                -c * v * v - (u * u - lat * lat).max(0.0).sqrt()
            }
            BoundModel::Approximate => {
                -c * v * v - (u * u * rho * rho - v.powi(4)) / (u * rho * rho)
            }
        },
    }
}

/// Speed cap of an envelope, found by bisection on `accel_extreme(v) = 0`.
pub fn speed_cap(kind: SegmentLawKind, model: BoundModel, params: &DynParams) -> f64 {
    let mut lo = 0.0;
    let mut hi = (params.u_max / params.c_d).sqrt();
    debug_assert!(accel_extreme(kind, model, params, lo) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if accel_extreme(kind, model, params, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of a path-restricted integration.
#[derive(Debug, Clone)]
pub struct PathIntegration {
    pub time: f64,
    pub distance: f64,
    pub v_final: f64,
    /// Sparse speed-versus-distance table.
    pub table: Vec<(f64, f64)>,
}

fn rk4_speed_step(accel: &impl Fn(f64) -> f64, gamma: f64, v: f64, h: f64) -> (f64, f64) {
    let f = |v: f64| -> (f64, f64) { (v, accel(v)) };
    let (k1g, k1v) = f(v);
    let (k2g, k2v) = f(v + 0.5 * h * k1v);
    let (k3g, k3v) = f(v + 0.5 * h * k2v);
    let (k4g, k4v) = f(v + h * k3v);
    (
        gamma + h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Integrates `d(gamma) = v, dv = accel(v)` until the travelled distance
/// reaches `distance`, with the final step refined by bisection.
pub fn integrate_path<F>(
    accel: F,
    v0: f64,
    distance: f64,
    dt: f64,
    band: (f64, f64),
) -> Result<PathIntegration, SimError>
where
    F: Fn(f64) -> f64,
{
    assert!(dt > 0.0);
    let mut t = 0.0;
    let mut gamma = 0.0;
    let mut v = v0;
    let mut table = vec![(0.0, v0)];
    let tol = 1e-12 * (1.0 + distance);
    let mut steps = 0usize;
    let max_steps = 400_000_000usize;

    while gamma < distance - tol {
        if v < band.0 - 1e-9 || v > band.1 + 1e-9 {
            return Err(SimError::CapExceeded {
                v,
                lo: band.0,
                hi: band.1,
            });
        }
        if v <= 1e-12 && accel(v) <= 0.0 {
            return Err(SimError::Stalled { gamma, v });
        }
        let (g_full, v_full) = rk4_speed_step(&accel, gamma, v, dt);
        if g_full < distance {
            gamma = g_full;
            v = v_full;
            t += dt;
        } else {
            // Bisect the step length to land exactly on the target distance.
            let mut lo = 0.0;
            let mut hi = dt;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let (g_mid, _) = rk4_speed_step(&accel, gamma, v, mid);
                if g_mid < distance {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-18 * dt.max(1.0) {
                    break;
                }
            }
            let h = 0.5 * (lo + hi);
            let (g_end, v_end) = rk4_speed_step(&accel, gamma, v, h);
            gamma = g_end;
            v = v_end;
            t += h;
            break;
        }
        steps += 1;
        if steps.is_multiple_of(64) {
            table.push((gamma, v));
        }
        if steps > max_steps {
            return Err(SimError::Stalled { gamma, v });
        }
    }
    table.push((gamma, v));
    Ok(PathIntegration {
        time: t,
        distance: gamma,
        v_final: v,
        table,
    })
}

/// Integrates until the speed first reaches `v_target` (which must be
/// approached monotonically under `accel`), or errors after `max_distance`.
pub fn integrate_path_until_speed<F>(
    accel: F,
    v0: f64,
    v_target: f64,
    dt: f64,
    max_distance: f64,
) -> Result<PathIntegration, SimError>
where
    F: Fn(f64) -> f64,
{
    assert!(dt > 0.0);
    let rising = v_target >= v0;
    let reached = |v: f64| {
        if rising {
            v >= v_target
        } else {
            v <= v_target
        }
    };
    if reached(v0) {
        return Ok(PathIntegration {
            time: 0.0,
            distance: 0.0,
            v_final: v0,
            table: vec![(0.0, v0)],
        });
    }
    let mut t = 0.0;
    let mut gamma = 0.0;
    let mut v = v0;
    let mut table = vec![(0.0, v0)];
    let mut steps = 0usize;
    loop {
        if gamma > max_distance {
            return Err(SimError::TargetUnreachable {
                target: v_target,
                max_distance,
            });
        }
        if v <= 1e-12 && accel(v) <= 0.0 && rising {
            return Err(SimError::Stalled { gamma, v });
        }
        let (g_full, v_full) = rk4_speed_step(&accel, gamma, v, dt);
        if !reached(v_full) {
            gamma = g_full;
            v = v_full;
            t += dt;
        } else {
            let mut lo = 0.0;
            let mut hi = dt;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let (_, v_mid) = rk4_speed_step(&accel, gamma, v, mid);
                if reached(v_mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-18 * dt.max(1.0) {
                    break;
                }
            }
            let h = 0.5 * (lo + hi);
            let (g_end, v_end) = rk4_speed_step(&accel, gamma, v, h);
            gamma = g_end;
            v = v_end;
            t += h;
            break;
        }
        steps += 1;
        if steps.is_multiple_of(64) {
            table.push((gamma, v));
        }
        if steps > 400_000_000 {
            return Err(SimError::Stalled { gamma, v });
        }
    }
    table.push((gamma, v));
    Ok(PathIntegration {
        time: t,
        distance: gamma,
        v_final: v,
        table,
    })
}

/// One path segment for the dense minimum-time solver.
#[derive(Debug, Clone, Copy)]
pub struct SegmentSpec {
    pub kind: SegmentLawKind,
    pub length: f64,
}

/// Dense double-sweep minimum-time solve along a chain of segments.
///
/// Forward and backward extreme-acceleration profiles are integrated on a
/// uniform grid (clipped at each envelope's speed cap); their pointwise
/// minimum is the optimal speed profile for this class of dynamics, and the
/// traversal time is recovered by quadrature.
pub fn numeric_min_time(
    segments: &[SegmentSpec],
    v_start: f64,
    v_end: f64,
    params: &DynParams,
    model: BoundModel,
    points_per_segment: usize,
) -> Result<f64, SimError> {
    let segs: Vec<SegmentSpec> = segments.iter().copied().filter(|s| s.length > 0.0).collect();
    if segs.is_empty() {
        if (v_start - v_end).abs() > 1e-9 {
            return Err(SimError::InfeasibleProfile(
                "zero-length path with different terminal speeds".into(),
            ));
        }
        return Ok(0.0);
    }

    // Global grid: per grid point, the cell length and segment kind.
    let n_cells: usize = segs.len() * points_per_segment;
    let mut cell_len = Vec::with_capacity(n_cells);
    let mut cell_kind = Vec::with_capacity(n_cells);
    for s in &segs {
        let h = s.length / points_per_segment as f64;
        for _ in 0..points_per_segment {
            cell_len.push(h);
            cell_kind.push(s.kind);
        }
    }
    let caps_sq: Vec<f64> = segs
        .iter()
        .map(|s| speed_cap(s.kind, model, params).powi(2))
        .collect();
    let cap_at = |i: usize| caps_sq[(i.min(n_cells - 1)) / points_per_segment];

    // Forward sweep in squared speed: ds/dgamma = 2 a(sqrt(s)).
    let rk4_s = |kind: SegmentLawKind, s: f64, h: f64, braking: bool| -> f64 {
        let f = |s: f64| {
            let v = s.max(0.0).sqrt();
            if braking {
                2.0 * brake_extreme(kind, model, params, v)
            } else {
                2.0 * accel_extreme(kind, model, params, v)
            }
        };
        let k1 = f(s);
        let k2 = f(s + 0.5 * h * k1);
        let k3 = f(s + 0.5 * h * k2);
        let k4 = f(s + h * k3);
        s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };

    let mut forward = vec![0.0; n_cells + 1];
    forward[0] = (v_start * v_start).min(cap_at(0));
    for i in 0..n_cells {
        let clipped = forward[i].min(cap_at(i));
        let next = rk4_s(cell_kind[i], clipped, cell_len[i], false);
        forward[i + 1] = next.min(cap_at(i)).min(cap_at(i + 1)).max(0.0);
    }
    let mut backward = vec![0.0; n_cells + 1];
    backward[n_cells] = (v_end * v_end).min(cap_at(n_cells));
    for i in (0..n_cells).rev() {
        let clipped = backward[i + 1].min(cap_at(i));
        let prev = rk4_s(cell_kind[i], clipped, -cell_len[i], true);
        backward[i] = prev.min(cap_at(i)).max(0.0);
    }

    let feas_tol = 1e-6 * (1.0 + v_start.max(v_end)).powi(2);
    if backward[0] + feas_tol < v_start * v_start {
        return Err(SimError::InfeasibleProfile(format!(
            "cannot brake from start speed {v_start} to end speed {v_end}"
        )));
    }
    if forward[n_cells] + feas_tol < v_end * v_end {
        return Err(SimError::InfeasibleProfile(format!(
            "cannot accelerate to end speed {v_end} from start speed {v_start}"
        )));
    }

    let mut time = 0.0;
    for i in 0..n_cells {
        let va = forward[i].min(backward[i]).max(0.0).sqrt();
        let vb = forward[i + 1].min(backward[i + 1]).max(0.0).sqrt();
        let denom = va + vb;
        if denom <= 0.0 {
            return Err(SimError::InfeasibleProfile(
                "speed profile collapses to zero inside the path".into(),
            ));
        }
        time += 2.0 * cell_len[i] / denom;
    }
    Ok(time)
}

/// Tolerances for [`audit_trajectory`]. The defaults pin the acceptance
/// thresholds used throughout the test suite.
#[derive(Debug, Clone)]
pub struct AuditTolerances {
    /// Allowed relative overshoot of the acceleration norm.
    pub accel_rel: f64,
    /// Allowed penetration (negative clearance) into inflated obstacles.
    pub clearance: f64,
    /// Arc samples may exceed the arc speed cap by this much.
    pub arc_speed: f64,
    /// Maximum distance between a sample and the intended path.
    pub path_deviation: f64,
    /// Maximum first/last sample distance from the terminals.
    pub endpoint: f64,
    /// Scale for the discrete dynamics residual; the limit is
    /// `dynamics_scale * u_max * dt^2` per unit time at the reference `dt`.
    pub dynamics_scale: f64,
    /// Reference sampling step the dynamics tolerance was calibrated at.
    pub reference_dt: f64,
}

impl Default for AuditTolerances {
    fn default() -> Self {
        AuditTolerances {
            accel_rel: 1e-6,
            clearance: 1e-9,
            arc_speed: 1e-9,
            path_deviation: 1e-6,
            endpoint: 1e-6,
            dynamics_scale: 50.0,
            reference_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuditCheck {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

/// Post-hoc audit of a sampled trajectory against scenario constraints.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub max_accel_norm: f64,
    pub min_clearance: f64,
    pub max_speed: f64,
    pub max_path_deviation: f64,
    pub final_position_error: f64,
    pub max_dynamics_residual: f64,
    pub checks: Vec<AuditCheck>,
    pub passed: bool,
    /// Set when the sampling step is coarser than the calibrated reference
    /// and the dynamics tolerance was widened accordingly.
    pub tolerance_widened: bool,
}

impl AuditReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<22} {}  value {:.6e}  limit {:.6e}\n",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.value,
                c.limit
            ));
        }
        out.push_str(&format!(
            "overall: {}{}\n",
            if self.passed { "pass" } else { "FAIL" },
            if self.tolerance_widened {
                " (dynamics tolerance widened for coarse sampling)"
            } else {
                ""
            }
        ));
        out
    }
}

/// Checks a sampled trajectory for constraint violations: acceleration norm,
/// speed bounds, obstacle clearance, terminal matching, path deviation (when
/// the intended path is provided), and discrete dynamics consistency.
pub fn audit_trajectory(
    samples: &[TrajectorySample],
    obstacles: &[InflatedObstacle],
    params: &DynParams,
    path: Option<&PlannedPath>,
    start: Vec2,
    goal: Vec2,
    tol: &AuditTolerances,
) -> AuditReport {
    let mut checks = Vec::new();
    let mut push = |name: &'static str, value: f64, limit: f64| {
        checks.push(AuditCheck {
            name,
            passed: value <= limit,
            value,
            limit,
        });
    };

    let max_accel = samples.iter().map(|s| s.accel.norm()).fold(0.0, f64::max);
    push("max_accel_norm", max_accel, params.u_max * (1.0 + tol.accel_rel));

    let max_speed = samples.iter().map(|s| s.velocity.norm()).fold(0.0, f64::max);
    push("max_speed", max_speed, params.speed_limit());

    let min_clearance = samples
        .iter()
        .flat_map(|s| obstacles.iter().map(move |o| o.signed_clearance(s.position)))
        .fold(f64::INFINITY, f64::min);
    push("min_clearance", -min_clearance, tol.clearance);

    let (max_dev, max_arc_over) = match path {
        Some(p) if p.total_length() > 0.0 => {
            let mut dev = 0.0f64;
            let mut over = 0.0f64;
            for s in samples {
                let g = s.gamma.clamp(0.0, p.total_length());
                if let Ok(pt) = p.path_point(g) {
                    dev = dev.max(pt.distance(s.position));
                }
                if let Some(rho) = p.arc_radius_at(g) {
                    let cap = speed_cap(SegmentLawKind::Arc { rho }, BoundModel::Approximate, params);
                    over = over.max(s.velocity.norm() - cap);
                }
            }
            (dev, over)
        }
        _ => (0.0, 0.0),
    };
    if path.is_some() {
        push("max_path_deviation", max_dev, tol.path_deviation);
        push("arc_speed_overshoot", max_arc_over, tol.arc_speed);
    }

    let first_err = samples.first().map_or(f64::INFINITY, |s| s.position.distance(start));
    let final_err = samples.last().map_or(f64::INFINITY, |s| s.position.distance(goal));
    push("start_position_error", first_err, tol.endpoint);
    push("final_position_error", final_err, tol.endpoint);

    // Discrete dynamics consistency at the midpoint of each step. Bang-bang
    // switches make the control discontinuous inside a step, so each step is
    // granted slack equal to half its own net-force jump; smooth steps get
    // only the dt^2 budget.
    let mut max_res = 0.0f64;
    let mut median_dt = tol.reference_dt;
    let mut smooth_limit = 0.0;
    if samples.len() >= 2 {
        let mut dts: Vec<f64> = samples.windows(2).map(|w| w[1].t - w[0].t).collect();
        dts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        median_dt = dts[dts.len() / 2].max(1e-12);
        smooth_limit = tol.dynamics_scale
            * params.u_max
            * (median_dt / tol.reference_dt).powi(2)
            * tol.reference_dt;
        for w in samples.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt <= 0.0 {
                max_res = f64::INFINITY;
                break;
            }
            let dv = (w[1].velocity - w[0].velocity) / dt;
            let f = |s: &TrajectorySample| s.accel - s.velocity * (params.c_d * s.velocity.norm());
            let (f0, f1) = (f(&w[0]), f(&w[1]));
            let mid = (f0 + f1) * 0.5;
            let jump_slack = 0.5 * (f1 - f0).norm();
            max_res = max_res.max(((dv - mid).norm() - jump_slack).max(0.0));
        }
    }
    let widened = median_dt > 1.5 * tol.reference_dt;
    push("dynamics_residual", max_res, smooth_limit);

    let passed = checks.iter().all(|c| c.passed);
    AuditReport {
        max_accel_norm: max_accel,
        min_clearance,
        max_speed,
        max_path_deviation: max_dev,
        final_position_error: final_err,
        max_dynamics_residual: max_res,
        checks,
        passed,
        tolerance_widened: widened,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> DynParams {
        DynParams::new(1.0, 0.1).unwrap()
    }

    #[test]
    fn zero_control_from_rest_stays_put() {
        let p = params();
        let out = integrate_2d(
            |_, _| Vec2::ZERO,
            SimState {
                t: 0.0,
                r: Vec2::new(1.0, 2.0),
                v: Vec2::ZERO,
            },
            1e-3,
            0.5,
            &p,
        )
        .unwrap();
        let last = out.last().unwrap().state;
        assert!(last.r.distance(Vec2::new(1.0, 2.0)) < 1e-12);
        assert!(last.v.norm() < 1e-12);
    }

    #[test]
    fn constant_thrust_matches_closed_form() {
        let p = params();
        let t_end = 3.0;
        let out = integrate_2d(
            |_, _| Vec2::new(p.u_max, 0.0),
            SimState {
                t: 0.0,
                r: Vec2::ZERO,
                v: Vec2::ZERO,
            },
            1e-4,
            t_end,
            &p,
        )
        .unwrap();
        let vbar = p.speed_limit();
        let k = (p.u_max * p.c_d).sqrt();
        let expect = vbar * (k * t_end).tanh();
        assert!((out.last().unwrap().state.v.x - expect).abs() < 1e-8);
    }

    #[test]
    fn thrust_approaches_terminal_speed() {
        let p = params();
        let out = integrate_2d(
            |_, _| Vec2::new(p.u_max, 0.0),
            SimState {
                t: 0.0,
                r: Vec2::ZERO,
                v: Vec2::ZERO,
            },
            1e-3,
            200.0,
            &p,
        )
        .unwrap();
        assert_relative_eq!(
            out.last().unwrap().state.v.x,
            p.speed_limit(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn integrator_order_is_four() {
        // Stiffer parameters keep the discretization error well above
        // roundoff at the smallest step, so the observed order is clean.
        let p = DynParams::new(4.0, 1.0).unwrap();
        let t_end = 2.0;
        let vbar = p.speed_limit();
        let k = (p.u_max * p.c_d).sqrt();
        let exact = vbar * (k * t_end).tanh();
        let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&dt| {
                let out = integrate_2d(
                    |_, _| Vec2::new(p.u_max, 0.0),
                    SimState {
                        t: 0.0,
                        r: Vec2::ZERO,
                        v: Vec2::ZERO,
                    },
                    dt,
                    t_end,
                    &p,
                )
                .unwrap();
                (out.last().unwrap().state.v.x - exact).abs()
            })
            .collect();
        let slope1 = (errors[0] / errors[1]).log2();
        let slope2 = (errors[1] / errors[2]).log2();
        for s in [slope1, slope2] {
            assert!((s - 4.0).abs() < 0.2, "observed order {s}");
        }
    }

    #[test]
    fn drag_only_decay_is_monotone() {
        let p = params();
        let out = integrate_2d(
            |_, _| Vec2::ZERO,
            SimState {
                t: 0.0,
                r: Vec2::ZERO,
                v: Vec2::new(2.0, 1.0),
            },
            1e-3,
            5.0,
            &p,
        )
        .unwrap();
        for w in out.windows(2) {
            assert!(w[1].state.v.norm() < w[0].state.v.norm());
        }
    }

    #[test]
    fn control_bound_violation_detected() {
        let p = params();
        let r = integrate_2d(
            |t, _| Vec2::new(if t > 0.1 { 2.0 } else { 0.5 }, 0.0),
            SimState {
                t: 0.0,
                r: Vec2::ZERO,
                v: Vec2::ZERO,
            },
            1e-2,
            1.0,
            &p,
        );
        assert!(matches!(r, Err(SimError::ControlBoundViolation { .. })));
    }

    #[test]
    fn straight_accel_time_matches_antiderivative() {
        let p = params();
        let v_target = 2.0;
        let law = |v: f64| accel_extreme(SegmentLawKind::Straight, BoundModel::Exact, &p, v);
        let out = integrate_path_until_speed(law, 0.0, v_target, 1e-5, 1e9).unwrap();
        let vbar = p.speed_limit();
        let expect = (1.0 / (p.u_max * p.c_d).sqrt()) * (v_target / vbar).atanh();
        assert!((out.time - expect).abs() < 1e-6);
    }

    #[test]
    fn zero_length_segment_is_instant() {
        let p = params();
        let law = |v: f64| accel_extreme(SegmentLawKind::Straight, BoundModel::Exact, &p, v);
        let out = integrate_path(law, 1.0, 0.0, 1e-4, (0.0, 10.0)).unwrap();
        assert_eq!(out.time, 0.0);
        assert_eq!(out.v_final, 1.0);
    }

    #[test]
    fn arc_cap_is_a_fixed_point_of_max_accel() {
        let p = params();
        let kind = SegmentLawKind::Arc { rho: 1.5 };
        let cap = speed_cap(kind, BoundModel::Approximate, &p);
        let law = |v: f64| accel_extreme(kind, BoundModel::Approximate, &p, v);
        assert!(law(cap).abs() < 1e-9);
        let out = integrate_path(law, cap, 3.0, 1e-4, (0.0, cap * 1.001)).unwrap();
        assert!((out.v_final - cap).abs() < 1e-9);
    }

    #[test]
    fn exact_cap_below_lateral_only_cap() {
        let p = params();
        let kind = SegmentLawKind::Arc { rho: 2.0 };
        let cap = speed_cap(kind, BoundModel::Exact, &p);
        // Pinch condition: drag equals the leftover lateral budget.
        let expect = (p.u_max * p.u_max / (p.c_d * p.c_d + 1.0 / 4.0)).powf(0.25);
        assert_relative_eq!(cap, expect, epsilon = 1e-9);
        let approx_cap = speed_cap(kind, BoundModel::Approximate, &p);
        assert!(approx_cap <= cap + 1e-12);
    }

    #[test]
    fn numeric_min_time_trivial_cases() {
        let p = params();
        assert_eq!(numeric_min_time(&[], 0.0, 0.0, &p, BoundModel::Exact, 100).unwrap(), 0.0);
        let segs = [SegmentSpec {
            kind: SegmentLawKind::Straight,
            length: 10.0,
        }];
        let t = numeric_min_time(&segs, 0.0, 0.0, &p, BoundModel::Exact, 4000).unwrap();
        assert!(t > 0.0);
        // Infeasible: end speed beyond what the length allows.
        let short = [SegmentSpec {
            kind: SegmentLawKind::Straight,
            length: 0.01,
        }];
        assert!(matches!(
            numeric_min_time(&short, 0.0, 3.0, &p, BoundModel::Exact, 1000),
            Err(SimError::InfeasibleProfile(_))
        ));
    }
}
