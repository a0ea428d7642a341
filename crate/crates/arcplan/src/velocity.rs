//! Closed-form near time-optimal speed profiles along planned paths.
//!
//! The agent obeys `dv/dt = a` along the path with a state-dependent
//! admissible band for the tangential acceleration `a`:
//!
//! * straight segments: `|a + c_d v^2| <= u_max`;
//! * circular arcs of radius `rho`: the full acceleration vector combines
//!   `a + c_d v^2` tangentially with `v^2 / rho` laterally, and the norm
//!   bound is approximated by the conservative polynomial band
//!   `|a + c_d v^2| <= (u_max^2 rho^2 - v^4) / (u_max rho^2)`,
//!   which stays inside the exact disc constraint for all admissible speeds.
//!
//! Time-optimal traversal of one segment with fixed terminal speeds is
//! bang-bang: full acceleration up to a switching speed, then full braking.
//! Both phases integrate in closed form.
//!
//! On straights, with `vbar = sqrt(u_max/c_d)` and `k = sqrt(u_max c_d)`,
//! full thrust integrates to `t(v) = atanh(v/vbar)/k` and
//! `gamma(v) = ln((u_max - c_d v0^2)/(u_max - c_d v^2))/(2 c_d)`; full
//! braking gives the same forms with `atan` and `u_max + c_d v^2`. The
//! switching speed follows from adding the two distance integrals:
//! `v_sw^2 = vbar^2 (1-r)/(1+r)` with
//! `r = e^{-2 c_d L} (u_max - c_d v0^2)/(u_max + c_d vf^2)`.
//!
//! On arcs the band factors through its roots in squared speed,
//! `a+ = (A - v^2)(v^2 + B)/(u_max rho^2)` and
//! `a- = -(B - v^2)(v^2 + A)/(u_max rho^2)`, where `A = cap^2` and `B` is
//! the conjugate root (`A + B = kappa1`, `B - A = kappa2`). Partial
//! fractions then give the time antiderivatives
//! `[atanh(v/sqrt(A))/lambda1 + atan(v/sqrt(B))/lambda2] / lambda3` under
//! thrust and the same with the `atanh`/`atan` pair swapped under braking,
//! and the distance potentials `atanh((2v^2 +- kappa2)/kappa1)` (thrust,
//! braking). The switching speed solves a quadratic in the distance-to-cap
//! variable `w = A - v_sw^2`, kept in that variable so saturated switches
//! lose no precision. Every closed form here is checked against direct
//! numerical integration in the test suites.

use crate::roadmap::{PathSegment, PlannedPath};
use crate::vec2::Vec2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VelocityError {
    #[error("infeasible-terminal-speeds: {binding} bound violated on segment of length {length}: v0={v0}, vf={vf}")]
    InfeasibleTerminalSpeeds {
        v0: f64,
        vf: f64,
        length: f64,
        binding: &'static str,
    },
    #[error("tanh-domain: inverse-hyperbolic argument {value} outside (-1, 1)")]
    TanhDomain { value: f64 },
    #[error("unreachable: speed {target} cannot be produced over length {length}")]
    Unreachable { target: f64, length: f64 },
    #[error("infeasible-endpoints: {0}")]
    InfeasibleEndpoints(String),
    #[error("invalid dynamics parameters: {0}")]
    InvalidParams(String),
    #[error("speed profile does not match path: {0}")]
    ProfileMismatch(String),
}

/// Acceleration bound and drag coefficient of the damped double integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynParams {
    /// Acceleration norm bound (m/s^2).
    pub u_max: f64,
    /// Quadratic drag coefficient (1/m).
    pub c_d: f64,
}

impl DynParams {
    pub fn new(u_max: f64, c_d: f64) -> Result<Self, VelocityError> {
        if !(u_max > 0.0 && u_max.is_finite()) {
            return Err(VelocityError::InvalidParams(format!(
                "u_max must be positive and finite, got {u_max}"
            )));
        }
        if !(c_d > 0.0 && c_d.is_finite()) {
            return Err(VelocityError::InvalidParams(format!(
                "c_d must be positive and finite, got {c_d}"
            )));
        }
        Ok(DynParams { u_max, c_d })
    }

    /// Drag-limited top speed `sqrt(u_max / c_d)`; full thrust approaches it
    /// asymptotically and never reaches it.
    pub fn speed_limit(&self) -> f64 {
        (self.u_max / self.c_d).sqrt()
    }

    fn k(&self) -> f64 {
        (self.u_max * self.c_d).sqrt()
    }
}

/// Precomputed coefficients for the closed forms on one circular arc.
#[derive(Debug, Clone, Copy)]
pub struct ArcConstants {
    pub rho: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// `1/sqrt(A)`: reciprocal of the arc speed cap.
    pub lambda1_o: f64,
    /// `1/sqrt(B)`: reciprocal speed scale of the braking branch.
    pub lambda2_o: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Arc speed cap: the acceleration band pinches to `a = 0` here.
    pub v_c_max: f64,
}

impl ArcConstants {
    pub fn new(rho: f64, params: &DynParams) -> ArcConstants {
        assert!(rho > 0.0, "arc radius must be positive");
        let (u, c) = (params.u_max, params.c_d);
        let lambda0 = (rho * rho * c * c + 4.0).sqrt();
        let kappa0 = rho / (2.0 * lambda0);
        let kappa1 = rho * u * lambda0;
        let kappa2 = c * rho * rho * u;
        let a = 0.5 * (kappa1 - kappa2);
        let b = 0.5 * (kappa1 + kappa2);
        let lambda1 = (rho * (lambda0 - rho * c)).sqrt();
        let lambda2 = (rho * (lambda0 + rho * c)).sqrt();
        let lambda3 = lambda0 / rho * (u / 2.0).sqrt();
        let out = ArcConstants {
            rho,
            lambda0,
            lambda1,
            lambda2,
            lambda3,
            lambda1_o: 1.0 / a.sqrt(),
            lambda2_o: 1.0 / b.sqrt(),
            kappa0,
            kappa1,
            kappa2,
            v_c_max: a.sqrt(),
        };
        debug_assert!((out.lambda1_o - 2.0f64.sqrt() / (lambda1 * u.sqrt())).abs() < 1e-9 * out.lambda1_o);
        debug_assert!((out.lambda2_o - 2.0f64.sqrt() / (lambda2 * u.sqrt())).abs() < 1e-9 * out.lambda2_o);
        out
    }

    /// Squared arc speed cap.
    fn a_root(&self) -> f64 {
        0.5 * (self.kappa1 - self.kappa2)
    }

    /// Conjugate (braking-branch) root.
    fn b_root(&self) -> f64 {
        0.5 * (self.kappa1 + self.kappa2)
    }

    /// Distance potential of the acceleration branch (in squared speed).
    fn p(&self, s: f64) -> f64 {
        ((2.0 * s + self.kappa2) / self.kappa1).atanh()
    }

    /// Distance potential of the braking branch.
    fn q(&self, s: f64) -> f64 {
        ((2.0 * s - self.kappa2) / self.kappa1).atanh()
    }

    /// Time antiderivative along full acceleration.
    fn time_accel(&self, v: f64) -> f64 {
        ((self.lambda1_o * v).atanh() / self.lambda1 + (self.lambda2_o * v).atan() / self.lambda2)
            / self.lambda3
    }

    /// Time antiderivative along full braking.
    fn time_brake(&self, v: f64) -> f64 {
        ((self.lambda1_o * v).atan() / self.lambda1 + (self.lambda2_o * v).atanh() / self.lambda2)
            / self.lambda3
    }

    /// Maximum tangential acceleration at speed `v`: the band factors as
    /// `(A - v^2)(v^2 + B) / (u_max rho^2)`.
    fn accel(&self, v: f64) -> f64 {
        let s = v * v;
        (self.a_root() - s) * (s + self.b_root()) / self.urho2()
    }

    /// `u_max * rho^2`, recovered from the stored coefficients.
    fn urho2(&self) -> f64 {
        self.kappa1 * self.rho / self.lambda0
    }

    /// Minimum tangential acceleration at speed `v` (negative).
    fn brake(&self, v: f64) -> f64 {
        let s = v * v;
        -(self.b_root() - s) * (s + self.a_root()) / self.urho2()
    }
}

/// Arc speed cap for a circular segment of radius `rho`: the speed at which
/// centripetal plus drag demand exhausts the acceleration budget and the
/// admissible band pinches to `a = 0`.
pub fn arc_speed_cap(rho: f64, params: &DynParams) -> f64 {
    ArcConstants::new(rho, params).v_c_max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedMode {
    Accel,
    Decel,
}

/// Forward/inverse speed propagation along a straight segment.
///
/// `Accel` returns the exit speed after full acceleration from `v_in` over
/// `length`. `Decel` is its algebraic inverse: the entry speed from which
/// full acceleration exits at `v_in`; it errors with `Unreachable` when
/// `v_in` lies below the full-acceleration-from-rest curve, i.e. no
/// non-negative entry speed can produce it.
pub fn straight_reach_speed(
    length: f64,
    v_in: f64,
    mode: SpeedMode,
    params: &DynParams,
) -> Result<f64, VelocityError> {
    let (u, c) = (params.u_max, params.c_d);
    let vbar = params.speed_limit();
    if length == 0.0 {
        return Ok(v_in);
    }
    match mode {
        SpeedMode::Accel => {
            let s = (u - (-2.0 * c * length).exp() * (u - c * v_in * v_in)) / c;
            Ok(s.max(0.0).sqrt().min(vbar))
        }
        SpeedMode::Decel => {
            let e = (2.0 * c * length).min(700.0).exp();
            let s = (u - e * (u - c * v_in * v_in)) / c;
            if s < 0.0 {
                return Err(VelocityError::Unreachable {
                    target: v_in,
                    length,
                });
            }
            Ok(s.sqrt().min(vbar))
        }
    }
}

/// Forward/inverse speed propagation along an arc under the approximate
/// acceleration band, clipped to `[0, cap]`.
pub fn arc_reach_speed(
    length: f64,
    v_in: f64,
    mode: SpeedMode,
    arc: &ArcConstants,
) -> Result<f64, VelocityError> {
    let s_in = v_in * v_in;
    let a = arc.a_root();
    let arg = (2.0 * s_in + arc.kappa2) / arc.kappa1;
    if arg > 1.0 + 1e-12 {
        return Err(VelocityError::TanhDomain { value: arg });
    }
    if length == 0.0 {
        return Ok(v_in);
    }
    if s_in >= a * (1.0 - 1e-12) {
        // Pinch fixed point: the band collapses to a = 0 at the cap.
        return Ok(arc.v_c_max);
    }
    let x = length / (2.0 * arc.kappa0);
    let s_out = match mode {
        SpeedMode::Accel => 0.5 * (arc.kappa1 * (x + arc.p(s_in)).tanh() - arc.kappa2),
        SpeedMode::Decel => 0.5 * (arc.kappa1 * (arc.p(s_in) - x).tanh() - arc.kappa2),
    };
    Ok(s_out.clamp(0.0, a).sqrt())
}

/// Entry speed from which full braking over `length` exits exactly at
/// `v_exit`, clipped to the drag-limited top speed.
fn straight_brake_entry_cap(length: f64, v_exit: f64, params: &DynParams) -> f64 {
    let (u, c) = (params.u_max, params.c_d);
    let x = 2.0 * c * length;
    if x > 300.0 {
        return params.speed_limit();
    }
    let s = (x.exp() * (u + c * v_exit * v_exit) - u) / c;
    s.max(0.0).sqrt().min(params.speed_limit())
}

/// Exit speed after full braking from `v_entry` over `length`; zero when the
/// agent can come to rest within the segment.
fn straight_brake_exit(length: f64, v_entry: f64, params: &DynParams) -> f64 {
    let (u, c) = (params.u_max, params.c_d);
    let s = ((-2.0 * c * length).exp() * (u + c * v_entry * v_entry) - u) / c;
    s.max(0.0).sqrt()
}

/// Arc analogue of [`straight_brake_entry_cap`], clipped to the arc cap.
fn arc_brake_entry_cap(length: f64, v_exit: f64, arc: &ArcConstants) -> f64 {
    let s_exit = v_exit * v_exit;
    let x = length / (2.0 * arc.kappa0);
    let s = 0.5 * (arc.kappa2 + arc.kappa1 * (x + arc.q(s_exit)).tanh());
    s.clamp(0.0, arc.a_root()).sqrt()
}

/// Arc analogue of [`straight_brake_exit`].
fn arc_brake_exit(length: f64, v_entry: f64, arc: &ArcConstants) -> f64 {
    let s_entry = v_entry * v_entry;
    let x = length / (2.0 * arc.kappa0);
    let s = 0.5 * (arc.kappa2 + arc.kappa1 * (arc.q(s_entry) - x).tanh());
    s.max(0.0).min(arc.a_root()).sqrt()
}

/// Bang-bang phase layout of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseKind {
    AccelDecel,
    AccelOnly,
    DecelOnly,
    /// Arc pinned at its speed cap: optional cruise window before braking.
    CruiseCapped,
}

#[derive(Debug, Clone, Copy)]
pub struct SegmentPhase {
    pub kind: PhaseKind,
    /// Peak speed of the segment (switching speed, or the cap when pinned).
    pub switch_speed: f64,
    /// Distance along the segment where full acceleration ends.
    pub switch_position: f64,
    /// Cruise window `[from, to]` in segment distance for `CruiseCapped`.
    pub cruise: Option<(f64, f64)>,
}

/// Geometry of one profiled segment.
#[derive(Debug, Clone, Copy)]
pub enum ProfileSegmentKind {
    Straight,
    Arc(ArcConstants),
}

#[derive(Debug, Clone, Copy)]
pub struct SegmentProfile {
    pub kind: ProfileSegmentKind,
    pub length: f64,
    pub v_in: f64,
    pub v_out: f64,
    pub phase: SegmentPhase,
    pub time: f64,
}

/// Junction speeds and per-segment phases for a whole path.
#[derive(Debug, Clone)]
pub struct SpeedProfile {
    pub junction_speeds: Vec<f64>,
    pub segments: Vec<SegmentProfile>,
    pub total_time: f64,
}

const REL_TOL: f64 = 1e-9;

/// Minimum time over a straight segment with terminal speeds `v0`, `vf`.
pub fn straight_min_time(
    length: f64,
    v0: f64,
    vf: f64,
    params: &DynParams,
) -> Result<f64, VelocityError> {
    straight_profile(length, v0, vf, params).map(|p| p.time)
}

/// Full phase solution for a straight segment.
pub fn straight_profile(
    length: f64,
    v0: f64,
    vf: f64,
    params: &DynParams,
) -> Result<SegmentProfile, VelocityError> {
    let vbar = params.speed_limit();
    if !(0.0..vbar).contains(&v0) || !(0.0..vbar).contains(&vf) {
        return Err(VelocityError::InfeasibleTerminalSpeeds {
            v0,
            vf,
            length,
            binding: "speed-limit",
        });
    }
    let vtol = REL_TOL * (1.0 + vbar);
    if length <= 0.0 {
        if (v0 - vf).abs() > vtol {
            return Err(VelocityError::InfeasibleTerminalSpeeds {
                v0,
                vf,
                length,
                binding: "zero-length",
            });
        }
        return Ok(SegmentProfile {
            kind: ProfileSegmentKind::Straight,
            length: 0.0,
            v_in: v0,
            v_out: vf,
            phase: SegmentPhase {
                kind: PhaseKind::AccelOnly,
                switch_speed: v0,
                switch_position: 0.0,
                cruise: None,
            },
            time: 0.0,
        });
    }

    let accel_exit = straight_reach_speed(length, v0, SpeedMode::Accel, params)?;
    if vf > accel_exit + vtol {
        return Err(VelocityError::InfeasibleTerminalSpeeds {
            v0,
            vf,
            length,
            binding: "acceleration",
        });
    }
    let brake_exit = straight_brake_exit(length, v0, params);
    if vf < brake_exit - vtol {
        return Err(VelocityError::InfeasibleTerminalSpeeds {
            v0,
            vf,
            length,
            binding: "braking",
        });
    }

    let (u, c) = (params.u_max, params.c_d);
    // Switch speed from matching acceleration and braking distances:
    // r = ((u - c v0^2)/(u + c vf^2)) e^{-2 c L}, v_sw^2 = vbar^2 (1-r)/(1+r).
    let r = ((u - c * v0 * v0) / (u + c * vf * vf) * (-2.0 * c * length).exp()).max(1e-300);
    let ratio = ((1.0 - r) / (1.0 + r)).max(0.0).sqrt();
    let v_sw_raw = vbar * ratio;

    // Keep the stored switch speed strictly below the drag limit even when
    // the ratio rounds to one.
    let v_sw_raw = v_sw_raw.min(vbar.next_down());
    let k = params.k();
    let time_accel = |v: f64| (v / vbar).atanh() / k;
    let time_brake = |v: f64| (v / vbar).atan() / k;
    let (v_sw, time, switch_position) = if v_sw_raw > v0.max(vf) {
        // atanh(v_sw/vbar) and u - c v_sw^2 expressed through r so the
        // result stays accurate when the switch approaches the drag limit.
        let atanh_sw = 0.5 * ((1.0 + ratio).powi(2) * (1.0 + r) / (2.0 * r)).ln();
        let time = (atanh_sw - (v0 / vbar).atanh()) / k + (time_brake(v_sw_raw) - time_brake(vf));
        let u_minus_cssw = u * 2.0 * r / (1.0 + r);
        let switch_position = ((u - c * v0 * v0) / u_minus_cssw).ln() / (2.0 * c);
        (v_sw_raw, time, switch_position)
    } else {
        let v_sw = v0.max(vf);
        let time = (time_accel(v_sw) - time_accel(v0)) + (time_brake(v_sw) - time_brake(vf));
        let switch_position = accel_distance_straight(v0, v_sw, params);
        (v_sw, time, switch_position)
    };
    debug_assert!(
        (switch_position + brake_distance_straight(v_sw, vf, params) - length).abs()
            < 1e-6 * (1.0 + length)
    );

    let kind = if v_sw > v0.max(vf) + vtol {
        PhaseKind::AccelDecel
    } else if vf >= v0 {
        PhaseKind::AccelOnly
    } else {
        PhaseKind::DecelOnly
    };
    Ok(SegmentProfile {
        kind: ProfileSegmentKind::Straight,
        length,
        v_in: v0,
        v_out: vf,
        phase: SegmentPhase {
            kind,
            switch_speed: v_sw,
            switch_position: switch_position.clamp(0.0, length),
            cruise: None,
        },
        time,
    })
}

fn accel_distance_straight(v0: f64, v1: f64, params: &DynParams) -> f64 {
    let (u, c) = (params.u_max, params.c_d);
    ((u - c * v0 * v0) / (u - c * v1 * v1)).ln() / (2.0 * c)
}

fn brake_distance_straight(v_hi: f64, v_lo: f64, params: &DynParams) -> f64 {
    let (u, c) = (params.u_max, params.c_d);
    ((u + c * v_hi * v_hi) / (u + c * v_lo * v_lo)).ln() / (2.0 * c)
}

/// Minimum time over a circular segment under the approximate band.
pub fn arc_min_time(
    length: f64,
    v0: f64,
    vf: f64,
    arc: &ArcConstants,
) -> Result<f64, VelocityError> {
    arc_profile(length, v0, vf, arc).map(|p| p.time)
}

/// Full phase solution for an arc segment.
pub fn arc_profile(
    length: f64,
    v0: f64,
    vf: f64,
    arc: &ArcConstants,
) -> Result<SegmentProfile, VelocityError> {
    let cap = arc.v_c_max;
    let vtol = REL_TOL * (1.0 + cap);
    for v in [v0, vf] {
        let arg = (2.0 * v * v + arc.kappa2) / arc.kappa1;
        if arg > 1.0 + 1e-9 {
            return Err(VelocityError::TanhDomain { value: arg });
        }
    }
    if length <= 0.0 {
        if (v0 - vf).abs() > vtol {
            return Err(VelocityError::InfeasibleTerminalSpeeds {
                v0,
                vf,
                length,
                binding: "zero-length",
            });
        }
        return Ok(SegmentProfile {
            kind: ProfileSegmentKind::Arc(*arc),
            length: 0.0,
            v_in: v0,
            v_out: vf,
            phase: SegmentPhase {
                kind: PhaseKind::AccelOnly,
                switch_speed: v0,
                switch_position: 0.0,
                cruise: None,
            },
            time: 0.0,
        });
    }

    let pinned0 = v0 >= cap * (1.0 - 1e-9);
    if pinned0 {
        let s_f = vf * vf;
        if vf >= cap * (1.0 - 1e-9) {
            // Pure cruise at the cap.
            return Ok(SegmentProfile {
                kind: ProfileSegmentKind::Arc(*arc),
                length,
                v_in: cap,
                v_out: cap,
                phase: SegmentPhase {
                    kind: PhaseKind::CruiseCapped,
                    switch_speed: cap,
                    switch_position: length,
                    cruise: Some((0.0, length)),
                },
                time: length / cap,
            });
        }
        // Cruise at the cap, then brake down to vf.
        let brake_dist = 2.0 * arc.kappa0 * (arc.q(arc.a_root()) - arc.q(s_f));
        if brake_dist > length + vtol {
            return Err(VelocityError::InfeasibleTerminalSpeeds {
                v0,
                vf,
                length,
                binding: "braking",
            });
        }
        let cruise_len = (length - brake_dist).max(0.0);
        let time = cruise_len / cap + (arc.time_brake(cap) - arc.time_brake(vf));
        return Ok(SegmentProfile {
            kind: ProfileSegmentKind::Arc(*arc),
            length,
            v_in: cap,
            v_out: vf,
            phase: SegmentPhase {
                kind: PhaseKind::CruiseCapped,
                switch_speed: cap,
                switch_position: cruise_len,
                cruise: Some((0.0, cruise_len)),
            },
            time,
        });
    }

    let accel_exit = arc_reach_speed(length, v0, SpeedMode::Accel, arc)?;
    if vf > accel_exit + vtol {
        return Err(VelocityError::InfeasibleTerminalSpeeds {
            v0,
            vf,
            length,
            binding: "acceleration",
        });
    }
    let brake_exit = arc_brake_exit(length, v0, arc);
    if vf < brake_exit - vtol {
        return Err(VelocityError::InfeasibleTerminalSpeeds {
            v0,
            vf,
            length,
            binding: "braking",
        });
    }

    let s0 = v0 * v0;
    let sf = vf * vf;
    // Switch speed from distance matching: the exponent collects the
    // acceleration potential at v0, the braking potential at vf, and the
    // segment length. Solved for the distance-to-pinch w = A - v_sw^2 so the
    // result stays accurate however close the switch comes to the cap.
    let a = arc.a_root();
    let x = length / arc.kappa0 + 2.0 * arc.p(s0) + 2.0 * arc.q(sf);
    let em1 = x.exp_m1();
    let b_coef = arc.kappa1 + 2.0 * a + (em1 + 1.0) * arc.kappa2;
    let c_coef = 2.0 * a * arc.kappa1;
    let w = 2.0 * c_coef / (b_coef + (b_coef * b_coef + 4.0 * em1 * c_coef).sqrt());
    let s_sw = (a - w).max(s0.max(sf)).min(a);
    let w_eff = (a - s_sw).max(a * 1e-15);
    let v_sw = s_sw.max(0.0).sqrt();

    // atanh(lambda1_o * v_sw) in terms of w to dodge the pinch cancellation.
    let ratio = (1.0 - w_eff / a).max(0.0).sqrt();
    let atanh_acc_sw = 0.5 * ((1.0 + ratio).powi(2) * a / w_eff).ln();
    let t_acc_sw =
        (atanh_acc_sw / arc.lambda1 + (arc.lambda2_o * v_sw).atan() / arc.lambda2) / arc.lambda3;
    let time = (t_acc_sw - arc.time_accel(v0)) + (arc.time_brake(v_sw) - arc.time_brake(vf));
    let p_sw = 0.5 * ((arc.kappa1 - w_eff) / w_eff).ln();
    let switch_position = 2.0 * arc.kappa0 * (p_sw - arc.p(s0));

    let kind = if v_sw > v0.max(vf) + vtol {
        PhaseKind::AccelDecel
    } else if vf >= v0 {
        PhaseKind::AccelOnly
    } else {
        PhaseKind::DecelOnly
    };
    Ok(SegmentProfile {
        kind: ProfileSegmentKind::Arc(*arc),
        length,
        v_in: v0,
        v_out: vf,
        phase: SegmentPhase {
            kind,
            switch_speed: v_sw,
            switch_position: switch_position.clamp(0.0, length),
            cruise: None,
        },
        time,
    })
}

impl SegmentProfile {
    /// Speed at a given distance into the segment.
    pub fn speed_at(&self, dist: f64, params: &DynParams) -> f64 {
        let d = dist.clamp(0.0, self.length);
        match (&self.kind, self.phase.kind) {
            (ProfileSegmentKind::Straight, _) => {
                if d <= self.phase.switch_position {
                    straight_reach_speed(d, self.v_in, SpeedMode::Accel, params).unwrap()
                } else {
                    straight_brake_exit(d - self.phase.switch_position, self.phase.switch_speed, params)
                }
            }
            (ProfileSegmentKind::Arc(arc), PhaseKind::CruiseCapped) => {
                let (_, cruise_to) = self.phase.cruise.unwrap_or((0.0, self.length));
                if d <= cruise_to {
                    arc.v_c_max
                } else {
                    arc_brake_exit(d - cruise_to, arc.v_c_max, arc)
                }
            }
            (ProfileSegmentKind::Arc(arc), _) => {
                if d <= self.phase.switch_position {
                    arc_reach_speed(d, self.v_in, SpeedMode::Accel, arc).unwrap_or(arc.v_c_max)
                } else {
                    arc_brake_exit(d - self.phase.switch_position, self.phase.switch_speed, arc)
                }
            }
        }
    }

    /// Tangential acceleration at a given distance into the segment.
    fn accel_at(&self, dist: f64, params: &DynParams) -> f64 {
        let d = dist.clamp(0.0, self.length);
        let v = self.speed_at(d, params);
        match &self.kind {
            ProfileSegmentKind::Straight => {
                if d < self.phase.switch_position || self.phase.kind == PhaseKind::AccelOnly {
                    params.u_max - params.c_d * v * v
                } else {
                    -params.u_max - params.c_d * v * v
                }
            }
            ProfileSegmentKind::Arc(arc) => match self.phase.kind {
                PhaseKind::CruiseCapped => {
                    let (_, cruise_to) = self.phase.cruise.unwrap_or((0.0, self.length));
                    if d <= cruise_to {
                        0.0
                    } else {
                        arc.brake(v)
                    }
                }
                PhaseKind::AccelOnly => arc.accel(v),
                PhaseKind::DecelOnly => arc.brake(v),
                PhaseKind::AccelDecel => {
                    if d < self.phase.switch_position {
                        arc.accel(v)
                    } else {
                        arc.brake(v)
                    }
                }
            },
        }
    }

    /// Distance and speed after `tau` seconds inside this segment.
    pub fn state_at_time(&self, tau: f64, params: &DynParams) -> (f64, f64) {
        let tau = tau.clamp(0.0, self.time);
        match (&self.kind, self.phase.kind) {
            (ProfileSegmentKind::Straight, _) => {
                let vbar = params.speed_limit();
                let k = params.k();
                let c = params.c_d;
                // Acceleration-phase duration via the braking side, which
                // stays finite even when the switch saturates at the drag
                // limit.
                let t_brake =
                    ((self.phase.switch_speed / vbar).atan() - (self.v_out / vbar).atan()) / k;
                let t_acc = (self.time - t_brake).max(0.0);
                if tau <= t_acc && self.phase.kind != PhaseKind::DecelOnly {
                    let phi0 = (self.v_in / vbar).atanh();
                    let phi = phi0 + k * tau;
                    // tanh saturates to 1.0 in floats; the phase peak bounds
                    // the speed.
                    let v = (vbar * phi.tanh()).min(self.phase.switch_speed);
                    let gamma = (phi.cosh().ln() - phi0.cosh().ln()) / c;
                    (gamma, v)
                } else {
                    let start = if self.phase.kind == PhaseKind::DecelOnly {
                        self.v_in
                    } else {
                        self.phase.switch_speed
                    };
                    let tau_b = if self.phase.kind == PhaseKind::DecelOnly {
                        tau
                    } else {
                        tau - t_acc
                    };
                    let psi0 = (start / vbar).atan();
                    let psi = psi0 - k * tau_b;
                    // Braking never exceeds its entry speed.
                    let v = (vbar * psi.tan()).clamp(0.0, start);
                    let gamma = self.phase.switch_position + (psi.cos().ln() - psi0.cos().ln()) / c;
                    (gamma, v)
                }
            }
            (ProfileSegmentKind::Arc(arc), PhaseKind::CruiseCapped) => {
                let (_, cruise_to) = self.phase.cruise.unwrap_or((0.0, self.length));
                let t_cruise = cruise_to / arc.v_c_max;
                if tau <= t_cruise {
                    (arc.v_c_max * tau, arc.v_c_max)
                } else {
                    let v = invert_arc_brake_time(arc, arc.v_c_max, tau - t_cruise);
                    let gamma = cruise_to + 2.0 * arc.kappa0 * (arc.q(arc.a_root()) - arc.q(v * v));
                    (gamma, v)
                }
            }
            (ProfileSegmentKind::Arc(arc), _) => {
                let t_brake = arc.time_brake(self.phase.switch_speed) - arc.time_brake(self.v_out);
                let t_acc = (self.time - t_brake).max(0.0);
                if tau <= t_acc && self.phase.kind != PhaseKind::DecelOnly {
                    let v = invert_arc_accel_time(arc, self.v_in, tau);
                    let gamma = 2.0 * arc.kappa0 * (arc.p(v * v) - arc.p(self.v_in * self.v_in));
                    (gamma, v)
                } else {
                    let start = if self.phase.kind == PhaseKind::DecelOnly {
                        self.v_in
                    } else {
                        self.phase.switch_speed
                    };
                    let tau_b = tau - t_acc;
                    let v = invert_arc_brake_time(arc, start, tau_b);
                    let gamma = self.phase.switch_position
                        + 2.0 * arc.kappa0 * (arc.q(start * start) - arc.q(v * v));
                    (gamma, v)
                }
            }
        }
    }
}

/// Solves `time_accel(v) - time_accel(v0) = tau` for `v` on the
/// acceleration branch (monotone; Newton with a bisection bracket).
fn invert_arc_accel_time(arc: &ArcConstants, v0: f64, tau: f64) -> f64 {
    let cap = arc.v_c_max * (1.0 - 1e-15);
    let f = |v: f64| arc.time_accel(v) - arc.time_accel(v0) - tau;
    invert_monotone(f, |v| 1.0 / arc.accel(v).max(1e-300), v0, cap)
}

fn invert_arc_brake_time(arc: &ArcConstants, v_hi: f64, tau: f64) -> f64 {
    // time from v_hi down to v: time_brake(v_hi) - time_brake(v).
    let f = |v: f64| (arc.time_brake(v_hi) - arc.time_brake(v)) - tau;
    // f is decreasing in v; negate for the standard increasing bracket.
    let g = |v: f64| -f(v);
    invert_monotone(g, |v| 1.0 / (-arc.brake(v)).max(1e-300), 0.0, v_hi)
}

fn invert_monotone(
    f: impl Fn(f64) -> f64,
    dvdt: impl Fn(f64) -> f64,
    lo0: f64,
    hi0: f64,
) -> f64 {
    let mut lo = lo0;
    let mut hi = hi0;
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..200 {
        let err = f(v);
        if err.abs() < 1e-15 {
            break;
        }
        if err > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let step = err * dvdt(v).recip();
        let newton = v - step;
        v = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-16 * (1.0 + hi.abs()) {
            break;
        }
    }
    v
}

/// Maximal feasible junction speeds along the path via the two-pass sweep:
/// the forward pass propagates full-acceleration reachability from
/// `v_start` (clipped at arc caps), the backward pass propagates
/// full-braking compatibility from `v_end`, and each junction takes the
/// pointwise minimum. Per-segment phases are then solved in closed form.
pub fn solve_terminal_speeds(
    path: &PlannedPath,
    v_start: f64,
    v_end: f64,
    params: &DynParams,
) -> Result<SpeedProfile, VelocityError> {
    let vbar = params.speed_limit();
    if !(0.0..vbar).contains(&v_start) || !(0.0..vbar).contains(&v_end) {
        return Err(VelocityError::InfeasibleEndpoints(format!(
            "terminal speeds must lie in [0, {vbar}): v_start={v_start}, v_end={v_end}"
        )));
    }

    struct Seg {
        kind: ProfileSegmentKind,
        length: f64,
    }
    let segs: Vec<Seg> = path
        .segments()
        .iter()
        .filter(|s| s.length() > 1e-12)
        .map(|s| match s {
            PathSegment::Straight { length, .. } => Seg {
                kind: ProfileSegmentKind::Straight,
                length: *length,
            },
            PathSegment::Arc { radius, length, .. } => Seg {
                kind: ProfileSegmentKind::Arc(ArcConstants::new(*radius, params)),
                length: *length,
            },
        })
        .collect();

    let n = segs.len();
    if n == 0 {
        if (v_start - v_end).abs() > REL_TOL * (1.0 + vbar) {
            return Err(VelocityError::InfeasibleEndpoints(
                "zero-length path with different terminal speeds".into(),
            ));
        }
        return Ok(SpeedProfile {
            junction_speeds: vec![v_start, v_end],
            segments: Vec::new(),
            total_time: 0.0,
        });
    }

    // Junction caps: arc segments cap both of their junctions.
    let mut caps = vec![vbar; n + 1];
    for (i, s) in segs.iter().enumerate() {
        if let ProfileSegmentKind::Arc(arc) = &s.kind {
            caps[i] = caps[i].min(arc.v_c_max);
            caps[i + 1] = caps[i + 1].min(arc.v_c_max);
        }
    }
    let vtol = REL_TOL * (1.0 + vbar);
    if v_start > caps[0] + vtol {
        return Err(VelocityError::InfeasibleEndpoints(format!(
            "v_start={v_start} exceeds the first segment cap {}",
            caps[0]
        )));
    }
    if v_end > caps[n] + vtol {
        return Err(VelocityError::InfeasibleEndpoints(format!(
            "v_end={v_end} exceeds the last segment cap {}",
            caps[n]
        )));
    }

    let mut forward = vec![0.0; n + 1];
    forward[0] = v_start.min(caps[0]);
    for i in 0..n {
        let reach = match &segs[i].kind {
            ProfileSegmentKind::Straight => {
                straight_reach_speed(segs[i].length, forward[i], SpeedMode::Accel, params)?
            }
            ProfileSegmentKind::Arc(arc) => {
                arc_reach_speed(segs[i].length, forward[i], SpeedMode::Accel, arc)?
            }
        };
        forward[i + 1] = reach.min(caps[i + 1]);
    }
    let mut backward = vec![0.0; n + 1];
    backward[n] = v_end.min(caps[n]);
    for i in (0..n).rev() {
        let cap = match &segs[i].kind {
            ProfileSegmentKind::Straight => {
                straight_brake_entry_cap(segs[i].length, backward[i + 1], params)
            }
            ProfileSegmentKind::Arc(arc) => {
                arc_brake_entry_cap(segs[i].length, backward[i + 1], arc)
            }
        };
        backward[i] = cap.min(caps[i]);
    }

    if backward[0] + vtol < v_start {
        return Err(VelocityError::InfeasibleEndpoints(format!(
            "cannot brake from v_start={v_start} to v_end={v_end} within the path (max feasible start speed {})",
            backward[0]
        )));
    }
    if forward[n] + vtol < v_end {
        return Err(VelocityError::InfeasibleEndpoints(format!(
            "cannot accelerate to v_end={v_end} along the path (max reachable end speed {})",
            forward[n]
        )));
    }

    let mut junction_speeds: Vec<f64> = (0..=n).map(|i| forward[i].min(backward[i])).collect();
    junction_speeds[0] = v_start;
    junction_speeds[n] = v_end;

    let mut segments = Vec::with_capacity(n);
    let mut total_time = 0.0;
    for i in 0..n {
        let profile = match &segs[i].kind {
            ProfileSegmentKind::Straight => straight_profile(
                segs[i].length,
                junction_speeds[i],
                junction_speeds[i + 1],
                params,
            )?,
            ProfileSegmentKind::Arc(arc) => arc_profile(
                segs[i].length,
                junction_speeds[i],
                junction_speeds[i + 1],
                arc,
            )?,
        };
        total_time += profile.time;
        segments.push(profile);
    }

    Ok(SpeedProfile {
        junction_speeds,
        segments,
        total_time,
    })
}

/// Total traversal time of `profile` on `path`: the sum of per-segment
/// minimum times recomputed from the junction speeds.
pub fn total_time(
    path: &PlannedPath,
    profile: &SpeedProfile,
    params: &DynParams,
) -> Result<f64, VelocityError> {
    let lengths: Vec<f64> = path
        .segments()
        .iter()
        .map(PathSegment::length)
        .filter(|&l| l > 1e-12)
        .collect();
    if lengths.len() != profile.segments.len() {
        return Err(VelocityError::ProfileMismatch(format!(
            "path has {} segments, profile has {}",
            lengths.len(),
            profile.segments.len()
        )));
    }
    let mut sum = 0.0;
    for (i, seg) in profile.segments.iter().enumerate() {
        if (lengths[i] - seg.length).abs() > 1e-9 * (1.0 + lengths[i]) {
            return Err(VelocityError::ProfileMismatch(format!(
                "segment {i} length mismatch: path {} vs profile {}",
                lengths[i], seg.length
            )));
        }
        sum += match &seg.kind {
            ProfileSegmentKind::Straight => {
                straight_min_time(seg.length, seg.v_in, seg.v_out, params)?
            }
            ProfileSegmentKind::Arc(arc) => arc_min_time(seg.length, seg.v_in, seg.v_out, arc)?,
        };
    }
    Ok(sum)
}

/// One sampled trajectory state.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Vec2,
    pub velocity: Vec2,
    pub accel: Vec2,
    pub gamma: f64,
}

/// Samples the closed-form profile at uniform time steps (plus the exact
/// final state), reconstructing the planar control from the path frame:
/// `u = heading * (a + c_d v^2) + curvature * v^2`.
pub fn sample_trajectory(
    path: &PlannedPath,
    profile: &SpeedProfile,
    params: &DynParams,
    dt: f64,
) -> Vec<TrajectorySample> {
    assert!(dt > 0.0, "dt must be positive");
    let mut seg_start_time = Vec::with_capacity(profile.segments.len() + 1);
    let mut seg_start_dist = Vec::with_capacity(profile.segments.len() + 1);
    let mut t_acc = 0.0;
    let mut d_acc = 0.0;
    for seg in &profile.segments {
        seg_start_time.push(t_acc);
        seg_start_dist.push(d_acc);
        t_acc += seg.time;
        d_acc += seg.length;
    }
    seg_start_time.push(t_acc);
    seg_start_dist.push(d_acc);
    let total_time = t_acc;

    let eval = |t: f64| -> TrajectorySample {
        if profile.segments.is_empty() {
            return TrajectorySample {
                t,
                position: path.start(),
                velocity: Vec2::ZERO,
                accel: Vec2::ZERO,
                gamma: 0.0,
            };
        }
        let idx = match seg_start_time[..profile.segments.len()]
            .binary_search_by(|s| s.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let seg = &profile.segments[idx];
        let tau = (t - seg_start_time[idx]).clamp(0.0, seg.time);
        let (local, v) = seg.state_at_time(tau, params);
        let a = seg.accel_at(local, params);
        let gamma = (seg_start_dist[idx] + local).min(path.total_length());
        let heading = path.path_heading_vec(gamma).unwrap_or(Vec2::new(1.0, 0.0));
        let curvature = path.curvature_at(gamma).unwrap_or(Vec2::ZERO);
        let u = heading * (a + params.c_d * v * v) + curvature * (v * v);
        TrajectorySample {
            t,
            position: path.path_point(gamma).unwrap_or(path.goal()),
            velocity: heading * v,
            accel: u,
            gamma,
        }
    };

    let mut out = Vec::new();
    let mut t = 0.0;
    while t < total_time {
        out.push(eval(t));
        t += dt;
    }
    let mut last = eval(total_time);
    last.t = total_time;
    // Pin the terminal sample onto the goal state exactly.
    last.gamma = path.total_length();
    last.position = path.goal();
    out.push(last);
    out
}
