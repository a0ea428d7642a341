//! Acceptance suite: one test per release criterion, each printing a
//! `ACCEPTANCE <n> <name>: PASS` line with its measured figures (visible
//! with `cargo test --test acceptance -- --nocapture`).

use arcplan::geometry::{inflate_polygon, InflatedObstacle, Polygon};
use arcplan::roadmap::{self, count_path_intersections, kappa_m, PlannedPath};
use arcplan::scenario::Scenario;
use arcplan::sim::{self, BoundModel, SegmentLawKind, SegmentSpec};
use arcplan::tangents::{
    common_tangents, hessian_determinant_certificate, tangency_gradient_certificate, TangentKind,
};
use arcplan::vec2::Vec2;
use arcplan::velocity::{arc_profile, straight_profile, ArcConstants, DynParams};
use arcplan::worldgen::{disk_polygon, random_scenario, WorldgenConfig};
use arcplan::{pipeline, PlanOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_disjoint_pair(rng: &mut ChaCha8Rng) -> (InflatedObstacle, InflatedObstacle) {
    loop {
        let n1 = rng.gen_range(3..=8);
        let n2 = rng.gen_range(3..=8);
        let r1 = rng.gen_range(0.4..1.6);
        let r2 = rng.gen_range(0.4..1.6);
        let rho1 = rng.gen_range(0.1..1.0);
        let rho2 = rng.gen_range(0.1..1.0);
        let sep = r1 + r2 + rho1 + rho2 + rng.gen_range(0.3..4.0);
        let ang = rng.gen_range(0.0..std::f64::consts::TAU);
        let p1 = disk_polygon(Vec2::ZERO, r1, n1, rng.gen_range(0.0..std::f64::consts::TAU));
        let p2 = disk_polygon(
            Vec2::from_angle(ang) * sep,
            r2,
            n2,
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let (Ok(a), Ok(b)) = (inflate_polygon(&p1, rho1), inflate_polygon(&p2, rho2)) else {
            continue;
        };
        if !a.closure_intersects(&b) {
            return (a, b);
        }
    }
}

// 1. Tangency certificate on 200 random disjoint pairs: exactly four
// tangents, each with objective < 1e-12, gradient norm < 1e-8, and a
// non-negative Hessian-determinant certificate.
#[test]
fn acceptance_01_tangency_certificate() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst_f = 0.0f64;
    let mut worst_grad = 0.0f64;
    for case in 0..200 {
        let (o1, o2) = random_disjoint_pair(&mut rng);
        let tangents = common_tangents(&o1, &o2)
            .unwrap_or_else(|e| panic!("case {case}: tangent solve failed: {e}"));
        assert_eq!(tangents.len(), 4, "case {case}: expected 4 tangents");
        for t in &tangents {
            let f = t.pair.residual;
            assert!(f < 1e-12, "case {case}: objective {f}");
            let (g1, g2) =
                tangency_gradient_certificate(&o1, &o2, t.pair.gamma1, t.pair.gamma2).unwrap();
            let gnorm = (g1 * g1 + g2 * g2).sqrt();
            assert!(gnorm < 1e-8, "case {case}: gradient norm {gnorm}");
            let det =
                hessian_determinant_certificate(&o1, &o2, t.pair.gamma1, t.pair.gamma2).unwrap();
            assert!(det >= 0.0, "case {case}: determinant certificate {det}");
            worst_f = worst_f.max(f);
            worst_grad = worst_grad.max(gnorm);
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime {elapsed:.2}s exceeds 10s");
    println!(
        "ACCEPTANCE 1 tangency-certificate: PASS (200 pairs, worst f {worst_f:.3e}, worst |grad| {worst_grad:.3e}, {elapsed:.2}s)"
    );
}

// 2. Analytic fixture: radius-1 disk stand-ins (regular 64-gons of
// circumradius 0.5 inflated by 0.5, one vertex straight up) at distance 4.
// External tangency points are exact; internal anchors shift at most
// first-order in the vertex spacing, bounded by
// `r_poly * pi / 64 = 0.5 * 0.0491 = 2.45e-2` (the tangent lines
// themselves deviate only second-order, below 1e-3 here).
#[test]
fn acceptance_02_analytic_tangency_fixture() {
    let make = |c: Vec2| {
        inflate_polygon(&disk_polygon(c, 0.5, 64, std::f64::consts::FRAC_PI_2), 0.5).unwrap()
    };
    let o1 = make(Vec2::ZERO);
    let o2 = make(Vec2::new(4.0, 0.0));
    let tangents = common_tangents(&o1, &o2).unwrap();
    assert_eq!(tangents.len(), 4);

    let approx_bound = 0.5 * std::f64::consts::PI / 64.0;
    let tol = 1e-6 + approx_bound;
    let s3 = 3.0f64.sqrt() / 2.0;
    let mut worst = 0.0f64;
    for t in &tangents {
        let (want1, want2) = match t.kind {
            TangentKind::External => (
                Vec2::new(0.0, t.pair.p1.y.signum()),
                Vec2::new(4.0, t.pair.p2.y.signum()),
            ),
            TangentKind::Internal => (
                Vec2::new(0.5, s3 * t.pair.p1.y.signum()),
                Vec2::new(3.5, s3 * t.pair.p2.y.signum()),
            ),
            TangentKind::Terminal => unreachable!(),
        };
        let d1 = t.pair.p1.distance(want1);
        let d2 = t.pair.p2.distance(want2);
        assert!(d1 < tol, "{:?}: {d1} vs tol {tol}", t.kind);
        assert!(d2 < tol, "{:?}: {d2} vs tol {tol}", t.kind);
        worst = worst.max(d1).max(d2);
        if t.kind == TangentKind::Internal {
            // Internal tangents touch on opposite sides of the center line.
            assert!(t.pair.p1.y * t.pair.p2.y < 0.0);
        }
        if t.kind == TangentKind::External {
            // Vertex apexes make the external tangency points exact.
            assert!(d1 < 1e-9 && d2 < 1e-9);
        }
    }
    println!(
        "ACCEPTANCE 2 analytic-tangency-fixture: PASS (worst deviation {worst:.3e}, documented bound {tol:.3e})"
    );
}

// 3. Straight-segment time formula against the RK4 oracle at dt = 1e-4 on
// 500 random feasible instances.
#[test]
fn acceptance_03_straight_time_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let params = DynParams::new(rng.gen_range(0.5..3.0), rng.gen_range(0.02..0.5)).unwrap();
        let vbar = params.speed_limit();
        let length = rng.gen_range(0.5..25.0);
        let v0 = rng.gen_range(0.0..0.93 * vbar);
        let hi = arcplan::velocity::straight_reach_speed(
            length,
            v0,
            arcplan::velocity::SpeedMode::Accel,
            &params,
        )
        .unwrap()
        .min(0.98 * vbar);
        let lo = brake_exit_straight(length, v0, &params);
        let vf = lo + (hi - lo) * rng.gen_range(0.02..0.98);
        let prof = straight_profile(length, v0, vf, &params)
            .unwrap_or_else(|e| panic!("case {case}: {e}"));

        // Position-triggered bang-bang: switch at the closed-form switch
        // position (a speed trigger is ill-conditioned when the switch sits
        // near the drag limit). The terminal speed check then validates the
        // switch placement.
        let accel = |v: f64| params.u_max - params.c_d * v * v;
        let brake = |v: f64| -params.u_max - params.c_d * v * v;
        let band = (-1e-3, vbar * 1.001);
        let up = sim::integrate_path(accel, v0, prof.phase.switch_position, 1e-4, band).unwrap();
        let down = sim::integrate_path(
            brake,
            up.v_final,
            length - prof.phase.switch_position,
            1e-4,
            band,
        )
        .unwrap();
        assert!(
            (down.v_final - vf).abs() < 1e-4 * (1.0 + vf),
            "case {case}: oracle terminal speed {} vs {vf}",
            down.v_final
        );
        let oracle = up.time + down.time;
        let rel = (prof.time - oracle).abs() / oracle.max(1e-12);
        assert!(rel < 1e-4, "case {case}: relative error {rel}");
        worst = worst.max(rel);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime {elapsed:.2}s exceeds 30s");
    println!(
        "ACCEPTANCE 3 straight-time-oracle: PASS (500 cases, worst rel err {worst:.3e}, {elapsed:.2}s)"
    );
}

fn brake_exit_straight(length: f64, v0: f64, params: &DynParams) -> f64 {
    let (u, c) = (params.u_max, params.c_d);
    let s = ((-2.0 * c * length).exp() * (u + c * v0 * v0) - u) / c;
    s.max(0.0).sqrt()
}

// 4. Arc-segment time formula against the RK4 oracle (approximate band)
// and conservatism against the dense minimum-time solve under the exact
// acceleration-norm band.
#[test]
fn acceptance_04_arc_time_oracle_and_conservatism() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let mut worst_rel = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    for case in 0..500 {
        let params = DynParams::new(rng.gen_range(0.5..3.0), rng.gen_range(0.02..0.5)).unwrap();
        let rho = rng.gen_range(0.3..3.0);
        let arc = ArcConstants::new(rho, &params);
        let cap = arc.v_c_max;
        let length = rng.gen_range(0.3 * rho..std::f64::consts::TAU * rho);
        let v0 = rng.gen_range(0.0..0.95 * cap);
        let hi = arcplan::velocity::arc_reach_speed(
            length,
            v0,
            arcplan::velocity::SpeedMode::Accel,
            &arc,
        )
        .unwrap()
        .min(0.97 * cap);
        let lo = brake_exit_arc(length, v0, &arc, &params);
        let vf = lo + (hi - lo).max(0.0) * rng.gen_range(0.02..0.98);
        let prof =
            arc_profile(length, v0, vf, &arc).unwrap_or_else(|e| panic!("case {case}: {e}"));

        // Position-triggered bang-bang as in the straight criterion: a speed
        // trigger cannot resolve switches that saturate against the cap.
        let kind = SegmentLawKind::Arc { rho };
        let accel = |v: f64| sim::accel_extreme(kind, BoundModel::Approximate, &params, v);
        let brake = |v: f64| sim::brake_extreme(kind, BoundModel::Approximate, &params, v);
        let band = (-1e-3, cap * 1.001);
        let up = sim::integrate_path(accel, v0, prof.phase.switch_position, 1e-4, band).unwrap();
        let down = sim::integrate_path(
            brake,
            up.v_final,
            length - prof.phase.switch_position,
            1e-4,
            band,
        )
        .unwrap();
        assert!(
            (down.v_final - vf).abs() < 1e-4 * (1.0 + vf),
            "case {case}: oracle terminal speed {} vs {vf}",
            down.v_final
        );
        let oracle = up.time + down.time;
        let rel = (prof.time - oracle).abs() / oracle.max(1e-12);
        assert!(rel < 1e-4, "case {case}: relative error {rel}");
        worst_rel = worst_rel.max(rel);

        // Conservatism: the closed form may not beat the exact-band optimum.
        let exact = sim::numeric_min_time(
            &[SegmentSpec { kind, length }],
            v0,
            vf,
            &params,
            BoundModel::Exact,
            6000,
        )
        .unwrap();
        let margin = prof.time - exact;
        assert!(
            prof.time >= exact - 1e-4 * prof.time,
            "case {case}: closed form {} beats exact optimum {exact}",
            prof.time
        );
        worst_margin = worst_margin.min(margin / prof.time);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime {elapsed:.2}s exceeds 60s");
    println!(
        "ACCEPTANCE 4 arc-time-oracle: PASS (500 cases, worst rel err {worst_rel:.3e}, min conservatism margin {worst_margin:.3e}, {elapsed:.2}s)"
    );
}

fn brake_exit_arc(length: f64, v0: f64, arc: &ArcConstants, params: &DynParams) -> f64 {
    let kind = SegmentLawKind::Arc { rho: arc.rho };
    let brake = |v: f64| sim::brake_extreme(kind, BoundModel::Approximate, params, v);
    match sim::integrate_path(brake, v0, length, 1e-3, (-1e-3, arc.v_c_max * 1.01)) {
        Ok(out) => out.v_final.max(0.0),
        Err(_) => 0.0,
    }
}

// 5. Constraint audit over 50 random worlds: acceleration norm, speed
// bounds, arc caps, obstacle clearance, and junction speed continuity.
#[test]
fn acceptance_05_constraint_audit() {
    let mut audited = 0;
    for seed in 0..50u64 {
        let cfg = WorldgenConfig {
            seed: 5000 + seed,
            n_obstacles: 3 + (seed % 5) as usize,
            ..Default::default()
        };
        let scenario = random_scenario(&cfg);
        let result = pipeline::plan(&scenario, &PlanOptions::default())
            .unwrap_or_else(|e| panic!("seed {seed}: planning failed: {e}"));
        assert!(
            result.audit.passed,
            "seed {seed}: audit failed\n{}",
            result.audit.render()
        );
        // Junction speed continuity: the time-domain phase evaluation at the
        // segment end must land on the shared junction speed.
        for (i, seg) in result.profile.segments.iter().enumerate() {
            let (_, end_speed) = seg.state_at_time(seg.time, &scenario.params);
            let jump = (end_speed - result.profile.junction_speeds[i + 1]).abs();
            assert!(jump < 1e-9, "seed {seed}: junction {i} speed jump {jump}");
        }
        audited += 1;
    }
    println!("ACCEPTANCE 5 constraint-audit: PASS ({audited} scenarios, all checks green)");
}

// 6. The ellipse filter never changes the shortest-path length, and on
// crowded worlds (>= 5 obstacles) it actually removes nodes in at least
// 30% of cases.
// 7. Path length never exceeds `kappa_m` times the straight-line distance.
#[test]
fn acceptance_06_07_ellipse_filter_and_detour_bound() {
    let mut removal_candidates = 0usize;
    let mut removal_hits = 0usize;
    let mut worst_ratio = 0.0f64;
    for seed in 0..100u64 {
        // Terminals closer together than the obstacle field, so the search
        // ellipse has something to exclude.
        let cfg = WorldgenConfig {
            seed: 6000 + seed,
            n_obstacles: 2 + (seed % 9) as usize,
            extent: 9.0,
            terminal_extent: 4.0,
            ..Default::default()
        };
        let scenario = random_scenario(&cfg);
        let inflated = scenario.validate().unwrap();
        let rm = roadmap::build_roadmap(&inflated)
            .unwrap()
            .attach_terminals(scenario.start, scenario.goal)
            .unwrap();
        let nodes_before = rm.nodes().len();
        let unfiltered = rm.clone().shortest_path().unwrap();
        let filtered_rm = rm.ellipse_filter().unwrap();
        let filtered = filtered_rm.shortest_path().unwrap();

        let diff = (unfiltered.total_length() - filtered.total_length()).abs();
        assert!(
            diff <= 1e-9,
            "seed {seed}: filter changed path length by {diff}"
        );
        if inflated.len() >= 5 {
            removal_candidates += 1;
            if filtered_rm.nodes().len() < nodes_before {
                removal_hits += 1;
            }
        }

        // Detour bound.
        let km = kappa_m(&inflated);
        let straight = scenario.start.distance(scenario.goal);
        let ratio = filtered.total_length() / straight;
        assert!(
            filtered.total_length() <= km * straight + 1e-9,
            "seed {seed}: path {} exceeds kappa_m bound {}",
            filtered.total_length(),
            km * straight
        );
        worst_ratio = worst_ratio.max(ratio / km);
    }
    assert!(removal_candidates >= 30, "too few crowded worlds generated");
    let frac = removal_hits as f64 / removal_candidates as f64;
    assert!(
        frac >= 0.30,
        "filter removed nodes in only {removal_hits}/{removal_candidates} crowded worlds"
    );
    println!(
        "ACCEPTANCE 6 ellipse-filter-lossless: PASS (100 scenarios, removal fraction {frac:.2} on {removal_candidates} crowded worlds)"
    );
    println!(
        "ACCEPTANCE 7 detour-bound: PASS (worst length/(kappa_m * straight) = {worst_ratio:.3})"
    );
}

// 8. Search optimality: the shortest-path length matches exhaustive
// enumeration over all simple paths on every roadmap with at most 12 nodes.
#[test]
fn acceptance_08_search_matches_enumeration() {
    let mut qualifying = 0;
    for seed in 0..40u64 {
        let cfg = WorldgenConfig {
            seed: 8000 + seed,
            n_obstacles: if seed % 5 == 0 { 0 } else { 1 },
            extent: 5.0,
            ..Default::default()
        };
        let scenario = random_scenario(&cfg);
        let inflated = scenario.validate().unwrap();
        let rm = roadmap::build_roadmap(&inflated)
            .unwrap()
            .attach_terminals(scenario.start, scenario.goal)
            .unwrap();
        if rm.nodes().len() > 12 {
            continue;
        }
        qualifying += 1;
        let dijkstra = rm.shortest_path().unwrap().total_length();
        let brute = rm.brute_force_shortest_length().unwrap();
        assert!(
            (dijkstra - brute).abs() < 1e-12 * (1.0 + brute),
            "seed {seed}: search {dijkstra} vs enumeration {brute}"
        );
    }
    assert!(qualifying >= 20, "only {qualifying} small roadmaps generated");
    println!(
        "ACCEPTANCE 8 search-vs-enumeration: PASS ({qualifying} roadmaps with <= 12 nodes)"
    );
}

// 9. Any two shortest paths in the same world intersect at most once
// (counting connected components of the trace intersection). Violations
// are logged with the serialized scenario before failing.
#[test]
fn acceptance_09_path_pair_intersections() {
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let mut pairs = 0;
    let mut violations = 0;
    let mut max_count = 0usize;
    while pairs < 200 {
        let cfg = WorldgenConfig {
            seed: 90_000 + pairs as u64,
            n_obstacles: 3 + (pairs % 4),
            extent: 7.0,
            ..Default::default()
        };
        let scenario = random_scenario(&cfg);
        let inflated = scenario.validate().unwrap();
        let rm = roadmap::build_roadmap(&inflated).unwrap();

        let sample_terminal = |rng: &mut ChaCha8Rng| -> Vec2 {
            loop {
                let p = Vec2::new(rng.gen_range(-7.0..7.0), rng.gen_range(-7.0..7.0));
                if inflated.iter().all(|o| o.signed_clearance(p) > 0.05) {
                    return p;
                }
            }
        };
        let plan_between = |rm: &roadmap::Roadmap, a: Vec2, b: Vec2| -> Option<PlannedPath> {
            rm.clone().attach_terminals(a, b).ok()?.shortest_path().ok()
        };
        let (a1, b1) = (sample_terminal(&mut rng), sample_terminal(&mut rng));
        let (a2, b2) = (sample_terminal(&mut rng), sample_terminal(&mut rng));
        let (Some(p1), Some(p2)) = (plan_between(&rm, a1, b1), plan_between(&rm, a2, b2)) else {
            continue;
        };
        if p1.total_length() < 1e-9 || p2.total_length() < 1e-9 {
            continue;
        }
        let count = count_path_intersections(&p1, &p2);
        max_count = max_count.max(count);
        if count > 1 {
            violations += 1;
            eprintln!(
                "FINDING: path pair intersects {count} times\nterminals: {a1:?}->{b1:?} and {a2:?}->{b2:?}\nscenario:\n{}",
                scenario.to_text()
            );
        }
        pairs += 1;
    }
    assert_eq!(
        violations, 0,
        "{violations} path pairs intersected more than once"
    );
    println!(
        "ACCEPTANCE 9 path-pair-intersections: PASS (200 pairs, max component count {max_count})"
    );
}

// 10. Near-optimality on three fixed desk-scale scenarios: the closed-form
// total time stays within 10% of the dense exact-band minimum-time solve
// on the same path; the measured overhead epsilon is reported.
#[test]
fn acceptance_10_near_optimality() {
    let square = |cx: f64, cy: f64, r: f64| {
        Polygon::new(vec![
            Vec2::new(cx - r, cy - r),
            Vec2::new(cx + r, cy - r),
            Vec2::new(cx + r, cy + r),
            Vec2::new(cx - r, cy + r),
        ])
        .unwrap()
    };
    let params = DynParams::new(1.0, 0.1).unwrap();
    let scenarios = [
        // Free flight.
        Scenario {
            obstacles: vec![],
            inflation: 0.5,
            start: Vec2::new(-6.0, 0.0),
            goal: Vec2::new(6.0, 0.0),
            params,
            v_start: 0.0,
            v_end: 0.0,
        },
        // Single blocking square.
        Scenario {
            obstacles: vec![square(0.0, 0.0, 1.0)],
            inflation: 0.6,
            start: Vec2::new(-5.0, -0.2),
            goal: Vec2::new(5.0, 0.3),
            params,
            v_start: 0.0,
            v_end: 0.0,
        },
        // Three-obstacle slalom.
        Scenario {
            obstacles: vec![
                square(-2.5, 0.6, 0.8),
                square(0.5, -1.0, 0.7),
                square(3.0, 0.8, 0.6),
            ],
            inflation: 0.45,
            start: Vec2::new(-6.5, -1.0),
            goal: Vec2::new(6.5, 0.5),
            params,
            v_start: 0.0,
            v_end: 0.0,
        },
    ];

    let mut epsilons = Vec::new();
    for (i, scenario) in scenarios.iter().enumerate() {
        let result = pipeline::plan(scenario, &PlanOptions::default()).unwrap();
        let specs: Vec<SegmentSpec> = result
            .path
            .segments()
            .iter()
            .map(|s| match s {
                roadmap::PathSegment::Straight { length, .. } => SegmentSpec {
                    kind: SegmentLawKind::Straight,
                    length: *length,
                },
                roadmap::PathSegment::Arc { radius, length, .. } => SegmentSpec {
                    kind: SegmentLawKind::Arc { rho: *radius },
                    length: *length,
                },
            })
            .collect();
        let optimal = sim::numeric_min_time(&specs, 0.0, 0.0, &scenario.params, BoundModel::Exact, 6000)
            .unwrap();
        let tau = result.profile.total_time;
        let eps = tau / optimal - 1.0;
        assert!(
            tau >= optimal - 1e-4 * tau,
            "scenario {i}: closed form {tau} beats the exact optimum {optimal}"
        );
        assert!(
            tau <= 1.10 * optimal,
            "scenario {i}: overhead {eps:.4} exceeds 10%"
        );
        epsilons.push(eps);
    }
    println!(
        "ACCEPTANCE 10 near-optimality: PASS (measured epsilon per scenario: {:.5}, {:.5}, {:.5})",
        epsilons[0], epsilons[1], epsilons[2]
    );
}

// 11. Planning is deterministic (byte-identical artifacts across runs) and
// its output always passes verification.
#[test]
fn acceptance_11_determinism_and_round_trip() {
    let cfg = WorldgenConfig {
        seed: 1111,
        n_obstacles: 5,
        ..Default::default()
    };
    let scenario = random_scenario(&cfg);
    let options = PlanOptions {
        svg: true,
        ..PlanOptions::default()
    };
    let a = pipeline::plan(&scenario, &options).unwrap();
    let b = pipeline::plan(&scenario, &options).unwrap();
    assert_eq!(a.trajectory.render(), b.trajectory.render());
    assert_eq!(pipeline::render_report(&a), pipeline::render_report(&b));
    assert_eq!(a.svg, b.svg);

    let report = pipeline::verify(&scenario.to_text(), &a.trajectory.render()).unwrap();
    assert!(report.passed);
    println!("ACCEPTANCE 11 determinism-round-trip: PASS (byte-identical artifacts, verify green)");
}
