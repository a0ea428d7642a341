//! Property tests for the boundary parameterization and the speed
//! propagation closed forms.

use arcplan::geometry::{inflate_polygon, Polygon};
use arcplan::vec2::Vec2;
use arcplan::velocity::{straight_reach_speed, DynParams, SpeedMode};
use proptest::prelude::*;

/// Strategy: a strictly convex polygon as points on an irregular star,
/// rejected unless the constructor accepts it.
fn convex_polygon() -> impl Strategy<Value = Polygon> {
    (
        3usize..9,
        0.3f64..2.5,
        0.0f64..std::f64::consts::TAU,
        proptest::collection::vec(0.6f64..1.0, 8),
    )
        .prop_filter_map("degenerate polygon", |(n, scale, phase, radii)| {
            let verts: Vec<Vec2> = (0..n)
                .map(|i| {
                    let ang = phase + std::f64::consts::TAU * i as f64 / n as f64;
                    Vec2::from_angle(ang) * (scale * radii[i % radii.len()])
                })
                .collect();
            Polygon::new(verts).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_parameterization_invariants(
        poly in convex_polygon(),
        rho in 0.05f64..1.0,
        frac in 0.0f64..1.0,
    ) {
        let obs = inflate_polygon(&poly, rho).unwrap();
        // Perimeter additivity.
        let total: f64 = obs.pieces().iter().map(|p| p.length).sum();
        prop_assert!((total - (poly.perimeter() + std::f64::consts::TAU * rho)).abs() < 1e-9);
        // Periodic wrap and unit tangent.
        let gamma = frac * obs.perimeter();
        let p0 = obs.boundary_point(gamma);
        let p1 = obs.boundary_point(gamma + obs.perimeter());
        prop_assert!(p0.distance(p1) < 1e-9);
        prop_assert!((obs.boundary_tangent(gamma).norm() - 1.0).abs() < 1e-12);
        // Finite-difference slope matches away from junctions.
        let h = 1e-6;
        let (idx, local) = obs.piece_at(gamma);
        if local > 2.0 * h && obs.pieces()[idx].length - local > 2.0 * h {
            let fd = (obs.boundary_point(gamma + h) - obs.boundary_point(gamma - h)) / (2.0 * h);
            prop_assert!(fd.distance(obs.boundary_tangent(gamma)) < 1e-8);
        }
        // Boundary points keep the inflation distance from the source.
        prop_assert!(poly.distance_to_point(p0) >= rho - 1e-9);
    }

    #[test]
    fn straight_reach_round_trips(
        u in 0.3f64..3.0,
        c in 0.02f64..0.5,
        v_frac in 0.0f64..0.95,
        length in 0.0f64..30.0,
    ) {
        let params = DynParams::new(u, c).unwrap();
        let v = v_frac * params.speed_limit();
        let out = straight_reach_speed(length, v, SpeedMode::Accel, &params).unwrap();
        prop_assert!(out >= v - 1e-12);
        prop_assert!(out < params.speed_limit());
        let back = straight_reach_speed(length, out, SpeedMode::Decel, &params).unwrap();
        // The inverse amplifies rounding by exp(2 c L) once the forward map
        // saturates against the drag limit; the tolerance tracks that
        // condition number.
        let tol = 1e-9 * (1.0 + v * v) + 1e-13 * (2.0 * c * length).exp() * (u / c);
        prop_assert!((back * back - v * v).abs() < tol);
    }
}
