//! Seeded random scenario generation for tests, fuzzing, and benchmarks.

use crate::geometry::{inflate_polygon, InflatedObstacle, Polygon};
use crate::scenario::Scenario;
use crate::vec2::Vec2;
use crate::velocity::DynParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Regular polygon approximating a disk: `n` vertices on a circle of radius
/// `circumradius` around `center`, the first vertex at angle `phase`.
pub fn disk_polygon(center: Vec2, circumradius: f64, n: usize, phase: f64) -> Polygon {
    Polygon::new(
        (0..n)
            .map(|i| center + Vec2::from_angle(phase + std::f64::consts::TAU * i as f64 / n as f64) * circumradius)
            .collect(),
    )
    .expect("regular polygon is always valid")
}

/// Parameters for [`random_scenario`].
#[derive(Debug, Clone)]
pub struct WorldgenConfig {
    pub seed: u64,
    /// Target number of obstacles; fewer may be placed if space runs out.
    pub n_obstacles: usize,
    /// Obstacles are placed in `[-extent, extent]^2`.
    pub extent: f64,
    /// Terminals are placed in `[-terminal_extent, terminal_extent]^2`;
    /// keeping this below `extent` leaves obstacles outside the search
    /// ellipse, which exercises the filter.
    pub terminal_extent: f64,
    pub obstacle_radius: (f64, f64),
    pub vertices: (usize, usize),
    pub inflation: (f64, f64),
    pub u_max: (f64, f64),
    pub c_d: (f64, f64),
    /// Minimum gap between inflated obstacles and around the terminals.
    pub margin: f64,
}

impl Default for WorldgenConfig {
    fn default() -> Self {
        WorldgenConfig {
            seed: 0,
            n_obstacles: 4,
            extent: 8.0,
            terminal_extent: 8.0,
            obstacle_radius: (0.4, 1.4),
            vertices: (3, 8),
            inflation: (0.15, 0.6),
            u_max: (0.5, 2.0),
            c_d: (0.02, 0.3),
            margin: 0.05,
        }
    }
}

/// A random convex polygon: convex hull of points scattered on an annulus.
pub fn random_convex_polygon(rng: &mut ChaCha8Rng, center: Vec2, radius: f64, max_vertices: usize) -> Polygon {
    loop {
        let n = rng.gen_range(3..=max_vertices.max(3));
        let mut pts: Vec<Vec2> = (0..(n + 4))
            .map(|_| {
                let ang = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = radius * rng.gen_range(0.55..1.0);
                center + Vec2::from_angle(ang) * r
            })
            .collect();
        let hull = convex_hull(&mut pts);
        if hull.len() >= 3 {
            if let Ok(poly) = Polygon::new(hull) {
                if poly.vertices().len() >= 3 {
                    return poly;
                }
            }
        }
    }
}

/// Monotone-chain convex hull, counterclockwise.
fn convex_hull(points: &mut [Vec2]) -> Vec<Vec2> {
    points.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    let n = points.len();
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * n);
    for &p in points.iter() {
        while hull.len() >= 2
            && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(p - hull[hull.len() - 1]) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in points.iter().rev() {
        while hull.len() >= lower
            && (hull[hull.len() - 1] - hull[hull.len() - 2]).cross(p - hull[hull.len() - 1]) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Generates a random planning scenario with pairwise-disjoint inflated
/// obstacles and terminals strictly outside all of them. Deterministic in
/// the seed.
pub fn random_scenario(cfg: &WorldgenConfig) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inflation = rng.gen_range(cfg.inflation.0..=cfg.inflation.1);
    let params = DynParams::new(
        rng.gen_range(cfg.u_max.0..=cfg.u_max.1),
        rng.gen_range(cfg.c_d.0..=cfg.c_d.1),
    )
    .expect("positive ranges");

    // Terminals on opposite halves so paths tend to cross the obstacle field.
    let te = cfg.terminal_extent;
    let start = Vec2::new(
        -te + rng.gen_range(0.0..0.3 * te),
        rng.gen_range(-0.8 * te..0.8 * te),
    );
    let goal = Vec2::new(
        te - rng.gen_range(0.0..0.3 * te),
        rng.gen_range(-0.8 * te..0.8 * te),
    );

    let mut obstacles: Vec<Polygon> = Vec::new();
    let mut inflated: Vec<InflatedObstacle> = Vec::new();
    let mut attempts = 0;
    while obstacles.len() < cfg.n_obstacles && attempts < 200 * cfg.n_obstacles.max(1) {
        attempts += 1;
        let center = Vec2::new(
            rng.gen_range(-cfg.extent..cfg.extent),
            rng.gen_range(-cfg.extent..cfg.extent),
        );
        let radius = rng.gen_range(cfg.obstacle_radius.0..=cfg.obstacle_radius.1);
        let poly = random_convex_polygon(&mut rng, center, radius, cfg.vertices.1);
        let Ok(obs) = inflate_polygon(&poly, inflation) else {
            continue;
        };
        let clear_of_terminals = obs.signed_clearance(start) > cfg.margin
            && obs.signed_clearance(goal) > cfg.margin;
        let clear_of_others = inflated.iter().all(|other| {
            poly.distance_to_polygon(other.source()) > 2.0 * inflation + cfg.margin
        });
        if clear_of_terminals && clear_of_others {
            obstacles.push(poly);
            inflated.push(obs);
        }
    }

    Scenario {
        obstacles,
        inflation,
        start,
        goal,
        params,
        v_start: 0.0,
        v_end: 0.0,
    }
}
