//! Near time-optimal 2D trajectory planning for drag-damped double
//! integrators among convex polygonal obstacles.
//!
//! The pipeline has two stages. A geometric stage inflates the obstacles,
//! connects them with common tangent lines into a heading-continuous
//! roadmap, and runs a deterministic shortest-path search. A profiling
//! stage then assigns a near time-optimal speed profile to the resulting
//! chain of straights and circular arcs in closed form, respecting an
//! acceleration-norm bound under quadratic drag.
//!
//! Entry points:
//!
//! * [`pipeline::plan`] runs the whole pipeline on a [`scenario::Scenario`];
//! * [`roadmap::build_roadmap`] / [`roadmap::Roadmap::shortest_path`] for
//!   the geometric stage alone;
//! * [`velocity::solve_terminal_speeds`] / [`velocity::sample_trajectory`]
//!   for the profiling stage alone;
//! * [`sim`] holds the independent numerical oracle used by the test suite
//!   and the trajectory audit.
//!
//! With the default `parallel` feature, pairwise tangent computations run
//! on the rayon global pool; disable it for a fully sequential build.

pub mod geometry;
mod parallel;
pub mod pipeline;
pub mod roadmap;
pub mod scenario;
pub mod sim;
pub mod svg;
pub mod tangents;
pub mod trajectory;
pub mod vec2;
pub mod velocity;
pub mod worldgen;

pub use geometry::{inflate_polygon, InflatedObstacle, Polygon};
pub use pipeline::{plan, render_report, verify, PlanOptions, PlanResult};
pub use roadmap::{build_roadmap, build_roadmap_seq, count_path_intersections, kappa_m, PlannedPath, Roadmap};
pub use scenario::Scenario;
pub use tangents::{common_tangents, point_tangents, segment_collides};
pub use vec2::Vec2;
pub use velocity::{
    arc_min_time, arc_speed_cap, sample_trajectory, solve_terminal_speeds, straight_min_time,
    DynParams, SpeedProfile,
};
