//! End-to-end planning and verification entry points used by the CLI.

use crate::roadmap::{self, PlannedPath, Roadmap, RoadmapError};
use crate::scenario::{scenario_hash, Scenario, ScenarioError};
use crate::sim::{audit_trajectory, AuditReport, AuditTolerances};
use crate::svg;
use crate::trajectory::{TrajectoryError, TrajectoryFile};
use crate::velocity::{
    sample_trajectory, solve_terminal_speeds, ProfileSegmentKind, SpeedProfile, VelocityError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Roadmap(#[from] RoadmapError),
    #[error(transparent)]
    Velocity(#[from] VelocityError),
}

impl PlanError {
    /// True when no collision-free path connects the terminals (CLI exit 2);
    /// everything else is an invalid scenario (exit 3).
    pub fn is_no_path(&self) -> bool {
        matches!(self, PlanError::Roadmap(RoadmapError::NoPath))
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("scenario hash mismatch: trajectory was planned for a different scenario")]
    HashMismatch,
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("audit failed:\n{0}")]
    AuditFailed(String),
}

#[derive(Debug, Clone)]
pub struct PlanOptions {
    /// Trajectory sampling step in seconds.
    pub dt: f64,
    /// Apply the ellipse search-space filter.
    pub ellipse_filter: bool,
    /// Render an SVG figure of the world, roadmap, path, and speed profile.
    pub svg: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            dt: 1e-3,
            ellipse_filter: true,
            svg: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoadmapStats {
    pub nodes_before_filter: usize,
    pub edges_before_filter: usize,
    pub nodes: usize,
    pub edges: usize,
}

/// Everything the planner produces for one scenario.
pub struct PlanResult {
    pub scenario_hash: String,
    pub kappa_m: f64,
    pub stats: RoadmapStats,
    pub path: PlannedPath,
    pub profile: SpeedProfile,
    pub trajectory: TrajectoryFile,
    pub audit: AuditReport,
    pub svg: Option<String>,
    pub roadmap: Roadmap,
}

/// Runs the full pipeline: validate, build the roadmap, attach terminals,
/// filter, search, profile, sample, and self-audit.
pub fn plan(scenario: &Scenario, options: &PlanOptions) -> Result<PlanResult, PlanError> {
    let inflated = scenario.validate()?;
    let kappa = roadmap::kappa_m(&inflated);

    let rm = roadmap::build_roadmap(&inflated)?;
    let rm = rm.attach_terminals(scenario.start, scenario.goal)?;
    let nodes_before_filter = rm.nodes().len();
    let edges_before_filter = rm.edges().len();
    let rm = if options.ellipse_filter {
        rm.ellipse_filter()?
    } else {
        rm
    };
    let stats = RoadmapStats {
        nodes_before_filter,
        edges_before_filter,
        nodes: rm.nodes().len(),
        edges: rm.edges().len(),
    };

    let path = rm.shortest_path()?;
    let profile = solve_terminal_speeds(&path, scenario.v_start, scenario.v_end, &scenario.params)?;
    let samples = sample_trajectory(&path, &profile, &scenario.params, options.dt);

    let scenario_hash = scenario_hash(&scenario.to_text());
    let trajectory = TrajectoryFile {
        scenario_hash: scenario_hash.clone(),
        u_max: scenario.params.u_max,
        c_d: scenario.params.c_d,
        inflation: scenario.inflation,
        total_time: profile.total_time,
        path_length: path.total_length(),
        rows: samples.clone(),
    };

    let audit = audit_trajectory(
        &samples,
        &inflated,
        &scenario.params,
        Some(&path),
        scenario.start,
        scenario.goal,
        &AuditTolerances::default(),
    );

    let svg = options
        .svg
        .then(|| svg::render_scene(scenario, &inflated, &rm, &path, &samples));

    Ok(PlanResult {
        scenario_hash,
        kappa_m: kappa,
        stats,
        path,
        profile,
        trajectory,
        audit,
        svg,
        roadmap: rm,
    })
}

/// Human-readable planning report.
pub fn render_report(result: &PlanResult) -> String {
    let mut out = String::new();
    out.push_str("arcplan report v1\n");
    out.push_str(&format!("scenario_sha256 {}\n", result.scenario_hash));
    out.push_str(&format!("kappa_m {:.6}\n", result.kappa_m));
    out.push_str(&format!(
        "roadmap nodes {} edges {} (before filter: nodes {} edges {})\n",
        result.stats.nodes,
        result.stats.edges,
        result.stats.nodes_before_filter,
        result.stats.edges_before_filter
    ));
    out.push_str(&format!(
        "path_length {:.9} m in {} segments ({} straight, {} arc)\n",
        result.path.total_length(),
        result.path.segments().len(),
        result.path.straight_count(),
        result.path.arc_count()
    ));
    out.push_str(&format!("total_time {:.9} s\n", result.profile.total_time));
    out.push_str("segments:\n");
    for (i, seg) in result.profile.segments.iter().enumerate() {
        let kind = match seg.kind {
            ProfileSegmentKind::Straight => "straight",
            ProfileSegmentKind::Arc(_) => "arc",
        };
        out.push_str(&format!(
            "  {i:>3} {kind:<8} length {:>12.6} m  v_in {:>10.6}  v_out {:>10.6}  time {:>12.6} s\n",
            seg.length, seg.v_in, seg.v_out, seg.time
        ));
    }
    out.push_str("audit:\n");
    for line in result.audit.render().lines() {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Verifies a trajectory file against its scenario: hash coupling, header
/// consistency, and the full constraint audit against a fresh re-plan.
pub fn verify(scenario_text: &str, trajectory_text: &str) -> Result<AuditReport, VerifyError> {
    let trajectory = TrajectoryFile::parse(trajectory_text)?;
    if trajectory.scenario_hash != scenario_hash(scenario_text) {
        return Err(VerifyError::HashMismatch);
    }
    let scenario = Scenario::parse(scenario_text).map_err(PlanError::from)?;
    // Deterministic re-plan recovers the intended path for deviation and
    // arc-cap checks.
    let result = plan(
        &scenario,
        &PlanOptions {
            svg: false,
            ..PlanOptions::default()
        },
    )?;
    let inflated = scenario.validate().map_err(PlanError::from)?;
    let report = audit_trajectory(
        &trajectory.rows,
        &inflated,
        &scenario.params,
        Some(&result.path),
        scenario.start,
        scenario.goal,
        &AuditTolerances::default(),
    );
    if report.passed {
        Ok(report)
    } else {
        Err(VerifyError::AuditFailed(report.render()))
    }
}
