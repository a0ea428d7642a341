use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Near time-optimal trajectory planner for drag-damped double integrators
/// in 2D convex-polygon worlds.
#[derive(Parser)]
#[command(name = "arcplan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a trajectory for a scenario file and write the outputs.
    Plan {
        /// Scenario file path.
        scenario: PathBuf,
        /// Output directory (created if missing).
        #[arg(short, long, default_value = "out")]
        output: PathBuf,
        /// Trajectory sampling step in seconds.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Disable the ellipse search-space filter.
        #[arg(long)]
        no_filter: bool,
        /// Also write an SVG figure of the scene.
        #[arg(long)]
        svg: bool,
    },
    /// Verify a trajectory file against its scenario.
    Verify {
        /// Trajectory file path.
        trajectory: PathBuf,
        /// Scenario file path.
        scenario: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ARCPLAN_LOG")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Plan {
            scenario,
            output,
            dt,
            no_filter,
            svg,
        } => run_plan(&scenario, &output, dt, no_filter, svg),
        Command::Verify {
            trajectory,
            scenario,
        } => run_verify(&trajectory, &scenario),
    }
}

fn run_plan(scenario_path: &Path, out_dir: &Path, dt: f64, no_filter: bool, svg: bool) -> ExitCode {
    let text = match std::fs::read_to_string(scenario_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", scenario_path.display());
            return ExitCode::from(3);
        }
    };
    let scenario = match arcplan::Scenario::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid scenario: {e}");
            return ExitCode::from(3);
        }
    };
    if dt <= 0.0 {
        eprintln!("error: --dt must be positive");
        return ExitCode::from(3);
    }
    let options = arcplan::PlanOptions {
        dt,
        ellipse_filter: !no_filter,
        svg,
    };
    // The trajectory header hashes the file bytes as given, not the
    // canonical re-serialization, so verify couples to the same file.
    let result = match plan_with_file_hash(&scenario, &text, &options) {
        Ok(r) => r,
        Err(e) => {
            if e.is_no_path() {
                eprintln!("error: no-path: {e}");
                return ExitCode::from(2);
            }
            eprintln!("error: invalid scenario: {e}");
            return ExitCode::from(3);
        }
    };

    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return ExitCode::from(3);
    }
    let write = |name: &str, contents: &str| -> std::io::Result<()> {
        std::fs::write(out_dir.join(name), contents)
    };
    let report = arcplan::render_report(&result);
    let mut io = write("trajectory.txt", &result.trajectory.render())
        .and_then(|_| write("report.txt", &report));
    if let Some(ref doc) = result.svg {
        io = io.and_then(|_| write("scene.svg", doc));
    }
    if let Err(e) = io {
        eprintln!("error: cannot write outputs: {e}");
        return ExitCode::from(3);
    }

    print!("{report}");
    if !result.audit.passed {
        eprintln!("error: self-audit failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn plan_with_file_hash(
    scenario: &arcplan::Scenario,
    file_text: &str,
    options: &arcplan::PlanOptions,
) -> Result<arcplan::PlanResult, arcplan::pipeline::PlanError> {
    let mut result = arcplan::plan(scenario, options)?;
    let file_hash = arcplan::scenario::scenario_hash(file_text);
    result.trajectory.scenario_hash = file_hash.clone();
    result.scenario_hash = file_hash;
    Ok(result)
}

fn run_verify(trajectory_path: &Path, scenario_path: &Path) -> ExitCode {
    let scenario_text = match std::fs::read_to_string(scenario_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", scenario_path.display());
            return ExitCode::from(3);
        }
    };
    let trajectory_text = match std::fs::read_to_string(trajectory_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", trajectory_path.display());
            return ExitCode::from(3);
        }
    };
    match arcplan::verify(&scenario_text, &trajectory_text) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::SUCCESS
        }
        Err(arcplan::pipeline::VerifyError::HashMismatch) => {
            eprintln!("error: scenario hash mismatch");
            ExitCode::from(3)
        }
        Err(arcplan::pipeline::VerifyError::Trajectory(e)) => {
            eprintln!("error: invalid trajectory file: {e}");
            ExitCode::from(3)
        }
        Err(arcplan::pipeline::VerifyError::Plan(e)) => {
            eprintln!("error: invalid scenario: {e}");
            ExitCode::from(3)
        }
        Err(arcplan::pipeline::VerifyError::AuditFailed(report)) => {
            eprintln!("verification failed:\n{report}");
            ExitCode::from(1)
        }
    }
}
