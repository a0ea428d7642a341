//! Trajectory files: the sampled output of the planner.
//!
//! Line-oriented text, same conventions as scenario files. Header carries
//! the scenario hash and summary metadata; every row is
//! `t x y vx vy ux uy gamma` with 17 significant digits per value so
//! repeated runs are byte identical.

use crate::scenario::fmt;
use crate::vec2::Vec2;
use crate::velocity::TrajectorySample;
use thiserror::Error;

pub const TRAJECTORY_TAG: &str = "arcplan trajectory v1";

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing header field `{0}`")]
    MissingField(&'static str),
    #[error("rows must have strictly increasing time (row {0})")]
    NonMonotonicTime(usize),
    #[error("trajectory has no rows")]
    Empty,
}

/// Parsed trajectory file.
#[derive(Debug, Clone)]
pub struct TrajectoryFile {
    pub scenario_hash: String,
    pub u_max: f64,
    pub c_d: f64,
    pub inflation: f64,
    pub total_time: f64,
    pub path_length: f64,
    pub rows: Vec<TrajectorySample>,
}

impl TrajectoryFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(TRAJECTORY_TAG);
        out.push('\n');
        out.push_str(&format!("scenario_sha256 {}\n", self.scenario_hash));
        out.push_str(&format!(
            "u_max {} drag {} inflation {}\n",
            fmt(self.u_max),
            fmt(self.c_d),
            fmt(self.inflation)
        ));
        out.push_str(&format!(
            "total_time {} path_length {}\n",
            fmt(self.total_time),
            fmt(self.path_length)
        ));
        out.push_str("columns t x y vx vy ux uy gamma\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{} {} {} {} {} {} {} {}\n",
                fmt(r.t),
                fmt(r.position.x),
                fmt(r.position.y),
                fmt(r.velocity.x),
                fmt(r.velocity.y),
                fmt(r.accel.x),
                fmt(r.accel.y),
                fmt(r.gamma)
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<TrajectoryFile, TrajectoryError> {
        let lines = text.lines().enumerate();
        let mut tag_seen = false;
        let mut scenario_hash = None;
        let mut u_max = None;
        let mut c_d = None;
        let mut inflation = None;
        let mut total_time = None;
        let mut path_length = None;
        let mut rows: Vec<TrajectorySample> = Vec::new();
        let mut columns_seen = false;

        let parse_f64 = |line: usize, s: &str| -> Result<f64, TrajectoryError> {
            s.parse::<f64>().map_err(|_| TrajectoryError::Parse {
                line,
                message: format!("cannot parse `{s}` as a number"),
            })
        };

        for (no, raw) in lines {
            let line_no = no + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !tag_seen {
                if line != TRAJECTORY_TAG {
                    return Err(TrajectoryError::Parse {
                        line: line_no,
                        message: format!("expected format tag `{TRAJECTORY_TAG}`"),
                    });
                }
                tag_seen = true;
                continue;
            }
            if !columns_seen {
                let mut parts = line.split_whitespace();
                match parts.next().unwrap() {
                    "scenario_sha256" => {
                        scenario_hash = Some(parts.next().unwrap_or("").to_string());
                    }
                    "u_max" => {
                        let vals: Vec<&str> = parts.collect();
                        if vals.len() != 5 || vals[1] != "drag" || vals[3] != "inflation" {
                            return Err(TrajectoryError::Parse {
                                line: line_no,
                                message: "expected `u_max <v> drag <v> inflation <v>`".into(),
                            });
                        }
                        u_max = Some(parse_f64(line_no, vals[0])?);
                        c_d = Some(parse_f64(line_no, vals[2])?);
                        inflation = Some(parse_f64(line_no, vals[4])?);
                    }
                    "total_time" => {
                        let vals: Vec<&str> = parts.collect();
                        if vals.len() != 3 || vals[1] != "path_length" {
                            return Err(TrajectoryError::Parse {
                                line: line_no,
                                message: "expected `total_time <v> path_length <v>`".into(),
                            });
                        }
                        total_time = Some(parse_f64(line_no, vals[0])?);
                        path_length = Some(parse_f64(line_no, vals[2])?);
                    }
                    "columns" => {
                        columns_seen = true;
                    }
                    other => {
                        return Err(TrajectoryError::Parse {
                            line: line_no,
                            message: format!("unknown header field `{other}`"),
                        })
                    }
                }
                continue;
            }
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != 8 {
                return Err(TrajectoryError::Parse {
                    line: line_no,
                    message: format!("expected 8 columns, got {}", vals.len()),
                });
            }
            let nums: Vec<f64> = vals
                .iter()
                .map(|s| parse_f64(line_no, s))
                .collect::<Result<_, _>>()?;
            rows.push(TrajectorySample {
                t: nums[0],
                position: Vec2::new(nums[1], nums[2]),
                velocity: Vec2::new(nums[3], nums[4]),
                accel: Vec2::new(nums[5], nums[6]),
                gamma: nums[7],
            });
        }

        if rows.is_empty() {
            return Err(TrajectoryError::Empty);
        }
        for (i, w) in rows.windows(2).enumerate() {
            if w[1].t <= w[0].t {
                return Err(TrajectoryError::NonMonotonicTime(i + 1));
            }
        }
        Ok(TrajectoryFile {
            scenario_hash: scenario_hash.ok_or(TrajectoryError::MissingField("scenario_sha256"))?,
            u_max: u_max.ok_or(TrajectoryError::MissingField("u_max"))?,
            c_d: c_d.ok_or(TrajectoryError::MissingField("drag"))?,
            inflation: inflation.ok_or(TrajectoryError::MissingField("inflation"))?,
            total_time: total_time.ok_or(TrajectoryError::MissingField("total_time"))?,
            path_length: path_length.ok_or(TrajectoryError::MissingField("path_length"))?,
            rows,
        })
    }
}
