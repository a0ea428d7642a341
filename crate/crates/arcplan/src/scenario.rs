//! Scenario description files.
//!
//! The format is line oriented plain text. The first non-comment line must
//! be the format tag `arcplan scenario v1`; after that, `key value...`
//! lines in any order. Lengths are meters, speeds m/s, accelerations m/s^2.
//!
//! ```text
//! arcplan scenario v1
//! u_max 1.0
//! drag 0.1
//! inflation 0.5
//! start -6.0 0.0
//! goal 6.0 1.0
//! v_start 0.0
//! v_end 0.0
//! obstacle -1.0 -1.0  1.0 -1.0  1.0 1.0  -1.0 1.0
//! ```

use crate::geometry::{inflate_polygon, GeometryError, InflatedObstacle, Polygon};
use crate::vec2::Vec2;
use crate::velocity::{DynParams, VelocityError};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCENARIO_TAG: &str = "arcplan scenario v1";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("obstacle {index}: {source}")]
    BadObstacle {
        index: usize,
        source: GeometryError,
    },
    #[error(transparent)]
    BadParams(#[from] VelocityError),
    #[error("inflation radius must be positive, got {0}")]
    BadInflation(f64),
    #[error("{which} lies inside inflated obstacle {index}")]
    TerminalInsideObstacle { which: &'static str, index: usize },
    #[error("inflated obstacles {0} and {1} overlap")]
    OverlappingObstacles(usize, usize),
    #[error("terminal speed {which}={value} is not feasible (limit {limit})")]
    BadTerminalSpeed {
        which: &'static str,
        value: f64,
        limit: f64,
    },
}

/// A complete planning problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub obstacles: Vec<Polygon>,
    pub inflation: f64,
    pub start: Vec2,
    pub goal: Vec2,
    pub params: DynParams,
    pub v_start: f64,
    pub v_end: f64,
}

impl Scenario {
    /// Parses the line-oriented scenario format.
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let mut u_max = None;
        let mut drag = None;
        let mut inflation = None;
        let mut start = None;
        let mut goal = None;
        let mut v_start = 0.0;
        let mut v_end = 0.0;
        let mut obstacles: Vec<Polygon> = Vec::new();
        let mut tag_seen = false;

        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !tag_seen {
                if line != SCENARIO_TAG {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("expected format tag `{SCENARIO_TAG}`, got `{line}`"),
                    });
                }
                tag_seen = true;
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            let values: Vec<&str> = parts.collect();
            let parse_f64 = |field: &str, s: &str| -> Result<f64, ScenarioError> {
                s.parse::<f64>().map_err(|_| ScenarioError::Parse {
                    line: line_no,
                    message: format!("field `{field}`: cannot parse `{s}` as a number"),
                })
            };
            let one = |field: &'static str, values: &[&str]| -> Result<f64, ScenarioError> {
                if values.len() != 1 {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("field `{field}` expects exactly one value"),
                    });
                }
                parse_f64(field, values[0])
            };
            let two = |field: &'static str, values: &[&str]| -> Result<Vec2, ScenarioError> {
                if values.len() != 2 {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("field `{field}` expects two values"),
                    });
                }
                Ok(Vec2::new(parse_f64(field, values[0])?, parse_f64(field, values[1])?))
            };
            match key {
                "u_max" => u_max = Some(one("u_max", &values)?),
                "drag" => drag = Some(one("drag", &values)?),
                "inflation" => inflation = Some(one("inflation", &values)?),
                "start" => start = Some(two("start", &values)?),
                "goal" => goal = Some(two("goal", &values)?),
                "v_start" => v_start = one("v_start", &values)?,
                "v_end" => v_end = one("v_end", &values)?,
                "obstacle" => {
                    if values.len() < 6 || !values.len().is_multiple_of(2) {
                        return Err(ScenarioError::Parse {
                            line: line_no,
                            message: "field `obstacle` expects at least three x y pairs".into(),
                        });
                    }
                    let mut verts = Vec::with_capacity(values.len() / 2);
                    for pair in values.chunks(2) {
                        verts.push(Vec2::new(
                            parse_f64("obstacle", pair[0])?,
                            parse_f64("obstacle", pair[1])?,
                        ));
                    }
                    let index = obstacles.len();
                    obstacles.push(
                        Polygon::new(verts)
                            .map_err(|source| ScenarioError::BadObstacle { index, source })?,
                    );
                }
                other => {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        message: format!("unknown field `{other}`"),
                    })
                }
            }
        }
        if !tag_seen {
            return Err(ScenarioError::Parse {
                line: 1,
                message: format!("missing format tag `{SCENARIO_TAG}`"),
            });
        }

        let params = DynParams::new(
            u_max.ok_or(ScenarioError::MissingField("u_max"))?,
            drag.ok_or(ScenarioError::MissingField("drag"))?,
        )?;
        Ok(Scenario {
            obstacles,
            inflation: inflation.ok_or(ScenarioError::MissingField("inflation"))?,
            start: start.ok_or(ScenarioError::MissingField("start"))?,
            goal: goal.ok_or(ScenarioError::MissingField("goal"))?,
            params,
            v_start,
            v_end,
        })
    }

    /// Canonical text form; floats carry 17 significant digits so reparsing
    /// is bit exact.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(SCENARIO_TAG);
        out.push('\n');
        out.push_str("# lengths m, speeds m/s, accelerations m/s^2, drag 1/m\n");
        out.push_str(&format!("u_max {}\n", fmt(self.params.u_max)));
        out.push_str(&format!("drag {}\n", fmt(self.params.c_d)));
        out.push_str(&format!("inflation {}\n", fmt(self.inflation)));
        out.push_str(&format!("start {} {}\n", fmt(self.start.x), fmt(self.start.y)));
        out.push_str(&format!("goal {} {}\n", fmt(self.goal.x), fmt(self.goal.y)));
        out.push_str(&format!("v_start {}\n", fmt(self.v_start)));
        out.push_str(&format!("v_end {}\n", fmt(self.v_end)));
        for o in &self.obstacles {
            out.push_str("obstacle");
            for v in o.vertices() {
                out.push_str(&format!(" {} {}", fmt(v.x), fmt(v.y)));
            }
            out.push('\n');
        }
        out
    }

    /// Inflates all obstacles.
    pub fn inflated_obstacles(&self) -> Result<Vec<InflatedObstacle>, ScenarioError> {
        if self.inflation <= 0.0 || self.inflation.is_nan() {
            return Err(ScenarioError::BadInflation(self.inflation));
        }
        self.obstacles
            .iter()
            .enumerate()
            .map(|(index, p)| {
                inflate_polygon(p, self.inflation)
                    .map_err(|source| ScenarioError::BadObstacle { index, source })
            })
            .collect()
    }

    /// Structural validation beyond parsing: positive inflation, disjoint
    /// inflated obstacles, terminals strictly outside, feasible terminal
    /// speeds.
    pub fn validate(&self) -> Result<Vec<InflatedObstacle>, ScenarioError> {
        let inflated = self.inflated_obstacles()?;
        for i in 0..inflated.len() {
            for j in (i + 1)..inflated.len() {
                if inflated[i].closure_intersects(&inflated[j]) {
                    return Err(ScenarioError::OverlappingObstacles(i, j));
                }
            }
            if inflated[i].signed_clearance(self.start) <= 0.0 {
                return Err(ScenarioError::TerminalInsideObstacle {
                    which: "start",
                    index: i,
                });
            }
            if inflated[i].signed_clearance(self.goal) <= 0.0 {
                return Err(ScenarioError::TerminalInsideObstacle {
                    which: "goal",
                    index: i,
                });
            }
        }
        let vbar = self.params.speed_limit();
        for (which, value) in [("v_start", self.v_start), ("v_end", self.v_end)] {
            if !(0.0..vbar).contains(&value) {
                return Err(ScenarioError::BadTerminalSpeed {
                    which: if which == "v_start" { "v_start" } else { "v_end" },
                    value,
                    limit: vbar,
                });
            }
        }
        Ok(inflated)
    }
}

/// SHA-256 of the raw scenario file bytes, hex encoded.
pub fn scenario_hash(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// 17-significant-digit float formatting used by all file formats.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Scenario {
        Scenario {
            obstacles: vec![Polygon::new(vec![
                Vec2::new(-1.0, -1.0),
                Vec2::new(1.0, -1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(-1.0, 1.0),
            ])
            .unwrap()],
            inflation: 0.5,
            start: Vec2::new(-6.0, 0.2),
            goal: Vec2::new(6.0, -0.3),
            params: DynParams::new(1.0, 0.1).unwrap(),
            v_start: 0.0,
            v_end: 0.0,
        }
    }

    #[test]
    fn round_trips_through_text() {
        let s = sample();
        let text = s.to_text();
        let back = Scenario::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.obstacles.len(), 1);
        assert_eq!(back.start, s.start);
        assert_eq!(back.params, s.params);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "arcplan scenario v1\nu_max notanumber\n";
        match Scenario::parse(text) {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(Scenario::parse("bogus\n").is_err());
        let missing = "arcplan scenario v1\nu_max 1.0\n";
        assert!(matches!(
            Scenario::parse(missing),
            Err(ScenarioError::MissingField(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_worlds() {
        let mut s = sample();
        s.start = Vec2::new(0.0, 0.0);
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::TerminalInsideObstacle { which: "start", .. })
        ));

        let mut s = sample();
        s.obstacles.push(s.obstacles[0].clone());
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::OverlappingObstacles(0, 1))
        ));

        let mut s = sample();
        s.v_end = 100.0;
        assert!(matches!(
            s.validate(),
            Err(ScenarioError::BadTerminalSpeed { .. })
        ));
    }

    #[test]
    fn hash_is_stable_and_content_sensitive() {
        let s = sample();
        let h1 = scenario_hash(&s.to_text());
        let h2 = scenario_hash(&s.to_text());
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 64);
        let mut other = s.clone();
        other.v_end = 0.1;
        assert_ne!(h1, scenario_hash(&other.to_text()));
    }
}
