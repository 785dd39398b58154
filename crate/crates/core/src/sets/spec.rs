//! Text form of [`SetDescriptor`]: `kind key=val ...` or a JSON object.
//!
//! ```text
//! box       l=-1,-1 u=1,1
//! ball2     c=2,2 r=1
//! ball1     n=3 r=1
//! ballinf   n=2 r=1
//! simplex   n=3
//! polytope  v=0,0;1,0;0,1
//! singleton p=1,2
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::SetDescriptor;
use crate::error::{OracleError, Result};
use crate::vector::Vector;

fn parse_err(msg: impl Into<String>) -> OracleError {
    OracleError::Parse(msg.into())
}

fn parse_scalar(key: &str, text: &str) -> Result<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_err(format!("{key}: '{text}' is not a number")))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(parse_err(format!("{key}: value must be finite")))
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_vector(text: &str) -> Result<Vector> {
    let entries = text
        .split(',')
        .map(|t| parse_scalar("vector", t))
        .collect::<Result<Vec<_>>>()?;
    Vector::new(entries).map_err(|e| parse_err(e.to_string()))
}

fn parse_dim(key: &str, text: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| parse_err(format!("{key}: '{text}' is not a dimension")))
}

struct Fields<'a> {
    kind: &'a str,
    values: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn take(&mut self, names: &[&'static str]) -> Result<&'a str> {
        for name in names {
            if let Some(v) = self.values.remove(name) {
                return Ok(v);
            }
        }
        Err(parse_err(format!("{} requires '{}='", self.kind, names[0])))
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(extra) => Err(parse_err(format!("{}: unknown key '{extra}'", self.kind))),
        }
    }
}

fn parse_mini(text: &str) -> Result<SetDescriptor> {
    let mut tokens = text.split_whitespace();
    let kind = tokens.next().ok_or_else(|| parse_err("empty set spec"))?;
    let mut fields = Fields {
        kind,
        values: BTreeMap::new(),
    };
    for token in tokens {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got '{token}'")))?;
        if fields.values.insert(key, value).is_some() {
            return Err(parse_err(format!("duplicate key '{key}'")));
        }
    }
    let set = match kind.to_ascii_lowercase().as_str() {
        "box" => SetDescriptor::Box {
            lower: parse_vector(fields.take(&["l", "lower"])?)?,
            upper: parse_vector(fields.take(&["u", "upper"])?)?,
        },
        "ball2" => SetDescriptor::Ball2 {
            center: parse_vector(fields.take(&["c", "center"])?)?,
            radius: parse_scalar("r", fields.take(&["r", "radius"])?)?,
        },
        "ball1" => SetDescriptor::Ball1 {
            dim: parse_dim("n", fields.take(&["n", "dim"])?)?,
            radius: parse_scalar("r", fields.take(&["r", "radius"])?)?,
        },
        "ballinf" => SetDescriptor::BallInf {
            dim: parse_dim("n", fields.take(&["n", "dim"])?)?,
            radius: parse_scalar("r", fields.take(&["r", "radius"])?)?,
        },
        "simplex" => SetDescriptor::Simplex {
            dim: parse_dim("n", fields.take(&["n", "dim"])?)?,
        },
        "polytope" => {
            let vertices = fields
                .take(&["v", "vertices"])?
                .split(';')
                .map(parse_vector)
                .collect::<Result<Vec<_>>>()?;
            SetDescriptor::polytope(vertices)?
        }
        "singleton" => SetDescriptor::Singleton {
            point: parse_vector(fields.take(&["p", "point"])?)?,
        },
        other => return Err(parse_err(format!("unknown set kind '{other}'"))),
    };
    fields.finish()?;
    set.validated()
}

/// Parses either the mini-grammar or a JSON object with a `kind` tag.
pub fn parse_set_spec(text: &str) -> Result<SetDescriptor> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let set: SetDescriptor =
            serde_json::from_str(trimmed).map_err(|e| parse_err(e.to_string()))?;
        set.validated()
    } else {
        parse_mini(trimmed)
    }
}

impl FromStr for SetDescriptor {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self> {
        parse_set_spec(s)
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Box { lower, upper } => write!(f, "box l={lower} u={upper}"),
            Self::Ball2 { center, radius } => write!(f, "ball2 c={center} r={radius}"),
            Self::Ball1 { dim, radius } => write!(f, "ball1 n={dim} r={radius}"),
            Self::BallInf { dim, radius } => write!(f, "ballinf n={dim} r={radius}"),
            Self::Simplex { dim } => write!(f, "simplex n={dim}"),
            Self::Polytope(p) => {
                f.write_str("polytope v=")?;
                for (i, v) in p.vertices().iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            Self::Singleton { point } => write!(f, "singleton p={point}"),
        }
    }
}
