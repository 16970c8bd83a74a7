//! Instance files: JSON or a line-oriented text format.
//!
//! JSON:
//! ```json
//! {"n": 3, "root": 0, "edges": [[0,1],[1,2]], "links": [{"u":0,"v":2,"w":1.5}]}
//! ```
//! Text (one record per line, `#` starts a comment):
//! ```text
//! n 3
//! root 0
//! e 0 1
//! e 1 2
//! l 0 2 3/2
//! ```
//! Weights may be integers, decimals or `p/q`. They are scaled by the LCM of
//! their denominators; the factor is written back as `"scale"` so that
//! serialized instances re-read to the same integer weights.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::instance::{Instance, ValidationError};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Error)]
pub enum InstanceFileError {
    #[error("malformed instance file: {0}")]
    Parse(String),
    #[error("invalid instance: {}", format_errors(.0))]
    Invalid(Vec<ValidationError>),
}

fn format_errors(errors: &[ValidationError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// An instance as read from disk, before scaling and validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub n: usize,
    pub root: usize,
    pub edges: Vec<(usize, usize)>,
    pub links: Vec<(usize, usize, Rational)>,
    /// Scale already applied to `links` by whoever wrote the file.
    pub prior_scale: u64,
}

#[derive(Deserialize)]
struct JsonInstance {
    n: usize,
    root: usize,
    edges: Vec<[usize; 2]>,
    links: Vec<JsonLink>,
    #[serde(default)]
    scale: Option<u64>,
}

#[derive(Deserialize)]
struct JsonLink {
    u: usize,
    v: usize,
    w: Value,
}

#[derive(Serialize)]
struct JsonInstanceOut<'a> {
    n: usize,
    root: usize,
    edges: Vec<[usize; 2]>,
    links: Vec<JsonLinkOut>,
    scale: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonLinkOut {
    u: usize,
    v: usize,
    w: u64,
}

impl RawInstance {
    pub fn parse(text: &str) -> Result<Self, InstanceFileError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    pub fn parse_json(text: &str) -> Result<Self, InstanceFileError> {
        let parsed: JsonInstance =
            serde_json::from_str(text).map_err(|e| InstanceFileError::Parse(e.to_string()))?;
        let mut links = Vec::with_capacity(parsed.links.len());
        for (i, l) in parsed.links.iter().enumerate() {
            let w = match &l.w {
                Value::Number(num) => parse_rational(&num.to_string()),
                Value::String(s) => parse_rational(s),
                other => {
                    return Err(InstanceFileError::Parse(format!("link {i}: weight {other} is not a number")))
                }
            }
            .map_err(|e| InstanceFileError::Parse(format!("link {i}: {e}")))?;
            links.push((l.u, l.v, w));
        }
        Ok(RawInstance {
            n: parsed.n,
            root: parsed.root,
            edges: parsed.edges.into_iter().map(|[u, v]| (u, v)).collect(),
            links,
            prior_scale: parsed.scale.unwrap_or(1).max(1),
        })
    }

    pub fn parse_text(text: &str) -> Result<Self, InstanceFileError> {
        let mut n = None;
        let mut root = 0;
        let mut scale = 1;
        let mut edges = Vec::new();
        let mut links = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |what: &str| InstanceFileError::Parse(format!("line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("`{s}` is not an integer")));
            match (fields[0], fields.len()) {
                ("n", 2) => n = Some(int(fields[1])?),
                ("root", 2) => root = int(fields[1])?,
                ("scale", 2) => scale = int(fields[1])?.max(1) as u64,
                ("e", 3) => edges.push((int(fields[1])?, int(fields[2])?)),
                ("l", 4) => {
                    let w = parse_rational(fields[3]).map_err(|e| err(&e.to_string()))?;
                    links.push((int(fields[1])?, int(fields[2])?, w));
                }
                _ => return Err(err(&format!("unrecognized record `{line}`"))),
            }
        }
        let n = n.ok_or_else(|| InstanceFileError::Parse("missing `n` record".into()))?;
        Ok(RawInstance {
            n,
            root,
            edges,
            links,
            prior_scale: scale,
        })
    }

    /// Scales weights to integers and validates.
    pub fn validate(&self) -> Result<Instance, InstanceFileError> {
        let lcm = self
            .links
            .iter()
            .fold(1i128, |acc, (_, _, w)| acc.lcm(w.denom()));
        let mut errors = Vec::new();
        let mut links = Vec::with_capacity(self.links.len());
        for (id, &(u, v, w)) in self.links.iter().enumerate() {
            let scaled = w * Rational::from_integer(lcm);
            debug_assert!(scaled.denom().is_one());
            let value = if scaled.is_positive() {
                match scaled.to_integer().to_u64() {
                    Some(x) => x,
                    None => {
                        return Err(InstanceFileError::Parse(format!("link {id}: weight overflows after scaling")))
                    }
                }
            } else {
                errors.push(ValidationError::NonpositiveWeight { link: id });
                1
            };
            links.push((u, v, value));
        }
        let scale = (lcm as u64)
            .checked_mul(self.prior_scale)
            .ok_or_else(|| InstanceFileError::Parse("scale overflows".into()))?;
        match Instance::with_scale(self.n, self.root, self.edges.clone(), links, scale) {
            Ok(inst) if errors.is_empty() => Ok(inst),
            Ok(_) => Err(InstanceFileError::Invalid(errors)),
            Err(mut more) => {
                errors.append(&mut more);
                Err(InstanceFileError::Invalid(errors))
            }
        }
    }
}

/// Reads and validates an instance from text (JSON or line format).
pub fn read_instance(text: &str) -> Result<Instance, InstanceFileError> {
    RawInstance::parse(text)?.validate()
}

/// Serializes with integer weights and the accumulated scale factor.
pub fn instance_to_json(instance: &Instance) -> String {
    let out = JsonInstanceOut {
        n: instance.n(),
        root: instance.root(),
        edges: instance.edges().iter().map(|&(u, v)| [u, v]).collect(),
        links: instance
            .links()
            .iter()
            .map(|l| JsonLinkOut {
                u: l.a,
                v: l.b,
                w: l.weight,
            })
            .collect(),
        scale: instance.scale(),
        note: None,
    };
    serde_json::to_string(&out).expect("instance serializes")
}
