//! Benchmark runner: instances x algorithms -> rows, as JSON or CSV.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::generators::{gen_fig2, gen_fig3, gen_random};
use crate::greedy::{self, GreedyOptions};
use crate::instance::Instance;
use crate::io::read_instance;
use crate::oracle::{exact_opt, OracleBudget};
use crate::rational::{format_rational, parse_rational, Rational};

pub const SCHEMA_VERSION: u32 = 1;
const PARAM_STREAM: u64 = 3;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub instances: Vec<InstanceSource>,
    #[serde(default)]
    pub algorithms: Vec<AlgorithmSpec>,
    /// Attach `exact_opt` where the oracle budget allows.
    #[serde(default = "yes")]
    pub exact: bool,
    /// Record wall time per row (makes reports nondeterministic).
    #[serde(default)]
    pub timing: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    Random {
        count: usize,
        #[serde(default = "two")]
        n_min: usize,
        n_max: usize,
        /// Links per instance; defaults to `n`.
        #[serde(default)]
        links: Option<usize>,
        #[serde(default = "ten")]
        weight_max: u64,
    },
    Fig2 { d: Vec<usize>, m: u64 },
    Fig3 { m: Vec<usize> },
    File { path: String },
}

fn two() -> usize {
    2
}

fn ten() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    Uplink2,
    Relgreedy {
        #[serde(default)]
        eps: Option<String>,
        #[serde(default)]
        k: Option<usize>,
        #[serde(default)]
        full_shadows: bool,
    },
    Exact,
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Uplink2 => "uplink2".into(),
            AlgorithmSpec::Exact => "exact".into(),
            AlgorithmSpec::Relgreedy { eps, k, full_shadows } => {
                let mut s = "relgreedy".to_string();
                if let Some(e) = eps {
                    s += &format!(" eps={e}");
                }
                if let Some(k) = k {
                    s += &format!(" k={k}");
                }
                if *full_shadows {
                    s += " full_shadows";
                }
                s
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub params: Value,
    pub algorithm: String,
    pub weight: Option<u64>,
    pub exact_weight: Option<u64>,
    pub ratio: Option<String>,
    pub iterations: Option<usize>,
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchMetadata {
    pub schema_version: u32,
    pub seed: u64,
    pub version: &'static str,
    pub config: BenchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub metadata: BenchMetadata,
    pub rows: Vec<BenchRow>,
}

struct Prepared {
    id: String,
    params: Value,
    instance: Result<Instance, String>,
}

fn prepare(config: &BenchConfig) -> Vec<Prepared> {
    let mut out = Vec::new();
    let mut push = |kind: &str, params: Value, instance: Result<Instance, String>| {
        let id = format!("{:04}-{kind}", out.len());
        out.push(Prepared { id, params, instance });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(PARAM_STREAM);
    for source in &config.instances {
        match source {
            InstanceSource::Random {
                count,
                n_min,
                n_max,
                links,
                weight_max,
            } => {
                for _ in 0..*count {
                    let n = rng.gen_range((*n_min).max(1)..=(*n_max).max(*n_min).max(1));
                    let seed: u64 = rng.gen();
                    let links = links.unwrap_or(n);
                    let params = json!({"n": n, "links": links, "weight_max": weight_max, "seed": seed});
                    push("random", params, Ok(gen_random(n, links, *weight_max, seed)));
                }
            }
            InstanceSource::Fig2 { d, m } => {
                for &d in d {
                    let inst = if d >= 2 && *m >= 1 {
                        Ok(gen_fig2(d, *m))
                    } else {
                        Err(format!("fig2 needs d >= 2 and M >= 1, got d={d} M={m}"))
                    };
                    push("fig2", json!({"d": d, "m": m}), inst);
                }
            }
            InstanceSource::Fig3 { m } => {
                for &m in m {
                    let inst = if m >= 1 { Ok(gen_fig3(m)) } else { Err("fig3 needs m >= 1".into()) };
                    push("fig3", json!({"m": m}), inst);
                }
            }
            InstanceSource::File { path } => {
                let inst = std::fs::read_to_string(path)
                    .map_err(|e| e.to_string())
                    .and_then(|text| read_instance(&text).map_err(|e| e.to_string()));
                push("file", json!({"path": path}), inst);
            }
        }
    }
    out
}

struct Outcome {
    weight: u64,
    iterations: Option<usize>,
}

fn run_algorithm(instance: &Instance, spec: &AlgorithmSpec, budget: &OracleBudget) -> Result<Outcome, String> {
    match spec {
        AlgorithmSpec::Uplink2 => greedy::two_approx_only(instance)
            .map(|s| Outcome {
                weight: s.weight,
                iterations: None,
            })
            .map_err(|e| e.to_string()),
        AlgorithmSpec::Exact => exact_opt(instance, budget)
            .map(|s| Outcome {
                weight: s.weight,
                iterations: None,
            })
            .map_err(|e| e.to_string()),
        AlgorithmSpec::Relgreedy { eps, k, full_shadows } => {
            let eps = match eps {
                Some(text) => parse_rational(text).map_err(|e| e.to_string())?,
                None => Rational::from_integer(1),
            };
            let options = GreedyOptions {
                k_override: *k,
                full_shadows: *full_shadows,
            };
            greedy::solve(instance, eps, &options)
                .map(|(s, trace)| Outcome {
                    weight: s.weight,
                    iterations: Some(trace.iterations.len()),
                })
                .map_err(|e| e.to_string())
        }
    }
}

/// Runs every (instance, algorithm) pair on the rayon pool. Failures are
/// recorded in the row's `error` field.
pub fn bench(config: &BenchConfig) -> BenchReport {
    let budget = OracleBudget::default();
    let prepared = prepare(config);
    let exact: Vec<Option<u64>> = prepared
        .par_iter()
        .map(|p| match (&p.instance, config.exact) {
            (Ok(inst), true) => exact_opt(inst, &budget).ok().map(|s| s.weight),
            _ => None,
        })
        .collect();
    let jobs: Vec<(usize, &AlgorithmSpec)> = (0..prepared.len())
        .flat_map(|i| config.algorithms.iter().map(move |a| (i, a)))
        .collect();
    let mut rows: Vec<BenchRow> = jobs
        .par_iter()
        .map(|&(i, spec)| {
            let p = &prepared[i];
            let start = Instant::now();
            let result = p.instance.clone().and_then(|inst| run_algorithm(&inst, spec, &budget));
            let wall = start.elapsed().as_secs_f64() * 1000.0;
            let (weight, iterations, error) = match result {
                Ok(o) => (Some(o.weight), o.iterations, None),
                Err(e) => (None, None, Some(e)),
            };
            let ratio = match (weight, exact[i]) {
                (Some(w), Some(x)) => Some(format_rational(&Rational::new(w as i128, x as i128))),
                _ => None,
            };
            BenchRow {
                instance_id: p.id.clone(),
                params: p.params.clone(),
                algorithm: spec.label(),
                weight,
                exact_weight: exact[i],
                ratio,
                iterations,
                wall_ms: config.timing.then_some(wall),
                error,
            }
        })
        .collect();
    rows.sort_by(|a, b| (&a.instance_id, &a.algorithm).cmp(&(&b.instance_id, &b.algorithm)));
    BenchReport {
        metadata: BenchMetadata {
            schema_version: SCHEMA_VERSION,
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
        },
        rows,
    }
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        #[derive(Serialize)]
        struct Flat<'a> {
            instance_id: &'a str,
            params: String,
            algorithm: &'a str,
            weight: Option<u64>,
            exact_weight: Option<u64>,
            ratio: Option<&'a str>,
            iterations: Option<usize>,
            wall_ms: Option<f64>,
            error: Option<&'a str>,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record([
                "instance_id",
                "params",
                "algorithm",
                "weight",
                "exact_weight",
                "ratio",
                "iterations",
                "wall_ms",
                "error",
            ])
            .expect("in-memory write");
        }
        for r in &self.rows {
            w.serialize(Flat {
                instance_id: &r.instance_id,
                params: r.params.to_string(),
                algorithm: &r.algorithm,
                weight: r.weight,
                exact_weight: r.exact_weight,
                ratio: r.ratio.as_deref(),
                iterations: r.iterations,
                wall_ms: r.wall_ms,
                error: r.error.as_deref(),
            })
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
