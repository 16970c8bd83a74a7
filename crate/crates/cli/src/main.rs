use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wtap_core::baseline::cheapest_disjoint_uplink_cover;
use wtap_core::bench::{bench, BenchConfig};
use wtap_core::component_dp::slack_max;
use wtap_core::decomposition::{decompose, verify_witness_structure};
use wtap_core::generators::{gen_fig2, gen_fig3, gen_random};
use wtap_core::greedy::{self, GreedyOptions};
use wtap_core::io::{instance_to_json, read_instance, InstanceFileError};
use wtap_core::oracle::{exact_opt, OracleBudget};
use wtap_core::ratio_search::best_ratio_component;
use wtap_core::rational::{format_rational, parse_rational};
use wtap_core::{BudgetExceeded, Instance, LinkCatalog, LinkId, Rational, SolveError};

#[derive(Parser)]
#[command(name = "wtap", version, about = "Weighted tree augmentation solver")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Solve an instance.
    Solve {
        #[arg(long, value_enum, default_value_t = Algorithm::Relgreedy)]
        algorithm: Algorithm,
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        eps: Rational,
        #[arg(long)]
        k_override: Option<usize>,
        #[arg(long)]
        full_shadows: bool,
        file: PathBuf,
    },
    /// Optimal solution by exhaustive search (small instances only).
    Exact { file: PathBuf },
    /// Best-ratio k-thin component against the baseline up-links.
    Ratio {
        #[arg(long)]
        k: usize,
        file: PathBuf,
    },
    /// Slack-maximizing k-thin component at a fixed ratio.
    Component {
        #[arg(long, value_parser = rational_arg)]
        rho: Rational,
        #[arg(long)]
        k: usize,
        file: PathBuf,
    },
    /// Decompose a solution against the baseline up-links.
    Decompose {
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        /// Solution file: a JSON id array, `{"links": [...]}`, or `solve` output.
        #[arg(long)]
        solution: PathBuf,
        instance: PathBuf,
    },
    /// Run a benchmark config.
    Bench {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum Family {
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        links: usize,
        #[arg(long, default_value_t = 10)]
        weight_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Fig2 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: u64,
    },
    Fig3 {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Uplink2,
    Relgreedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn load(path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(read_instance(&text)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

fn catalog_json(catalog: &LinkCatalog<'_>, ids: &[LinkId]) -> Value {
    ids.iter()
        .map(|&id| {
            let l = catalog.link(id);
            json!({"id": id, "a": l.a, "b": l.b, "weight": l.weight, "original": l.original()})
        })
        .collect()
}

fn uplink_setup(instance: &Instance) -> Result<(LinkCatalog<'_>, Vec<LinkId>, Vec<LinkId>)> {
    let base = cheapest_disjoint_uplink_cover(instance)?;
    let mut catalog = LinkCatalog::new(instance);
    let mut uplinks = base.to_catalog(&mut catalog);
    uplinks.sort_unstable();
    uplinks.dedup();
    let mut search: Vec<LinkId> = catalog.originals().chain(uplinks.iter().copied()).collect();
    search.sort_unstable();
    search.dedup();
    Ok((catalog, uplinks, search))
}

fn read_solution(path: &PathBuf) -> Result<Vec<LinkId>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).context("solution file is not JSON")?;
    let arr = match &v {
        Value::Array(_) => &v,
        Value::Object(o) if o.contains_key("links") => &o["links"],
        Value::Object(o) if o.contains_key("solution") => &o["solution"]["links"],
        _ => bail!("solution file has no link list"),
    };
    serde_json::from_value(arr.clone()).context("link list must hold integer ids")
}

fn run(cli: &Cli) -> Result<String> {
    Ok(match &cli.command {
        Command::Gen { family } => {
            let inst = match *family {
                Family::Random {
                    n,
                    links,
                    weight_max,
                    seed,
                } => {
                    if n == 0 {
                        bail!("--n must be at least 1");
                    }
                    gen_random(n, links, weight_max, seed)
                }
                Family::Fig2 { d, m } => {
                    if d < 2 || m < 1 {
                        bail!("fig2 needs --d >= 2 and --m >= 1");
                    }
                    gen_fig2(d, m)
                }
                Family::Fig3 { m } => {
                    if m < 1 {
                        bail!("fig3 needs --m >= 1");
                    }
                    gen_fig3(m)
                }
            };
            instance_to_json(&inst)
        }
        Command::Solve {
            algorithm,
            eps,
            k_override,
            full_shadows,
            file,
        } => {
            let inst = load(file)?;
            match algorithm {
                Algorithm::Uplink2 => {
                    let base = cheapest_disjoint_uplink_cover(&inst)?;
                    let sol = base.to_solution(&inst);
                    pretty(&json!({
                        "paths": base.paths,
                        "weight": base.weight,
                        "witness_links": base.witness_links(),
                        "solution": sol,
                    }))
                }
                Algorithm::Relgreedy => {
                    let options = GreedyOptions {
                        k_override: *k_override,
                        full_shadows: *full_shadows,
                    };
                    let (sol, trace) = greedy::solve(&inst, *eps, &options)?;
                    pretty(&json!({"solution": sol, "weight": sol.weight, "k": trace.k, "trace": trace}))
                }
            }
        }
        Command::Exact { file } => {
            let inst = load(file)?;
            let sol = exact_opt(&inst, &OracleBudget::default())?;
            pretty(&json!({"solution": sol, "weight": sol.weight}))
        }
        Command::Ratio { k, file } => {
            let inst = load(file)?;
            let (catalog, uplinks, search) = uplink_setup(&inst)?;
            let (best, trace) = best_ratio_component(&catalog, &uplinks, *k, &search)?;
            pretty(&json!({
                "rho": format_rational(&best.rho),
                "component": catalog_json(&catalog, &best.component),
                "drop": catalog_json(&catalog, &best.drop),
                "component_weight": best.component_weight,
                "drop_weight": best.drop_weight,
                "search": trace,
            }))
        }
        Command::Component { rho, k, file } => {
            let inst = load(file)?;
            let (catalog, uplinks, search) = uplink_setup(&inst)?;
            let best = slack_max(&catalog, &uplinks, *k, *rho, &search);
            pretty(&json!({
                "rho": format_rational(rho),
                "slack": format_rational(&best.slack),
                "component": catalog_json(&catalog, &best.component),
            }))
        }
        Command::Decompose {
            eps,
            solution,
            instance,
        } => {
            let inst = load(instance)?;
            let links = read_solution(solution)?;
            if let Some(&bad) = links.iter().find(|&&l| l >= inst.links().len()) {
                bail!("solution names link {bad}, but the instance has {}", inst.links().len());
            }
            if !inst.covers_all(&links) {
                return Err(SolveError::NotASolution.into());
            }
            let (catalog, uplinks, _) = uplink_setup(&inst)?;
            let report = verify_witness_structure(&catalog, &links, &uplinks);
            let dec = decompose(&catalog, &links, &uplinks, *eps)?;
            let check = dec.check(&catalog, &uplinks, *eps);
            pretty(&json!({
                "uplinks": catalog_json(&catalog, &uplinks),
                "k": dec.k,
                "residue": dec.residue,
                "removed": dec.removed,
                "parts": dec.parts,
                "labels": dec.labels,
                "witnesses": dec.graph.witnesses,
                "arcs": dec.graph.arcs,
                "guarantees": check.err().unwrap_or_else(|| "ok".into()),
                "lemmas": report,
            }))
        }
        Command::Bench { config, format, seed } => {
            let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: BenchConfig = serde_json::from_str(&text).context("bad bench config")?;
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            let report = bench(&cfg);
            match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            }
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InstanceFileError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<BudgetExceeded>().is_some() {
        return 3;
    }
    match err.downcast_ref::<SolveError>() {
        Some(SolveError::Budget(_)) => 3,
        Some(SolveError::Infeasible(_)) | Some(SolveError::NotASolution) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|mut text| {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &cli.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
