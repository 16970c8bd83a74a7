//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::io::Write;
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use wtap_core::baseline::cheapest_disjoint_uplink_cover;
use wtap_core::bench::{bench, AlgorithmSpec, BenchConfig, InstanceSource};
use wtap_core::component_dp::slack_max;
use wtap_core::decomposition::{decompose, verify_witness_structure};
use wtap_core::generators::{gen_fig2, gen_random};
use wtap_core::greedy::{self, GreedyTrace};
use wtap_core::io::instance_to_json;
use wtap_core::oracle::{brute_best_kthin, brute_max_slack, brute_uplink_cover, exact_opt, OracleBudget};
use wtap_core::ratio_search::best_ratio_component;
use wtap_core::{Instance, LinkCatalog, LinkId, Rational};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_instance(r: &mut ChaCha8Rng, n_max: usize, links_per_vertex: usize) -> Instance {
    let n = r.gen_range(1..=n_max);
    let links = r.gen_range(0..=links_per_vertex * n);
    let wmax = r.gen_range(1..=20);
    gen_random(n, links, wmax, r.gen())
}

fn uplinks_of(inst: &Instance) -> (LinkCatalog<'_>, Vec<LinkId>, Vec<LinkId>) {
    let base = cheapest_disjoint_uplink_cover(inst).unwrap();
    let mut cat = LinkCatalog::new(inst);
    let mut u = base.to_catalog(&mut cat);
    u.sort_unstable();
    u.dedup();
    let mut search: Vec<LinkId> = cat.originals().chain(u.iter().copied()).collect();
    search.sort_unstable();
    search.dedup();
    (cat, u, search)
}

fn first_err(results: Vec<Result<(), String>>) -> Result<(), String> {
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    match failures.first() {
        None => Ok(()),
        Some(f) => Err(format!("{} failures, first: {f}", failures.len())),
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    if start.elapsed() > limit {
        return Err(format!("took {:.1?}, limit {limit:?}", start.elapsed()));
    }
    Ok(())
}

fn criterion_1(traces: &Mutex<Vec<(GreedyTrace, u64)>>) -> Outcome {
    let start = Instant::now();
    let results: Vec<Result<(), String>> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let inst = random_instance(&mut rng(1000 + i), 30, 2);
            let base = cheapest_disjoint_uplink_cover(&inst).map_err(|e| format!("#{i}: {e}"))?;
            if !base.to_solution(&inst).covers(&inst) {
                return Err(format!("#{i}: baseline leaves an edge uncovered"));
            }
            let (sol, trace) = greedy::solve_with_k(&inst, 2, false).map_err(|e| format!("#{i}: {e}"))?;
            if !sol.covers(&inst) {
                return Err(format!("#{i}: greedy leaves an edge uncovered"));
            }
            traces.lock().unwrap().push((trace, base.weight));
            Ok(())
        })
        .collect();
    first_err(results)?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("500 instances feasible in {:.1?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let results: Vec<Result<(), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(2000 + i);
            let n = r.gen_range(1..=9);
            let links = r.gen_range(0..=(2 * n).min(16));
            let inst = gen_random(n, links, r.gen_range(1..=20), r.gen());
            let dp = cheapest_disjoint_uplink_cover(&inst).map_err(|e| e.to_string())?;
            let brute = brute_uplink_cover(&inst, &budget).map_err(|e| e.to_string())?;
            if dp.weight != brute.weight {
                return Err(format!("#{i}: DP {} vs brute {}", dp.weight, brute.weight));
            }
            let opt = exact_opt(&inst, &budget).map_err(|e| format!("#{i}: {e}"))?;
            if dp.weight > 2 * opt.weight {
                return Err(format!("#{i}: w(U) {} > 2 * {}", dp.weight, opt.weight));
            }
            Ok(())
        })
        .collect();
    first_err(results)?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("200 instances, DP = brute and <= 2 OPT, {:.1?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut cases = Vec::new();
    let mut seed = 3000u64;
    while cases.len() < 200 {
        let mut r = rng(seed);
        seed += 1;
        let n = r.gen_range(2..=8);
        let links = r.gen_range(1..=n + 2);
        let inst = gen_random(n, links, r.gen_range(1..=12), r.gen());
        let search_len = uplinks_of(&inst).2.len();
        if search_len <= 12 {
            cases.push((inst, r.gen_range(1..=3usize)));
        }
    }
    let probes = Mutex::new(0usize);
    let results: Vec<Result<(), String>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, (inst, k))| {
            let (cat, u, search) = uplinks_of(inst);
            let (best, trace) = best_ratio_component(&cat, &u, *k, &search).map_err(|e| format!("#{i}: {e}"))?;
            let brute = brute_best_kthin(&cat, &u, *k, &search, &budget)
                .map_err(|e| e.to_string())?
                .ok_or(format!("#{i}: brute found no component"))?;
            if best.rho != brute.rho {
                return Err(format!("#{i} k={k}: rho* {} vs brute {}", best.rho, brute.rho));
            }
            for p in &trace.probes {
                let dp = slack_max(&cat, &u, *k, p.rho, &search);
                let (bs, _) = brute_max_slack(&cat, &u, *k, p.rho, &search, &budget).map_err(|e| e.to_string())?;
                if dp.slack != bs {
                    return Err(format!("#{i} k={k} rho={}: slack {} vs brute {bs}", p.rho, dp.slack));
                }
            }
            *probes.lock().unwrap() += trace.probes.len();
            Ok(())
        })
        .collect();
    first_err(results)?;
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "200 instances, rho* and {} probe slacks match, {:.1?}",
        probes.into_inner().unwrap(),
        start.elapsed()
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (d, m) in [(3usize, 5u64), (4, 10), (6, 100)] {
        let inst = gen_fig2(d, m);
        let analytic = d as u64 * m + d as u64;
        let opt = if d <= 4 {
            let w = exact_opt(&inst, &budget).map_err(|e| e.to_string())?.weight;
            if w != analytic {
                failures.push(format!("d={d}: oracle OPT {w} != d*M+d = {analytic}"));
            }
            w
        } else {
            analytic
        };
        let base = cheapest_disjoint_uplink_cover(&inst).map_err(|e| e.to_string())?.weight;
        let (k2, _) = greedy::solve_with_k(&inst, 2, false).map_err(|e| e.to_string())?;
        let (k1, _) = greedy::solve_with_k(&inst, 1, false).map_err(|e| e.to_string())?;
        if base != 2 * opt {
            failures.push(format!("d={d} M={m}: baseline {base} != 2 * {opt}"));
        }
        if k2.weight != analytic {
            failures.push(format!("d={d} M={m}: k=2 greedy {} != {analytic}", k2.weight));
        }
        if k1.weight != base {
            failures.push(format!("d={d} M={m}: k=1 greedy {} != baseline {base}", k1.weight));
        }
        notes.push(format!("d={d}: OPT {opt} base {base} k2 {} k1 {}", k2.weight, k1.weight));
    }
    if !failures.is_empty() {
        return Err(format!("{} ({})", failures.join("; "), notes.join(", ")));
    }
    within(start, Duration::from_secs(60))?;
    Ok(notes.join(", "))
}

/// A feasible solution drawn at random: a random subset of the links,
/// topped up with a random covering link for every uncovered edge.
fn random_feasible(inst: &Instance, r: &mut ChaCha8Rng) -> Vec<LinkId> {
    let m = inst.links().len();
    let mut chosen: Vec<LinkId> = (0..m).filter(|_| r.gen_bool(0.3)).collect();
    let tree = inst.tree();
    for v in tree.preorder().to_vec() {
        if v == tree.root() {
            continue;
        }
        let covered = chosen.iter().any(|&l| tree.path_has_edge(inst.link(l).a, inst.link(l).b, v));
        if !covered {
            let options: Vec<LinkId> =
                (0..m).filter(|&l| tree.path_has_edge(inst.link(l).a, inst.link(l).b, v)).collect();
            chosen.push(options[r.gen_range(0..options.len())]);
        }
    }
    chosen.sort_unstable();
    chosen.dedup();
    chosen
}

fn criteria_5_and_6() -> (Outcome, Outcome) {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let epsilons = [Rational::from_integer(1), Rational::new(1, 2), Rational::new(1, 3)];
    let results: Vec<(Result<(), String>, Result<(), String>)> = (0..300u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(5000 + i);
            let n = r.gen_range(2..=12);
            let links = r.gen_range(1..=(2 * n).min(18));
            let inst = gen_random(n, links, r.gen_range(1..=20), r.gen());
            let f = if i % 2 == 0 {
                match exact_opt(&inst, &budget) {
                    Ok(s) => s.links,
                    Err(_) => random_feasible(&inst, &mut r),
                }
            } else {
                random_feasible(&inst, &mut r)
            };
            let eps = epsilons[(i % 3) as usize];
            let (cat, u, _) = uplinks_of(&inst);
            let five = decompose(&cat, &f, &u, eps)
                .map_err(|e| e.to_string())
                .and_then(|d| d.check(&cat, &u, eps))
                .map_err(|e| format!("#{i} eps={eps}: {e}"));
            let report = verify_witness_structure(&cat, &f, &u);
            let six = match report.failures().first() {
                None => Ok(()),
                Some(c) => Err(format!("#{i} {}: {}", c.name, c.counterexample.clone().unwrap_or_default())),
            };
            (five, six)
        })
        .collect();
    let (five, six): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let elapsed = start.elapsed();
    let five = first_err(five)
        .and_then(|_| within(start, Duration::from_secs(180)))
        .map(|_| format!("300 triples decompose within guarantees, {elapsed:.1?}"));
    let six = first_err(six).map(|_| "all structural checks pass on the same 300 triples".to_string());
    (five, six)
}

fn criterion_7(traces: &Mutex<Vec<(GreedyTrace, u64)>>) -> Outcome {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let results: Vec<Result<(), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(7000 + i);
            let n = r.gen_range(1..=9);
            let links = r.gen_range(0..=(2 * n).min(16));
            let inst = gen_random(n, links, r.gen_range(1..=20), r.gen());
            if inst.links().len() > 18 {
                return Ok(());
            }
            let opt = exact_opt(&inst, &budget).map_err(|e| e.to_string())?.weight as i128;
            let base = cheapest_disjoint_uplink_cover(&inst).unwrap().weight;
            for eps in [Rational::from_integer(1), Rational::new(1, 2)] {
                let (sol, trace) = greedy::solve(&inst, eps, &Default::default()).map_err(|e| e.to_string())?;
                // w <= (1694/1000 + eps) * OPT, cross-multiplied
                let bound = (Rational::new(1694, 1000) + eps) * Rational::from_integer(opt);
                if Rational::from_integer(sol.weight as i128) > bound {
                    return Err(format!("#{i} eps={eps}: {} > {bound}", sol.weight));
                }
                traces.lock().unwrap().push((trace, base));
            }
            Ok(())
        })
        .collect();
    first_err(results)?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("200 instances x 2 eps within 1.694 + eps, {:.1?}", start.elapsed()))
}

fn criterion_8(traces: &[(GreedyTrace, u64)]) -> Outcome {
    let results = traces
        .iter()
        .map(|(t, base)| {
            t.check()?;
            if t.initial_weight != *base || t.final_weight > *base {
                return Err(format!("final {} vs baseline {base}", t.final_weight));
            }
            Ok(())
        })
        .collect();
    first_err(results)?;
    let swaps: usize = traces.iter().map(|(t, _)| t.iterations.len()).sum();
    Ok(format!("{} traces, {swaps} swaps, all monotone", traces.len()))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let config = BenchConfig {
        seed: 99,
        instances: vec![
            InstanceSource::Random {
                count: 50,
                n_min: 2,
                n_max: 10,
                links: None,
                weight_max: 10,
            },
            InstanceSource::Fig2 { d: vec![2, 4, 6], m: 10 },
        ],
        algorithms: vec![
            AlgorithmSpec::Uplink2,
            AlgorithmSpec::Relgreedy {
                eps: Some("1".into()),
                k: None,
                full_shadows: false,
            },
        ],
        exact: true,
        timing: false,
    };
    let a = bench(&config);
    let b = bench(&config);
    if a.to_json() != b.to_json() || a.to_csv() != b.to_csv() {
        return Err("reports differ between runs".into());
    }
    let g1 = instance_to_json(&gen_random(8, 10, 10, 42));
    let g2 = instance_to_json(&gen_random(8, 10, 10, 42));
    if g1 != g2 {
        return Err("generator output differs between runs".into());
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} rows byte-identical across two runs", a.rows.len()))
}

fn main() -> ExitCode {
    let traces = Mutex::new(Vec::new());
    let mut lines: Vec<(usize, Outcome)> = vec![
        (1, criterion_1(&traces)),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
    ];
    let (five, six) = criteria_5_and_6();
    lines.push((5, five));
    lines.push((6, six));
    lines.push((7, criterion_7(&traces)));
    lines.push((8, criterion_8(&traces.into_inner().unwrap())));
    lines.push((9, criterion_9()));

    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (n, outcome) in &lines {
        match outcome {
            Ok(msg) => writeln!(out, "criterion {n}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                writeln!(out, "criterion {n}: FAIL ({msg})")
            }
        }
        .unwrap();
    }
    if failed > 0 {
        writeln!(out, "{failed} of {} criteria failed", lines.len()).unwrap();
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
