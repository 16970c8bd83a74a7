//! Relative greedy: start from the disjoint up-link cover and repeatedly
//! trade a best-ratio thin component for the up-links it makes redundant.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::baseline::cheapest_disjoint_uplink_cover;
use crate::error::SolveError;
use crate::instance::{drop_set, Instance, LinkCatalog, LinkId, VertexId};
use crate::ratio_search::best_ratio_component;
use crate::rational::{self, ceil_positive, Rational};
use crate::solution::Solution;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Use this thinness instead of `ceil(2 / eps)`.
    pub k_override: Option<usize>,
    /// Search over every shadow of every link, not just the original links
    /// and the current up-links.
    pub full_shadows: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceLink {
    pub a: VertexId,
    pub b: VertexId,
    pub weight: u64,
    pub original: LinkId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyIteration {
    pub component: Vec<TraceLink>,
    #[serde(with = "rational::serde_str")]
    pub ratio: Rational,
    pub component_weight: u64,
    pub dropped: Vec<TraceLink>,
    pub dropped_weight: u64,
    pub uplinks_before: u64,
    pub uplinks_after: u64,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyTrace {
    pub k: usize,
    pub initial_uplinks: Vec<TraceLink>,
    pub initial_weight: u64,
    /// Accepted swaps only; each has ratio below 1.
    pub iterations: Vec<GreedyIteration>,
    /// Ratio of the minimizer that ended the loop, if the loop did not run
    /// out of up-links first.
    #[serde(serialize_with = "ser_opt_rational")]
    pub stop_ratio: Option<Rational>,
    pub searches: usize,
    pub final_weight: u64,
}

fn ser_opt_rational<S: serde::Serializer>(value: &Option<Rational>, ser: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(r) => ser.serialize_some(&rational::format_rational(r)),
        None => ser.serialize_none(),
    }
}

fn trace_links(catalog: &LinkCatalog<'_>, ids: &[LinkId]) -> Vec<TraceLink> {
    ids.iter()
        .map(|&id| {
            let l = catalog.link(id);
            TraceLink {
                a: l.a,
                b: l.b,
                weight: l.weight,
                original: l.original(),
            }
        })
        .collect()
}

/// `ceil(2 / eps)`.
pub fn thinness_for(eps: Rational) -> Result<usize, SolveError> {
    if eps <= Rational::zero() {
        return Err(SolveError::InvalidEpsilon);
    }
    Ok(ceil_positive(&(Rational::from_integer(2) / eps)) as usize)
}

/// Adds, for every vertex pair on some link's path, the cheapest shadow.
pub fn add_all_shadows(catalog: &mut LinkCatalog<'_>) -> Vec<LinkId> {
    let instance = catalog.instance();
    let tree = instance.tree();
    let mut best: BTreeMap<(VertexId, VertexId), (u64, LinkId)> = BTreeMap::new();
    for l in instance.links() {
        let vs = tree.path_vertices(l.a, l.b);
        for (i, &x) in vs.iter().enumerate() {
            for &y in &vs[i + 1..] {
                let key = (x.min(y), x.max(y));
                let cand = (l.weight, l.id);
                best.entry(key).and_modify(|cur| *cur = (*cur).min(cand)).or_insert(cand);
            }
        }
    }
    let mut ids: Vec<LinkId> = catalog.originals().collect();
    for ((x, y), (w, of)) in best {
        ids.push(catalog.add_shadow(x, y, w, of));
    }
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// The relative greedy with early stopping.
pub fn solve(instance: &Instance, eps: Rational, options: &GreedyOptions) -> Result<(Solution, GreedyTrace), SolveError> {
    let k = match options.k_override {
        Some(k) => {
            thinness_for(eps)?;
            k
        }
        None => thinness_for(eps)?,
    };
    solve_with_k(instance, k, options.full_shadows)
}

pub fn solve_with_k(instance: &Instance, k: usize, full_shadows: bool) -> Result<(Solution, GreedyTrace), SolveError> {
    let base = cheapest_disjoint_uplink_cover(instance)?;
    let mut catalog = LinkCatalog::new(instance);
    let alphabet: Vec<LinkId> = if full_shadows {
        add_all_shadows(&mut catalog)
    } else {
        catalog.originals().collect()
    };
    let mut uplinks = base.to_catalog(&mut catalog);
    uplinks.sort_unstable();
    uplinks.dedup();
    let catalog = catalog;

    let mut chosen: Vec<LinkId> = Vec::new();
    let mut trace = GreedyTrace {
        k,
        initial_uplinks: trace_links(&catalog, &uplinks),
        initial_weight: catalog.weight_of(&uplinks),
        iterations: Vec::new(),
        stop_ratio: None,
        searches: 0,
        final_weight: 0,
    };
    while !uplinks.is_empty() {
        let mut search = alphabet.clone();
        search.extend_from_slice(&uplinks);
        search.sort_unstable();
        search.dedup();
        let (best, probes) = best_ratio_component(&catalog, &uplinks, k, &search)?;
        trace.searches += 1;
        if best.rho >= Rational::one() {
            trace.stop_ratio = Some(best.rho);
            break;
        }
        let before = catalog.weight_of(&uplinks);
        let dropped = drop_set(&catalog, &uplinks, &best.component);
        uplinks.retain(|u| !dropped.contains(u));
        chosen.extend_from_slice(&best.component);
        trace.iterations.push(GreedyIteration {
            component: trace_links(&catalog, &best.component),
            ratio: best.rho,
            component_weight: best.component_weight,
            dropped: trace_links(&catalog, &dropped),
            dropped_weight: best.drop_weight,
            uplinks_before: before,
            uplinks_after: catalog.weight_of(&uplinks),
            probes: probes.probes.len(),
        });
    }
    chosen.extend_from_slice(&uplinks);
    let solution = Solution::from_links(instance, catalog.to_originals(chosen));
    if !solution.covers(instance) {
        return Err(SolveError::NotASolution);
    }
    trace.final_weight = solution.weight;
    Ok((solution, trace))
}

/// The baseline alone, with shadows replaced by their originals.
pub fn two_approx_only(instance: &Instance) -> Result<Solution, SolveError> {
    Ok(cheapest_disjoint_uplink_cover(instance)?.to_solution(instance))
}

impl GreedyTrace {
    /// Ratios below 1, strictly shrinking up-link weight, bookkeeping adds
    /// up, and the result is no heavier than the baseline.
    pub fn check(&self) -> Result<(), String> {
        let mut current = self.initial_weight;
        let mut dropped_total = 0;
        for (i, it) in self.iterations.iter().enumerate() {
            if it.ratio >= Rational::one() {
                return Err(format!("iteration {i}: ratio {} is not below 1", it.ratio));
            }
            if it.uplinks_before != current || it.uplinks_after >= it.uplinks_before {
                return Err(format!("iteration {i}: up-link weight {} -> {}", it.uplinks_before, it.uplinks_after));
            }
            if it.uplinks_before - it.uplinks_after != it.dropped_weight {
                return Err(format!("iteration {i}: dropped weight mismatch"));
            }
            if Rational::new(it.component_weight as i128, it.dropped_weight as i128) != it.ratio {
                return Err(format!("iteration {i}: ratio does not match weights"));
            }
            dropped_total += it.dropped_weight;
            current = it.uplinks_after;
        }
        if dropped_total != self.initial_weight - current {
            return Err("dropped weights do not add up".into());
        }
        if self.final_weight > self.initial_weight {
            return Err(format!("final {} exceeds baseline {}", self.final_weight, self.initial_weight));
        }
        Ok(())
    }
}
