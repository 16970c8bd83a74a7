//! Exhaustive ground truth for small instances.
//!
//! Subsets are visited in reflected Gray-code order so that every step adds
//! or removes exactly one link and coverage/load counters update in place.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use crate::baseline::{UpLinkSolution, VerticalPath};
use crate::error::BudgetExceeded;
use crate::instance::{Instance, LinkCatalog, LinkId};
use crate::ratio_search::RatioResult;
use crate::rational::Rational;
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest link alphabet for `exact_opt`.
    pub max_links: usize,
    /// Largest alphabet for the component searches.
    pub max_search_links: usize,
    /// Largest vertex count for `brute_uplink_cover`.
    pub max_vertices: usize,
    pub max_subsets: u64,
    pub timeout: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_links: 20,
            max_search_links: 14,
            max_vertices: 10,
            max_subsets: 1 << 24,
            timeout: None,
        }
    }
}

impl OracleBudget {
    fn admit(&self, what: &'static str, actual: usize, limit: usize) -> Result<(), BudgetExceeded> {
        if actual > limit {
            return Err(BudgetExceeded {
                what,
                actual: actual as u64,
                limit: limit as u64,
            });
        }
        let subsets = 1u64.checked_shl(actual as u32).unwrap_or(u64::MAX);
        if subsets > self.max_subsets {
            return Err(BudgetExceeded {
                what: "subset count",
                actual: subsets,
                limit: self.max_subsets,
            });
        }
        Ok(())
    }
}

struct Clock {
    start: Instant,
    timeout: Option<Duration>,
}

impl Clock {
    fn new(budget: &OracleBudget) -> Self {
        Clock {
            start: Instant::now(),
            timeout: budget.timeout,
        }
    }

    fn check(&self, step: u64) -> Result<(), BudgetExceeded> {
        if let Some(limit) = self.timeout {
            if step & 0xfff == 0 && self.start.elapsed() > limit {
                return Err(BudgetExceeded {
                    what: "timeout (ms)",
                    actual: self.start.elapsed().as_millis() as u64,
                    limit: limit.as_millis() as u64,
                });
            }
        }
        Ok(())
    }
}

/// Calls `step(index, added)` for each Gray-code transition over `m` items,
/// starting from the empty set. The current subset after each call is
/// `gray(i)`; the empty set itself is not reported.
fn gray_walk(
    m: usize,
    clock: &Clock,
    mut step: impl FnMut(u64, usize, bool) -> Result<(), BudgetExceeded>,
) -> Result<(), BudgetExceeded> {
    let total = 1u64 << m;
    let mut mask = 0u64;
    for i in 1..total {
        clock.check(i)?;
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        step(mask, bit, mask & (1 << bit) != 0)?;
    }
    Ok(())
}

fn ids_of(mask: u64, items: &[LinkId]) -> Vec<LinkId> {
    let mut ids: Vec<LinkId> = (0..items.len()).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect();
    ids.sort_unstable();
    ids
}

/// Minimum-weight set of original links covering every tree edge.
pub fn exact_opt(instance: &Instance, budget: &OracleBudget) -> Result<Solution, BudgetExceeded> {
    let m = instance.links().len();
    budget.admit("links", m, budget.max_links.min(63))?;
    let tree = instance.tree();
    let paths: Vec<Vec<usize>> = instance
        .links()
        .iter()
        .map(|l| tree.path_edges(l.a, l.b).iter().collect())
        .collect();
    let items: Vec<LinkId> = (0..m).collect();
    let mut count = vec![0u32; instance.n()];
    let mut uncovered = instance.edge_count();
    let mut weight = 0u64;
    let mut best: Option<(u64, Vec<LinkId>)> = if uncovered == 0 { Some((0, Vec::new())) } else { None };
    let clock = Clock::new(budget);
    gray_walk(m, &clock, |mask, bit, added| {
        if added {
            weight += instance.link(bit).weight;
            for &e in &paths[bit] {
                if count[e] == 0 {
                    uncovered -= 1;
                }
                count[e] += 1;
            }
        } else {
            weight -= instance.link(bit).weight;
            for &e in &paths[bit] {
                count[e] -= 1;
                if count[e] == 0 {
                    uncovered += 1;
                }
            }
        }
        if uncovered == 0 {
            let better = match &best {
                None => true,
                Some((w, ids)) => weight < *w || (weight == *w && ids_of(mask, &items) < *ids),
            };
            if better {
                best = Some((weight, ids_of(mask, &items)));
            }
        }
        Ok(())
    })?;
    let (weight, links) = best.expect("validated instances are feasible");
    Ok(Solution { links, weight })
}

/// Incremental state for subsets of a component alphabet.
struct ComponentWalk<'c> {
    catalog: &'c LinkCatalog<'c>,
    items: Vec<LinkId>,
    vertices: Vec<Vec<usize>>,
    edges: Vec<Vec<usize>>,
    load: Vec<u32>,
    over: usize,
    cover: Vec<u32>,
    weight: u64,
    k: u32,
}

impl<'c> ComponentWalk<'c> {
    fn new(catalog: &'c LinkCatalog<'c>, search: &[LinkId], k: usize) -> Self {
        let mut items = search.to_vec();
        items.sort_unstable();
        items.dedup();
        let tree = catalog.tree();
        let vertices = items
            .iter()
            .map(|&id| {
                let l = catalog.link(id);
                tree.path_vertices(l.a, l.b)
            })
            .collect();
        let edges = items.iter().map(|&id| catalog.get(id).path.iter().collect()).collect();
        let n = tree.len();
        ComponentWalk {
            catalog,
            items,
            vertices,
            edges,
            load: vec![0; n],
            over: 0,
            cover: vec![0; n],
            weight: 0,
            k: k as u32,
        }
    }

    fn toggle(&mut self, bit: usize, added: bool) {
        let id = self.items[bit];
        if added {
            self.weight += self.catalog.weight(id);
            for &v in &self.vertices[bit] {
                self.load[v] += 1;
                if self.load[v] == self.k + 1 {
                    self.over += 1;
                }
            }
            for &e in &self.edges[bit] {
                self.cover[e] += 1;
            }
        } else {
            self.weight -= self.catalog.weight(id);
            for &v in &self.vertices[bit] {
                if self.load[v] == self.k + 1 {
                    self.over -= 1;
                }
                self.load[v] -= 1;
            }
            for &e in &self.edges[bit] {
                self.cover[e] -= 1;
            }
        }
    }

    fn thin(&self) -> bool {
        self.over == 0
    }

    fn drop_weight(&self, uplinks: &[(LinkId, Vec<usize>)]) -> u64 {
        uplinks
            .iter()
            .filter(|(_, es)| es.iter().all(|&e| self.cover[e] > 0))
            .map(|&(u, _)| self.catalog.weight(u))
            .sum()
    }
}

fn uplink_edges(catalog: &LinkCatalog<'_>, uplinks: &[LinkId]) -> Vec<(LinkId, Vec<usize>)> {
    uplinks.iter().map(|&u| (u, catalog.get(u).path.iter().collect())).collect()
}

/// Exhaustive minimum of `w(C) / w(Drop_U(C))` over nonempty `k`-thin
/// subsets of `search`. `None` when no subset drops anything.
pub fn brute_best_kthin(
    catalog: &LinkCatalog<'_>,
    uplinks: &[LinkId],
    k: usize,
    search: &[LinkId],
    budget: &OracleBudget,
) -> Result<Option<RatioResult>, BudgetExceeded> {
    let mut walk = ComponentWalk::new(catalog, search, k);
    budget.admit("search links", walk.items.len(), budget.max_search_links.min(63))?;
    let ups = uplink_edges(catalog, uplinks);
    let mut best: Option<(u64, u64, Vec<LinkId>)> = None;
    let clock = Clock::new(budget);
    let m = walk.items.len();
    gray_walk(m, &clock, |mask, bit, added| {
        walk.toggle(bit, added);
        if !walk.thin() {
            return Ok(());
        }
        let dropped = walk.drop_weight(&ups);
        if dropped == 0 {
            return Ok(());
        }
        let better = match &best {
            None => true,
            Some((c, d, ids)) => match (walk.weight as u128 * *d as u128).cmp(&(*c as u128 * dropped as u128)) {
                Ordering::Less => true,
                Ordering::Equal => ids_of(mask, &walk.items) < *ids,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((walk.weight, dropped, ids_of(mask, &walk.items)));
        }
        Ok(())
    })?;
    Ok(best.map(|(_, _, ids)| RatioResult::new(catalog, uplinks, ids)))
}

/// Exhaustive maximum of `rho * w(Drop_U(C)) - w(C)` over all `k`-thin
/// subsets of `search` (the empty set included). Ties prefer a nonempty set,
/// then the lexicographically smallest.
pub fn brute_max_slack(
    catalog: &LinkCatalog<'_>,
    uplinks: &[LinkId],
    k: usize,
    rho: Rational,
    search: &[LinkId],
    budget: &OracleBudget,
) -> Result<(Rational, Vec<LinkId>), BudgetExceeded> {
    let mut walk = ComponentWalk::new(catalog, search, k);
    budget.admit("search links", walk.items.len(), budget.max_search_links.min(63))?;
    let ups = uplink_edges(catalog, uplinks);
    let (p, q) = (*rho.numer(), *rho.denom());
    // values scaled by q
    let mut best: (i128, Vec<LinkId>) = (0, Vec::new());
    let clock = Clock::new(budget);
    let m = walk.items.len();
    gray_walk(m, &clock, |mask, bit, added| {
        walk.toggle(bit, added);
        if !walk.thin() {
            return Ok(());
        }
        let value = p * walk.drop_weight(&ups) as i128 - q * walk.weight as i128;
        let better = value > best.0
            || (value == best.0 && (best.1.is_empty() || ids_of(mask, &walk.items) < best.1));
        if better {
            best = (value, ids_of(mask, &walk.items));
        }
        Ok(())
    })?;
    Ok((Rational::new(best.0, q), best.1))
}

/// Exhaustive cheapest partition of the tree edges into vertical paths, each
/// priced by the cheapest original link containing it.
pub fn brute_uplink_cover(instance: &Instance, budget: &OracleBudget) -> Result<UpLinkSolution, BudgetExceeded> {
    let n = instance.n();
    let tree = instance.tree();
    let root = tree.root();
    // vertices whose edge may be glued to the parent's edge
    let joinable: Vec<usize> = (0..n)
        .filter(|&v| tree.parent(v).is_some_and(|p| p != root))
        .collect();
    if n > budget.max_vertices {
        return Err(BudgetExceeded {
            what: "vertices",
            actual: n as u64,
            limit: budget.max_vertices as u64,
        });
    }
    let links = instance.links();
    let link_paths: Vec<_> = links.iter().map(|l| tree.path_edges(l.a, l.b)).collect();
    let price = |top: usize, bottom: usize| -> Option<(u64, LinkId)> {
        let p = tree.path_edges(top, bottom);
        (0..links.len())
            .filter(|&i| p.is_subset(&link_paths[i]))
            .map(|i| (links[i].weight, i))
            .min()
    };
    let clock = Clock::new(budget);
    let mut best: Option<(u64, usize, Vec<VerticalPath>)> = None;
    for mask in 0u64..(1u64 << joinable.len()) {
        clock.check(mask)?;
        let mut joined = vec![false; n];
        let mut used_by_child = vec![false; n];
        let mut ok = true;
        for (i, &v) in joinable.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let p = tree.parent(v).unwrap();
                if used_by_child[p] {
                    ok = false;
                    break;
                }
                used_by_child[p] = true;
                joined[v] = true;
            }
        }
        if !ok {
            continue;
        }
        // a path ends at every non-root vertex that no child continues
        let mut paths = Vec::new();
        let mut cost = 0;
        for b in (0..n).filter(|&v| v != root && !used_by_child[v]) {
            let mut top = b;
            loop {
                let p = tree.parent(top).unwrap();
                if joined[top] {
                    top = p;
                } else {
                    top = p;
                    break;
                }
            }
            match price(top, b) {
                Some((w, id)) => {
                    cost += w;
                    paths.push(VerticalPath {
                        top,
                        bottom: b,
                        cost: w,
                        link: id,
                    });
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if best.as_ref().is_none_or(|(c, np, _)| (cost, paths.len()) < (*c, *np)) {
            paths.sort_by_key(|p| (p.bottom, p.top));
            best = Some((cost, paths.len(), paths));
        }
    }
    let (weight, _, paths) = best.expect("validated instances are feasible");
    Ok(UpLinkSolution { paths, weight })
}
