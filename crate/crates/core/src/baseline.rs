//! Cheapest cover of the tree edges by pairwise-disjoint vertical paths.
//!
//! `h(c, t)` is the cheapest way to cover the subtree of `c` plus the edge
//! above `c`, when the vertical path through that edge starts at the
//! ancestor `t`. The path either ends at `c`, or runs on into exactly one
//! child; every other child starts a fresh path at `c`.

use serde::Serialize;

use crate::edgeset::EdgeSet;
use crate::error::SolveError;
use crate::instance::{Instance, LinkCatalog, LinkId, VertexId, VerticalCostTable};
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerticalPath {
    pub top: VertexId,
    pub bottom: VertexId,
    pub cost: u64,
    /// Cheapest original link whose path contains `top..bottom`.
    pub link: LinkId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpLinkSolution {
    pub paths: Vec<VerticalPath>,
    pub weight: u64,
}

impl UpLinkSolution {
    /// The paths as catalog links (shadows where needed).
    pub fn to_catalog(&self, catalog: &mut LinkCatalog<'_>) -> Vec<LinkId> {
        self.paths
            .iter()
            .map(|p| catalog.add_shadow(p.top, p.bottom, p.cost, p.link))
            .collect()
    }

    /// The original links realizing the paths.
    pub fn witness_links(&self) -> Vec<LinkId> {
        let mut ids: Vec<LinkId> = self.paths.iter().map(|p| p.link).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn to_solution(&self, instance: &Instance) -> Solution {
        Solution::from_links(instance, self.witness_links())
    }

    /// Paths are pairwise disjoint, cover every edge, and carry table costs.
    pub fn check(&self, instance: &Instance, table: &VerticalCostTable) -> Result<(), String> {
        let tree = instance.tree();
        let mut seen = EdgeSet::new(instance.n());
        let mut total = 0;
        for p in &self.paths {
            if p.top == p.bottom || !tree.is_ancestor(p.top, p.bottom) {
                return Err(format!("({}, {}) is not a vertical path", p.top, p.bottom));
            }
            let edges = tree.path_edges(p.top, p.bottom);
            if !edges.is_disjoint(&seen) {
                return Err(format!("path ({}, {}) overlaps another path", p.top, p.bottom));
            }
            seen.union_with(&edges);
            match table.get(tree, p.top, p.bottom) {
                Some(c) if c.cost == p.cost => {}
                other => return Err(format!("path ({}, {}) has cost {} but table says {other:?}", p.top, p.bottom, p.cost)),
            }
            if !edges.is_subset(&tree.path_edges(instance.link(p.link).a, instance.link(p.link).b)) {
                return Err(format!("link {} does not contain path ({}, {})", p.link, p.top, p.bottom));
            }
            total += p.cost;
        }
        if seen != instance.all_edges() {
            return Err("paths do not cover every edge".into());
        }
        if total != self.weight {
            return Err(format!("weight {} but paths sum to {total}", self.weight));
        }
        Ok(())
    }
}

// (cost, number of paths); lexicographic
type Score = (u64, u32);
const NONE: Score = (u64::MAX, u32::MAX);
const TERMINATE: u32 = u32::MAX;

fn add(a: Score, b: Score) -> Score {
    if a == NONE || b == NONE {
        NONE
    } else {
        (a.0 + b.0, a.1 + b.1)
    }
}

/// Minimum-weight cover of all tree edges by pairwise-disjoint vertical
/// paths, each priced by the cheapest link containing it.
pub fn cheapest_disjoint_uplink_cover(instance: &Instance) -> Result<UpLinkSolution, SolveError> {
    let table = VerticalCostTable::build(instance);
    cheapest_with_table(instance, &table)
}

pub fn cheapest_with_table(instance: &Instance, table: &VerticalCostTable) -> Result<UpLinkSolution, SolveError> {
    let tree = instance.tree();
    let n = instance.n();
    // h[c][depth(t)] and the choice that achieved it
    let mut h: Vec<Vec<Score>> = vec![Vec::new(); n];
    let mut choice: Vec<Vec<u32>> = vec![Vec::new(); n];

    for c in tree.postorder() {
        if c == tree.root() {
            continue;
        }
        let d = tree.depth(c);
        let kids = tree.children(c);
        // children all start fresh paths at c
        let mut fresh = (0u64, 0u32);
        for &k in kids {
            fresh = add(fresh, h[k][d]);
        }
        let mut row = Vec::with_capacity(d);
        let mut pick = Vec::with_capacity(d);
        let mut t = c;
        let mut tops = Vec::with_capacity(d);
        while let Some(p) = tree.parent(t) {
            tops.push(p);
            t = p;
        }
        tops.reverse(); // tops[depth] = ancestor at that depth
        for (td, &top) in tops.iter().enumerate() {
            let mut best = match table.get(tree, top, c) {
                Some(vc) => add((vc.cost, 1), fresh),
                None => NONE,
            };
            let mut best_choice = TERMINATE;
            for (j, &k) in kids.iter().enumerate() {
                let through = h[k][td];
                if through == NONE {
                    continue;
                }
                let mut rest = through;
                for (i, &other) in kids.iter().enumerate() {
                    if i != j {
                        rest = add(rest, h[other][d]);
                    }
                }
                if rest < best {
                    best = rest;
                    best_choice = j as u32;
                }
            }
            row.push(best);
            pick.push(best_choice);
        }
        h[c] = row;
        choice[c] = pick;
        for &k in kids {
            h[k] = Vec::new();
        }
    }

    let root = tree.root();
    let mut total = (0u64, 0u32);
    for &c in tree.children(root) {
        total = add(total, h[c][0]);
    }
    if total == NONE {
        let bad = (0..n)
            .find(|&v| v != root && table.get(tree, tree.parent(v).unwrap(), v).is_none())
            .unwrap_or(root);
        return Err(SolveError::Infeasible(bad));
    }

    let mut paths = Vec::new();
    // (vertex, top of the path through its parent edge)
    let mut stack: Vec<(VertexId, VertexId)> = tree.children(root).iter().rev().map(|&c| (c, root)).collect();
    while let Some((c, top)) = stack.pop() {
        let ch = choice[c][tree.depth(top)];
        let kids = tree.children(c);
        if ch == TERMINATE {
            let vc = table.get(tree, top, c).expect("chosen path has a table entry");
            paths.push(VerticalPath {
                top,
                bottom: c,
                cost: vc.cost,
                link: vc.link,
            });
        }
        for (j, &k) in kids.iter().enumerate().rev() {
            let next_top = if ch == j as u32 { top } else { c };
            stack.push((k, next_top));
        }
    }
    paths.sort_by_key(|p| (p.bottom, p.top));
    Ok(UpLinkSolution {
        weight: total.0,
        paths,
    })
}
