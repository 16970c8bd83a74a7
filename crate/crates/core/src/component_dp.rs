//! Slack maximization over `k`-thin link sets by dynamic programming on the
//! rooted tree.
//!
//! For a vertex `v`, a set `Y` of at most `k` links leaving the subtree
//! `D_v`, and a flag `x`, the table holds the best `C` inside `D_v` such
//! that `C ∪ Y` is `k`-thin and, when `x` is `+`, the part of the up-link
//! entering `D_v` that lies inside `D_v` is covered. The value stored is
//! `rho * w(up-links inside D_v dropped by C ∪ Y) - w(C)`.
//!
//! Only triples reachable from `(root, ∅, -)` are materialized: a first
//! top-down pass collects the `Y` sets each vertex is asked for.
//!
//! All values are integers scaled by the denominator of `rho`.

use std::collections::{HashMap, HashSet};

use crate::instance::{LinkCatalog, LinkId, VertexId};
use crate::rational::Rational;

/// Sign of the coverage requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    Minus,
    Plus,
}

impl Flag {
    fn index(self) -> usize {
        match self {
            Flag::Minus => 0,
            Flag::Plus => 1,
        }
    }
}

/// A feasible table entry: the chosen links and their scaled slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub value: i128,
    pub links: Vec<LinkId>,
}

/// `[minus, plus]`; `None` marks an infeasible triple.
pub type EntryPair = [Option<TableEntry>; 2];

/// Result of a slack maximization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackMax {
    pub component: Vec<LinkId>,
    pub slack: Rational,
}

/// Problem data shared by all table entries.
pub struct SlackDp<'c> {
    catalog: &'c LinkCatalog<'c>,
    k: usize,
    p: i128,
    q: i128,
    /// links of the alphabet with apex `v`
    apex_links: Vec<Vec<LinkId>>,
    /// the up-link covering the edge above `v`
    up_of_edge: Vec<Option<LinkId>>,
    uplinks: Vec<LinkId>,
}

impl<'c> SlackDp<'c> {
    pub fn new(catalog: &'c LinkCatalog<'c>, uplinks: &[LinkId], k: usize, rho: Rational, search: &[LinkId]) -> Self {
        let n = catalog.tree().len();
        let mut apex_links = vec![Vec::new(); n];
        let mut sorted = search.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &id in &sorted {
            apex_links[catalog.get(id).apex].push(id);
        }
        let mut up_of_edge = vec![None; n];
        for &u in uplinks {
            debug_assert!(catalog.is_uplink(u));
            for e in catalog.get(u).path.iter() {
                debug_assert!(up_of_edge[e].is_none(), "up-link paths overlap");
                up_of_edge[e] = Some(u);
            }
        }
        assert!(*rho.numer() >= 0, "rho must be nonnegative");
        SlackDp {
            catalog,
            k,
            p: *rho.numer(),
            q: *rho.denom(),
            apex_links,
            up_of_edge,
            uplinks: uplinks.to_vec(),
        }
    }

    fn top_of(&self, u: LinkId) -> VertexId {
        self.catalog.get(u).apex
    }

    fn bottom_of(&self, u: LinkId) -> VertexId {
        let l = self.catalog.link(u);
        if l.a == self.top_of(u) {
            l.b
        } else {
            l.a
        }
    }

    /// Children of `v` whose subtree the link (passing through `v`) enters.
    fn entered_children(&self, v: VertexId, id: LinkId) -> impl Iterator<Item = VertexId> + '_ {
        let tree = self.catalog.tree();
        let l = self.catalog.link(id);
        [l.a, l.b]
            .into_iter()
            .filter(move |&e| e != v && tree.is_ancestor(v, e))
            .map(move |e| tree.child_toward(v, e))
    }

    /// Calls `f(S)` for each `S ⊆ apex_links[v]` with `|S| ≤ room`, by size
    /// and then lexicographically.
    fn for_each_extension(&self, v: VertexId, room: usize, mut f: impl FnMut(&[LinkId])) {
        let pool = &self.apex_links[v];
        let mut chosen = Vec::with_capacity(room);
        f(&chosen);
        for size in 1..=room.min(pool.len()) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                chosen.clear();
                chosen.extend(idx.iter().map(|&i| pool[i]));
                f(&chosen);
                // next combination
                let mut i = size;
                while i > 0 && idx[i - 1] == pool.len() - size + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..size {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }

    /// `Y_i` for every child, given `Ȳ = Y ∪ S`.
    fn split(&self, v: VertexId, ybar: &[LinkId]) -> HashMap<VertexId, Vec<LinkId>> {
        let mut per_child: HashMap<VertexId, Vec<LinkId>> = HashMap::new();
        for &id in ybar {
            for c in self.entered_children(v, id) {
                per_child.entry(c).or_default().push(id);
            }
        }
        for ys in per_child.values_mut() {
            ys.sort_unstable();
        }
        per_child
    }

    /// Computes the entry pair for `(v, Y, ·)` from the children's tables.
    pub fn propagate_entry(
        &self,
        v: VertexId,
        y: &[LinkId],
        child_tables: &HashMap<VertexId, HashMap<Vec<LinkId>, EntryPair>>,
    ) -> EntryPair {
        let tree = self.catalog.tree();
        let u_here = self.up_of_edge[v];
        // the child whose subtree holds the bottom of the up-link entering D_v
        let plus_child = u_here.and_then(|u| {
            let b = self.bottom_of(u);
            (b != v).then(|| tree.child_toward(v, b))
        });
        let mut best: EntryPair = [None, None];
        if y.len() > self.k {
            return best;
        }
        let empty = Vec::new();
        self.for_each_extension(v, self.k - y.len(), |s| {
            let mut ybar: Vec<LinkId> = y.iter().chain(s.iter()).copied().collect();
            ybar.sort_unstable();
            let split = self.split(v, &ybar);
            let base = -self.q * self.catalog.weight_of(s) as i128;
            // shared part (all children except the plus child, whose choice depends on x)
            let mut value = base;
            let mut links: Vec<LinkId> = s.to_vec();
            let mut plus_parts: [Option<(i128, &[LinkId])>; 2] = [None, None];
            for &c in tree.children(v) {
                let yi = split.get(&c).unwrap_or(&empty);
                let pair = &child_tables[&c][yi];
                let minus = pair[0].as_ref().expect("minus triples are always feasible");
                let plus = pair[1].as_ref();
                match self.up_of_edge[c] {
                    None => {
                        value += minus.value;
                        links.extend_from_slice(&minus.links);
                    }
                    Some(uc) if self.top_of(uc) == v => {
                        let bonus = self.p * self.catalog.weight(uc) as i128;
                        let take_plus = match plus {
                            Some(pl) if !yi.is_empty() => {
                                let with = pl.value + bonus;
                                with > minus.value
                                    || (with == minus.value && !(pl.links.is_empty() && !minus.links.is_empty()))
                            }
                            _ => false,
                        };
                        if take_plus {
                            let pl = plus.unwrap();
                            value += pl.value + bonus;
                            links.extend_from_slice(&pl.links);
                        } else {
                            value += minus.value;
                            links.extend_from_slice(&minus.links);
                        }
                    }
                    Some(_) => {
                        // the up-link entering D_v continues into D_c
                        debug_assert_eq!(Some(c), plus_child);
                        plus_parts[0] = Some((minus.value, &minus.links));
                        plus_parts[1] = if yi.is_empty() {
                            None
                        } else {
                            plus.map(|pl| (pl.value, pl.links.as_slice()))
                        };
                    }
                }
            }
            for flag in [Flag::Minus, Flag::Plus] {
                if flag == Flag::Plus && u_here.is_none() {
                    continue;
                }
                let (mut total, mut all) = (value, links.clone());
                if plus_child.is_some() {
                    match plus_parts[flag.index()] {
                        Some((val, part)) => {
                            total += val;
                            all.extend_from_slice(part);
                        }
                        None => continue,
                    }
                }
                all.sort_unstable();
                let slot = &mut best[flag.index()];
                let better = match slot {
                    None => true,
                    Some(cur) => total > cur.value || (total == cur.value && cur.links.is_empty() && !all.is_empty()),
                };
                if better {
                    *slot = Some(TableEntry { value: total, links: all });
                }
            }
        });
        best
    }

    /// Builds the tables bottom-up for the triples reachable from the root.
    pub fn build(&self, keep_all: bool) -> SlackTables {
        let tree = self.catalog.tree();
        let n = tree.len();
        let mut needed: Vec<HashSet<Vec<LinkId>>> = vec![HashSet::new(); n];
        needed[tree.root()].insert(Vec::new());
        for &v in tree.preorder() {
            let ys: Vec<Vec<LinkId>> = needed[v].iter().cloned().collect();
            let mut requests: Vec<(VertexId, Vec<LinkId>)> = Vec::new();
            for y in &ys {
                if y.len() > self.k {
                    continue;
                }
                self.for_each_extension(v, self.k - y.len(), |s| {
                    let ybar: Vec<LinkId> = y.iter().chain(s.iter()).copied().collect();
                    let split = self.split(v, &ybar);
                    for &c in tree.children(v) {
                        requests.push((c, split.get(&c).cloned().unwrap_or_default()));
                    }
                });
            }
            for (c, y) in requests {
                needed[c].insert(y);
            }
        }

        let mut tables: HashMap<VertexId, HashMap<Vec<LinkId>, EntryPair>> = HashMap::new();
        let mut kept: HashMap<VertexId, HashMap<Vec<LinkId>, EntryPair>> = HashMap::new();
        for v in tree.postorder() {
            let mut table = HashMap::with_capacity(needed[v].len());
            for y in &needed[v] {
                let pair = self.propagate_entry(v, y, &tables);
                table.insert(y.clone(), pair);
            }
            for &c in tree.children(v) {
                if let Some(t) = tables.remove(&c) {
                    if keep_all {
                        kept.insert(c, t);
                    }
                }
            }
            tables.insert(v, table);
        }
        let root = tree.root();
        if let Some(t) = tables.remove(&root) {
            kept.insert(root, t);
        }
        SlackTables {
            root,
            q: self.q,
            tables: kept,
        }
    }

    /// Checks the defining properties of every stored feasible entry.
    pub fn verify(&self, tables: &SlackTables) -> Result<(), String> {
        let tree = self.catalog.tree();
        for (&v, table) in &tables.tables {
            for (y, pair) in table {
                for (flag, entry) in [Flag::Minus, Flag::Plus].into_iter().zip(pair.iter()) {
                    let Some(entry) = entry else { continue };
                    let ctx = || format!("entry ({v}, {y:?}, {flag:?})");
                    for &id in &entry.links {
                        let l = self.catalog.link(id);
                        if !tree.is_ancestor(v, l.a) || !tree.is_ancestor(v, l.b) {
                            return Err(format!("{}: link {id} leaves D_v", ctx()));
                        }
                    }
                    let mut with_y = entry.links.clone();
                    with_y.extend_from_slice(y);
                    if crate::instance::max_load(self.catalog, &with_y) > self.k {
                        return Err(format!("{}: C ∪ Y is not {}-thin", ctx(), self.k));
                    }
                    let covered = self.catalog.union_paths(&with_y);
                    if flag == Flag::Plus {
                        let u = self.up_of_edge[v].ok_or_else(|| format!("{}: no up-link enters", ctx()))?;
                        let inside = self.catalog.get(u).path.iter().filter(|&e| e != v && tree.is_ancestor(v, e));
                        for e in inside {
                            if !covered.contains(e) {
                                return Err(format!("{}: edge above {e} of up-link {u} uncovered", ctx()));
                            }
                        }
                    }
                    let dropped: u64 = self
                        .uplinks
                        .iter()
                        .filter(|&&u| {
                            let l = self.catalog.link(u);
                            tree.is_ancestor(v, l.a) && tree.is_ancestor(v, l.b)
                        })
                        .filter(|&&u| self.catalog.get(u).path.is_subset(&covered))
                        .map(|&u| self.catalog.weight(u))
                        .sum();
                    let expect = self.p * dropped as i128 - self.q * self.catalog.weight_of(&entry.links) as i128;
                    if expect != entry.value {
                        return Err(format!("{}: stored {} but recomputed {expect}", ctx(), entry.value));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Materialized tables.
pub struct SlackTables {
    root: VertexId,
    q: i128,
    tables: HashMap<VertexId, HashMap<Vec<LinkId>, EntryPair>>,
}

impl SlackTables {
    pub fn entry(&self, v: VertexId, y: &[LinkId], flag: Flag) -> Option<&TableEntry> {
        self.tables.get(&v)?.get(y)?[flag.index()].as_ref()
    }

    pub fn len(&self) -> usize {
        self.tables.values().map(|t| t.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `C(root, ∅, -)` with its slack.
    pub fn extract_root(&self) -> SlackMax {
        let e = self.entry(self.root, &[], Flag::Minus).expect("root entry is always feasible");
        SlackMax {
            component: e.links.clone(),
            slack: Rational::new(e.value, self.q),
        }
    }
}

/// A `k`-thin subset of `search` maximizing `rho * w(Drop_U(C)) - w(C)`;
/// nonempty whenever some nonempty set attains the maximum.
pub fn slack_max(catalog: &LinkCatalog<'_>, uplinks: &[LinkId], k: usize, rho: Rational, search: &[LinkId]) -> SlackMax {
    let dp = SlackDp::new(catalog, uplinks, k, rho, search);
    dp.build(false).extract_root()
}
