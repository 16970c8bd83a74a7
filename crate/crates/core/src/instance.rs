//! Problem representation: spanning tree, weighted links, and the coverage
//! primitives everything else is built on.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edgeset::EdgeSet;
use crate::tree::RootedTreeIndex;

pub type VertexId = usize;
pub type LinkId = usize;

/// Where a link comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Original,
    /// A link between two vertices of the path of the given original link,
    /// carrying that link's weight.
    ShadowOf(LinkId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub a: VertexId,
    pub b: VertexId,
    pub weight: u64,
    pub origin: Origin,
}

impl Link {
    /// The original link this one stands for (itself when original).
    pub fn original(&self) -> LinkId {
        match self.origin {
            Origin::Original => self.id,
            Origin::ShadowOf(id) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ValidationError {
    #[error("edge list is not a spanning tree: {0}")]
    NotATree(String),
    #[error("link {link} has non-positive weight")]
    NonpositiveWeight { link: usize },
    #[error("link {link} is malformed: {reason}")]
    BadLink { link: usize, reason: String },
    #[error("tree edge {{{0}, {1}}} is not covered by any link")]
    UncoverableEdge(VertexId, VertexId),
}

/// A validated instance. All weights are positive integers; `scale` records
/// the factor the input weights were multiplied by.
#[derive(Debug, Clone)]
pub struct Instance {
    n: usize,
    root: VertexId,
    edges: Vec<(VertexId, VertexId)>,
    links: Vec<Link>,
    scale: u64,
    tree: RootedTreeIndex,
}

impl Instance {
    /// Builds and validates an instance from integer weights.
    pub fn new(
        n: usize,
        root: VertexId,
        edges: Vec<(VertexId, VertexId)>,
        links: Vec<(VertexId, VertexId, u64)>,
    ) -> Result<Self, Vec<ValidationError>> {
        Self::with_scale(n, root, edges, links, 1)
    }

    pub(crate) fn with_scale(
        n: usize,
        root: VertexId,
        edges: Vec<(VertexId, VertexId)>,
        links: Vec<(VertexId, VertexId, u64)>,
        scale: u64,
    ) -> Result<Self, Vec<ValidationError>> {
        let mut errors = Vec::new();
        let tree = match RootedTreeIndex::build(n, root, &edges) {
            Some(t) => Some(t),
            None => {
                errors.push(ValidationError::NotATree(describe_tree_failure(n, root, &edges)));
                None
            }
        };
        let mut built = Vec::with_capacity(links.len());
        for (id, &(a, b, w)) in links.iter().enumerate() {
            if a >= n || b >= n {
                errors.push(ValidationError::BadLink {
                    link: id,
                    reason: format!("endpoint out of range 0..{n}"),
                });
            } else if a == b {
                errors.push(ValidationError::BadLink {
                    link: id,
                    reason: "endpoints coincide".into(),
                });
            }
            if w == 0 {
                errors.push(ValidationError::NonpositiveWeight { link: id });
            }
            built.push(Link {
                id,
                a,
                b,
                weight: w,
                origin: Origin::Original,
            });
        }
        let Some(tree) = tree else {
            return Err(errors);
        };
        if errors.is_empty() {
            let mut covered = EdgeSet::new(n);
            for l in &built {
                covered.union_with(&tree.path_edges(l.a, l.b));
            }
            for (v, p) in (0..n).filter_map(|v| tree.parent(v).map(|p| (v, p))) {
                if !covered.contains(v) {
                    errors.push(ValidationError::UncoverableEdge(p, v));
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Instance {
            n,
            root,
            edges,
            links: built,
            scale,
            tree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn tree(&self) -> &RootedTreeIndex {
        &self.tree
    }

    /// Number of tree edges.
    pub fn edge_count(&self) -> usize {
        self.n - 1
    }

    /// All tree edges as an edge set.
    pub fn all_edges(&self) -> EdgeSet {
        let mut set = EdgeSet::new(self.n);
        for v in 0..self.n {
            if v != self.root {
                set.insert(v);
            }
        }
        set
    }

    /// Total weight of a set of original link ids.
    pub fn weight_of(&self, ids: &[LinkId]) -> u64 {
        ids.iter().map(|&id| self.links[id].weight).sum()
    }

    /// Whether the original links `ids` cover every tree edge.
    pub fn covers_all(&self, ids: &[LinkId]) -> bool {
        let mut covered = EdgeSet::new(self.n);
        for &id in ids {
            covered.union_with(&link_path(self, &self.links[id]));
        }
        self.all_edges().is_subset(&covered)
    }
}

fn describe_tree_failure(n: usize, root: usize, edges: &[(usize, usize)]) -> String {
    if n == 0 {
        "no vertices".into()
    } else if root >= n {
        format!("root {root} out of range")
    } else if edges.len() + 1 != n {
        format!("expected {} edges, found {}", n - 1, edges.len())
    } else if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n || u == v) {
        format!("bad edge {{{u}, {v}}}")
    } else {
        "edges contain a cycle".into()
    }
}

/// `P_ℓ`: tree edges between the endpoints of the link.
pub fn link_path(instance: &Instance, link: &Link) -> EdgeSet {
    instance.tree.path_edges(link.a, link.b)
}

/// Lowest common ancestor of the link's endpoints.
pub fn apex(instance: &Instance, link: &Link) -> VertexId {
    instance.tree.lca(link.a, link.b)
}

/// One endpoint is an ancestor of the other.
pub fn is_uplink(instance: &Instance, link: &Link) -> bool {
    let z = apex(instance, link);
    z == link.a || z == link.b
}

/// A link together with its cached apex and covered edge set.
#[derive(Debug, Clone)]
pub struct CatalogLink {
    pub link: Link,
    pub apex: VertexId,
    pub path: EdgeSet,
}

/// Working set of links: the instance's original links followed by any
/// shadow links created during solving. Ids index into this catalog and the
/// first `instance.links().len()` ids coincide with the original ids.
#[derive(Debug, Clone)]
pub struct LinkCatalog<'a> {
    instance: &'a Instance,
    links: Vec<CatalogLink>,
    by_key: HashMap<(VertexId, VertexId, u64), LinkId>,
}

impl<'a> LinkCatalog<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let links = instance
            .links()
            .iter()
            .map(|l| CatalogLink {
                link: l.clone(),
                apex: apex(instance, l),
                path: link_path(instance, l),
            })
            .collect::<Vec<CatalogLink>>();
        let mut by_key = HashMap::new();
        for c in &links {
            by_key.entry(key_of(c.link.a, c.link.b, c.link.weight)).or_insert(c.link.id);
        }
        LinkCatalog { instance, links, by_key }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn tree(&self) -> &'a RootedTreeIndex {
        self.instance.tree()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn get(&self, id: LinkId) -> &CatalogLink {
        &self.links[id]
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id].link
    }

    pub fn weight(&self, id: LinkId) -> u64 {
        self.links[id].link.weight
    }

    pub fn weight_of(&self, ids: &[LinkId]) -> u64 {
        ids.iter().map(|&id| self.weight(id)).sum()
    }

    pub fn originals(&self) -> impl Iterator<Item = LinkId> {
        0..self.instance.links().len()
    }

    /// Adds a shadow of `of` between `a` and `b`, or returns an existing
    /// catalog link with the same endpoints and weight.
    pub fn add_shadow(&mut self, a: VertexId, b: VertexId, weight: u64, of: LinkId) -> LinkId {
        if let Some(&existing) = self.by_key.get(&key_of(a, b, weight)) {
            return existing;
        }
        let original = self.links[of].link.original();
        debug_assert!({
            let p = self.tree().path_edges(a, b);
            p.is_subset(&self.links[original].path)
        });
        let id = self.links.len();
        let link = Link {
            id,
            a,
            b,
            weight,
            origin: Origin::ShadowOf(original),
        };
        let tree = self.tree();
        self.by_key.insert(key_of(a, b, weight), id);
        self.links.push(CatalogLink {
            apex: tree.lca(a, b),
            path: tree.path_edges(a, b),
            link,
        });
        id
    }

    /// Union of `P_ℓ` over the given links.
    pub fn union_paths(&self, ids: &[LinkId]) -> EdgeSet {
        let mut set = EdgeSet::new(self.instance.n());
        for &id in ids {
            set.union_with(&self.links[id].path);
        }
        set
    }

    /// Whether `x` lies on the path of link `id`.
    pub fn touches(&self, id: LinkId, x: VertexId) -> bool {
        let c = &self.links[id];
        self.tree().on_path(c.link.a, c.link.b, c.apex, x)
    }

    pub fn is_uplink(&self, id: LinkId) -> bool {
        let c = &self.links[id];
        c.apex == c.link.a || c.apex == c.link.b
    }

    /// Maps catalog ids to sorted, deduplicated original ids.
    pub fn to_originals(&self, ids: impl IntoIterator<Item = LinkId>) -> Vec<LinkId> {
        let mut out: Vec<LinkId> = ids.into_iter().map(|id| self.link(id).original()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn key_of(a: VertexId, b: VertexId, weight: u64) -> (VertexId, VertexId, u64) {
    (a.min(b), a.max(b), weight)
}

/// `Drop_U(C)`: the links of `uplinks` whose paths are covered by `component`.
pub fn drop_set(catalog: &LinkCatalog<'_>, uplinks: &[LinkId], component: &[LinkId]) -> Vec<LinkId> {
    let covered = catalog.union_paths(component);
    uplinks
        .iter()
        .copied()
        .filter(|&u| catalog.get(u).path.is_subset(&covered))
        .collect()
}

/// Every vertex lies on the paths of at most `k` links of `links`.
pub fn is_k_thin(catalog: &LinkCatalog<'_>, links: &[LinkId], k: usize) -> bool {
    max_load(catalog, links) <= k
}

/// Largest number of links of the set whose path meets a single vertex.
pub fn max_load(catalog: &LinkCatalog<'_>, links: &[LinkId]) -> usize {
    let tree = catalog.tree();
    let mut load = vec![0usize; tree.len()];
    for &id in links {
        let l = catalog.link(id);
        for v in tree.path_vertices(l.a, l.b) {
            load[v] += 1;
        }
    }
    load.into_iter().max().unwrap_or(0)
}

/// Cheapest link covering a vertical path, with the original that realizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerticalCost {
    pub cost: u64,
    pub link: LinkId,
}

/// For every ancestor/descendant pair `(t, b)`, the cheapest original link
/// whose path contains the vertical path `t..b`; this is the cheapest shadow
/// between `t` and `b`.
#[derive(Debug, Clone)]
pub struct VerticalCostTable {
    // by_bottom[b][depth(t)] for t a strict ancestor of b
    by_bottom: Vec<Vec<Option<VerticalCost>>>,
    root: VertexId,
}

impl VerticalCostTable {
    pub fn build(instance: &Instance) -> Self {
        let tree = instance.tree();
        let n = instance.n();
        let links = instance.links();
        let apex: Vec<usize> = links.iter().map(|l| apex(instance, l)).collect();
        let mut by_bottom = vec![Vec::new(); n];
        for (b, out) in by_bottom.iter_mut().enumerate() {
            let d = tree.depth(b);
            if d == 0 {
                continue;
            }
            // best link per apex depth among links covering edge (parent(b), b)
            let mut best: Vec<Option<VerticalCost>> = vec![None; d];
            let mut exact: Vec<Option<VerticalCost>> = vec![None; d];
            for (id, l) in links.iter().enumerate() {
                if !tree.path_has_edge(l.a, l.b, b) {
                    continue;
                }
                let cand = VerticalCost { cost: l.weight, link: id };
                let slot = &mut best[tree.depth(apex[id])];
                if slot.is_none_or(|cur| (cand.cost, cand.link) < (cur.cost, cur.link)) {
                    *slot = Some(cand);
                }
                if l.a == b || l.b == b {
                    let other = if l.a == b { l.b } else { l.a };
                    if tree.is_ancestor(other, b) {
                        let slot = &mut exact[tree.depth(other)];
                        if slot.is_none_or(|cur| (cand.cost, cand.link) < (cur.cost, cur.link)) {
                            *slot = Some(cand);
                        }
                    }
                }
            }
            let mut running: Option<VerticalCost> = None;
            let mut row = Vec::with_capacity(d);
            for depth in 0..d {
                if let Some(c) = best[depth] {
                    if running.is_none_or(|cur| (c.cost, c.link) < (cur.cost, cur.link)) {
                        running = Some(c);
                    }
                }
                let mut entry = running;
                if let (Some(e), Some(r)) = (exact[depth], running) {
                    if e.cost == r.cost {
                        entry = Some(e);
                    }
                }
                row.push(entry);
            }
            *out = row;
        }
        VerticalCostTable {
            by_bottom,
            root: instance.root(),
        }
    }

    /// Cost of covering the vertical path from `top` down to `bottom` with a
    /// single link; `None` if no link contains it. `top` must be a strict
    /// ancestor of `bottom`.
    pub fn get(&self, tree: &RootedTreeIndex, top: VertexId, bottom: VertexId) -> Option<VerticalCost> {
        debug_assert!(top != bottom && tree.is_ancestor(top, bottom));
        self.by_bottom[bottom][tree.depth(top)]
    }

    pub fn root(&self) -> VertexId {
        self.root
    }
}

/// Convenience wrapper matching the operation name used in docs and tests.
pub fn vertical_cost_table(instance: &Instance) -> VerticalCostTable {
    VerticalCostTable::build(instance)
}
