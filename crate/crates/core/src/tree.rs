//! Rooted view of the spanning tree: parents, depths, DFS intervals and LCA.

use crate::edgeset::EdgeSet;

/// Rooted-tree queries over a spanning tree.
///
/// Descendant tests use DFS entry/exit times: `x` is in `D_v` iff
/// `tin[v] <= tin[x] <= tout[v]`.
#[derive(Debug, Clone)]
pub struct RootedTreeIndex {
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    preorder: Vec<usize>,
    jump: Vec<Vec<usize>>,
}

impl RootedTreeIndex {
    /// Roots the tree given as an adjacency structure. Returns `None` when the
    /// edge list is not a spanning tree on `n` vertices.
    pub fn build(n: usize, root: usize, edges: &[(usize, usize)]) -> Option<Self> {
        if n == 0 || root >= n || edges.len() + 1 != n {
            return None;
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return None;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut tin = vec![usize::MAX; n];
        let mut tout = vec![0; n];
        let mut preorder = Vec::with_capacity(n);

        // iterative DFS; children are visited in increasing id order
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        tin[root] = 0;
        preorder.push(root);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if Some(w) == parent[v] {
                    continue;
                }
                if tin[w] != usize::MAX {
                    return None; // cycle
                }
                parent[w] = Some(v);
                depth[w] = depth[v] + 1;
                children[v].push(w);
                tin[w] = preorder.len();
                preorder.push(w);
                stack.push((w, 0));
            } else {
                tout[v] = preorder.len() - 1;
                stack.pop();
            }
        }
        if preorder.len() != n {
            return None;
        }

        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut jump = vec![(0..n).map(|v| parent[v].unwrap_or(v)).collect::<Vec<_>>()];
        for k in 1..levels {
            let prev = &jump[k - 1];
            let next = (0..n).map(|v| prev[prev[v]]).collect();
            jump.push(next);
        }

        Some(RootedTreeIndex {
            root,
            parent,
            depth,
            children,
            tin,
            tout,
            preorder,
            jump,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertices in DFS preorder (root first).
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Vertices ordered so that every child precedes its parent.
    pub fn postorder(&self) -> impl Iterator<Item = usize> + '_ {
        self.preorder.iter().rev().copied()
    }

    pub fn tin(&self, v: usize) -> usize {
        self.tin[v]
    }

    /// `a` is an ancestor of `b` (non-strict).
    #[inline]
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.tin[a] <= self.tin[b] && self.tin[b] <= self.tout[a]
    }

    /// `x` lies in the subtree `D_v`.
    #[inline]
    pub fn in_subtree(&self, v: usize, x: usize) -> bool {
        self.is_ancestor(v, x)
    }

    /// Ancestor of `v` at the given depth (`depth <= depth(v)`).
    pub fn ancestor_at_depth(&self, mut v: usize, depth: usize) -> usize {
        debug_assert!(depth <= self.depth[v]);
        let mut diff = self.depth[v] - depth;
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                v = self.jump[k][v];
            }
            diff >>= 1;
            k += 1;
        }
        v
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        if self.is_ancestor(a, b) {
            return a;
        }
        if self.is_ancestor(b, a) {
            return b;
        }
        let mut x = a;
        for k in (0..self.jump.len()).rev() {
            let y = self.jump[k][x];
            if !self.is_ancestor(y, b) {
                x = y;
            }
        }
        self.parent[x].expect("non-root vertex below the LCA")
    }

    /// The child of `v` whose subtree contains the strict descendant `x`.
    pub fn child_toward(&self, v: usize, x: usize) -> usize {
        debug_assert!(v != x && self.is_ancestor(v, x));
        self.ancestor_at_depth(x, self.depth[v] + 1)
    }

    /// Edge ids of the path `a..b` (edge id = lower endpoint).
    pub fn path_edges(&self, a: usize, b: usize) -> EdgeSet {
        let mut set = EdgeSet::new(self.len());
        let top = self.lca(a, b);
        for mut x in [a, b] {
            while x != top {
                set.insert(x);
                x = self.parent[x].expect("walk stays below the LCA");
            }
        }
        set
    }

    /// Vertices of the path `a..b`, including both endpoints.
    pub fn path_vertices(&self, a: usize, b: usize) -> Vec<usize> {
        let top = self.lca(a, b);
        let mut out = vec![top];
        for mut x in [a, b] {
            while x != top {
                out.push(x);
                x = self.parent[x].expect("walk stays below the LCA");
            }
        }
        out
    }

    /// `x` lies on the tree path between `a` and `b`.
    pub fn on_path(&self, a: usize, b: usize, apex: usize, x: usize) -> bool {
        self.is_ancestor(apex, x) && (self.is_ancestor(x, a) || self.is_ancestor(x, b))
    }

    /// The tree edge `(parent(v), v)` lies on the path between `a` and `b`.
    pub fn path_has_edge(&self, a: usize, b: usize, v: usize) -> bool {
        v != self.root && (self.in_subtree(v, a) != self.in_subtree(v, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    //      0
    //     / \
    //    1   2
    //   / \   \
    //  3   4   5
    fn sample() -> RootedTreeIndex {
        RootedTreeIndex::build(6, 0, &[(0, 1), (0, 2), (1, 3), (4, 1), (2, 5)]).unwrap()
    }

    #[test]
    fn rooting_and_lca() {
        let t = sample();
        assert_eq!(t.parent(4), Some(1));
        assert_eq!(t.depth(5), 2);
        assert_eq!(t.lca(3, 4), 1);
        assert_eq!(t.lca(3, 5), 0);
        assert_eq!(t.lca(1, 4), 1);
        assert!(t.is_ancestor(0, 5));
        assert!(!t.is_ancestor(1, 5));
        assert_eq!(t.child_toward(0, 4), 1);
        assert_eq!(t.ancestor_at_depth(5, 1), 2);
    }

    #[test]
    fn paths() {
        let t = sample();
        let p = t.path_edges(3, 5);
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![1, 2, 3, 5]);
        let mut vs = t.path_vertices(3, 5);
        vs.sort();
        assert_eq!(vs, vec![0, 1, 2, 3, 5]);
        assert!(t.on_path(3, 5, 0, 1));
        assert!(!t.on_path(3, 5, 0, 4));
        assert!(t.path_has_edge(3, 5, 2));
        assert!(!t.path_has_edge(3, 4, 1));
    }

    #[test]
    fn rejects_non_trees() {
        assert!(RootedTreeIndex::build(3, 0, &[(0, 1)]).is_none());
        assert!(RootedTreeIndex::build(4, 0, &[(0, 1), (1, 0), (2, 3)]).is_none());
        assert!(RootedTreeIndex::build(3, 0, &[(0, 1), (1, 1)]).is_none());
        assert!(RootedTreeIndex::build(1, 0, &[]).is_some());
    }
}
