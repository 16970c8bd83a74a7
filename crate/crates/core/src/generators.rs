//! Instance generators: seeded random trees and the two adversarial families.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;

const TREE_STREAM: u64 = 0;
const LINK_STREAM: u64 = 1;
const WEIGHT_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Random tree (each vertex hangs off a uniformly chosen earlier one), up to
/// `link_count` distinct random vertex pairs with weights in
/// `1..=weight_max`, plus a parent-child link at `weight_max` for every edge
/// left uncovered. Each draw category has its own stream.
pub fn gen_random(n: usize, link_count: usize, weight_max: u64, seed: u64) -> Instance {
    assert!(n >= 1, "need at least one vertex");
    let weight_max = weight_max.max(1);
    let mut tree_rng = stream(seed, TREE_STREAM);
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (tree_rng.gen_range(0..v), v)).collect();

    let pairs = n * (n - 1) / 2;
    let mut link_rng = stream(seed, LINK_STREAM);
    let mut weight_rng = stream(seed, WEIGHT_STREAM);
    let mut links = Vec::new();
    if pairs > 0 {
        for idx in sample(&mut link_rng, pairs, link_count.min(pairs)).into_iter() {
            let (a, b) = unrank_pair(idx);
            links.push((a, b, weight_rng.gen_range(1..=weight_max)));
        }
    }
    let parent: Vec<usize> = std::iter::once(0).chain(edges.iter().map(|&(p, _)| p)).collect();
    let mut covered = vec![false; n];
    {
        // mark covered edges by walking to the common ancestor
        let depth = {
            let mut d = vec![0usize; n];
            for v in 1..n {
                d[v] = d[parent[v]] + 1;
            }
            d
        };
        for &(a, b, _) in &links {
            let (mut x, mut y) = (a, b);
            while x != y {
                if depth[x] >= depth[y] {
                    covered[x] = true;
                    x = parent[x];
                } else {
                    covered[y] = true;
                    y = parent[y];
                }
            }
        }
    }
    for v in 1..n {
        if !covered[v] {
            links.push((parent[v], v, weight_max));
        }
    }
    Instance::new(n, 0, edges, links).expect("generated instance is valid")
}

// pair index -> (a, b) with a < b, enumerating (0,1), (0,2), (1,2), (0,3), ...
fn unrank_pair(idx: usize) -> (usize, usize) {
    let mut b = 1;
    while b * (b + 1) / 2 <= idx {
        b += 1;
    }
    (idx - b * (b - 1) / 2, b)
}

/// The width family: a top path of `d` nodes through the root, each with two
/// pendant leaves. Link ids: green `0`, then the red, orange and blue links
/// of position `p` at `1 + p`, `1 + d + p`, `1 + 2d + p` (0-based `p`).
///
/// Vertices: root `0`, top nodes `1..=d` (left half `1..=L` with `L`
/// adjacent to the root, right half `L+1..=d` with `L+1` adjacent to the
/// root, `L = ceil(d/2)`), leaves `a_p = d + 2p - 1`, `b_p = d + 2p`.
pub fn gen_fig2(d: usize, m: u64) -> Instance {
    assert!(d >= 2 && m >= 1, "need d >= 2 and M >= 1");
    let left = d - d / 2;
    let parent = |p: usize| -> usize {
        if p == left || p == left + 1 {
            0
        } else if p < left {
            p + 1
        } else {
            p - 1
        }
    };
    let a = |p: usize| d + 2 * p - 1;
    let b = |p: usize| d + 2 * p;
    let mut edges = Vec::new();
    for p in 1..=d {
        edges.push((parent(p), p));
        edges.push((p, a(p)));
        edges.push((p, b(p)));
    }
    let mut links = vec![(1, d, d as u64 * m)];
    links.extend((1..=d).map(|p| (parent(p), a(p), 2 * m + 1)));
    links.extend((1..=d).map(|p| (b(p), p, 1)));
    links.extend((1..=d).map(|p| (a(p), b(p), 1)));
    Instance::new(3 * d + 1, 0, edges, links).expect("family instance is valid")
}

/// The thinness family: a spine `s_0..s_m` hanging from the root `s_0`, a
/// hub `v` below `s_m` with leaves `b_0..b_m`, and a pendant `a_i` on each
/// `s_i`. Links `l_i = {b_i, a_i}` (ids `0..=m`) all pass through `v`;
/// up-links `u_i = {s_(i-1), a_i}` (ids `m+1..=2m`). Unit weights.
///
/// Vertices: `s_i = i`, `v = m + 1`, `a_i = m + 2 + i`, `b_i = 2m + 3 + i`.
pub fn gen_fig3(m: usize) -> Instance {
    assert!(m >= 1, "need m >= 1");
    let v = m + 1;
    let a = |i: usize| m + 2 + i;
    let b = |i: usize| 2 * m + 3 + i;
    let mut edges: Vec<(usize, usize)> = (1..=m).map(|i| (i - 1, i)).collect();
    edges.push((m, v));
    for i in 0..=m {
        edges.push((i, a(i)));
        edges.push((v, b(i)));
    }
    let mut links: Vec<(usize, usize, u64)> = (0..=m).map(|i| (b(i), a(i), 1)).collect();
    links.extend((1..=m).map(|i| (i - 1, a(i), 1)));
    Instance::new(3 * m + 4, 0, edges, links).expect("family instance is valid")
}

/// A single up-link `u` whose path is covered by a chain of four links,
/// each uniquely covering a stretch of `P_u` further down.
///
/// Returns the instance plus the ids `[l1, l2, l3, l4]` and `u`.
pub fn order_fixture() -> (Instance, [usize; 4], usize) {
    // r=0, 1a=1, 1x=2, 1y=3, t=4, spine 3..9 = 5..11, b=12, 11=13,
    // pendants 3a=14, 4a=15, 5a=16, 6a=17, 9a=18, 10a=19
    let edges = vec![
        (0, 1),
        (1, 2),
        (1, 3),
        (2, 4),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 8),
        (8, 9),
        (9, 10),
        (10, 11),
        (11, 12),
        (12, 13),
        (5, 14),
        (6, 15),
        (7, 16),
        (8, 17),
        (11, 18),
        (12, 19),
    ];
    let links = vec![
        (2, 15, 1),
        (14, 17, 1),
        (16, 18, 1),
        (10, 19, 1),
        (3, 0, 1),
        (2, 1, 1),
        (12, 13, 1),
        (4, 12, 1),
    ];
    let inst = Instance::new(20, 0, edges, links).expect("fixture is valid");
    (inst, [0, 1, 2, 3], 7)
}
