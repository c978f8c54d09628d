//! Free trees up to isomorphism, by leaf count and vertex budget.
//!
//! Trees are produced from their series-reduced skeletons (no degree-2
//! vertices) by distributing subdivision vertices over skeleton edges, with
//! duplicates removed by a center-rooted canonical encoding.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Largest vertex budget accepted by [`enumerate_trees`].
pub const TREE_BUDGET_LIMIT: usize = 18;

/// An unrooted tree on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl FreeTree {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Nodes of degree at most one.
    pub fn leaves(&self) -> Vec<usize> {
        let adj = self.adjacency();
        (0..self.n).filter(|&u| adj[u].len() <= 1).collect()
    }

    /// Isomorphism-invariant encoding: the smaller of the AHU strings rooted
    /// at each center.
    pub fn canonical(&self) -> Vec<u8> {
        let adj = self.adjacency();
        centers(&adj).into_iter().map(|c| ahu(&adj, c)).min().unwrap_or_default()
    }
}

fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&u| deg[u] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &u in &layer {
            for &w in &adj[u] {
                if deg[w] == 0 {
                    continue;
                }
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
            deg[u] = 0;
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

fn ahu(adj: &[Vec<usize>], root: usize) -> Vec<u8> {
    // iterative post-order
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for &w in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let mut code: Vec<Vec<u8>> = vec![Vec::new(); n];
    for &u in order.iter().rev() {
        let mut kids: Vec<Vec<u8>> = adj[u].iter().filter(|&&w| w != parent[u]).map(|&w| std::mem::take(&mut code[w])).collect();
        kids.sort_unstable();
        let mut s = vec![b'('];
        for k in kids {
            s.extend(k);
        }
        s.push(b')');
        code[u] = s;
    }
    std::mem::take(&mut code[root])
}

/// Series-reduced trees with exactly `leaves` leaves (`leaves >= 2`).
fn series_reduced(leaves: usize) -> Vec<FreeTree> {
    let mut level = vec![FreeTree { n: 2, edges: vec![(0, 1)] }];
    for _ in 2..leaves {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut keep = |t: FreeTree, next: &mut Vec<FreeTree>| {
            if seen.insert(t.canonical()) {
                next.push(t);
            }
        };
        for t in &level {
            let adj = t.adjacency();
            for u in (0..t.n).filter(|&u| adj[u].len() >= 3) {
                let mut e = t.edges.clone();
                e.push((u, t.n));
                keep(FreeTree { n: t.n + 1, edges: e }, &mut next);
            }
            for (i, &(a, b)) in t.edges.iter().enumerate() {
                let mut e = t.edges.clone();
                let m = t.n;
                e[i] = (a, m);
                e.push((m, b));
                e.push((m, m + 1));
                keep(FreeTree { n: t.n + 2, edges: e }, &mut next);
            }
        }
        level = next;
    }
    level
}

/// Every tree with exactly `leaf_count` leaves and at most `max_vertices`
/// vertices, once per isomorphism class, ordered by size then encoding.
pub fn enumerate_trees(max_vertices: usize, leaf_count: usize) -> Result<Vec<FreeTree>> {
    if max_vertices > TREE_BUDGET_LIMIT {
        return Err(Error::SizeLimit { what: "tree enumeration budget", limit: TREE_BUDGET_LIMIT, got: max_vertices });
    }
    let mut out: Vec<(usize, Vec<u8>, FreeTree)> = Vec::new();
    match leaf_count {
        0 => {}
        1 => {
            if max_vertices >= 1 {
                out.push((1, vec![], FreeTree { n: 1, edges: vec![] }));
            }
        }
        _ => {
            let mut seen = HashSet::new();
            for skel in series_reduced(leaf_count) {
                if skel.n > max_vertices {
                    continue;
                }
                let spare = max_vertices - skel.n;
                let mut counts = vec![0usize; skel.edges.len()];
                distribute(&mut counts, 0, spare, &mut |counts| {
                    let t = subdivide(&skel, counts);
                    let c = t.canonical();
                    if seen.insert(c.clone()) {
                        out.push((t.n, c, t));
                    }
                });
            }
        }
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|x| x.2).collect())
}

/// Calls `f` for every vector of non-negative counts from position `i` on
/// with total at most `left`.
fn distribute(counts: &mut [usize], i: usize, left: usize, f: &mut dyn FnMut(&[usize])) {
    if i == counts.len() {
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[i] = c;
        distribute(counts, i + 1, left - c, f);
    }
    counts[i] = 0;
}

fn subdivide(t: &FreeTree, counts: &[usize]) -> FreeTree {
    let mut n = t.n;
    let mut edges = Vec::with_capacity(t.edges.len() + counts.iter().sum::<usize>());
    for (&(a, b), &c) in t.edges.iter().zip(counts) {
        let mut prev = a;
        for _ in 0..c {
            edges.push((prev, n));
            prev = n;
            n += 1;
        }
        edges.push((prev, b));
    }
    FreeTree { n, edges }
}
