//! Seeded random positive instances.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledGraph};
use crate::leafroot::{labeled_leaf_power_of, leaf_power_of, LeafRootTree};

/// A graph together with a leaf root that certifies it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceBundle {
    pub graph: Graph,
    /// Exact-distance labels when the bundle is labeled.
    pub labeled: Option<LabeledGraph>,
    pub witness: LeafRootTree,
    pub k: usize,
    pub seed: u64,
}

/// Grows a random tree with `n_leaves` leaves and at most `n_leaves * k`
/// nodes, then takes its (labeled) `k`-leaf power.
///
/// Leaves are attached either to an existing interior node or to a fresh
/// node subdividing a random edge; a few extra subdivisions follow. Vertex
/// ids are a random permutation of the leaves.
pub fn random_leaf_power_instance(n_leaves: usize, k: usize, seed: u64, labeled: bool) -> Result<InstanceBundle> {
    if n_leaves == 0 {
        return Err(Error::InvalidParameter("n_leaves must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = n_leaves * k;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut n;
    if n_leaves == 1 {
        edges.push((0, 1));
        n = 2;
    } else {
        edges.push((0, 1));
        edges.push((0, 2));
        n = 3;
        let mut is_leaf = vec![false, true, true];
        for _ in 2..n_leaves {
            let interior: Vec<usize> = (0..n).filter(|&u| !is_leaf[u]).collect();
            if n + 2 > budget || rng.gen_bool(0.5) {
                let p = *interior.choose(&mut rng).unwrap();
                edges.push((p, n));
                is_leaf.push(true);
                n += 1;
            } else {
                let i = rng.gen_range(0..edges.len());
                let (a, b) = edges[i];
                edges[i] = (a, n);
                edges.push((n, b));
                edges.push((n, n + 1));
                is_leaf.push(false);
                is_leaf.push(true);
                n += 2;
            }
        }
        let extra = rng.gen_range(0..=(budget - n).min(n_leaves));
        for _ in 0..extra {
            let i = rng.gen_range(0..edges.len());
            let (a, b) = edges[i];
            edges[i] = (a, n);
            edges.push((n, b));
            n += 1;
        }
    }
    let mut deg = vec![0; n];
    for &(a, b) in &edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let mut vertices: Vec<usize> = (0..n_leaves).collect();
    vertices.shuffle(&mut rng);
    let leaves: Vec<usize> = (1..n).filter(|&u| deg[u] == 1).collect();
    let leaf_map: BTreeMap<usize, usize> = leaves.iter().zip(&vertices).map(|(&l, &v)| (l, v)).collect();
    let witness = LeafRootTree::from_edges(n, &edges, 0, leaf_map)?;
    let graph = leaf_power_of(&witness, k);
    let labeled = labeled.then(|| labeled_leaf_power_of(&witness, k));
    Ok(InstanceBundle { graph, labeled, witness, k, seed })
}

/// Caterpillar-style `k`-leaf power on `n` vertices: a spine of `n` nodes,
/// each carrying one leaf on a pendant path whose length cycles through
/// `1, 1, 2`, counted from the last spine node with the phase set by `seed`.
/// Vertex `i` is the leaf of spine node `i`, so the graph has bandwidth below
/// `k` and small treewidth, and for a fixed seed the end of the spine looks
/// the same for every `n`.
pub fn caterpillar_instance(n: usize, k: usize, seed: u64) -> Result<InstanceBundle> {
    if n == 0 || k < 2 {
        return Err(Error::InvalidParameter(format!("caterpillar needs n >= 1 and k >= 2, got n = {n}, k = {k}")));
    }
    let phase = (seed % 3) as usize;
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let mut next = n;
    let mut leaf_map = BTreeMap::new();
    for i in 0..n {
        let len = if (n - 1 - i + phase) % 3 == 2 && k >= 4 { 2 } else { 1 };
        let mut prev = i;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        leaf_map.insert(prev, i);
    }
    let witness = LeafRootTree::from_edges(next, &edges, 0, leaf_map)?;
    let graph = leaf_power_of(&witness, k);
    Ok(InstanceBundle { graph, labeled: None, witness, k, seed })
}
