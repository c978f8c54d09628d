//! Exhaustive leaf-root search over enumerated trees.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::enumerate::{enumerate_trees, FreeTree};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledGraph};
use crate::leafroot::{bfs, LeafRootTree, FAR};

/// Answer of an exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Yes(LeafRootTree),
    /// No tree within the budget, and the budget is large enough to be sure.
    No,
    /// No tree within the budget, which may be too small to be sure.
    NoWithinBudget,
}

impl OracleVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, OracleVerdict::Yes(_))
    }
}

struct TreeRecord {
    tree: FreeTree,
    leaves: Vec<usize>,
    /// Leaf-to-leaf distances, indexed by position in `leaves`.
    dist: Vec<Vec<usize>>,
}

/// Trees of one (leaf count, budget) grouped by their sorted within-`cap`
/// degree profile.
struct Corpus {
    records: Vec<TreeRecord>,
    by_profile: HashMap<Vec<usize>, Vec<usize>>,
}

type CorpusKey = (usize, usize, usize);

fn corpus(leaves: usize, budget: usize, cap: usize) -> Result<Arc<Corpus>> {
    static CACHE: OnceLock<Mutex<HashMap<CorpusKey, Arc<Corpus>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(&(leaves, budget, cap)) {
        return Ok(c.clone());
    }
    let mut records = Vec::new();
    let mut by_profile: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for tree in enumerate_trees(budget, leaves)? {
        if tree.n < 3 {
            continue; // no interior node to root at
        }
        let adj = tree.adjacency();
        let ls = tree.leaves();
        let dist: Vec<Vec<usize>> = ls
            .iter()
            .map(|&a| {
                let d = bfs(&adj, a, FAR);
                ls.iter().map(|&b| d[b]).collect()
            })
            .collect();
        let mut profile: Vec<usize> = (0..ls.len()).map(|i| within(&dist[i], i, cap)).collect();
        profile.sort_unstable();
        by_profile.entry(profile).or_default().push(records.len());
        records.push(TreeRecord { tree, leaves: ls, dist });
    }
    let c = Arc::new(Corpus { records, by_profile });
    cache.lock().unwrap().insert((leaves, budget, cap), c.clone());
    Ok(c)
}

fn within(row: &[usize], i: usize, cap: usize) -> usize {
    row.iter().enumerate().filter(|&(j, &d)| j != i && d <= cap).count()
}

/// Tiny witnesses that need no search.
fn trivial_witness(n: usize) -> Option<LeafRootTree> {
    match n {
        0 => Some(LeafRootTree::new(vec![0], 0, BTreeMap::new()).unwrap()),
        1 => Some(LeafRootTree::new(vec![0, 0], 0, BTreeMap::from([(1, 0)])).unwrap()),
        _ => None,
    }
}

/// Searches every tree with `|V(g)|` leaves and at most `vertex_budget`
/// nodes for a `k`-leaf root of `g`.
pub fn brute_force_recognize(g: &Graph, k: usize, vertex_budget: usize) -> Result<OracleVerdict> {
    let pair_ok = |u: usize, v: usize, d: usize| g.has_edge(u, v) == (d <= k);
    search(g, k, vertex_budget, &pair_ok)
}

/// Labeled counterpart: each edge's leaf distance must fall in its range and
/// each non-edge must exceed `cap`.
pub fn brute_force_recognize_labeled(g: &LabeledGraph, cap: usize, vertex_budget: usize) -> Result<OracleVerdict> {
    let pair_ok = |u: usize, v: usize, d: usize| match g.range(u, v) {
        Some((lo, hi)) => lo <= d && d <= hi,
        None => d > cap,
    };
    search(g.graph(), cap, vertex_budget, &pair_ok)
}

fn search(g: &Graph, cap: usize, budget: usize, pair_ok: &dyn Fn(usize, usize, usize) -> bool) -> Result<OracleVerdict> {
    let n = g.vertex_count();
    if budget < n {
        return Err(Error::InvalidParameter(format!("vertex budget {budget} is below the vertex count {n}")));
    }
    if let Some(t) = trivial_witness(n) {
        return Ok(OracleVerdict::Yes(t));
    }
    let corpus = corpus(n, budget, cap)?;
    let mut degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    if let Some(ids) = corpus.by_profile.get(&degrees) {
        for &id in ids {
            let rec = &corpus.records[id];
            let mut assign = vec![usize::MAX; n];
            let mut used = vec![false; n];
            if assign_leaves(g, rec, cap, pair_ok, &order, 0, &mut assign, &mut used) {
                return Ok(OracleVerdict::Yes(to_witness(rec, &assign)));
            }
        }
    }
    let definitive = g.is_connected() && budget >= n * cap;
    Ok(if definitive { OracleVerdict::No } else { OracleVerdict::NoWithinBudget })
}

#[allow(clippy::too_many_arguments)]
fn assign_leaves(
    g: &Graph,
    rec: &TreeRecord,
    cap: usize,
    pair_ok: &dyn Fn(usize, usize, usize) -> bool,
    order: &[usize],
    i: usize,
    assign: &mut [usize],
    used: &mut [bool],
) -> bool {
    if i == order.len() {
        return true;
    }
    let v = order[i];
    for j in 0..rec.leaves.len() {
        if used[j] || within(&rec.dist[j], j, cap) != g.degree(v) {
            continue;
        }
        let ok = order[..i].iter().all(|&u| pair_ok(u, v, rec.dist[j][assign[u]]));
        if ok {
            used[j] = true;
            assign[v] = j;
            if assign_leaves(g, rec, cap, pair_ok, order, i + 1, assign, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

fn to_witness(rec: &TreeRecord, assign: &[usize]) -> LeafRootTree {
    let adj = rec.tree.adjacency();
    let root = (0..rec.tree.n).find(|&u| adj[u].len() >= 2).expect("trees with >= 3 nodes have an interior node");
    let leaf_map = assign.iter().enumerate().map(|(v, &j)| (rec.leaves[j], v)).collect();
    LeafRootTree::from_edges(rec.tree.n, &rec.tree.edges, root, leaf_map).expect("enumerated trees are trees")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leafroot::{verify_labeled_leaf_root, verify_leaf_root};
    use crate::reference::closed_form::is_chordal;

    #[test]
    fn examples() {
        let p3 = Graph::path(3);
        match brute_force_recognize(&p3, 3, 9).unwrap() {
            OracleVerdict::Yes(t) => assert!(verify_leaf_root(&p3, &t, 3).ok),
            other => panic!("{other:?}"),
        }
        assert_eq!(brute_force_recognize(&Graph::cycle(4), 3, 12).unwrap(), OracleVerdict::No);
        assert_eq!(brute_force_recognize(&Graph::cycle(4), 3, 8).unwrap(), OracleVerdict::NoWithinBudget);
        assert!(brute_force_recognize(&Graph::complete(3), 2, 6).unwrap().is_yes());
        assert!(brute_force_recognize(&Graph::complete(3), 2, 2).is_err());
        assert!(brute_force_recognize(&Graph::new(1), 3, 3).unwrap().is_yes());
    }

    #[test]
    fn labeled_examples() {
        // exact labels of a generated tree
        let t = LeafRootTree::from_edges(
            7,
            &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)],
            0,
            BTreeMap::from([(3, 0), (4, 1), (5, 2), (6, 3)]),
        )
        .unwrap();
        let lg = crate::leafroot::labeled_leaf_power_of(&t, 4);
        match brute_force_recognize_labeled(&lg, 4, 16).unwrap() {
            OracleVerdict::Yes(w) => assert!(verify_labeled_leaf_root(&lg, &w, 4).ok),
            other => panic!("{other:?}"),
        }
        // a triangle with ranges (2,2), (2,2) and (3,3): two leaves at distance 2
        // share a parent, so the third pair is at distance 2 as well
        let tri = Graph::complete(3);
        let ranges = BTreeMap::from([((0, 1), (2, 2)), ((1, 2), (2, 2)), ((0, 2), (3, 3))]);
        let lg = LabeledGraph::new(tri, ranges, 3).unwrap();
        assert!(!brute_force_recognize_labeled(&lg, 3, 9).unwrap().is_yes());
    }

    #[test]
    fn all_ranges_equal_unlabeled() {
        for g in [Graph::path(4), Graph::cycle(4), Graph::complete(4), Graph::complete_bipartite(1, 3)] {
            for k in 2..=4 {
                let lg = LabeledGraph::from_unlabeled(&g, k).unwrap();
                assert_eq!(
                    brute_force_recognize(&g, k, 4 * k).unwrap().is_yes(),
                    brute_force_recognize_labeled(&lg, k, 4 * k).unwrap().is_yes()
                );
            }
        }
    }

    #[test]
    fn yes_implies_chordal_on_five_vertex_graphs() {
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::from_edges(5, &edges).unwrap();
            if let OracleVerdict::Yes(t) = brute_force_recognize(&g, 3, 15).unwrap() {
                assert!(is_chordal(&g));
                assert!(verify_leaf_root(&g, &t, 3).ok);
            }
        }
    }
}
