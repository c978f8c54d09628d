//! Tree decompositions: construction, validation, nice and extra-nice forms,
//! and the lift to `G ⊠ C_k`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::leafroot::{Verdict, Violation};

/// Largest graph accepted by [`Strategy::ExactSmall`].
pub const EXACT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    MinFill,
    ExactSmall,
}

/// A rooted tree decomposition. Bags are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree: Vec<Vec<usize>>,
    pub root: usize,
}

impl TreeDecomposition {
    /// Builds from bags and undirected tree edges; the root is a smallest
    /// leaf bag (lowest id on ties), so path-like trees get no extra join.
    pub fn new(bags: Vec<Vec<usize>>, edges: &[(usize, usize)]) -> Self {
        let mut bags = bags;
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        let mut tree = vec![Vec::new(); bags.len()];
        for &(a, b) in edges {
            tree[a].push(b);
            tree[b].push(a);
        }
        let root = (0..bags.len()).min_by_key(|&i| (tree[i].len() > 1, bags[i].len(), i)).unwrap_or(0);
        TreeDecomposition { bags, tree, root }
    }

    /// Maximum bag size minus one (zero when every bag is empty).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.tree.iter().enumerate() {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Decomposes each connected component separately and chains the component
/// roots together.
pub fn decompose(g: &Graph, strategy: Strategy) -> Result<TreeDecomposition> {
    if strategy == Strategy::ExactSmall && g.vertex_count() > EXACT_LIMIT {
        return Err(Error::SizeLimit { what: "exact treewidth", limit: EXACT_LIMIT, got: g.vertex_count() });
    }
    let mut bags = Vec::new();
    let mut edges = Vec::new();
    let mut prev_root: Option<usize> = None;
    for comp in connected_components(g) {
        let sub = g.induced_subgraph(&comp);
        let order = match strategy {
            Strategy::MinFill => min_fill_order(&sub),
            Strategy::ExactSmall => exact_order(&sub),
        };
        let (cbags, cedges) = from_elimination_order(&sub, &order);
        let off = bags.len();
        let croot = off + cbags.len() - 1;
        bags.extend(cbags.into_iter().map(|b| b.into_iter().map(|v| comp[v]).collect::<Vec<_>>()));
        edges.extend(cedges.into_iter().map(|(a, b)| (a + off, b + off)));
        if let Some(p) = prev_root {
            edges.push((p, croot));
        }
        prev_root = Some(croot);
    }
    if bags.is_empty() {
        bags.push(Vec::new());
    }
    Ok(TreeDecomposition::new(bags, &edges))
}

/// Greedy min-fill elimination order, ties by degree then id.
pub fn min_fill_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let fill = |adj: &[BTreeSet<usize>], v: usize| -> usize {
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                if !adj[ns[i]].contains(&ns[j]) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut key: Vec<(usize, usize, usize)> = (0..n).map(|v| (fill(&adj, v), adj[v].len(), v)).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> = key.iter().copied().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&(_, _, v)) = queue.iter().next() {
        queue.remove(&key[v]);
        order.push(v);
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &ns {
            adj[a].remove(&v);
        }
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                adj[ns[i]].insert(ns[j]);
                adj[ns[j]].insert(ns[i]);
            }
        }
        adj[v].clear();
        let mut touched: BTreeSet<usize> = ns.iter().copied().collect();
        for &a in &ns {
            touched.extend(adj[a].iter().copied());
        }
        for w in touched {
            if queue.remove(&key[w]) {
                key[w] = (fill(&adj, w), adj[w].len(), w);
                queue.insert(key[w]);
            }
        }
    }
    order
}

/// Optimal elimination order by dynamic programming over vertex subsets.
fn exact_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let full = (1usize << n) - 1;
    let nbr: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect();
    // q(s, v): vertices outside s ∪ {v} reachable from v through s
    let q = |s: usize, v: usize| -> usize {
        let mut seen = 1usize << v;
        let mut frontier = 1usize << v;
        let mut out = 0usize;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let ns = nbr[x] & !seen;
            seen |= ns;
            out |= ns & !s;
            frontier |= ns & s;
        }
        out.count_ones() as usize
    };
    let mut tw = vec![usize::MAX; full + 1];
    let mut choice = vec![0usize; full + 1];
    tw[0] = 0;
    for s in 1..=full {
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let val = tw[rest].max(q(rest, v));
            if val < tw[s] {
                tw[s] = val;
                choice[s] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s];
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Bags `{v} ∪ later neighbours in the filled graph`; each bag hangs below
/// the bag of its earliest-eliminated later neighbour. The last bag is the
/// root of the (connected) component.
fn from_elimination_order(g: &Graph, order: &[usize]) -> (Vec<Vec<usize>>, Vec<(usize, usize)>) {
    let n = g.vertex_count();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().filter(|&w| pos[w] > i).collect();
        for a in 0..later.len() {
            for b in a + 1..later.len() {
                adj[later[a]].insert(later[b]);
                adj[later[b]].insert(later[a]);
            }
        }
        if let Some(&next) = later.iter().min_by_key(|&&w| pos[w]) {
            edges.push((i, pos[next]));
        } else if i + 1 < n {
            // only possible for the last vertex of a connected graph
            edges.push((i, i + 1));
        }
        let mut bag = later;
        bag.push(v);
        bags.push(bag);
    }
    (bags, edges)
}

/// Checks tree shape, edge coverage and the connected-occurrence property.
pub fn validate_decomposition(g: &Graph, d: &TreeDecomposition) -> Verdict {
    let mut out = Vec::new();
    let nb = d.bags.len();
    let tree_edges = d.edges();
    if nb == 0 || tree_edges.len() + 1 != nb || !bag_tree_connected(d) {
        out.push(Violation { code: "not-a-tree", detail: "bag tree is not a tree".into(), ids: vec![] });
        return Verdict::from_violations(out);
    }
    let n = g.vertex_count();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, b) in d.bags.iter().enumerate() {
        for &v in b {
            if v >= n {
                out.push(Violation { code: "unknown-vertex", detail: format!("bag {i} holds vertex {v}"), ids: vec![i, v] });
            } else {
                holders[v].push(i);
            }
        }
    }
    for (u, v) in g.edges() {
        let covered = holders[u].iter().any(|&i| d.bags[i].binary_search(&v).is_ok());
        if !covered {
            out.push(Violation { code: "uncovered-edge", detail: format!("no bag holds edge {u}-{v}"), ids: vec![u, v] });
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            out.push(Violation { code: "missing-vertex", detail: format!("vertex {v} is in no bag"), ids: vec![v] });
            continue;
        }
        // bags holding v must induce a connected subtree: count edges inside
        let set: BTreeSet<usize> = hs.iter().copied().collect();
        let inside = tree_edges.iter().filter(|(a, b)| set.contains(a) && set.contains(b)).count();
        if inside + 1 != hs.len() {
            out.push(Violation {
                code: "disconnected-occurrence",
                detail: format!("bags holding vertex {v} are not connected"),
                ids: vec![v],
            });
        }
    }
    Verdict::from_violations(out)
}

fn bag_tree_connected(d: &TreeDecomposition) -> bool {
    let mut seen = vec![false; d.bags.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &d.tree[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
    /// Carries the edge `(u, v)` with `u < v`.
    EdgeAssociated(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub bag: Vec<usize>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// Rooted nice decomposition. Children always have smaller ids than their
/// parent, and the root (last node) has an empty bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut edges = Vec::new();
        for (i, x) in self.nodes.iter().enumerate() {
            for &c in &x.children {
                edges.push((c, i));
            }
        }
        let mut td = TreeDecomposition::new(self.nodes.iter().map(|x| x.bag.clone()).collect(), &edges);
        td.root = self.root;
        td
    }

    /// Checks the per-kind shape rules.
    pub fn check_kinds(&self) -> Verdict {
        let mut out = Vec::new();
        let bad = |i: usize, what: &str| Violation { code: "bad-node", detail: format!("node {i}: {what}"), ids: vec![i] };
        for (i, x) in self.nodes.iter().enumerate() {
            if x.children.iter().any(|&c| c >= i) {
                out.push(bad(i, "child id not below parent"));
                continue;
            }
            let child_bag = |j: usize| &self.nodes[x.children[j]].bag;
            let ok = match x.kind {
                NodeKind::Leaf => x.children.is_empty() && x.bag.len() <= 1,
                NodeKind::Introduce(v) => {
                    x.children.len() == 1 && {
                        let mut b = child_bag(0).clone();
                        b.push(v);
                        b.sort_unstable();
                        !child_bag(0).contains(&v) && b == x.bag
                    }
                }
                NodeKind::Forget(v) => {
                    x.children.len() == 1 && {
                        let b: Vec<usize> = child_bag(0).iter().copied().filter(|&w| w != v).collect();
                        child_bag(0).contains(&v) && b == x.bag
                    }
                }
                NodeKind::Join => x.children.len() == 2 && child_bag(0) == &x.bag && child_bag(1) == &x.bag,
                NodeKind::EdgeAssociated(u, v) => {
                    x.children.len() == 1 && child_bag(0) == &x.bag && x.bag.contains(&u) && x.bag.contains(&v)
                }
            };
            if !ok {
                out.push(bad(i, &format!("{:?} shape rule broken", x.kind)));
            }
        }
        Verdict::from_violations(out)
    }

    fn push(&mut self, bag: Vec<usize>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { bag, kind, children });
        self.nodes.len() - 1
    }
}

/// Converts to a nice decomposition of equal width whose root bag is empty.
///
/// An all-empty input (edgeless graph on zero vertices) gives a single
/// empty leaf.
pub fn make_nice(d: &TreeDecomposition) -> Result<NiceDecomposition> {
    let nb = d.bags.len();
    if nb == 0 || d.edges().len() + 1 != nb || !bag_tree_connected(d) {
        return Err(Error::InvalidInput("decomposition is not a tree".into()));
    }
    let mut nice = NiceDecomposition { nodes: Vec::new(), root: 0 };
    // post-order over the rooted bag tree
    let mut parent = vec![usize::MAX; nb];
    let mut order = vec![d.root];
    parent[d.root] = d.root;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &y in &d.tree[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                order.push(y);
            }
        }
    }
    let mut top: Vec<Option<usize>> = vec![None; nb];
    for &x in order.iter().rev() {
        let bag = &d.bags[x];
        let mut subs: Vec<usize> = Vec::new();
        for &c in d.tree[x].iter().filter(|&&c| c != x && parent[c] == x) {
            if let Some(node) = top[c] {
                subs.push(adapt(&mut nice, node, bag));
            }
        }
        let node = if subs.is_empty() {
            if bag.is_empty() {
                None
            } else {
                let mut node = nice.push(vec![bag[0]], NodeKind::Leaf, vec![]);
                node = adapt(&mut nice, node, bag);
                Some(node)
            }
        } else {
            let mut acc = subs[0];
            for &s in &subs[1..] {
                acc = nice.push(bag.clone(), NodeKind::Join, vec![acc, s]);
            }
            Some(acc)
        };
        top[x] = node;
    }
    let root = match top[d.root] {
        Some(r) => adapt(&mut nice, r, &[]),
        None => nice.push(vec![], NodeKind::Leaf, vec![]),
    };
    nice.root = root;
    Ok(nice)
}

/// Forgets then introduces vertices above `node` until its bag equals `target`.
fn adapt(nice: &mut NiceDecomposition, mut node: usize, target: &[usize]) -> usize {
    let current = nice.nodes[node].bag.clone();
    for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
        let bag: Vec<usize> = nice.nodes[node].bag.iter().copied().filter(|&w| w != v).collect();
        node = nice.push(bag, NodeKind::Forget(v), vec![node]);
    }
    for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
        let mut bag = nice.nodes[node].bag.clone();
        let pos = bag.binary_search(&v).unwrap_err();
        bag.insert(pos, v);
        node = nice.push(bag, NodeKind::Introduce(v), vec![node]);
    }
    node
}

/// Nice decomposition with one edge-associated node per graph edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtraNiceDecomposition {
    pub nice: NiceDecomposition,
    /// Edge `(u, v)` with `u < v` → its edge-associated node.
    pub association: BTreeMap<(usize, usize), usize>,
}

/// Inserts, below each `Forget(x)`, one edge node for every edge from `x`
/// to a vertex still in the bag. Since the root bag is empty, every edge is
/// associated exactly once.
pub fn make_extra_nice(d: &NiceDecomposition, g: &Graph) -> ExtraNiceDecomposition {
    let mut out = NiceDecomposition { nodes: Vec::with_capacity(d.nodes.len() + g.edge_count()), root: 0 };
    let mut association = BTreeMap::new();
    let mut new_id = vec![0; d.nodes.len()];
    for (i, x) in d.nodes.iter().enumerate() {
        let mut children: Vec<usize> = x.children.iter().map(|&c| new_id[c]).collect();
        if let NodeKind::Forget(v) = x.kind {
            let mut below = children[0];
            let child_bag = out.nodes[below].bag.clone();
            for &w in g.neighbors(v) {
                if child_bag.binary_search(&w).is_ok() {
                    let e = (v.min(w), v.max(w));
                    below = out.push(child_bag.clone(), NodeKind::EdgeAssociated(e.0, e.1), vec![below]);
                    association.insert(e, below);
                }
            }
            children[0] = below;
        }
        new_id[i] = out.push(x.bag.clone(), x.kind, children);
    }
    out.root = new_id[d.root];
    ExtraNiceDecomposition { nice: out, association }
}

/// Extra-nice decomposition whose bags stand for all `k` copies of their
/// vertices in `G ⊠ C_k`.
#[derive(Clone, Debug)]
pub struct MixedDecomposition {
    pub base: ExtraNiceDecomposition,
    pub k: usize,
}

impl MixedDecomposition {
    pub fn product_bag(&self, node: usize) -> Vec<usize> {
        self.base.nice.nodes[node].bag.iter().flat_map(|&v| (0..self.k).map(move |r| v * self.k + r)).collect()
    }

    pub fn width(&self) -> usize {
        (0..self.base.nice.nodes.len()).map(|i| self.base.nice.nodes[i].bag.len() * self.k).max().unwrap_or(0).saturating_sub(1)
    }

    /// The product bags as a decomposition of the product graph.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut td = self.base.nice.to_tree_decomposition();
        td.bags = (0..self.base.nice.nodes.len()).map(|i| self.product_bag(i)).collect();
        td
    }
}

pub fn lift_to_mixed(d: &ExtraNiceDecomposition, k: usize) -> Result<MixedDecomposition> {
    if k < 3 {
        return Err(Error::UnsupportedCycleLength(k));
    }
    Ok(MixedDecomposition { base: d.clone(), k })
}
