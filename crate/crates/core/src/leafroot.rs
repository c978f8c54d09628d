//! Leaf-root trees, leaf powers, verification, and embeddings of leaf roots
//! as subtrees of `G ⊠ C_k`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{connected_components, EdgeColor, Graph, LabeledGraph, ProductGraph};

/// Sentinel for "farther than any bound of interest".
pub const FAR: usize = usize::MAX;

/// A rooted tree whose leaves are mapped one-to-one onto graph vertices.
///
/// Leaves are the non-root nodes without children. The root maps to itself
/// in the parent array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafRootTree {
    parent: Vec<usize>,
    root: usize,
    leaf_map: BTreeMap<usize, usize>,
}

impl LeafRootTree {
    /// Validates the parent array and the leaf map.
    pub fn new(parent: Vec<usize>, root: usize, leaf_map: BTreeMap<usize, usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidInput("tree has no nodes".into()));
        }
        if root >= n || parent[root] != root {
            return Err(Error::InvalidInput(format!("root {root} must be its own parent")));
        }
        // every node must reach the root without revisiting
        let mut state = vec![0u8; n]; // 0 unknown, 1 on stack, 2 reaches root
        state[root] = 2;
        for start in 0..n {
            let mut path = Vec::new();
            let mut u = start;
            while state[u] == 0 {
                state[u] = 1;
                path.push(u);
                let p = parent[u];
                if p >= n {
                    return Err(Error::InvalidInput(format!("parent {p} of node {u} out of range")));
                }
                if p == u {
                    return Err(Error::InvalidInput(format!("node {u} is a second root")));
                }
                u = p;
            }
            if state[u] == 1 {
                return Err(Error::InvalidInput(format!("parent links of node {start} form a cycle")));
            }
            for v in path {
                state[v] = 2;
            }
        }
        let t = LeafRootTree { parent, root, leaf_map };
        let leaves = t.leaves();
        let mapped: Vec<usize> = t.leaf_map.keys().copied().collect();
        if leaves != mapped {
            return Err(Error::InvalidInput("leaf map domain differs from the set of leaves".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &v in t.leaf_map.values() {
            if !seen.insert(v) {
                return Err(Error::InvalidInput(format!("vertex {v} is mapped to two leaves")));
            }
        }
        if n >= 3 && t.degree(root) < 2 {
            return Err(Error::InvalidInput("root of a tree with >= 3 nodes must be interior".into()));
        }
        Ok(t)
    }

    /// Builds a tree from undirected edges, orienting it away from `root`.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)], root: usize, leaf_map: BTreeMap<usize, usize>) -> Result<Self> {
        if edges.len() + 1 != node_count {
            return Err(Error::InvalidInput(format!("{} edges cannot form a tree on {node_count} nodes", edges.len())));
        }
        let mut adj = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a >= node_count || b >= node_count || a == b {
                return Err(Error::InvalidInput(format!("bad tree edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if root >= node_count {
            return Err(Error::InvalidInput(format!("root {root} out of range")));
        }
        let (parent, order) = orient(&adj, root);
        if order.len() != node_count {
            return Err(Error::InvalidInput("tree edges are disconnected".into()));
        }
        LeafRootTree::new(parent, root, leaf_map)
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, u: usize) -> usize {
        self.parent[u]
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Leaf node → graph vertex.
    pub fn leaf_map(&self) -> &BTreeMap<usize, usize> {
        &self.leaf_map
    }

    /// Graph vertex → leaf node.
    pub fn vertex_leaves(&self) -> BTreeMap<usize, usize> {
        self.leaf_map.iter().map(|(&l, &v)| (v, l)).collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for (u, &p) in self.parent.iter().enumerate() {
            if p != u {
                adj[u].push(p);
                adj[p].push(u);
            }
        }
        adj
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count()).filter(|&u| self.parent[u] != u).map(|u| (self.parent[u], u)).collect()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.node_count()];
        for (u, &p) in self.parent.iter().enumerate() {
            if p != u {
                ch[p].push(u);
            }
        }
        ch
    }

    pub fn degree(&self, u: usize) -> usize {
        let up = usize::from(self.parent[u] != u);
        up + self.parent.iter().enumerate().filter(|&(v, &p)| v != u && p == u).count()
    }

    /// Non-root nodes without children, ascending.
    pub fn leaves(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.node_count()];
        for (u, &p) in self.parent.iter().enumerate() {
            if p != u {
                has_child[p] = true;
            }
        }
        (0..self.node_count()).filter(|&u| u != self.root && !has_child[u]).collect()
    }

    /// BFS distances from `src` to every node.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        bfs(&self.adjacency(), src, FAR)
    }

    /// Same tree re-rooted at `new_root`.
    pub fn rerooted(&self, new_root: usize) -> Result<Self> {
        LeafRootTree::from_edges(self.node_count(), &self.edges(), new_root, self.leaf_map.clone())
    }

    /// Pairwise leaf distances indexed by graph vertex, for vertices `0..n`.
    /// Missing vertices get `FAR`.
    pub fn leaf_distance_matrix(&self, n: usize) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut leaf_of = vec![None; n];
        for (&l, &v) in &self.leaf_map {
            if v < n {
                leaf_of[v] = Some(l);
            }
        }
        let mut m = vec![vec![FAR; n]; n];
        for u in 0..n {
            if let Some(lu) = leaf_of[u] {
                let d = bfs(&adj, lu, FAR);
                for v in 0..n {
                    if let Some(lv) = leaf_of[v] {
                        m[u][v] = d[lv];
                    }
                }
            }
        }
        m
    }
}

/// Orients an undirected tree away from `root`; returns parents and BFS order.
pub(crate) fn orient(adj: &[Vec<usize>], root: usize) -> (Vec<usize>, Vec<usize>) {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[root] = root;
    let mut order = vec![root];
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
    (parent, order)
}

/// BFS distances from `src`, not expanding beyond `cap` (FAR for unreached).
pub(crate) fn bfs(adj: &[Vec<usize>], src: usize, cap: usize) -> Vec<usize> {
    let mut d = vec![FAR; adj.len()];
    d[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        if d[u] >= cap {
            continue;
        }
        for &w in &adj[u] {
            if d[w] == FAR {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
    pub ids: Vec<usize>,
}

/// Outcome of a check: `ok` exactly when `violations` is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Verdict { ok: violations.is_empty(), violations }
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

fn violation(code: &'static str, detail: String, ids: Vec<usize>) -> Violation {
    Violation { code, detail, ids }
}

/// Graph on `0..=max vertex` with an edge when the leaves are within `k`.
pub fn leaf_power_of(t: &LeafRootTree, k: usize) -> Graph {
    let n = t.leaf_map.values().max().map_or(0, |&m| m + 1);
    let d = t.leaf_distance_matrix(n);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if d[u][v] <= k {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Leaf power at `cap` with each edge labeled by its exact distance.
pub fn labeled_leaf_power_of(t: &LeafRootTree, cap: usize) -> LabeledGraph {
    let n = t.leaf_map.values().max().map_or(0, |&m| m + 1);
    let d = t.leaf_distance_matrix(n);
    let g = leaf_power_of(t, cap);
    let ranges = g.edges().map(|(u, v)| ((u, v), (d[u][v], d[u][v]))).collect();
    LabeledGraph::new(g, ranges, cap).expect("exact distances satisfy 2 <= d <= cap")
}

fn check_mapping(n: usize, t: &LeafRootTree, out: &mut Vec<Violation>) {
    let mut hit = vec![false; n];
    for (&l, &v) in &t.leaf_map {
        if v >= n {
            out.push(violation("unknown-vertex", format!("leaf {l} maps to vertex {v} outside the graph"), vec![l]));
        } else {
            hit[v] = true;
        }
    }
    for (v, _) in hit.iter().enumerate().filter(|(_, &h)| !h) {
        out.push(violation("unmapped-vertex", format!("vertex {v} has no leaf"), vec![v]));
    }
}

/// Checks that `t` is a `k`-leaf root of `g`.
pub fn verify_leaf_root(g: &Graph, t: &LeafRootTree, k: usize) -> Verdict {
    let n = g.vertex_count();
    let mut out = Vec::new();
    check_mapping(n, t, &mut out);
    let d = t.leaf_distance_matrix(n);
    for u in 0..n {
        for v in u + 1..n {
            if d[u][v] == FAR {
                continue;
            }
            match (g.has_edge(u, v), d[u][v] <= k) {
                (true, false) => {
                    out.push(violation("adjacent-but-far", format!("edge {u}-{v} but leaf distance {} > {k}", d[u][v]), vec![u, v]))
                }
                (false, true) => out.push(violation(
                    "nonadjacent-but-near",
                    format!("non-edge {u}-{v} but leaf distance {} <= {k}", d[u][v]),
                    vec![u, v],
                )),
                _ => {}
            }
        }
    }
    Verdict::from_violations(out)
}

/// Checks that `t` realizes every range of `g` and keeps non-edges beyond `cap`.
pub fn verify_labeled_leaf_root(g: &LabeledGraph, t: &LeafRootTree, cap: usize) -> Verdict {
    let n = g.graph().vertex_count();
    let mut out = Vec::new();
    check_mapping(n, t, &mut out);
    let d = t.leaf_distance_matrix(n);
    for u in 0..n {
        for v in u + 1..n {
            if d[u][v] == FAR {
                continue;
            }
            match g.range(u, v) {
                Some((lo, hi)) if d[u][v] < lo || d[u][v] > hi => out.push(violation(
                    "out-of-range",
                    format!("edge {u}-{v} has leaf distance {} outside [{lo},{hi}]", d[u][v]),
                    vec![u, v],
                )),
                None if d[u][v] <= cap => out.push(violation(
                    "nonadjacent-but-near",
                    format!("non-edge {u}-{v} but leaf distance {} <= {cap}", d[u][v]),
                    vec![u, v],
                )),
                _ => {}
            }
        }
    }
    Verdict::from_violations(out)
}

/// Labels every node by its closest descendant leaf (its own vertex for a
/// leaf); ties go to the smallest label among the children.
///
/// Each label class is then a downward path ending at its leaf.
///
/// # Panics
/// If the tree has no leaf.
pub fn nearest_leaf_labeling(t: &LeafRootTree) -> Vec<usize> {
    assert!(!t.leaf_map.is_empty(), "labeling needs at least one leaf");
    let leaf_label: Vec<Option<usize>> = (0..t.node_count()).map(|u| t.leaf_map.get(&u).copied()).collect();
    let (labels, _) = descendant_labeling(&t.adjacency(), &leaf_label, t.root);
    labels.into_iter().map(|l| l.expect("every subtree of a valid tree has a leaf")).collect()
}

/// Closest-descendant-leaf labels and distances for the tree rooted at `root`.
fn descendant_labeling(adj: &[Vec<usize>], leaf_label: &[Option<usize>], root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let (parent, order) = orient(adj, root);
    let mut label = vec![None; adj.len()];
    let mut dist = vec![FAR; adj.len()];
    for &u in order.iter().rev() {
        if let Some(l) = leaf_label[u] {
            label[u] = Some(l);
            dist[u] = 0;
            continue;
        }
        let best = adj[u].iter().filter(|&&c| c != parent[u] && label[c].is_some()).map(|&c| (dist[c] + 1, label[c].unwrap())).min();
        if let Some((d, l)) = best {
            label[u] = Some(l);
            dist[u] = d;
        }
    }
    (label, dist)
}

/// Inserts a fresh node on every leaf edge, raising leaf distances by two.
pub fn subdivide_leaf_edges(t: &LeafRootTree) -> LeafRootTree {
    if t.node_count() <= 2 {
        // a lone leaf has no pair distances to raise
        return t.clone();
    }
    let mut parent = t.parent.clone();
    for &l in t.leaf_map.keys() {
        let mid = parent.len();
        parent.push(parent[l]);
        parent[l] = mid;
    }
    LeafRootTree { parent, root: t.root, leaf_map: t.leaf_map.clone() }
}

/// Removes leaf nodes without a vertex repeatedly; keeps the root.
pub fn strip_unmapped(adj: &mut [Vec<usize>], leaf_label: &[Option<usize>], root: usize) -> Vec<bool> {
    let n = adj.len();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&u| u != root && deg[u] <= 1 && leaf_label[u].is_none()).collect();
    while let Some(u) = stack.pop() {
        if !alive[u] {
            continue;
        }
        alive[u] = false;
        for &w in &adj[u] {
            if alive[w] {
                deg[w] -= 1;
                if w != root && deg[w] <= 1 && leaf_label[w].is_none() {
                    stack.push(w);
                }
            }
        }
    }
    for list in adj.iter_mut() {
        list.retain(|&w| alive[w]);
    }
    for u in 0..n {
        if !alive[u] {
            adj[u].clear();
        }
    }
    alive
}

/// Keeps only the nodes on leaf-to-leaf paths of length at most `k`.
///
/// Returns the pruned tree and, for each of its nodes, the original node id.
/// The leaf power must be connected with at least two vertices.
pub fn prune(t: &LeafRootTree, k: usize) -> Result<(LeafRootTree, Vec<usize>)> {
    let g = leaf_power_of(t, k);
    if g.vertex_count() < 2 || !g.is_connected() {
        return Err(Error::InvalidInput("pruning needs a connected leaf power with >= 2 vertices".into()));
    }
    let adj = t.adjacency();
    let leaves = t.vertex_leaves();
    let mut keep = vec![false; t.node_count()];
    for (u, v) in g.edges() {
        let (a, b) = (leaves[&u], leaves[&v]);
        let (par, _) = orient(&adj, a);
        let mut x = b;
        keep[x] = true;
        while x != a {
            x = par[x];
            keep[x] = true;
        }
    }
    let old: Vec<usize> = (0..t.node_count()).filter(|&u| keep[u]).collect();
    let mut new_id = vec![usize::MAX; t.node_count()];
    for (i, &u) in old.iter().enumerate() {
        new_id[u] = i;
    }
    let edges: Vec<(usize, usize)> =
        t.edges().into_iter().filter(|&(a, b)| keep[a] && keep[b]).map(|(a, b)| (new_id[a], new_id[b])).collect();
    let mut leaf_map = BTreeMap::new();
    for (&l, &v) in &t.leaf_map {
        leaf_map.insert(new_id[l], v);
    }
    let mut nadj = vec![Vec::new(); old.len()];
    for &(a, b) in &edges {
        nadj[a].push(b);
        nadj[b].push(a);
    }
    // two leaves are never adjacent, so the kept part has >= 3 nodes and an interior node
    let root = if nadj[new_id[t.root]].len() >= 2 && keep[t.root] {
        new_id[t.root]
    } else {
        (0..old.len()).find(|&u| nadj[u].len() >= 2).expect("pruned tree has an interior node")
    };
    Ok((LeafRootTree::from_edges(old.len(), &edges, root, leaf_map)?, old))
}

/// A subset of product edges together with the chosen leaf on each level.
#[derive(Clone, Debug)]
pub struct ProductSubtree {
    pub product: ProductGraph,
    pub edge_set: Vec<(usize, usize)>,
    /// Base vertex → product vertex hosting its leaf.
    pub leaf_of_level: Vec<usize>,
    /// Original tree node → product vertex, for nodes that survived pruning.
    pub node_image: BTreeMap<usize, usize>,
}

/// Embeds a `k`-leaf root of a connected graph as a subtree of `G ⊠ C_k`.
///
/// The tree is pruned first. Each node is mapped to `(label, depth mod k)`
/// where labels come from the closest-descendant-leaf rule at some interior
/// root; when no root makes that rule injective and edge-preserving, a
/// rooted chain labeling is searched instead.
pub fn embed_in_product(g: &Graph, t: &LeafRootTree, k: usize) -> Result<ProductSubtree> {
    let product = ProductGraph::new(g, k)?;
    embed_with_product(g, t, k, product)
}

/// Labeled counterpart of [`embed_in_product`] over the labeled product.
pub fn embed_labeled_in_product(g: &LabeledGraph, t: &LeafRootTree, cap: usize) -> Result<ProductSubtree> {
    let v = verify_labeled_leaf_root(g, t, cap);
    if !v.ok {
        return Err(Error::InvalidInput(format!("witness does not verify: {:?}", v.violations[0])));
    }
    let product = ProductGraph::labeled(g, cap)?;
    embed_with_product(g.graph(), t, cap, product)
}

fn embed_with_product(g: &Graph, t: &LeafRootTree, k: usize, product: ProductGraph) -> Result<ProductSubtree> {
    if g.vertex_count() < 3 {
        return Err(Error::InvalidInput("embedding needs at least 3 vertices".into()));
    }
    if connected_components(g).len() != 1 {
        return Err(Error::InvalidInput("embedding needs a connected graph".into()));
    }
    let v = verify_leaf_root(g, t, k);
    if !v.ok {
        return Err(Error::InvalidInput(format!("witness does not verify: {:?}", v.violations[0])));
    }
    let (pt, old) = prune(t, k)?;
    let adj = pt.adjacency();
    let leaf_label: Vec<Option<usize>> = (0..pt.node_count()).map(|u| pt.leaf_map.get(&u).copied()).collect();
    let interior: Vec<usize> = (0..pt.node_count()).filter(|&u| adj[u].len() >= 2).collect();

    let mut labels = None;
    let mut root = 0;
    for &r in &interior {
        if let Some(l) = nearest_labels_if_embeddable(g, &adj, &leaf_label, r, k) {
            labels = Some(l);
            root = r;
            break;
        }
    }
    if labels.is_none() {
        for &r in &interior {
            if let Some(l) = chain_labeling(g, &adj, &leaf_label, r, k) {
                labels = Some(l);
                root = r;
                break;
            }
        }
    }
    let labels = labels.ok_or_else(|| Error::Internal("no chain labeling embeds the tree".into()))?;
    let depth = bfs(&adj, root, FAR);
    let image: Vec<usize> = (0..pt.node_count()).map(|u| product.vertex(labels[u], depth[u] % k)).collect();
    let mut edge_set: Vec<(usize, usize)> = pt.edges().into_iter().map(|(a, b)| (image[a].min(image[b]), image[a].max(image[b]))).collect();
    edge_set.sort_unstable();
    let mut leaf_of_level = vec![0; g.vertex_count()];
    for (&l, &v) in &pt.leaf_map {
        leaf_of_level[v] = image[l];
    }
    let node_image = (0..pt.node_count()).map(|u| (old[u], image[u])).collect();
    let sub = ProductSubtree { product, edge_set, leaf_of_level, node_image };
    let mut distinct = image.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != image.len() {
        return Err(Error::Internal("embedding is not injective".into()));
    }
    let check = if sub.product.is_labeled() {
        check_labeled_product_subtree(&sub.product, &sub.edge_set, k)
    } else {
        check_product_subtree(&sub.product, &sub.edge_set, k)
    };
    if !check.ok {
        return Err(Error::Internal(format!("embedding fails the subtree check: {:?}", check.violations[0])));
    }
    Ok(sub)
}

fn nearest_labels_if_embeddable(g: &Graph, adj: &[Vec<usize>], leaf_label: &[Option<usize>], root: usize, k: usize) -> Option<Vec<usize>> {
    let (label, dist) = descendant_labeling(adj, leaf_label, root);
    if dist.iter().any(|&d| d >= k) {
        return None;
    }
    let label: Vec<usize> = label.into_iter().collect::<Option<_>>()?;
    let (parent, _) = orient(adj, root);
    for u in 0..adj.len() {
        let p = parent[u];
        if p != u && label[p] != label[u] && !g.has_edge(label[p], label[u]) {
            return None;
        }
    }
    Some(label)
}

/// Searches a labeling where each interior node inherits the label of one
/// child, chains span at most `k` nodes, and every other child carries a
/// label adjacent in `g`.
fn chain_labeling(g: &Graph, adj: &[Vec<usize>], leaf_label: &[Option<usize>], root: usize, k: usize) -> Option<Vec<usize>> {
    let (parent, order) = orient(adj, root);
    // options[u]: (label, chain depth below u) → (inherited child, other children's chosen options)
    type Choice = Option<(usize, Vec<(usize, (usize, usize))>)>;
    let mut options: Vec<BTreeMap<(usize, usize), Choice>> = vec![BTreeMap::new(); adj.len()];
    for &u in order.iter().rev() {
        if let Some(l) = leaf_label[u] {
            options[u].insert((l, 0), None);
            continue;
        }
        let children: Vec<usize> = adj[u].iter().copied().filter(|&c| c != parent[u]).collect();
        let mut found: BTreeMap<(usize, usize), Choice> = BTreeMap::new();
        for &ci in &children {
            for &(l, d) in options[ci].keys() {
                if d + 1 >= k || found.contains_key(&(l, d + 1)) {
                    continue;
                }
                let mut picks = Vec::new();
                let ok = children.iter().filter(|&&c| c != ci).all(|&cj| match options[cj].keys().find(|&&(lj, _)| g.has_edge(l, lj)) {
                    Some(&opt) => {
                        picks.push((cj, opt));
                        true
                    }
                    None => false,
                });
                if ok {
                    found.insert((l, d + 1), Some((ci, picks)));
                }
            }
        }
        if found.is_empty() {
            return None;
        }
        options[u] = found;
    }
    let mut label = vec![usize::MAX; adj.len()];
    let start = *options[root].keys().next()?;
    let mut stack = vec![(root, start)];
    while let Some((u, opt)) = stack.pop() {
        label[u] = opt.0;
        if let Some(Some((ci, picks))) = options[u].get(&opt) {
            stack.push((*ci, (opt.0, opt.1 - 1)));
            stack.extend(picks.iter().copied());
        }
    }
    Some(label)
}

struct SubtreeView {
    adj: Vec<Vec<usize>>,
    reps: Vec<Option<usize>>,
    violations: Vec<Violation>,
}

/// Properties shared by the plain and labeled checks: product edges only,
/// acyclicity, and one degree-1 vertex per level.
fn subtree_structure(p: &ProductGraph, s: &[(usize, usize)]) -> SubtreeView {
    let nv = p.vertex_count();
    let k = p.cycle_length();
    let mut out = Vec::new();
    let mut adj = vec![Vec::new(); nv];
    let mut uf: Vec<usize> = (0..nv).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(a, b) in s {
        if a >= nv || b >= nv || p.edge_index(a, b).is_none() {
            out.push(violation("not-a-product-edge", format!("({a},{b}) is not a product edge"), vec![a, b]));
            continue;
        }
        if !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            out.push(violation("cycle", format!("edge ({a},{b}) closes a cycle"), vec![a, b]));
        } else {
            uf[ra] = rb;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut reps = vec![None; p.base_vertex_count()];
    for v in 0..p.base_vertex_count() {
        let ends: Vec<usize> = (0..k).map(|r| v * k + r).filter(|&x| adj[x].len() == 1).collect();
        if ends.len() == 1 {
            reps[v] = Some(ends[0]);
        } else {
            out.push(violation("leaf-count", format!("level {v} has {} leaves of the edge set, expected exactly one", ends.len()), ends));
        }
    }
    SubtreeView { adj, reps, violations: out }
}

/// Base adjacency recovered from the vertical edges of a product.
fn base_graph(p: &ProductGraph) -> Graph {
    let k = p.cycle_length();
    let mut g = Graph::new(p.base_vertex_count());
    for &(a, b, c) in p.edges() {
        if c == EdgeColor::Vertical && a % k == 0 {
            g.add_edge(a / k, b / k).unwrap();
        }
    }
    g
}

fn rep_distances(view: &SubtreeView, cap: usize) -> Vec<Option<Vec<usize>>> {
    view.reps.iter().map(|r| r.map(|x| bfs(&view.adj, x, cap))).collect()
}

/// Checks the subtree characterization of `k`-leaf roots inside `p`:
/// `s` is a forest, each level has exactly one leaf of `s`, and levels are
/// adjacent exactly when their leaves are within distance `k` in `s`.
pub fn check_product_subtree(p: &ProductGraph, s: &[(usize, usize)], k: usize) -> Verdict {
    let mut view = subtree_structure(p, s);
    let g = base_graph(p);
    let dist = rep_distances(&view, k);
    let n = p.base_vertex_count();
    for u in 0..n {
        for v in u + 1..n {
            let d = match (&dist[u], view.reps[v]) {
                (Some(du), Some(rv)) => du[rv],
                _ => FAR,
            };
            match (g.has_edge(u, v), d <= k) {
                (true, false) => view.violations.push(violation(
                    "adjacent-but-far",
                    format!("levels {u},{v} share product edges but their leaves are not within {k}"),
                    vec![u, v],
                )),
                (false, true) => view.violations.push(violation(
                    "nonadjacent-but-near",
                    format!("levels {u},{v} share no product edge but their leaves are within {k}"),
                    vec![u, v],
                )),
                _ => {}
            }
        }
    }
    Verdict::from_violations(view.violations)
}

/// Labeled subtree characterization: every labeled edge's level leaves lie
/// within its range, and leaves within `cap` sit on adjacent levels.
pub fn check_labeled_product_subtree(p: &ProductGraph, s: &[(usize, usize)], cap: usize) -> Verdict {
    let mut view = subtree_structure(p, s);
    let k = p.cycle_length();
    let g = base_graph(p);
    let dist = rep_distances(&view, cap.max(k));
    let n = p.base_vertex_count();
    for u in 0..n {
        for v in u + 1..n {
            let d = match (&dist[u], view.reps[v]) {
                (Some(du), Some(rv)) => du[rv],
                _ => FAR,
            };
            if g.has_edge(u, v) {
                let (lo, hi) = p.inherited_range(u * k, v * k).unwrap_or((2, cap));
                if d < lo || d > hi {
                    view.violations.push(violation(
                        "out-of-range",
                        format!("levels {u},{v}: leaf distance outside [{lo},{hi}]"),
                        vec![u, v],
                    ));
                }
            } else if d <= cap {
                view.violations.push(violation(
                    "nonadjacent-but-near",
                    format!("levels {u},{v} share no product edge but their leaves are within {cap}"),
                    vec![u, v],
                ));
            }
        }
    }
    Verdict::from_violations(view.violations)
}

/// Whether `a` and `b` are distinct and joined by a path of at most `bound`
/// edges of `s`.
pub fn has_path_within(s: &[(usize, usize)], a: usize, b: usize, bound: usize) -> bool {
    if a == b {
        return false;
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    for &(x, y) in s {
        let len = ids.len();
        ids.entry(x).or_insert(len);
        let len = ids.len();
        ids.entry(y).or_insert(len);
    }
    let (Some(&ia), Some(&ib)) = (ids.get(&a), ids.get(&b)) else { return false };
    let mut adj = vec![Vec::new(); ids.len()];
    for &(x, y) in s {
        adj[ids[&x]].push(ids[&y]);
        adj[ids[&y]].push(ids[&x]);
    }
    bfs(&adj, ia, bound)[ib] <= bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Star: root 0 with leaves 1,2,3 mapped to vertices 0,1,2.
    fn star() -> LeafRootTree {
        LeafRootTree::new(vec![0, 0, 0, 0], 0, BTreeMap::from([(1, 0), (2, 1), (3, 2)])).unwrap()
    }

    /// Path x(0)-y(1)-z(2) with leaves a(3)@x, b(4)@y, c(5)@z, rooted at y.
    pub(crate) fn p3_tree() -> LeafRootTree {
        LeafRootTree::new(vec![1, 1, 1, 0, 1, 2], 1, BTreeMap::from([(3, 0), (4, 1), (5, 2)])).unwrap()
    }

    /// Random tree grown by attaching nodes, then mapped leaves.
    pub(crate) fn random_tree(rng: &mut ChaCha8Rng, nodes: usize) -> LeafRootTree {
        let mut edges = Vec::new();
        for u in 1..nodes {
            edges.push((rng.gen_range(0..u), u));
        }
        let mut deg = vec![0; nodes];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let root = (0..nodes).find(|&u| deg[u] >= 2).unwrap_or(0);
        let leaves: Vec<usize> = (0..nodes).filter(|&u| u != root && deg[u] <= 1).collect();
        let map = leaves.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        LeafRootTree::from_edges(nodes, &edges, root, map).unwrap()
    }

    #[test]
    fn tree_validation() {
        assert!(LeafRootTree::new(vec![1, 0], 0, BTreeMap::new()).is_err());
        assert!(LeafRootTree::new(vec![0, 0, 1], 0, BTreeMap::from([(2, 0)])).is_err()); // root degree 1
        assert!(LeafRootTree::new(vec![0, 0, 0], 0, BTreeMap::from([(1, 0)])).is_err()); // leaf 2 unmapped
        assert!(LeafRootTree::new(vec![0, 0, 0], 0, BTreeMap::from([(1, 0), (2, 0)])).is_err());
        assert!(LeafRootTree::new(vec![0, 0], 0, BTreeMap::from([(1, 0)])).is_ok());
    }

    #[test]
    fn leaf_power_examples() {
        assert_eq!(leaf_power_of(&star(), 2), Graph::complete(3));
        assert_eq!(leaf_power_of(&p3_tree(), 3), Graph::path(3));
        let lg = labeled_leaf_power_of(&star(), 2);
        assert!(lg.ranges().values().all(|&r| r == (2, 2)));
        assert_eq!(lg.graph().edge_count(), 3);
        let lg = labeled_leaf_power_of(&p3_tree(), 3);
        assert_eq!(lg.range(0, 1), Some((3, 3)));
        assert_eq!(lg.range(1, 2), Some((3, 3)));
        assert_eq!(lg.range(0, 2), None);
        assert_eq!(labeled_leaf_power_of(&p3_tree(), 1).graph().edge_count(), 0);
    }

    #[test]
    fn k2_powers_are_sibling_cliques() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let t = random_tree(&mut rng, 12);
            let g = leaf_power_of(&t, 2);
            for (&a, &u) in t.leaf_map() {
                for (&b, &v) in t.leaf_map() {
                    if u < v {
                        assert_eq!(g.has_edge(u, v), t.parent(a) == t.parent(b));
                    }
                }
            }
        }
    }

    #[test]
    fn verify_examples() {
        assert!(verify_leaf_root(&Graph::complete(3), &star(), 2).ok);
        let v = verify_leaf_root(&Graph::complete(3), &star(), 1);
        assert_eq!(v.violations.len(), 3);
        assert!(v.violations.iter().all(|x| x.code == "adjacent-but-far"));
        assert!(verify_leaf_root(&Graph::path(3), &p3_tree(), 3).ok);
        assert!(verify_leaf_root(&Graph::path(4), &p3_tree(), 3).has("unmapped-vertex"));
    }

    #[test]
    fn verify_labeled_examples() {
        let t = p3_tree();
        let lg = labeled_leaf_power_of(&t, 4);
        assert!(verify_labeled_leaf_root(&lg, &t, 4).ok);
        let mut tight = lg.clone();
        tight.set_range(0, 1, (2, 2)).unwrap();
        assert!(verify_labeled_leaf_root(&tight, &t, 4).has("out-of-range"));
        let g = lg.graph();
        let kept: Vec<_> = g.edges().filter(|&e| e != (0, 2)).collect();
        let dropped =
            LabeledGraph::new(Graph::from_edges(3, &kept).unwrap(), kept.iter().map(|&e| (e, lg.range(e.0, e.1).unwrap())).collect(), 4)
                .unwrap();
        assert!(verify_labeled_leaf_root(&dropped, &t, 4).has("nonadjacent-but-near"));
    }

    #[test]
    fn labeling_examples() {
        assert_eq!(nearest_leaf_labeling(&star())[0], 0);
        let l = nearest_leaf_labeling(&p3_tree());
        assert_eq!(&l[0..3], &[0, 1, 2]);
        // caterpillar spine 0-1-2, leaf 3 under 1 only; 0 and 2 carry deeper leaves
        let t = LeafRootTree::from_edges(
            8,
            &[(0, 1), (1, 2), (1, 3), (0, 4), (4, 5), (2, 6), (6, 7)],
            1,
            BTreeMap::from([(3, 0), (5, 1), (7, 2)]),
        )
        .unwrap();
        assert_eq!(nearest_leaf_labeling(&t)[1], 0);
    }

    #[test]
    fn subdivision_example() {
        let t = subdivide_leaf_edges(&p3_tree());
        assert!(verify_leaf_root(&Graph::path(3), &t, 5).ok);
        let k2 = LeafRootTree::new(vec![0, 0, 0], 0, BTreeMap::from([(1, 0), (2, 1)])).unwrap();
        let s = subdivide_leaf_edges(&k2);
        assert!(verify_leaf_root(&Graph::path(2), &s, 4).ok);
    }

    #[test]
    fn embedding_examples() {
        let e = embed_in_product(&Graph::path(3), &p3_tree(), 3).unwrap();
        assert_eq!(e.node_image.len(), 6);
        assert!(check_product_subtree(&e.product, &e.edge_set, 3).ok);

        let p = ProductGraph::new(&Graph::path(3), 3).unwrap();
        assert!(check_product_subtree(&p, &[], 3).has("adjacent-but-far"));
        let tri = [(0, 1), (1, 2), (0, 2)];
        assert!(check_product_subtree(&p, &tri, 3).has("cycle"));

        assert!(
            embed_in_product(&Graph::path(2), &LeafRootTree::new(vec![0, 0, 0], 0, BTreeMap::from([(1, 0), (2, 1)])).unwrap(), 3).is_err()
        );
        assert!(embed_in_product(&Graph::path(3), &p3_tree(), 2).is_err());
    }

    #[test]
    fn fig5_shape_embeds() {
        // four leaves on a path of two interior nodes, k=4: graph is K_4 minus nothing at distance <= 4
        let t = LeafRootTree::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)], 0, BTreeMap::from([(2, 0), (3, 1), (4, 2), (5, 3)]))
            .unwrap();
        let g = leaf_power_of(&t, 4);
        let e = embed_in_product(&g, &t, 4).unwrap();
        assert!(check_product_subtree(&e.product, &e.edge_set, 4).ok);
    }

    #[test]
    fn labeled_embedding_and_perturbations() {
        let t = p3_tree();
        let lg = labeled_leaf_power_of(&t, 4);
        let e = embed_labeled_in_product(&lg, &t, 4).unwrap();
        assert!(check_labeled_product_subtree(&e.product, &e.edge_set, 4).ok);
        // a range that excludes the realized distance
        let mut tight = lg.clone();
        tight.set_range(0, 1, (4, 4)).unwrap();
        let p = ProductGraph::labeled(&tight, 4).unwrap();
        assert!(check_labeled_product_subtree(&p, &e.edge_set, 4).has("out-of-range"));
        // a forest with leaves close together on non-adjacent levels
        let lg0 = LabeledGraph::from_unlabeled(&Graph::path(3), 4).unwrap();
        let p = ProductGraph::labeled(&lg0, 4).unwrap();
        let s = [(0, 4), (4, 5), (5, 9), (5, 6)];
        assert!(check_labeled_product_subtree(&p, &s, 4).has("nonadjacent-but-near"));
    }

    fn connected_instance(seed: u64, nodes: usize, k: usize) -> Option<(Graph, LeafRootTree)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, nodes);
        let g = leaf_power_of(&t, k);
        (g.vertex_count() >= 3 && g.is_connected()).then_some((g, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip(seed in any::<u64>(), nodes in 2usize..30, k in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, nodes);
            prop_assert!(verify_leaf_root(&leaf_power_of(&t, k), &t, k).ok);
            let lg = labeled_leaf_power_of(&t, k.max(2));
            prop_assert!(verify_labeled_leaf_root(&lg, &t, k.max(2)).ok);
        }

        #[test]
        fn subdivision_lifts_k_to_k_plus_2(seed in any::<u64>(), nodes in 2usize..30, k in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, nodes);
            let g = leaf_power_of(&t, k);
            prop_assert!(verify_leaf_root(&g, &subdivide_leaf_edges(&t), k + 2).ok);
        }

        #[test]
        fn labeling_classes_are_paths(seed in any::<u64>(), nodes in 2usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, nodes);
            let lab = nearest_leaf_labeling(&t);
            let adj = t.adjacency();
            let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (u, &l) in lab.iter().enumerate() {
                classes.entry(l).or_default().push(u);
            }
            for members in classes.values() {
                let inside = |w: usize| lab[w] == lab[members[0]];
                let degs: Vec<usize> = members.iter().map(|&u| adj[u].iter().filter(|&&w| inside(w)).count()).collect();
                let edges: usize = degs.iter().sum::<usize>() / 2;
                prop_assert_eq!(edges + 1, members.len());
                prop_assert!(degs.iter().all(|&d| d <= 2));
            }
        }

        #[test]
        fn embedding_passes_subtree_check(seed in any::<u64>(), nodes in 4usize..24, k in 3usize..7) {
            if let Some((g, t)) = connected_instance(seed, nodes, k) {
                let e = embed_in_product(&g, &t, k).unwrap();
                prop_assert!(check_product_subtree(&e.product, &e.edge_set, k).ok);
                let mut imgs: Vec<usize> = e.node_image.values().copied().collect();
                imgs.sort_unstable();
                imgs.dedup();
                prop_assert_eq!(imgs.len(), e.node_image.len());
                for (v, &x) in e.leaf_of_level.iter().enumerate() {
                    prop_assert_eq!(x / k, v);
                }
            }
        }

        #[test]
        fn path_test_is_monotone_in_bound(edges in proptest::collection::vec((0usize..8, 0usize..8), 0..10), a in 0usize..8, b in 0usize..8, bound in 1usize..6) {
            let s: Vec<_> = edges.into_iter().filter(|(x, y)| x != y).collect();
            if has_path_within(&s, a, b, bound) {
                prop_assert!(has_path_within(&s, a, b, bound + 1));
            }
        }
    }
}
