//! Simple undirected graphs, distance-range labels, and `G ⊠ C_k`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A simple undirected graph on dense vertex ids `0..n`.
///
/// Adjacency lists are kept sorted, so `has_edge` is a binary search.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    names: Option<Vec<String>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.vertex_count(), self.edges().collect::<Vec<_>>())
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edge_count: 0, names: None }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(Error::InvalidInput(format!("edge ({u},{v}) out of range for {n} vertices")));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(Error::InvalidInput(format!("duplicate edge ({u},{v})"))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn set_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.vertex_count() {
            return Err(Error::InvalidInput(format!("{} names for {} vertices", names.len(), self.vertex_count())));
        }
        self.names = Some(names);
        Ok(())
    }

    /// Display name of a vertex: its I/O name if one was set, else the
    /// 1-based id.
    pub fn name(&self, v: usize) -> String {
        match &self.names {
            Some(ns) => ns[v].clone(),
            None => (v + 1).to_string(),
        }
    }

    /// Subgraph induced by `vertices` (in the given order); vertex `i` of the
    /// result is `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut sub = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    sub.add_edge(i, j).expect("induced edges are simple");
                }
            }
        }
        if let Some(names) = &self.names {
            sub.names = Some(vertices.iter().map(|&v| names[v].clone()).collect());
        }
        sub
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).len() <= 1
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycles need at least three vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::new(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut g = Graph::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.add_edge(v, v + 1).unwrap();
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols).unwrap();
                }
            }
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.vertex_count();
        let mut g = Graph::new(off + other.vertex_count());
        for (u, v) in self.edges() {
            g.add_edge(u, v).unwrap();
        }
        for (u, v) in other.edges() {
            g.add_edge(u + off, v + off).unwrap();
        }
        g
    }
}

/// Removes a minimum-degree vertex until the graph is empty.
///
/// Returns the degeneracy (largest degree seen at removal time) and the
/// removal order. Ties go to the smallest vertex id.
pub fn degeneracy_order(g: &Graph) -> (usize, Vec<usize>) {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let maxd = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); maxd + 1];
    for v in 0..n {
        buckets[deg[v]].insert(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut d = 0;
    let mut lo = 0;
    for _ in 0..n {
        while buckets[lo].is_empty() {
            lo += 1;
        }
        let v = *buckets[lo].iter().next().unwrap();
        buckets[lo].remove(&v);
        d = d.max(lo);
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                buckets[deg[w]].remove(&w);
                deg[w] -= 1;
                buckets[deg[w]].insert(w);
                lo = lo.min(deg[w]);
            }
        }
        lo = lo.saturating_sub(1);
    }
    (d, order)
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Inclusive leaf-distance range `[lo, hi]` attached to an edge.
pub type Range = (usize, usize);

/// A graph whose edges carry distance ranges, with global cap `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    graph: Graph,
    ranges: BTreeMap<(usize, usize), Range>,
    cap: usize,
}

impl LabeledGraph {
    /// Checks that every edge has a range with `2 <= lo <= hi <= cap`.
    pub fn new(graph: Graph, ranges: BTreeMap<(usize, usize), Range>, cap: usize) -> Result<Self> {
        let mut norm = BTreeMap::new();
        for (&(u, v), &r) in &ranges {
            let key = (u.min(v), u.max(v));
            if !graph.has_edge(u, v) {
                return Err(Error::InvalidInput(format!("range given for non-edge ({u},{v})")));
            }
            if !(2 <= r.0 && r.0 <= r.1 && r.1 <= cap) {
                return Err(Error::InvalidInput(format!("range [{},{}] on edge ({u},{v}) violates 2 <= k1 <= k2 <= {cap}", r.0, r.1)));
            }
            if norm.insert(key, r).is_some() {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) labeled twice")));
            }
        }
        if let Some((u, v)) = graph.edges().find(|e| !norm.contains_key(e)) {
            return Err(Error::InvalidInput(format!("edge ({u},{v}) has no range")));
        }
        Ok(LabeledGraph { graph, ranges: norm, cap })
    }

    /// Every edge gets the range `[2, k]`, which is the plain k-leaf power
    /// condition since distinct leaves are always at distance >= 2.
    pub fn from_unlabeled(graph: &Graph, k: usize) -> Result<Self> {
        let ranges = graph.edges().map(|e| (e, (2, k))).collect();
        LabeledGraph::new(graph.clone(), ranges, k)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn range(&self, u: usize, v: usize) -> Option<Range> {
        self.ranges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn ranges(&self) -> &BTreeMap<(usize, usize), Range> {
        &self.ranges
    }

    pub fn set_range(&mut self, u: usize, v: usize, r: Range) -> Result<()> {
        let key = (u.min(v), u.max(v));
        if !self.ranges.contains_key(&key) {
            return Err(Error::InvalidInput(format!("({u},{v}) is not an edge")));
        }
        if !(2 <= r.0 && r.0 <= r.1 && r.1 <= self.cap) {
            return Err(Error::InvalidInput(format!("range [{},{}] out of bounds", r.0, r.1)));
        }
        self.ranges.insert(key, r);
        Ok(())
    }

    /// Restriction to `vertices`, keeping ranges and cap.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> LabeledGraph {
        let graph = self.graph.induced_subgraph(vertices);
        let ranges = graph.edges().map(|(i, j)| ((i, j), self.range(vertices[i], vertices[j]).unwrap())).collect();
        LabeledGraph { graph, ranges, cap: self.cap }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeColor {
    /// Same base vertex, neighbouring residues.
    Horizontal,
    /// Adjacent base vertices, same residue.
    Vertical,
    /// Adjacent base vertices and neighbouring residues.
    Diagonal,
}

/// `G ⊠ C_k` with its three-way edge coloring.
///
/// Product vertex `(v, r)` has id `v * k + r`.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    base_vertex_count: usize,
    cycle_length: usize,
    edges: Vec<(usize, usize, EdgeColor)>,
    ranges: Option<Vec<Option<Range>>>,
    adj: Vec<Vec<usize>>,
}

impl ProductGraph {
    pub fn new(g: &Graph, k: usize) -> Result<Self> {
        Self::build(g, k, None)
    }

    /// Product of a labeled graph: vertical and diagonal edges inherit the
    /// range of their base edge.
    pub fn labeled(lg: &LabeledGraph, k: usize) -> Result<Self> {
        Self::build(lg.graph(), k, Some(lg))
    }

    fn build(g: &Graph, k: usize, lg: Option<&LabeledGraph>) -> Result<Self> {
        if k < 3 {
            return Err(Error::UnsupportedCycleLength(k));
        }
        let n = g.vertex_count();
        let id = |v: usize, r: usize| v * k + r;
        let mut edges = Vec::new();
        for v in 0..n {
            for r in 0..k {
                let s = (r + 1) % k;
                edges.push((id(v, r).min(id(v, s)), id(v, r).max(id(v, s)), EdgeColor::Horizontal));
            }
        }
        for (u, v) in g.edges() {
            for r in 0..k {
                edges.push((id(u, r), id(v, r), EdgeColor::Vertical));
                edges.push((id(u, r), id(v, (r + 1) % k), EdgeColor::Diagonal));
                edges.push((id(u, (r + 1) % k), id(v, r), EdgeColor::Diagonal));
            }
        }
        edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let ranges = lg.map(|lg| {
            edges
                .iter()
                .map(|&(a, b, c)| match c {
                    EdgeColor::Horizontal => None,
                    _ => lg.range(a / k, b / k),
                })
                .collect()
        });
        let mut adj = vec![Vec::new(); n * k];
        for &(a, b, _) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(ProductGraph { base_vertex_count: n, cycle_length: k, edges, ranges, adj })
    }

    pub fn base_vertex_count(&self) -> usize {
        self.base_vertex_count
    }

    pub fn cycle_length(&self) -> usize {
        self.cycle_length
    }

    pub fn vertex_count(&self) -> usize {
        self.base_vertex_count * self.cycle_length
    }

    pub fn vertex(&self, v: usize, r: usize) -> usize {
        v * self.cycle_length + r
    }

    /// `(base vertex, residue)` of a product vertex id.
    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.cycle_length, p % self.cycle_length)
    }

    /// Edges as `(a, b, color)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize, EdgeColor)] {
        &self.edges
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adj[p]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by_key(&key, |&(x, y, _)| (x, y)).ok()
    }

    pub fn color(&self, a: usize, b: usize) -> Option<EdgeColor> {
        self.edge_index(a, b).map(|i| self.edges[i].2)
    }

    /// Inherited range of a non-horizontal edge of a labeled product.
    pub fn inherited_range(&self, a: usize, b: usize) -> Option<Range> {
        let i = self.edge_index(a, b)?;
        self.ranges.as_ref().and_then(|r| r[i])
    }

    pub fn is_labeled(&self) -> bool {
        self.ranges.is_some()
    }

    pub fn count_by_color(&self, color: EdgeColor) -> usize {
        self.edges.iter().filter(|e| e.2 == color).count()
    }

    /// The product as a plain graph on ids `v * k + r`.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.vertex_count());
        for &(a, b, _) in &self.edges {
            g.add_edge(a, b).unwrap();
        }
        g
    }
}

/// Shorthand for [`ProductGraph::new`].
pub fn strong_product_with_cycle(g: &Graph, k: usize) -> Result<ProductGraph> {
    ProductGraph::new(g, k)
}
