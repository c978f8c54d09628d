//! Local pictures: the per-bag state of the dynamic program.
//!
//! A picture fixes, for every base vertex `v` of the bag, a chain of
//! `len(v)` tree nodes on `v`'s horizontal cycle. Height 0 is `v`'s
//! representative leaf and the top node attaches upward. Nodes are indexed
//! chain by chain in bag order.

use crate::graph::{Graph, LabeledGraph, Range};

/// Distance or μ value beyond the cap.
pub const INF: u8 = u8::MAX;

/// Placement of a chain on its cycle: start residue and direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub start: u8,
    pub reversed: bool,
}

impl Arc {
    pub const CANONICAL: Arc = Arc { start: 0, reversed: false };

    pub fn residue(self, h: usize, k: usize) -> usize {
        let s = self.start as usize;
        if self.reversed {
            (s + k * k - h) % k
        } else {
            (s + h) % k
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalPicture {
    /// Base vertices of the bag, ascending.
    pub vertices: Vec<usize>,
    /// Chain length per bag vertex.
    pub lens: Vec<u8>,
    /// The chain's top hangs below another chain, so its length is final.
    pub fixed: Vec<bool>,
    /// Chain placement per bag vertex; the engine keeps these canonical.
    pub arcs: Vec<Arc>,
    /// Component id per node, numbered by first occurrence.
    pub comp: Vec<u8>,
    /// Nodes joined through forgotten nodes only share a class; numbered by
    /// first occurrence.
    pub link: Vec<u8>,
    /// Row-major node distances; [`INF`] across components or beyond the cap.
    pub dist: Vec<u8>,
    /// Distance to the nearest forgotten leaf of the same component.
    pub mu: Vec<u8>,
    /// Everything has been forgotten into a single finished component.
    pub closed: bool,
}

/// Edge ranges used by the validity filter.
#[derive(Clone, Copy)]
pub enum Ranges<'a> {
    /// Plain `k`-leaf powers: an edge needs distance at most the cap.
    Plain(&'a Graph),
    Labeled(&'a LabeledGraph),
}

/// Shared parameters of one DP run.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub ranges: Ranges<'a>,
    /// Distances above this collapse to [`INF`]; also the maximal chain length.
    pub cap: usize,
}

impl<'a> Ctx<'a> {
    pub fn plain(g: &'a Graph, k: usize) -> Self {
        Ctx { ranges: Ranges::Plain(g), cap: k }
    }

    pub fn labeled(g: &'a LabeledGraph, cap: usize) -> Self {
        Ctx { ranges: Ranges::Labeled(g), cap }
    }

    pub fn graph(&self) -> &'a Graph {
        match self.ranges {
            Ranges::Plain(g) => g,
            Ranges::Labeled(lg) => lg.graph(),
        }
    }

    pub fn range(&self, u: usize, v: usize) -> Option<Range> {
        match self.ranges {
            Ranges::Plain(g) => g.has_edge(u, v).then_some((1, self.cap)),
            Ranges::Labeled(lg) => lg.range(u, v),
        }
    }

    /// Whether a fixed leaf distance `d` is acceptable for the pair.
    pub fn pair_ok(&self, u: usize, v: usize, d: u8) -> bool {
        match self.range(u, v) {
            Some((lo, hi)) => d != INF && lo <= d as usize && d as usize <= hi,
            None => d == INF,
        }
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        if a == INF || b == INF {
            return INF;
        }
        let s = a as usize + b as usize;
        if s > self.cap {
            INF
        } else {
            s as u8
        }
    }
}

impl LocalPicture {
    pub fn node_count(&self) -> usize {
        self.comp.len()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.lens.len() + 1);
        let mut acc = 0;
        for &l in &self.lens {
            off.push(acc);
            acc += l as usize;
        }
        off.push(acc);
        off
    }

    /// Bag position of the vertex owning each node.
    pub fn owners(&self) -> Vec<usize> {
        self.lens.iter().enumerate().flat_map(|(i, &l)| std::iter::repeat_n(i, l as usize)).collect()
    }

    #[inline]
    pub fn d(&self, a: usize, b: usize) -> u8 {
        self.dist[a * self.node_count() + b]
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Present product vertices `(v, r)` with `r` from the chain arcs.
    pub fn product_vertices(&self, k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            for h in 0..self.lens[i] as usize {
                out.push((v, self.arcs[i].residue(h, k)));
            }
        }
        out
    }

    /// A picture made of a single chain.
    pub fn single_chain(v: usize, len: usize, arc: Arc) -> Self {
        let n = len;
        let mut dist = vec![0u8; n * n];
        for a in 0..n {
            for b in 0..n {
                dist[a * n + b] = a.abs_diff(b) as u8;
            }
        }
        LocalPicture {
            vertices: vec![v],
            lens: vec![len as u8],
            fixed: vec![false],
            arcs: vec![arc],
            comp: vec![0; n],
            link: (0..n as u8).collect(),
            dist,
            mu: vec![INF; n],
            closed: false,
        }
    }

    /// Renumbers components and link classes by first node occurrence.
    pub fn normalize(&mut self) {
        renumber(&mut self.comp);
        renumber(&mut self.link);
    }

    pub fn comp_count(&self) -> usize {
        self.comp.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// The unique present neighbour of node `a`, if any.
    pub fn present_neighbor(&self, a: usize) -> Option<usize> {
        (0..self.node_count()).find(|&b| self.d(a, b) == 1)
    }

    /// Adds one node above the top of chain `i`.
    pub fn extend(&self, i: usize, cap: usize) -> LocalPicture {
        let add1 = |d: u8| if d == INF || d as usize + 1 > cap { INF } else { d + 1 };
        debug_assert!(!self.fixed[i]);
        let off = self.offsets();
        let top = off[i + 1] - 1;
        let z = off[i + 1];
        let n = self.node_count();
        let nn = n + 1;
        let shift = |a: usize| if a < z { a } else { a + 1 };
        let mut q = LocalPicture {
            vertices: self.vertices.clone(),
            lens: self.lens.clone(),
            fixed: self.fixed.clone(),
            arcs: self.arcs.clone(),
            comp: vec![0; nn],
            link: vec![0; nn],
            dist: vec![INF; nn * nn],
            mu: vec![INF; nn],
            closed: false,
        };
        q.lens[i] += 1;
        for a in 0..n {
            let sa = shift(a);
            q.comp[sa] = self.comp[a];
            q.link[sa] = self.link[a];
            q.mu[sa] = self.mu[a];
            for b in 0..n {
                q.dist[sa * nn + shift(b)] = self.d(a, b);
            }
        }
        q.comp[z] = self.comp[top];
        q.link[z] = n as u8;
        q.mu[z] = add1(self.mu[top]);
        for a in 0..n {
            let dz = add1(self.d(a, top));
            q.dist[shift(a) * nn + z] = dz;
            q.dist[z * nn + shift(a)] = dz;
        }
        q.dist[z * nn + z] = 0;
        q.normalize();
        q
    }

    /// Extends chain `i` to `len` nodes, or `None` when its length is final.
    pub fn extended(&self, i: usize, len: usize, cap: usize) -> Option<LocalPicture> {
        let cur = self.lens[i] as usize;
        if len < cur || (len > cur && self.fixed[i]) {
            return None;
        }
        let mut q = self.clone();
        for _ in cur..len {
            q = q.extend(i, cap);
        }
        Some(q)
    }

    /// Validity filter over representative pairs accepted by `which`:
    /// same-component representatives must realize the pair's range, and
    /// [`INF`] is only allowed for non-edges.
    pub fn reps_consistent(&self, ctx: &Ctx, which: impl Fn(usize, usize) -> bool) -> bool {
        let off = self.offsets();
        let m = self.lens.len();
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (off[i], off[j]);
                if self.comp[a] != self.comp[b] || !which(i, j) {
                    continue;
                }
                if !ctx.pair_ok(self.vertices[i], self.vertices[j], self.d(a, b)) {
                    return false;
                }
            }
        }
        true
    }
}

fn renumber(ids: &mut [u8]) {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    for c in ids.iter_mut() {
        if map[*c as usize] == u8::MAX {
            map[*c as usize] = next;
            next += 1;
        }
        *c = map[*c as usize];
    }
}

/// Opaque key identifying a picture up to component renaming and chain
/// placement on the cycles.
pub fn canonical_key(p: &LocalPicture) -> Vec<u8> {
    let mut q = p.clone();
    q.normalize();
    let mut key = Vec::with_capacity(8 + q.comp.len() * (q.comp.len() + 3));
    for &v in &q.vertices {
        key.extend_from_slice(&(v as u64).to_le_bytes());
    }
    key.push(0xfe);
    key.extend_from_slice(&q.lens);
    key.extend(q.fixed.iter().map(|&f| f as u8));
    key.extend_from_slice(&q.comp);
    key.extend_from_slice(&q.link);
    key.extend_from_slice(&q.dist);
    key.extend_from_slice(&q.mu);
    key.push(q.closed as u8);
    key
}
