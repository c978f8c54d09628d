//! Picture transitions for the five node kinds of an extra-nice
//! decomposition.
//!
//! The single-picture functions return `None` when the successor violates a
//! local constraint. The set-level functions apply them to whole tables and
//! keep every produced picture, duplicates included.

use super::picture::{Arc, Ctx, LocalPicture, INF};

/// Every chain placement of length `len` on a cycle of length `k`.
pub fn arcs(len: usize, k: usize) -> Vec<Arc> {
    let mut out = Vec::new();
    for start in 0..k as u8 {
        out.push(Arc { start, reversed: false });
        if len >= 2 {
            out.push(Arc { start, reversed: true });
        }
    }
    out
}

/// Pictures of a leaf bag `{v}`: one per chain of at most `k` nodes on
/// `v`'s cycle.
pub fn leaf_bag_pictures(v: usize, k: usize) -> Vec<LocalPicture> {
    let mut out = Vec::new();
    for len in 1..=k {
        for arc in arcs(len, k) {
            out.push(LocalPicture::single_chain(v, len, arc));
        }
    }
    out
}

/// Adds a fresh chain for `v` as its own component.
pub fn introduce(p: &LocalPicture, v: usize, len: usize, arc: Arc) -> Option<LocalPicture> {
    if p.closed || p.position(v).is_some() {
        return None;
    }
    let pos = p.vertices.partition_point(|&x| x < v);
    let off = p.offsets();
    let n = p.node_count();
    let nn = n + len;
    let start = off[pos];
    let shift = |a: usize| if a < start { a } else { a + len };

    let mut q = LocalPicture {
        vertices: p.vertices.clone(),
        lens: p.lens.clone(),
        fixed: p.fixed.clone(),
        arcs: p.arcs.clone(),
        comp: vec![0; nn],
        link: vec![0; nn],
        dist: vec![INF; nn * nn],
        mu: vec![INF; nn],
        closed: false,
    };
    q.vertices.insert(pos, v);
    q.lens.insert(pos, len as u8);
    q.fixed.insert(pos, false);
    q.arcs.insert(pos, arc);
    for a in 0..n {
        let sa = shift(a);
        q.comp[sa] = p.comp[a];
        q.link[sa] = p.link[a];
        q.mu[sa] = p.mu[a];
        for b in 0..n {
            q.dist[sa * nn + shift(b)] = p.d(a, b);
        }
    }
    for a in 0..len {
        q.comp[start + a] = n as u8;
        q.link[start + a] = (n + a) as u8;
        for b in 0..len {
            q.dist[(start + a) * nn + start + b] = a.abs_diff(b) as u8;
        }
    }
    q.normalize();
    Some(q)
}

/// Every placement of a new chain for `v` on every picture.
pub fn introduce_transition(children: &[LocalPicture], v: usize, k: usize) -> Vec<LocalPicture> {
    let mut out = Vec::new();
    for p in children {
        for len in 1..=k {
            for arc in arcs(len, k) {
                out.extend(introduce(p, v, len, arc));
            }
        }
    }
    out
}

/// Removes `v`'s chain. Every neighbour of `v` still in the bag must already
/// sit at an admissible distance, since no later merge can bring them closer.
pub fn forget(p: &LocalPicture, v: usize, ctx: &Ctx) -> Option<LocalPicture> {
    let pos = p.position(v)?;
    let off = p.offsets();
    let rep_v = off[pos];
    let (lo, hi) = (off[pos], off[pos + 1]);
    for (j, &u) in p.vertices.iter().enumerate() {
        if j != pos && ctx.range(u, v).is_some() {
            let r = off[j];
            if p.comp[r] != p.comp[rep_v] || !ctx.pair_ok(u, v, p.d(r, rep_v)) {
                return None;
            }
        }
    }
    let n = p.node_count();
    let gone = |a: usize| (lo..hi).contains(&a);
    let keep: Vec<usize> = (0..n).filter(|&a| !gone(a)).collect();
    let nn = keep.len();
    let cv = p.comp[rep_v];
    // the forgotten region grows by v's chain and absorbs everything touching it
    let touched: Vec<bool> = (0..n).map(|a| (lo..hi).any(|b| p.link[a] == p.link[b] || p.d(a, b) == 1)).collect();
    let region = keep.iter().copied().find(|&a| touched[a]).map(|a| p.link[a]);
    let mut q = LocalPicture {
        vertices: p.vertices.clone(),
        lens: p.lens.clone(),
        fixed: p.fixed.clone(),
        arcs: p.arcs.clone(),
        comp: keep.iter().map(|&a| p.comp[a]).collect(),
        link: keep.iter().map(|&a| if touched[a] { region.unwrap() } else { p.link[a] }).collect(),
        dist: Vec::with_capacity(nn * nn),
        mu: keep.iter().map(|&a| if p.comp[a] == cv { p.mu[a].min(p.d(a, rep_v)) } else { p.mu[a] }).collect(),
        closed: false,
    };
    q.vertices.remove(pos);
    q.lens.remove(pos);
    q.fixed.remove(pos);
    q.arcs.remove(pos);
    for &a in &keep {
        for &b in &keep {
            q.dist.push(p.d(a, b));
        }
    }
    if !q.comp.contains(&cv) {
        if nn > 0 {
            return None; // a finished part that can no longer join the rest
        }
        q.closed = true;
    }
    q.normalize();
    Some(q)
}

pub fn forget_transition(children: &[LocalPicture], v: usize, ctx: &Ctx) -> Vec<LocalPicture> {
    children.iter().filter_map(|p| forget(p, v, ctx)).collect()
}

/// Hangs the top of chain `a` below height `h >= 1` of chain `b` (bag
/// positions), merging their components. A top hangs at most once.
pub fn connect(p: &LocalPicture, a: usize, b: usize, h: usize, ctx: &Ctx) -> Option<LocalPicture> {
    if h == 0 || h >= p.lens[b] as usize || p.fixed[a] {
        return None;
    }
    let off = p.offsets();
    let x = off[a + 1] - 1;
    let w = off[b] + h;
    let (cp, cq) = (p.comp[x], p.comp[w]);
    if cp == cq {
        return None;
    }
    let n = p.node_count();
    let in_p: Vec<usize> = (0..n).filter(|&z| p.comp[z] == cp).collect();
    let in_q: Vec<usize> = (0..n).filter(|&z| p.comp[z] == cq).collect();
    let is_rep = |z: usize| off[..off.len() - 1].binary_search(&z).is_ok();

    // forgotten leaves must stay beyond the cap from every other leaf
    let mx1 = ctx.add(p.mu[x], 1);
    let mw1 = ctx.add(p.mu[w], 1);
    if ctx.add(mx1, p.mu[w]) != INF {
        return None;
    }
    if in_q.iter().any(|&r| is_rep(r) && ctx.add(mx1, p.d(w, r)) != INF) {
        return None;
    }
    if in_p.iter().any(|&r| is_rep(r) && ctx.add(mw1, p.d(x, r)) != INF) {
        return None;
    }

    let mut q = p.clone();
    q.fixed[a] = true;
    for &s in &in_p {
        let sx = ctx.add(p.d(s, x), 1);
        q.mu[s] = q.mu[s].min(ctx.add(sx, p.mu[w]));
        for &t in &in_q {
            let d = ctx.add(sx, p.d(w, t));
            q.dist[s * n + t] = d;
            q.dist[t * n + s] = d;
        }
    }
    for &t in &in_q {
        q.mu[t] = q.mu[t].min(ctx.add(ctx.add(p.d(t, w), 1), p.mu[x]));
        q.comp[t] = cp;
    }
    q.normalize();
    let side_p: Vec<bool> = (0..p.lens.len()).map(|i| p.comp[off[i]] == cp).collect();
    let side_q: Vec<bool> = (0..p.lens.len()).map(|i| p.comp[off[i]] == cq).collect();
    if !q.reps_consistent(ctx, |i, j| (side_p[i] && side_q[j]) || (side_q[i] && side_p[j])) {
        return None;
    }
    Some(q)
}

/// Successors at an edge node for `uv`: the picture itself and every way
/// of hanging one endpoint's chain top below the other's chain, growing
/// either chain first when needed. Each hanging is reported as
/// `(a, b, h)` in bag positions, heights as in the successor.
pub fn edge_successors(p: &LocalPicture, u: usize, v: usize, ctx: &Ctx) -> Vec<(LocalPicture, Option<(usize, usize, usize)>)> {
    let mut out = vec![(p.clone(), None)];
    let (Some(iu), Some(iv)) = (p.position(u), p.position(v)) else {
        return out;
    };
    let k = ctx.cap;
    for (a, b) in [(iu, iv), (iv, iu)] {
        if p.fixed[a] {
            continue;
        }
        // an adjacent pair ends at distance len(a) + h <= k
        for len_a in p.lens[a] as usize..k {
            let Some(pa) = p.extended(a, len_a, k) else { break };
            for h in 1..=k - len_a {
                let need = (h + 1).max(pa.lens[b] as usize);
                let Some(pb) = pa.extended(b, need, k) else { break };
                if let Some(q) = connect(&pb, a, b, h, ctx) {
                    out.push((q, Some((a, b, h))));
                }
            }
        }
    }
    out
}

pub fn edge_transition(children: &[LocalPicture], u: usize, v: usize, ctx: &Ctx) -> Vec<LocalPicture> {
    children.iter().flat_map(|p| edge_successors(p, u, v, ctx)).map(|(q, _)| q).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// False when both already lie in one class.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Glues two pictures over the same bag and chain lengths.
///
/// The union of both sides must be a forest: edges between present nodes
/// (distance 1) may occur on both sides and count once, while each link
/// class stands for a forgotten region private to its side.
pub fn join(l: &LocalPicture, r: &LocalPicture, ctx: &Ctx) -> Option<LocalPicture> {
    if l.closed || r.closed || l.vertices != r.vertices {
        return None;
    }
    if l.lens != r.lens {
        // grow open chains on either side to a common length
        let (mut l2, mut r2) = (l.clone(), r.clone());
        for i in 0..l.lens.len() {
            let len = l.lens[i].max(r.lens[i]) as usize;
            l2 = l2.extended(i, len, ctx.cap)?;
            r2 = r2.extended(i, len, ctx.cap)?;
        }
        return join(&l2, &r2, ctx);
    }
    let m = l.lens.len();
    let n = l.node_count();
    let off = l.offsets();

    let mut uf = UnionFind::new(n);
    for s in 0..n {
        for t in s + 1..n {
            if (l.d(s, t) == 1 || r.d(s, t) == 1) && !uf.union(s, t) {
                return None;
            }
        }
    }
    for side in [l, r] {
        let mut first = [usize::MAX; 256];
        for s in 0..n {
            let c = side.link[s] as usize;
            if first[c] == usize::MAX {
                first[c] = s;
            } else if !uf.union(first[c], s) {
                return None;
            }
        }
    }
    // a one-node chain's representative has a single tree edge overall
    for i in 0..m {
        if l.lens[i] == 1 && l.fixed[i] && r.fixed[i] {
            let a = off[i];
            let (nl, nr) = (l.present_neighbor(a), r.present_neighbor(a));
            if nl.is_none() || nl != nr {
                return None;
            }
        }
    }
    let merged: Vec<usize> = (0..n).map(|z| uf.find(z)).collect();

    let mut dist: Vec<u8> = l.dist.iter().zip(&r.dist).map(|(&a, &b)| a.min(b)).collect();
    for via in 0..n {
        for s in 0..n {
            let sv = dist[s * n + via];
            if sv == INF {
                continue;
            }
            for t in 0..n {
                let d = ctx.add(sv, dist[via * n + t]);
                if d < dist[s * n + t] {
                    dist[s * n + t] = d;
                }
            }
        }
    }
    for i in 0..n * n {
        if (l.dist[i] != INF && dist[i] != l.dist[i]) || (r.dist[i] != INF && dist[i] != r.dist[i]) {
            return None;
        }
    }

    let base: Vec<u8> = (0..n).map(|z| l.mu[z].min(r.mu[z])).collect();
    let mut mu = vec![INF; n];
    for s in 0..n {
        for t in 0..n {
            if merged[s] == merged[t] {
                mu[s] = mu[s].min(ctx.add(dist[s * n + t], base[t]));
            }
        }
    }

    // forgotten leaves of distinct parts stay beyond the cap
    let is_rep = |z: usize| off[..m].binary_search(&z).is_ok();
    for s in 0..n {
        for t in 0..n {
            if merged[s] != merged[t] {
                continue;
            }
            let d = dist[s * n + t];
            if ctx.add(ctx.add(l.mu[s], d), r.mu[t]) != INF {
                return None;
            }
            if l.comp[s] != l.comp[t] && ctx.add(ctx.add(l.mu[s], d), l.mu[t]) != INF {
                return None;
            }
            if r.comp[s] != r.comp[t] && ctx.add(ctx.add(r.mu[s], d), r.mu[t]) != INF {
                return None;
            }
            if is_rep(t) {
                if l.comp[s] != l.comp[t] && ctx.add(l.mu[s], d) != INF {
                    return None;
                }
                if r.comp[s] != r.comp[t] && ctx.add(r.mu[s], d) != INF {
                    return None;
                }
            }
        }
    }

    let mut link = UnionFind::new(2 * n);
    for s in 0..n {
        link.union(s, l.link[s] as usize);
        link.union(s, n + r.link[s] as usize);
    }
    let mut q = LocalPicture {
        vertices: l.vertices.clone(),
        lens: l.lens.clone(),
        fixed: l.fixed.iter().zip(&r.fixed).map(|(&a, &b)| a || b).collect(),
        arcs: l.arcs.clone(),
        comp: merged.iter().map(|&c| c as u8).collect(),
        link: (0..n).map(|s| link.find(s) as u8).collect(),
        dist,
        mu,
        closed: false,
    };
    q.normalize();
    let split = |i: usize, j: usize| l.comp[off[i]] != l.comp[off[j]] || r.comp[off[i]] != r.comp[off[j]];
    if !q.reps_consistent(ctx, split) {
        return None;
    }
    Some(q)
}

pub fn join_transition(left: &[LocalPicture], right: &[LocalPicture], ctx: &Ctx) -> Vec<LocalPicture> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            out.extend(join(l, r, ctx));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::picture::canonical_key;
    use crate::graph::Graph;
    use std::collections::HashSet;

    fn distinct(ps: &[LocalPicture]) -> usize {
        ps.iter().map(canonical_key).collect::<HashSet<_>>().len()
    }

    #[test]
    fn leaf_bag_counts() {
        assert_eq!(leaf_bag_pictures(0, 3).len(), 15);
        assert_eq!(leaf_bag_pictures(0, 4).len(), 28);
        assert_eq!(distinct(&leaf_bag_pictures(0, 3)), 3);
    }

    #[test]
    fn introduce_then_forget_round_trip() {
        let g = Graph::path(2);
        let ctx = Ctx::plain(&g, 3);
        let leaf = LocalPicture::single_chain(0, 2, Arc::CANONICAL);
        let two = introduce_transition(std::slice::from_ref(&leaf), 1, 3);
        assert_eq!(two.len(), 15);
        // 0 and 1 are adjacent but in different components: forgetting fails
        assert!(forget_transition(&two, 1, &ctx).is_empty());
        // hanging 1 below 0 puts the representatives at distance 2
        let p = introduce(&leaf, 1, 1, Arc::CANONICAL).unwrap();
        let hung = connect(&p, 1, 0, 1, &ctx).unwrap();
        assert_eq!(hung.d(0, 2), 2);
        assert!(connect(&hung, 1, 0, 1, &ctx).is_none());
        let back = forget(&hung, 1, &ctx).unwrap();
        assert_eq!(back.mu, vec![2, 1]);
        assert_eq!(back.link, vec![0, 1]);
        let closed = forget(&back, 0, &ctx).unwrap();
        assert!(closed.closed);
    }

    #[test]
    fn connect_respects_non_edges() {
        // 0 and 1 are not adjacent, so they may not come within distance 3
        let g = Graph::new(2);
        let ctx = Ctx::plain(&g, 3);
        let p = introduce(&LocalPicture::single_chain(0, 2, Arc::CANONICAL), 1, 1, Arc::CANONICAL).unwrap();
        assert!(connect(&p, 1, 0, 1, &ctx).is_none());
    }

    #[test]
    fn join_rejects_cycles() {
        let g = Graph::complete(2);
        let ctx = Ctx::plain(&g, 6);
        let base = introduce(&LocalPicture::single_chain(0, 3, Arc::CANONICAL), 1, 3, Arc::CANONICAL).unwrap();
        let a = connect(&base, 1, 0, 1, &ctx).unwrap();
        let b = connect(&base, 0, 1, 1, &ctx).unwrap();
        // two different edges between the same chains close a cycle
        assert!(join(&a, &b, &ctx).is_none());
        // the same edge on both sides counts once
        assert_eq!(canonical_key(&join(&a, &a, &ctx).unwrap()), canonical_key(&a));
        let j = join(&a, &base, &ctx).unwrap();
        assert_eq!(canonical_key(&j), canonical_key(&a));
    }

    #[test]
    fn join_rejects_paths_through_both_forgotten_sides() {
        // 0 and 1 linked through a forgotten region on each side
        let g = Graph::complete(3);
        let ctx = Ctx::plain(&g, 6);
        let chain = |v| LocalPicture::single_chain(v, 2, Arc::CANONICAL);
        let three = introduce(&introduce(&chain(0), 1, 2, Arc::CANONICAL).unwrap(), 2, 2, Arc::CANONICAL).unwrap();
        let hung = connect(&connect(&three, 0, 2, 1, &ctx).unwrap(), 1, 2, 1, &ctx).unwrap();
        let side = forget(&hung, 2, &ctx).unwrap();
        assert_eq!(side.link, vec![0, 1, 2, 1]);
        assert!(join(&side, &side, &ctx).is_none());
    }
}
