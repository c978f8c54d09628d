//! Fully expanded formulas for leaf-root subgraphs of `G ⊠ C_k`.

use super::ast::{Formula, Quantifier, Signature, Sort};
use crate::error::{Error, Result};

/// Edge set of horizontal product edges, free in every emitted formula.
pub const HORIZONTAL: &str = "horizontal";

/// Free edge set holding labeled product edges of range `[k1, k2]`.
pub fn range_set_name(k1: usize, k2: usize) -> String {
    format!("I_{k1}_{k2}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    Adjacent,
    Leaf,
    Acyclic,
    AlignedWith,
    Representative,
    Represented,
    HasPath(usize),
    IsRoot(usize),
    Edge(usize, usize),
    NonEdge(usize),
}

impl Predicate {
    pub const NAMES: [&'static str; 10] =
        ["adjacent", "leaf", "acyclic", "alignedwith", "representative", "represented", "haspath", "isroot", "edge", "nonedge"];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Adjacent => "adjacent",
            Predicate::Leaf => "leaf",
            Predicate::Acyclic => "acyclic",
            Predicate::AlignedWith => "alignedwith",
            Predicate::Representative => "representative",
            Predicate::Represented => "represented",
            Predicate::HasPath(_) => "haspath",
            Predicate::IsRoot(_) => "isroot",
            Predicate::Edge(..) => "edge",
            Predicate::NonEdge(_) => "nonedge",
        }
    }

    /// Looks a predicate up by name; `k` parameterizes haspath, isroot and
    /// nonedge, `(k, k2)` parameterizes edge.
    pub fn from_name(name: &str, k: usize, k2: usize) -> Option<Predicate> {
        Some(match name {
            "adjacent" => Predicate::Adjacent,
            "leaf" => Predicate::Leaf,
            "acyclic" => Predicate::Acyclic,
            "alignedwith" => Predicate::AlignedWith,
            "representative" => Predicate::Representative,
            "represented" => Predicate::Represented,
            "haspath" => Predicate::HasPath(k),
            "isroot" => Predicate::IsRoot(k),
            "edge" => Predicate::Edge(k, k2),
            "nonedge" => Predicate::NonEdge(k),
            _ => return None,
        })
    }
}

/// Builds formulas with fresh bound names so expanded predicates never
/// capture each other's variables.
#[derive(Default)]
pub struct Emitter {
    next: usize,
}

impl Emitter {
    pub fn new() -> Self {
        Emitter::default()
    }

    fn fresh(&mut self, base: &str) -> String {
        self.next += 1;
        format!("{base}{}", self.next)
    }

    /// `∃e∈S: (e∼a ∧ e∼b ∧ ¬(a=b))`; without the guard every vertex with an
    /// incident edge of `S` would be adjacent to itself.
    pub fn adjacent(&mut self, a: &str, b: &str, s: &str) -> Formula {
        let e = self.fresh("e");
        let body = Formula::And(vec![Formula::inc(&e, a), Formula::inc(&e, b), Formula::not(Formula::eq(a, b))]);
        Formula::exists(&e, Sort::Edge, Some(s), body)
    }

    /// At most one `S`-neighbour of `l` lies in `x`; `None` means all of `V`.
    pub fn leaf(&mut self, l: &str, x: Option<&str>, s: &str) -> Formula {
        let c = self.fresh("c");
        let d = self.fresh("d");
        let both = Formula::And(vec![self.adjacent(l, &c, s), self.adjacent(l, &d, s)]);
        Formula::forall(&c, Sort::Vertex, x, Formula::forall(&d, Sort::Vertex, x, Formula::implies(both, Formula::eq(&c, &d))))
    }

    /// Every nonempty vertex set contains a leaf of `S`.
    pub fn acyclic(&mut self, s: &str) -> Formula {
        let x = self.fresh("X");
        let y = self.fresh("x");
        let l = self.fresh("l");
        let nonempty = Formula::exists(&y, Sort::Vertex, Some(&x), Formula::True);
        let leaf = self.leaf(&l, Some(&x), s);
        Formula::forall(&x, Sort::VertexSet, None, Formula::implies(nonempty, Formula::exists(&l, Sort::Vertex, Some(&x), leaf)))
    }

    /// `p` and `q` are joined by horizontal edges: every cut separating them
    /// is crossed by one.
    pub fn aligned_with(&mut self, p: &str, q: &str) -> Formula {
        let c = self.fresh("C");
        let h = self.fresh("h");
        let y = self.fresh("y");
        let z = self.fresh("z");
        let cut = Formula::And(vec![Formula::mem(p, &c), Formula::not(Formula::mem(q, &c))]);
        let crossing =
            Formula::And(vec![Formula::mem(&y, &c), Formula::not(Formula::mem(&z, &c)), Formula::inc(&h, &y), Formula::inc(&h, &z)]);
        let witness = Formula::exists(
            &h,
            Sort::Edge,
            Some(HORIZONTAL),
            Formula::exists(&y, Sort::Vertex, None, Formula::exists(&z, Sort::Vertex, None, crossing)),
        );
        Formula::forall(&c, Sort::VertexSet, None, Formula::implies(cut, witness))
    }

    /// `l` is a leaf of `S` on `v`'s horizontal cycle.
    pub fn representative(&mut self, v: &str, l: &str, s: &str) -> Formula {
        Formula::And(vec![self.leaf(l, None, s), self.aligned_with(v, l)])
    }

    /// Every level has exactly one representative leaf.
    pub fn represented(&mut self, s: &str) -> Formula {
        let v = self.fresh("v");
        let l = self.fresh("l");
        let some = Formula::forall(&v, Sort::Vertex, None, Formula::exists(&l, Sort::Vertex, None, self.representative(&v, &l, s)));
        let v2 = self.fresh("v");
        let l1 = self.fresh("l");
        let l2 = self.fresh("l");
        let two = Formula::And(vec![self.representative(&v2, &l1, s), self.representative(&v2, &l2, s)]);
        let unique = Formula::forall(
            &v2,
            Sort::Vertex,
            None,
            Formula::forall(
                &l1,
                Sort::Vertex,
                None,
                Formula::forall(&l2, Sort::Vertex, None, Formula::implies(two, Formula::eq(&l1, &l2))),
            ),
        );
        Formula::And(vec![some, unique])
    }

    /// Distinct `u`, `v` joined by a walk of `k` edges of `S` in which
    /// consecutive intermediate vertices may coincide.
    pub fn has_path(&mut self, k: usize, u: &str, v: &str, s: &str) -> Result<Formula> {
        if k == 0 {
            return Err(Error::InvalidParameter("haspath needs k >= 1".into()));
        }
        let ws: Vec<String> = (1..k).map(|_| self.fresh("w")).collect();
        let es: Vec<String> = (0..k).map(|_| self.fresh("p")).collect();
        let mut atoms = vec![Formula::not(Formula::eq(u, v))];
        for (i, e) in es.iter().enumerate() {
            let from = if i == 0 { u } else { &ws[i - 1] };
            let to = if i + 1 == k { v } else { &ws[i] };
            atoms.push(Formula::inc(e, from));
            atoms.push(Formula::inc(e, to));
        }
        let mut f = Formula::And(atoms);
        for e in es.iter().rev() {
            f = Formula::exists(e, Sort::Edge, Some(s), f);
        }
        for w in ws.iter().rev() {
            f = Formula::exists(w, Sort::Vertex, None, f);
        }
        Ok(f)
    }

    /// `u'` on `u`'s level and `v'` on `v`'s level share a non-horizontal edge.
    fn levels_adjacent(&mut self, u: &str, v: &str) -> Formula {
        let u1 = self.fresh("u");
        let v1 = self.fresh("v");
        let e = self.fresh("e");
        let body = Formula::And(vec![
            self.aligned_with(u, &u1),
            self.aligned_with(v, &v1),
            Formula::inc(&e, &u1),
            Formula::inc(&e, &v1),
            Formula::not(Formula::mem(&e, HORIZONTAL)),
        ]);
        Formula::exists(&u1, Sort::Vertex, None, Formula::exists(&v1, Sort::Vertex, None, Formula::exists(&e, Sort::Edge, None, body)))
    }

    /// `∃x,y: representative(u,x) ∧ representative(v,y) ∧ extra(x,y)`.
    fn reps_with(
        &mut self,
        u: &str,
        v: &str,
        s: &str,
        extra: impl FnOnce(&mut Self, &str, &str) -> Result<Vec<Formula>>,
    ) -> Result<Formula> {
        let x = self.fresh("x");
        let y = self.fresh("y");
        let mut parts = vec![self.representative(u, &x, s), self.representative(v, &y, s)];
        parts.extend(extra(self, &x, &y)?);
        Ok(Formula::exists(&x, Sort::Vertex, None, Formula::exists(&y, Sort::Vertex, None, Formula::And(parts))))
    }

    /// Levels are adjacent exactly when their representatives are within `k`.
    pub fn is_root(&mut self, k: usize, s: &str) -> Result<Formula> {
        let u = self.fresh("u");
        let v = self.fresh("v");
        let adjacent = self.levels_adjacent(&u, &v);
        let near = self.reps_with(&u, &v, s, |me, x, y| Ok(vec![me.has_path(k, x, y, s)?]))?;
        Ok(Formula::forall(&u, Sort::Vertex, None, Formula::forall(&v, Sort::Vertex, None, Formula::iff(adjacent, near))))
    }

    /// Labeled edges of range `[k1, k2]` have representatives at a distance
    /// inside the range.
    pub fn edge(&mut self, k1: usize, k2: usize, s: &str) -> Result<Formula> {
        if !(2 <= k1 && k1 <= k2) {
            return Err(Error::InvalidParameter(format!("edge range [{k1},{k2}] needs 2 <= k1 <= k2")));
        }
        let u = self.fresh("u");
        let v = self.fresh("v");
        let e = self.fresh("e");
        let set = range_set_name(k1, k2);
        let labeled =
            Formula::exists(&e, Sort::Edge, None, Formula::And(vec![Formula::inc(&e, &u), Formula::inc(&e, &v), Formula::mem(&e, &set)]));
        let within =
            self.reps_with(&u, &v, s, |me, x, y| Ok(vec![me.has_path(k2, x, y, s)?, Formula::not(me.has_path(k1 - 1, x, y, s)?)]))?;
        Ok(Formula::forall(&u, Sort::Vertex, None, Formula::forall(&v, Sort::Vertex, None, Formula::implies(labeled, within))))
    }

    /// Representatives within `cap` sit on adjacent levels.
    pub fn non_edge(&mut self, cap: usize, s: &str) -> Result<Formula> {
        let u = self.fresh("u");
        let v = self.fresh("v");
        let near = self.reps_with(&u, &v, s, |me, x, y| Ok(vec![me.has_path(cap, x, y, s)?]))?;
        let adjacent = self.levels_adjacent(&u, &v);
        Ok(Formula::forall(&u, Sort::Vertex, None, Formula::forall(&v, Sort::Vertex, None, Formula::implies(near, adjacent))))
    }
}

/// Signature of a predicate's parameters and of the free edge sets it uses.
fn predicate_signature(names: &[(&str, Sort)], extra: impl IntoIterator<Item = String>) -> Signature {
    let mut sig: Signature = names.iter().map(|&(n, s)| (n.to_string(), s)).collect();
    sig.insert(HORIZONTAL.to_string(), Sort::EdgeSet);
    for n in extra {
        sig.insert(n, Sort::EdgeSet);
    }
    sig
}

/// One predicate over default parameter names, with the signature of its
/// free variables.
pub fn emit_predicate(p: Predicate) -> Result<(Formula, Signature)> {
    use Sort::*;
    let mut em = Emitter::new();
    let sig_s = || predicate_signature(&[("S", EdgeSet)], []);
    Ok(match p {
        Predicate::Adjacent => (em.adjacent("a", "b", "S"), predicate_signature(&[("a", Vertex), ("b", Vertex), ("S", EdgeSet)], [])),
        Predicate::Leaf => (em.leaf("l", Some("X"), "S"), predicate_signature(&[("l", Vertex), ("X", VertexSet), ("S", EdgeSet)], [])),
        Predicate::Acyclic => (em.acyclic("S"), sig_s()),
        Predicate::AlignedWith => (em.aligned_with("p", "q"), predicate_signature(&[("p", Vertex), ("q", Vertex)], [])),
        Predicate::Representative => {
            (em.representative("v", "l", "S"), predicate_signature(&[("v", Vertex), ("l", Vertex), ("S", EdgeSet)], []))
        }
        Predicate::Represented => (em.represented("S"), sig_s()),
        Predicate::HasPath(k) => (em.has_path(k, "u", "v", "S")?, predicate_signature(&[("u", Vertex), ("v", Vertex), ("S", EdgeSet)], [])),
        Predicate::IsRoot(k) => {
            if k == 0 {
                return Err(Error::InvalidParameter("isroot needs k >= 1".into()));
            }
            (em.is_root(k, "S")?, sig_s())
        }
        Predicate::Edge(k1, k2) => (em.edge(k1, k2, "S")?, predicate_signature(&[("S", EdgeSet)], [range_set_name(k1, k2)])),
        Predicate::NonEdge(cap) => {
            if cap < 2 {
                return Err(Error::InvalidParameter("nonedge needs K >= 2".into()));
            }
            (em.non_edge(cap, "S")?, sig_s())
        }
    })
}

/// `∃S: acyclic(S) ∧ represented(S) ∧ isroot_k(S)`, free in `horizontal`.
pub fn emit_recognition_formula(k: usize) -> Result<Formula> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("recognition formula needs k >= 2, got {k}")));
    }
    let mut em = Emitter::new();
    let body = Formula::And(vec![em.acyclic("S"), em.represented("S"), em.is_root(k, "S")?]);
    Ok(Formula::exists("S", Sort::EdgeSet, None, body))
}

/// Pairs `2 <= k1 <= k2 <= cap` in emission order.
pub fn range_pairs(cap: usize) -> Vec<(usize, usize)> {
    (2..=cap).flat_map(|k1| (k1..=cap).map(move |k2| (k1, k2))).collect()
}

/// `∃S: acyclic ∧ represented ∧ edge_{2,2} ∧ … ∧ edge_{K,K} ∧ nonedge_K`.
pub fn emit_labeled_formula(cap: usize) -> Result<Formula> {
    if cap < 2 {
        return Err(Error::InvalidParameter(format!("labeled formula needs K >= 2, got {cap}")));
    }
    let mut em = Emitter::new();
    let mut parts = vec![em.acyclic("S"), em.represented("S")];
    for (k1, k2) in range_pairs(cap) {
        parts.push(em.edge(k1, k2, "S")?);
    }
    parts.push(em.non_edge(cap, "S")?);
    Ok(Formula::exists("S", Sort::EdgeSet, None, Formula::And(parts)))
}

pub fn recognition_signature() -> Signature {
    Signature::from([(HORIZONTAL.to_string(), Sort::EdgeSet)])
}

pub fn labeled_signature(cap: usize) -> Signature {
    let mut sig = recognition_signature();
    for (k1, k2) in range_pairs(cap) {
        sig.insert(range_set_name(k1, k2), Sort::EdgeSet);
    }
    sig
}

/// Counts `(vertex, edge)` existentials of every walk block: a maximal run
/// of existentials over a conjunction of `¬(u=v)` followed by incidences.
pub fn haspath_blocks(f: &Formula) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    find_blocks(f, &mut out);
    out
}

fn find_blocks(f: &Formula, out: &mut Vec<(usize, usize)>) {
    let (mut vs, mut es) = (0, 0);
    let mut cur = f;
    while let Formula::Quant { q: Quantifier::Exists, sort, body, .. } = cur {
        match sort {
            Sort::Vertex => vs += 1,
            Sort::Edge => es += 1,
            _ => break,
        }
        cur = body;
    }
    if let Formula::And(parts) = cur {
        let walk = matches!(parts.first(), Some(Formula::Not(inner)) if matches!(**inner, Formula::Eq(..)))
            && parts.len() > 1
            && parts[1..].iter().all(|p| matches!(p, Formula::Inc(..)));
        if walk && (vs, es) != (0, 0) {
            out.push((vs, es));
            return;
        }
    }
    for c in f.children() {
        find_blocks(c, out);
    }
}

/// Conjuncts of the top-level body under `∃S` that begin with a labeled
/// range test, one per `edge_{k1,k2}`.
pub fn edge_conjunct_count(f: &Formula) -> usize {
    let Formula::Quant { body, .. } = f else { return 0 };
    let Formula::And(parts) = &**body else { return 0 };
    parts.iter().filter(|p| mentions_range_set(p)).count()
}

fn mentions_range_set(f: &Formula) -> bool {
    match f {
        Formula::Mem(_, set) => set.starts_with("I_"),
        _ => f.children().into_iter().any(mentions_range_set),
    }
}
