//! Brute-force evaluation on tiny structures, the walk-extension rewrite and
//! the subset-search micro-oracle.

use std::collections::BTreeMap;

use super::ast::{Formula, Quantifier, Sort};
use super::emit::{range_set_name, HORIZONTAL};
use crate::error::{Error, Result};
use crate::graph::{EdgeColor, Graph, LabeledGraph, ProductGraph};
use crate::leafroot::{check_labeled_product_subtree, check_product_subtree};

/// Largest vertex or edge count a set quantifier may range over.
pub const SET_QUANTIFIER_LIMIT: usize = 20;

/// Largest product the micro-oracle searches.
pub const MICRO_ORACLE_EDGE_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Value {
    Vertex(usize),
    Edge(usize),
    VertexSet(u64),
    EdgeSet(u64),
}

/// Finite graph with named edge or vertex sets for the free variables.
#[derive(Clone, Debug)]
pub struct Structure {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub assignment: BTreeMap<String, Value>,
}

impl Structure {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count > 64 || edges.len() > 64 {
            return Err(Error::SizeLimit { what: "evaluation structure", limit: 64, got: vertex_count.max(edges.len()) });
        }
        Ok(Structure { vertex_count, edges, assignment: BTreeMap::new() })
    }

    /// A product with `horizontal` and, when labeled, every `I_{k1,k2}`
    /// for `2 <= k1 <= k2 <= cap` assigned.
    pub fn of_product(p: &ProductGraph, cap: Option<usize>) -> Result<Self> {
        let mut s = Structure::new(p.vertex_count(), p.edges().iter().map(|&(a, b, _)| (a, b)).collect())?;
        let mask = |pred: &dyn Fn(usize) -> bool| (0..p.edges().len()).filter(|&i| pred(i)).fold(0u64, |m, i| m | 1 << i);
        s.assignment.insert(HORIZONTAL.into(), Value::EdgeSet(mask(&|i| p.edges()[i].2 == EdgeColor::Horizontal)));
        if let Some(cap) = cap {
            for k1 in 2..=cap {
                for k2 in k1..=cap {
                    let m = mask(&|i| {
                        let (a, b, c) = p.edges()[i];
                        c != EdgeColor::Horizontal && p.inherited_range(a, b) == Some((k1, k2))
                    });
                    s.assignment.insert(range_set_name(k1, k2), Value::EdgeSet(m));
                }
            }
        }
        Ok(s)
    }

    pub fn edge_set(&self, ids: &[usize]) -> Value {
        Value::EdgeSet(ids.iter().fold(0, |m, &i| m | 1 << i))
    }
}

/// Evaluates `f` by exhaustive expansion of every quantifier.
pub fn evaluate(f: &Formula, st: &Structure) -> Result<bool> {
    let mut env: Vec<(String, Value)> = st.assignment.iter().map(|(n, &v)| (n.clone(), v)).collect();
    eval(f, st, &mut env)
}

fn get(env: &[(String, Value)], name: &str) -> Result<Value> {
    env.iter().rev().find(|(n, _)| n == name).map(|&(_, v)| v).ok_or_else(|| Error::InvalidInput(format!("unbound variable {name}")))
}

fn eval(f: &Formula, st: &Structure, env: &mut Vec<(String, Value)>) -> Result<bool> {
    let sort_err = |what: &str| Err(Error::InvalidInput(format!("ill-sorted {what}")));
    Ok(match f {
        Formula::True => true,
        Formula::And(fs) => {
            for c in fs {
                if !eval(c, st, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(fs) => {
            for c in fs {
                if eval(c, st, env)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Not(a) => !eval(a, st, env)?,
        Formula::Implies(a, b) => !eval(a, st, env)? || eval(b, st, env)?,
        Formula::Iff(a, b) => eval(a, st, env)? == eval(b, st, env)?,
        Formula::Eq(a, b) => get(env, a)? == get(env, b)?,
        Formula::Inc(e, v) => match (get(env, e)?, get(env, v)?) {
            (Value::Edge(i), Value::Vertex(x)) => st.edges[i].0 == x || st.edges[i].1 == x,
            _ => return sort_err("incidence"),
        },
        Formula::Mem(x, s) => match (get(env, x)?, get(env, s)?) {
            (Value::Vertex(i), Value::VertexSet(m)) | (Value::Edge(i), Value::EdgeSet(m)) => m >> i & 1 == 1,
            _ => return sort_err("membership"),
        },
        Formula::Quant { q, var, sort, within, body } => {
            let bound = match within {
                Some(s) => Some(get(env, s)?),
                None => None,
            };
            let values: Box<dyn Iterator<Item = Value>> = match sort {
                Sort::Vertex => Box::new((0..st.vertex_count).map(Value::Vertex).filter(move |v| in_bound(*v, bound))),
                Sort::Edge => Box::new((0..st.edges.len()).map(Value::Edge).filter(move |v| in_bound(*v, bound))),
                Sort::VertexSet | Sort::EdgeSet => {
                    let n = if *sort == Sort::VertexSet { st.vertex_count } else { st.edges.len() };
                    if n > SET_QUANTIFIER_LIMIT {
                        return Err(Error::SizeLimit { what: "set quantifier domain", limit: SET_QUANTIFIER_LIMIT, got: n });
                    }
                    let make = if *sort == Sort::VertexSet { Value::VertexSet } else { Value::EdgeSet };
                    Box::new((0..1u64 << n).map(make))
                }
            };
            let want = *q == Quantifier::Exists;
            for val in values {
                env.push((var.clone(), val));
                let r = eval(body, st, env);
                env.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

fn in_bound(v: Value, bound: Option<Value>) -> bool {
    match (v, bound) {
        (_, None) => true,
        (Value::Vertex(i), Some(Value::VertexSet(m))) | (Value::Edge(i), Some(Value::EdgeSet(m))) => m >> i & 1 == 1,
        _ => false,
    }
}

/// A walk witness for `haspath_k(u, v, S)`: `k - 1` intermediate vertices
/// and `k` edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Turns a `haspath_k` witness into a `haspath_{k+1}` witness by taking
/// `v` as the new last intermediate vertex and repeating the last edge.
pub fn extend_walk(w: &Walk, v: usize) -> Walk {
    let mut out = w.clone();
    out.vertices.push(v);
    if let Some(&last) = w.edges.last() {
        out.edges.push(last);
    }
    out
}

/// Whether `w` witnesses `haspath_k(u, v, S)` for `S` given by `in_s`.
pub fn is_walk(edges: &[(usize, usize)], in_s: &dyn Fn(usize) -> bool, u: usize, v: usize, w: &Walk) -> bool {
    let k = w.edges.len();
    if u == v || k == 0 || w.vertices.len() + 1 != k {
        return false;
    }
    let inc = |e: usize, x: usize| edges[e].0 == x || edges[e].1 == x;
    (0..k).all(|i| {
        let e = w.edges[i];
        let from = if i == 0 { u } else { w.vertices[i - 1] };
        let to = if i + 1 == k { v } else { w.vertices[i] };
        in_s(e) && inc(e, from) && inc(e, to)
    })
}

/// Exhaustive search for a `haspath_k` witness; intermediate vertices range
/// over endpoints of the chosen edges, which loses no witness.
pub fn find_walk(edges: &[(usize, usize)], in_s: &dyn Fn(usize) -> bool, u: usize, v: usize, k: usize) -> Option<Walk> {
    fn go(edges: &[(usize, usize)], in_s: &dyn Fn(usize) -> bool, cur: usize, v: usize, left: usize, w: &mut Walk) -> bool {
        for (e, &(a, b)) in edges.iter().enumerate() {
            if !in_s(e) || (a != cur && b != cur) {
                continue;
            }
            w.edges.push(e);
            if left == 1 {
                if a == v || b == v {
                    return true;
                }
            } else {
                for x in [a, b] {
                    w.vertices.push(x);
                    if go(edges, in_s, x, v, left - 1, w) {
                        return true;
                    }
                    w.vertices.pop();
                }
            }
            w.edges.pop();
        }
        false
    }
    if u == v || k == 0 {
        return None;
    }
    let mut w = Walk { vertices: vec![], edges: vec![] };
    go(edges, in_s, u, v, k, &mut w).then_some(w)
}

/// Enumerates every acyclic edge subset of `p` and asks `accept` about it.
fn exists_forest(p: &ProductGraph, accept: &dyn Fn(&[(usize, usize)]) -> bool) -> bool {
    fn find(parent: &[usize], mut x: usize) -> usize {
        while parent[x] != x {
            x = parent[x];
        }
        x
    }
    fn go(
        edges: &[(usize, usize)],
        i: usize,
        parent: &mut Vec<usize>,
        chosen: &mut Vec<(usize, usize)>,
        accept: &dyn Fn(&[(usize, usize)]) -> bool,
    ) -> bool {
        if i == edges.len() {
            return accept(chosen);
        }
        if go(edges, i + 1, parent, chosen, accept) {
            return true;
        }
        let (a, b) = edges[i];
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
        chosen.push((a, b));
        let found = go(edges, i + 1, parent, chosen, accept);
        chosen.pop();
        parent[ra] = ra;
        found
    }
    let edges: Vec<(usize, usize)> = p.edges().iter().map(|&(a, b, _)| (a, b)).collect();
    let mut parent: Vec<usize> = (0..p.vertex_count()).collect();
    go(&edges, 0, &mut parent, &mut Vec::new(), accept)
}

fn micro_guard(p: &ProductGraph) -> Result<()> {
    let m = p.edges().len();
    if m > MICRO_ORACLE_EDGE_LIMIT {
        return Err(Error::SizeLimit { what: "micro-oracle product edges", limit: MICRO_ORACLE_EDGE_LIMIT, got: m });
    }
    Ok(())
}

/// Decides `∃S` of the recognition formula over `G ⊠ C_k` by searching
/// every edge subset, with leaves read as degree-one vertices of `S`.
pub fn micro_oracle(g: &Graph, k: usize) -> Result<bool> {
    let p = ProductGraph::new(g, k)?;
    micro_guard(&p)?;
    Ok(subset_search(&p, k, false))
}

/// Labeled counterpart over `G ⊠ C_K`.
pub fn micro_oracle_labeled(lg: &LabeledGraph) -> Result<bool> {
    let cap = lg.cap();
    let p = ProductGraph::labeled(lg, cap)?;
    micro_guard(&p)?;
    Ok(subset_search(&p, cap, true))
}

/// The subset search behind the micro-oracle, without the size guard.
pub(crate) fn subset_search(p: &ProductGraph, k: usize, labeled: bool) -> bool {
    exists_forest(p, &|s| if labeled { check_labeled_product_subtree(p, s, k).ok } else { check_product_subtree(p, s, k).ok })
}

#[cfg(test)]
mod tests {
    use super::super::emit::{emit_predicate, emit_recognition_formula, Emitter, Predicate};
    use super::*;
    use crate::leafroot::has_path_within;
    use proptest::prelude::*;

    #[test]
    fn walk_extension_preserves_witnesses() {
        let edges = vec![(0, 1), (1, 2), (2, 3)];
        let all = |_: usize| true;
        let w = find_walk(&edges, &all, 0, 3, 3).unwrap();
        let mut cur = w;
        for k in 4..8 {
            cur = extend_walk(&cur, 3);
            assert!(is_walk(&edges, &all, 0, 3, &cur), "k={k}");
        }
        assert!(find_walk(&edges, &all, 0, 3, 2).is_none());
        assert!(find_walk(&edges, &all, 0, 0, 2).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn distance_checker_matches_walk_search(
            raw in proptest::collection::vec((0usize..7, 0usize..7), 1..=12),
            k in 1usize..=5,
        ) {
            let edges: Vec<(usize, usize)> = raw.into_iter().filter(|(a, b)| a != b).collect();
            let all = |_: usize| true;
            for u in 0..7 {
                for v in 0..7 {
                    let w = find_walk(&edges, &all, u, v, k);
                    prop_assert_eq!(w.is_some(), has_path_within(&edges, u, v, k));
                    if let Some(w) = w {
                        prop_assert!(is_walk(&edges, &all, u, v, &extend_walk(&w, v)));
                    }
                }
            }
        }

        #[test]
        fn formula_evaluation_matches_distance_checker(
            raw in proptest::collection::vec((0usize..5, 0usize..5), 1..=6),
            k in 1usize..=3,
        ) {
            let edges: Vec<(usize, usize)> = raw.into_iter().filter(|(a, b)| a != b).collect();
            let (f, _) = emit_predicate(Predicate::HasPath(k)).unwrap();
            let mut st = Structure::new(5, edges.clone()).unwrap();
            st.assignment.insert("S".into(), st.edge_set(&(0..edges.len()).collect::<Vec<_>>()));
            for u in 0..5 {
                for v in 0..5 {
                    st.assignment.insert("u".into(), Value::Vertex(u));
                    st.assignment.insert("v".into(), Value::Vertex(v));
                    prop_assert_eq!(evaluate(&f, &st).unwrap(), has_path_within(&edges, u, v, k));
                }
            }
        }
    }

    #[test]
    fn acyclic_and_alignment_evaluate_as_intended() {
        let p = ProductGraph::new(&Graph::path(2), 3).unwrap();
        let mut st = Structure::of_product(&p, None).unwrap();
        let mut em = Emitter::new();
        let acyclic = em.acyclic("S");
        let idx = |a, b| p.edges().iter().position(|&(x, y, _)| (x, y) == (a, b)).unwrap();
        st.assignment.insert("S".into(), st.edge_set(&[idx(0, 1), idx(1, 2), idx(0, 2)]));
        assert!(!evaluate(&acyclic, &st).unwrap());
        st.assignment.insert("S".into(), st.edge_set(&[idx(0, 1), idx(1, 2), idx(2, 3)]));
        assert!(evaluate(&acyclic, &st).unwrap());
        let aligned = em.aligned_with("p", "q");
        for (a, b, same) in [(0, 2, true), (0, 3, false), (4, 5, true)] {
            st.assignment.insert("p".into(), Value::Vertex(a));
            st.assignment.insert("q".into(), Value::Vertex(b));
            assert_eq!(evaluate(&aligned, &st).unwrap(), same);
        }
    }

    #[test]
    fn set_quantifiers_refuse_large_domains() {
        let p = ProductGraph::new(&Graph::path(2), 3).unwrap();
        let st = Structure::of_product(&p, None).unwrap();
        // the closed formula quantifies over 15 product edges: allowed but
        // far too slow to run here, so only the guard is exercised
        let big = Structure::new(30, vec![]).unwrap();
        let f = emit_recognition_formula(3).unwrap();
        assert!(matches!(evaluate(&f, &big), Err(Error::SizeLimit { .. })));
        assert_eq!(st.vertex_count, 6);
    }

    #[test]
    fn micro_oracle_examples() {
        assert!(micro_oracle(&Graph::path(2), 3).unwrap());
        assert!(micro_oracle(&Graph::path(2), 4).unwrap());
        // a single vertex yields no edge subset with exactly one leaf per level
        assert!(!micro_oracle(&Graph::new(1), 3).unwrap());
        assert!(matches!(micro_oracle(&Graph::path(3), 3), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn subset_search_agrees_with_recognition_beyond_the_guard() {
        let p = ProductGraph::new(&Graph::path(3), 3).unwrap();
        assert!(subset_search(&p, 3, false));
        let lg = LabeledGraph::from_unlabeled(&Graph::path(2), 3).unwrap();
        assert!(micro_oracle_labeled(&lg).unwrap());
    }
}
