use std::collections::{BTreeSet, HashMap};

use leafpower::dp::transitions::{edge_successors, forget, introduce, join};
use leafpower::dp::{recognize, recognize_labeled, Arc, Ctx, LocalPicture, INF};
use leafpower::graph::{connected_components, degeneracy_order, EdgeColor};
use leafpower::leafroot::{subdivide_leaf_edges, verify_labeled_leaf_root, verify_leaf_root};
use leafpower::reference::{brute_force_recognize, caterpillar_instance, is_chordal, random_leaf_power_instance, OracleVerdict};
use leafpower::{Graph, ProductGraph};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            let edges: Vec<(usize, usize)> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

/// (bag vertex, height) of every node of `p`.
fn node_labels(p: &LocalPicture) -> Vec<(usize, usize)> {
    p.vertices.iter().zip(&p.lens).flat_map(|(&v, &l)| (0..l as usize).map(move |h| (v, h))).collect()
}

/// Finite distances inside a component survive into `after`, and `mu`
/// never grows on surviving nodes.
fn rigid(before: &LocalPicture, after: &LocalPicture) -> Result<(), String> {
    let lb = node_labels(before);
    let la: HashMap<(usize, usize), usize> = node_labels(after).into_iter().enumerate().map(|(i, l)| (l, i)).collect();
    for (a, x) in lb.iter().enumerate() {
        let Some(&a2) = la.get(x) else { continue };
        if after.mu[a2] > before.mu[a] {
            return Err(format!("mu of {x:?} grew from {} to {}", before.mu[a], after.mu[a2]));
        }
        for (b, y) in lb.iter().enumerate() {
            let Some(&b2) = la.get(y) else { continue };
            if before.comp[a] == before.comp[b] && before.d(a, b) != INF && after.d(a2, b2) != before.d(a, b) {
                return Err(format!("distance {x:?}-{y:?} moved from {} to {}", before.d(a, b), after.d(a2, b2)));
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_layers(g in arb_graph(7), k in 3usize..7) {
        let p = ProductGraph::new(&g, k).unwrap();
        let n = g.vertex_count();
        let mut horizontal = Graph::new(n * k);
        let mut vertical = BTreeSet::new();
        for &(a, b, c) in p.edges() {
            match c {
                EdgeColor::Horizontal => horizontal.add_edge(a, b).unwrap(),
                EdgeColor::Vertical => { vertical.insert((a, b)); }
                EdgeColor::Diagonal => {}
            }
        }
        let comps = connected_components(&horizontal);
        prop_assert_eq!(comps.len(), n);
        for c in &comps {
            prop_assert_eq!(c.len(), k);
            prop_assert!(c.iter().all(|&x| horizontal.degree(x) == 2 && x / k == c[0] / k));
        }
        let expected: BTreeSet<(usize, usize)> = g.edges().flat_map(|(u, v)| (0..k).map(move |r| (u * k + r, v * k + r))).collect();
        prop_assert_eq!(vertical, expected);
    }

    #[test]
    fn degeneracy_of_induced_subgraphs(g in arb_graph(9), keep in proptest::collection::vec(any::<bool>(), 9)) {
        let (d, _) = degeneracy_order(&g);
        let vs: Vec<usize> = (0..g.vertex_count()).filter(|&v| keep[v]).collect();
        let (d2, _) = degeneracy_order(&g.induced_subgraph(&vs));
        prop_assert!(d2 <= d);
    }

    #[test]
    fn subdividing_leaf_edges_lifts_k_to_k_plus_two(seed in any::<u64>(), leaves in 2usize..9, k in 2usize..7) {
        let b = random_leaf_power_instance(leaves, k, seed, false).unwrap();
        prop_assert!(verify_leaf_root(&b.graph, &b.witness, k).ok);
        let lifted = subdivide_leaf_edges(&b.witness);
        prop_assert!(verify_leaf_root(&b.graph, &lifted, k + 2).ok);
    }

    #[test]
    fn generated_bundles_verify_and_are_accepted(seed in any::<u64>(), leaves in 1usize..8, k in 3usize..6, labeled in any::<bool>()) {
        let b = random_leaf_power_instance(leaves, k, seed, labeled).unwrap();
        prop_assert!(verify_leaf_root(&b.graph, &b.witness, k).ok);
        prop_assert!(recognize(&b.graph, k).unwrap().is_yes());
        if let Some(lg) = &b.labeled {
            prop_assert!(verify_labeled_leaf_root(lg, &b.witness, k).ok);
            let r = recognize_labeled(lg, k).unwrap();
            prop_assert!(verify_labeled_leaf_root(lg, r.witness.as_ref().unwrap(), k).ok);
        }
    }

    #[test]
    fn recognition_is_sound(g in arb_graph(7), k in 2usize..6) {
        let r = recognize(&g, k).unwrap();
        if let Some(t) = &r.witness {
            prop_assert!(verify_leaf_root(&g, t, k).ok);
        } else {
            prop_assert!(g.vertex_count() >= 3, "graphs on two vertices are always leaf powers");
        }
    }

    #[test]
    fn oracle_answers_imply_chordality_and_lift(g in arb_graph(6)) {
        if g.is_connected() {
            if let OracleVerdict::Yes(t) = brute_force_recognize(&g, 3, 18).unwrap() {
                prop_assert!(is_chordal(&g));
                prop_assert!(verify_leaf_root(&g, &subdivide_leaf_edges(&t), 5).ok);
            }
        }
    }

    #[test]
    fn transitions_keep_distances_rigid(g in arb_graph(6), k in 3usize..6, ops in proptest::collection::vec((0u8..4, any::<u16>()), 1..24)) {
        let ctx = Ctx::plain(&g, k);
        let n = g.vertex_count();
        let mut p = LocalPicture::single_chain(0, 1, Arc::CANONICAL);
        for (op, pick) in ops {
            let pick = pick as usize;
            let next = match op {
                0 => {
                    let absent: Vec<usize> = (0..n).filter(|&v| p.position(v).is_none()).collect();
                    if absent.is_empty() { continue }
                    introduce(&p, absent[pick % absent.len()], 1, Arc::CANONICAL)
                }
                1 | 2 => {
                    let edges: Vec<(usize, usize)> = g.edges().filter(|&(u, v)| p.position(u).is_some() && p.position(v).is_some()).collect();
                    if edges.is_empty() { continue }
                    let (u, v) = edges[pick % edges.len()];
                    let succ = edge_successors(&p, u, v, &ctx);
                    let (q, _) = succ[pick % succ.len()].clone();
                    if op == 2 {
                        // join with a sibling that took a different step
                        let (r, _) = succ[(pick / 7) % succ.len()].clone();
                        let j = join(&q, &r, &ctx);
                        if let Some(j) = &j {
                            rigid(&q, j).map_err(TestCaseError::fail)?;
                            rigid(&r, j).map_err(TestCaseError::fail)?;
                        }
                        j
                    } else {
                        Some(q)
                    }
                }
                _ => {
                    if p.vertices.len() < 2 { continue }
                    forget(&p, p.vertices[pick % p.vertices.len()], &ctx)
                }
            };
            if let Some(q) = next {
                rigid(&p, &q).map_err(TestCaseError::fail)?;
                p = q;
            }
        }
    }
}

#[test]
fn picture_ceiling_does_not_grow_with_n() {
    let maxes: Vec<usize> =
        [30, 60, 120].iter().map(|&n| recognize(&caterpillar_instance(n, 4, 0).unwrap().graph, 4).unwrap().stats.max_pictures()).collect();
    assert!(maxes.iter().all(|&m| m == maxes[0]), "{maxes:?}");
}
