//! Closed-form recognizers for small k and induced-subgraph search.

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};

/// Triangle 0-1-2 with pendants 3 (at 0) and 4 (at 1).
pub fn bull() -> Graph {
    Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)]).unwrap()
}

/// `K_4` minus edge 2-3, with pendant 4 attached to the degree-3 vertex 0.
pub fn dart() -> Graph {
    Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (0, 4)]).unwrap()
}

/// Path 0-1-2-3 with vertex 4 adjacent to all of it.
pub fn gem() -> Graph {
    Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]).unwrap()
}

/// Every connected component is a clique.
pub fn recognize_k2(g: &Graph) -> bool {
    connected_components(g).iter().all(|c| c.iter().all(|&v| g.degree(v) + 1 == c.len()))
}

/// Chordal and free of induced bull, dart and gem.
pub fn recognize_k3(g: &Graph) -> bool {
    is_chordal(g) && [bull(), dart(), gem()].iter().all(|p| !contains_induced(g, p).expect("patterns have five vertices"))
}

/// Lexicographic breadth-first order (partition refinement); the returned
/// order is the visiting order.
pub fn lex_bfs(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    // ordered list of classes; each class is a list of unvisited vertices
    let mut classes: Vec<Vec<usize>> = if n > 0 { vec![(0..n).collect()] } else { vec![] };
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(first) = classes.first_mut() {
        let v = first.remove(0);
        if first.is_empty() {
            classes.remove(0);
        }
        visited[v] = true;
        order.push(v);
        let mut next = Vec::with_capacity(classes.len() * 2);
        for class in classes {
            let (hit, miss): (Vec<usize>, Vec<usize>) = class.into_iter().partition(|&w| g.has_edge(v, w));
            if !hit.is_empty() {
                next.push(hit);
            }
            if !miss.is_empty() {
                next.push(miss);
            }
        }
        classes = next;
    }
    order
}

/// Reverse LexBFS order is a perfect elimination order exactly for chordal
/// graphs.
pub fn is_chordal(g: &Graph) -> bool {
    let order = lex_bfs(g);
    let n = g.vertex_count();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // eliminating in reverse visiting order: earlier neighbours must form a
    // clique; it suffices that they are adjacent to the latest of them
    for &v in &order {
        let earlier: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| pos[w] < pos[v]).collect();
        if let Some(&p) = earlier.iter().max_by_key(|&&w| pos[w]) {
            if earlier.iter().any(|&w| w != p && !g.has_edge(w, p)) {
                return false;
            }
        }
    }
    true
}

/// Largest pattern accepted by [`contains_induced`].
pub const PATTERN_LIMIT: usize = 6;

/// Backtracking search for an induced copy of `pattern` in `g`.
pub fn contains_induced(g: &Graph, pattern: &Graph) -> Result<bool> {
    let p = pattern.vertex_count();
    if p > PATTERN_LIMIT {
        return Err(Error::SizeLimit { what: "induced pattern", limit: PATTERN_LIMIT, got: p });
    }
    if p > g.vertex_count() {
        return Ok(false);
    }
    let mut image = Vec::with_capacity(p);
    let mut used = vec![false; g.vertex_count()];
    Ok(extend(g, pattern, &mut image, &mut used))
}

fn extend(g: &Graph, pat: &Graph, image: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let i = image.len();
    if i == pat.vertex_count() {
        return true;
    }
    for x in 0..g.vertex_count() {
        if used[x] || g.degree(x) < pat.degree(i) {
            continue;
        }
        let consistent = (0..i).all(|j| pat.has_edge(i, j) == g.has_edge(x, image[j]));
        if consistent {
            used[x] = true;
            image.push(x);
            if extend(g, pat, image, used) {
                return true;
            }
            image.pop();
            used[x] = false;
        }
    }
    false
}
