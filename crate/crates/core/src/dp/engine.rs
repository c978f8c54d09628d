//! Bottom-up table computation over an extra-nice decomposition and
//! top-down witness reconstruction from provenance records.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use indexmap::IndexMap;

use super::picture::{Arc, Ctx, LocalPicture};
use super::transitions::{edge_successors, forget, introduce, join};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::treedecomp::{ExtraNiceDecomposition, NiceDecomposition, NiceNode, NodeKind};

/// Resource caps; exceeding one aborts with [`Error::ResourceCap`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_pictures_per_bag: Option<usize>,
    pub time_limit: Option<Duration>,
}

/// One line of the per-bag trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagTrace {
    pub kind: NodeKind,
    pub bag_size: usize,
    pub pictures: usize,
    pub elapsed: Duration,
}

/// How a stored picture was produced; child indices point into the child
/// node's table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Leaf,
    Introduce {
        child: u32,
    },
    Forget {
        child: u32,
        len: u8,
    },
    Copy {
        child: u32,
    },
    /// Tree edge between chain nodes given as `(base vertex, height)`.
    Connect {
        child: u32,
        x: (usize, u8),
        w: (usize, u8),
    },
    Join {
        left: u32,
        right: u32,
    },
}

pub type Table = IndexMap<LocalPicture, Provenance>;

/// Tree assembled from provenance, before pruning: nodes `0..node_count`,
/// with representative leaves labeled by base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTree {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<Option<usize>>,
}

pub struct Run {
    pub accepted: bool,
    pub raw: Option<RawTree>,
    pub traces: Vec<BagTrace>,
}

/// Some surviving root picture closes the whole tree.
pub fn root_decision(root_pictures: &[LocalPicture]) -> bool {
    root_pictures.iter().any(|p| p.closed)
}

fn check_limits(limits: &Limits, started: Instant, count: usize, traces: &[BagTrace]) -> Result<()> {
    let summary = || {
        let max = traces.iter().map(|t| t.pictures).max().unwrap_or(0).max(count);
        format!("after {} bags, max pictures per bag {max}, elapsed {:?}", traces.len(), started.elapsed())
    };
    if let Some(cap) = limits.max_pictures_per_bag {
        if count > cap {
            return Err(Error::ResourceCap(format!("picture cap {cap} exceeded ({count}); {}", summary())));
        }
    }
    if let Some(t) = limits.time_limit {
        if started.elapsed() > t {
            return Err(Error::ResourceCap(format!("time limit {t:?} exceeded; {}", summary())));
        }
    }
    Ok(())
}

fn insert(table: &mut Table, p: LocalPicture, prov: Provenance) {
    table.entry(p).or_insert(prov);
}

/// Adds, below every forget node, one connection step for each graph edge
/// inside its child bag that is not already associated there. A forget
/// needs every neighbour of the forgotten vertex joined to it, and the
/// joining path may use chains of other bag vertices whose own edge nodes
/// sit higher up.
pub fn connection_schedule(ext: &ExtraNiceDecomposition, g: &Graph) -> NiceDecomposition {
    let src = &ext.nice.nodes;
    let mut nodes: Vec<NiceNode> = Vec::with_capacity(src.len() * 2);
    let mut new_id = vec![0; src.len()];
    let push = |nodes: &mut Vec<NiceNode>, bag: Vec<usize>, kind, children| {
        nodes.push(NiceNode { bag, kind, children });
        nodes.len() - 1
    };
    for (i, x) in src.iter().enumerate() {
        if let NodeKind::EdgeAssociated(..) = x.kind {
            continue; // rebuilt at the forget node above it
        }
        let mut children: Vec<usize> = x.children.iter().map(|&c| new_id[c]).collect();
        if let NodeKind::Forget(v) = x.kind {
            // descend past the associated edge nodes to the bag's own child
            let mut chain = Vec::new();
            let mut below = x.children[0];
            while let NodeKind::EdgeAssociated(..) = src[below].kind {
                chain.push(below);
                below = src[below].children[0];
            }
            let bag = src[below].bag.clone();
            let mut cur = new_id[below];
            for (ai, &a) in bag.iter().enumerate() {
                for &b in &bag[ai + 1..] {
                    if a != v && b != v && g.has_edge(a, b) {
                        cur = push(&mut nodes, bag.clone(), NodeKind::EdgeAssociated(a, b), vec![cur]);
                    }
                }
            }
            for &e in chain.iter().rev() {
                cur = push(&mut nodes, bag.clone(), src[e].kind, vec![cur]);
            }
            children[0] = cur;
        }
        new_id[i] = push(&mut nodes, x.bag.clone(), x.kind, children);
    }
    NiceDecomposition { root: new_id[ext.nice.root], nodes }
}

/// Runs the table computation; `started` is shared across components so the
/// time limit covers the whole recognition.
pub fn run(nice: &NiceDecomposition, ctx: &Ctx, limits: &Limits, started: Instant) -> Result<Run> {
    let nodes = &nice.nodes;
    let mut live: Vec<Option<Table>> = vec![None; nodes.len()];
    let mut provs: Vec<Vec<Provenance>> = vec![Vec::new(); nodes.len()];
    let mut traces = Vec::with_capacity(nodes.len());

    for (id, node) in nodes.iter().enumerate() {
        let t0 = Instant::now();
        let mut table = Table::default();
        let child = |i: usize| live[node.children[i]].as_ref().expect("children precede parents");
        match node.kind {
            NodeKind::Leaf => {
                if let [v] = node.bag[..] {
                    insert(&mut table, LocalPicture::single_chain(v, 1, Arc::CANONICAL), Provenance::Leaf);
                } else {
                    let empty = LocalPicture {
                        vertices: vec![],
                        lens: vec![],
                        fixed: vec![],
                        arcs: vec![],
                        comp: vec![],
                        link: vec![],
                        dist: vec![],
                        mu: vec![],
                        closed: false,
                    };
                    insert(&mut table, empty, Provenance::Leaf);
                }
            }
            NodeKind::Introduce(v) => {
                for (i, p) in child(0).keys().enumerate() {
                    if let Some(q) = introduce(p, v, 1, Arc::CANONICAL) {
                        insert(&mut table, q, Provenance::Introduce { child: i as u32 });
                    }
                }
            }
            NodeKind::Forget(v) => {
                for (i, p) in child(0).keys().enumerate() {
                    let len = p.position(v).map(|j| p.lens[j]).unwrap_or(0);
                    if let Some(q) = forget(p, v, ctx) {
                        insert(&mut table, q, Provenance::Forget { child: i as u32, len });
                    }
                }
            }
            NodeKind::EdgeAssociated(u, v) => {
                for (i, p) in child(0).keys().enumerate() {
                    for (q, hang) in edge_successors(p, u, v, ctx) {
                        let prov = match hang {
                            None => Provenance::Copy { child: i as u32 },
                            Some((a, b, h)) => {
                                let x = (q.vertices[a], q.lens[a] - 1);
                                let w = (q.vertices[b], h as u8);
                                Provenance::Connect { child: i as u32, x, w }
                            }
                        };
                        insert(&mut table, q, prov);
                    }
                }
            }
            NodeKind::Join => {
                let (left, right) = (child(0), child(1));
                // right pictures grouped by chain shape; a shape pairs with a
                // left picture when no final chain is shorter than its partner
                let mut groups: IndexMap<(&[u8], &[bool]), Vec<usize>> = IndexMap::new();
                for (j, r) in right.keys().enumerate() {
                    if !r.closed {
                        groups.entry((&r.lens[..], &r.fixed[..])).or_default().push(j);
                    }
                }
                for (i, l) in left.keys().enumerate() {
                    let fits = |(lens, fixed): &(&[u8], &[bool])| {
                        (0..lens.len()).all(|c| (!fixed[c] || lens[c] >= l.lens[c]) && (!l.fixed[c] || l.lens[c] >= lens[c]))
                    };
                    for &j in groups.iter().filter(|(key, _)| fits(key)).flat_map(|(_, js)| js) {
                        let r = right.get_index(j).expect("index from enumeration").0;
                        if let Some(q) = join(l, r, ctx) {
                            insert(&mut table, q, Provenance::Join { left: i as u32, right: j as u32 });
                        }
                    }
                    if i % 256 == 0 {
                        check_limits(limits, started, table.len(), &traces)?;
                    }
                }
            }
        }
        check_limits(limits, started, table.len(), &traces)?;
        traces.push(BagTrace { kind: node.kind, bag_size: node.bag.len(), pictures: table.len(), elapsed: t0.elapsed() });
        for &c in &node.children {
            if let Some(t) = live[c].take() {
                provs[c] = t.into_values().collect();
            }
        }
        live[id] = Some(table);
    }

    let root = nice.root;
    let root_table = live[root].take().unwrap_or_default();
    let accepting = root_table.keys().position(|p| p.closed);
    provs[root] = root_table.into_values().collect();
    let Some(start) = accepting else {
        return Ok(Run { accepted: false, raw: None, traces });
    };
    let raw = reconstruct(nice, &provs, start)?;
    Ok(Run { accepted: true, raw: Some(raw), traces })
}

/// Walks provenance from the accepting root picture, creating every chain at
/// its forget node and every cross edge at its edge node.
pub fn reconstruct(nice: &NiceDecomposition, provs: &[Vec<Provenance>], start: usize) -> Result<RawTree> {
    let nodes = &nice.nodes;
    let corrupt = |what: &str| Error::Internal(format!("corrupted provenance: {what}"));
    let mut ids: HashMap<(usize, u8), usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(nice.root, start)];
    while let Some((node, idx)) = stack.pop() {
        let prov = *provs.get(node).and_then(|p| p.get(idx)).ok_or_else(|| corrupt("dangling index"))?;
        let kids = &nodes[node].children;
        match (nodes[node].kind, prov) {
            (NodeKind::Leaf, Provenance::Leaf) => {}
            (NodeKind::Introduce(_), Provenance::Introduce { child }) | (NodeKind::EdgeAssociated(..), Provenance::Copy { child }) => {
                stack.push((kids[0], child as usize));
            }
            (NodeKind::Forget(v), Provenance::Forget { child, len }) => {
                for h in 0..len {
                    let id = labels.len();
                    labels.push((h == 0).then_some(v));
                    if h > 0 {
                        edges.push((id - 1, id));
                    }
                    if ids.insert((v, h), id).is_some() {
                        return Err(corrupt("vertex forgotten twice"));
                    }
                }
                stack.push((kids[0], child as usize));
            }
            (NodeKind::EdgeAssociated(..), Provenance::Connect { child, x, w }) => {
                let a = *ids.get(&x).ok_or_else(|| corrupt("unknown chain node"))?;
                let b = *ids.get(&w).ok_or_else(|| corrupt("unknown chain node"))?;
                // an edge between present chains may be built in both join branches
                if seen.insert((a.min(b), a.max(b))) {
                    edges.push((a, b));
                }
                stack.push((kids[0], child as usize));
            }
            (NodeKind::Join, Provenance::Join { left, right }) => {
                stack.push((kids[0], left as usize));
                stack.push((kids[1], right as usize));
            }
            _ => return Err(corrupt("record does not match node kind")),
        }
    }
    Ok(RawTree { node_count: labels.len(), edges, labels })
}
