//! Dynamic program over a tree decomposition deciding `k`-leaf powers.
//!
//! Each connected component with at least three vertices runs the table
//! computation of [`engine`] over an extra-nice decomposition. Smaller
//! components and `k = 2` use closed forms. Component witnesses are joined
//! below a fresh super-root by paths of length `k`, so leaves of different
//! components end up more than `k` apart.

pub mod engine;
pub mod picture;
pub mod transitions;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

pub use engine::{root_decision, BagTrace, Limits, Provenance, RawTree};
pub use picture::{canonical_key, Arc, Ctx, LocalPicture, INF};
pub use transitions::{edge_transition, forget_transition, introduce_transition, join_transition, leaf_bag_pictures};

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph, LabeledGraph};
use crate::leafroot::{strip_unmapped, verify_labeled_leaf_root, verify_leaf_root, LeafRootTree};
use crate::reference::recognize_k2;
use crate::treedecomp::{decompose, make_extra_nice, make_nice, Strategy};

/// Run configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub limits: Limits,
    pub strategy: Strategy,
    /// Worker threads for independent components.
    pub threads: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { limits: Limits::default(), strategy: Strategy::MinFill, threads: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Largest decomposition width over the components that ran the DP.
    pub width: usize,
    pub k: usize,
    /// Picture count per bag, components concatenated.
    pub pictures_per_bag: Vec<usize>,
    pub traces: Vec<BagTrace>,
    pub elapsed: Duration,
}

impl Stats {
    pub fn max_pictures(&self) -> usize {
        self.pictures_per_bag.iter().copied().max().unwrap_or(0)
    }

    /// Tab-separated trace: bag kind, bag size, picture count, elapsed
    /// microseconds.
    pub fn trace_tsv(&self) -> String {
        let mut s = String::from("kind\tbag_size\tpictures\tmicros\n");
        for t in &self.traces {
            let kind = match t.kind {
                crate::treedecomp::NodeKind::Leaf => "leaf",
                crate::treedecomp::NodeKind::Introduce(_) => "introduce",
                crate::treedecomp::NodeKind::Forget(_) => "forget",
                crate::treedecomp::NodeKind::Join => "join",
                crate::treedecomp::NodeKind::EdgeAssociated(..) => "edge",
            };
            s.push_str(&format!("{kind}\t{}\t{}\t{}\n", t.bag_size, t.pictures, t.elapsed.as_micros()));
        }
        s
    }
}

/// Outcome for one connected component; vertex ids are those of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentResult {
    pub vertices: Vec<usize>,
    pub witness: Option<LeafRootTree>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognitionResult {
    /// Leaf root of the whole graph when it is a leaf power.
    pub witness: Option<LeafRootTree>,
    pub components: Vec<ComponentResult>,
    pub stats: Stats,
}

impl RecognitionResult {
    pub fn is_yes(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn recognize(g: &Graph, k: usize) -> Result<RecognitionResult> {
    recognize_with(g, k, &Options::default())
}

pub fn recognize_with(g: &Graph, k: usize, opts: &Options) -> Result<RecognitionResult> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let result = if k == 2 { k2_result(g, |_, _| true) } else { run_components(g, Instance::Plain(g), k, opts)? };
    if let Some(t) = &result.witness {
        let v = verify_leaf_root(g, t, k);
        if !v.ok {
            return Err(Error::Internal(format!("assembled witness fails verification: {:?}", v.violations)));
        }
    }
    Ok(result)
}

pub fn recognize_labeled(g: &LabeledGraph, cap: usize) -> Result<RecognitionResult> {
    recognize_labeled_with(g, cap, &Options::default())
}

pub fn recognize_labeled_with(g: &LabeledGraph, cap: usize, opts: &Options) -> Result<RecognitionResult> {
    if cap < 2 {
        return Err(Error::InvalidParameter(format!("K = {cap} must be at least 2")));
    }
    if let Some((e, r)) = g.ranges().iter().find(|(_, r)| r.1 > cap) {
        return Err(Error::InvalidParameter(format!("range [{},{}] of edge {e:?} exceeds K = {cap}", r.0, r.1)));
    }
    let result = if cap == 2 {
        k2_result(g.graph(), |u, v| g.range(u, v).is_some_and(|(lo, hi)| lo <= 2 && 2 <= hi))
    } else {
        run_components(g.graph(), Instance::Labeled(g), cap, opts)?
    };
    if let Some(t) = &result.witness {
        let v = verify_labeled_leaf_root(g, t, cap);
        if !v.ok {
            return Err(Error::Internal(format!("assembled witness fails verification: {:?}", v.violations)));
        }
    }
    Ok(result)
}

#[derive(Clone, Copy)]
enum Instance<'a> {
    Plain(&'a Graph),
    Labeled(&'a LabeledGraph),
}

/// Cliques become stars; every edge must admit distance 2.
fn k2_result(g: &Graph, admits_two: impl Fn(usize, usize) -> bool) -> RecognitionResult {
    let started = Instant::now();
    let comps = connected_components(g);
    let yes = recognize_k2(g) && g.edges().all(|(u, v)| admits_two(u, v));
    let components: Vec<ComponentResult> = comps
        .into_iter()
        .map(|vs| {
            let witness = yes.then(|| star(&vs));
            ComponentResult { vertices: vs, witness }
        })
        .collect();
    let witness = yes.then(|| assemble(&components, 2));
    RecognitionResult { witness, components, stats: Stats { k: 2, elapsed: started.elapsed(), ..Stats::default() } }
}

/// Root 0 with one leaf per vertex.
fn star(vs: &[usize]) -> LeafRootTree {
    let leaf_map = vs.iter().enumerate().map(|(i, &v)| (i + 1, v)).collect();
    LeafRootTree::new(vec![0; vs.len() + 1], 0, leaf_map).expect("stars are valid trees")
}

/// Two leaves joined by a path of `len` edges, rooted at the first interior
/// node.
fn path_witness(a: usize, b: usize, len: usize) -> LeafRootTree {
    let edges: Vec<(usize, usize)> = (0..len).map(|i| (i, i + 1)).collect();
    LeafRootTree::from_edges(len + 1, &edges, 1, BTreeMap::from([(0, a), (len, b)])).expect("paths are valid trees")
}

struct ComponentRun {
    result: ComponentResult,
    width: usize,
    traces: Vec<BagTrace>,
}

fn run_components(g: &Graph, inst: Instance, k: usize, opts: &Options) -> Result<RecognitionResult> {
    let started = Instant::now();
    let comps = connected_components(g);
    let slots: Vec<Mutex<Option<Result<ComponentRun>>>> = comps.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        if i >= comps.len() {
            break;
        }
        let out = run_component(&comps[i], inst, k, opts, started);
        let failed = out.is_err();
        *slots[i].lock().unwrap() = Some(out);
        if failed {
            next.store(comps.len(), Ordering::SeqCst);
        }
    };
    let threads = opts.threads.max(1).min(comps.len().max(1));
    if threads == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(work);
            }
        });
    }

    let mut stats = Stats { k, ..Stats::default() };
    let mut components = Vec::with_capacity(comps.len());
    for slot in slots {
        let Some(run) = slot.into_inner().unwrap() else { continue };
        let run = run?;
        stats.width = stats.width.max(run.width);
        stats.pictures_per_bag.extend(run.traces.iter().map(|t| t.pictures));
        stats.traces.extend(run.traces);
        components.push(run.result);
    }
    let witness = components.iter().all(|c| c.witness.is_some()).then(|| assemble(&components, k));
    stats.elapsed = started.elapsed();
    Ok(RecognitionResult { witness, components, stats })
}

fn run_component(vs: &[usize], inst: Instance, k: usize, opts: &Options, started: Instant) -> Result<ComponentRun> {
    let (sub, labeled) = match inst {
        Instance::Plain(g) => (g.induced_subgraph(vs), None),
        Instance::Labeled(lg) => {
            let l = lg.induced_subgraph(vs);
            (l.graph().clone(), Some(l))
        }
    };
    let (kept, twins) = true_twin_reduction(&sub, labeled.as_ref());
    let global: Vec<usize> = kept.iter().map(|&i| vs[i]).collect();
    let mut width = 0;
    let mut traces = Vec::new();
    let witness = match kept.len() {
        1 => Some(star(&global)),
        2 => {
            let len = labeled.as_ref().map_or(Some(2), |l| l.range(kept[0], kept[1]).map(|r| r.0));
            len.map(|len| path_witness(global[0], global[1], len))
        }
        _ => {
            let red = sub.induced_subgraph(&kept);
            let red_labeled = labeled.as_ref().map(|l| l.induced_subgraph(&kept));
            let td = decompose(&red, opts.strategy)?;
            width = td.width();
            let ext = make_extra_nice(&make_nice(&td)?, &red);
            let ctx = match &red_labeled {
                Some(l) => Ctx::labeled(l, k),
                None => Ctx::plain(&red, k),
            };
            let schedule = engine::connection_schedule(&ext, &red);
            let run = engine::run(&schedule, &ctx, &opts.limits, started)?;
            traces = run.traces;
            match run.raw {
                Some(raw) => Some(finish(&raw, &global)?),
                None => None,
            }
        }
    };
    let twins: Vec<(usize, usize)> = twins.into_iter().map(|(v, u)| (vs[v], vs[u])).collect();
    let witness = witness.map(|t| add_twins(&t, &twins));
    Ok(ComponentRun { result: ComponentResult { vertices: vs.to_vec(), witness }, width, traces })
}

/// Splits off true twins: vertices with the same closed neighbourhood as an
/// earlier kept vertex (and, when labeled, identical ranges to every other
/// vertex and a range admitting distance 2 between them). Returns the kept
/// vertices and `(removed, kept twin)` pairs.
///
/// A twin can always be re-attached as a sibling leaf of its partner, so the
/// reduction preserves the answer.
pub fn true_twin_reduction(g: &Graph, labeled: Option<&LabeledGraph>) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut kept = Vec::new();
    let mut twins = Vec::new();
    for v in 0..g.vertex_count() {
        let mut closed: Vec<usize> = g.neighbors(v).to_vec();
        closed.push(v);
        closed.sort_unstable();
        let bucket = buckets.entry(closed).or_default();
        let partner = bucket.iter().copied().find(|&u| match labeled {
            None => true,
            Some(l) => l.range(u, v).is_some_and(|r| r.0 <= 2) && g.neighbors(v).iter().all(|&x| x == u || l.range(u, x) == l.range(v, x)),
        });
        match partner {
            Some(u) => twins.push((v, u)),
            None => {
                bucket.push(v);
                kept.push(v);
            }
        }
    }
    (kept, twins)
}

/// Hangs each removed twin as a new leaf next to its partner's leaf.
fn add_twins(t: &LeafRootTree, twins: &[(usize, usize)]) -> LeafRootTree {
    if twins.is_empty() {
        return t.clone();
    }
    let mut parent = t.parents().to_vec();
    let mut leaf_map = t.leaf_map().clone();
    let leaf_of = t.vertex_leaves();
    for &(v, u) in twins {
        let p = parent[leaf_of[&u]];
        leaf_map.insert(parent.len(), v);
        parent.push(p);
    }
    LeafRootTree::new(parent, t.root(), leaf_map).expect("sibling leaves keep the tree valid")
}

/// Drops unlabeled leaves, roots the rest at an interior node and maps
/// component-local vertices back through `vs`.
fn finish(raw: &RawTree, vs: &[usize]) -> Result<LeafRootTree> {
    let n = raw.node_count;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &raw.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let alive = strip_unmapped(&mut adj, &raw.labels, usize::MAX);
    let ids: Vec<usize> = (0..n).filter(|&u| alive[u]).collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &u) in ids.iter().enumerate() {
        new_id[u] = i;
    }
    let edges: Vec<(usize, usize)> =
        raw.edges.iter().filter(|&&(a, b)| alive[a] && alive[b]).map(|&(a, b)| (new_id[a], new_id[b])).collect();
    let leaf_map: BTreeMap<usize, usize> = ids.iter().filter_map(|&u| raw.labels[u].map(|v| (new_id[u], vs[v]))).collect();
    let root =
        ids.iter().position(|&u| adj[u].len() >= 2).ok_or_else(|| Error::Internal("reconstructed tree has no interior node".into()))?;
    LeafRootTree::from_edges(ids.len(), &edges, root, leaf_map)
}

/// Single component: its own tree. Several: a super-root with a path of
/// `len` edges down to each component root.
fn assemble(components: &[ComponentResult], len: usize) -> LeafRootTree {
    let trees: Vec<&LeafRootTree> = components.iter().filter_map(|c| c.witness.as_ref()).collect();
    match trees.len() {
        0 => LeafRootTree::new(vec![0], 0, BTreeMap::new()).expect("single node"),
        1 => trees[0].clone(),
        _ => {
            let mut edges = Vec::new();
            let mut leaf_map = BTreeMap::new();
            let mut next = 1;
            for t in trees {
                let mut prev = 0;
                for _ in 1..len {
                    edges.push((prev, next));
                    prev = next;
                    next += 1;
                }
                let base = next;
                edges.push((prev, base + t.root()));
                edges.extend(t.edges().into_iter().map(|(a, b)| (base + a, base + b)));
                leaf_map.extend(t.leaf_map().iter().map(|(&l, &v)| (base + l, v)));
                next += t.node_count();
            }
            LeafRootTree::from_edges(next, &edges, 0, leaf_map).expect("assembly of trees is a tree")
        }
    }
}
