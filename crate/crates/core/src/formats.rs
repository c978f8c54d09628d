//! Text formats: graphs, tree decompositions and witnesses.
//!
//! Graph files are DIMACS-like:
//!
//! ```text
//! c comment
//! p lp <n> <m>
//! e <u> <v>             plain edge, 1-based ids
//! e <u> <v> <k1> <k2>   labeled edge with distance range [k1, k2]
//! ```
//!
//! Decompositions use the PACE `.td` layout (`s td <bags> <max bag size>
//! <n>`, then `b <id> <vertices…>` lines and tree edges `<id> <id>`, all
//! 1-based).
//!
//! Witness trees are parent arrays with 0-based node ids:
//!
//! ```text
//! c comment
//! p tree <nodes>
//! <parent of node 0>     the root is its own parent
//! …
//! leaves
//! <node> <vertex name>   one line per leaf
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledGraph, Range};
use crate::leafroot::LeafRootTree;
use crate::treedecomp::TreeDecomposition;

/// A parsed graph file; `ranges` is set when every edge line is labeled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    pub ranges: Option<BTreeMap<(usize, usize), Range>>,
}

impl GraphFile {
    /// The labeled graph with cap `cap`; a plain file gets `[2, cap]` on
    /// every edge.
    pub fn labeled(&self, cap: usize) -> Result<LabeledGraph> {
        match &self.ranges {
            Some(r) => LabeledGraph::new(self.graph.clone(), r.clone(), cap),
            None => LabeledGraph::from_unlabeled(&self.graph, cap),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers(words: &[&str], line: usize) -> Result<Vec<usize>> {
    words.iter().map(|w| w.parse::<usize>().map_err(|_| parse_err(line, format!("expected a non-negative integer, found '{w}'")))).collect()
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let words: Vec<&str> = l.split_whitespace().collect();
        match words.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, words)),
        }
    })
}

pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut graph = Graph::new(0);
    let mut ranges = BTreeMap::new();
    let mut labeled: Option<bool> = None;
    let mut last = 0;
    for (ln, words) in data_lines(text) {
        last = ln;
        match words[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(ln, "second 'p' line"));
                }
                if words.len() != 4 || words[1] != "lp" {
                    return Err(parse_err(ln, "header must be 'p lp <n> <m>'"));
                }
                let nm = numbers(&words[2..], ln)?;
                header = Some((nm[0], nm[1]));
                graph = Graph::new(nm[0]);
            }
            "e" => {
                let Some((n, _)) = header else {
                    return Err(parse_err(ln, "edge before the 'p lp' header"));
                };
                let this_labeled = match words.len() {
                    3 => false,
                    5 => true,
                    _ => return Err(parse_err(ln, "edge line must be 'e <u> <v>' or 'e <u> <v> <k1> <k2>'")),
                };
                if labeled.is_some_and(|l| l != this_labeled) {
                    return Err(parse_err(ln, "mixed labeled and unlabeled edge lines"));
                }
                labeled = Some(this_labeled);
                let nums = numbers(&words[1..], ln)?;
                let (u, v) = (nums[0], nums[1]);
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(parse_err(ln, format!("vertex id out of range 1..={n}")));
                }
                if u == v {
                    return Err(parse_err(ln, format!("self-loop on vertex {u}")));
                }
                if graph.has_edge(u - 1, v - 1) {
                    return Err(parse_err(ln, format!("duplicate edge {u} {v}")));
                }
                graph.add_edge(u - 1, v - 1).map_err(|e| parse_err(ln, e.to_string()))?;
                if this_labeled {
                    let (k1, k2) = (nums[2], nums[3]);
                    if !(2 <= k1 && k1 <= k2) {
                        return Err(parse_err(ln, format!("range [{k1},{k2}] needs 2 <= k1 <= k2")));
                    }
                    ranges.insert(((u - 1).min(v - 1), (u - 1).max(v - 1)), (k1, k2));
                }
            }
            other => return Err(parse_err(ln, format!("unknown line type '{other}'"))),
        }
    }
    let Some((n, m)) = header else {
        return Err(parse_err(last.max(1), "missing 'p lp <n> <m>' header"));
    };
    if graph.edge_count() != m {
        return Err(parse_err(last.max(1), format!("header declares {m} edges, found {}", graph.edge_count())));
    }
    graph.set_names((1..=n).map(|i| i.to_string()).collect())?;
    Ok(GraphFile { graph, ranges: (labeled == Some(true)).then_some(ranges) })
}

pub fn write_graph_file(g: &Graph, ranges: Option<&BTreeMap<(usize, usize), Range>>) -> String {
    let mut out = format!("p lp {} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        match ranges.and_then(|r| r.get(&(u, v))) {
            Some(&(lo, hi)) => writeln!(out, "e {} {} {lo} {hi}", u + 1, v + 1).unwrap(),
            None => writeln!(out, "e {} {}", u + 1, v + 1).unwrap(),
        }
    }
    out
}

pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    let mut last = 0;
    for (ln, words) in data_lines(text) {
        last = ln;
        match words[0] {
            "s" => {
                if words.len() != 5 || words[1] != "td" {
                    return Err(parse_err(ln, "header must be 's td <bags> <max bag size> <n>'"));
                }
                let h = numbers(&words[2..], ln)?;
                header = Some((h[0], h[1], h[2]));
                bags = vec![None; h[0]];
            }
            "b" => {
                let Some((count, size, n)) = header else {
                    return Err(parse_err(ln, "bag before the 's td' header"));
                };
                let nums = numbers(&words[1..], ln)?;
                let Some((&id, verts)) = nums.split_first() else {
                    return Err(parse_err(ln, "bag line needs an id"));
                };
                if id == 0 || id > count {
                    return Err(parse_err(ln, format!("bag id out of range 1..={count}")));
                }
                if verts.len() > size {
                    return Err(parse_err(ln, format!("bag larger than declared size {size}")));
                }
                if let Some(&bad) = verts.iter().find(|&&v| v == 0 || v > n) {
                    return Err(parse_err(ln, format!("vertex {bad} out of range 1..={n}")));
                }
                if bags[id - 1].replace(verts.iter().map(|v| v - 1).collect()).is_some() {
                    return Err(parse_err(ln, format!("bag {id} given twice")));
                }
            }
            _ => {
                let Some((count, ..)) = header else {
                    return Err(parse_err(ln, "tree edge before the 's td' header"));
                };
                let nums = numbers(&words, ln)?;
                if nums.len() != 2 || nums.iter().any(|&x| x == 0 || x > count) {
                    return Err(parse_err(ln, "tree edge must be two bag ids"));
                }
                edges.push((nums[0] - 1, nums[1] - 1));
            }
        }
    }
    if header.is_none() {
        return Err(parse_err(last.max(1), "missing 's td' header"));
    }
    let bags: Option<Vec<Vec<usize>>> = bags.into_iter().collect();
    let bags = bags.ok_or_else(|| parse_err(last.max(1), "some declared bag is missing"))?;
    if !bags.is_empty() && edges.len() + 1 != bags.len() {
        return Err(parse_err(last.max(1), format!("{} bags need {} tree edges, found {}", bags.len(), bags.len() - 1, edges.len())));
    }
    Ok(TreeDecomposition::new(bags, &edges))
}

pub fn write_td(d: &TreeDecomposition, n: usize) -> String {
    let mut out = format!("s td {} {} {n}\n", d.bags.len(), d.width() + 1);
    for (i, b) in d.bags.iter().enumerate() {
        write!(out, "b {}", i + 1).unwrap();
        for v in b {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    for (a, b) in d.edges() {
        writeln!(out, "{} {}", a + 1, b + 1).unwrap();
    }
    out
}

/// Parent-array witness text; leaves are named with `g`'s vertex names.
pub fn write_witness(t: &LeafRootTree, g: &Graph) -> String {
    let mut out = format!("p tree {}\n", t.node_count());
    for &p in t.parents() {
        writeln!(out, "{p}").unwrap();
    }
    out.push_str("leaves\n");
    for (&node, &v) in t.leaf_map() {
        writeln!(out, "{node} {}", g.name(v)).unwrap();
    }
    out
}

/// Map from display names to vertex ids.
pub fn name_index(g: &Graph) -> HashMap<String, usize> {
    (0..g.vertex_count()).map(|v| (g.name(v), v)).collect()
}

pub fn parse_witness(text: &str, g: &Graph) -> Result<LeafRootTree> {
    let names = name_index(g);
    let mut lines = data_lines(text);
    let (ln, words) = lines.next().ok_or_else(|| parse_err(1, "empty witness"))?;
    if words.len() != 3 || words[0] != "p" || words[1] != "tree" {
        return Err(parse_err(ln, "header must be 'p tree <nodes>'"));
    }
    let n = numbers(&words[2..], ln)?[0];
    let mut parent = Vec::with_capacity(n);
    let mut last = ln;
    for _ in 0..n {
        let (ln, words) = lines.next().ok_or_else(|| parse_err(last, format!("expected {n} parent lines")))?;
        last = ln;
        if words.len() != 1 {
            return Err(parse_err(ln, "parent line must hold one node id"));
        }
        let p = numbers(&words, ln)?[0];
        if p >= n {
            return Err(parse_err(ln, format!("parent {p} out of range 0..{n}")));
        }
        parent.push(p);
    }
    match lines.next() {
        Some((_, w)) if w == ["leaves"] => {}
        Some((ln, _)) => return Err(parse_err(ln, "expected 'leaves'")),
        None => return Err(parse_err(last, "missing 'leaves' block")),
    }
    let mut leaf_map = BTreeMap::new();
    for (ln, words) in lines {
        if words.len() != 2 {
            return Err(parse_err(ln, "leaf line must be '<node> <vertex name>'"));
        }
        let node = numbers(&words[..1], ln)?[0];
        let v = *names.get(words[1]).ok_or_else(|| parse_err(ln, format!("unknown vertex name '{}'", words[1])))?;
        if node >= n {
            return Err(parse_err(ln, format!("node {node} out of range 0..{n}")));
        }
        if leaf_map.insert(node, v).is_some() {
            return Err(parse_err(ln, format!("node {node} mapped twice")));
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&u| parent[u] == u).collect();
    let [root] = roots[..] else {
        return Err(parse_err(ln, format!("expected exactly one self-parented root, found {}", roots.len())));
    };
    LeafRootTree::new(parent, root, leaf_map).map_err(|e| parse_err(ln, e.to_string()))
}

fn newick_label(name: &str) -> String {
    if name.chars().any(|c| "(),:;'[] \t".contains(c)) {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

/// Newick rendering rooted at the tree's root; leaves carry vertex names.
pub fn to_newick(t: &LeafRootTree, g: &Graph) -> String {
    let children = t.children();
    let mut out = String::new();
    // iterative pre/post walk to handle deep chains
    let mut stack: Vec<(usize, usize)> = vec![(t.root(), 0)];
    while let Some((u, i)) = stack.pop() {
        let kids = &children[u];
        if kids.is_empty() {
            if let Some(&v) = t.leaf_map().get(&u) {
                out.push_str(&newick_label(&g.name(v)));
            }
            continue;
        }
        if i == 0 {
            out.push('(');
        } else if i < kids.len() {
            out.push(',');
        }
        if i < kids.len() {
            stack.push((u, i + 1));
            stack.push((kids[i], 0));
        } else {
            out.push(')');
            if let Some(&v) = t.leaf_map().get(&u) {
                out.push_str(&newick_label(&g.name(v)));
            }
        }
    }
    out.push(';');
    out
}
