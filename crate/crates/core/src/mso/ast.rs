use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Vertex,
    Edge,
    VertexSet,
    EdgeSet,
}

impl Sort {
    pub fn keyword(self) -> &'static str {
        match self {
            Sort::Vertex => "vertex",
            Sort::Edge => "edge",
            Sort::VertexSet => "vset",
            Sort::EdgeSet => "eset",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Sort> {
        Some(match s {
            "vertex" => Sort::Vertex,
            "edge" => Sort::Edge,
            "vset" => Sort::VertexSet,
            "eset" => Sort::EdgeSet,
            _ => return None,
        })
    }

    /// Set sort whose members have this sort.
    pub fn set_of(self) -> Option<Sort> {
        match self {
            Sort::Vertex => Some(Sort::VertexSet),
            Sort::Edge => Some(Sort::EdgeSet),
            _ => None,
        }
    }

    pub fn is_set(self) -> bool {
        matches!(self, Sort::VertexSet | Sort::EdgeSet)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// MSO₂ formula over a graph with vertex set `V` and edge set `E`.
///
/// Element quantifiers may be bounded by a set variable (`∃e∈S`); without a
/// bound they range over `V` or `E`. Set quantifiers range over all subsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Quant {
        q: Quantifier,
        var: String,
        sort: Sort,
        within: Option<String>,
        body: Box<Formula>,
    },
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Equality of two element variables of the same sort.
    Eq(String, String),
    /// Edge `e` is incident to vertex `v`.
    Inc(String, String),
    /// Element is a member of a set.
    Mem(String, String),
}

impl Formula {
    pub fn exists(var: impl Into<String>, sort: Sort, within: Option<&str>, body: Formula) -> Formula {
        Formula::Quant { q: Quantifier::Exists, var: var.into(), sort, within: within.map(str::to_string), body: Box::new(body) }
    }

    pub fn forall(var: impl Into<String>, sort: Sort, within: Option<&str>, body: Formula) -> Formula {
        Formula::Quant { q: Quantifier::Forall, var: var.into(), sort, within: within.map(str::to_string), body: Box::new(body) }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Eq(a.into(), b.into())
    }

    pub fn inc(e: &str, v: &str) -> Formula {
        Formula::Inc(e.into(), v.into())
    }

    pub fn mem(x: &str, set: &str) -> Formula {
        Formula::Mem(x.into(), set.into())
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Quant { body, .. } | Formula::Not(body) => body.size(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::size).sum(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => a.size() + b.size(),
            _ => 0,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Quant { body, .. } | Formula::Not(body) => vec![body],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
            _ => vec![],
        }
    }
}

/// Declared free variables of a closed-up formula.
pub type Signature = BTreeMap<String, Sort>;

/// Checks that every occurrence is bound or declared and that atoms and
/// bounds are sort-consistent.
pub fn check_well_formed(f: &Formula, free: &Signature) -> Result<()> {
    let mut scope: Vec<(String, Sort)> = free.iter().map(|(n, &s)| (n.clone(), s)).collect();
    check(f, &mut scope)
}

fn lookup(scope: &[(String, Sort)], name: &str) -> Result<Sort> {
    scope.iter().rev().find(|(n, _)| n == name).map(|&(_, s)| s).ok_or_else(|| Error::InvalidInput(format!("unbound variable {name}")))
}

fn check(f: &Formula, scope: &mut Vec<(String, Sort)>) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidInput(msg));
    match f {
        Formula::True => Ok(()),
        Formula::Quant { var, sort, within, body, .. } => {
            if let Some(set) = within {
                let s = lookup(scope, set)?;
                if sort.set_of() != Some(s) {
                    return bad(format!("{var}: {sort} bounded by {set} of sort {s}"));
                }
            }
            scope.push((var.clone(), *sort));
            let r = check(body, scope);
            scope.pop();
            r
        }
        Formula::Eq(a, b) => {
            let (sa, sb) = (lookup(scope, a)?, lookup(scope, b)?);
            if sa != sb || sa.is_set() {
                return bad(format!("equality between {a}: {sa} and {b}: {sb}"));
            }
            Ok(())
        }
        Formula::Inc(e, v) => {
            if lookup(scope, e)? != Sort::Edge || lookup(scope, v)? != Sort::Vertex {
                return bad(format!("incidence {e} ∼ {v} needs an edge and a vertex"));
            }
            Ok(())
        }
        Formula::Mem(x, set) => {
            let (sx, ss) = (lookup(scope, x)?, lookup(scope, set)?);
            if sx.set_of() != Some(ss) {
                return bad(format!("membership {x}: {sx} in {set}: {ss}"));
            }
            Ok(())
        }
        _ => f.children().into_iter().try_for_each(|c| check(c, scope)),
    }
}

/// Names occurring free in `f`.
pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(f, &mut Vec::new(), &mut out);
    out
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut note = |name: &str, bound: &[String]| {
        if !bound.iter().any(|b| b == name) {
            out.insert(name.to_string());
        }
    };
    match f {
        Formula::Quant { var, within, body, .. } => {
            if let Some(set) = within {
                note(set, bound);
            }
            bound.push(var.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Formula::Eq(a, b) | Formula::Inc(a, b) | Formula::Mem(a, b) => {
            note(a, bound);
            note(b, bound);
        }
        _ => {
            for c in f.children() {
                collect_free(c, bound, out);
            }
        }
    }
}
