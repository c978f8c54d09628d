//! Text forms of formulas.
//!
//! The s-expression grammar, one formula per file:
//!
//! ```text
//! file     := header formula
//! header   := "; free" { name ":" sort } newline
//! formula  := "true"
//!           | "(" ("exists" | "forall") name sort bound formula ")"
//!           | "(" ("and" | "or") { formula } ")"
//!           | "(not" formula ")"
//!           | "(" ("implies" | "iff") formula formula ")"
//!           | "(" ("=" | "inc" | "in") name name ")"
//! sort     := "vertex" | "edge" | "vset" | "eset"
//! bound    := "_" | name          ; set variable bounding an element quantifier
//! ```
//!
//! Other lines starting with `;` are comments. `(inc e v)` reads "edge `e`
//! is incident to vertex `v`" and `(in x X)` is membership.

use std::fmt::Write as _;

use super::ast::{Formula, Quantifier, Signature, Sort};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Sexpr,
    Pretty,
}

pub fn render(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    match style {
        Style::Sexpr => sexpr(f, 0, &mut out),
        Style::Pretty => pretty(f, &mut out),
    }
    out
}

fn is_flat(f: &Formula) -> bool {
    match f {
        Formula::Not(inner) => is_flat(inner),
        Formula::True | Formula::Eq(..) | Formula::Inc(..) | Formula::Mem(..) => true,
        _ => false,
    }
}

fn sexpr(f: &Formula, depth: usize, out: &mut String) {
    let pad = |out: &mut String, d: usize| {
        out.push('\n');
        out.extend(std::iter::repeat_n(' ', 2 * d));
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::Eq(a, b) => write!(out, "(= {a} {b})").unwrap(),
        Formula::Inc(e, v) => write!(out, "(inc {e} {v})").unwrap(),
        Formula::Mem(x, s) => write!(out, "(in {x} {s})").unwrap(),
        Formula::Not(inner) if is_flat(inner) => {
            out.push_str("(not ");
            sexpr(inner, depth, out);
            out.push(')');
        }
        Formula::Quant { q, var, sort, within, body } => {
            let kw = if *q == Quantifier::Exists { "exists" } else { "forall" };
            write!(out, "({kw} {var} {sort} {}", within.as_deref().unwrap_or("_")).unwrap();
            pad(out, depth + 1);
            sexpr(body, depth + 1, out);
            out.push(')');
        }
        _ => {
            let kw = match f {
                Formula::And(_) => "and",
                Formula::Or(_) => "or",
                Formula::Not(_) => "not",
                Formula::Implies(..) => "implies",
                _ => "iff",
            };
            write!(out, "({kw}").unwrap();
            for c in f.children() {
                if is_flat(c) {
                    out.push(' ');
                } else {
                    pad(out, depth + 1);
                }
                sexpr(c, depth + 1, out);
            }
            out.push(')');
        }
    }
}

fn pretty(f: &Formula, out: &mut String) {
    let join = |out: &mut String, parts: &[&Formula], sep: &str| {
        out.push('(');
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                out.push_str(sep);
            }
            pretty(p, out);
        }
        out.push(')');
    };
    match f {
        Formula::True => out.push('⊤'),
        Formula::Eq(a, b) => write!(out, "{a}={b}").unwrap(),
        Formula::Inc(e, v) => write!(out, "{e}∼{v}").unwrap(),
        Formula::Mem(x, s) => write!(out, "{x}∈{s}").unwrap(),
        Formula::Not(inner) => {
            out.push('¬');
            if is_flat(inner) && !matches!(**inner, Formula::Not(_)) {
                out.push('(');
                pretty(inner, out);
                out.push(')');
            } else {
                pretty(inner, out);
            }
        }
        Formula::Quant { q, var, sort, within, body } => {
            out.push(if *q == Quantifier::Exists { '∃' } else { '∀' });
            let range = match (sort, within) {
                (_, Some(s)) => format!("∈{s}"),
                (Sort::Vertex, None) => "∈V".into(),
                (Sort::Edge, None) => "∈E".into(),
                (Sort::VertexSet, None) => "⊂V".into(),
                (Sort::EdgeSet, None) => "⊂E".into(),
            };
            write!(out, "{var}{range}: ").unwrap();
            pretty(body, out);
        }
        Formula::And(fs) => join(out, &fs.iter().collect::<Vec<_>>(), " ∧ "),
        Formula::Or(fs) => join(out, &fs.iter().collect::<Vec<_>>(), " ∨ "),
        Formula::Implies(a, b) => join(out, &[a, b], " → "),
        Formula::Iff(a, b) => join(out, &[a, b], " ↔ "),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Vec<(Tok, usize)> {
    let mut toks = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        let mut word = String::new();
        let flush = |word: &mut String, toks: &mut Vec<(Tok, usize)>| {
            if !word.is_empty() {
                toks.push((Tok::Word(std::mem::take(word)), ln + 1));
            }
        };
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    flush(&mut word, &mut toks);
                    toks.push((if ch == '(' { Tok::Open } else { Tok::Close }, ln + 1));
                }
                c if c.is_whitespace() => flush(&mut word, &mut toks),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut toks);
    }
    toks
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map(|t| t.1).unwrap_or(1)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line(), msg: msg.into() }
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone()).ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn word(&mut self) -> Result<String> {
        match self.next()? {
            Tok::Word(w) => Ok(w),
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected a name, found {t:?}")))
            }
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            Tok::Close => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.err("expected ')'"))
            }
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.next()? {
            Tok::Word(w) if w == "true" => Ok(Formula::True),
            Tok::Word(w) => {
                self.pos -= 1;
                Err(self.err(format!("unexpected word {w}")))
            }
            Tok::Close => {
                self.pos -= 1;
                Err(self.err("unexpected ')'"))
            }
            Tok::Open => {
                let head = self.word()?;
                let f = match head.as_str() {
                    "exists" | "forall" => {
                        let var = self.word()?;
                        let sort_word = self.word()?;
                        let sort = Sort::from_keyword(&sort_word).ok_or_else(|| self.err(format!("unknown sort {sort_word}")))?;
                        let bound = self.word()?;
                        let within = (bound != "_").then_some(bound);
                        let body = Box::new(self.formula()?);
                        let q = if head == "exists" { Quantifier::Exists } else { Quantifier::Forall };
                        Formula::Quant { q, var, sort, within, body }
                    }
                    "and" | "or" => {
                        let mut parts = Vec::new();
                        while self.toks.get(self.pos).map(|t| &t.0) != Some(&Tok::Close) {
                            parts.push(self.formula()?);
                        }
                        if head == "and" {
                            Formula::And(parts)
                        } else {
                            Formula::Or(parts)
                        }
                    }
                    "not" => Formula::not(self.formula()?),
                    "implies" => Formula::implies(self.formula()?, self.formula()?),
                    "iff" => Formula::iff(self.formula()?, self.formula()?),
                    "=" => Formula::Eq(self.word()?, self.word()?),
                    "inc" => Formula::Inc(self.word()?, self.word()?),
                    "in" => Formula::Mem(self.word()?, self.word()?),
                    other => return Err(self.err(format!("unknown connective {other}"))),
                };
                self.close()?;
                Ok(f)
            }
        }
    }
}

/// Parses one s-expression formula; `;` starts a comment.
pub fn parse_sexpr(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: tokenize(text), pos: 0 };
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

/// A formula file: free-variable header followed by the s-expression.
pub fn write_formula_file(f: &Formula, free: &Signature) -> String {
    let mut out = String::from("; free");
    for (name, sort) in free {
        write!(out, " {name}:{sort}").unwrap();
    }
    out.push('\n');
    out.push_str(&render(f, Style::Sexpr));
    out.push('\n');
    out
}

pub fn parse_formula_file(text: &str) -> Result<(Signature, Formula)> {
    let mut free = Signature::new();
    let header = text.lines().enumerate().find(|(_, l)| l.trim_start().starts_with("; free"));
    let Some((ln, line)) = header else {
        return Err(Error::Parse { line: 1, msg: "missing '; free' header".into() });
    };
    for decl in line.trim_start()["; free".len()..].split_whitespace() {
        let (name, sort) = decl.split_once(':').ok_or_else(|| Error::Parse { line: ln + 1, msg: format!("bad declaration {decl}") })?;
        let sort = Sort::from_keyword(sort).ok_or_else(|| Error::Parse { line: ln + 1, msg: format!("unknown sort {sort}") })?;
        free.insert(name.to_string(), sort);
    }
    Ok((free, parse_sexpr(text)?))
}
