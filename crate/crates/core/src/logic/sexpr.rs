//! Canonical s-expression syntax.
//!
//! ```text
//! formula := true | false | (= t t) | (< t t) | (> t t) | (<= t t) | (>= t t)
//!          | (not f) | (and f*) | (or f*) | (=> f f) | (<=> f f)
//!          | (exists (x S) f) | (forall (x S) f)
//! term    := numeral | ident | (+ t*) | (- t) | (- t t) | (* t*) | (^ t k) | (dI t)
//! numeral := -?[0-9]+ ( / [0-9]+ )?
//! ```
//!
//! `>`, `<=`, `>=` and `^` are input sugar; the printer only emits the
//! canonical forms, so print∘parse is the identity on printed text.

use std::collections::BTreeMap;

use super::{name, Formula, LogicError, Name, Term, Var};
use crate::poly::parse_q;

/// Sort assignment for free variables.
#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    pub default_sort: Option<Name>,
    pub declared: BTreeMap<Name, Name>,
}

impl ParseContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_default_sort(sort: &str) -> Self {
        ParseContext {
            default_sort: Some(name(sort)),
            declared: BTreeMap::new(),
        }
    }

    pub fn declare(mut self, var: &str, sort: &str) -> Self {
        self.declared.insert(name(var), name(sort));
        self
    }
}

#[derive(Debug, Clone)]
enum Sx {
    Atom(String, usize),
    List(Vec<Sx>, usize),
}

impl Sx {
    fn pos(&self) -> usize {
        match self {
            Sx::Atom(_, p) | Sx::List(_, p) => *p,
        }
    }
}

fn err(pos: usize, msg: impl Into<String>) -> LogicError {
    LogicError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn read_sexpr(text: &str) -> Result<Sx, LogicError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let sx = read_one(text, bytes, &mut i)?;
    skip_ws(bytes, &mut i);
    if i < bytes.len() {
        return Err(err(i, "trailing input"));
    }
    Ok(sx)
}

fn skip_ws(b: &[u8], i: &mut usize) {
    while *i < b.len() && b[*i].is_ascii_whitespace() {
        *i += 1;
    }
}

fn read_one(text: &str, b: &[u8], i: &mut usize) -> Result<Sx, LogicError> {
    skip_ws(b, i);
    if *i >= b.len() {
        return Err(err(*i, "unexpected end of input"));
    }
    let start = *i;
    match b[*i] {
        b'(' => {
            *i += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(b, i);
                if *i >= b.len() {
                    return Err(err(start, "unclosed `(`"));
                }
                if b[*i] == b')' {
                    *i += 1;
                    return Ok(Sx::List(items, start));
                }
                items.push(read_one(text, b, i)?);
            }
        }
        b')' => Err(err(start, "unexpected `)`")),
        _ => {
            while *i < b.len() && !b[*i].is_ascii_whitespace() && b[*i] != b'(' && b[*i] != b')' {
                *i += 1;
            }
            Ok(Sx::Atom(text[start..*i].to_string(), start))
        }
    }
}

fn is_numeral(s: &str) -> bool {
    let t = s.strip_prefix('-').unwrap_or(s);
    t.starts_with(|c: char| c.is_ascii_digit())
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.')
}

const RESERVED: &[&str] = &["true", "false", "not", "and", "or", "exists", "forall"];

struct Parser<'a> {
    ctx: &'a ParseContext,
    scope: Vec<Var>,
}

impl Parser<'_> {
    fn lookup(&self, id: &str, pos: usize) -> Result<Var, LogicError> {
        if let Some(v) = self.scope.iter().rev().find(|v| &*v.name == id) {
            return Ok(v.clone());
        }
        if let Some(s) = self.ctx.declared.get(id) {
            return Ok(Var::new(id, s));
        }
        match &self.ctx.default_sort {
            Some(s) => Ok(Var::new(id, s)),
            None => Err(err(pos, format!("variable `{id}` has no declared sort"))),
        }
    }

    fn term(&self, sx: &Sx) -> Result<Term, LogicError> {
        match sx {
            Sx::Atom(a, pos) => {
                if is_numeral(a) {
                    parse_q(a)
                        .map(Term::Num)
                        .ok_or_else(|| err(*pos, format!("bad numeral `{a}`")))
                } else if is_ident(a) && !RESERVED.contains(&a.as_str()) {
                    Ok(Term::Var(self.lookup(a, *pos)?))
                } else {
                    Err(err(*pos, format!("expected a term, found `{a}`")))
                }
            }
            Sx::List(items, pos) => {
                let (head, hpos) = match items.first() {
                    Some(Sx::Atom(h, p)) => (h.as_str(), *p),
                    _ => return Err(err(*pos, "expected a function symbol")),
                };
                let rest = &items[1..];
                let t = match head {
                    "+" | "*" => {
                        if rest.is_empty() {
                            return Err(LogicError::Arity(format!(
                                "`{head}` needs arguments (at byte {hpos})"
                            )));
                        }
                        Term::app(head, self.terms(rest)?)
                    }
                    "-" => match rest.len() {
                        1 | 2 => Term::app("-", self.terms(rest)?),
                        k => {
                            return Err(LogicError::Arity(format!(
                                "`-` takes 1 or 2 arguments, got {k} (at byte {hpos})"
                            )))
                        }
                    },
                    "^" => {
                        if rest.len() != 2 {
                            return Err(LogicError::Arity(format!(
                                "`^` takes 2 arguments (at byte {hpos})"
                            )));
                        }
                        let base = self.term(&rest[0])?;
                        let k: usize = match &rest[1] {
                            Sx::Atom(a, _) => a.parse().map_err(|_| {
                                err(rest[1].pos(), "exponent must be a natural number")
                            })?,
                            _ => {
                                return Err(err(rest[1].pos(), "exponent must be a natural number"))
                            }
                        };
                        match k {
                            0 => Term::int(1),
                            1 => base,
                            _ => Term::mul(vec![base; k]),
                        }
                    }
                    h if is_derivation(h) => {
                        if rest.len() != 1 {
                            return Err(LogicError::Arity(format!(
                                "`{h}` takes 1 argument (at byte {hpos})"
                            )));
                        }
                        Term::app(h, self.terms(rest)?)
                    }
                    h => return Err(LogicError::UnknownSymbol(format!("{h} (at byte {hpos})"))),
                };
                check_same_sort(&t_args(&t), *pos)?;
                Ok(t)
            }
        }
    }

    fn terms(&self, sxs: &[Sx]) -> Result<Vec<Term>, LogicError> {
        sxs.iter().map(|s| self.term(s)).collect()
    }

    fn formula(&mut self, sx: &Sx) -> Result<Formula, LogicError> {
        match sx {
            Sx::Atom(a, pos) => match a.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => Err(err(*pos, format!("expected a formula, found `{a}`"))),
            },
            Sx::List(items, pos) => {
                let (head, hpos) = match items.first() {
                    Some(Sx::Atom(h, p)) => (h.as_str(), *p),
                    _ => return Err(err(*pos, "expected a connective or relation")),
                };
                let rest = &items[1..];
                let arity = |k: usize| -> Result<(), LogicError> {
                    if rest.len() == k {
                        Ok(())
                    } else {
                        Err(LogicError::Arity(format!(
                            "`{head}` takes {k} argument(s), got {} (at byte {hpos})",
                            rest.len()
                        )))
                    }
                };
                match head {
                    "=" | "<" | ">" | "<=" | ">=" => {
                        arity(2)?;
                        let a = self.term(&rest[0])?;
                        let b = self.term(&rest[1])?;
                        check_same_sort(&[a.clone(), b.clone()], *pos)?;
                        Ok(match head {
                            "=" => Formula::Eq(a, b),
                            "<" => Formula::lt(a, b),
                            ">" => Formula::lt(b, a),
                            "<=" => Formula::Or(
                                vec![Formula::lt(a.clone(), b.clone()), Formula::Eq(a, b)].into(),
                            ),
                            _ => Formula::Or(
                                vec![Formula::lt(b.clone(), a.clone()), Formula::Eq(a, b)].into(),
                            ),
                        })
                    }
                    "not" => {
                        arity(1)?;
                        Ok(Formula::Not(self.formula(&rest[0])?.into()))
                    }
                    "and" | "or" => {
                        let parts = rest
                            .iter()
                            .map(|s| self.formula(s))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(if head == "and" {
                            Formula::And(parts.into())
                        } else {
                            Formula::Or(parts.into())
                        })
                    }
                    "=>" | "<=>" => {
                        arity(2)?;
                        let a = self.formula(&rest[0])?.into();
                        let b = self.formula(&rest[1])?.into();
                        Ok(if head == "=>" {
                            Formula::Implies(a, b)
                        } else {
                            Formula::Iff(a, b)
                        })
                    }
                    "exists" | "forall" => {
                        arity(2)?;
                        let v = match &rest[0] {
                            Sx::List(b, _) if b.len() == 2 => match (&b[0], &b[1]) {
                                (Sx::Atom(x, xp), Sx::Atom(s, sp)) => {
                                    if !is_ident(x) || RESERVED.contains(&x.as_str()) {
                                        return Err(err(*xp, format!("bad variable name `{x}`")));
                                    }
                                    if !is_ident(s) {
                                        return Err(err(*sp, format!("bad sort name `{s}`")));
                                    }
                                    Var::new(x, s)
                                }
                                _ => return Err(err(rest[0].pos(), "expected (var Sort)")),
                            },
                            other => return Err(err(other.pos(), "expected (var Sort)")),
                        };
                        self.scope.push(v.clone());
                        let body = self.formula(&rest[1]);
                        self.scope.pop();
                        let body = body?.into();
                        Ok(if head == "exists" {
                            Formula::Exists(v, body)
                        } else {
                            Formula::Forall(v, body)
                        })
                    }
                    h => Err(LogicError::UnknownSymbol(format!("{h} (at byte {hpos})"))),
                }
            }
        }
    }
}

fn is_derivation(h: &str) -> bool {
    h.strip_prefix('d').is_some_and(|k| {
        !k.is_empty() && k.bytes().all(|c| c.is_ascii_digit()) && !k.starts_with('0')
    })
}

fn t_args(t: &Term) -> Vec<Term> {
    match t {
        Term::App(_, args) => args.to_vec(),
        _ => Vec::new(),
    }
}

fn check_same_sort(ts: &[Term], pos: usize) -> Result<(), LogicError> {
    let mut seen: Option<Name> = None;
    for t in ts {
        if let Some(s) = t.inferred_sort() {
            match &seen {
                Some(prev) if *prev != s => {
                    return Err(LogicError::Sort(format!(
                        "mixed sorts {prev} and {s} in one expression (at byte {pos})"
                    )))
                }
                _ => seen = Some(s),
            }
        }
    }
    Ok(())
}

/// Parses a formula. Formulas are kept exactly as written (no
/// simplification), so printing gives back canonical input unchanged.
pub fn parse_formula(text: &str, ctx: &ParseContext) -> Result<Formula, LogicError> {
    let sx = read_sexpr(text)?;
    Parser {
        ctx,
        scope: Vec::new(),
    }
    .formula(&sx)
}

pub fn parse_term(text: &str, ctx: &ParseContext) -> Result<Term, LogicError> {
    let sx = read_sexpr(text)?;
    Parser {
        ctx,
        scope: Vec::new(),
    }
    .term(&sx)
}
