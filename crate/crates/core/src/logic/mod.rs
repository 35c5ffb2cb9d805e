//! Multi-sorted first-order terms and formulas.
//!
//! Formulas are immutable trees whose children sit behind `Arc`, so the
//! bound extractor can share the large subformulas it builds level after
//! level without copying them.

mod normal;
mod sexpr;
mod signature;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{fmt_q, Q};

pub use normal::{
    alpha_eq, alpha_normalize, is_prenex_nnf, quantifier_count, to_nnf, to_prenex_nnf,
};
pub use sexpr::{parse_formula, parse_term, ParseContext};
pub use signature::{FunctionDecl, RelationDecl, Signature};
pub use subst::{substitute, substitute_term, Binding};

/// Interned-ish name for sorts, variables and symbols.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// A sorted variable; two variables are the same iff name and sort agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub sort: Name,
}

impl Var {
    pub fn new(name: &str, sort: &str) -> Self {
        Var {
            name: Arc::from(name),
            sort: Arc::from(sort),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    /// Rational literal in coefficient-normal form.
    Num(Q),
    App(Name, Arc<[Term]>),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn num(q: Q) -> Term {
        Term::Num(q)
    }

    pub fn int(n: i64) -> Term {
        Term::Num(crate::poly::qi(n))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(name(f), args.into())
    }

    pub fn add(args: Vec<Term>) -> Term {
        Term::app("+", args)
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::app("-", vec![a, b])
    }

    pub fn mul(args: Vec<Term>) -> Term {
        Term::app("*", args)
    }

    pub fn vars_into(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Num(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Num(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// The sort determined by the variables of the term, if any.
    pub fn inferred_sort(&self) -> Option<Name> {
        match self {
            Term::Var(v) => Some(v.sort.clone()),
            Term::Num(_) => None,
            Term::App(_, args) => args.iter().find_map(|a| a.inferred_sort()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Num(q) => f.write_str(&fmt_q(q)),
            Term::App(g, args) => {
                write!(f, "({g}")?;
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Rel(Name, Arc<[Term]>),
    Not(Arc<Formula>),
    And(Arc<[Formula]>),
    Or(Arc<[Formula]>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Exists(Var, Arc<Formula>),
    Forall(Var, Arc<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn rel(r: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(name(r), args.into())
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::rel("<", vec![a, b])
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Rel(..))
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(g) => g.is_atom(),
            f => f.is_atom(),
        }
    }

    /// Negation with double-negation and constant absorption.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => (*g).clone(),
            g => Formula::Not(Arc::new(g)),
        }
    }

    /// Conjunction with flattening and True/False absorption.
    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(gs) => out.extend(gs.iter().cloned()),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out.into()),
        }
    }

    /// Disjunction with flattening and True/False absorption.
    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(gs) => out.extend(gs.iter().cloned()),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out.into()),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, b) => b,
            (a, Formula::False) => Formula::not(a),
            (a, b) => Formula::Implies(Arc::new(a), Arc::new(b)),
        }
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, g) | (g, Formula::True) => g,
            (Formula::False, g) | (g, Formula::False) => Formula::not(g),
            (a, b) => Formula::Iff(Arc::new(a), Arc::new(b)),
        }
    }

    /// `b` as a formula constant.
    pub fn constant(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Arc::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Arc::new(body))
    }

    pub fn exists_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall_all(vars: impl IntoIterator<Item = Var>, body: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v, acc))
    }

    /// Variables with a free occurrence.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        free_vars_into(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_quantifiers(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => true,
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => false,
            Formula::Not(g) => g.has_quantifiers(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| g.has_quantifiers()),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.has_quantifiers() || b.has_quantifiers()
            }
        }
    }

    /// Number of nodes; used for reporting and caps.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => 1,
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.size(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(|g| g.size()).sum::<usize>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Calls `f` on every atom (Eq/Rel) of the formula.
    pub fn for_each_atom(&self, f: &mut dyn FnMut(&Formula)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(..) | Formula::Rel(..) => f(self),
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.for_each_atom(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.for_each_atom(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }
}

fn free_vars_into(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    let add_term = |t: &Term, bound: &Vec<Var>, out: &mut BTreeSet<Var>| {
        for v in t.vars() {
            if !bound.contains(&v) {
                out.insert(v);
            }
        }
    };
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(a, b) => {
            add_term(a, bound, out);
            add_term(b, bound, out);
        }
        Formula::Rel(_, args) => args.iter().for_each(|a| add_term(a, bound, out)),
        Formula::Not(g) => free_vars_into(g, bound, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| free_vars_into(g, bound, out)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            free_vars_into(a, bound, out);
            free_vars_into(b, bound, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            bound.push(v.clone());
            free_vars_into(g, bound, out);
            bound.pop();
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Rel(r, args) => {
                write!(f, "({r}")?;
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) | Formula::Or(gs) => {
                let op = if matches!(self, Formula::And(_)) {
                    "and"
                } else {
                    "or"
                };
                write!(f, "({op}")?;
                for g in gs.iter() {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            Formula::Implies(a, b) => write!(f, "(=> {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(<=> {a} {b})"),
            Formula::Exists(v, g) => write!(f, "(exists ({} {}) {g})", v.name, v.sort),
            Formula::Forall(v, g) => write!(f, "(forall ({} {}) {g})", v.name, v.sort),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Var {
        Var::new(n, "R")
    }

    #[test]
    fn free_vars_examples() {
        let f = Formula::exists(v("x"), Formula::eq(Term::var(&v("x")), Term::var(&v("y"))));
        assert_eq!(f.free_vars(), [v("y")].into_iter().collect());
        assert!(Formula::True.free_vars().is_empty());
        let g = Formula::and([
            Formula::eq(Term::var(&v("x")), Term::int(0)),
            Formula::lt(Term::var(&v("y")), Term::var(&v("z"))),
        ]);
        assert_eq!(
            g.free_vars(),
            [v("x"), v("y"), v("z")].into_iter().collect()
        );
    }

    #[test]
    fn structural_simplification() {
        let a = Formula::eq(Term::var(&v("x")), Term::int(0));
        assert_eq!(Formula::and([Formula::True, a.clone()]), a);
        assert_eq!(Formula::and([Formula::False, a.clone()]), Formula::False);
        assert_eq!(Formula::or([Formula::True, a.clone()]), Formula::True);
        assert_eq!(
            Formula::iff(a.clone(), Formula::False),
            Formula::not(a.clone())
        );
        assert_eq!(Formula::implies(Formula::True, a.clone()), a);
        assert_eq!(Formula::and([]), Formula::True);
        assert_eq!(Formula::or([]), Formula::False);
        let nested = Formula::and([Formula::and([a.clone(), a.clone()]), a.clone()]);
        assert!(matches!(nested, Formula::And(ref gs) if gs.len() == 3));
    }
}
