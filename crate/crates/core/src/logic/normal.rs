//! Negation normal form, prenex form and α-normalization.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::subst::fresh_name;
use super::{substitute, Binding, Formula, Term, Var};

/// Removes `=>`/`<=>` and pushes negations down to atoms.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    match f {
        Formula::True => Formula::constant(!neg),
        Formula::False => Formula::constant(neg),
        Formula::Eq(..) | Formula::Rel(..) => {
            if neg {
                Formula::Not(Arc::new(f.clone()))
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => nnf(g, !neg),
        Formula::And(gs) => {
            let parts = gs.iter().map(|g| nnf(g, neg));
            if neg {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Or(gs) => {
            let parts = gs.iter().map(|g| nnf(g, neg));
            if neg {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Implies(a, b) => {
            if neg {
                Formula::and([nnf(a, false), nnf(b, true)])
            } else {
                Formula::or([nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            // a <=> b  ==  (a & b) | (~a & ~b);  ~(a <=> b) == (a & ~b) | (~a & b)
            if neg {
                Formula::or([
                    Formula::and([nnf(a, false), nnf(b, true)]),
                    Formula::and([nnf(a, true), nnf(b, false)]),
                ])
            } else {
                Formula::or([
                    Formula::and([nnf(a, false), nnf(b, false)]),
                    Formula::and([nnf(a, true), nnf(b, true)]),
                ])
            }
        }
        Formula::Exists(v, g) => {
            if neg {
                Formula::forall(v.clone(), nnf(g, true))
            } else {
                Formula::exists(v.clone(), nnf(g, false))
            }
        }
        Formula::Forall(v, g) => {
            if neg {
                Formula::exists(v.clone(), nnf(g, true))
            } else {
                Formula::forall(v.clone(), nnf(g, false))
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Quant {
    Exists,
    Forall,
}

/// Prenex negation normal form.
///
/// Bound variables are renamed apart only where they clash with a free
/// variable or with another binder, so prenex input comes back unchanged.
/// Quantifiers under `<=>` are duplicated by the expansion of the
/// biconditional; every other connective preserves the quantifier count.
pub fn to_prenex_nnf(f: &Formula) -> Formula {
    let n = to_nnf(f);
    let mut used: BTreeSet<Arc<str>> = n.free_vars().into_iter().map(|v| v.name).collect();
    let renamed = rename_apart(&n, &mut used);
    let mut prefix = Vec::new();
    let matrix = pull(&renamed, &mut prefix);
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, (q, v)| match q {
            Quant::Exists => Formula::exists(v, acc),
            Quant::Forall => Formula::forall(v, acc),
        })
}

fn rename_apart(f: &Formula, used: &mut BTreeSet<Arc<str>>) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => f.clone(),
        Formula::Not(g) => Formula::Not(Arc::new(rename_apart(g, used))),
        Formula::And(gs) => {
            Formula::and(gs.iter().map(|g| rename_apart(g, used)).collect::<Vec<_>>())
        }
        Formula::Or(gs) => {
            Formula::or(gs.iter().map(|g| rename_apart(g, used)).collect::<Vec<_>>())
        }
        Formula::Implies(a, b) => Formula::Implies(
            Arc::new(rename_apart(a, used)),
            Arc::new(rename_apart(b, used)),
        ),
        Formula::Iff(a, b) => Formula::Iff(
            Arc::new(rename_apart(a, used)),
            Arc::new(rename_apart(b, used)),
        ),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let (nv, body) = if used.contains(&v.name) {
                let fresh = fresh_name(&v.name, used);
                let nv = Var {
                    name: fresh,
                    sort: v.sort.clone(),
                };
                let b: Binding = [(v.clone(), Term::Var(nv.clone()))].into_iter().collect();
                (nv, substitute(g, &b).expect("same sort"))
            } else {
                (v.clone(), (**g).clone())
            };
            used.insert(nv.name.clone());
            let body = rename_apart(&body, used);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(nv, body)
            } else {
                Formula::forall(nv, body)
            }
        }
    }
}

fn pull(f: &Formula, prefix: &mut Vec<(Quant, Var)>) -> Formula {
    match f {
        Formula::Exists(v, g) => {
            prefix.push((Quant::Exists, v.clone()));
            pull(g, prefix)
        }
        Formula::Forall(v, g) => {
            prefix.push((Quant::Forall, v.clone()));
            pull(g, prefix)
        }
        Formula::And(gs) => Formula::and(gs.iter().map(|g| pull(g, prefix)).collect::<Vec<_>>()),
        Formula::Or(gs) => Formula::or(gs.iter().map(|g| pull(g, prefix)).collect::<Vec<_>>()),
        // NNF input: negations only sit on atoms.
        _ => f.clone(),
    }
}

pub fn quantifier_count(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => 0,
        Formula::Not(g) => quantifier_count(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(quantifier_count).sum(),
        Formula::Implies(a, b) | Formula::Iff(a, b) => quantifier_count(a) + quantifier_count(b),
        Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + quantifier_count(g),
    }
}

/// Prenex with an NNF matrix: no `=>`/`<=>`, negation only on atoms.
pub fn is_prenex_nnf(f: &Formula) -> bool {
    let mut g = f;
    while let Formula::Exists(_, b) | Formula::Forall(_, b) = g {
        g = b;
    }
    fn matrix_ok(f: &Formula) -> bool {
        match f {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::Not(g) => g.is_atom(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().all(matrix_ok),
            _ => false,
        }
    }
    matrix_ok(g)
}

/// Renames bound variables by binder depth (de Bruijn style): the binder at
/// depth `k` becomes `%k`. Two formulas are α-equivalent iff their
/// normalizations are equal.
pub fn alpha_normalize(f: &Formula) -> Formula {
    norm(f, 0)
}

fn norm(f: &Formula, depth: usize) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => f.clone(),
        Formula::Not(g) => Formula::Not(Arc::new(norm(g, depth))),
        Formula::And(gs) => {
            Formula::And(gs.iter().map(|g| norm(g, depth)).collect::<Vec<_>>().into())
        }
        Formula::Or(gs) => {
            Formula::Or(gs.iter().map(|g| norm(g, depth)).collect::<Vec<_>>().into())
        }
        Formula::Implies(a, b) => {
            Formula::Implies(Arc::new(norm(a, depth)), Arc::new(norm(b, depth)))
        }
        Formula::Iff(a, b) => Formula::Iff(Arc::new(norm(a, depth)), Arc::new(norm(b, depth))),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let nv = Var {
                name: Arc::from(format!("%{depth}").as_str()),
                sort: v.sort.clone(),
            };
            // `%k` names never clash with user names, so plain substitution is safe.
            let b: Binding = [(v.clone(), Term::Var(nv.clone()))].into_iter().collect();
            let body = norm(&substitute(g, &b).expect("same sort"), depth + 1);
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(nv, Arc::new(body))
            } else {
                Formula::Forall(nv, Arc::new(body))
            }
        }
    }
}

pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_normalize(a) == alpha_normalize(b)
}
