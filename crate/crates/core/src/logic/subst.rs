use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Formula, LogicError, Term, Var};

pub type Binding = BTreeMap<Var, Term>;

pub fn substitute_term(t: &Term, binding: &Binding) -> Term {
    match t {
        Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Num(_) => t.clone(),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| substitute_term(a, binding))
                .collect::<Vec<_>>()
                .into(),
        ),
    }
}

/// Capture-avoiding simultaneous substitution.
///
/// Fails when a replacement term's sort (as determined by its variables)
/// differs from the sort of the variable it replaces.
pub fn substitute(f: &Formula, binding: &Binding) -> Result<Formula, LogicError> {
    for (v, t) in binding {
        if let Some(s) = t.inferred_sort() {
            if s != v.sort {
                return Err(LogicError::Sort(format!(
                    "cannot substitute a term of sort {s} for {}:{}",
                    v.name, v.sort
                )));
            }
        }
    }
    Ok(subst_rec(f, binding))
}

fn subst_rec(f: &Formula, binding: &Binding) -> Formula {
    if binding.is_empty() {
        return f.clone();
    }
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::Eq(substitute_term(a, binding), substitute_term(b, binding)),
        Formula::Rel(r, args) => Formula::Rel(
            r.clone(),
            args.iter()
                .map(|a| substitute_term(a, binding))
                .collect::<Vec<_>>()
                .into(),
        ),
        Formula::Not(g) => Formula::Not(Arc::new(subst_rec(g, binding))),
        Formula::And(gs) => Formula::And(
            gs.iter()
                .map(|g| subst_rec(g, binding))
                .collect::<Vec<_>>()
                .into(),
        ),
        Formula::Or(gs) => Formula::Or(
            gs.iter()
                .map(|g| subst_rec(g, binding))
                .collect::<Vec<_>>()
                .into(),
        ),
        Formula::Implies(a, b) => Formula::Implies(
            Arc::new(subst_rec(a, binding)),
            Arc::new(subst_rec(b, binding)),
        ),
        Formula::Iff(a, b) => Formula::Iff(
            Arc::new(subst_rec(a, binding)),
            Arc::new(subst_rec(b, binding)),
        ),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let is_exists = matches!(f, Formula::Exists(..));
            let mut inner: Binding = binding.clone();
            inner.remove(v);
            let body_free = g.free_vars();
            inner.retain(|k, _| body_free.contains(k));
            // Rename the binder when a replacement would be captured.
            let captured = inner.values().any(|t| t.contains_var(v));
            let (v2, body) = if captured {
                let mut avoid: BTreeSet<Arc<str>> =
                    body_free.iter().map(|w| w.name.clone()).collect();
                for t in inner.values() {
                    avoid.extend(t.vars().into_iter().map(|w| w.name));
                }
                let fresh = fresh_name(&v.name, &avoid);
                let nv = Var {
                    name: fresh,
                    sort: v.sort.clone(),
                };
                let mut inner2 = inner.clone();
                inner2.insert(v.clone(), Term::Var(nv.clone()));
                (nv, subst_rec(g, &inner2))
            } else {
                (v.clone(), subst_rec(g, &inner))
            };
            if is_exists {
                Formula::Exists(v2, Arc::new(body))
            } else {
                Formula::Forall(v2, Arc::new(body))
            }
        }
    }
}

/// Appends primes until the name is unused.
pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<Arc<str>>) -> Arc<str> {
    let mut s = format!("{base}'");
    while avoid.contains(s.as_str()) {
        s.push('\'');
    }
    Arc::from(s.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, ParseContext};

    fn p(s: &str) -> Formula {
        parse_formula(s, &ParseContext::with_default_sort("R")).unwrap()
    }

    fn r(n: &str) -> Var {
        Var::new(n, "R")
    }

    #[test]
    fn substitutes_free_occurrence() {
        let b: Binding = [(r("x"), Term::int(0))].into_iter().collect();
        assert_eq!(
            substitute(&p("(< x y)"), &b).unwrap().to_string(),
            "(< 0 y)"
        );
    }

    #[test]
    fn avoids_capture() {
        let b: Binding = [(r("y"), Term::var(&r("x")))].into_iter().collect();
        let out = substitute(&p("(exists (x R) (< x y))"), &b).unwrap();
        assert_eq!(out.to_string(), "(exists (x' R) (< x' x))");
    }

    #[test]
    fn constants_untouched() {
        let b: Binding = [(r("y"), Term::int(3))].into_iter().collect();
        assert_eq!(substitute(&Formula::True, &b).unwrap(), Formula::True);
    }

    #[test]
    fn rejects_sort_mismatch() {
        let b: Binding = [(r("y"), Term::var(&Var::new("z", "K")))]
            .into_iter()
            .collect();
        assert!(matches!(
            substitute(&p("(< x y)"), &b),
            Err(LogicError::Sort(_))
        ));
    }
}
