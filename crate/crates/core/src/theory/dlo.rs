use super::{SortTheory, TheoryError};
use crate::logic::{Formula, Name, Signature, Term, Var};

#[derive(Debug)]
pub(crate) struct Dlo {
    pub sort: Name,
}

fn frag(atom: &Formula, reason: &str) -> TheoryError {
    TheoryError::Fragment {
        theory: "dlo".into(),
        atom: atom.to_string(),
        reason: reason.into(),
    }
}

/// Splits an atom into (is_eq, lhs, rhs) after checking its shape.
fn parts(atom: &Formula) -> Result<(bool, &Term, &Term), TheoryError> {
    let (eq, a, b) = match atom {
        Formula::Eq(a, b) => (true, a, b),
        Formula::Rel(r, args) if &**r == "<" && args.len() == 2 => (false, &args[0], &args[1]),
        _ => return Err(frag(atom, "only = and < are available")),
    };
    for t in [a, b] {
        if matches!(t, Term::App(..)) {
            return Err(frag(atom, "no function symbols in the order language"));
        }
    }
    Ok((eq, a, b))
}

fn subst(t: &Term, x: &Var, by: &Term) -> Term {
    match t {
        Term::Var(v) if v == x => by.clone(),
        _ => t.clone(),
    }
}

impl Dlo {
    fn eq(&self, a: Term, b: Term) -> Formula {
        self.normalize_atom(&Formula::Eq(a, b)).expect("order atom")
    }

    fn lt(&self, a: Term, b: Term) -> Formula {
        self.normalize_atom(&Formula::lt(a, b)).expect("order atom")
    }
}

impl SortTheory for Dlo {
    fn kind(&self) -> &'static str {
        "dlo"
    }

    fn sort(&self) -> &Name {
        &self.sort
    }

    fn signature(&self) -> Signature {
        Signature::order(&self.sort)
    }

    fn validate_atom(&self, atom: &Formula) -> Result<(), TheoryError> {
        parts(atom).map(|_| ())
    }

    fn normalize_atom(&self, atom: &Formula) -> Result<Formula, TheoryError> {
        let (eq, a, b) = parts(atom)?;
        if let (Term::Num(p), Term::Num(q)) = (a, b) {
            return Ok(Formula::constant(if eq { p == q } else { p < q }));
        }
        if a == b {
            return Ok(Formula::constant(eq));
        }
        Ok(if eq {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            Formula::Eq(a.clone(), b.clone())
        } else {
            Formula::lt(a.clone(), b.clone())
        })
    }

    fn eliminate(&self, x: &Var, lits: &[Formula]) -> Result<Formula, TheoryError> {
        // Negated atoms become disjunctions of positive ones.
        if let Some(i) = lits.iter().position(|l| matches!(l, Formula::Not(_))) {
            let Formula::Not(atom) = &lits[i] else {
                unreachable!()
            };
            let (eq, a, b) = parts(atom)?;
            let alternatives = if eq {
                vec![self.lt(a.clone(), b.clone()), self.lt(b.clone(), a.clone())]
            } else {
                vec![self.lt(b.clone(), a.clone()), self.eq(a.clone(), b.clone())]
            };
            let mut out = Vec::new();
            for alt in alternatives {
                if alt == Formula::False {
                    continue;
                }
                let mut rest: Vec<Formula> = lits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, l)| l.clone())
                    .collect();
                if alt != Formula::True {
                    rest.push(alt);
                }
                // Conjuncts without x stay outside.
                let (with, without): (Vec<_>, Vec<_>) = rest
                    .into_iter()
                    .partition(|l| super::driver::lit_vars(l).contains(x));
                let inner = if with.is_empty() {
                    Formula::True
                } else {
                    self.eliminate(x, &with)?
                };
                out.push(Formula::and(without.into_iter().chain([inner])));
            }
            return Ok(Formula::or(out));
        }
        let xt = Term::Var(x.clone());
        // An equation x = t lets us substitute.
        for (i, l) in lits.iter().enumerate() {
            if let Formula::Eq(a, b) = l {
                let t = if *a == xt { b } else { a };
                let mut out = Vec::new();
                for (j, m) in lits.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let (eq, p, q) = parts(m)?;
                    let (p, q) = (subst(p, x, t), subst(q, x, t));
                    out.push(if eq { self.eq(p, q) } else { self.lt(p, q) });
                }
                return Ok(Formula::and(out));
            }
        }
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for l in lits {
            let (_, a, b) = parts(l)?;
            if *a == xt {
                upper.push(b.clone());
            } else {
                lower.push(a.clone());
            }
        }
        let mut out = Vec::new();
        for lo in &lower {
            for up in &upper {
                out.push(self.lt(lo.clone(), up.clone()));
            }
        }
        Ok(Formula::and(out))
    }

    fn method(&self) -> &'static str {
        "dlo-bounds"
    }
}
