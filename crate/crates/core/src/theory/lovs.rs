use num_traits::{Signed, Zero};

use super::arith::{poly_to_term, term_to_poly, VPoly};
use super::{SortTheory, TheoryError};
use crate::logic::{Formula, Name, Signature, Term, Var};
use crate::poly::{Monomial, Q};

#[derive(Debug)]
pub(crate) struct Lovs {
    pub sort: Name,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
}

fn frag(atom: &Formula, reason: &str) -> TheoryError {
    TheoryError::Fragment {
        theory: "lovs".into(),
        atom: atom.to_string(),
        reason: reason.into(),
    }
}

/// `(is_eq, lhs - rhs)` of a linear atom.
fn linear(atom: &Formula) -> Result<(bool, VPoly), TheoryError> {
    let (eq, a, b) = match atom {
        Formula::Eq(a, b) => (true, a, b),
        Formula::Rel(r, args) if &**r == "<" && args.len() == 2 => (false, &args[0], &args[1]),
        _ => return Err(frag(atom, "only = and < are available")),
    };
    let conv = |t: &Term| {
        term_to_poly(t).map_err(|s| frag(atom, &format!("symbol `{s}` is not linear arithmetic")))
    };
    let p = conv(a)?.sub(&conv(b)?);
    if p.total_degree() > 1 {
        return Err(frag(atom, "nonlinear term"));
    }
    Ok((eq, p))
}

fn coeff_of(p: &VPoly, x: &Var) -> Q {
    p.coeff(&Monomial::var(x.clone(), 1))
}

/// `p` with the `x` term removed.
fn without(p: &VPoly, x: &Var) -> VPoly {
    p.filter_terms(|m, _| m.degree_in(x) == 0)
}

impl Lovs {
    /// Atom or constant for `p rel 0`.
    fn atom(&self, rel: Rel, p: &VPoly) -> Formula {
        if let Some(c) = p.as_constant() {
            return Formula::constant(match rel {
                Rel::Lt => c.is_negative(),
                Rel::Le => !c.is_positive(),
                Rel::Eq => c.is_zero(),
                Rel::Ne => !c.is_zero(),
            });
        }
        let zero = Term::int(0);
        match rel {
            Rel::Lt => Formula::lt(poly_to_term(&p.primitive_positive()), zero),
            Rel::Eq => Formula::Eq(poly_to_term(&p.primitive()), zero),
            Rel::Le => Formula::or([self.atom(Rel::Lt, p), self.atom(Rel::Eq, p)]),
            Rel::Ne => Formula::not(self.atom(Rel::Eq, p)),
        }
    }

    fn constraint(&self, l: &Formula) -> Result<(Rel, VPoly), TheoryError> {
        Ok(match l {
            Formula::Not(a) => match linear(a)? {
                (true, p) => (Rel::Ne, p),
                (false, p) => (Rel::Le, p.neg()),
            },
            a => match linear(a)? {
                (true, p) => (Rel::Eq, p),
                (false, p) => (Rel::Lt, p),
            },
        })
    }

    fn elim(&self, x: &Var, cs: &[(Rel, VPoly)]) -> Formula {
        // x ≠ t splits into x < t or x > t.
        if let Some(i) = cs.iter().position(|(r, _)| *r == Rel::Ne) {
            let p = &cs[i].1;
            let branch = |q: VPoly| {
                let mut next: Vec<(Rel, VPoly)> = cs.to_vec();
                next[i] = (Rel::Lt, q);
                self.elim(x, &next)
            };
            return Formula::or([branch(p.clone()), branch(p.neg())]);
        }
        if let Some(i) = cs
            .iter()
            .position(|(r, p)| *r == Rel::Eq && !coeff_of(p, x).is_zero())
        {
            // a·x + r = 0  ⇒  x = −r/a
            let p = &cs[i].1;
            let a = coeff_of(p, x);
            let value = without(p, x).scale(&(-Q::from_integer(1.into()) / a));
            let out = cs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, (rel, q))| self.atom(*rel, &q.substitute(x, &value)));
            return Formula::and(out.collect::<Vec<_>>());
        }
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut out = Vec::new();
        for (rel, p) in cs {
            let a = coeff_of(p, x);
            if a.is_zero() {
                out.push(self.atom(*rel, p));
            } else if a.is_positive() {
                upper.push((*rel, a, without(p, x)));
            } else {
                lower.push((*rel, a, without(p, x)));
            }
        }
        for (rl, al, pl) in &lower {
            for (ru, au, pu) in &upper {
                // au·pl − al·pu ⋈ 0
                let comb = pl.scale(au).sub(&pu.scale(al));
                let rel = if *rl == Rel::Le && *ru == Rel::Le {
                    Rel::Le
                } else {
                    Rel::Lt
                };
                out.push(self.atom(rel, &comb));
            }
        }
        Formula::and(out)
    }
}

impl SortTheory for Lovs {
    fn kind(&self) -> &'static str {
        "lovs"
    }

    fn sort(&self) -> &Name {
        &self.sort
    }

    fn signature(&self) -> Signature {
        Signature::ring(&self.sort, true, 0)
    }

    fn validate_atom(&self, atom: &Formula) -> Result<(), TheoryError> {
        linear(atom).map(|_| ())
    }

    fn normalize_atom(&self, atom: &Formula) -> Result<Formula, TheoryError> {
        let (eq, p) = linear(atom)?;
        Ok(self.atom(if eq { Rel::Eq } else { Rel::Lt }, &p))
    }

    fn eliminate(&self, x: &Var, lits: &[Formula]) -> Result<Formula, TheoryError> {
        let cs = lits
            .iter()
            .map(|l| self.constraint(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.elim(x, &cs))
    }

    fn method(&self) -> &'static str {
        "fourier-motzkin"
    }
}
