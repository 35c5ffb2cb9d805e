use num_traits::Zero;

use super::arith::{poly_to_term, term_to_poly, VPoly};
use super::{SortTheory, TheoryError};
use crate::logic::{Formula, Name, Signature, Term, Var};
use crate::poly::{Monomial, Q};

#[derive(Debug)]
pub(crate) struct Acf {
    pub sort: Name,
    pub max_degree: u32,
}

fn frag(atom: &Formula, reason: &str) -> TheoryError {
    TheoryError::Fragment {
        theory: "acf".into(),
        atom: atom.to_string(),
        reason: reason.into(),
    }
}

fn poly_of(atom: &Formula) -> Result<VPoly, TheoryError> {
    match atom {
        Formula::Eq(a, b) => {
            let conv = |t: &Term| {
                term_to_poly(t)
                    .map_err(|s| frag(atom, &format!("symbol `{s}` is not a ring operation")))
            };
            Ok(conv(a)?.sub(&conv(b)?))
        }
        _ => Err(frag(
            atom,
            "the field language has no order; only equations",
        )),
    }
}

/// Atom (or constant) for `p = 0`.
fn eq0(p: &VPoly) -> Formula {
    match p.as_constant() {
        Some(c) => Formula::constant(c.is_zero()),
        None => Formula::Eq(poly_to_term(&p.primitive()), Term::int(0)),
    }
}

fn ne0(p: &VPoly) -> Formula {
    Formula::not(eq0(p))
}

/// Case assumptions accumulated along one branch, kept primitive.
#[derive(Clone, Default)]
struct Assume {
    zero: Vec<VPoly>,
    nonzero: Vec<VPoly>,
}

impl Acf {
    /// `∃x (⋀ eqs = 0 ∧ q ≠ 0)` by case splits on leading coefficients.
    fn solve(&self, x: &Var, eqs: Vec<VPoly>, q: &VPoly, asm: &Assume) -> Formula {
        let mut cond = Vec::new();
        let mut eqs_x: Vec<VPoly> = Vec::new();
        for p in eqs {
            if p.is_zero() {
                continue;
            }
            if p.degree_in(x) == 0 {
                cond.push(eq0(&p));
            } else if !eqs_x.contains(&p) {
                eqs_x.push(p);
            }
        }
        let cond = Formula::and(cond);
        if cond == Formula::False {
            return Formula::False;
        }
        if eqs_x.is_empty() {
            // Infinite field: q ≠ 0 somewhere iff q is not the zero polynomial in x.
            let r = Formula::or(q.coeffs_in(x).iter().map(ne0).collect::<Vec<_>>());
            return Formula::and([cond, r]);
        }
        let i = (0..eqs_x.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&eqs_x[a], &eqs_x[b]);
                pa.degree_in(x)
                    .cmp(&pb.degree_in(x))
                    .then(pa.num_terms().cmp(&pb.num_terms()))
                    .then(pa.cmp(pb))
            })
            .expect("nonempty");
        let p = eqs_x[i].clone();
        let lc = p.leading_coeff_in(x);
        let lc_key = lc.primitive();
        let known_nonzero = lc.is_constant() || asm.nonzero.contains(&lc_key);
        let known_zero = asm.zero.contains(&lc_key);

        let mut branches = Vec::new();
        if !known_nonzero {
            // lc = 0: drop the leading term of p.
            let d = p.degree_in(x);
            let tail = p.sub(&lc.mul(&VPoly::term(
                Monomial::var(x.clone(), d),
                Q::from_integer(1.into()),
            )));
            let mut next = eqs_x.clone();
            next[i] = tail;
            let mut a2 = asm.clone();
            a2.zero.push(lc_key.clone());
            branches.push(Formula::and([eq0(&lc), self.solve(x, next, q, &a2)]));
        }
        if !known_zero {
            let mut a2 = asm.clone();
            if !lc.is_constant() {
                a2.nonzero.push(lc_key.clone());
            }
            let body = if eqs_x.len() == 1 {
                if q.is_constant() {
                    Formula::True
                } else {
                    let d = p.degree_in(x);
                    let (r, _, _) = q.pow(d).prem(&p, x);
                    Formula::or(r.coeffs_in(x).iter().map(ne0).collect::<Vec<_>>())
                }
            } else {
                let mut next = vec![p.clone()];
                for (j, o) in eqs_x.iter().enumerate() {
                    if j != i {
                        next.push(o.prem(&p, x).0.primitive());
                    }
                }
                self.solve(x, next, q, &a2)
            };
            let guard = if lc.is_constant() {
                Formula::True
            } else {
                ne0(&lc)
            };
            branches.push(Formula::and([guard, body]));
        }
        Formula::and([cond, Formula::or(branches)])
    }
}

impl SortTheory for Acf {
    fn kind(&self) -> &'static str {
        "acf"
    }

    fn sort(&self) -> &Name {
        &self.sort
    }

    fn signature(&self) -> Signature {
        Signature::ring(&self.sort, false, 0)
    }

    fn validate_atom(&self, atom: &Formula) -> Result<(), TheoryError> {
        let p = poly_of(atom)?;
        let d = p.total_degree();
        if d > self.max_degree {
            return Err(TheoryError::DegreeOverflow {
                atom: atom.to_string(),
                degree: d,
                cap: self.max_degree,
            });
        }
        Ok(())
    }

    fn normalize_atom(&self, atom: &Formula) -> Result<Formula, TheoryError> {
        Ok(eq0(&poly_of(atom)?))
    }

    fn eliminate(&self, x: &Var, lits: &[Formula]) -> Result<Formula, TheoryError> {
        let mut eqs = Vec::new();
        let mut q = VPoly::from_int(1);
        for l in lits {
            match l {
                Formula::Not(a) => q = q.mul(&poly_of(a)?),
                a => eqs.push(poly_of(a)?),
            }
        }
        Ok(self.solve(x, eqs, &q, &Assume::default()))
    }

    fn method(&self) -> &'static str {
        "lc-split"
    }
}

#[cfg(test)]
mod tests {
    use crate::logic::{parse_formula, Formula, ParseContext, Var};
    use crate::poly::qi;
    use crate::theory::{Assignment, Theory, TheoryError};

    fn p(s: &str) -> Formula {
        parse_formula(s, &ParseContext::with_default_sort("K")).unwrap()
    }

    #[test]
    fn linear_equation() {
        let t = Theory::acf();
        let r = t.qe(&p("(exists (x K) (= (+ (* a x) b) 0))")).unwrap();
        let expected = p("(or (not (= a 0)) (= b 0))");
        for (a, b) in [(0, 0), (0, 1), (2, 0), (3, 5)] {
            let asg: Assignment = [(Var::new("a", "K"), qi(a)), (Var::new("b", "K"), qi(b))]
                .into_iter()
                .collect();
            assert_eq!(
                t.model_eval(&r.formula, &asg).unwrap(),
                t.model_eval(&expected, &asg).unwrap()
            );
        }
    }

    #[test]
    fn algebraically_closed() {
        let t = Theory::acf();
        assert!(t
            .decide(&p("(forall (a K) (exists (x K) (= (* x x) a)))"))
            .unwrap());
        assert!(t.decide(&p("(exists (x K) (= (+ (* x x) 1) 0))")).unwrap());
        assert!(!t
            .decide(&p("(exists (x K) (and (= (* x x) 0) (not (= x 0))))"))
            .unwrap());
    }

    #[test]
    fn square_root_other_than_itself() {
        let t = Theory::acf();
        let f = p("(exists (y K) (and (= (* y y) x1) (not (= y x1))))");
        let a: Assignment = [(Var::new("x1", "K"), qi(1))].into_iter().collect();
        assert!(t.model_eval(&f, &a).unwrap());
        let z: Assignment = [(Var::new("x1", "K"), qi(0))].into_iter().collect();
        assert!(!t.model_eval(&f, &z).unwrap());
    }

    #[test]
    fn degree_cap_and_order_rejected() {
        let t = Theory::acf_on("K", 2);
        assert!(matches!(
            t.qe(&p("(exists (x K) (= (* x x x) 1))")),
            Err(TheoryError::DegreeOverflow { .. })
        ));
        assert!(matches!(
            t.qe(&p("(exists (x K) (< x 1))")),
            Err(TheoryError::Fragment { .. })
        ));
        assert!(matches!(
            t.qe(&p("(exists (x K) (= (d1 x) 1))")),
            Err(TheoryError::Fragment { .. })
        ));
    }
}
