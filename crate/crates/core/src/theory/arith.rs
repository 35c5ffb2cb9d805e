//! Conversion between arithmetic terms and polynomials.

use crate::logic::{Term, Var};
use crate::poly::{Monomial, Poly, Q};

pub type VPoly = Poly<Var, Q>;

/// Reads `+ - *`, numerals and variables into a polynomial. Any other
/// symbol is reported back by name.
pub fn term_to_poly(t: &Term) -> Result<VPoly, String> {
    match t {
        Term::Var(v) => Ok(VPoly::var(v.clone())),
        Term::Num(q) => Ok(VPoly::from_q(q.clone())),
        Term::App(f, args) => {
            let ps = args
                .iter()
                .map(term_to_poly)
                .collect::<Result<Vec<_>, _>>()?;
            match (&**f, ps.len()) {
                ("+", _) => Ok(ps.iter().fold(VPoly::zero(), |a, b| a.add(b))),
                ("*", _) => Ok(ps.iter().fold(VPoly::from_int(1), |a, b| a.mul(b))),
                ("-", 1) => Ok(ps[0].neg()),
                ("-", 2) => Ok(ps[0].sub(&ps[1])),
                _ => Err(f.to_string()),
            }
        }
    }
}

fn monomial_term(m: &Monomial<Var>, c: &Q) -> Term {
    let mut factors: Vec<Term> = Vec::new();
    for (v, e) in m.factors() {
        for _ in 0..*e {
            factors.push(Term::Var(v.clone()));
        }
    }
    if factors.is_empty() {
        return Term::Num(c.clone());
    }
    if *c != Q::from_integer(1.into()) {
        factors.insert(0, Term::Num(c.clone()));
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Term::mul(factors)
    }
}

/// Highest monomial first, constant last; `x^2` is written `(* x x)`.
pub fn poly_to_term(p: &VPoly) -> Term {
    let mut parts: Vec<Term> = p.terms().rev().map(|(m, c)| monomial_term(m, c)).collect();
    match parts.len() {
        0 => Term::int(0),
        1 => parts.pop().unwrap(),
        _ => Term::add(parts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_term, ParseContext};

    #[test]
    fn round_trips_through_poly() {
        let ctx = ParseContext::with_default_sort("R");
        let t = parse_term("(- (* 2 x (+ x y)) (- 3))", &ctx).unwrap();
        let p = term_to_poly(&t).unwrap();
        let back = poly_to_term(&p);
        assert_eq!(back.to_string(), "(+ (* 2 x x) (* 2 x y) 3)");
        assert_eq!(term_to_poly(&back).unwrap(), p);
    }

    #[test]
    fn rejects_unknown_symbol() {
        let ctx = ParseContext::with_default_sort("R");
        let t = parse_term("(d1 x)", &ctx).unwrap();
        assert_eq!(term_to_poly(&t), Err("d1".to_string()));
    }
}
