//! Sparse multivariate polynomials over an arbitrary coefficient ring.
//!
//! A single generic type backs every polynomial in the crate: parameter
//! polynomials in the ACF0 engine, differential polynomials (variables are
//! derivatives `θy_s`), symbolic coefficients (variables are derivatives of
//! parameters `θx_j`), and Δ-σ polynomials.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rationals.
pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

/// Commutative ring with unit containing the rationals.
pub trait Ring: Clone + Eq + Ord + Hash + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn from_q(q: &Q) -> Self;
    /// `Some(q)` when the element is a rational constant.
    fn as_q(&self) -> Option<Q>;

    fn is_one(&self) -> bool {
        self.as_q().is_some_and(|q| One::is_one(&q))
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn as_q(&self) -> Option<Q> {
        Some(self.clone())
    }
}

/// Variables that can be differentiated by the `i`-th derivation.
pub trait DiffVar: Clone + Ord + Hash + Debug + Send + Sync + 'static {
    fn derive(&self, i: usize) -> Self;
}

/// Rings with commuting derivations.
pub trait Differential: Ring {
    fn derive(&self, i: usize) -> Self;
}

impl Differential for Q {
    fn derive(&self, _i: usize) -> Self {
        Zero::zero()
    }
}

/// Power product, sorted by variable with positive exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial<V>(Vec<(V, u32)>);

impl<V: Ord + Clone> Monomial<V> {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: V, e: u32) -> Self {
        if e == 0 {
            Monomial(Vec::new())
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut map: BTreeMap<V, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(V, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: &V) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes every occurrence of `v`, returning the exponent it had.
    pub fn split_off(&self, v: &V) -> (u32, Self) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, k)| {
                if w == v {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Monomial(rest))
    }

    pub fn map_vars<W: Ord + Clone>(&self, f: impl Fn(&V) -> W) -> Monomial<W> {
        Monomial::from_pairs(self.0.iter().map(|(v, e)| (f(v), *e)))
    }
}

/// Sparse polynomial: map from monomials to non-zero coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Poly<V: Ord, C> {
    terms: BTreeMap<Monomial<V>, C>,
}

impl<V: Ord + Clone + Hash + Debug + Send + Sync + 'static, C: Ring> Poly<V, C> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn from_q(q: Q) -> Self {
        Self::constant(C::from_q(&q))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_q(qi(n))
    }

    pub fn var(v: V) -> Self {
        Self::term(Monomial::var(v, 1), C::one())
    }

    pub fn term(m: Monomial<V>, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial<V>, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial<V>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().plus(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial<V>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient when the polynomial has no variables.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn coeff(&self, m: &Monomial<V>) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn vars(&self) -> BTreeSet<V> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn degree_in(&self, v: &V) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.negate());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.negate()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.times(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(m, d)| (m.clone(), d.times(c))))
    }

    pub fn mul_monomial(&self, mono: &Monomial<V>) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(C::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Coefficients as a univariate polynomial in `v`, index = degree.
    pub fn coeffs_in(&self, v: &V) -> Vec<Self> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Self::zero(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: &V, coeffs: &[Self]) -> Self {
        let mut out = Self::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let x = Monomial::var(v.clone(), k as u32);
            for (m, a) in &c.terms {
                out.add_term(m.mul(&x), a.clone());
            }
        }
        out
    }

    pub fn leading_coeff_in(&self, v: &V) -> Self {
        self.coeffs_in(v).pop().unwrap_or_else(Self::zero)
    }

    /// Partial derivative with respect to the variable `v`.
    pub fn partial(&self, v: &V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e > 0 {
                let c = c.times(&C::from_q(&qi(e as i64)));
                out.add_term(rest.mul(&Monomial::var(v.clone(), e - 1)), c);
            }
        }
        out
    }

    /// Replaces `v` by `value`.
    pub fn substitute(&self, v: &V, value: &Self) -> Self {
        let coeffs = self.coeffs_in(v);
        // Horner
        let mut out = Self::zero();
        for c in coeffs.iter().rev() {
            out = out.mul(value).add(c);
        }
        out
    }

    /// Evaluates every variable; `assign` must be total on the occurring variables.
    pub fn eval<F: Fn(&V) -> C>(&self, assign: F) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let x = assign(v);
                for _ in 0..*e {
                    t = t.times(&x);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Poly<V, D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn map_vars<W: Ord + Clone + Hash + Debug + Send + Sync + 'static>(
        &self,
        f: impl Fn(&V) -> W,
    ) -> Poly<W, C> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// Keeps the terms selected by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial<V>, &C) -> bool) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Pseudo-remainder of `self` by `divisor` with respect to `v`.
    ///
    /// Returns `(r, q, k)` with `lc(divisor)^k * self = q * divisor + r` and
    /// `deg_v r < deg_v divisor`. `divisor` must have positive degree in `v`.
    pub fn prem(&self, divisor: &Self, v: &V) -> (Self, Self, u32) {
        let db = divisor.degree_in(v);
        assert!(
            db > 0,
            "pseudo-division by a polynomial free of the variable"
        );
        let lb = divisor.leading_coeff_in(v);
        let mut r = self.clone();
        let mut q = Self::zero();
        let mut k = 0;
        loop {
            let dr = r.degree_in(v);
            if r.is_zero() || dr < db {
                break;
            }
            let lr = r.leading_coeff_in(v);
            let shift = Self::term(Monomial::var(v.clone(), dr - db), C::one());
            let t = lr.mul(&shift);
            r = r.mul(&lb).sub(&t.mul(divisor));
            q = q.mul(&lb).add(&t);
            k += 1;
        }
        (r, q, k)
    }
}

impl<V: Ord + Clone + Hash + Debug + Send + Sync + 'static> Poly<V, Q> {
    /// Scales by a positive rational so the coefficients become coprime
    /// integers. Signs are kept, so `p < 0` keeps its meaning.
    pub fn primitive_positive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        self.scale(&Q::new(den, num))
    }

    /// Divides by the rational content and makes the first term (in
    /// monomial order, highest first) positive. Zero stays zero.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let (_, lead) = self.terms.iter().next_back().expect("nonzero");
        let mut factor = Q::new(den, num);
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }
}

impl<V: Ord + Clone + Hash + Debug + Send + Sync + 'static, C: Ring> Ring for Poly<V, C> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn from_q(q: &Q) -> Self {
        Poly::constant(C::from_q(q))
    }
    fn as_q(&self) -> Option<Q> {
        self.as_constant().and_then(|c| c.as_q())
    }
}

impl<V: DiffVar, C: Differential> Differential for Poly<V, C> {
    /// Leibniz rule on every term; coefficients are differentiated too.
    fn derive(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let dc = c.derive(i);
            if !dc.is_zero() {
                out.add_term(m.clone(), dc);
            }
            for (idx, (v, e)) in m.factors().iter().enumerate() {
                let mut pairs: Vec<(V, u32)> = m.factors().to_vec();
                pairs[idx].1 -= 1;
                pairs.push((v.derive(i), 1));
                let coeff = c.times(&C::from_q(&qi(*e as i64)));
                out.add_term(Monomial::from_pairs(pairs), coeff);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Poly<&'static str, Q>;

    fn x() -> P {
        P::var("x")
    }
    fn y() -> P {
        P::var("y")
    }

    #[test]
    fn ring_arithmetic() {
        let p = x().add(&y()).pow(2);
        let expect = x()
            .mul(&x())
            .add(&x().mul(&y()).scale(&qi(2)))
            .add(&y().mul(&y()));
        assert_eq!(p, expect);
        assert!(p.sub(&expect).is_zero());
        assert_eq!(p.degree_in(&"x"), 2);
        assert_eq!(p.total_degree(), 2);
    }

    #[test]
    fn prem_identity() {
        // a = x^3 + y x + 1, b = y x^2 - 1
        let a = x().pow(3).add(&y().mul(&x())).add(&P::from_int(1));
        let b = y().mul(&x().pow(2)).sub(&P::from_int(1));
        let (r, q, k) = a.prem(&b, &"x");
        let lb = b.leading_coeff_in(&"x");
        assert!(r.degree_in(&"x") < 2);
        assert_eq!(lb.pow(k).mul(&a), q.mul(&b).add(&r));
    }

    #[test]
    fn coeffs_roundtrip() {
        let p = x().pow(2).mul(&y()).add(&x().scale(&qi(3))).add(&y());
        let cs = p.coeffs_in(&"x");
        assert_eq!(cs.len(), 3);
        assert_eq!(P::from_coeffs_in(&"x", &cs), p);
    }

    #[test]
    fn substitute_and_eval() {
        let p = x().pow(2).sub(&y());
        let s = p.substitute(&"x", &y().add(&P::from_int(1)));
        let v = s.eval(|_| qi(2));
        assert_eq!(v, qi(7));
    }

    #[test]
    fn primitive_normalizes_content_and_sign() {
        let p = x().scale(&qf(-2, 3)).add(&P::from_q(qf(4, 3)));
        let n = p.primitive();
        assert_eq!(n, x().sub(&P::from_int(2)));
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_q("-3/6"), Some(qf(-1, 2)));
        assert_eq!(fmt_q(&qf(6, 3)), "2");
        assert_eq!(fmt_q(&qf(-1, 2)), "-1/2");
        assert_eq!(parse_q("1/0"), None);
    }
}
