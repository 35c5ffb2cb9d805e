//! Differential polynomials with `m` commuting derivations.
//!
//! A derivative `θy` is a [`Deriv`]: an indeterminate name plus a
//! multi-index. Polynomials are [`Poly`]s over derivatives, with rational
//! coefficients or symbolic coefficients ([`Sym`]) in parameters `x1, x2, …`.
//! Everything that depends on comparing derivatives or deciding whether a
//! coefficient vanishes goes through a [`Context`], so the same reduction
//! and decomposition code runs with exact arithmetic or against an oracle.

mod lifted;
mod ranking;
mod reduce;
mod rg;
mod text;

use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;
use thiserror::Error;

use crate::logic::{name, Name};
use crate::poly::{fmt_q, DiffVar, Differential, Monomial, Poly, Ring, Q};

pub use lifted::RgLifted;
pub use ranking::{alpha_vars, matrix_less_formula, matrix_validity_formula, Ranking};
pub use reduce::{
    autoreduce, clean, full_reduce, initial, is_reduced_wrt, leader, rank, rank_cmp,
    reduce_remainder, separant, set_rank_compare, Reduction,
};
pub use rg::{member_radical, rosenfeld_groebner, CharSystem, RgError, RgOptions};
pub(crate) use text::parse_with;
pub use text::{parse_dpoly, parse_dpoly_q, parse_ranking};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown indeterminate `{0}`")]
    UnknownVar(String),
    #[error("bad ranking: {0}")]
    Ranking(String),
    #[error("{0} is a constant and has no leader")]
    Constant(String),
}

/// `θ y`: an indeterminate and a multi-index.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Deriv {
    pub var: Name,
    pub idx: Vec<u32>,
}

impl Deriv {
    pub fn new(var: &str, idx: Vec<u32>) -> Self {
        Deriv {
            var: name(var),
            idx,
        }
    }

    /// The indeterminate itself, with `m` derivations.
    pub fn base(var: &str, m: usize) -> Self {
        Deriv::new(var, vec![0; m])
    }

    pub fn ord(&self) -> u32 {
        self.idx.iter().sum()
    }

    /// `θ` with `self = θ other`, when `self` is a derivative of `other`.
    pub fn quotient(&self, other: &Deriv) -> Option<Vec<u32>> {
        if self.var != other.var || self.idx.len() != other.idx.len() {
            return None;
        }
        self.idx
            .iter()
            .zip(&other.idx)
            .map(|(a, b)| a.checked_sub(*b))
            .collect()
    }

    pub fn is_proper_derivative_of(&self, other: &Deriv) -> bool {
        self != other && self.quotient(other).is_some()
    }

    pub fn apply(&self, theta: &[u32]) -> Deriv {
        Deriv {
            var: self.var.clone(),
            idx: self.idx.iter().zip(theta).map(|(a, b)| a + b).collect(),
        }
    }
}

impl DiffVar for Deriv {
    fn derive(&self, i: usize) -> Self {
        let mut idx = self.idx.clone();
        idx[i] += 1;
        Deriv {
            var: self.var.clone(),
            idx,
        }
    }
}

impl fmt::Display for Deriv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.var)?;
        for (k, i) in self.idx.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

pub type DPoly<C> = Poly<Deriv, C>;

/// Coefficients that are polynomials in parameters and their derivatives.
pub type Sym = Poly<Deriv, Q>;

/// Applies `θ = ∂_1^{θ_1} ⋯ ∂_m^{θ_m}`.
pub fn apply_theta<C: Differential>(p: &DPoly<C>, theta: &[u32]) -> DPoly<C> {
    let mut out = p.clone();
    for (i, &k) in theta.iter().enumerate() {
        for _ in 0..k {
            out = out.derive(i);
        }
    }
    out
}

pub fn derive<C: Differential>(p: &DPoly<C>, i: usize) -> DPoly<C> {
    p.derive(i)
}

/// Printing and normalization for coefficient rings.
pub trait Coefficient: Differential {
    /// `(negative, body, atomic)`.
    fn render(&self) -> (bool, String, bool);

    /// Scales by a nonzero constant into a canonical representative.
    fn normalize(p: &DPoly<Self>) -> DPoly<Self>;

    /// Rough storage size, in bits.
    fn size(&self) -> usize;
}

/// Sum of coefficient sizes.
pub fn poly_size<C: Coefficient>(p: &DPoly<C>) -> usize {
    p.terms().map(|(_, c)| c.size() + 1).sum()
}

impl Coefficient for Q {
    fn render(&self) -> (bool, String, bool) {
        (self.is_negative(), fmt_q(&self.abs()), true)
    }

    fn normalize(p: &DPoly<Q>) -> DPoly<Q> {
        p.primitive()
    }

    fn size(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Coefficient for Sym {
    fn render(&self) -> (bool, String, bool) {
        if let Some(q) = self.as_constant() {
            return q.render();
        }
        if self.num_terms() == 1 {
            let (m, c) = self.terms().next().expect("one term");
            if c.is_negative() {
                return (
                    true,
                    render_with(&Poly::term(m.clone(), -c.clone()), true),
                    true,
                );
            }
            return (false, render_with(self, true), true);
        }
        (false, render_with(self, true), false)
    }

    /// Makes the highest term monic when its coefficient is a rational.
    fn normalize(p: &DPoly<Sym>) -> DPoly<Sym> {
        match p.terms().next_back().and_then(|(_, c)| c.as_constant()) {
            Some(q) if !num_traits::Zero::is_zero(&q) && !num_traits::One::is_one(&q) => {
                p.scale(&Sym::from_q(Q::from_integer(1.into()) / q))
            }
            _ => p.clone(),
        }
    }

    fn size(&self) -> usize {
        self.terms().map(|(_, c)| c.size() + 1).sum()
    }
}

fn render_monomial<V: Ord + Clone>(m: &Monomial<V>, var: &dyn Fn(&V) -> String) -> String {
    m.factors()
        .iter()
        .map(|(v, e)| {
            let v = var(v);
            if *e == 1 {
                v
            } else {
                format!("{v}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Text form, highest monomial first: `y[1]^2 - 4*y[0]`.
pub fn render_poly<C: Coefficient>(p: &DPoly<C>) -> String {
    render_with(p, false)
}

/// Prints underived indeterminates without brackets, as parameters are.
pub fn render_poly_bare<C: Coefficient>(p: &DPoly<C>) -> String {
    render_with(p, true)
}

fn render_with<C: Coefficient>(p: &DPoly<C>, bare: bool) -> String {
    render_terms(p, &|v: &Deriv| {
        if bare && v.ord() == 0 {
            v.var.to_string()
        } else {
            v.to_string()
        }
    })
}

/// Highest monomial first, with `var` printing each indeterminate.
pub fn render_terms<V, C>(p: &Poly<V, C>, var: &dyn Fn(&V) -> String) -> String
where
    V: Ord + Clone + std::hash::Hash + fmt::Debug + Send + Sync + 'static,
    C: Coefficient,
{
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let (neg, body, atomic) = c.render();
        let body = if m.is_one() {
            if atomic {
                body
            } else {
                format!("({body})")
            }
        } else if c.is_one() || (neg && body == "1") {
            render_monomial(m, var)
        } else if atomic {
            format!("{body}*{}", render_monomial(m, var))
        } else {
            format!("({body})*{}", render_monomial(m, var))
        };
        match (k, neg) {
            (0, true) => out.push_str(&format!("-{body}")),
            (0, false) => out.push_str(&body),
            (_, true) => out.push_str(&format!(" - {body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
        }
    }
    out
}

/// Answers the two kinds of questions reduction needs.
pub trait Context<C: Ring> {
    type Error;

    /// Canonical form of a coefficient, zero if it vanishes.
    fn simplify(&mut self, c: &C) -> Result<C, Self::Error>;

    fn compare(&mut self, a: &Deriv, b: &Deriv) -> Result<Ordering, Self::Error>;

    /// Called once per elementary reduction step with the size of the
    /// current remainder, as measured by [`poly_size`].
    fn tick(&mut self, size: usize) -> Result<(), Self::Error>;
}

/// Rational coefficients and a fixed ranking, with a work budget.
#[derive(Debug, Clone, Copy)]
pub struct Exact<'a> {
    pub ranking: &'a Ranking,
    pub max_size: usize,
    pub max_ticks: u64,
    pub ticks: u64,
}

/// An [`Exact`] context ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("reduction budget exhausted")]
pub struct Exhausted;

impl<'a> Exact<'a> {
    pub fn new(ranking: &'a Ranking) -> Self {
        Exact {
            ranking,
            max_size: 1 << 16,
            max_ticks: 1_000_000,
            ticks: 0,
        }
    }

    pub fn with_budget(ranking: &'a Ranking, max_size: usize, max_ticks: u64) -> Self {
        Exact {
            ranking,
            max_size,
            max_ticks,
            ticks: 0,
        }
    }
}

impl Context<Q> for Exact<'_> {
    type Error = Exhausted;

    fn simplify(&mut self, c: &Q) -> Result<Q, Exhausted> {
        Ok(c.clone())
    }

    fn compare(&mut self, a: &Deriv, b: &Deriv) -> Result<Ordering, Exhausted> {
        Ok(self.ranking.compare(a, b))
    }

    fn tick(&mut self, size: usize) -> Result<(), Exhausted> {
        self.ticks += 1;
        if size > self.max_size || self.ticks > self.max_ticks {
            return Err(Exhausted);
        }
        Ok(())
    }
}

/// Unwraps an exact computation, panicking if its budget ran out.
pub fn exact<T>(r: Result<T, Exhausted>) -> T {
    r.expect("exact reduction budget exhausted")
}
