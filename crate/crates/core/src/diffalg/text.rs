//! Text formats.
//!
//! Polynomials: `y[1]^2 - 4*y[0]`, `x1*u[1,0] - u[0,0]`. A bare indeterminate
//! means its zero multi-index. Names listed as parameters become symbolic
//! coefficients.
//!
//! Rankings: `orderly(y,z)`, `elim(y;z)`, `matrix(u: 1 1 0, 0 1 0, 0 0 0)`,
//! each optionally followed by `/i,j,…`, the derivation priority.

use std::fmt::Debug;
use std::hash::Hash;

use super::{DPoly, Deriv, DiffError, Ranking, Sym};
use crate::poly::{parse_q, Poly, Ring, Q};

/// Builds an indeterminate from its name, multi-index and σ-shift.
pub(crate) type MakeVar<'a, V> = &'a dyn Fn(&str, Vec<u32>, u32) -> V;

struct Parser<'a, V> {
    s: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
    params: &'a [&'a str],
    m: usize,
    /// Accept `y[θ;k]`.
    shifts: bool,
    mk: MakeVar<'a, V>,
}

type P<V> = Poly<V, Sym>;

impl<'a, V: Ord + Clone + Hash + Debug + Send + Sync + 'static> Parser<'a, V> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DiffError> {
        Err(DiffError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u32, DiffError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii")
            .parse()
            .or_else(|_| self.err("number too large"))
    }

    fn expr(&mut self) -> Result<P<V>, DiffError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<P<V>, DiffError> {
        let mut acc = self.unary()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<P<V>, DiffError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.uint()?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<P<V>, DiffError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let mut q = Q::from_integer(n.into());
                if self.peek() == Some(b'/')
                    && self.s.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
                {
                    self.pos += 1;
                    let d = self.uint()?;
                    if d == 0 {
                        return self.err("zero denominator");
                    }
                    q /= Q::from_integer(d.into());
                }
                Ok(P::from_q(q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let id = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                let mut idx = vec![0; self.m];
                let mut shift = 0;
                if self.eat(b'[') {
                    idx.clear();
                    if !matches!(self.peek(), Some(b';' | b']')) {
                        loop {
                            idx.push(self.uint()?);
                            if !self.eat(b',') {
                                break;
                            }
                        }
                    }
                    if self.shifts && self.eat(b';') {
                        shift = self.uint()?;
                    }
                    if !self.eat(b']') {
                        return self.err("expected `]`");
                    }
                    if idx.len() != self.m {
                        return self.err(format!("{id} needs {} indices", self.m));
                    }
                }
                if self.params.contains(&id) && shift == 0 {
                    Ok(P::constant(Sym::var(Deriv::new(id, idx))))
                } else if self.vars.contains(&id) {
                    Ok(P::var((self.mk)(id, idx, shift)))
                } else {
                    Err(DiffError::UnknownVar(id.to_string()))
                }
            }
            _ => self.err("expected a term"),
        }
    }
}

pub(crate) fn parse_with<V: Ord + Clone + Hash + Debug + Send + Sync + 'static>(
    s: &str,
    vars: &[&str],
    m: usize,
    params: &[&str],
    shifts: bool,
    mk: MakeVar<'_, V>,
) -> Result<Poly<V, Sym>, DiffError> {
    let mut p = Parser {
        s: s.as_bytes(),
        pos: 0,
        vars,
        params,
        m,
        shifts,
        mk,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a polynomial with symbolic coefficients in `params`.
pub fn parse_dpoly(
    s: &str,
    vars: &[&str],
    m: usize,
    params: &[&str],
) -> Result<DPoly<Sym>, DiffError> {
    parse_with(s, vars, m, params, false, &|id, idx, _| Deriv::new(id, idx))
}

/// Parses a polynomial with rational coefficients.
pub fn parse_dpoly_q(s: &str, vars: &[&str], m: usize) -> Result<DPoly<Q>, DiffError> {
    let p = parse_dpoly(s, vars, m, &[])?;
    Ok(Poly::from_terms(p.terms().map(|(mono, c)| {
        (mono.clone(), c.as_q().expect("no parameters"))
    })))
}

fn split_perm(s: &str, m: usize) -> Result<(&str, Vec<usize>), DiffError> {
    match s.rsplit_once('/') {
        Some((body, perm)) if body.trim_end().ends_with(')') => {
            let derivs = perm
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| DiffError::Ranking(s.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if derivs.len() != m {
                return Err(DiffError::Ranking(format!(
                    "priority needs {m} derivations"
                )));
            }
            Ok((body.trim(), derivs))
        }
        _ => Ok((s.trim(), (0..m).collect())),
    }
}

fn names(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .collect()
}

/// Parses ranking text for `m` derivations.
pub fn parse_ranking(s: &str, m: usize) -> Result<Ranking, DiffError> {
    let (body, derivs) = split_perm(s, m)?;
    let bad = || DiffError::Ranking(s.to_string());
    let (kind, rest) = body.split_once('(').ok_or_else(bad)?;
    let inner = rest.strip_suffix(')').ok_or_else(bad)?;
    match kind.trim() {
        "orderly" => Ranking::orderly_with(&names(inner), derivs),
        "elim" => {
            let blocks: Vec<Vec<&str>> = inner.split(';').map(names).collect();
            let refs: Vec<&[&str]> = blocks.iter().map(|b| b.as_slice()).collect();
            match Ranking::elimination(&refs, m) {
                Ranking::Elimination { blocks, .. } => Ok(Ranking::Elimination { blocks, derivs }),
                _ => unreachable!(),
            }
        }
        "matrix" => {
            let mut vars = Vec::new();
            let mut mats = Vec::new();
            for group in inner.split(';') {
                let (v, rows) = group.split_once(':').ok_or_else(bad)?;
                vars.push(v.trim());
                let mt = rows
                    .split(',')
                    .map(|r| {
                        r.split_whitespace()
                            .map(|x| parse_q(x).ok_or_else(bad))
                            .collect()
                    })
                    .collect::<Result<Vec<Vec<Q>>, _>>()?;
                mats.push(mt);
            }
            Ranking::matrix(&vars, mats, derivs)
        }
        _ => Err(bad()),
    }
}
