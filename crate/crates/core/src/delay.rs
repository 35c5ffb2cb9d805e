//! Differential-difference polynomials and point-level verifiers.
//!
//! An indeterminate `θσ^k y` is a [`DsVar`]; in text it is written
//! `y[θ;k]`, e.g. `y[1,0;2]`, or `y[;2]` with no derivations. Coefficients
//! are rational constants, on which σ and every derivation act trivially.
//!
//! Values of proper derivatives are not computed: they are either all zero
//! ([`Derivs::Zero`]) or looked up in a table, where a missing entry is an
//! error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::diffalg::{parse_with, render_poly_bare, render_terms, DPoly, Deriv, DiffError};
use crate::logic::{name, Name};
use crate::poly::{fmt_q, parse_q, DiffVar, Differential, Poly, Ring, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DelayError {
    #[error(transparent)]
    Parse(#[from] DiffError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no value for the derivative {var}[{theta}] at {at}")]
    MissingDerivative {
        var: String,
        at: String,
        theta: String,
    },
    #[error("derivative table line {line}: {msg}")]
    Table { line: usize, msg: String },
}

/// `θσ^shift y`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DsVar {
    pub var: Name,
    pub idx: Vec<u32>,
    pub shift: u32,
}

impl DsVar {
    pub fn new(var: &str, idx: Vec<u32>, shift: u32) -> Self {
        DsVar {
            var: name(var),
            idx,
            shift,
        }
    }

    pub fn ord_delta(&self) -> u32 {
        self.idx.iter().sum()
    }

    pub fn is_underived(&self) -> bool {
        self.idx.iter().all(|&i| i == 0)
    }
}

impl DiffVar for DsVar {
    fn derive(&self, i: usize) -> Self {
        let mut idx = self.idx.clone();
        idx[i] += 1;
        DsVar {
            idx,
            ..self.clone()
        }
    }
}

fn join(idx: &[u32]) -> String {
    idx.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for DsVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.shift, self.is_underived()) {
            (0, true) => write!(f, "{}", self.var),
            (0, false) => write!(f, "{}[{}]", self.var, join(&self.idx)),
            (k, _) => write!(f, "{}[{};{k}]", self.var, join(&self.idx)),
        }
    }
}

pub type DsPoly = Poly<DsVar, Q>;

pub fn parse_ds(s: &str, vars: &[&str], m: usize) -> Result<DsPoly, DelayError> {
    let p = parse_with(s, vars, m, &[], true, &|id, idx, k| DsVar::new(id, idx, k))?;
    Ok(p.map_coeffs(|c| c.as_q().expect("no parameters")))
}

pub fn render_ds(f: &DsPoly) -> String {
    render_terms(f, &|v: &DsVar| v.to_string())
}

/// `σ^i f`.
pub fn sigma_shift(f: &DsPoly, i: u32) -> DsPoly {
    f.map_vars(|v| DsVar {
        shift: v.shift + i,
        ..v.clone()
    })
}

/// Largest `ord θ + k` over occurring `θσ^k y`; 0 for constants.
pub fn ord(f: &DsPoly) -> u32 {
    f.vars()
        .iter()
        .map(|v| v.ord_delta() + v.shift)
        .max()
        .unwrap_or(0)
}

pub fn ord_sigma(f: &DsPoly) -> u32 {
    f.vars().iter().map(|v| v.shift).max().unwrap_or(0)
}

pub fn ord_delta(f: &DsPoly) -> u32 {
    f.vars().iter().map(DsVar::ord_delta).max().unwrap_or(0)
}

/// The system `F` read as a Δ-variety `X ⊂ A^H` with its two projections.
///
/// Coordinates come in one block of `h+1` per indeterminate: coordinate
/// `s(h+1)+k` holds `σ^k y_s`.
#[derive(Debug, Clone)]
pub struct TripleSpec {
    pub f: Vec<DsPoly>,
    pub vars: Vec<String>,
    pub m: usize,
    pub h: u32,
}

impl TripleSpec {
    pub fn new(f: Vec<DsPoly>, vars: &[&str], m: usize) -> Result<Self, DelayError> {
        for p in &f {
            for v in p.vars() {
                if v.idx.len() != m {
                    return Err(DelayError::Dimension(format!(
                        "{v} does not have {m} indices"
                    )));
                }
                if !vars.contains(&v.var.as_ref()) {
                    return Err(DiffError::UnknownVar(v.var.to_string()).into());
                }
            }
        }
        let h = f.iter().map(ord_sigma).max().unwrap_or(0);
        Ok(TripleSpec {
            f,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            m,
            h,
        })
    }

    pub fn parse(polys: &[&str], vars: &[&str], m: usize) -> Result<Self, DelayError> {
        let f = polys
            .iter()
            .map(|s| parse_ds(s, vars, m))
            .collect::<Result<_, _>>()?;
        Self::new(f, vars, m)
    }

    pub fn r(&self) -> usize {
        self.vars.len()
    }

    pub fn big_h(&self) -> usize {
        self.r() * (self.h as usize + 1)
    }

    pub fn coord(&self, s: usize, k: u32) -> usize {
        s * (self.h as usize + 1) + k as usize
    }

    fn var_index(&self, v: &str) -> usize {
        self.vars
            .iter()
            .position(|x| x == v)
            .expect("checked in new")
    }

    /// Drops `σ^h y_s` from each block.
    pub fn pi1(&self, p: &[Q]) -> Vec<Q> {
        self.project(p, |k| k < self.h)
    }

    /// Drops `y_s` from each block.
    pub fn pi2(&self, p: &[Q]) -> Vec<Q> {
        self.project(p, |k| k >= 1)
    }

    fn project(&self, p: &[Q], keep: impl Fn(u32) -> bool) -> Vec<Q> {
        (0..self.r())
            .flat_map(|s| (0..=self.h).filter(|&k| keep(k)).map(move |k| (s, k)))
            .map(|(s, k)| p[self.coord(s, k)].clone())
            .collect()
    }
}

/// The fibered system for length `ℓ`.
#[derive(Debug, Clone)]
pub struct WlSystem {
    /// Block `i` lists `y_s_i_k` in coordinate order.
    pub blocks: Vec<Vec<Deriv>>,
    pub equations: Vec<DPoly<Q>>,
    pub gluing: Vec<DPoly<Q>>,
}

fn block_var(var: &str, block: usize, k: u32) -> String {
    format!("{var}_{block}_{k}")
}

/// Blocks are numbered from 1. Block `i` carries `σ^{i-1}(F)`, which over
/// rational constants is `F` again on fresh indeterminates.
pub fn wl_system(spec: &TripleSpec, l: usize) -> WlSystem {
    let mut blocks = Vec::new();
    let mut equations = Vec::new();
    let mut gluing = Vec::new();
    for i in 1..=l {
        blocks.push(
            spec.vars
                .iter()
                .flat_map(|y| (0..=spec.h).map(move |k| Deriv::base(&block_var(y, i, k), spec.m)))
                .collect(),
        );
        for f in &spec.f {
            equations
                .push(f.map_vars(|v| Deriv::new(&block_var(&v.var, i, v.shift), v.idx.clone())));
        }
        if i > 1 {
            for y in &spec.vars {
                for k in 1..=spec.h {
                    let next = DPoly::var(Deriv::base(&block_var(y, i, k - 1), spec.m));
                    let prev = DPoly::var(Deriv::base(&block_var(y, i - 1, k), spec.m));
                    gluing.push(next.sub(&prev));
                }
            }
        }
    }
    WlSystem {
        blocks,
        equations,
        gluing,
    }
}

impl WlSystem {
    /// Text form: equations, then gluing, one per line.
    pub fn render(&self) -> Vec<String> {
        self.equations
            .iter()
            .chain(&self.gluing)
            .map(render_poly_bare)
            .collect()
    }

    /// Assigns block `i` the point `points[i]`; proper derivatives get 0.
    pub fn evaluate(&self, points: &[Vec<Q>]) -> Result<Vec<Q>, DelayError> {
        if points.len() != self.blocks.len() {
            return Err(DelayError::Dimension(format!(
                "{} points for {} blocks",
                points.len(),
                self.blocks.len()
            )));
        }
        let mut value = BTreeMap::new();
        for (b, p) in self.blocks.iter().zip(points) {
            if b.len() != p.len() {
                return Err(DelayError::Dimension(format!(
                    "point of length {}, expected {}",
                    p.len(),
                    b.len()
                )));
            }
            for (v, x) in b.iter().zip(p) {
                value.insert(v.var.clone(), x.clone());
            }
        }
        Ok(self
            .equations
            .iter()
            .chain(&self.gluing)
            .map(|e| {
                e.eval(|d| {
                    if d.ord() == 0 {
                        value[&d.var].clone()
                    } else {
                        Q::default()
                    }
                })
            })
            .collect())
    }
}

/// Values of proper derivatives, keyed by `K`.
#[derive(Debug, Clone, Default)]
pub enum Derivs<K> {
    #[default]
    Zero,
    Table(BTreeMap<K, Q>),
}

/// `(y, position, θ)`: `θ a_{y,position}` in a sequence.
pub type SeqKey = (String, usize, Vec<u32>);
/// `(y, point, k, θ)`: `θ` of coordinate `σ^k y` of a point.
pub type PointKey = (String, usize, u32, Vec<u32>);

impl<K: Ord> Derivs<K> {
    fn get(&self, key: &K, missing: impl FnOnce() -> DelayError) -> Result<Q, DelayError> {
        match self {
            Derivs::Zero => Ok(Q::default()),
            Derivs::Table(t) => t.get(key).cloned().ok_or_else(missing),
        }
    }
}

/// Reads `y[1,0] @ 3 = 5` lines (`#` comments): the derivative of `a_{y,3}`.
pub fn parse_seq_derivs(text: &str, vars: &[&str], m: usize) -> Result<Derivs<SeqKey>, DelayError> {
    let rows = parse_table(text, vars, m)?;
    let mut out = BTreeMap::new();
    for (line, v, pos, q) in rows {
        if v.shift != 0 {
            return Err(DelayError::Table {
                line,
                msg: "sequence entries take no σ index".into(),
            });
        }
        out.insert((v.var.to_string(), pos, v.idx), q);
    }
    Ok(Derivs::Table(out))
}

/// Reads `y[1,0;k] @ i = 5` lines: the derivative of coordinate `σ^k y` of
/// point `i`, counted from 0.
pub fn parse_point_derivs(
    text: &str,
    vars: &[&str],
    m: usize,
) -> Result<Derivs<PointKey>, DelayError> {
    let rows = parse_table(text, vars, m)?;
    Ok(Derivs::Table(
        rows.into_iter()
            .map(|(_, v, i, q)| ((v.var.to_string(), i, v.shift, v.idx), q))
            .collect(),
    ))
}

fn parse_table(
    text: &str,
    vars: &[&str],
    m: usize,
) -> Result<Vec<(usize, DsVar, usize, Q)>, DelayError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| DelayError::Table {
            line: k + 1,
            msg: msg.to_string(),
        };
        let (lhs, value) = line
            .split_once('=')
            .ok_or_else(|| bad("expected `y[θ] @ i = value`"))?;
        let (var, at) = lhs.split_once('@').ok_or_else(|| bad("expected `@`"))?;
        let p = parse_ds(var, vars, m).map_err(|e| bad(&e.to_string()))?;
        let v = match p.terms().next() {
            Some((mono, c))
                if p.num_terms() == 1
                    && mono.factors().len() == 1
                    && mono.factors()[0].1 == 1
                    && *c == Q::from_integer(1.into()) =>
            {
                mono.factors()[0].0.clone()
            }
            _ => return Err(bad("left side must be a single derivative")),
        };
        if v.is_underived() {
            return Err(bad("only proper derivatives are tabulated"));
        }
        let at = at
            .trim()
            .parse::<usize>()
            .map_err(|_| bad("position must be a natural number"))?;
        let q = parse_q(value.trim()).ok_or_else(|| bad("value must be rational"))?;
        out.push((k + 1, v, at, q));
    }
    Ok(out)
}

fn eval_with(
    f: &DsPoly,
    mut value: impl FnMut(&DsVar) -> Result<Q, DelayError>,
) -> Result<Q, DelayError> {
    let vals = f
        .vars()
        .into_iter()
        .map(|v| value(&v).map(|q| (v, q)))
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(f.eval(|v| vals[v].clone()))
}

/// Whether the sequences `a_y = seqs[y]` solve `σ^i(F)` for `0 ≤ i < ℓ`.
/// Each sequence needs at least `ℓ + h` terms.
pub fn verify_partial(
    spec: &TripleSpec,
    seqs: &[Vec<Q>],
    l: usize,
    derivs: &Derivs<SeqKey>,
) -> Result<bool, DelayError> {
    if seqs.len() != spec.r() {
        return Err(DelayError::Dimension(format!(
            "{} sequences for {} indeterminates",
            seqs.len(),
            spec.r()
        )));
    }
    if l == 0 {
        return Ok(true);
    }
    let need = l + spec.h as usize;
    if let Some(s) = seqs.iter().position(|a| a.len() < need) {
        return Err(DelayError::Dimension(format!(
            "sequence for {} has {} terms, need {need}",
            spec.vars[s],
            seqs[s].len()
        )));
    }
    for i in 0..l {
        for f in &spec.f {
            let v = eval_with(f, |v| {
                let pos = i + v.shift as usize;
                let s = spec.var_index(&v.var);
                if v.is_underived() {
                    return Ok(seqs[s][pos].clone());
                }
                derivs.get(&(v.var.to_string(), pos, v.idx.clone()), || {
                    DelayError::MissingDerivative {
                        var: v.var.to_string(),
                        at: format!("position {pos}"),
                        theta: join(&v.idx),
                    }
                })
            })?;
            if v != Q::default() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `p_i ∈ σ^{i-1}(X)` and `π₂(p_i) = π₁(p_{i+1})`.
///
/// Glued coordinates are the same Δ-field element, so their tabulated
/// derivatives must agree too.
pub fn verify_triple(
    spec: &TripleSpec,
    points: &[Vec<Q>],
    derivs: &Derivs<PointKey>,
) -> Result<bool, DelayError> {
    let big_h = spec.big_h();
    if let Some(i) = points.iter().position(|p| p.len() != big_h) {
        return Err(DelayError::Dimension(format!(
            "point {i} has length {}, expected {big_h}",
            points[i].len()
        )));
    }
    for (i, p) in points.iter().enumerate() {
        for f in &spec.f {
            let v = eval_with(f, |v| {
                if v.is_underived() {
                    return Ok(p[spec.coord(spec.var_index(&v.var), v.shift)].clone());
                }
                derivs.get(&(v.var.to_string(), i, v.shift, v.idx.clone()), || {
                    DelayError::MissingDerivative {
                        var: v.var.to_string(),
                        at: format!("point {i}, σ^{}", v.shift),
                        theta: join(&v.idx),
                    }
                })
            })?;
            if v != Q::default() {
                return Ok(false);
            }
        }
    }
    for w in points.windows(2) {
        if spec.pi2(&w[0]) != spec.pi1(&w[1]) {
            return Ok(false);
        }
    }
    if let Derivs::Table(t) = derivs {
        for ((y, i, k, theta), q) in t {
            let other = if *k >= 1 {
                t.get(&(y.clone(), i + 1, k - 1, theta.clone()))
            } else {
                i.checked_sub(1)
                    .and_then(|j| t.get(&(y.clone(), j, k + 1, theta.clone())))
            };
            let glued =
                *k >= 1 && i + 1 < points.len() || *k < spec.h && *i >= 1 && *i < points.len();
            if glued && other.is_some_and(|o| o != q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `p_i = (a_{y, i+k})` for `0 ≤ i < ℓ`, blocks as in [`TripleSpec::coord`].
pub fn reshape(spec: &TripleSpec, seqs: &[Vec<Q>], l: usize) -> Result<Vec<Vec<Q>>, DelayError> {
    let need = l + spec.h as usize;
    if seqs.len() != spec.r() || (l > 0 && seqs.iter().any(|a| a.len() < need)) {
        return Err(DelayError::Dimension(format!(
            "need {} sequences of {need} terms",
            spec.r()
        )));
    }
    Ok((0..l)
        .map(|i| {
            seqs.iter()
                .flat_map(|a| (0..=spec.h as usize).map(move |k| a[i + k].clone()))
                .collect()
        })
        .collect())
}

pub fn reshape_derivs(spec: &TripleSpec, d: &Derivs<SeqKey>, l: usize) -> Derivs<PointKey> {
    match d {
        Derivs::Zero => Derivs::Zero,
        Derivs::Table(t) => {
            let mut out = BTreeMap::new();
            for ((y, pos, theta), q) in t {
                for k in 0..=spec.h {
                    if let Some(i) = pos.checked_sub(k as usize).filter(|&i| i < l) {
                        out.insert((y.clone(), i, k, theta.clone()), q.clone());
                    }
                }
            }
            Derivs::Table(out)
        }
    }
}

/// `{θσ^i f : f ∈ F, i ≤ B, ord θ ≤ B}` without repeats. Only emitted; no
/// solver decides it.
pub fn nullstellensatz_system(spec: &TripleSpec, b: u32) -> Vec<DsPoly> {
    let mut thetas: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..spec.m {
        thetas = thetas
            .into_iter()
            .flat_map(|t| {
                let used: u32 = t.iter().sum();
                (0..=b - used).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in &spec.f {
        for i in 0..=b {
            let g = sigma_shift(f, i);
            for theta in &thetas {
                let mut d = g.clone();
                for (j, &n) in theta.iter().enumerate() {
                    for _ in 0..n {
                        d = Differential::derive(&d, j);
                    }
                }
                if !d.is_zero() && seen.insert(d.clone()) {
                    out.push(d);
                }
            }
        }
    }
    out
}

pub fn render_point(p: &[Q]) -> String {
    format!("({})", p.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qi;

    fn qs(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    fn doubling() -> TripleSpec {
        TripleSpec::parse(&["y[;1] - 2*y"], &["y"], 0).unwrap()
    }

    #[test]
    fn shifts() {
        let f = parse_ds("y[;1] - 2*y", &["y"], 0).unwrap();
        assert_eq!(render_ds(&sigma_shift(&f, 1)), "y[;2] - 2*y[;1]");
        assert_eq!(sigma_shift(&f, 0), f);
        let g = parse_ds("y[1;1]", &["y"], 1).unwrap();
        assert_eq!(render_ds(&sigma_shift(&g, 1)), "y[1;2]");
        assert_eq!(ord(&parse_ds("y[1,0;2] + y[3,0]", &["y"], 2).unwrap()), 3);
        assert_eq!(ord_sigma(&g), 1);
        assert_eq!(ord_delta(&g), 1);
        assert_eq!(
            render_ds(&parse_ds("y[0,0;2]*z[1,0]", &["y", "z"], 2).unwrap()),
            "y[0,0;2]*z[1,0]"
        );
    }

    #[test]
    fn wl() {
        let spec = doubling();
        assert_eq!((spec.h, spec.big_h()), (1, 2));
        let w = wl_system(&spec, 2);
        assert_eq!(
            w.render(),
            ["y_1_1 - 2*y_1_0", "y_2_1 - 2*y_2_0", "y_2_0 - y_1_1"]
        );
        assert!(wl_system(&spec, 1).gluing.is_empty());
        let h2 = TripleSpec::parse(&["y[;1] - 2*y"], &["y"], 0).unwrap();
        assert_eq!(wl_system(&h2, 3).gluing.len(), 2);
    }

    #[test]
    fn partial() {
        let spec = doubling();
        let z = Derivs::Zero;
        assert!(verify_partial(&spec, &[qs(&[1, 2, 4])], 2, &z).unwrap());
        assert!(!verify_partial(&spec, &[qs(&[1, 2, 5])], 2, &z).unwrap());
        assert!(verify_partial(&spec, &[vec![]], 0, &z).unwrap());
        assert!(verify_partial(&spec, &[qs(&[1, 2])], 2, &z).is_err());
    }

    #[test]
    fn triple() {
        let spec = doubling();
        let z = Derivs::Zero;
        assert!(verify_triple(&spec, &[qs(&[1, 2]), qs(&[2, 4])], &z).unwrap());
        assert!(!verify_triple(&spec, &[qs(&[1, 2]), qs(&[3, 6])], &z).unwrap());
        assert!(verify_triple(&spec, &[qs(&[5, 10])], &z).unwrap());
        assert!(verify_triple(&spec, &[qs(&[5])], &z).is_err());
    }

    #[test]
    fn derivative_tables() {
        // y' = y on a single point: y'(1) = 1, so y[1] - y vanishes.
        let spec = TripleSpec::parse(&["y[1] - y"], &["y"], 1).unwrap();
        let d = parse_seq_derivs("y[1] @ 0 = 1 # a_0'\n", &["y"], 1).unwrap();
        assert!(verify_partial(&spec, &[qs(&[1])], 1, &d).unwrap());
        assert!(matches!(
            verify_partial(&spec, &[qs(&[1, 1])], 2, &d),
            Err(DelayError::MissingDerivative { .. })
        ));
        assert!(!verify_partial(&spec, &[qs(&[1])], 1, &Derivs::Zero).unwrap());
        let p = parse_point_derivs("y[1;0] @ 0 = 1", &["y"], 1).unwrap();
        assert!(verify_triple(&spec, &[qs(&[1])], &p).unwrap());
        assert!(parse_seq_derivs("y[1;1] @ 0 = 1", &["y"], 1).is_err());
        assert!(parse_seq_derivs("y @ 0 = 1", &["y"], 1).is_err());
    }

    #[test]
    fn nullstellensatz() {
        let spec = TripleSpec::parse(&["y[1;1] - y"], &["y"], 1).unwrap();
        let sys = nullstellensatz_system(&spec, 1);
        let text: Vec<String> = sys.iter().map(render_ds).collect();
        assert_eq!(
            text,
            [
                "y[1;1] - y",
                "y[2;1] - y[1]",
                "y[1;2] - y[0;1]",
                "y[2;2] - y[1;1]"
            ]
        );
    }
}
