//! Numeric polynomials, lex-decreasing chain lengths and the bound pipeline.
//!
//! A numeric polynomial is stored in the basis `C(t+i, i)`, so `|ω|` is the
//! sum of absolute coefficients and eventual domination is a top-down
//! lexicographic comparison.

mod bindings;
mod expr;
mod pipeline;

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use bindings::{extractor_size, Bindings, PrimFn};
pub use expr::{parse_bound_expr, BoundExpr, Func};
pub use pipeline::{
    a_expr, b_expr, g0_expr, g_expr, pipeline_a, pipeline_b, Evaluator, PipelineA, PipelineB,
    TRACE_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KolchinError {
    #[error("primitive {0} is unbound")]
    Unbound(String),
    #[error("{name} has no value at ({args})")]
    NoRow { name: String, args: String },
    #[error("{name} takes {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("variable {0} has no value")]
    FreeVar(String),
    #[error("{0} is negative where a count was expected")]
    Negative(BigInt),
    #[error("chain search stopped ({reason}); length so far {partial}")]
    ChainCap { partial: u64, reason: String },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("binding table line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error("extractor: {0}")]
    Extractor(String),
}

/// `Σ a_i C(t+i, i)`, trailing zero coefficients trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NumericPoly {
    coeffs: Vec<BigInt>,
}

/// `C(t+i, i)` for any integer `t`.
fn binom_shifted(t: &BigInt, i: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 1..=i {
        num *= t + BigInt::from(k);
        den *= BigInt::from(k);
    }
    num / den
}

impl NumericPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        NumericPoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * binom_shifted(t, i))
            .sum()
    }

    /// Eventual order: compares coefficients from the top degree down.
    pub fn compare(&self, other: &Self) -> Ordering {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        for i in (0..n).rev() {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            match a.cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Parses `2*C(t+1,1) + 3` style text, or a bare coefficient list
    /// `a0,a1,…`.
    pub fn parse(s: &str) -> Result<Self, KolchinError> {
        let s = s.trim();
        let bad = |msg: &str| KolchinError::Parse {
            pos: 0,
            msg: msg.to_string(),
        };
        if !s.contains('C') {
            let cs = s
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<BigInt>()
                        .map_err(|_| bad("expected integer coefficients"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Self::new(cs));
        }
        let mut coeffs: Vec<BigInt> = Vec::new();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (k, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && k > 0 && !cur.ends_with('(') && !cur.ends_with('t') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (c, i) = match body.find("C(") {
                Some(at) => {
                    let c = match body[..at].strip_suffix('*') {
                        Some(c) => c.parse::<BigInt>().map_err(|_| bad("bad coefficient"))?,
                        None if at == 0 => BigInt::one(),
                        None => return Err(bad("expected `*` before C")),
                    };
                    let inner = body[at + 2..]
                        .strip_suffix(')')
                        .ok_or_else(|| bad("expected `)`"))?;
                    let (top, bot) = inner
                        .split_once(',')
                        .ok_or_else(|| bad("expected C(t+i,i)"))?;
                    let i: usize = bot.parse().map_err(|_| bad("bad index"))?;
                    let want = if i == 0 {
                        "t".to_string()
                    } else {
                        format!("t+{i}")
                    };
                    if top != want {
                        return Err(bad("expected C(t+i,i)"));
                    }
                    (c, i)
                }
                None => (body.parse::<BigInt>().map_err(|_| bad("bad constant"))?, 0),
            };
            if coeffs.len() <= i {
                coeffs.resize(i + 1, BigInt::zero());
            }
            coeffs[i] += c * sign;
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for NumericPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let mag = a.abs();
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if a.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "C(t+{i},{i})")?,
                _ => write!(f, "{mag}*C(t+{i},{i})")?,
            }
        }
        Ok(())
    }
}

impl PartialOrd for NumericPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NumericPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

/// An order-preserving map from numeric polynomials to `Z≥0^dim`.
pub trait Embedding: Send + Sync {
    fn name(&self) -> &str;

    /// `None` outside the domain where the map is claimed to preserve order.
    fn embed(&self, w: &NumericPoly, dim: usize) -> Option<Vec<u64>>;

    /// `max |c(ω)|` over `|ω| ≤ bound` in the domain.
    fn tilde(&self, bound: u64, dim: usize) -> u64;
}

/// Coefficients from the top degree down; defined on polynomials with
/// non-negative coefficients and degree below `dim`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TopDown;

impl Embedding for TopDown {
    fn name(&self) -> &str {
        "top-down"
    }

    fn embed(&self, w: &NumericPoly, dim: usize) -> Option<Vec<u64>> {
        if w.coeffs.len() > dim || w.coeffs.iter().any(Signed::is_negative) {
            return None;
        }
        (0..dim)
            .rev()
            .map(|i| w.coeffs.get(i).map_or(Some(0), |c| c.to_u64()))
            .collect()
    }

    fn tilde(&self, bound: u64, _dim: usize) -> u64 {
        bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    /// Largest norm bound accepted from `g`.
    pub ceiling: u64,
    /// Longest chain followed before giving up.
    pub max_len: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            ceiling: 1 << 32,
            max_len: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub len: u64,
    /// The chain itself, when requested.
    pub witness: Vec<Vec<u64>>,
}

/// Lex-largest vector below `p` with norm at most `c`.
fn next_below(p: &[u64], c: u64) -> Option<Vec<u64>> {
    let c = c as u128;
    let mut prefix = Vec::with_capacity(p.len());
    let mut s = 0u128;
    for &x in p {
        prefix.push(s);
        s += x as u128;
    }
    for k in (0..p.len()).rev() {
        if p[k] == 0 || prefix[k] > c {
            continue;
        }
        let room = c - prefix[k];
        let wk = ((p[k] - 1) as u128).min(room);
        let mut w = p[..k].to_vec();
        w.push(wk as u64);
        if k + 1 < p.len() {
            w.push((room - wk) as u64);
            w.resize(p.len(), 0);
        }
        return Some(w);
    }
    None
}

/// Longest strictly lex-decreasing sequence `v_0 > v_1 > …` in `Z≥0^dim`
/// with `|v_i| ≤ g(i)`.
///
/// Extending with a lex-larger vector never loses options, so the search
/// only follows the lex-largest admissible successor at each step.
pub fn chain<G>(
    mut g: G,
    dim: usize,
    cfg: &ChainConfig,
    keep_witness: bool,
) -> Result<Chain, KolchinError>
where
    G: FnMut(u64) -> Result<u64, KolchinError>,
{
    assert!(dim >= 1, "chain dimension must be positive");
    let mut bound = |i: u64, len: u64| -> Result<u64, KolchinError> {
        let b = g(i)?;
        if b > cfg.ceiling {
            return Err(KolchinError::ChainCap {
                partial: len,
                reason: format!("g({i}) = {b} exceeds the ceiling {}", cfg.ceiling),
            });
        }
        Ok(b)
    };
    let mut v = vec![0; dim];
    v[0] = bound(0, 0)?;
    let mut len = 1;
    let mut witness = Vec::new();
    if keep_witness {
        witness.push(v.clone());
    }
    loop {
        if len >= cfg.max_len {
            return Err(KolchinError::ChainCap {
                partial: len,
                reason: format!("more than {} steps", cfg.max_len),
            });
        }
        let c = bound(len, len)?;
        let Some(w) = next_below(&v, c) else {
            break;
        };
        v = w;
        len += 1;
        if keep_witness {
            witness.push(v.clone());
        }
    }
    Ok(Chain { len, witness })
}

pub fn chain_len<G: FnMut(u64) -> u64>(
    mut g: G,
    dim: usize,
    cfg: &ChainConfig,
) -> Result<u64, KolchinError> {
    chain(|i| Ok(g(i)), dim, cfg, false).map(|c| c.len)
}

/// `g'(n) = n + max_{s ≤ n} g(s)`.
pub fn monotone_envelope<G: FnMut(u64) -> u64>(g: G) -> impl FnMut(u64) -> u64 {
    let g = RefCell::new(g);
    let mut best: Vec<u64> = Vec::new();
    move |n| {
        while best.len() as u64 <= n {
            let s = best.len() as u64;
            let v = (g.borrow_mut())(s);
            best.push(best.last().map_or(v, |&b| b.max(v)));
        }
        n + best[n as usize]
    }
}

/// `|v|` for a vector in `Z≥0^dim`.
pub fn vec_norm(v: &[u64]) -> u128 {
    v.iter().map(|&x| x as u128).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_eval_compare() {
        let w = NumericPoly::from_i64s(&[3, 2]);
        assert_eq!(w.norm(), BigInt::from(5));
        assert_eq!(
            NumericPoly::from_i64s(&[0, 0, 1]).eval(&BigInt::from(3)),
            BigInt::from(10)
        );
        assert_eq!(
            NumericPoly::from_i64s(&[0, 1]).compare(&NumericPoly::from_i64s(&[5])),
            Ordering::Greater
        );
        assert_eq!(NumericPoly::from_i64s(&[1, 0, 0]).degree(), Some(0));
    }

    #[test]
    fn display_parse() {
        let w = NumericPoly::from_i64s(&[3, 2, -1]);
        assert_eq!(w.to_string(), "-C(t+2,2) + 2*C(t+1,1) + 3");
        assert_eq!(NumericPoly::parse(&w.to_string()).unwrap(), w);
        assert_eq!(NumericPoly::parse("3, 2, -1").unwrap(), w);
        assert_eq!(NumericPoly::parse("0").unwrap().to_string(), "0");
        assert!(NumericPoly::parse("2*C(t+1,2)").is_err());
    }

    #[test]
    fn chain_examples() {
        let cfg = ChainConfig::default();
        for c in 0..=5 {
            assert_eq!(chain_len(|_| c, 1, &cfg).unwrap(), c + 1);
        }
        let ch = chain(|_| Ok(1), 2, &cfg, true).unwrap();
        assert_eq!(ch.len, 3);
        assert_eq!(ch.witness, vec![vec![1, 0], vec![0, 1], vec![0, 0]]);
        assert_eq!(chain_len(|_| 0, 3, &cfg).unwrap(), 1);
        assert_eq!(chain_len(|i| i + 2, 2, &cfg).unwrap(), 11);
    }

    #[test]
    fn chain_caps() {
        let cfg = ChainConfig {
            ceiling: 10,
            max_len: 100,
        };
        assert!(matches!(
            chain_len(|i| 3 * i + 1, 2, &cfg),
            Err(KolchinError::ChainCap { partial: 4, .. })
        ));
        assert!(matches!(
            chain_len(
                |i| i + 5,
                3,
                &ChainConfig {
                    ceiling: 1 << 20,
                    max_len: 100
                }
            ),
            Err(KolchinError::ChainCap { partial: 100, .. })
        ));
    }

    #[test]
    fn envelope() {
        let mut e = monotone_envelope(|_| 2);
        assert_eq!((0..4).map(&mut e).collect::<Vec<_>>(), vec![2, 3, 4, 5]);
        let mut e = monotone_envelope(|n| n % 2);
        assert_eq!((0..3).map(&mut e).collect::<Vec<_>>(), vec![0, 2, 3]);
        let mut e = monotone_envelope(|n| 2 * n + 1);
        assert_eq!(e(4), 4 + 9);
    }

    #[test]
    fn top_down_embedding() {
        let w = NumericPoly::from_i64s(&[3, 2]);
        assert_eq!(TopDown.embed(&w, 3), Some(vec![0, 2, 3]));
        assert_eq!(TopDown.embed(&w, 1), None);
        assert_eq!(TopDown.embed(&NumericPoly::from_i64s(&[1, -1]), 2), None);
    }
}
