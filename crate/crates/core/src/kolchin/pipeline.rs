//! Evaluation and the two bound pipelines.
//!
//! `A(n) = G(Len_G)` with `G(0) = max(Components(n,n)+1, KolchinProj(n))` and
//! `G(j+1) = Iter(n, G(j))`; the chain lives in `Z≥0^{n+1}`.
//! `B(r,m,s) = Gustavson(m, r·(A(max{r,m,s})+s+1), s, s)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{chain, Bindings, BoundExpr, ChainConfig, Embedding, Func, KolchinError, TopDown};

/// Entries of `G` kept in a numeric trace.
pub const TRACE_LIMIT: usize = 64;

pub struct Evaluator<'a> {
    pub bindings: &'a Bindings,
    pub chain: ChainConfig,
    pub embedding: &'a dyn Embedding,
    /// Replace `g` by `n + max_{s≤n} g(s)` before the chain search.
    pub envelope: bool,
}

type Env = HashMap<String, BigInt>;

fn count(x: BigInt) -> Result<u64, KolchinError> {
    if x.is_negative() {
        return Err(KolchinError::Negative(x));
    }
    Ok(x.to_u64().unwrap_or(u64::MAX))
}

fn mentions(e: &BoundExpr, v: &str) -> bool {
    match e {
        BoundExpr::Lit(_) => false,
        BoundExpr::Var(x) => x == v,
        BoundExpr::Add(xs) | BoundExpr::Mul(xs) | BoundExpr::Max(xs) | BoundExpr::Call(_, xs) => {
            xs.iter().any(|x| mentions(x, v))
        }
        BoundExpr::Nest { n, times, init } => {
            mentions(n, v) || mentions(times, v) || mentions(init, v)
        }
        BoundExpr::Len { var, dim, body } => mentions(dim, v) || (var != v && mentions(body, v)),
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(bindings: &'a Bindings) -> Self {
        Evaluator {
            bindings,
            chain: ChainConfig::default(),
            embedding: &TopDown,
            envelope: false,
        }
    }

    pub fn eval(&self, e: &BoundExpr, env: &Env) -> Result<BigInt, KolchinError> {
        let all = |xs: &[BoundExpr]| {
            xs.iter()
                .map(|x| self.eval(x, env))
                .collect::<Result<Vec<_>, _>>()
        };
        match e {
            BoundExpr::Lit(n) => Ok(n.clone()),
            BoundExpr::Var(v) => env
                .get(v)
                .cloned()
                .ok_or_else(|| KolchinError::FreeVar(v.clone())),
            BoundExpr::Add(xs) => Ok(all(xs)?.into_iter().sum()),
            BoundExpr::Mul(xs) => Ok(all(xs)?.into_iter().product()),
            BoundExpr::Max(xs) => Ok(all(xs)?.into_iter().max().expect("max of nothing")),
            BoundExpr::Call(Func::A, xs) if !self.bindings.is_bound(Func::A) => {
                let n = count(self.eval(&xs[0], env)?)?;
                self.eval(&a_expr(n), &Env::new())
            }
            BoundExpr::Call(f, xs) => self.bindings.call(*f, &all(xs)?),
            BoundExpr::Nest { n, times, init } => {
                let n = self.eval(n, env)?;
                let k = count(self.eval(times, env)?)?;
                if k > self.chain.max_len {
                    return Err(KolchinError::ChainCap {
                        partial: 0,
                        reason: format!("{k} iterations requested"),
                    });
                }
                let mut x = self.eval(init, env)?;
                for _ in 0..k {
                    x = self.bindings.call(Func::Iter, &[n.clone(), x])?;
                }
                Ok(x)
            }
            BoundExpr::Len { var, dim, body } => {
                let dim = count(self.eval(dim, env)?)?.max(1) as usize;
                self.len(var, dim, body, env).map(BigInt::from)
            }
        }
    }

    fn len(&self, var: &str, dim: usize, body: &BoundExpr, env: &Env) -> Result<u64, KolchinError> {
        // j ↦ Iter(n,·)^j(x) is evaluated one step at a time.
        let nested = match body {
            BoundExpr::Nest { n, times, init }
                if **times == BoundExpr::Var(var.into())
                    && !mentions(n, var)
                    && !mentions(init, var) =>
            {
                Some((self.eval(n, env)?, self.eval(init, env)?))
            }
            _ => None,
        };
        let mut cur: Option<(u64, BigInt)> = None;
        let mut running_max = 0u64;
        let g = |i: u64| -> Result<u64, KolchinError> {
            let raw = match &nested {
                Some((n, x0)) => {
                    let v = match cur.take() {
                        Some((k, x)) if k + 1 == i => {
                            self.bindings.call(Func::Iter, &[n.clone(), x])?
                        }
                        Some((k, x)) if k == i => x,
                        _ => {
                            let mut x = x0.clone();
                            for _ in 0..i {
                                x = self.bindings.call(Func::Iter, &[n.clone(), x])?;
                            }
                            x
                        }
                    };
                    cur = Some((i, v.clone()));
                    v
                }
                None => {
                    let mut inner = env.clone();
                    inner.insert(var.into(), i.into());
                    self.eval(body, &inner)?
                }
            };
            let mut b = count(raw)?;
            if self.envelope {
                running_max = running_max.max(b);
                b = i.saturating_add(running_max);
            }
            Ok(self.embedding.tilde(b, dim))
        };
        Ok(chain(g, dim, &self.chain, false)?.len)
    }
}

/// `max(Components(n,n)+1, KolchinProj(n))`.
pub fn g0_expr(n: u64) -> BoundExpr {
    let n = BoundExpr::Lit(n.into());
    BoundExpr::Max(vec![
        BoundExpr::Add(vec![
            BoundExpr::call(Func::Components, vec![n.clone(), n.clone()]),
            BoundExpr::lit(1),
        ]),
        BoundExpr::call(Func::KolchinProj, vec![n]),
    ])
}

/// `G(j)` written out as `j` nested `Iter` calls.
pub fn g_expr(n: u64, j: usize) -> BoundExpr {
    let mut x = g0_expr(n);
    for _ in 0..j {
        x = BoundExpr::call(Func::Iter, vec![BoundExpr::Lit(n.into()), x]);
    }
    x
}

/// `G(Len_G)`.
pub fn a_expr(n: u64) -> BoundExpr {
    let nl = BoundExpr::Lit(n.into());
    let g0 = g0_expr(n);
    let len = BoundExpr::chain_len(
        "j",
        BoundExpr::Lit((n + 1).into()),
        BoundExpr::nest(nl.clone(), BoundExpr::var("j"), g0.clone()),
    );
    BoundExpr::nest(nl, len, g0)
}

pub fn b_expr() -> BoundExpr {
    let (r, m, s) = (
        BoundExpr::var("r"),
        BoundExpr::var("m"),
        BoundExpr::var("s"),
    );
    let a = BoundExpr::call(
        Func::A,
        vec![BoundExpr::Max(vec![r.clone(), m.clone(), s.clone()])],
    );
    BoundExpr::call(
        Func::Gustavson,
        vec![
            m,
            BoundExpr::Mul(vec![
                r,
                BoundExpr::Add(vec![a, s.clone(), BoundExpr::lit(1)]),
            ]),
            s.clone(),
            s,
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineA {
    pub n: u64,
    pub expr: BoundExpr,
    /// `G(0), G(1), …`, up to `G(Len_G)` or [`TRACE_LIMIT`] entries.
    pub trace: Vec<BigInt>,
    pub len: Option<u64>,
    pub value: Option<BigInt>,
}

/// The symbolic `A(n)`, evaluated when an evaluator is given.
pub fn pipeline_a(n: u64, ev: Option<&Evaluator<'_>>) -> Result<PipelineA, KolchinError> {
    let expr = a_expr(n);
    let Some(ev) = ev else {
        return Ok(PipelineA {
            n,
            expr,
            trace: Vec::new(),
            len: None,
            value: None,
        });
    };
    let BoundExpr::Nest { times, .. } = &expr else {
        unreachable!()
    };
    let env = Env::new();
    let mut g = ev.eval(&g0_expr(n), &env)?;
    let len = count(ev.eval(times, &env)?)?;
    let mut trace = vec![g.clone()];
    for _ in 0..len {
        g = ev.bindings.call(Func::Iter, &[n.into(), g])?;
        if trace.len() < TRACE_LIMIT {
            trace.push(g.clone());
        }
    }
    Ok(PipelineA {
        n,
        expr,
        trace,
        len: Some(len),
        value: Some(g),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineB {
    pub expr: BoundExpr,
    /// `max{r, m, s}`.
    pub a_arg: u64,
    pub a_value: Option<BigInt>,
    pub value: Option<BigInt>,
}

pub fn pipeline_b(
    r: u64,
    m: u64,
    s: u64,
    ev: Option<&Evaluator<'_>>,
) -> Result<PipelineB, KolchinError> {
    let expr = b_expr();
    let a_arg = r.max(m).max(s);
    let Some(ev) = ev else {
        return Ok(PipelineB {
            expr,
            a_arg,
            a_value: None,
            value: None,
        });
    };
    let env: Env = [("r", r), ("m", m), ("s", s)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), BigInt::from(v)))
        .collect();
    let a_value = ev.eval(
        &BoundExpr::call(Func::A, vec![BoundExpr::Lit(a_arg.into())]),
        &env,
    )?;
    let value = ev.eval(&expr, &env)?;
    Ok(PipelineB {
        expr,
        a_arg,
        a_value: Some(a_value),
        value: Some(value),
    })
}
