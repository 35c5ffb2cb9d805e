//! Rosenfeld–Gröbner decomposition on a work-list.
//!
//! A branch holds pending equations, the current autoreduced set and the
//! inequations assumed so far. Each step reduces the lowest pending
//! equation and either drops it, kills the branch (nonzero constant), or
//! splits three ways on the remainder `r` with leader `u`, degree `d`,
//! initial `i` and separant `s`:
//!
//! 1. `i ≠ 0, s ≠ 0`: insert `r`, requeue what it displaces, queue Δ-pairs;
//! 2. `i = 0`: queue `i` and `r − i·u^d`;
//! 3. `s = 0` (only when `d > 1`): queue `s` and `r`, assume `i ≠ 0`.
//!
//! Branches are explored depth first in that order, so the output order is
//! the branch path order.

use thiserror::Error;

use super::reduce::{clean, insert_reduced, lowest, rank, reduce_remainder};
use super::{apply_theta, Coefficient, Context, DPoly, Deriv};
use crate::poly::{Monomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RgError<E> {
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("context error")]
    Context(E),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RgOptions {
    pub max_m: usize,
    pub max_n: usize,
    /// Input order and degree limits.
    pub max_order: u32,
    pub max_degree: u32,
    /// Limit on the order of derivatives created while working.
    pub max_work_order: u32,
    pub max_steps: usize,
    pub max_systems: usize,
    /// Skip Δ-pairs whose leaders have disjoint derivation support.
    pub coprime_skip: bool,
}

impl Default for RgOptions {
    fn default() -> Self {
        RgOptions {
            max_m: 2,
            max_n: 2,
            max_order: 3,
            max_degree: 4,
            max_work_order: 8,
            max_steps: 20_000,
            max_systems: 64,
            coprime_skip: false,
        }
    }
}

/// Equations `C` and the initials and separants `H_C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharSystem<C: Ring> {
    pub equations: Vec<DPoly<C>>,
    pub inequations: Vec<DPoly<C>>,
}

struct Branch<C: Ring> {
    todo: Vec<DPoly<C>>,
    a: Vec<DPoly<C>>,
    h: Vec<DPoly<C>>,
    /// Every equation the branch has seen; all must reduce to zero at the end.
    gens: Vec<DPoly<C>>,
}

fn note<C: Ring>(gens: &mut Vec<DPoly<C>>, p: &DPoly<C>) {
    if !p.is_zero() && !gens.contains(p) {
        gens.push(p.clone());
    }
}

fn check_input<C: Ring, E>(polys: &[DPoly<C>], opts: &RgOptions) -> Result<(), RgError<E>> {
    let mut vars = std::collections::BTreeSet::new();
    for p in polys {
        for v in p.vars() {
            if v.idx.len() > opts.max_m {
                return Err(RgError::Cap(format!(
                    "{} derivations > {}",
                    v.idx.len(),
                    opts.max_m
                )));
            }
            if v.ord() > opts.max_order {
                return Err(RgError::Cap(format!("order of {v} > {}", opts.max_order)));
            }
            vars.insert(v.var.clone());
        }
        if p.total_degree() > opts.max_degree {
            return Err(RgError::Cap(format!(
                "degree {} > {}",
                p.total_degree(),
                opts.max_degree
            )));
        }
    }
    if vars.len() > opts.max_n {
        return Err(RgError::Cap(format!(
            "{} indeterminates > {}",
            vars.len(),
            opts.max_n
        )));
    }
    Ok(())
}

/// `sep(g)·θ'(f) − sep(f)·θ''(g)` at the least common derivative of the leaders.
fn delta_pair<C: Coefficient, X: Context<C>>(
    f: &DPoly<C>,
    uf: &Deriv,
    g: &DPoly<C>,
    ug: &Deriv,
    ctx: &mut X,
) -> Result<DPoly<C>, X::Error> {
    let lcm: Vec<u32> = uf.idx.iter().zip(&ug.idx).map(|(a, b)| *a.max(b)).collect();
    let tf: Vec<u32> = lcm.iter().zip(&uf.idx).map(|(l, a)| l - a).collect();
    let tg: Vec<u32> = lcm.iter().zip(&ug.idx).map(|(l, a)| l - a).collect();
    let d = g
        .partial(ug)
        .mul(&apply_theta(f, &tf))
        .sub(&f.partial(uf).mul(&apply_theta(g, &tg)));
    clean(&d, ctx)
}

/// Decomposes the radical differential ideal of `eqs` saturated by `ineqs`.
/// Inconsistent input gives an empty list.
pub fn rosenfeld_groebner<C: Coefficient, X: Context<C>>(
    eqs: &[DPoly<C>],
    ineqs: &[DPoly<C>],
    ctx: &mut X,
    opts: &RgOptions,
) -> Result<Vec<CharSystem<C>>, RgError<X::Error>> {
    check_input(eqs, opts)?;
    check_input(ineqs, opts)?;
    let e = RgError::Context;
    let mut stack = vec![Branch {
        todo: eqs.to_vec(),
        a: Vec::new(),
        h: ineqs.to_vec(),
        gens: eqs.to_vec(),
    }];
    let mut out = Vec::new();
    let mut steps = 0;
    while let Some(mut b) = stack.pop() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(RgError::Cap(format!("more than {} steps", opts.max_steps)));
        }
        if stack.len() + out.len() > opts.max_systems {
            return Err(RgError::Cap(format!(
                "more than {} branches",
                opts.max_systems
            )));
        }
        let Some(i) = lowest(&b.todo, ctx).map_err(e)? else {
            // Remainders can lose factors assumed nonzero; requeue what no longer reduces.
            for g in &b.gens {
                let r = reduce_remainder(g, &b.a, ctx).map_err(e)?;
                if !r.is_zero() {
                    b.todo.push(r);
                }
            }
            if !b.todo.is_empty() {
                stack.push(b);
                continue;
            }
            if let Some(sys) = finish(b, ctx).map_err(e)? {
                out.push(sys);
            }
            continue;
        };
        let p = b.todo.swap_remove(i);
        let r = reduce_remainder(&p, &b.a, ctx).map_err(e)?;
        if r.is_zero() {
            stack.push(b);
            continue;
        }
        if r.is_constant() {
            continue;
        }
        let r = C::normalize(&r);
        let (u, d) = rank(&r, ctx).map_err(e)?.expect("not constant");
        if u.ord() > opts.max_work_order {
            return Err(RgError::Cap(format!(
                "order of {u} > {}",
                opts.max_work_order
            )));
        }
        let init = r.leading_coeff_in(&u);
        let sep = r.partial(&u);

        let mut branches = Vec::new();
        // generic branch
        {
            let mut a = b.a.clone();
            let mut todo = b.todo.clone();
            let mut gens = b.gens.clone();
            note(&mut gens, &r);
            let back = insert_reduced(&mut a, r.clone(), ctx).map_err(e)?;
            todo.extend(back);
            for g in &a {
                if *g == r {
                    continue;
                }
                let Some((ug, _)) = rank(g, ctx).map_err(e)? else {
                    continue;
                };
                if ug.var != u.var {
                    continue;
                }
                if opts.coprime_skip && ug.idx.iter().zip(&u.idx).all(|(x, y)| *x == 0 || *y == 0) {
                    continue;
                }
                let dp = delta_pair(&r, &u, g, &ug, ctx).map_err(e)?;
                if !dp.is_zero() {
                    note(&mut gens, &dp);
                    todo.push(dp);
                }
            }
            let mut h = b.h.clone();
            h.push(init.clone());
            h.push(sep.clone());
            branches.push(Branch { todo, a, h, gens });
        }
        if !init.is_constant() {
            let mut todo = b.todo.clone();
            let tail = r.sub(&init.mul(&DPoly::term(Monomial::var(u.clone(), d), C::one())));
            let tail = clean(&tail, ctx).map_err(e)?;
            let mut gens = b.gens.clone();
            note(&mut gens, &init);
            note(&mut gens, &tail);
            todo.push(init.clone());
            todo.push(tail);
            branches.push(Branch {
                todo,
                a: b.a.clone(),
                h: b.h.clone(),
                gens,
            });
        }
        if d > 1 {
            let mut todo = b.todo.clone();
            todo.push(sep.clone());
            todo.push(r.clone());
            let mut h = b.h.clone();
            h.push(init.clone());
            let mut gens = b.gens;
            note(&mut gens, &sep);
            branches.push(Branch {
                todo,
                a: b.a,
                h,
                gens,
            });
        }
        stack.extend(branches.into_iter().rev());
    }
    Ok(out)
}

/// Keeps a finished branch unless some inequation reduces to zero.
fn finish<C: Coefficient, X: Context<C>>(
    b: Branch<C>,
    ctx: &mut X,
) -> Result<Option<CharSystem<C>>, X::Error> {
    let mut hc: Vec<DPoly<C>> = Vec::new();
    for g in &b.a {
        let u = rank(g, ctx)?.expect("nonconstant").0;
        for h in [g.leading_coeff_in(&u), g.partial(&u)] {
            let h = C::normalize(&h);
            if h.as_q().is_none() && !hc.contains(&h) {
                hc.push(h);
            }
        }
    }
    for h in b.h.iter().chain(&hc) {
        if reduce_remainder(h, &b.a, ctx)?.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(CharSystem {
        equations: b.a,
        inequations: hc,
    }))
}

/// `f` reduces to zero modulo every system.
pub fn member_radical<C: Coefficient, X: Context<C>>(
    f: &DPoly<C>,
    systems: &[CharSystem<C>],
    ctx: &mut X,
) -> Result<bool, X::Error> {
    for s in systems {
        if !reduce_remainder(f, &s.equations, ctx)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
