//! Leaders, initials, separants, reduction and autoreduction.

use std::cmp::Ordering;

use super::{apply_theta, poly_size, Coefficient, Context, DPoly, Deriv};
use crate::poly::{Monomial, Ring};

/// Drops the terms whose coefficient vanishes in `ctx`.
pub fn clean<C: Ring, X: Context<C>>(p: &DPoly<C>, ctx: &mut X) -> Result<DPoly<C>, X::Error> {
    let mut out = DPoly::zero();
    for (m, c) in p.terms() {
        let c = ctx.simplify(c)?;
        if !c.is_zero() {
            out.add_term(m.clone(), c);
        }
    }
    Ok(out)
}

fn max_by_ctx<C: Ring, X: Context<C>>(
    it: impl IntoIterator<Item = Deriv>,
    ctx: &mut X,
) -> Result<Option<Deriv>, X::Error> {
    let mut best: Option<Deriv> = None;
    for v in it {
        best = Some(match best {
            Some(b) if ctx.compare(&v, &b)? != Ordering::Greater => b,
            _ => v,
        });
    }
    Ok(best)
}

/// Highest-ranked derivative of `p`; `None` for constants.
pub fn leader<C: Ring, X: Context<C>>(
    p: &DPoly<C>,
    ctx: &mut X,
) -> Result<Option<Deriv>, X::Error> {
    max_by_ctx(p.vars(), ctx)
}

/// `(leader, degree in it)`.
pub fn rank<C: Ring, X: Context<C>>(
    p: &DPoly<C>,
    ctx: &mut X,
) -> Result<Option<(Deriv, u32)>, X::Error> {
    Ok(leader(p, ctx)?.map(|u| {
        let d = p.degree_in(&u);
        (u, d)
    }))
}

pub fn initial<C: Ring, X: Context<C>>(
    p: &DPoly<C>,
    ctx: &mut X,
) -> Result<Option<DPoly<C>>, X::Error> {
    Ok(leader(p, ctx)?.map(|u| p.leading_coeff_in(&u)))
}

pub fn separant<C: Ring, X: Context<C>>(
    p: &DPoly<C>,
    ctx: &mut X,
) -> Result<Option<DPoly<C>>, X::Error> {
    Ok(leader(p, ctx)?.map(|u| p.partial(&u)))
}

/// Compares polynomials by rank; constants are lowest.
pub fn rank_cmp<C: Ring, X: Context<C>>(
    p: &DPoly<C>,
    q: &DPoly<C>,
    ctx: &mut X,
) -> Result<Ordering, X::Error> {
    Ok(match (rank(p, ctx)?, rank(q, ctx)?) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some((u, d)), Some((v, e))) => ctx.compare(&u, &v)?.then(d.cmp(&e)),
    })
}

/// No proper derivative of `lead(g)` occurs in `p` and `deg_{lead g} p < deg g`.
pub fn is_reduced_wrt<C: Ring, X: Context<C>>(
    p: &DPoly<C>,
    g: &DPoly<C>,
    ctx: &mut X,
) -> Result<bool, X::Error> {
    let Some((u, d)) = rank(g, ctx)? else {
        return Ok(p.is_zero());
    };
    Ok(p.vars().iter().all(|v| !v.is_proper_derivative_of(&u)) && p.degree_in(&u) < d)
}

/// `multiplier · p − Σ c · θ(A_j) = remainder`, with `multiplier` a product
/// of initials and separants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction<C: Ring> {
    pub remainder: DPoly<C>,
    pub multiplier: DPoly<C>,
    /// `(c, j, θ)`.
    pub terms: Vec<(DPoly<C>, usize, Vec<u32>)>,
}

type Rank = Option<(Deriv, u32)>;

/// The highest derivative of `r` reducible by `a`, with the divisor `θ(A_j)`.
#[allow(clippy::type_complexity)]
fn next_divisor<C: Coefficient, X: Context<C>>(
    r: &DPoly<C>,
    a: &[DPoly<C>],
    ranks: &[Rank],
    ctx: &mut X,
) -> Result<Option<(Deriv, usize, Vec<u32>, DPoly<C>)>, X::Error> {
    if r.is_zero() {
        return Ok(None);
    }
    let mut best: Option<(Deriv, usize, Vec<u32>)> = None;
    for v in r.vars() {
        let hit = ranks.iter().enumerate().find_map(|(j, rk)| {
            let (u, d) = rk.as_ref()?;
            let theta = v.quotient(u)?;
            (theta.iter().any(|&t| t > 0) || r.degree_in(&v) >= *d).then_some((j, theta))
        });
        if let Some((j, theta)) = hit {
            let better = match &best {
                None => true,
                Some((b, _, _)) => ctx.compare(&v, b)? == Ordering::Greater,
            };
            if better {
                best = Some((v, j, theta));
            }
        }
    }
    let Some((v, j, theta)) = best else {
        return Ok(None);
    };
    ctx.tick(poly_size(r))?;
    let g = if theta.iter().all(|&t| t == 0) {
        a[j].clone()
    } else {
        clean(&apply_theta(&a[j], &theta), ctx)?
    };
    if g.degree_in(&v) == 0 {
        // θ(A_j) lost its leader to vanishing coefficients; nothing to divide by.
        return Ok(None);
    }
    Ok(Some((v, j, theta, g)))
}

/// The remainder of [`full_reduce`] up to a nonzero constant factor, without
/// the cofactors.
pub fn reduce_remainder<C: Coefficient, X: Context<C>>(
    p: &DPoly<C>,
    a: &[DPoly<C>],
    ctx: &mut X,
) -> Result<DPoly<C>, X::Error> {
    if a.iter().any(|g| !g.is_zero() && g.is_constant()) {
        return Ok(DPoly::zero());
    }
    let mut ranks = Vec::with_capacity(a.len());
    for g in a {
        ranks.push(rank(g, ctx)?);
    }
    let mut r = C::normalize(&clean(p, ctx)?);
    while let Some((v, _, _, g)) = next_divisor(&r, a, &ranks, ctx)? {
        let db = g.degree_in(&v);
        let lb = g.leading_coeff_in(&v);
        while !r.is_zero() && r.degree_in(&v) >= db {
            let dr = r.degree_in(&v);
            let t = r
                .leading_coeff_in(&v)
                .mul(&DPoly::term(Monomial::var(v.clone(), dr - db), C::one()));
            r = clean(&r.mul(&lb).sub(&t.mul(&g)), ctx)?;
            r = C::normalize(&r);
            ctx.tick(poly_size(&r))?;
        }
    }
    Ok(r)
}

/// Reduces `p` by every element of `a`, largest reducible derivative first.
pub fn full_reduce<C: Coefficient, X: Context<C>>(
    p: &DPoly<C>,
    a: &[DPoly<C>],
    ctx: &mut X,
) -> Result<Reduction<C>, X::Error> {
    let mut ranks = Vec::with_capacity(a.len());
    for g in a {
        ranks.push(rank(g, ctx)?);
    }
    let mut r = clean(p, ctx)?;
    let mut h = DPoly::one();
    let mut terms: Vec<(DPoly<C>, usize, Vec<u32>)> = Vec::new();
    if let Some(j) = a.iter().position(|g| !g.is_zero() && g.is_constant()) {
        // A nonzero constant in the set reduces everything to zero.
        return Ok(Reduction {
            remainder: DPoly::zero(),
            multiplier: a[j].clone(),
            terms: vec![(r, j, Vec::new())],
        });
    }
    while let Some((v, j, theta, g)) = next_divisor(&r, a, &ranks, ctx)? {
        let (r2, q, k) = r.prem(&g, &v);
        let mk = g.leading_coeff_in(&v).pow(k);
        h = h.mul(&mk);
        for t in terms.iter_mut() {
            t.0 = t.0.mul(&mk);
        }
        terms.push((q, j, theta));
        r = clean(&r2, ctx)?;
    }
    Ok(Reduction {
        remainder: r,
        multiplier: h,
        terms,
    })
}

/// Sorts by rank with insertion sort, tolerating an inconsistent oracle.
pub(crate) fn sort_by_rank<C: Ring, X: Context<C>>(
    v: &mut [DPoly<C>],
    ctx: &mut X,
) -> Result<(), X::Error> {
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && rank_cmp(&v[j - 1], &v[j], ctx)? == Ordering::Greater {
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    Ok(())
}

/// Index of a lowest-ranked element.
pub(crate) fn lowest<C: Ring, X: Context<C>>(
    v: &[DPoly<C>],
    ctx: &mut X,
) -> Result<Option<usize>, X::Error> {
    let mut best: Option<usize> = None;
    for i in 0..v.len() {
        best = Some(match best {
            Some(b) if rank_cmp(&v[i], &v[b], ctx)? != Ordering::Less => b,
            _ => i,
        });
    }
    Ok(best)
}

/// Inserts `r` (reduced w.r.t. `a`) and returns the elements it displaces.
pub(crate) fn insert_reduced<C: Coefficient, X: Context<C>>(
    a: &mut Vec<DPoly<C>>,
    r: DPoly<C>,
    ctx: &mut X,
) -> Result<Vec<DPoly<C>>, X::Error> {
    let mut keep = Vec::new();
    let mut back = Vec::new();
    for g in a.drain(..) {
        if is_reduced_wrt(&g, &r, ctx)? {
            keep.push(g);
        } else {
            back.push(g);
        }
    }
    keep.push(r);
    sort_by_rank(&mut keep, ctx)?;
    *a = keep;
    Ok(back)
}

/// Autoreduced set obtained by repeatedly reducing and inserting the lowest
/// element. A set containing a nonzero constant autoreduces to that constant.
pub fn autoreduce<C: Coefficient, X: Context<C>>(
    s: &[DPoly<C>],
    ctx: &mut X,
) -> Result<Vec<DPoly<C>>, X::Error> {
    let mut todo: Vec<DPoly<C>> = Vec::new();
    for p in s {
        let p = clean(p, ctx)?;
        if !p.is_zero() {
            todo.push(p);
        }
    }
    let mut a: Vec<DPoly<C>> = Vec::new();
    while let Some(i) = lowest(&todo, ctx)? {
        let p = todo.swap_remove(i);
        let r = reduce_remainder(&p, &a, ctx)?;
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(vec![C::normalize(&r)]);
        }
        let back = insert_reduced(&mut a, C::normalize(&r), ctx)?;
        todo.extend(back);
    }
    Ok(a)
}

/// Order on autoreduced sets sorted by rank: the first differing rank
/// decides; when one set extends the other, the longer one is lower.
pub fn set_rank_compare<C: Ring, X: Context<C>>(
    a: &[DPoly<C>],
    b: &[DPoly<C>],
    ctx: &mut X,
) -> Result<Ordering, X::Error> {
    for (p, q) in a.iter().zip(b) {
        match rank_cmp(p, q, ctx)? {
            Ordering::Equal => {}
            o => return Ok(o),
        }
    }
    Ok(b.len().cmp(&a.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffalg::{exact, parse_dpoly_q, Exact, Ranking};
    use crate::poly::Q;

    fn p(s: &str) -> DPoly<Q> {
        parse_dpoly_q(s, &["y", "z"], 1).unwrap()
    }

    fn u(s: &str) -> DPoly<Q> {
        parse_dpoly_q(s, &["u"], 2).unwrap()
    }

    fn check_identity(f: &DPoly<Q>, a: &[DPoly<Q>], red: &Reduction<Q>) {
        let mut lhs = red.multiplier.mul(f);
        for (c, j, theta) in &red.terms {
            lhs = lhs.sub(&c.mul(&apply_theta(&a[*j], theta)));
        }
        assert_eq!(lhs, red.remainder);
    }

    #[test]
    fn leaders_initials_separants() {
        let rk = Ranking::orderly(&["y", "z"], 1);
        let mut cx = Exact::new(&rk);
        let f = p("y[1]^2 - 4*y[0]");
        assert_eq!(exact(leader(&f, &mut cx)).unwrap().to_string(), "y[1]");
        assert_eq!(exact(separant(&f, &mut cx)).unwrap(), p("2*y[1]"));
        let rk2 = Ranking::orderly_with(&["u"], vec![1, 0]).unwrap();
        let mut cx2 = Exact::new(&rk2);
        assert_eq!(
            exact(initial(&u("u[0,1]*u[1,0] + u[0,0]"), &mut cx2)).unwrap(),
            u("u[1,0]")
        );
        assert!(exact(leader(&p("3"), &mut cx)).is_none());
    }

    #[test]
    fn reduction_examples() {
        let rk = Ranking::orderly(&["y", "z"], 1);
        let mut cx = Exact::new(&rk);
        let a = [p("y[1]^2 - 4*y[0]")];
        for (f, want) in [("y[2]", "4*y[1]"), ("y[2] - 2", "0")] {
            let red = exact(full_reduce(&p(f), &a, &mut cx));
            check_identity(&p(f), &a, &red);
            assert_eq!(red.remainder.primitive(), p(want).primitive(), "{f}");
        }
        let red = exact(full_reduce(&p("y[0]"), &[p("y[0]")], &mut cx));
        assert!(red.remainder.is_zero());
    }

    #[test]
    fn autoreduce_examples() {
        let rk = Ranking::orderly(&["y", "z"], 1);
        let mut cx = Exact::new(&rk);
        assert_eq!(
            exact(autoreduce(&[p("y[0]"), p("y[1]")], &mut cx)),
            [p("y[0]")]
        );
        assert_eq!(
            exact(autoreduce(&[p("y[0]^2"), p("y[0]*y[1]")], &mut cx)),
            [p("y[0]^2")]
        );
        let a = vec![p("y[0]"), p("z[1]^2 - z[0]")];
        assert_eq!(exact(autoreduce(&a, &mut cx)), a);
    }

    #[test]
    fn set_ranks() {
        let rk = Ranking::orderly(&["y", "z"], 1);
        let mut cx = Exact::new(&rk);
        let y = [p("y[0]")];
        let f = [p("y[1]^2 - 4*y[0]")];
        assert_eq!(exact(set_rank_compare(&y, &f, &mut cx)), Ordering::Less);
        let yz = [p("y[0]"), p("z[0]")];
        assert_eq!(exact(set_rank_compare(&yz, &y, &mut cx)), Ordering::Less);
        assert_eq!(exact(set_rank_compare(&f, &f, &mut cx)), Ordering::Equal);
    }
}
