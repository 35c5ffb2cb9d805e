//! Random formula generators shared by integration tests.
#![allow(dead_code)]

use diffbound::logic::{Formula, Term, Var};
use diffbound::poly::{qf, qi, Q};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Dlo,
    Lovs,
    Acf,
}

impl Kind {
    pub fn sort(self) -> &'static str {
        match self {
            Kind::Dlo => "O",
            Kind::Lovs => "R",
            Kind::Acf => "K",
        }
    }
}

pub fn free_vars(kind: Kind, n: usize) -> Vec<Var> {
    (1..=n)
        .map(|i| Var::new(&format!("x{i}"), kind.sort()))
        .collect()
}

fn small_q<R: Rng>(rng: &mut R) -> Q {
    if rng.gen_bool(0.8) {
        qi(rng.gen_range(-3..=3))
    } else {
        qf(rng.gen_range(-3..=3), rng.gen_range(1..=3))
    }
}

fn pick<'a, R: Rng>(rng: &mut R, scope: &'a [Var]) -> &'a Var {
    scope.choose(rng).expect("nonempty scope")
}

fn atom<R: Rng>(rng: &mut R, kind: Kind, scope: &[Var], max_deg: u32) -> Formula {
    match kind {
        Kind::Dlo => {
            let a = Term::var(pick(rng, scope));
            let b = if rng.gen_bool(0.75) {
                Term::var(pick(rng, scope))
            } else {
                Term::Num(qi(rng.gen_range(-2..=2)))
            };
            let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
            if rng.gen_bool(0.6) {
                Formula::lt(a, b)
            } else {
                Formula::eq(a, b)
            }
        }
        Kind::Lovs => {
            let k = rng.gen_range(1..=2);
            let mut parts = Vec::new();
            for _ in 0..k {
                let c = qi(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
                parts.push(Term::mul(vec![Term::Num(c), Term::var(pick(rng, scope))]));
            }
            parts.push(Term::Num(small_q(rng)));
            let lhs = Term::add(parts);
            if rng.gen_bool(0.6) {
                Formula::lt(lhs, Term::int(0))
            } else {
                Formula::eq(lhs, Term::int(0))
            }
        }
        Kind::Acf => {
            let k = rng.gen_range(1..=3);
            let mut parts = Vec::new();
            for _ in 0..k {
                let d = rng.gen_range(1..=max_deg);
                let mut f = vec![Term::Num(qi(
                    rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }
                ))];
                for _ in 0..d {
                    f.push(Term::var(pick(rng, scope)));
                }
                parts.push(Term::mul(f));
            }
            parts.push(Term::Num(qi(rng.gen_range(-2..=2))));
            Formula::eq(Term::add(parts), Term::int(0))
        }
    }
}

/// Random formula with at most `max_q` quantifiers over `free` plus bound
/// variables `y1..`.
pub fn formula<R: Rng>(
    rng: &mut R,
    kind: Kind,
    free: &[Var],
    max_q: usize,
    max_deg: u32,
) -> Formula {
    let mut budget = max_q;
    let mut scope = free.to_vec();
    gen(rng, kind, &mut scope, &mut budget, 3, max_deg)
}

fn gen<R: Rng>(
    rng: &mut R,
    kind: Kind,
    scope: &mut Vec<Var>,
    budget: &mut usize,
    depth: u32,
    max_deg: u32,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return atom(rng, kind, scope, max_deg);
    }
    let choice = rng.gen_range(0..10);
    match choice {
        0..=2 if *budget > 0 => {
            *budget -= 1;
            let v = Var::new(&format!("y{}", *budget + 1), kind.sort());
            scope.push(v.clone());
            let body = gen(rng, kind, scope, budget, depth - 1, max_deg);
            scope.pop();
            if rng.gen_bool(0.5) {
                Formula::Exists(v, body.into())
            } else {
                Formula::Forall(v, body.into())
            }
        }
        3 => Formula::Not(gen(rng, kind, scope, budget, depth - 1, max_deg).into()),
        4 => {
            let a = gen(rng, kind, scope, budget, depth - 1, max_deg);
            let b = gen(rng, kind, scope, budget, depth - 1, max_deg);
            if rng.gen_bool(0.5) {
                Formula::Implies(a.into(), b.into())
            } else {
                Formula::Iff(a.into(), b.into())
            }
        }
        5..=6 => {
            let n = rng.gen_range(2..=3);
            Formula::And(
                (0..n)
                    .map(|_| gen(rng, kind, scope, budget, depth - 1, max_deg))
                    .collect::<Vec<_>>()
                    .into(),
            )
        }
        _ => {
            let n = rng.gen_range(2..=3);
            Formula::Or(
                (0..n)
                    .map(|_| gen(rng, kind, scope, budget, depth - 1, max_deg))
                    .collect::<Vec<_>>()
                    .into(),
            )
        }
    }
}

pub fn tuple<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                qi(rng.gen_range(-1..=1))
            } else {
                small_q(rng)
            }
        })
        .collect()
}
