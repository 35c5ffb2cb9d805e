use std::cmp::Ordering;

use diffbound::diffalg::{
    apply_theta, derive, exact, full_reduce, is_reduced_wrt, leader, parse_ranking, rank,
    rosenfeld_groebner, DPoly, Deriv, Exact, Ranking, RgError, RgOptions,
};
use diffbound::poly::{qi, DiffVar, Monomial, Q};
use proptest::prelude::*;

fn deriv(vars: &'static [&'static str], m: usize) -> impl Strategy<Value = Deriv> {
    (0..vars.len(), prop::collection::vec(0u32..3, m))
        .prop_map(move |(v, idx)| Deriv::new(vars[v], idx))
}

fn dpoly(
    vars: &'static [&'static str],
    m: usize,
    max_terms: usize,
) -> impl Strategy<Value = DPoly<Q>> {
    let term = (
        -3i64..=3,
        prop::collection::vec((deriv(vars, m), 1u32..3), 0..3),
    );
    prop::collection::vec(term, 1..=max_terms).prop_map(|ts| {
        DPoly::from_terms(
            ts.into_iter()
                .map(|(c, fs)| (Monomial::from_pairs(fs), qi(c))),
        )
    })
}

fn rankings(m: usize) -> Vec<Ranking> {
    let mut out = vec![
        Ranking::orderly(&["u", "v"], m),
        Ranking::elimination(&[&["v"], &["u"]], m),
    ];
    if m == 2 {
        out.push(parse_ranking("orderly(u,v)/1,0", 2).unwrap());
        out.push(
            parse_ranking("matrix(u: 1 1 0, 1 0 0, 0 0 0; v: 1 1 1, 1 0 0, 0 0 0)", 2).unwrap(),
        );
        out.push(
            parse_ranking("matrix(u: 0 0 0, 1 1 0, 0 1 0; v: 0 0 1, 1 1 0, 0 1 0)", 2).unwrap(),
        );
    }
    out
}

const UV: &[&str] = &["u", "v"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ranking_axioms(a in deriv(UV, 2), b in deriv(UV, 2), i in 0usize..2) {
        for rk in rankings(2) {
            prop_assert_eq!(rk.compare(&a.derive(i), &a), Ordering::Greater);
            if rk.compare(&a, &b) == Ordering::Greater {
                prop_assert_eq!(rk.compare(&a.derive(i), &b.derive(i)), Ordering::Greater);
            }
            prop_assert_eq!(rk.compare(&a, &b), rk.compare(&b, &a).reverse());
        }
    }

    #[test]
    fn derivations_commute(p in dpoly(UV, 2, 4)) {
        prop_assert_eq!(derive(&derive(&p, 0), 1), derive(&derive(&p, 1), 0));
    }

    #[test]
    fn reduction_identity_and_reducedness(f in dpoly(UV, 2, 3), g in dpoly(UV, 2, 2), ri in 0usize..5) {
        let rks = rankings(2);
        let rk = &rks[ri % rks.len()];
        let mut cx = Exact::new(rk);
        prop_assume!(exact(leader(&g, &mut cx)).is_some());
        let a = [g.clone()];
        let red = exact(full_reduce(&f, &a, &mut cx));
        let mut lhs = red.multiplier.mul(&f);
        for (c, j, theta) in &red.terms {
            lhs = lhs.sub(&c.mul(&apply_theta(&a[*j], theta)));
        }
        prop_assert_eq!(&lhs, &red.remainder);
        prop_assert!(exact(is_reduced_wrt(&red.remainder, &g, &mut cx)));
    }
}

fn y_poly() -> impl Strategy<Value = DPoly<Q>> {
    dpoly(&["y"], 1, 3).prop_filter("order and degree within caps", |p| {
        p.total_degree() <= 3 && p.vars().iter().all(|v| v.ord() <= 2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn rg_generators_reduce_and_inequations_survive(ps in prop::collection::vec(y_poly(), 1..3)) {
        let rk = Ranking::orderly(&["y"], 1);
        let mut cx = Exact::with_budget(&rk, 1 << 13, 20_000);
        let opts = RgOptions { max_steps: 2000, ..RgOptions::default() };
        let out = match rosenfeld_groebner(&ps, &[], &mut cx, &opts) {
            Ok(o) => o,
            Err(RgError::Cap(_)) | Err(RgError::Context(_)) => return Ok(()),
        };
        let mut cx = Exact::new(&rk);
        for sys in &out {
            for p in &ps {
                prop_assert!(exact(full_reduce(p, &sys.equations, &mut cx)).remainder.is_zero(), "{:?}", sys);
            }
            for h in &sys.inequations {
                prop_assert!(!exact(full_reduce(h, &sys.equations, &mut cx)).remainder.is_zero());
            }
            for (k, g) in sys.equations.iter().enumerate() {
                for (l, other) in sys.equations.iter().enumerate() {
                    if k != l {
                        prop_assert!(exact(is_reduced_wrt(g, other, &mut cx)));
                    }
                }
            }
            prop_assert!(sys.equations.iter().all(|g| exact(rank(g, &mut cx)).is_some()));
        }
    }
}
