use std::collections::BTreeMap;

use diffbound::delay::{
    parse_ds, render_ds, reshape, reshape_derivs, sigma_shift, verify_partial, verify_triple,
    wl_system, Derivs, DsPoly, DsVar, TripleSpec,
};
use diffbound::poly::{qi, Monomial, Poly, Q};
use proptest::prelude::*;

const VARS: [&str; 2] = ["y", "z"];

fn ds_var(r: usize, m: usize, h: u32) -> impl Strategy<Value = DsVar> {
    (0..r, prop::collection::vec(0u32..2, m), 0..=h)
        .prop_map(|(s, idx, k)| DsVar::new(VARS[s], idx, k))
}

fn ds_poly(r: usize, m: usize, h: u32) -> impl Strategy<Value = DsPoly> {
    prop::collection::vec(
        (
            prop::collection::vec((ds_var(r, m, h), 1u32..3), 0..3),
            -3i64..=3,
        ),
        1..4,
    )
    .prop_map(|terms| {
        Poly::from_terms(
            terms
                .into_iter()
                .map(|(vs, c)| (Monomial::from_pairs(vs), qi(c))),
        )
    })
}

/// `(r, m, F)` with at least one σ-shift so `h ≥ 1` is common.
fn system() -> impl Strategy<Value = (usize, usize, Vec<DsPoly>)> {
    (1usize..=2, 0usize..=1, 1u32..=2).prop_flat_map(|(r, m, h)| {
        (
            Just(r),
            Just(m),
            prop::collection::vec(ds_poly(r, m, h), 1..3),
        )
    })
}

fn spec_of(r: usize, m: usize, f: Vec<DsPoly>) -> TripleSpec {
    TripleSpec::new(f, &VARS[..r], m).unwrap()
}

fn seqs(r: usize, len: usize) -> impl Strategy<Value = Vec<Vec<Q>>> {
    prop::collection::vec(prop::collection::vec((0i64..3).prop_map(qi), len), r)
}

/// Solutions of `y[;2] = a*y[;1] + b*y`.
fn recurrence() -> impl Strategy<Value = (i64, i64, Vec<Q>)> {
    (-2i64..=2, -2i64..=2, -3i64..=3, -3i64..=3).prop_map(|(a, b, x0, x1)| {
        let mut xs = vec![x0, x1];
        for i in 2..8 {
            xs.push(a * xs[i - 1] + b * xs[i - 2]);
        }
        (a, b, xs.into_iter().map(qi).collect())
    })
}

fn outcome(r: Result<bool, diffbound::delay::DelayError>) -> Option<bool> {
    r.ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn partial_iff_triple_of_reshape((r, m, f) in system(), l in 0usize..4, data in seqs(2, 6)) {
        let spec = spec_of(r, m, f);
        let data: Vec<Vec<Q>> = data.into_iter().take(r).collect();
        let z = Derivs::Zero;
        let p = verify_partial(&spec, &data, l, &z).unwrap();
        let pts = reshape(&spec, &data, l).unwrap();
        prop_assert_eq!(p, verify_triple(&spec, &pts, &reshape_derivs(&spec, &z, l)).unwrap());
    }

    #[test]
    fn partial_iff_triple_with_tables(
        (r, m, f) in system(),
        l in 1usize..4,
        data in seqs(2, 6),
        table in prop::collection::vec((0usize..2, 0usize..6, -1i64..=1, any::<bool>()), 0..12),
    ) {
        prop_assume!(m == 1);
        let spec = spec_of(r, m, f);
        let data: Vec<Vec<Q>> = data.into_iter().take(r).collect();
        let mut t = BTreeMap::new();
        for (s, pos, v, second) in table {
            let theta = if second { vec![2] } else { vec![1] };
            t.insert((VARS[s % r].to_string(), pos, theta), qi(v));
        }
        let d = Derivs::Table(t);
        let p = outcome(verify_partial(&spec, &data, l, &d));
        let pts = reshape(&spec, &data, l).unwrap();
        prop_assert_eq!(p, outcome(verify_triple(&spec, &pts, &reshape_derivs(&spec, &d, l))));
    }

    #[test]
    fn recurrence_solutions_pass((a, b, xs) in recurrence(), l in 0usize..6) {
        let spec = TripleSpec::parse(&[&format!("y[;2] - ({a})*y[;1] - ({b})*y")], &["y"], 0).unwrap();
        let data = vec![xs];
        prop_assert!(verify_partial(&spec, &data, l, &Derivs::Zero).unwrap());
        let pts = reshape(&spec, &data, l).unwrap();
        prop_assert!(verify_triple(&spec, &pts, &Derivs::Zero).unwrap());
        prop_assert!(wl_system(&spec, l).evaluate(&pts).unwrap().iter().all(|v| *v == Q::default()));
    }

    #[test]
    fn wl_zeros_are_triple_solutions(
        (r, m, f) in system(),
        l in 1usize..4,
        raw in prop::collection::vec(prop::collection::vec((0i64..2).prop_map(qi), 6), 3),
    ) {
        let spec = spec_of(r, m, f);
        let pts: Vec<Vec<Q>> = raw.into_iter().take(l).map(|p| p.into_iter().take(spec.big_h()).collect()).collect();
        let w = wl_system(&spec, l);
        let zero = w.evaluate(&pts).unwrap().iter().all(|v| *v == Q::default());
        prop_assert_eq!(zero, verify_triple(&spec, &pts, &Derivs::Zero).unwrap());
    }

    #[test]
    fn gluing_count((r, m, f) in system(), l in 1usize..5) {
        let spec = spec_of(r, m, f);
        let w = wl_system(&spec, l);
        prop_assert_eq!(w.gluing.len(), (l - 1) * (spec.big_h() - spec.r()));
        prop_assert_eq!(w.blocks.len(), l);
        prop_assert!(w.blocks.iter().all(|b| b.len() == spec.big_h()));
    }

    #[test]
    fn shifts_compose((_, _, f) in system(), a in 0u32..4, b in 0u32..4) {
        for g in &f {
            prop_assert_eq!(sigma_shift(&sigma_shift(g, a), b), sigma_shift(g, a + b));
            if sigma_shift(g, a) == sigma_shift(g, b) {
                prop_assert!(a == b || g.is_constant());
            }
        }
    }

    #[test]
    fn ds_text_roundtrip((r, m, f) in system()) {
        for g in &f {
            prop_assert_eq!(&parse_ds(&render_ds(g), &VARS[..r], m).unwrap(), g);
        }
    }
}
