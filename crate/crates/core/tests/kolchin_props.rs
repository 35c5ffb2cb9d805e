use std::cmp::Ordering;

use diffbound::kolchin::{
    chain, chain_len, parse_bound_expr, pipeline_a, pipeline_b, vec_norm, Bindings, BoundExpr,
    ChainConfig, Embedding, Evaluator, Func, NumericPoly, TopDown,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn vectors(dim: usize, max_norm: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max_norm).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| vec_norm(v) <= max_norm as u128);
    out
}

/// Longest chain by trying every successor.
fn brute(g: &[u64], dim: usize) -> u64 {
    let all = vectors(dim, 3);
    fn go(prev: &[u64], i: usize, g: &[u64], all: &[Vec<u64>]) -> u64 {
        let bound = g.get(i).copied().unwrap_or(0) as u128;
        all.iter()
            .filter(|v| v.as_slice() < prev && vec_norm(v) <= bound)
            .map(|v| 1 + go(v, i + 1, g, all))
            .max()
            .unwrap_or(0)
    }
    all.iter()
        .filter(|v| vec_norm(v) <= g[0] as u128)
        .map(|v| 1 + go(v, 1, g, &all))
        .max()
        .unwrap_or(0)
}

fn npoly() -> impl Strategy<Value = NumericPoly> {
    prop::collection::vec(-6i64..=6, 0..5).prop_map(|cs| NumericPoly::from_i64s(&cs))
}

fn expr() -> impl Strategy<Value = BoundExpr> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(BoundExpr::lit),
        prop::sample::select(vec!["n", "r", "m", "s", "j"]).prop_map(BoundExpr::var),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(BoundExpr::Add),
            prop::collection::vec(inner.clone(), 1..4).prop_map(BoundExpr::Mul),
            prop::collection::vec(inner.clone(), 1..4).prop_map(BoundExpr::Max),
            (
                prop::sample::select(Func::ALL.to_vec()),
                prop::collection::vec(inner.clone(), 4)
            )
                .prop_map(|(f, mut xs)| {
                    xs.truncate(f.arity());
                    BoundExpr::call(f, xs)
                }),
            (inner.clone(), inner.clone(), inner.clone())
                .prop_map(|(a, b, c)| BoundExpr::nest(a, b, c)),
            (inner.clone(), inner).prop_map(|(d, b)| BoundExpr::chain_len("j", d, b)),
        ]
    })
}

/// Affine stubs with non-negative coefficients, bounded so chains stay short.
#[derive(Debug, Clone, Copy)]
struct Stub {
    comp: u64,
    proj: u64,
    step: u64,
    gus: u64,
}

fn stub_pair() -> impl Strategy<Value = (Stub, Stub)> {
    (
        (0u64..2, 0u64..2, 0u64..3, 1u64..3),
        (0u64..2, 0u64..2, 0u64..2, 0u64..2),
    )
        .prop_map(|(a, d)| {
            let lo = Stub {
                comp: a.0,
                proj: a.1,
                step: a.2,
                gus: a.3,
            };
            let hi = Stub {
                comp: a.0 + d.0,
                proj: a.1 + d.1,
                step: (a.2 + d.2).min(3),
                gus: a.3 + d.3,
            };
            (lo, hi)
        })
}

fn bind(s: Stub) -> Bindings {
    let mut b = Bindings::new();
    b.bind(Func::Components, "test", move |a| {
        Ok(&a[1] + BigInt::from(s.comp))
    });
    b.bind(Func::KolchinProj, "test", move |a| {
        Ok(&a[0] + BigInt::from(s.proj))
    });
    b.bind(
        Func::Iter,
        "test",
        move |a| Ok(&a[1] + BigInt::from(s.step)),
    );
    b.bind(Func::Gustavson, "test", move |a| {
        Ok(a.iter().sum::<BigInt>() * BigInt::from(s.gus))
    });
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chain_len_matches_enumeration(dim in 1usize..=2, g in prop::collection::vec(0u64..=3, 10)) {
        let got = chain_len(|i| g.get(i as usize).copied().unwrap_or(0), dim, &ChainConfig::default()).unwrap();
        prop_assert_eq!(got, brute(&g, dim));
    }

    #[test]
    fn constructed_chains_are_no_longer(
        dim in 1usize..=3,
        g in prop::collection::vec(0u64..=6, 12),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 12),
    ) {
        let gf = |i: u64| g.get(i as usize).copied().unwrap_or(0);
        let bound = chain_len(gf, dim, &ChainConfig::default()).unwrap();
        // A random chain: each step picks any admissible smaller vector.
        let all = vectors(dim, 6);
        let mut seq: Vec<Vec<u64>> = Vec::new();
        for (i, pick) in picks.iter().enumerate() {
            let cands: Vec<&Vec<u64>> = all
                .iter()
                .filter(|v| vec_norm(v) <= gf(i as u64) as u128 && seq.last().is_none_or(|p| v.as_slice() < p.as_slice()))
                .collect();
            if cands.is_empty() {
                break;
            }
            seq.push(pick.get(&cands).to_vec());
        }
        prop_assert!((seq.len() as u64) < bound + 1);
        let w = chain(|i| Ok(gf(i)), dim, &ChainConfig::default(), true).unwrap();
        prop_assert_eq!(w.witness.len() as u64, bound);
        for (i, pair) in w.witness.windows(2).enumerate() {
            prop_assert!(pair[0] > pair[1]);
            prop_assert!(vec_norm(&pair[1]) <= gf(i as u64 + 1) as u128);
        }
    }

    #[test]
    fn np_compare_is_a_total_order(a in npoly(), b in npoly(), c in npoly()) {
        prop_assert_eq!(a.compare(&b), b.compare(&a).reverse());
        prop_assert_eq!(a.compare(&b) == Ordering::Equal, a == b);
        if a.compare(&b) != Ordering::Greater && b.compare(&c) != Ordering::Greater {
            prop_assert_ne!(a.compare(&c), Ordering::Greater);
        }
        let t = BigInt::from(10) * (a.norm() + b.norm());
        prop_assert_eq!(a.eval(&t).cmp(&b.eval(&t)), a.compare(&b));
    }

    #[test]
    fn top_down_preserves_order(a in npoly(), b in npoly()) {
        let (ea, eb) = (TopDown.embed(&a, 5), TopDown.embed(&b, 5));
        if let (Some(ea), Some(eb)) = (ea, eb) {
            prop_assert_eq!(ea.cmp(&eb), a.compare(&b));
            prop_assert_eq!(vec_norm(&ea), a.norm().try_into().unwrap());
        }
    }

    #[test]
    fn numeric_poly_text_roundtrip(a in npoly()) {
        prop_assert_eq!(NumericPoly::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn bound_expr_prefix_roundtrip(e in expr()) {
        prop_assert_eq!(parse_bound_expr(&e.to_prefix()).unwrap(), e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pipelines_are_monotone_in_bindings((lo, hi) in stub_pair(), r in 0u64..2, m in 0u64..2, s in 0u64..2) {
        let (bl, bh) = (bind(lo), bind(hi));
        let (el, eh) = (Evaluator::new(&bl), Evaluator::new(&bh));
        let al = pipeline_a(1, Some(&el)).unwrap();
        let ah = pipeline_a(1, Some(&eh)).unwrap();
        prop_assert!(al.value <= ah.value, "{:?} {:?}", al, ah);
        let pl = pipeline_b(r, m, s, Some(&el)).unwrap();
        let ph = pipeline_b(r, m, s, Some(&eh)).unwrap();
        prop_assert!(pl.value <= ph.value);
    }
}
