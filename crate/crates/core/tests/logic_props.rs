mod common;

use common::Kind;
use diffbound::logic::{
    alpha_eq, is_prenex_nnf, parse_formula, substitute, to_prenex_nnf, Binding, Formula,
    ParseContext, Term,
};
use diffbound::theory::{Assignment, Theory};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Dlo), Just(Kind::Lovs), Just(Kind::Acf)]
}

fn theory(kind: Kind) -> Theory {
    match kind {
        Kind::Dlo => Theory::dlo(),
        Kind::Lovs => Theory::lovs(),
        Kind::Acf => Theory::acf(),
    }
}

fn sample(kind: Kind, seed: u64) -> (Formula, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free = common::free_vars(kind, 3);
    let f = common::formula(&mut rng, kind, &free, 2, 2);
    let a = free.into_iter().zip(common::tuple(&mut rng, 3)).collect();
    (f, a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(k in kind(), seed in any::<u64>()) {
        let (f, _) = sample(k, seed);
        let text = f.to_string();
        let g = parse_formula(&text, &ParseContext::with_default_sort(k.sort())).unwrap();
        prop_assert!(alpha_eq(&f, &g), "{} reparsed as {}", text, g);
        prop_assert_eq!(g.to_string(), text);
    }

    #[test]
    fn prenex_nnf_preserves_meaning(k in kind(), seed in any::<u64>()) {
        let (f, a) = sample(k, seed);
        let p = to_prenex_nnf(&f);
        prop_assert!(is_prenex_nnf(&p), "{}", p);
        prop_assert_eq!(p.free_vars(), f.free_vars());
        let t = theory(k);
        prop_assert_eq!(t.model_eval(&p, &a).unwrap(), t.model_eval(&f, &a).unwrap());
    }

    /// `f[x1 := x2]` at `a` agrees with `f` at `a[x1 := a(x2)]`, so no bound
    /// `x2` captures the replacement.
    #[test]
    fn substitution_avoids_capture(k in kind(), seed in any::<u64>()) {
        let (f, a) = sample(k, seed);
        let free = common::free_vars(k, 3);
        let (x1, x2) = (&free[0], &free[1]);
        let b: Binding = [(x1.clone(), Term::var(x2))].into_iter().collect();
        let g = substitute(&f, &b).unwrap();
        prop_assert!(!g.free_vars().contains(x1));
        let mut a2 = a.clone();
        a2.insert(x1.clone(), a[x2].clone());
        let t = theory(k);
        prop_assert_eq!(t.model_eval(&g, &a).unwrap(), t.model_eval(&f, &a2).unwrap(), "{} -> {}", f, g);
    }
}
