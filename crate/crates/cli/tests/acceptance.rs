//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the summary is always printed; exits nonzero if any criterion fails.

mod common;
#[path = "../../core/tests/common/mod.rs"]
mod gen;

use std::time::{Duration, Instant};

use diffbound::delay::{
    reshape, reshape_derivs, verify_partial, verify_triple, wl_system, Derivs, DsPoly, DsVar,
    TripleSpec,
};
use diffbound::diffalg::{
    apply_theta, autoreduce, full_reduce, member_radical, parse_dpoly_q, rosenfeld_groebner, DPoly,
    Deriv, Exact, Ranking, RgOptions,
};
use diffbound::extract::{extract_bound, BoundResult, ExtractConfig};
use diffbound::kolchin::{
    chain_len, pipeline_a, pipeline_b, vec_norm, Bindings, ChainConfig, Evaluator, Func,
};
use diffbound::logic::{Formula, Var};
use diffbound::oracle::{builtin_from_spec, run, EvaluationOracle, Limits};
use diffbound::poly::{qf, qi, Monomial, Poly, Q};
use diffbound::theory::{Assignment, Theory};
use gen::Kind;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 1. Quantifier elimination preserves truth at random points.
fn qe_soundness() -> Outcome {
    let mut total = 0;
    for (kind, t, seed) in [
        (Kind::Dlo, Theory::dlo(), 101),
        (Kind::Lovs, Theory::lovs(), 102),
        (Kind::Acf, Theory::acf_on("K", 3), 103),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free = gen::free_vars(kind, 4);
        for _ in 0..1000 {
            let f = gen::formula(&mut rng, kind, &free, 3, 3);
            let g = t.qe(&f).map_err(|e| format!("qe({f}): {e}"))?.formula;
            check(!g.has_quantifiers(), || {
                format!("{f} -> {g} keeps quantifiers")
            })?;
            for _ in 0..20 {
                let a: Assignment = free.iter().cloned().zip(gen::tuple(&mut rng, 4)).collect();
                let (x, y) = (
                    t.model_eval(&f, &a).map_err(|e| e.to_string())?,
                    t.model_eval(&g, &a).map_err(|e| e.to_string())?,
                );
                check(x == y, || format!("{f} vs {g} at {a:?}"))?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} evaluations, 0 mismatches"))
}

fn sample(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0..=3 => qi(0),
            4..=7 => qi(rng.gen_range(-2..=2)),
            _ => qf(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
        })
        .collect()
}

/// Largest query count over every scripted answer sequence of length `k`.
fn scripted_max_queries(t: &Theory, spec: &str, k: usize) -> usize {
    let alg = builtin_from_spec(spec, t).unwrap();
    (0..1u32 << k)
        .map(|bits| {
            let prefix: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
            let out = run(
                alg.as_ref(),
                "",
                &mut EvaluationOracle::scripted(prefix),
                Limits::default(),
            )
            .unwrap();
            out.trace().expect("halts").query_count()
        })
        .max()
        .unwrap()
}

/// 2. Extracted bounds dominate sampled runs; depths match the known maxima.
fn extractor_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut cases: Vec<(Theory, String, usize)> = (1..=4)
        .map(|l| (Theory::lovs(), format!("first_nonzero({l})"), l))
        .collect();
    cases.push((Theory::acf(), "quad_roots".into(), 2));
    let gr = scripted_max_queries(&Theory::acf(), "gauss_rank(2)", 8);
    check(gr <= 3, || {
        format!("gauss_rank(2) scripted maximum {gr} > 3")
    })?;
    cases.push((Theory::acf(), "gauss_rank(2)".into(), gr));
    let mut notes = Vec::new();
    for (t, spec, want_depth) in cases {
        let alg = builtin_from_spec(&spec, &t).unwrap();
        let ex = extract_bound(&t, alg.as_ref(), "", &ExtractConfig::default())
            .map_err(|e| e.to_string())?;
        let BoundResult::Proven { n, depth, .. } = ex.result else {
            return Err(format!("{spec}: undetermined"));
        };
        check(depth == want_depth, || {
            format!("{spec}: depth {depth}, expected {want_depth}")
        })?;
        for _ in 0..500 {
            let a: Assignment = alg
                .params()
                .into_iter()
                .zip(sample(&mut rng, alg.arity()))
                .collect();
            let out = run(
                alg.as_ref(),
                "",
                &mut EvaluationOracle::model(t.clone(), a.clone()),
                Limits::default(),
            )
            .map_err(|e| e.to_string())?;
            let tr = out
                .trace()
                .ok_or_else(|| format!("{spec}: no halt at {a:?}"))?;
            check(tr.cost <= n, || {
                format!("{spec}: cost {} > N = {n}", tr.cost)
            })?;
            check(tr.query_count() <= depth, || {
                format!("{spec}: {} queries > {depth}", tr.query_count())
            })?;
        }
        notes.push(format!("{spec} d={depth} N={n}"));
    }
    Ok(notes.join(", "))
}

fn equivalent(t: &Theory, a: &Formula, b: &Formula, vars: &[Var]) -> bool {
    let s = Formula::forall_all(vars.iter().cloned(), Formula::iff(a.clone(), b.clone()));
    t.decide(&s).unwrap()
}

/// 3. Level formulas of first_nonzero(2).
fn level_semantics() -> Outcome {
    let t = Theory::lovs();
    let alg = builtin_from_spec("first_nonzero(2)", &t).unwrap();
    let ex = extract_bound(&t, alg.as_ref(), "", &ExtractConfig::default())
        .map_err(|e| e.to_string())?;
    let params = alg.params();
    let lv = &ex.state.levels;
    check(lv.len() > 3, || format!("only {} levels", lv.len()))?;
    let x1 = Formula::eq(
        diffbound::logic::Term::var(&params[0]),
        diffbound::logic::Term::int(0),
    );
    check(equivalent(&t, &lv[2].psi, &x1, &params), || {
        format!("psi_2 = {}", lv[2].psi)
    })?;
    check(equivalent(&t, &lv[3].psi, &Formula::False, &params), || {
        format!("psi_3 = {}", lv[3].psi)
    })?;
    Ok(format!("psi_2 = {}, psi_3 = {}", lv[2].psi, lv[3].psi))
}

/// 4. Rosenfeld–Gröbner on the desk examples.
fn rg_desk_cases() -> Outcome {
    let opts = RgOptions::default();
    let y = Ranking::orderly(&["y"], 1);
    let p = |s: &str| parse_dpoly_q(s, &["y"], 1).unwrap();
    let mut ex = Exact::new(&y);
    let out = rosenfeld_groebner(&[p("y[1]^2 - 4*y[0]")], &[], &mut ex, &opts)
        .map_err(|e| e.to_string())?;
    check(out.len() == 2, || {
        format!("{} systems for y_x^2 - 4y", out.len())
    })?;
    let m = |f: &str, sys: &[_], ex: &mut Exact| member_radical(&p(f), sys, ex).unwrap();
    check(m("y[0]*(y[1]^2 - 4*y[0])", &out, &mut ex), || {
        "y(y_x^2 - 4y) not a member".into()
    })?;
    check(!m("y[2] - 2", &out, &mut ex), || {
        "y_xx - 2 a member overall".into()
    })?;
    check(m("y[2] - 2", &out[..1], &mut ex), || {
        "y_xx - 2 not a member of the generic component".into()
    })?;
    let u = Ranking::orderly(&["u"], 2);
    let q = |s: &str| parse_dpoly_q(s, &["u"], 2).unwrap();
    let out_u = rosenfeld_groebner(&[q("u[1,0]"), q("u[0,1]")], &[], &mut Exact::new(&u), &opts)
        .map_err(|e| e.to_string())?;
    check(out_u.len() == 1, || {
        format!("{} systems for u_x, u_y", out_u.len())
    })?;
    let out_1 = rosenfeld_groebner(&[p("1")], &[], &mut Exact::new(&y), &opts)
        .map_err(|e| e.to_string())?;
    check(out_1.is_empty(), || {
        format!("{} systems for {{1}}", out_1.len())
    })?;
    Ok("2 / 1 / 0 systems, memberships as expected".into())
}

fn random_dpoly(rng: &mut ChaCha8Rng, vars: &[&str], m: usize) -> DPoly<Q> {
    let terms = rng.gen_range(1..=3);
    Poly::from_terms((0..terms).map(|_| {
        let deg = rng.gen_range(0..=3);
        let mut left = deg;
        let mut factors = Vec::new();
        while left > 0 {
            let e = rng.gen_range(1..=left);
            left -= e;
            let mut idx = vec![0u32; m];
            let mut ord = rng.gen_range(0..=2);
            while ord > 0 {
                idx[rng.gen_range(0..m)] += 1;
                ord -= 1;
            }
            factors.push((Deriv::new(vars.choose(rng).unwrap(), idx), e as u32));
        }
        (
            Monomial::from_pairs(factors),
            qi(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }),
        )
    }))
}

/// 5. `h·p − Σ c·θ(A_j)` equals the remainder.
fn reduction_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut done, mut skipped) = (0, 0);
    while done < 200 {
        let m = rng.gen_range(1..=2);
        let vars: &[&str] = if rng.gen_bool(0.5) {
            &["u"]
        } else {
            &["u", "v"]
        };
        let rk = Ranking::orderly(vars, m);
        let set: Vec<DPoly<Q>> = (0..rng.gen_range(1..=3))
            .map(|_| random_dpoly(&mut rng, vars, m))
            .collect();
        let p = random_dpoly(&mut rng, vars, m);
        let mut ex = Exact::new(&rk);
        let Ok(a) = autoreduce(&set, &mut ex) else {
            skipped += 1;
            continue;
        };
        let Ok(red) = full_reduce(&p, &a, &mut ex) else {
            skipped += 1;
            continue;
        };
        let mut lhs = red.multiplier.mul(&p);
        for (c, j, theta) in &red.terms {
            lhs = lhs.sub(&c.mul(&apply_theta(&a[*j], theta)));
        }
        check(lhs == red.remainder, || {
            format!("identity fails for p = {p:?}, A = {a:?}")
        })?;
        done += 1;
    }
    check(skipped == 0, || {
        format!("{skipped} instances ran out of budget")
    })?;
    Ok(format!("{done} identities exact"))
}

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

fn brute_chain(g: &[u64], dim: usize) -> u64 {
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

/// 6. Chain lengths against enumeration.
fn chain_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let cfg = ChainConfig::default();
    let mut n = 0;
    for dim in 1..=2 {
        for _ in 0..300 {
            let g: Vec<u64> = (0..10).map(|_| rng.gen_range(0..=3)).collect();
            let got = chain_len(|i| g.get(i as usize).copied().unwrap_or(0), dim, &cfg)
                .map_err(|e| e.to_string())?;
            let want = brute_chain(&g, dim);
            check(got == want, || {
                format!("dim {dim}, g = {g:?}: {got} vs {want}")
            })?;
            n += 1;
        }
    }
    for c in 0..=5u64 {
        let got = chain_len(|_| c, 1, &cfg).map_err(|e| e.to_string())?;
        check(got == c + 1, || format!("g ≡ {c}: {got}"))?;
    }
    Ok(format!("{n} random g, constants 0..=5"))
}

/// 7. Pipelines with the documented stubs.
fn pipeline_expansion() -> Outcome {
    let mut b = Bindings::stub("example").unwrap();
    b.merge(&Bindings::stub("example-b").unwrap());
    let ex = Bindings::stub("example").unwrap();
    let ev = Evaluator::new(&ex);
    let a = pipeline_a(1, Some(&ev)).map_err(|e| e.to_string())?;
    // G(0) = max(Components(1,1)+1, KolchinProj(1)), G(j+1) = Iter(1, G(j)).
    let call = |f, args: &[i64]| -> BigInt {
        ex.call(
            f,
            &args.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>(),
        )
        .unwrap()
    };
    let g0 = (call(Func::Components, &[1, 1]) + BigInt::from(1)).max(call(Func::KolchinProj, &[1]));
    let mut hand = vec![g0];
    for _ in 0..2 {
        let next = ex
            .call(Func::Iter, &[BigInt::from(1), hand.last().unwrap().clone()])
            .unwrap();
        hand.push(next);
    }
    let want: Vec<BigInt> = [2, 3, 4].map(BigInt::from).to_vec();
    check(hand == want, || format!("hand expansion {hand:?}"))?;
    check(a.trace.len() >= 3 && a.trace[..3] == want[..], || {
        format!("trace {:?}", a.trace)
    })?;
    let eb = Evaluator::new(&b);
    let pb = pipeline_b(1, 1, 1, Some(&eb)).map_err(|e| e.to_string())?;
    check(pb.value == Some(BigInt::from(6)), || {
        format!("B(1,1,1) = {:?}", pb.value)
    })?;
    Ok(format!(
        "G = 2, 3, 4, …; A(1) = {}; B(1,1,1) = 6",
        a.value.unwrap()
    ))
}

fn random_spec(rng: &mut ChaCha8Rng) -> TripleSpec {
    let names = ["y", "z", "w"];
    let r = rng.gen_range(1..=3);
    let m = rng.gen_range(0..=1);
    let h = rng.gen_range(0..=3);
    let var = |rng: &mut ChaCha8Rng, k: u32| {
        DsVar::new(
            names[rng.gen_range(0..r)],
            (0..m).map(|_| rng.gen_range(0..2)).collect(),
            k,
        )
    };
    let mut fs = Vec::new();
    for i in 0..rng.gen_range(1..=2) {
        // The first polynomial reaches σ-order h.
        let top = var(rng, h);
        let lead = if i == 0 {
            DsPoly::var(top)
        } else {
            DsPoly::zero()
        };
        let extra: DsPoly = Poly::from_terms((0..rng.gen_range(0..3)).map(|_| {
            let k = rng.gen_range(0..=h);
            (
                Monomial::var(var(rng, k), rng.gen_range(1..=2)),
                qi(rng.gen_range(-2..=2)),
            )
        }));
        fs.push(
            lead.add(&extra)
                .add(&DsPoly::from_q(qi(rng.gen_range(-1..=1)))),
        );
    }
    TripleSpec::new(fs, &names[..r], m).unwrap()
}

/// 8. Delay verifiers.
fn delay_verifiers() -> Outcome {
    let spec = TripleSpec::parse(&["y[;1] - 2*y"], &["y"], 0).map_err(|e| e.to_string())?;
    let z = Derivs::Zero;
    check(
        verify_partial(&spec, &[vec![qi(1), qi(2), qi(4)]], 2, &z) == Ok(true),
        || "(1,2,4)".into(),
    )?;
    check(
        verify_partial(&spec, &[vec![qi(1), qi(2), qi(5)]], 2, &z) == Ok(false),
        || "(1,2,5)".into(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..50 {
        let s = random_spec(&mut rng);
        let l = rng.gen_range(1..=5);
        let w = wl_system(&s, l);
        check(w.gluing.len() == (l - 1) * (s.big_h() - s.r()), || {
            format!(
                "gluing {} for H = {}, r = {}, ℓ = {l}",
                w.gluing.len(),
                s.big_h(),
                s.r()
            )
        })?;
    }
    let (mut agree, mut positive) = (0, 0);
    while agree < 100 {
        let s = random_spec(&mut rng);
        let l = rng.gen_range(0..=3);
        let len = l + s.h as usize;
        let seqs: Vec<Vec<Q>> = (0..s.r())
            .map(|_| (0..len).map(|_| qi(rng.gen_range(-1..=1))).collect())
            .collect();
        let p = verify_partial(&s, &seqs, l, &z).map_err(|e| e.to_string())?;
        let pts = reshape(&s, &seqs, l).map_err(|e| e.to_string())?;
        let t = verify_triple(&s, &pts, &reshape_derivs(&s, &z, l)).map_err(|e| e.to_string())?;
        check(p == t, || format!("partial {p}, triple {t} for {:?}", s.f))?;
        agree += 1;
        positive += p as usize;
    }
    Ok(format!(
        "50 gluing counts, {agree} agreements ({positive} solutions)"
    ))
}

/// 9. Golden outputs are byte-identical across runs and thread counts.
fn determinism() -> Outcome {
    let cases = common::cases();
    for case in &cases {
        for format in ["human", "machine"] {
            let golden =
                std::fs::read(common::golden_dir().join(format!("{}.{format}", case.name)))
                    .map_err(|e| format!("{}: {e}", case.name))?;
            for threads in [1, 4, 1, 4] {
                let out = common::run_case(case, format, threads);
                check(out.status.success() && out.stdout == golden, || {
                    format!("{}.{format} differs with {threads} threads", case.name)
                })?;
            }
        }
    }
    Ok(format!("{} cases × 2 formats × 4 runs", cases.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("QE soundness", qe_soundness, 60),
        ("extractor soundness", extractor_soundness, 120),
        ("extractor level semantics", level_semantics, 5),
        ("Rosenfeld–Gröbner desk cases", rg_desk_cases, 10),
        ("reduction identity", reduction_identity, 60),
        ("chain_len oracle equivalence", chain_equivalence, 30),
        ("pipeline expansion", pipeline_expansion, 1),
        ("delay verifiers", delay_verifiers, 10),
        ("determinism", determinism, 120),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let res = match res {
            Ok(d) if took > Duration::from_secs(*limit) => {
                Err(format!("{d}; over the {limit} s limit"))
            }
            r => r,
        };
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => ("FAIL", e.clone()),
        };
        println!(
            "{tag} {}. {name} [{:.2} s / {limit} s]: {detail}",
            i + 1,
            took.as_secs_f64()
        );
        failed += res.is_err() as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
