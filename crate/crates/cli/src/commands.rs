use std::cell::RefCell;
use std::collections::HashMap;

use diffbound::delay::{
    nullstellensatz_system, parse_point_derivs, parse_seq_derivs, render_ds, render_point,
    verify_partial, verify_triple, wl_system, Derivs, TripleSpec,
};
use diffbound::diffalg::{
    autoreduce, full_reduce, member_radical, parse_dpoly_q, parse_ranking, render_poly,
    rosenfeld_groebner, CharSystem, DPoly, Exact, Ranking, RgError, RgOptions,
};
use diffbound::extract::{extract_bound, extract_bound_all_inputs, BoundResult, ExtractConfig};
use diffbound::kolchin::{
    chain, extractor_size, monotone_envelope, parse_bound_expr, pipeline_a, pipeline_b, Bindings,
    ChainConfig, Evaluator, Func, KolchinError,
};
use diffbound::logic::{parse_formula, Formula, ParseContext};
use diffbound::oracle::{builtin_from_spec, run, AlgRef, EvaluationOracle, Limits, RunOutcome};
use diffbound::poly::{parse_q, Q};
use diffbound::theory::{Theory, DEFAULT_MAX_DEGREE};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::Record;
use crate::{dom, BindOpts, CliError, Cmd, DiffOpts, TheoryOpts};

pub fn dispatch(cmd: Cmd, cfg: &Config) -> Result<Record, CliError> {
    match cmd {
        Cmd::Decide { theory, formula } => decide(&theory, &formula, cfg),
        Cmd::Qe { theory, formula } => qe(&theory, &formula, cfg),
        Cmd::Run {
            theory,
            alg,
            arity,
            input,
            oracle,
            max_queries,
            max_cost,
        } => {
            let t = theory_of(&theory, cfg)?;
            let alg = algorithm(&alg, arity, &t)?;
            let limits = Limits {
                max_queries: cfg.pick(max_queries, "max-queries", Limits::default().max_queries)?,
                max_cost: cfg.pick(max_cost, "max-cost", Limits::default().max_cost)?,
            };
            run_cmd(&t, alg, &input, &oracle, limits, max_degree(&theory, cfg)?)
        }
        Cmd::ExtractBound {
            theory,
            alg,
            arity,
            input,
            all_inputs,
            max_depth,
            max_branches,
            max_mode,
            no_prune,
            levels,
        } => {
            let t = theory_of(&theory, cfg)?;
            let alg = algorithm(&alg, arity, &t)?;
            let d = ExtractConfig::default();
            let ecfg = ExtractConfig {
                max_depth: cfg.pick(max_depth, "max-depth", d.max_depth)?,
                prune: !no_prune,
                max_mode,
                max_branches: cfg.pick(max_branches, "max-branches", d.max_branches)?,
            };
            extract_cmd(&t, alg, &input, all_inputs, &ecfg, levels)
        }
        Cmd::Reduce { diff, poly, by } => {
            let ctx = DiffCtx::new(&diff, cfg)?;
            reduce_cmd(&ctx, &poly, &split(&by))
        }
        Cmd::Autoreduce { diff, polys } => {
            let ctx = DiffCtx::new(&diff, cfg)?;
            let set = ctx.polys(&split(&polys))?;
            let out = autoreduce(&set, &mut Exact::new(&ctx.ranking)).map_err(dom)?;
            let mut r = ctx.record("autoreduce");
            r.set("set", strings(out.iter().map(render_poly)));
            Ok(r)
        }
        Cmd::Rg { diff, eqs, ineq } => {
            let ctx = DiffCtx::new(&diff, cfg)?;
            let systems = ctx.rg(&split(&eqs), &split(&ineq))?;
            let mut r = ctx.record("rg");
            r.set("count", systems.len())
                .set("systems", systems_value(&systems));
            Ok(r)
        }
        Cmd::Member {
            diff,
            poly,
            eqs,
            ineq,
        } => {
            let ctx = DiffCtx::new(&diff, cfg)?;
            let f = ctx.poly(&poly)?;
            let systems = ctx.rg(&split(&eqs), &split(&ineq))?;
            let mut ex = Exact::new(&ctx.ranking);
            let each = systems
                .iter()
                .map(|s| member_radical(&f, std::slice::from_ref(s), &mut ex))
                .collect::<Result<Vec<bool>, _>>()
                .map_err(dom)?;
            let mut r = ctx.record("member");
            r.set("poly", render_poly(&f))
                .set("member", each.iter().all(|&b| b))
                .set("count", systems.len())
                .set(
                    "systems",
                    Value::Array(
                        systems
                            .iter()
                            .zip(&each)
                            .map(|(s, b)| {
                                let mut v = system_value(s);
                                v["member"] = json!(b);
                                v
                            })
                            .collect(),
                    ),
                );
            Ok(r)
        }
        Cmd::Chainlen {
            dim,
            g,
            tail,
            expr,
            witness,
            bind,
        } => chainlen_cmd(
            dim,
            g.as_deref(),
            tail,
            expr.as_deref(),
            witness,
            &bind,
            cfg,
        ),
        Cmd::BoundA { n, bind } => {
            if n == 0 {
                return Err(CliError::Usage("bound-A needs n ≥ 1".into()));
            }
            let b = bindings(&bind, cfg)?;
            let ev = evaluator(&b, &bind, cfg)?;
            let res = pipeline_a(n, b.as_ref().map(|_| &ev)).map_err(dom)?;
            let mut r = Record::new("bound-A");
            r.set("n", n)
                .set("expr", res.expr.to_string())
                .set("prefix", res.expr.to_prefix())
                .set("bindings", provenance(b.as_ref()))
                .set("trace", strings(res.trace.iter().map(BigInt::to_string)))
                .set("len", res.len)
                .set("value", res.value.map(|v| v.to_string()));
            Ok(r)
        }
        Cmd::BoundB { r, m, s, bind } => {
            let b = bindings(&bind, cfg)?;
            let ev = evaluator(&b, &bind, cfg)?;
            let res = pipeline_b(r, m, s, b.as_ref().map(|_| &ev)).map_err(dom)?;
            let mut rec = Record::new("bound-B");
            rec.set("r", r)
                .set("m", m)
                .set("s", s)
                .set("expr", res.expr.to_string())
                .set("prefix", res.expr.to_prefix())
                .set("bindings", provenance(b.as_ref()))
                .set("a_arg", res.a_arg)
                .set("a_value", res.a_value.map(|v| v.to_string()))
                .set("value", res.value.map(|v| v.to_string()));
            Ok(rec)
        }
        Cmd::Wl {
            diff,
            l,
            polys,
            nullstellensatz,
        } => {
            let spec = triple_spec(&diff, &polys, cfg)?;
            let mut r = Record::new("wl");
            r.set("vars", spec.vars.join(","))
                .set("m", spec.m)
                .set("h", spec.h)
                .set("H", spec.big_h());
            if let Some(b) = nullstellensatz {
                let sys = nullstellensatz_system(&spec, b);
                r.set("bound", b)
                    .set("count", sys.len())
                    .set("system", strings(sys.iter().map(render_ds)));
                return Ok(r);
            }
            if l == 0 {
                return Err(CliError::Usage("wl needs ℓ ≥ 1".into()));
            }
            let w = wl_system(&spec, l);
            r.set("l", l)
                .set(
                    "blocks",
                    strings(w.blocks.iter().map(|b| {
                        let names: Vec<String> = b.iter().map(|d| d.var.to_string()).collect();
                        format!("({})", names.join(", "))
                    })),
                )
                .set("equations", strings(w.equations.iter().map(render_poly_q)))
                .set("gluing", strings(w.gluing.iter().map(render_poly_q)))
                .set("gluing_count", w.gluing.len());
            Ok(r)
        }
        Cmd::VerifyPartial {
            diff,
            l,
            seqs,
            derivs,
            polys,
        } => {
            let spec = triple_spec(&diff, &polys, cfg)?;
            let seqs = seqs
                .iter()
                .map(|s| rationals(s))
                .collect::<Result<Vec<_>, _>>()?;
            let l = match l {
                Some(l) => l,
                None => seqs
                    .iter()
                    .map(Vec::len)
                    .min()
                    .unwrap_or(0)
                    .saturating_sub(spec.h as usize),
            };
            let d = match derivs {
                Some(p) => parse_seq_derivs(&read(&p)?, &var_refs(&spec), spec.m).map_err(dom)?,
                None => Derivs::Zero,
            };
            let ok = verify_partial(&spec, &seqs, l, &d).map_err(dom)?;
            let mut r = Record::new("verify-partial");
            r.set("vars", spec.vars.join(","))
                .set("h", spec.h)
                .set("l", l)
                .set("result", ok);
            Ok(r)
        }
        Cmd::VerifyTriple {
            diff,
            points,
            derivs,
            polys,
        } => {
            let spec = triple_spec(&diff, &polys, cfg)?;
            let pts = points
                .iter()
                .map(|s| rationals(s))
                .collect::<Result<Vec<_>, _>>()?;
            let d = match derivs {
                Some(p) => parse_point_derivs(&read(&p)?, &var_refs(&spec), spec.m).map_err(dom)?,
                None => Derivs::Zero,
            };
            let ok = verify_triple(&spec, &pts, &d).map_err(dom)?;
            let mut r = Record::new("verify-triple");
            r.set("vars", spec.vars.join(","))
                .set("h", spec.h)
                .set("H", spec.big_h())
                .set("points", strings(pts.iter().map(|p| render_point(p))))
                .set("result", ok);
            Ok(r)
        }
    }
}

fn strings(it: impl IntoIterator<Item = String>) -> Value {
    Value::Array(it.into_iter().map(Value::String).collect())
}

fn read(p: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(p)
        .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", p.display())))
}

/// Flattens arguments that may each hold several items separated by `;`
/// outside brackets.
fn split(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for a in args {
        let (mut depth, mut start) = (0i32, 0);
        for (i, c) in a.char_indices() {
            match c {
                '[' | '(' => depth += 1,
                ']' | ')' => depth -= 1,
                ';' if depth == 0 => {
                    out.push(a[start..i].trim().to_string());
                    start = i + 1;
                }
                _ => {}
            }
        }
        out.push(a[start..].trim().to_string());
    }
    out.retain(|s| !s.is_empty());
    out
}

fn rationals(s: &str) -> Result<Vec<Q>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            parse_q(x).ok_or_else(|| CliError::Domain(format!("`{x}` is not a rational number")))
        })
        .collect()
}

fn max_degree(opts: &TheoryOpts, cfg: &Config) -> Result<u32, CliError> {
    cfg.pick(opts.max_degree, "max-degree", DEFAULT_MAX_DEGREE)
}

fn theory_of(opts: &TheoryOpts, cfg: &Config) -> Result<Theory, CliError> {
    let id: String = cfg.pick(opts.theory.clone(), "theory", "lovs".into())?;
    let t = Theory::from_id_with(&id, max_degree(opts, cfg)?)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(match cfg.pick(opts.max_vars, "max-vars", 0usize)? {
        0 => t,
        cap => t.with_max_vars(cap),
    })
}

fn formula(t: &Theory, text: &str) -> Result<Formula, CliError> {
    parse_formula(text, &ParseContext::with_default_sort(&t.primary_sort())).map_err(dom)
}

fn decide(opts: &TheoryOpts, text: &str, cfg: &Config) -> Result<Record, CliError> {
    let t = theory_of(opts, cfg)?;
    let f = formula(&t, text)?;
    let v = t.decide(&f).map_err(dom)?;
    let mut r = Record::new("decide");
    r.set("theory", t.id()).set("result", v);
    Ok(r)
}

fn qe(opts: &TheoryOpts, text: &str, cfg: &Config) -> Result<Record, CliError> {
    let t = theory_of(opts, cfg)?;
    let f = formula(&t, text)?;
    let res = t.qe(&f).map_err(dom)?;
    let mut r = Record::new("qe");
    r.set("theory", t.id())
        .set("formula", res.formula.to_string())
        .set(
            "eliminated",
            strings(
                res.trace
                    .iter()
                    .map(|(v, how)| format!("{} {} ({how})", v.name, v.sort)),
            ),
        );
    Ok(r)
}

fn algorithm(alg: &str, arity: Option<usize>, t: &Theory) -> Result<AlgRef, CliError> {
    let spec = match arity {
        Some(_) if alg.contains('(') => {
            return Err(CliError::Usage(
                "give parameters either in --alg or with --arity".into(),
            ))
        }
        Some(k) => format!("{alg}({k})"),
        None => alg.to_string(),
    };
    builtin_from_spec(&spec, t).map_err(dom)
}

fn run_cmd(
    t: &Theory,
    alg: AlgRef,
    input: &str,
    spec: &str,
    limits: Limits,
    deg: u32,
) -> Result<Record, CliError> {
    let mut oracle = EvaluationOracle::parse(spec, &alg.params(), deg).map_err(dom)?;
    let out = run(alg.as_ref(), input, &mut oracle, limits).map_err(dom)?;
    let mut r = Record::new("run");
    r.set("theory", t.id())
        .set("algorithm", alg.id())
        .set("input", input);
    let exchange = |qs: &[Formula], rs: &[bool]| {
        Value::Array(
            qs.iter()
                .zip(rs)
                .map(|(q, a)| json!({"query": q.to_string(), "answer": a}))
                .collect(),
        )
    };
    match &out {
        RunOutcome::Halted(tr) => {
            r.set("status", "halted")
                .set("output", tr.output.clone())
                .set("cost", tr.cost)
                .set("queries", tr.query_count())
                .set("exchange", exchange(&tr.queries, &tr.responses));
        }
        RunOutcome::LimitExceeded {
            limit,
            queries,
            responses,
        } => {
            r.set("status", "limit-exceeded")
                .set("limit", *limit)
                .set("queries", queries.len())
                .set("exchange", exchange(queries, responses));
        }
    }
    if let Some((q, t)) = oracle.counts() {
        r.set("oracle_queries", q).set("oracle_true", t);
    }
    Ok(r)
}

fn set_result(r: &mut Record, res: &BoundResult) {
    match res {
        BoundResult::Proven { n, depth, phi } => {
            r.set("status", "proven")
                .set("depth", *depth)
                .set("N", *n)
                .set("phi", phi.to_string());
        }
        BoundResult::Undetermined { depth } => {
            r.set("status", "undetermined")
                .set("depth", *depth)
                .set("N", Value::Null);
        }
    }
}

fn extract_cmd(
    t: &Theory,
    alg: AlgRef,
    input: &str,
    all: Option<usize>,
    ecfg: &ExtractConfig,
    levels: bool,
) -> Result<Record, CliError> {
    let mut r = Record::new("extract-bound");
    r.set("theory", t.id()).set("algorithm", alg.id());
    if let Some(len) = all {
        let res = extract_bound_all_inputs(t, alg.as_ref(), len, ecfg).map_err(dom)?;
        r.set("inputs_up_to", len);
        set_result(&mut r, &res.result);
        r.set(
            "per_input",
            Value::Array(
                res.per_input
                    .iter()
                    .map(|(w, b)| {
                        let mut e = Record::default();
                        e.set("input", w.as_str());
                        set_result(&mut e, b);
                        e.into_value()
                    })
                    .collect(),
            ),
        );
        return Ok(r);
    }
    let ex = extract_bound(t, alg.as_ref(), input, ecfg).map_err(dom)?;
    r.set("input", input);
    set_result(&mut r, &ex.result);
    if levels {
        r.set(
            "levels",
            Value::Array(
                ex.state
                    .levels
                    .iter()
                    .map(|l| {
                        json!({
                            "level": l.depth,
                            "psi": l.psi.to_string(),
                            "q": l.q.to_string(),
                            "N_prev": l.n_prev,
                        })
                    })
                    .collect(),
            ),
        );
    }
    Ok(r)
}

struct DiffCtx {
    vars: Vec<String>,
    m: usize,
    ranking: Ranking,
}

fn var_names(diff: &DiffOpts, cfg: &Config) -> Result<Option<Vec<String>>, CliError> {
    let list = |s: &str| -> Vec<String> {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(String::from)
            .collect()
    };
    let from_n = diff.n.map(|n| match n {
        1 => vec!["y".to_string()],
        _ => (1..=n).map(|i| format!("y{i}")).collect(),
    });
    let vars = match (&diff.vars, from_n) {
        (Some(v), Some(n)) if list(v).len() != n.len() => {
            return Err(CliError::Usage(format!(
                "--vars names {} indeterminates, --n says {}",
                list(v).len(),
                n.len()
            )))
        }
        (Some(v), _) => Some(list(v)),
        (None, Some(n)) => Some(n),
        (None, None) => cfg.get::<String>("vars")?.map(|v| list(&v)),
    };
    if vars.as_ref().is_some_and(|v| v.is_empty()) {
        return Err(CliError::Usage("no indeterminates given".into()));
    }
    Ok(vars)
}

impl DiffCtx {
    fn new(diff: &DiffOpts, cfg: &Config) -> Result<Self, CliError> {
        let m = cfg.pick(diff.m, "m", 1)?;
        let named = var_names(diff, cfg)?;
        let text: Option<String> = match &diff.ranking {
            Some(r) => Some(r.clone()),
            None => cfg.get("ranking")?,
        };
        let (vars, ranking) = match text {
            Some(t) => {
                let rk = parse_ranking(&t, m).map_err(|e| CliError::Usage(e.to_string()))?;
                let rv: Vec<String> = rk.vars().iter().map(|v| v.to_string()).collect();
                if let Some(n) = &named {
                    let (mut a, mut b) = (n.clone(), rv.clone());
                    a.sort();
                    b.sort();
                    if a != b {
                        return Err(CliError::Usage(format!(
                            "ranking ranks {}, not {}",
                            rv.join(","),
                            n.join(",")
                        )));
                    }
                }
                (rv, rk)
            }
            None => {
                let vars = named.unwrap_or_else(|| vec!["y".into()]);
                let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
                let rk = Ranking::orderly(&refs, m);
                (vars, rk)
            }
        };
        Ok(DiffCtx { vars, m, ranking })
    }

    fn poly(&self, s: &str) -> Result<DPoly<Q>, CliError> {
        let refs: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        parse_dpoly_q(s, &refs, self.m).map_err(dom)
    }

    fn polys(&self, ss: &[String]) -> Result<Vec<DPoly<Q>>, CliError> {
        ss.iter().map(|s| self.poly(s)).collect()
    }

    fn record(&self, command: &str) -> Record {
        let mut r = Record::new(command);
        r.set("m", self.m).set("ranking", self.ranking.describe());
        r
    }

    fn rg(&self, eqs: &[String], ineqs: &[String]) -> Result<Vec<CharSystem<Q>>, CliError> {
        let (e, h) = (self.polys(eqs)?, self.polys(ineqs)?);
        rosenfeld_groebner(
            &e,
            &h,
            &mut Exact::new(&self.ranking),
            &RgOptions::default(),
        )
        .map_err(|e| match e {
            RgError::Cap(msg) => CliError::Domain(format!("cap exceeded: {msg}")),
            RgError::Context(x) => dom(x),
        })
    }
}

fn reduce_cmd(ctx: &DiffCtx, poly: &str, by: &[String]) -> Result<Record, CliError> {
    let p = ctx.poly(poly)?;
    let a = ctx.polys(by)?;
    let red = full_reduce(&p, &a, &mut Exact::new(&ctx.ranking)).map_err(dom)?;
    let mut r = ctx.record("reduce");
    r.set("poly", render_poly(&p))
        .set("by", strings(a.iter().map(render_poly)))
        .set("remainder", render_poly(&red.remainder))
        .set("multiplier", render_poly(&red.multiplier))
        .set(
            "terms",
            Value::Array(
                red.terms
                    .iter()
                    .map(|(c, j, theta)| {
                        json!({
                            "coefficient": render_poly(c),
                            "element": j + 1,
                            "theta": format!("[{}]", theta.iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
                        })
                    })
                    .collect(),
            ),
        );
    Ok(r)
}

fn system_value(s: &CharSystem<Q>) -> Value {
    json!({
        "equations": s.equations.iter().map(render_poly).collect::<Vec<_>>(),
        "inequations": s.inequations.iter().map(render_poly).collect::<Vec<_>>(),
    })
}

fn systems_value(ss: &[CharSystem<Q>]) -> Value {
    Value::Array(ss.iter().map(system_value).collect())
}

fn render_poly_q(p: &DPoly<Q>) -> String {
    diffbound::diffalg::render_poly_bare(p)
}

fn bindings(opts: &BindOpts, cfg: &Config) -> Result<Option<Bindings>, CliError> {
    let stubs = cfg.pick_list(&opts.stub, "stub");
    let table = match &opts.table {
        Some(p) => Some(p.clone()),
        None => cfg.get::<String>("table")?.map(Into::into),
    };
    if stubs.is_empty() && table.is_none() && opts.size_extractor.is_none() {
        return Ok(None);
    }
    let mut b = Bindings::new();
    for s in &stubs {
        let set = Bindings::stub(s).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown stub set `{s}` (known: {})",
                Bindings::stub_names().join(", ")
            ))
        })?;
        b.merge(&set);
    }
    if let Some(p) = table {
        let t = Bindings::from_table(&read(&p)?, &p.display().to_string()).map_err(dom)?;
        b.merge(&t);
    }
    if let Some(family) = &opts.size_extractor {
        let t = theory_of(&opts.theory, cfg)?;
        b.bind_arc(
            Func::Size,
            &format!("extractor {family}"),
            extractor_size(t, family, ExtractConfig::default()),
        );
    }
    Ok(Some(b))
}

fn provenance(b: Option<&Bindings>) -> Value {
    match b {
        None => Value::Array(vec![]),
        Some(b) => strings(
            b.provenance()
                .into_iter()
                .map(|(f, p)| format!("{}: {p}", f.name())),
        ),
    }
}

fn chain_config(opts: &BindOpts, cfg: &Config) -> Result<ChainConfig, CliError> {
    let d = ChainConfig::default();
    Ok(ChainConfig {
        ceiling: cfg.pick(opts.ceiling, "ceiling", d.ceiling)?,
        max_len: cfg.pick(opts.max_len, "max-len", d.max_len)?,
    })
}

/// An evaluator over `b`, or over nothing when no bindings were given.
fn evaluator<'a>(
    b: &'a Option<Bindings>,
    opts: &BindOpts,
    cfg: &Config,
) -> Result<Evaluator<'a>, CliError> {
    static EMPTY: std::sync::OnceLock<Bindings> = std::sync::OnceLock::new();
    let mut ev = Evaluator::new(
        b.as_ref()
            .unwrap_or_else(|| EMPTY.get_or_init(Bindings::new)),
    );
    ev.chain = chain_config(opts, cfg)?;
    ev.envelope = opts.envelope || cfg.get("envelope")?.unwrap_or(false);
    Ok(ev)
}

fn chainlen_cmd(
    dim: usize,
    g: Option<&str>,
    tail: u64,
    expr: Option<&str>,
    witness: bool,
    opts: &BindOpts,
    cfg: &Config,
) -> Result<Record, CliError> {
    if dim == 0 {
        return Err(CliError::Usage("--dim must be at least 1".into()));
    }
    let b = bindings(opts, cfg)?;
    let ev = evaluator(&b, opts, cfg)?;
    let ccfg = ev.chain;
    let envelope = ev.envelope;
    let mut r = Record::new("chainlen");
    r.set("dim", dim);
    let raw: Box<dyn FnMut(u64) -> Result<u64, KolchinError>> = match (g, expr) {
        (Some(list), None) => {
            let vals = list
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<u64>()
                        .map_err(|_| CliError::Domain(format!("`{x}` is not a natural number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            r.set("g", list.to_string()).set("tail", tail);
            Box::new(move |i| Ok(vals.get(i as usize).copied().unwrap_or(tail)))
        }
        (None, Some(text)) => {
            let e = parse_bound_expr(text).map_err(dom)?;
            r.set("expr", e.to_prefix());
            let ev = &ev;
            Box::new(move |i| {
                let env: HashMap<String, BigInt> = [("j".to_string(), BigInt::from(i))].into();
                let v = ev.eval(&e, &env)?;
                if v < BigInt::from(0) {
                    return Err(KolchinError::Negative(v));
                }
                Ok(u64::try_from(&v).unwrap_or(u64::MAX))
            })
        }
        _ => return Err(CliError::Usage("give exactly one of --g and --expr".into())),
    };
    let res = if envelope {
        let err = RefCell::new(None);
        let mut raw = raw;
        let g = monotone_envelope(|i| match raw(i) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0
            }
        });
        let g = RefCell::new(g);
        let out = chain(
            |i| {
                let v = (g.borrow_mut())(i);
                match err.borrow_mut().take() {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            },
            dim,
            &ccfg,
            witness,
        );
        out
    } else {
        chain(raw, dim, &ccfg, witness)
    }
    .map_err(dom)?;
    r.set("envelope", envelope).set("len", res.len);
    if witness {
        r.set(
            "witness",
            strings(res.witness.iter().map(|v| {
                format!(
                    "({})",
                    v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
                )
            })),
        );
    }
    Ok(r)
}

fn var_refs(spec: &TripleSpec) -> Vec<&str> {
    spec.vars.iter().map(String::as_str).collect()
}

fn triple_spec(diff: &DiffOpts, polys: &[String], cfg: &Config) -> Result<TripleSpec, CliError> {
    if diff.ranking.is_some() {
        return Err(CliError::Usage("σ-systems take no ranking".into()));
    }
    let m = cfg.pick(diff.m, "m", 1)?;
    let vars = var_names(diff, cfg)?.unwrap_or_else(|| vec!["y".into()]);
    let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let items = split(polys);
    let texts: Vec<&str> = items.iter().map(String::as_str).collect();
    TripleSpec::parse(&texts, &refs, m).map_err(dom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_respects_brackets() {
        let args = vec!["y[;1] - 2*y; z[0;2]".to_string(), " ;u".to_string()];
        assert_eq!(split(&args), ["y[;1] - 2*y", "z[0;2]", "u"]);
    }
}
