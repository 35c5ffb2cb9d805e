//! Demo algorithms.
//!
//! Cost models: `first_nonzero` and `quad_roots` charge one unit per query;
//! `gauss_rank` charges one unit per query plus one per row operation.
//! Every cost is floored at the output length.

use std::sync::Arc;

use super::{AlgRef, Asker, Halt, Interrupt, OracleError, TotalAlgorithm};
use crate::logic::{name, Formula, Name, Term, Var};
use crate::theory::{poly_to_term, Theory, VPoly};

fn params(prefix: &str, n: usize, sort: &str) -> Vec<Var> {
    (1..=n)
        .map(|i| Var::new(&format!("{prefix}{i}"), sort))
        .collect()
}

fn is_zero(p: &VPoly) -> Formula {
    Formula::eq(poly_to_term(p), Term::int(0))
}

/// Index (1-based) of the first parameter that is nonzero, `0` if none.
///
/// Input `1^k` limits the scan to the first `min(k, ℓ)` parameters; the
/// empty input scans all of them.
#[derive(Debug, Clone)]
pub struct FirstNonzero {
    pub l: usize,
    pub sort: Name,
}

impl FirstNonzero {
    pub fn new(l: usize, sort: &str) -> Self {
        FirstNonzero {
            l,
            sort: name(sort),
        }
    }
}

impl TotalAlgorithm for FirstNonzero {
    fn id(&self) -> String {
        format!("first_nonzero({})", self.l)
    }

    fn params(&self) -> Vec<Var> {
        params("x", self.l, &self.sort)
    }

    fn alphabet(&self) -> Vec<char> {
        vec!['1']
    }

    fn execute(&self, input: &str, ask: &mut dyn Asker) -> Result<Halt, Interrupt> {
        let n = if input.is_empty() {
            self.l
        } else {
            input.len().min(self.l)
        };
        let ps = self.params();
        let mut cost = 0;
        for (i, x) in ps.iter().take(n).enumerate() {
            cost += 1;
            if !ask.ask(Formula::eq(Term::var(x), Term::int(0)))? {
                return Ok(Halt::new((i + 1).to_string(), cost));
            }
        }
        Ok(Halt::new("0", cost))
    }
}

/// Number of distinct roots of `a·t² + b·t + c` over the algebraic closure,
/// with the zero polynomial reported as `0`. Two queries at most.
#[derive(Debug, Clone)]
pub struct QuadRoots {
    pub sort: Name,
}

impl TotalAlgorithm for QuadRoots {
    fn id(&self) -> String {
        "quad_roots".into()
    }

    fn params(&self) -> Vec<Var> {
        params("x", 3, &self.sort)
    }

    fn alphabet(&self) -> Vec<char> {
        Vec::new()
    }

    fn execute(&self, _input: &str, ask: &mut dyn Asker) -> Result<Halt, Interrupt> {
        let v: Vec<VPoly> = self.params().into_iter().map(VPoly::var).collect();
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        if !ask.ask(is_zero(a))? {
            let disc = b.mul(b).sub(&a.mul(c).scale(&crate::poly::qi(4)));
            let out = if ask.ask(is_zero(&disc))? { "1" } else { "2" };
            return Ok(Halt::new(out, 2));
        }
        let out = if ask.ask(is_zero(b))? { "0" } else { "1" };
        Ok(Halt::new(out, 2))
    }
}

/// Rank of a `k×k` matrix (parameters row-major) by fraction-free
/// elimination. Each column first asks whether its remaining segment is
/// zero, then single zero tests pick the pivot; the last candidate needs no
/// test.
#[derive(Debug, Clone)]
pub struct GaussRank {
    pub k: usize,
    pub sort: Name,
}

impl TotalAlgorithm for GaussRank {
    fn id(&self) -> String {
        format!("gauss_rank({})", self.k)
    }

    fn params(&self) -> Vec<Var> {
        params("x", self.k * self.k, &self.sort)
    }

    fn alphabet(&self) -> Vec<char> {
        Vec::new()
    }

    fn execute(&self, _input: &str, ask: &mut dyn Asker) -> Result<Halt, Interrupt> {
        let k = self.k;
        let ps = self.params();
        let mut m: Vec<Vec<VPoly>> = (0..k)
            .map(|i| (0..k).map(|j| VPoly::var(ps[i * k + j].clone())).collect())
            .collect();
        let mut cost = 0u64;
        let mut row = 0;
        for col in 0..k {
            if row == k {
                break;
            }
            let segment = Formula::and((row..k).map(|i| is_zero(&m[i][col])).collect::<Vec<_>>());
            cost += 1;
            if ask.ask(segment)? {
                continue;
            }
            let mut pivot = k - 1;
            for i in row..k - 1 {
                cost += 1;
                if !ask.ask(is_zero(&m[i][col]))? {
                    pivot = i;
                    break;
                }
            }
            m.swap(row, pivot);
            for i in row + 1..k {
                let (p, f) = (m[row][col].clone(), m[i][col].clone());
                for j in col..k {
                    m[i][j] = m[i][j].mul(&p).sub(&m[row][j].mul(&f));
                }
                cost += 1;
            }
            row += 1;
        }
        Ok(Halt::new(row.to_string(), cost))
    }
}

/// Halts at once with a fixed output and cost.
#[derive(Debug, Clone)]
pub struct ConstantAlg {
    pub output: String,
    pub cost: u64,
    pub l: usize,
    pub sort: Name,
}

impl TotalAlgorithm for ConstantAlg {
    fn id(&self) -> String {
        format!("constant({})", self.cost)
    }

    fn params(&self) -> Vec<Var> {
        params("x", self.l, &self.sort)
    }

    fn alphabet(&self) -> Vec<char> {
        vec!['0', '1']
    }

    fn execute(&self, _input: &str, _ask: &mut dyn Asker) -> Result<Halt, Interrupt> {
        Ok(Halt::new(self.output.clone(), self.cost))
    }
}

/// Asks `x1 = x1` forever. Not total; exercises caps.
#[derive(Debug, Clone)]
pub struct EndlessAlg {
    pub sort: Name,
}

impl TotalAlgorithm for EndlessAlg {
    fn id(&self) -> String {
        "endless".into()
    }

    fn params(&self) -> Vec<Var> {
        params("x", 1, &self.sort)
    }

    fn alphabet(&self) -> Vec<char> {
        Vec::new()
    }

    fn execute(&self, _input: &str, ask: &mut dyn Asker) -> Result<Halt, Interrupt> {
        let x = Term::var(&self.params()[0]);
        loop {
            ask.ask(Formula::eq(x.clone(), x.clone()))?;
        }
    }
}

/// Looks up a builtin by name. `args`: `first_nonzero [ℓ]`, `gauss_rank [k]`,
/// `quad_roots []`, `rg_lifted [m, n, ℓ]`. Parameters live in the theory's
/// first sort; `rg_lifted` also uses a second ordered sort when present.
pub fn builtin(alg: &str, args: &[usize], theory: &Theory) -> Result<AlgRef, OracleError> {
    let sort = theory.primary_sort();
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(OracleError::BadParams(format!(
                "{alg} takes {n} parameter(s), got {}",
                args.len()
            )))
        }
    };
    Ok(match alg {
        "first_nonzero" => {
            want(1)?;
            Arc::new(FirstNonzero::new(args[0], &sort))
        }
        "quad_roots" => {
            want(0)?;
            Arc::new(QuadRoots { sort })
        }
        "gauss_rank" => {
            want(1)?;
            if args[0] == 0 {
                return Err(OracleError::BadParams("gauss_rank needs k ≥ 1".into()));
            }
            Arc::new(GaussRank { k: args[0], sort })
        }
        "rg_lifted" => {
            want(3)?;
            let sorts = theory.sorts();
            let ranking_sort = sorts.get(1).cloned();
            Arc::new(crate::diffalg::RgLifted::new(
                args[0],
                args[1],
                args[2],
                &sort,
                ranking_sort.as_deref(),
            )?)
        }
        _ => return Err(OracleError::UnknownAlgorithm(alg.to_string())),
    })
}

/// Parses `name` or `name(a, b, ...)`.
pub fn builtin_from_spec(spec: &str, theory: &Theory) -> Result<AlgRef, OracleError> {
    let spec = spec.trim();
    let (n, args) = match spec.split_once('(') {
        Some((n, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| OracleError::BadParams(spec.to_string()))?;
            let args = inner
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| OracleError::BadParams(spec.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (n.trim(), args)
        }
        None => (spec, Vec::new()),
    };
    builtin(n, &args, theory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{run, EvaluationOracle, Limits};
    use crate::poly::qi;

    fn run_model(alg: &dyn TotalAlgorithm, theory: Theory, vals: &[i64]) -> (String, usize) {
        let a = alg
            .params()
            .into_iter()
            .zip(vals.iter().map(|&v| qi(v)))
            .collect();
        let t = run(
            alg,
            "",
            &mut EvaluationOracle::model(theory, a),
            Limits::default(),
        )
        .unwrap();
        let t = t.trace().unwrap().clone();
        (t.output, t.queries.len())
    }

    #[test]
    fn gauss_rank_examples() {
        let g = GaussRank {
            k: 2,
            sort: name("K"),
        };
        assert_eq!(run_model(&g, Theory::acf(), &[1, 0, 0, 1]).0, "2");
        assert_eq!(run_model(&g, Theory::acf(), &[1, 2, 2, 4]).0, "1");
        assert_eq!(run_model(&g, Theory::acf(), &[0, 0, 0, 0]), ("0".into(), 2));
        assert_eq!(run_model(&g, Theory::acf(), &[0, 1, 0, 0]).0, "1");
        let g3 = GaussRank {
            k: 3,
            sort: name("K"),
        };
        assert_eq!(
            run_model(&g3, Theory::acf(), &[1, 2, 3, 4, 5, 6, 7, 8, 9]).0,
            "2"
        );
    }

    #[test]
    fn quad_roots_examples() {
        let q = QuadRoots { sort: name("K") };
        assert_eq!(run_model(&q, Theory::acf(), &[1, 0, 0]).0, "1");
        assert_eq!(run_model(&q, Theory::acf(), &[1, 0, -1]).0, "2");
        assert_eq!(run_model(&q, Theory::acf(), &[0, 2, 1]).0, "1");
        assert_eq!(run_model(&q, Theory::acf(), &[0, 0, 1]).0, "0");
    }

    #[test]
    fn first_nonzero_all_zero() {
        let f = FirstNonzero::new(3, "R");
        assert_eq!(run_model(&f, Theory::lovs(), &[0, 0, 0]), ("0".into(), 3));
    }

    #[test]
    fn registry() {
        let t = Theory::acf();
        assert_eq!(builtin_from_spec("gauss_rank(2)", &t).unwrap().arity(), 4);
        assert_eq!(builtin_from_spec("quad_roots", &t).unwrap().arity(), 3);
        assert!(matches!(
            builtin("nope", &[], &t),
            Err(OracleError::UnknownAlgorithm(_))
        ));
        assert!(matches!(
            builtin("first_nonzero", &[], &t),
            Err(OracleError::BadParams(_))
        ));
    }
}
