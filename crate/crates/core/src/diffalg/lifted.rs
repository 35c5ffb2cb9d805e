//! Rosenfeld–Gröbner as an oracle algorithm.
//!
//! Input: `EQS | INEQS | RANKING`, with `;` between polynomials.
//! Coefficients may use the parameters `x1 … xℓ`, which are constants of the
//! derivations. Zero tests of coefficients become queries in the first
//! sort. With `oracle(z1,…,zn)` as the ranking, the matrix entries are
//! oracle parameters in the second sort and every comparison of two
//! derivatives becomes a linear query; the first query then asks whether
//! the entries define a ranking at all.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{
    alpha_vars, matrix_less_formula, matrix_validity_formula, parse_dpoly, parse_ranking,
    render_poly, rosenfeld_groebner, CharSystem, Context, Deriv, Ranking, RgError, RgOptions, Sym,
};
use crate::logic::{name, Formula, Name, Term, Var};
use crate::oracle::{Asker, Halt, Interrupt, OracleError, TotalAlgorithm};
use crate::theory::{poly_to_term, VPoly};

#[derive(Debug, Clone)]
pub struct RgLifted {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub sort: Name,
    pub ranking_sort: Option<Name>,
    pub options: RgOptions,
}

impl RgLifted {
    pub fn new(
        m: usize,
        n: usize,
        l: usize,
        sort: &str,
        ranking_sort: Option<&str>,
    ) -> Result<Self, OracleError> {
        if m == 0 || n == 0 {
            return Err(OracleError::BadParams(
                "rg_lifted needs m ≥ 1 and n ≥ 1".into(),
            ));
        }
        Ok(RgLifted {
            m,
            n,
            l,
            sort: name(sort),
            ranking_sort: ranking_sort.map(name),
            options: RgOptions::default(),
        })
    }

    fn coeff_params(&self) -> Vec<Var> {
        (1..=self.l)
            .map(|i| Var::new(&format!("x{i}"), &self.sort))
            .collect()
    }

    fn alpha(&self) -> Option<Vec<Vec<Vec<Var>>>> {
        self.ranking_sort
            .as_ref()
            .map(|s| alpha_vars(self.m, self.n, s))
    }
}

const MAX_SIZE: usize = 1 << 16;

enum Order {
    Fixed(Ranking),
    Oracle {
        alpha: Vec<Vec<Vec<Var>>>,
        vars: Vec<Name>,
        derivs: Vec<usize>,
    },
}

enum LiftErr {
    Interrupt(Interrupt),
    Cap,
}

struct Lifted<'a> {
    ask: &'a mut dyn Asker,
    order: Order,
    sort: Name,
    zero_memo: HashMap<Sym, bool>,
    cmp_memo: HashMap<(Deriv, Deriv), Ordering>,
    queries: u64,
    steps: u64,
    max_steps: u64,
}

impl Lifted<'_> {
    fn query(&mut self, f: Formula) -> Result<bool, LiftErr> {
        self.queries += 1;
        self.ask.ask(f).map_err(LiftErr::Interrupt)
    }
}

impl Context<Sym> for Lifted<'_> {
    type Error = LiftErr;

    fn simplify(&mut self, c: &Sym) -> Result<Sym, LiftErr> {
        // Parameters are constants: their proper derivatives vanish.
        let frozen = c.filter_terms(|m, _| m.factors().iter().all(|(v, _)| v.ord() == 0));
        if frozen.is_constant() {
            return Ok(frozen);
        }
        let key = frozen.primitive();
        let zero = match self.zero_memo.get(&key) {
            Some(z) => *z,
            None => {
                let vp: VPoly = key.map_vars(|d| Var::new(&d.var, &self.sort));
                let z = self.query(Formula::eq(poly_to_term(&vp), Term::int(0)))?;
                self.zero_memo.insert(key, z);
                z
            }
        };
        Ok(if zero { Sym::zero() } else { frozen })
    }

    fn compare(&mut self, a: &Deriv, b: &Deriv) -> Result<Ordering, LiftErr> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        let f = match &self.order {
            Order::Fixed(rk) => return Ok(rk.compare(a, b)),
            Order::Oracle {
                alpha,
                vars,
                derivs,
            } => {
                if let Some(o) = self.cmp_memo.get(&(a.clone(), b.clone())) {
                    return Ok(*o);
                }
                matrix_less_formula(alpha, vars, derivs, a, b)
            }
        };
        let o = if self.query(f)? {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        self.cmp_memo.insert((a.clone(), b.clone()), o);
        self.cmp_memo.insert((b.clone(), a.clone()), o.reverse());
        Ok(o)
    }

    fn tick(&mut self, size: usize) -> Result<(), LiftErr> {
        self.steps += 1;
        if self.steps > self.max_steps || size > MAX_SIZE {
            return Err(LiftErr::Cap);
        }
        Ok(())
    }
}

fn render_systems(systems: &[CharSystem<Sym>]) -> String {
    if systems.is_empty() {
        return "none".into();
    }
    systems
        .iter()
        .map(|s| {
            let eqs: Vec<String> = s.equations.iter().map(render_poly).collect();
            let hs: Vec<String> = s.inequations.iter().map(render_poly).collect();
            format!("{{{} : {}}}", eqs.join(", "), hs.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl TotalAlgorithm for RgLifted {
    fn id(&self) -> String {
        format!("rg_lifted({},{},{})", self.m, self.n, self.l)
    }

    fn params(&self) -> Vec<Var> {
        let mut ps = self.coeff_params();
        if let Some(alpha) = self.alpha() {
            ps.extend(alpha.into_iter().flatten().flatten());
        }
        ps
    }

    fn alphabet(&self) -> Vec<char> {
        (' '..='~').collect()
    }

    fn execute(&self, input: &str, ask: &mut dyn Asker) -> Result<Halt, Interrupt> {
        let parts: Vec<&str> = input.split('|').collect();
        let invalid = || Ok(Halt::new("invalid-input", 1));
        if parts.len() != 3 {
            return invalid();
        }
        let rtext = parts[2].trim();
        let order = if let Some(rest) = rtext.strip_prefix("oracle(") {
            let Some(alpha) = self.alpha() else {
                return invalid();
            };
            let Ok(Ranking::Orderly { vars, derivs }) =
                parse_ranking(&format!("orderly({rest}"), self.m)
            else {
                return invalid();
            };
            Order::Oracle {
                alpha,
                vars,
                derivs,
            }
        } else {
            match parse_ranking(rtext, self.m) {
                Ok(rk) => Order::Fixed(rk),
                Err(_) => return invalid(),
            }
        };
        let vars: Vec<Name> = match &order {
            Order::Fixed(rk) => rk.vars(),
            Order::Oracle { vars, .. } => vars.clone(),
        };
        if vars.len() != self.n {
            return invalid();
        }
        let var_refs: Vec<&str> = vars.iter().map(|v| v.as_ref()).collect();
        let pnames: Vec<String> = (1..=self.l).map(|i| format!("x{i}")).collect();
        let prefs: Vec<&str> = pnames.iter().map(String::as_str).collect();
        let parse_list = |s: &str| {
            s.split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| parse_dpoly(t, &var_refs, self.m, &prefs))
                .collect::<Result<Vec<_>, _>>()
        };
        let (Ok(eqs), Ok(ineqs)) = (parse_list(parts[0]), parse_list(parts[1])) else {
            return invalid();
        };

        let mut ctx = Lifted {
            ask,
            order,
            sort: self.sort.clone(),
            zero_memo: HashMap::new(),
            cmp_memo: HashMap::new(),
            queries: 0,
            steps: 0,
            max_steps: self.options.max_steps as u64,
        };
        if let Order::Oracle { alpha, .. } = &ctx.order {
            let f = matrix_validity_formula(alpha);
            match ctx.query(f) {
                Ok(true) => {}
                Ok(false) => return Ok(Halt::new("invalid-ranking", ctx.queries)),
                Err(LiftErr::Interrupt(i)) => return Err(i),
                Err(LiftErr::Cap) => unreachable!("queries do not tick"),
            }
        }
        let res = rosenfeld_groebner(&eqs, &ineqs, &mut ctx, &self.options);
        let cost = ctx.queries + ctx.steps;
        match res {
            Ok(systems) => Ok(Halt::new(render_systems(&systems), cost)),
            Err(RgError::Cap(_)) | Err(RgError::Context(LiftErr::Cap)) => {
                Ok(Halt::new("cap-exceeded", cost))
            }
            Err(RgError::Context(LiftErr::Interrupt(i))) => Err(i),
        }
    }
}
