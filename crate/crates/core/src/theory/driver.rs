//! Theory-independent QE driver: NNF, innermost-first elimination over
//! lazily enumerated DNF disjuncts, and satisfiability search for
//! existential sentences.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Assignment, QeResult, SortTheory, Theory, TheoryError};
use crate::logic::{substitute, to_nnf, Binding, Formula, Term, Var};

/// Literal complement.
pub(crate) fn complement(l: &Formula) -> Formula {
    match l {
        Formula::Not(a) => (**a).clone(),
        a => Formula::Not(Arc::new(a.clone())),
    }
}

fn atom_of(l: &Formula) -> &Formula {
    match l {
        Formula::Not(a) => a,
        a => a,
    }
}

pub(crate) fn lit_vars(l: &Formula) -> BTreeSet<Var> {
    atom_of(l).free_vars()
}

/// Calls `cb` on each DNF disjunct of an NNF formula, skipping disjuncts
/// that contain a literal and its complement. Stops as soon as `cb`
/// returns `true`; the return value says whether that happened.
pub(crate) fn for_each_conjunct<E>(
    f: &Formula,
    cb: &mut dyn FnMut(&[Formula]) -> Result<bool, E>,
) -> Result<bool, E> {
    let mut pending = vec![f];
    let mut lits = Vec::new();
    walk(&mut pending, &mut lits, cb)
}

fn walk<'a, E>(
    pending: &mut Vec<&'a Formula>,
    lits: &mut Vec<Formula>,
    cb: &mut dyn FnMut(&[Formula]) -> Result<bool, E>,
) -> Result<bool, E> {
    let Some(f) = pending.pop() else {
        return cb(lits);
    };
    let r = match f {
        Formula::True => walk(pending, lits, cb),
        Formula::False => Ok(false),
        Formula::And(gs) => {
            let n = pending.len();
            pending.extend(gs.iter().rev());
            let r = walk(pending, lits, cb);
            pending.truncate(n);
            r
        }
        Formula::Or(gs) => {
            let mut r = Ok(false);
            for g in gs.iter() {
                pending.push(g);
                r = walk(pending, lits, cb);
                pending.pop();
                if !matches!(r, Ok(false)) {
                    break;
                }
            }
            r
        }
        lit => {
            if lits.contains(&complement(lit)) {
                Ok(false)
            } else if lits.contains(lit) {
                walk(pending, lits, cb)
            } else {
                lits.push(lit.clone());
                let r = walk(pending, lits, cb);
                lits.pop();
                r
            }
        }
    };
    pending.push(f);
    r
}

fn occurrences(f: &Formula, x: &Var) -> usize {
    let mut n = 0;
    f.for_each_atom(&mut |a| {
        if a.free_vars().contains(x) {
            n += 1;
        }
    });
    n
}

/// Picks the variable with the fewest atom occurrences, ties by name.
fn pick_var<'a>(f: &Formula, vars: impl IntoIterator<Item = &'a Var>) -> Option<Var> {
    vars.into_iter()
        .map(|v| (occurrences(f, v), v))
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)))
        .map(|(_, v)| v.clone())
}

impl Theory {
    pub(crate) fn part_for_sort(&self, sort: &str) -> Option<&Arc<dyn SortTheory>> {
        self.parts.iter().find(|p| &**p.sort() == sort)
    }

    fn part_for_var(&self, v: &Var) -> Result<&Arc<dyn SortTheory>, TheoryError> {
        self.part_for_sort(&v.sort)
            .ok_or_else(|| TheoryError::UnknownSort {
                var: v.name.to_string(),
                sort: v.sort.to_string(),
            })
    }

    fn part_for_atom(&self, atom: &Formula) -> Result<Option<&Arc<dyn SortTheory>>, TheoryError> {
        match atom.free_vars().into_iter().next() {
            Some(v) => self.part_for_var(&v).map(Some),
            None => Ok(None),
        }
    }

    fn normalize_atom(&self, atom: &Formula) -> Result<Formula, TheoryError> {
        if let Some(p) = self.part_for_atom(atom)? {
            return p.normalize_atom(atom);
        }
        // Ground atom: the first component that understands it decides it.
        let mut first_err = None;
        for p in &self.parts {
            match p.normalize_atom(atom) {
                Ok(f) => return Ok(f),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        Err(first_err.expect("at least one component"))
    }

    fn normalize_literal(&self, l: &Formula) -> Result<Formula, TheoryError> {
        match l {
            Formula::Not(a) => Ok(Formula::not(self.normalize_atom(a)?)),
            a => self.normalize_atom(a),
        }
    }

    /// Normalizes every literal of a quantifier-free NNF formula.
    fn normalize_qf(&self, f: &Formula) -> Result<Formula, TheoryError> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::And(gs) => Formula::and(
                gs.iter()
                    .map(|g| self.normalize_qf(g))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Formula::Or(gs) => Formula::or(
                gs.iter()
                    .map(|g| self.normalize_qf(g))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            l => self.normalize_literal(l)?,
        })
    }

    /// Input checks: sorts of all variables, fragment, degree and variable caps.
    fn validate(&self, f: &Formula) -> Result<(), TheoryError> {
        let mut err = None;
        let mut vars = BTreeSet::new();
        f.for_each_atom(&mut |a| {
            if err.is_some() {
                return;
            }
            let r = (|| {
                let fv = a.free_vars();
                match fv.iter().next() {
                    Some(v) => self.part_for_var(v)?.validate_atom(a),
                    None => self.normalize_atom(a).map(|_| ()),
                }
            })();
            if let Err(e) = r {
                err = Some(e);
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        collect_all_vars(f, &mut vars);
        for v in &vars {
            self.part_for_var(v)?;
        }
        if let Some(cap) = self.max_vars {
            if vars.len() > cap {
                return Err(TheoryError::Cap(format!(
                    "formula has {} variables, above the cap {cap}",
                    vars.len()
                )));
            }
        }
        Ok(())
    }

    /// `∃x f` for quantifier-free normalized NNF `f`.
    fn elim_exists(&self, x: &Var, f: &Formula) -> Result<Formula, TheoryError> {
        if !f.free_vars().contains(x) {
            return Ok(f.clone());
        }
        // Miniscoping keeps the DNF small: ∃ distributes over ∨, and
        // conjuncts without x move outside.
        match f {
            Formula::Or(gs) => {
                return Ok(Formula::or(
                    gs.iter()
                        .map(|g| self.elim_exists(x, g))
                        .collect::<Result<Vec<_>, _>>()?,
                ));
            }
            Formula::And(gs) if gs.iter().any(|g| !g.free_vars().contains(x)) => {
                let (with, without): (Vec<Formula>, Vec<Formula>) =
                    gs.iter().cloned().partition(|g| g.free_vars().contains(x));
                let inner = self.elim_exists(x, &Formula::and(with))?;
                return Ok(Formula::and(without.into_iter().chain([inner])));
            }
            _ => {}
        }
        let part = self.part_for_var(x)?;
        let mut disj: BTreeSet<Formula> = BTreeSet::new();
        let mut found_true = false;
        for_each_conjunct::<TheoryError>(f, &mut |lits| {
            let (with, without): (Vec<Formula>, Vec<Formula>) =
                lits.iter().cloned().partition(|l| lit_vars(l).contains(x));
            let r = if with.is_empty() {
                Formula::True
            } else {
                part.eliminate(x, &with)?
            };
            let d = Formula::and(without.into_iter().chain([r]));
            if d == Formula::True {
                found_true = true;
                return Ok(true);
            }
            if d != Formula::False {
                disj.insert(d);
            }
            Ok(false)
        })?;
        if found_true {
            return Ok(Formula::True);
        }
        Ok(Formula::or(disj))
    }

    fn elim_forall(&self, x: &Var, f: &Formula) -> Result<Formula, TheoryError> {
        let neg = to_nnf(&Formula::not(f.clone()));
        Ok(to_nnf(&Formula::not(self.elim_exists(x, &neg)?)))
    }

    fn qe_rec(
        &self,
        f: &Formula,
        trace: &mut Vec<(Var, &'static str)>,
    ) -> Result<Formula, TheoryError> {
        match f {
            Formula::True | Formula::False => Ok(f.clone()),
            Formula::And(gs) => Ok(Formula::and(
                gs.iter()
                    .map(|g| self.qe_rec(g, trace))
                    .collect::<Result<Vec<_>, _>>()?,
            )),
            Formula::Or(gs) => Ok(Formula::or(
                gs.iter()
                    .map(|g| self.qe_rec(g, trace))
                    .collect::<Result<Vec<_>, _>>()?,
            )),
            Formula::Exists(..) | Formula::Forall(..) => {
                let is_exists = matches!(f, Formula::Exists(..));
                let mut block: Vec<Var> = Vec::new();
                let mut body = f;
                while let (Formula::Exists(v, g), true) | (Formula::Forall(v, g), false) =
                    (body, is_exists)
                {
                    if !block.contains(v) {
                        block.push(v.clone());
                    }
                    body = g;
                }
                let mut out = self.qe_rec(body, trace)?;
                while !block.is_empty() {
                    let x = pick_var(&out, &block).expect("nonempty");
                    block.retain(|v| *v != x);
                    out = if is_exists {
                        self.elim_exists(&x, &out)?
                    } else {
                        self.elim_forall(&x, &out)?
                    };
                    trace.push((x.clone(), self.part_for_var(&x)?.method()));
                }
                Ok(out)
            }
            l => self.normalize_literal(l),
        }
    }

    /// Quantifier elimination.
    pub fn qe(&self, f: &Formula) -> Result<QeResult, TheoryError> {
        self.validate(f)?;
        let mut trace = Vec::new();
        let formula = self.qe_rec(&to_nnf(f), &mut trace)?;
        Ok(QeResult { formula, trace })
    }

    /// Truth value of a sentence.
    pub fn decide(&self, sentence: &Formula) -> Result<bool, TheoryError> {
        let fv = sentence.free_vars();
        if !fv.is_empty() {
            let names: Vec<String> = fv.iter().map(|v| v.name.to_string()).collect();
            return Err(TheoryError::NotASentence(names.join(", ")));
        }
        self.validate(sentence)?;
        let nnf = to_nnf(sentence);
        let mut body = &nnf;
        let (mut ex, mut fa) = (false, false);
        while let Formula::Exists(_, g) | Formula::Forall(_, g) = body {
            if matches!(body, Formula::Exists(..)) {
                ex = true;
            } else {
                fa = true;
            }
            body = g;
        }
        if !body.has_quantifiers() && !(ex && fa) {
            let m = self.normalize_qf(body)?;
            return if fa {
                Ok(!self.sat(&to_nnf(&Formula::not(m)))?)
            } else {
                self.sat(&m)
            };
        }
        let out = self.qe_rec(&nnf, &mut Vec::new())?;
        match out {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            other => Err(TheoryError::Cap(format!(
                "elimination left a non-ground residue {other}"
            ))),
        }
    }

    /// Whether some assignment satisfies a normalized quantifier-free NNF
    /// formula (all its variables read existentially).
    pub(crate) fn sat(&self, f: &Formula) -> Result<bool, TheoryError> {
        for_each_conjunct(f, &mut |lits| self.sat_conj(lits))
    }

    fn sat_conj(&self, lits: &[Formula]) -> Result<bool, TheoryError> {
        let mut vars = BTreeSet::new();
        for l in lits {
            vars.extend(lit_vars(l));
        }
        if vars.is_empty() {
            // Normalized ground literals are constants and have been absorbed.
            for l in lits {
                if self.normalize_literal(l)? == Formula::False {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let conj = Formula::and(lits.iter().cloned());
        let x = pick_var(&conj, &vars).expect("nonempty");
        let (with, without): (Vec<Formula>, Vec<Formula>) =
            lits.iter().cloned().partition(|l| lit_vars(l).contains(&x));
        let r = self.part_for_var(&x)?.eliminate(&x, &with)?;
        self.sat(&Formula::and(without.into_iter().chain([r])))
    }

    /// Truth of `f` in the standard model with the free variables set by `a`.
    pub fn model_eval(&self, f: &Formula, a: &Assignment) -> Result<bool, TheoryError> {
        let mut b = Binding::new();
        for v in f.free_vars() {
            match a.get(&v) {
                Some(q) => {
                    b.insert(v, Term::Num(q.clone()));
                }
                None => return Err(TheoryError::MissingValue(v.name.to_string())),
            }
        }
        self.decide(&substitute(f, &b)?)
    }

    /// As [`Theory::model_eval`], pairing the free variables (in sorted
    /// order) with `values`.
    pub fn model_eval_tuple(
        &self,
        f: &Formula,
        values: &[crate::poly::Q],
    ) -> Result<bool, TheoryError> {
        let fv: Vec<Var> = f.free_vars().into_iter().collect();
        if fv.len() != values.len() {
            return Err(TheoryError::MissingValue(format!(
                "{} values for {} free variables",
                values.len(),
                fv.len()
            )));
        }
        let a: Assignment = fv.into_iter().zip(values.iter().cloned()).collect();
        self.model_eval(f, &a)
    }
}

fn collect_all_vars(f: &Formula, out: &mut BTreeSet<Var>) {
    match f {
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            out.insert(v.clone());
            collect_all_vars(g, out);
        }
        Formula::Not(g) => collect_all_vars(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_all_vars(g, out)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_all_vars(a, out);
            collect_all_vars(b, out);
        }
        a => out.extend(a.free_vars()),
    }
}
