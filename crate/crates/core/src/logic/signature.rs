use std::collections::BTreeSet;

use super::{name, Formula, LogicError, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: Name,
    pub args: Vec<Name>,
    pub result: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub name: Name,
    pub args: Vec<Name>,
}

/// A multi-sorted signature.
///
/// Symbols may be overloaded across sorts (every ring sort has its own `+`),
/// so uniqueness is per (name, argument sorts). `+` and `*` are variadic in
/// the term syntax and are checked as n-ary folds of their binary
/// declaration. Rational literals are available in every ring sort.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub sorts: Vec<Name>,
    pub functions: Vec<FunctionDecl>,
    pub relations: Vec<RelationDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, s: &str) -> Result<(), LogicError> {
        if self.sorts.iter().any(|t| &**t == s) {
            return Err(LogicError::Sort(format!("sort {s} declared twice")));
        }
        self.sorts.push(name(s));
        Ok(())
    }

    fn has_sort(&self, s: &str) -> bool {
        self.sorts.iter().any(|t| &**t == s)
    }

    pub fn add_function(&mut self, f: &str, args: &[&str], result: &str) -> Result<(), LogicError> {
        for s in args.iter().chain([&result]) {
            if !self.has_sort(s) {
                return Err(LogicError::Sort(format!("undeclared sort {s} in {f}")));
            }
        }
        let args: Vec<Name> = args.iter().map(|s| name(s)).collect();
        if self
            .functions
            .iter()
            .any(|d| &*d.name == f && d.args == args)
        {
            return Err(LogicError::UnknownSymbol(format!("{f} declared twice")));
        }
        self.functions.push(FunctionDecl {
            name: name(f),
            args,
            result: name(result),
        });
        Ok(())
    }

    pub fn add_relation(&mut self, r: &str, args: &[&str]) -> Result<(), LogicError> {
        for s in args {
            if !self.has_sort(s) {
                return Err(LogicError::Sort(format!("undeclared sort {s} in {r}")));
            }
        }
        let args: Vec<Name> = args.iter().map(|s| name(s)).collect();
        if self
            .relations
            .iter()
            .any(|d| &*d.name == r && d.args == args)
        {
            return Err(LogicError::UnknownSymbol(format!("{r} declared twice")));
        }
        self.relations.push(RelationDecl {
            name: name(r),
            args,
        });
        Ok(())
    }

    /// A sort with `<` only.
    pub fn order(sort: &str) -> Self {
        let mut sig = Signature::new();
        sig.add_sort(sort).unwrap();
        sig.add_relation("<", &[sort, sort]).unwrap();
        sig
    }

    /// Ring language with `+ - * 0 1`, optionally `<` and `m` derivations.
    pub fn ring(sort: &str, ordered: bool, derivations: usize) -> Self {
        let mut sig = Signature::new();
        sig.add_sort(sort).unwrap();
        sig.add_ring_symbols(sort, ordered, derivations);
        sig
    }

    fn add_ring_symbols(&mut self, s: &str, ordered: bool, derivations: usize) {
        self.add_function("0", &[], s).unwrap();
        self.add_function("1", &[], s).unwrap();
        self.add_function("+", &[s, s], s).unwrap();
        self.add_function("-", &[s, s], s).unwrap();
        self.add_function("-", &[s], s).unwrap();
        self.add_function("*", &[s, s], s).unwrap();
        for i in 1..=derivations {
            self.add_function(&format!("d{i}"), &[s], s).unwrap();
        }
        if ordered {
            self.add_relation("<", &[s, s]).unwrap();
        }
    }

    /// Disjoint union; the two sort sets must not overlap.
    pub fn union(&self, other: &Signature) -> Result<Signature, LogicError> {
        let mut out = self.clone();
        for s in &other.sorts {
            out.add_sort(s)?;
        }
        out.functions.extend(other.functions.iter().cloned());
        out.relations.extend(other.relations.iter().cloned());
        Ok(out)
    }

    fn is_ring_sort(&self, s: &str) -> bool {
        self.functions
            .iter()
            .any(|d| &*d.name == "+" && &*d.result == s)
    }

    /// Sort of a term, `None` for a bare literal (which fits any ring sort).
    pub fn sort_of(&self, t: &Term) -> Result<Option<Name>, LogicError> {
        match t {
            Term::Var(v) => {
                if !self.has_sort(&v.sort) {
                    return Err(LogicError::Sort(format!(
                        "variable {} has undeclared sort {}",
                        v.name, v.sort
                    )));
                }
                Ok(Some(v.sort.clone()))
            }
            Term::Num(_) => Ok(None),
            Term::App(f, args) => {
                let mut sorts = BTreeSet::new();
                for a in args.iter() {
                    if let Some(s) = self.sort_of(a)? {
                        sorts.insert(s);
                    }
                }
                if sorts.len() > 1 {
                    return Err(LogicError::Sort(format!(
                        "arguments of {f} have different sorts"
                    )));
                }
                let variadic = matches!(&**f, "+" | "*");
                let decl_arity = if variadic { 2 } else { args.len() };
                let cands: Vec<&FunctionDecl> = self
                    .functions
                    .iter()
                    .filter(|d| d.name == *f && d.args.len() == decl_arity)
                    .filter(|d| sorts.iter().all(|s| d.args.iter().all(|a| a == s)))
                    .collect();
                if cands.is_empty() {
                    if self.functions.iter().any(|d| d.name == *f) {
                        return Err(LogicError::Arity(format!(
                            "{f} applied to {} argument(s)",
                            args.len()
                        )));
                    }
                    return Err(LogicError::UnknownSymbol(f.to_string()));
                }
                if variadic && args.is_empty() {
                    return Err(LogicError::Arity(format!("{f} needs arguments")));
                }
                if sorts.is_empty() {
                    Ok(None)
                } else {
                    Ok(Some(cands[0].result.clone()))
                }
            }
        }
    }

    /// Checks a formula against the signature.
    pub fn check(&self, f: &Formula) -> Result<(), LogicError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Eq(a, b) => {
                let sa = self.sort_of(a)?;
                let sb = self.sort_of(b)?;
                match (sa, sb) {
                    (Some(x), Some(y)) if x != y => Err(LogicError::Sort(format!(
                        "equation between sorts {x} and {y}"
                    ))),
                    (Some(s), None) | (None, Some(s)) if !self.is_ring_sort(&s) => {
                        Err(LogicError::Sort(format!("numeral compared with sort {s}")))
                    }
                    _ => Ok(()),
                }
            }
            Formula::Rel(r, args) => {
                let mut sorts = BTreeSet::new();
                for a in args.iter() {
                    if let Some(s) = self.sort_of(a)? {
                        sorts.insert(s);
                    }
                }
                if sorts.len() > 1 {
                    return Err(LogicError::Sort(format!(
                        "arguments of {r} have different sorts"
                    )));
                }
                let ok = self.relations.iter().any(|d| {
                    d.name == *r
                        && d.args.len() == args.len()
                        && sorts.iter().all(|s| d.args.iter().all(|a| a == s))
                });
                if ok {
                    Ok(())
                } else if self.relations.iter().any(|d| d.name == *r) {
                    Err(LogicError::Sort(format!(
                        "relation {r} not declared for these sorts"
                    )))
                } else {
                    Err(LogicError::UnknownSymbol(r.to_string()))
                }
            }
            Formula::Not(g) => self.check(g),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| self.check(g)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                self.check(a)?;
                self.check(b)
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                if !self.has_sort(&v.sort) {
                    return Err(LogicError::Sort(format!(
                        "bound variable {} has undeclared sort {}",
                        v.name, v.sort
                    )));
                }
                self.check(g)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, ParseContext};

    #[test]
    fn ring_signature_accepts_arithmetic() {
        let sig = Signature::ring("R", true, 0);
        let f = parse_formula(
            "(exists (x R) (< (+ x x 1) (* 2 y)))",
            &ParseContext::with_default_sort("R"),
        )
        .unwrap();
        sig.check(&f).unwrap();
    }

    #[test]
    fn order_signature_rejects_plus() {
        let sig = Signature::order("O");
        let f = parse_formula("(< (+ x y) z)", &ParseContext::with_default_sort("O")).unwrap();
        assert!(sig.check(&f).is_err());
    }

    #[test]
    fn derivations_only_when_configured() {
        let ctx = ParseContext::with_default_sort("K");
        let f = parse_formula("(= (d1 x) 0)", &ctx).unwrap();
        assert!(Signature::ring("K", false, 0).check(&f).is_err());
        Signature::ring("K", false, 1).check(&f).unwrap();
    }

    #[test]
    fn union_requires_disjoint_sorts() {
        let a = Signature::order("O");
        assert!(a.union(&Signature::ring("R", true, 0)).is_ok());
        assert!(a.union(&Signature::order("O")).is_err());
    }
}
