//! Decision procedures and quantifier elimination.
//!
//! A [`Theory`] is a list of single-sort procedures. A base theory has one;
//! the disjoint union of two theories concatenates their lists and routes
//! every literal to the procedure owning its sort.

mod acf;
mod arith;
mod dlo;
mod driver;
mod lovs;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{name, Formula, LogicError, Name, Signature, Var};
use crate::poly::Q;

pub use arith::{poly_to_term, term_to_poly, VPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("atom {atom} is outside the {theory} fragment: {reason}")]
    Fragment {
        theory: String,
        atom: String,
        reason: String,
    },
    #[error("atom {atom} has degree {degree}, above the cap {cap}")]
    DegreeOverflow { atom: String, degree: u32, cap: u32 },
    #[error("not a sentence; free variables: {0}")]
    NotASentence(String),
    #[error("variable {var} has sort {sort}, which no component theory handles")]
    UnknownSort { var: String, sort: String },
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("{0}")]
    Cap(String),
    #[error("missing value for free variable {0}")]
    MissingValue(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// One sort's procedure. Literals passed around are normalized atoms or
/// negations of normalized atoms.
pub(crate) trait SortTheory: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;
    fn sort(&self) -> &Name;
    /// Signature of this sort.
    fn signature(&self) -> Signature;
    /// Input-only checks (fragment membership, degree cap).
    fn validate_atom(&self, atom: &Formula) -> Result<(), TheoryError>;
    /// Canonical form of an atom, or a constant for decidable ground atoms.
    fn normalize_atom(&self, atom: &Formula) -> Result<Formula, TheoryError>;
    /// Quantifier-free equivalent of `∃x ⋀ lits`; every literal mentions `x`.
    fn eliminate(&self, x: &Var, lits: &[Formula]) -> Result<Formula, TheoryError>;
    /// Tag recorded in the QE trace.
    fn method(&self) -> &'static str;
}

/// Which operations a theory offers. All current theories offer all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub qe: bool,
    pub decide: bool,
    pub model_eval: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QeResult {
    pub formula: Formula,
    /// Eliminated variables in elimination order with the method used.
    pub trace: Vec<(Var, &'static str)>,
}

pub const DEFAULT_MAX_DEGREE: u32 = 4;

#[derive(Debug, Clone)]
pub struct Theory {
    id: String,
    parts: Vec<Arc<dyn SortTheory>>,
    max_vars: Option<usize>,
}

/// Variable values for model evaluation.
pub type Assignment = BTreeMap<Var, Q>;

impl Theory {
    fn single(part: Arc<dyn SortTheory>) -> Theory {
        Theory {
            id: part.kind().to_string(),
            parts: vec![part],
            max_vars: None,
        }
    }

    /// Dense linear orders without endpoints on sort `O`.
    pub fn dlo() -> Theory {
        Theory::dlo_on("O")
    }

    pub fn dlo_on(sort: &str) -> Theory {
        Theory::single(Arc::new(dlo::Dlo { sort: name(sort) }))
    }

    /// Linear arithmetic over the ordered field of rationals on sort `R`.
    pub fn lovs() -> Theory {
        Theory::lovs_on("R")
    }

    pub fn lovs_on(sort: &str) -> Theory {
        Theory::single(Arc::new(lovs::Lovs { sort: name(sort) }))
    }

    /// Equational theory of algebraically closed fields of characteristic 0
    /// on sort `K`, input degree cap 4.
    pub fn acf() -> Theory {
        Theory::acf_on("K", DEFAULT_MAX_DEGREE)
    }

    pub fn acf_on(sort: &str, max_degree: u32) -> Theory {
        Theory::single(Arc::new(acf::Acf {
            sort: name(sort),
            max_degree,
        }))
    }

    /// Disjoint union; sort names must differ.
    pub fn union(a: &Theory, b: &Theory) -> Result<Theory, TheoryError> {
        for p in &b.parts {
            if a.parts.iter().any(|q| q.sort() == p.sort()) {
                return Err(TheoryError::Cap(format!(
                    "cannot form a disjoint union: sort {} appears on both sides",
                    p.sort()
                )));
            }
        }
        Ok(Theory {
            id: format!("{}+{}", a.id, b.id),
            parts: a.parts.iter().chain(&b.parts).cloned().collect(),
            max_vars: match (a.max_vars, b.max_vars) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
        })
    }

    /// Parses `dlo`, `lovs`, `acf` or a `+`-separated union of them.
    pub fn from_id(id: &str) -> Result<Theory, TheoryError> {
        Theory::from_id_with(id, DEFAULT_MAX_DEGREE)
    }

    pub fn from_id_with(id: &str, max_degree: u32) -> Result<Theory, TheoryError> {
        let mut out: Option<Theory> = None;
        for part in id.split('+') {
            let t = match part.trim().to_ascii_lowercase().as_str() {
                "dlo" => Theory::dlo(),
                "lovs" => Theory::lovs(),
                "acf" | "acf0" | "acf0eq" => Theory::acf_on("K", max_degree),
                _ => return Err(TheoryError::UnknownTheory(id.to_string())),
            };
            out = Some(match out {
                None => t,
                Some(prev) => Theory::union(&prev, &t)?,
            });
        }
        out.ok_or_else(|| TheoryError::UnknownTheory(id.to_string()))
    }

    pub fn with_max_vars(mut self, cap: usize) -> Theory {
        self.max_vars = Some(cap);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sorts(&self) -> Vec<Name> {
        self.parts.iter().map(|p| p.sort().clone()).collect()
    }

    /// Sort of the first component; oracle parameters live here.
    pub fn primary_sort(&self) -> Name {
        self.parts[0].sort().clone()
    }

    pub fn signature(&self) -> Signature {
        let mut sig = self.parts[0].signature();
        for p in &self.parts[1..] {
            sig = sig.union(&p.signature()).expect("distinct sorts");
        }
        sig
    }

    pub fn capabilities(&self) -> Capabilities {
        Capabilities {
            qe: true,
            decide: true,
            model_eval: true,
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// Decides a sentence of the disjoint union of two theories.
pub fn union_decide(t1: &Theory, t2: &Theory, sentence: &Formula) -> Result<bool, TheoryError> {
    Theory::union(t1, t2)?.decide(sentence)
}
