//! Deterministic algorithms that consult an evaluation oracle.
//!
//! An algorithm is written once as straight-line code against an [`Asker`].
//! Running it live feeds answers from an [`EvaluationOracle`]; resuming it
//! replays a fixed list of answers and stops at the first unanswered query,
//! which is what the bound extractor needs.

mod builtins;
mod oracles;

use std::sync::Arc;

use thiserror::Error;

use crate::logic::{Formula, Var};
use crate::theory::TheoryError;

pub use builtins::{
    builtin, builtin_from_spec, ConstantAlg, EndlessAlg, FirstNonzero, GaussRank, QuadRoots,
};
pub use oracles::EvaluationOracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("bad algorithm parameters: {0}")]
    BadParams(String),
    #[error("input `{input}` uses a symbol outside the alphabet {alphabet:?}")]
    BadInput { input: String, alphabet: Vec<char> },
    #[error("query {query} mentions {var}, which is not an oracle parameter")]
    QueryVars { query: String, var: String },
    #[error("bad oracle spec `{0}`")]
    BadSpec(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// One step of a resumed run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Query(Formula),
    Halt { output: String, cost: u64 },
}

/// Final output and cost of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halt {
    pub output: String,
    pub cost: u64,
}

impl Halt {
    /// Cost is floored at the output length.
    pub fn new(output: impl Into<String>, cost: u64) -> Halt {
        let output = output.into();
        let cost = cost.max(output.len() as u64);
        Halt { output, cost }
    }
}

/// Why an algorithm body stopped early.
#[derive(Debug)]
pub enum Interrupt {
    /// Replay ran out of answers at this query.
    Suspend(Formula),
    /// A run limit was reached.
    Limit(&'static str),
    Error(OracleError),
}

impl From<OracleError> for Interrupt {
    fn from(e: OracleError) -> Self {
        Interrupt::Error(e)
    }
}

pub trait Asker {
    fn ask(&mut self, query: Formula) -> Result<bool, Interrupt>;
}

pub trait TotalAlgorithm: Send + Sync {
    fn id(&self) -> String;

    /// Oracle parameters in the order a model tuple assigns them.
    fn params(&self) -> Vec<Var>;

    fn arity(&self) -> usize {
        self.params().len()
    }

    fn alphabet(&self) -> Vec<char>;

    /// The program body.
    fn execute(&self, input: &str, ask: &mut dyn Asker) -> Result<Halt, Interrupt>;

    /// Pure transition function: the next step after the given answers.
    fn resume(&self, input: &str, responses: &[bool]) -> Result<Step, OracleError> {
        check_input(self, input)?;
        let mut r = Replay { responses, used: 0 };
        match self.execute(input, &mut r) {
            Ok(h) => Ok(Step::Halt {
                output: h.output,
                cost: h.cost,
            }),
            Err(Interrupt::Suspend(q)) => Ok(Step::Query(q)),
            Err(Interrupt::Error(e)) => Err(e),
            Err(Interrupt::Limit(l)) => unreachable!("replay has no limit ({l})"),
        }
    }
}

fn check_input<A: TotalAlgorithm + ?Sized>(alg: &A, input: &str) -> Result<(), OracleError> {
    let alphabet = alg.alphabet();
    if input.chars().all(|c| alphabet.contains(&c)) {
        Ok(())
    } else {
        Err(OracleError::BadInput {
            input: input.to_string(),
            alphabet,
        })
    }
}

struct Replay<'a> {
    responses: &'a [bool],
    used: usize,
}

impl Asker for Replay<'_> {
    fn ask(&mut self, query: Formula) -> Result<bool, Interrupt> {
        match self.responses.get(self.used) {
            Some(&b) => {
                self.used += 1;
                Ok(b)
            }
            None => Err(Interrupt::Suspend(query)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_queries: usize,
    pub max_cost: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_queries: 10_000,
            max_cost: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub input: String,
    pub queries: Vec<Formula>,
    pub responses: Vec<bool>,
    pub output: String,
    pub cost: u64,
}

impl Trace {
    pub fn query_count(&self) -> usize {
        self.queries.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted(Trace),
    /// `limit` is `max_queries` or `max_cost`; the partial exchange so far is kept.
    LimitExceeded {
        limit: &'static str,
        queries: Vec<Formula>,
        responses: Vec<bool>,
    },
}

impl RunOutcome {
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            RunOutcome::Halted(t) => Some(t),
            RunOutcome::LimitExceeded { .. } => None,
        }
    }
}

struct Live<'a> {
    oracle: &'a mut EvaluationOracle,
    params: Vec<Var>,
    limits: Limits,
    queries: Vec<Formula>,
    responses: Vec<bool>,
}

impl Asker for Live<'_> {
    fn ask(&mut self, query: Formula) -> Result<bool, Interrupt> {
        if self.queries.len() >= self.limits.max_queries {
            return Err(Interrupt::Limit("max_queries"));
        }
        if self.queries.len() as u64 >= self.limits.max_cost {
            return Err(Interrupt::Limit("max_cost"));
        }
        if let Some(v) = query
            .free_vars()
            .into_iter()
            .find(|v| !self.params.contains(v))
        {
            return Err(OracleError::QueryVars {
                query: query.to_string(),
                var: v.name.to_string(),
            }
            .into());
        }
        let b = self.oracle.answer(&query)?;
        self.queries.push(query);
        self.responses.push(b);
        Ok(b)
    }
}

/// Runs `alg` on `input` against `oracle`.
pub fn run(
    alg: &dyn TotalAlgorithm,
    input: &str,
    oracle: &mut EvaluationOracle,
    limits: Limits,
) -> Result<RunOutcome, OracleError> {
    check_input(alg, input)?;
    let mut live = Live {
        oracle,
        params: alg.params(),
        limits,
        queries: Vec::new(),
        responses: Vec::new(),
    };
    match alg.execute(input, &mut live) {
        Ok(h) => {
            if h.cost > limits.max_cost {
                return Ok(RunOutcome::LimitExceeded {
                    limit: "max_cost",
                    queries: live.queries,
                    responses: live.responses,
                });
            }
            Ok(RunOutcome::Halted(Trace {
                input: input.to_string(),
                queries: live.queries,
                responses: live.responses,
                output: h.output,
                cost: h.cost,
            }))
        }
        Err(Interrupt::Limit(limit)) => Ok(RunOutcome::LimitExceeded {
            limit,
            queries: live.queries,
            responses: live.responses,
        }),
        Err(Interrupt::Error(e)) => Err(e),
        Err(Interrupt::Suspend(_)) => unreachable!("live oracle never suspends"),
    }
}

/// Shared handle used by the extractor and CLI.
pub type AlgRef = Arc<dyn TotalAlgorithm>;
