use super::OracleError;
use crate::logic::{Formula, Var};
use crate::poly::parse_q;
use crate::theory::{Assignment, Theory};

#[derive(Debug, Clone)]
pub enum EvaluationOracle {
    /// Truth in the standard model of `theory` at `assignment`.
    Model {
        theory: Theory,
        assignment: Assignment,
    },
    /// The first `prefix.len()` answers, then `true` forever.
    Scripted { prefix: Vec<bool>, pos: usize },
    /// Wraps another oracle and counts its traffic.
    Counting {
        inner: Box<EvaluationOracle>,
        queries: u64,
        trues: u64,
    },
}

impl EvaluationOracle {
    pub fn model(theory: Theory, assignment: Assignment) -> Self {
        EvaluationOracle::Model { theory, assignment }
    }

    pub fn scripted(prefix: Vec<bool>) -> Self {
        EvaluationOracle::Scripted { prefix, pos: 0 }
    }

    pub fn counting(inner: EvaluationOracle) -> Self {
        EvaluationOracle::Counting {
            inner: Box::new(inner),
            queries: 0,
            trues: 0,
        }
    }

    pub fn answer(&mut self, query: &Formula) -> Result<bool, OracleError> {
        match self {
            EvaluationOracle::Model { theory, assignment } => {
                Ok(theory.model_eval(query, assignment)?)
            }
            EvaluationOracle::Scripted { prefix, pos } => {
                let b = prefix.get(*pos).copied().unwrap_or(true);
                *pos += 1;
                Ok(b)
            }
            EvaluationOracle::Counting {
                inner,
                queries,
                trues,
            } => {
                let b = inner.answer(query)?;
                *queries += 1;
                *trues += b as u64;
                Ok(b)
            }
        }
    }

    /// `(queries, true answers)` for a counting oracle.
    pub fn counts(&self) -> Option<(u64, u64)> {
        match self {
            EvaluationOracle::Counting { queries, trues, .. } => Some((*queries, *trues)),
            _ => None,
        }
    }

    /// Parses `model:THEORY:a1,...,an`, `script:TTF...` or `count:<spec>`.
    /// Model values are assigned to `params` in order.
    pub fn parse(spec: &str, params: &[Var], max_degree: u32) -> Result<Self, OracleError> {
        let bad = || OracleError::BadSpec(spec.to_string());
        if let Some(rest) = spec.strip_prefix("count:") {
            return Ok(EvaluationOracle::counting(EvaluationOracle::parse(
                rest, params, max_degree,
            )?));
        }
        if let Some(rest) = spec.strip_prefix("script:") {
            let prefix = rest
                .chars()
                .map(|c| match c {
                    'T' | 't' | '1' => Ok(true),
                    'F' | 'f' | '0' => Ok(false),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(EvaluationOracle::scripted(prefix));
        }
        if let Some(rest) = spec.strip_prefix("model:") {
            let (tid, vals) = rest.split_once(':').unwrap_or((rest, ""));
            let theory = Theory::from_id_with(tid, max_degree)?;
            let values = if vals.trim().is_empty() {
                Vec::new()
            } else {
                vals.split(',')
                    .map(|v| parse_q(v).ok_or_else(bad))
                    .collect::<Result<Vec<_>, _>>()?
            };
            if values.len() != params.len() {
                return Err(OracleError::BadSpec(format!(
                    "{spec}: {} values for {} oracle parameters",
                    values.len(),
                    params.len()
                )));
            }
            let assignment = params.iter().cloned().zip(values).collect();
            return Ok(EvaluationOracle::model(theory, assignment));
        }
        Err(bad())
    }
}
