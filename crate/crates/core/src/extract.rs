//! Uniform bounds from the query tree of a total algorithm.
//!
//! Level `s` looks at every response prefix `r` of length `s − 1` that
//! extends a branch still querying at level `s − 1`. The formula
//! `ψ_r = ψ_{s−1} ∧ ⋀_i (q_i ⟺ r_i)` describes the parameters that drive
//! the algorithm down `r`. Replaying `r` either yields the `s`-th query
//! `q_r` or a halt with cost `N_r`. The level then records
//!
//! ```text
//! ψ_s     = ⋁ { ψ_r : r queried }                  (False if none)
//! q_s     = ⋀ { ψ_r ⟹ q_r : r queried }           (True if none)
//! N_{s−1} = max(N_{s−2}, Σ { N_r : r halted })     (N_{−1} = −∞)
//! ```
//!
//! and the search stops at the first `i` with `∀x ¬ψ_{i+1}`, answering
//! `N_i`.

use rayon::prelude::*;
use thiserror::Error;

use crate::logic::{Formula, Var};
use crate::oracle::{OracleError, Step, TotalAlgorithm};
use crate::theory::{Theory, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("theory rejected {formula}: {source}")]
    Theory {
        formula: String,
        source: TheoryError,
    },
    #[error("algorithm failed on prefix {prefix}: {source}")]
    Oracle { prefix: String, source: OracleError },
    #[error("level {depth} has {count} branches, above the cap {cap}")]
    TooManyBranches {
        depth: usize,
        count: usize,
        cap: usize,
    },
    #[error("an empty alphabet only admits inputs of length 0, got r = {0}")]
    EmptyAlphabet(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchStatus {
    PrunedUnsat,
    Queried(Formula),
    Halted(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchNode {
    pub prefix: Vec<bool>,
    pub psi: Formula,
    pub status: BranchStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSummary {
    pub depth: usize,
    pub psi: Formula,
    pub q: Formula,
    /// `N_{depth−1}`; `None` stands for −∞.
    pub n_prev: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundResult {
    Proven { n: u64, depth: usize, phi: Formula },
    Undetermined { depth: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractConfig {
    pub max_depth: usize,
    /// Skip branches whose ψ_r is unsatisfiable.
    pub prune: bool,
    /// Use `max` instead of `Σ` over halted branches.
    pub max_mode: bool,
    pub max_branches: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            max_depth: 32,
            prune: true,
            max_mode: false,
            max_branches: 1 << 16,
        }
    }
}

/// Everything computed so far. `levels[s]` is level `s`; level 0 is the
/// seed `ψ_0 = True`, `N_{−1} = −∞`.
#[derive(Debug, Clone)]
pub struct ExtractState {
    pub levels: Vec<LevelSummary>,
    pub branches: Vec<Vec<BranchNode>>,
}

impl ExtractState {
    pub fn new() -> Self {
        ExtractState {
            levels: vec![LevelSummary {
                depth: 0,
                psi: Formula::True,
                q: Formula::True,
                n_prev: None,
            }],
            branches: vec![vec![BranchNode {
                prefix: Vec::new(),
                psi: Formula::True,
                status: BranchStatus::Queried(Formula::True),
            }]],
        }
    }

    /// Prefixes to explore at the next level.
    fn frontier(&self) -> Vec<Vec<bool>> {
        let last = self.branches.last().expect("seeded");
        if self.levels.len() == 1 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for b in last {
            if matches!(b.status, BranchStatus::Queried(_)) {
                for r in [true, false] {
                    let mut p = b.prefix.clone();
                    p.push(r);
                    out.push(p);
                }
            }
        }
        out
    }
}

impl Default for ExtractState {
    fn default() -> Self {
        Self::new()
    }
}

pub fn prefix_string(p: &[bool]) -> String {
    p.iter().map(|&b| if b { 'T' } else { 'F' }).collect()
}

fn params_of(alg: &dyn TotalAlgorithm, f: &Formula) -> Vec<Var> {
    let mut vs = alg.params();
    for v in f.free_vars() {
        if !vs.contains(&v) {
            vs.push(v);
        }
    }
    vs
}

fn satisfiable(
    theory: &Theory,
    alg: &dyn TotalAlgorithm,
    psi: &Formula,
) -> Result<bool, ExtractError> {
    let s = Formula::exists_all(params_of(alg, psi), psi.clone());
    theory.decide(&s).map_err(|source| ExtractError::Theory {
        formula: s.to_string(),
        source,
    })
}

/// Computes the next level from `state` and appends it.
pub fn build_level(
    theory: &Theory,
    alg: &dyn TotalAlgorithm,
    input: &str,
    state: &mut ExtractState,
    cfg: &ExtractConfig,
) -> Result<LevelSummary, ExtractError> {
    let s = state.levels.len();
    let frontier = state.frontier();
    if frontier.len() > cfg.max_branches {
        return Err(ExtractError::TooManyBranches {
            depth: s,
            count: frontier.len(),
            cap: cfg.max_branches,
        });
    }
    let prev_psi = state.levels[s - 1].psi.clone();
    let qs: Vec<Formula> = state.levels[1..].iter().map(|l| l.q.clone()).collect();

    let nodes: Vec<BranchNode> = frontier
        .into_par_iter()
        .map(|prefix| -> Result<BranchNode, ExtractError> {
            let psi = Formula::and(
                std::iter::once(prev_psi.clone()).chain(
                    prefix
                        .iter()
                        .zip(&qs)
                        .map(|(&r, q)| Formula::iff(q.clone(), Formula::constant(r))),
                ),
            );
            if cfg.prune && !satisfiable(theory, alg, &psi)? {
                return Ok(BranchNode {
                    prefix,
                    psi,
                    status: BranchStatus::PrunedUnsat,
                });
            }
            let step = alg
                .resume(input, &prefix)
                .map_err(|source| ExtractError::Oracle {
                    prefix: prefix_string(&prefix),
                    source,
                })?;
            let status = match step {
                Step::Query(q) => BranchStatus::Queried(q),
                Step::Halt { cost, .. } => BranchStatus::Halted(cost),
            };
            Ok(BranchNode {
                prefix,
                psi,
                status,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut disj = Vec::new();
    let mut conj = Vec::new();
    let mut halted = Vec::new();
    for n in &nodes {
        match &n.status {
            BranchStatus::Queried(q) => {
                disj.push(n.psi.clone());
                conj.push(Formula::implies(n.psi.clone(), q.clone()));
            }
            BranchStatus::Halted(c) => halted.push(*c),
            BranchStatus::PrunedUnsat => {}
        }
    }
    let level_n = if cfg.max_mode {
        halted.iter().copied().max().unwrap_or(0)
    } else {
        halted.iter().sum()
    };
    let n_prev = Some(match state.levels[s - 1].n_prev {
        Some(prev) => prev.max(level_n),
        None => level_n,
    });
    let summary = LevelSummary {
        depth: s,
        psi: Formula::or(disj),
        q: Formula::and(conj),
        n_prev,
    };
    state.levels.push(summary.clone());
    state.branches.push(nodes);
    Ok(summary)
}

/// Result plus the levels that produced it.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub result: BoundResult,
    pub state: ExtractState,
}

pub fn extract_bound(
    theory: &Theory,
    alg: &dyn TotalAlgorithm,
    input: &str,
    cfg: &ExtractConfig,
) -> Result<Extraction, ExtractError> {
    let mut state = ExtractState::new();
    for i in 0..=cfg.max_depth {
        let level = build_level(theory, alg, input, &mut state, cfg)?;
        let phi = Formula::not(level.psi.clone());
        if phi == Formula::True || !satisfiable(theory, alg, &level.psi)? {
            return Ok(Extraction {
                result: BoundResult::Proven {
                    n: level.n_prev.unwrap_or(0),
                    depth: i,
                    phi,
                },
                state,
            });
        }
    }
    Ok(Extraction {
        result: BoundResult::Undetermined {
            depth: cfg.max_depth,
        },
        state,
    })
}

/// All strings over `alphabet` of length at most `r`, shortest first.
pub fn inputs_up_to(alphabet: &[char], r: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for s in &layer {
            for c in alphabet {
                let mut t = s.clone();
                t.push(*c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Debug, Clone)]
pub struct AllInputs {
    pub result: BoundResult,
    pub per_input: Vec<(String, BoundResult)>,
}

/// Maximum bound over every input of length at most `r`.
pub fn extract_bound_all_inputs(
    theory: &Theory,
    alg: &dyn TotalAlgorithm,
    r: usize,
    cfg: &ExtractConfig,
) -> Result<AllInputs, ExtractError> {
    let alphabet = alg.alphabet();
    if alphabet.is_empty() && r > 0 {
        return Err(ExtractError::EmptyAlphabet(r));
    }
    let mut per_input = Vec::new();
    let mut best: Option<(u64, usize, Vec<Formula>)> = Some((0, 0, Vec::new()));
    for input in inputs_up_to(&alphabet, r) {
        let res = extract_bound(theory, alg, &input, cfg)?.result;
        match (&res, &mut best) {
            (BoundResult::Proven { n, depth, phi }, Some((bn, bd, phis))) => {
                *bn = (*bn).max(*n);
                *bd = (*bd).max(*depth);
                phis.push(phi.clone());
            }
            _ => best = None,
        }
        per_input.push((input, res));
    }
    let result = match best {
        Some((n, depth, phis)) => BoundResult::Proven {
            n,
            depth,
            phi: Formula::and(phis),
        },
        None => BoundResult::Undetermined {
            depth: cfg.max_depth,
        },
    };
    Ok(AllInputs { result, per_input })
}
