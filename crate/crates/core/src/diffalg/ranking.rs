//! Rankings on derivatives.
//!
//! A matrix ranking gives each indeterminate `z_j` an `(m+1)×(m+1)` matrix
//! `M_j`; the weight of `θz_j` is `M_j · (θ, 1)`. Weights are compared
//! lexicographically, then the tie order of the indeterminates, then the
//! multi-indices. Ranking axioms hold when all `M_j` share their first `m`
//! columns and each of those columns is lexicographically non-negative;
//! that condition is a linear formula in the entries and is checked by the
//! LOVS engine.

use std::cmp::Ordering;

use super::{Deriv, DiffError};
use crate::logic::{name, Formula, Name, Term, Var};
use crate::poly::Q;
use crate::theory::{poly_to_term, Theory, VPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ranking {
    /// Order first, then the multi-index in `derivs` priority, then the
    /// position in `vars` (later is higher).
    Orderly { vars: Vec<Name>, derivs: Vec<usize> },
    /// Blocks listed highest first; orderly inside a block.
    Elimination {
        blocks: Vec<Vec<Name>>,
        derivs: Vec<usize>,
    },
    Matrix {
        vars: Vec<Name>,
        mats: Vec<Vec<Vec<Q>>>,
        derivs: Vec<usize>,
    },
}

fn identity(m: usize) -> Vec<usize> {
    (0..m).collect()
}

fn check_perm(derivs: &[usize]) -> Result<(), DiffError> {
    let mut s = derivs.to_vec();
    s.sort();
    if s != identity(derivs.len()) {
        return Err(DiffError::Ranking(format!(
            "{derivs:?} is not a permutation"
        )));
    }
    Ok(())
}

impl Ranking {
    pub fn orderly(vars: &[&str], m: usize) -> Self {
        Ranking::Orderly {
            vars: vars.iter().map(|v| name(v)).collect(),
            derivs: identity(m),
        }
    }

    pub fn orderly_with(vars: &[&str], derivs: Vec<usize>) -> Result<Self, DiffError> {
        check_perm(&derivs)?;
        Ok(Ranking::Orderly {
            vars: vars.iter().map(|v| name(v)).collect(),
            derivs,
        })
    }

    pub fn elimination(blocks: &[&[&str]], m: usize) -> Self {
        Ranking::Elimination {
            blocks: blocks
                .iter()
                .map(|b| b.iter().map(|v| name(v)).collect())
                .collect(),
            derivs: identity(m),
        }
    }

    /// Rejects matrices that fail the ranking axioms.
    pub fn matrix(
        vars: &[&str],
        mats: Vec<Vec<Vec<Q>>>,
        derivs: Vec<usize>,
    ) -> Result<Self, DiffError> {
        check_perm(&derivs)?;
        let m = derivs.len();
        if mats.len() != vars.len()
            || mats
                .iter()
                .any(|mt| mt.len() != m + 1 || mt.iter().any(|r| r.len() != m + 1))
        {
            return Err(DiffError::Ranking(format!(
                "expected {} matrices of shape {}x{}",
                vars.len(),
                m + 1,
                m + 1
            )));
        }
        let alpha = alpha_vars(m, vars.len(), "R");
        let assignment = alpha
            .iter()
            .flatten()
            .flatten()
            .cloned()
            .zip(mats.iter().flatten().flatten().cloned())
            .collect();
        let ok = Theory::lovs()
            .model_eval(&matrix_validity_formula(&alpha), &assignment)
            .map_err(|e| DiffError::Ranking(e.to_string()))?;
        if !ok {
            return Err(DiffError::Ranking(
                "matrix does not define a ranking".into(),
            ));
        }
        Ok(Ranking::Matrix {
            vars: vars.iter().map(|v| name(v)).collect(),
            mats,
            derivs,
        })
    }

    pub fn vars(&self) -> Vec<Name> {
        match self {
            Ranking::Orderly { vars, .. } | Ranking::Matrix { vars, .. } => vars.clone(),
            Ranking::Elimination { blocks, .. } => blocks.iter().flatten().cloned().collect(),
        }
    }

    pub fn num_derivations(&self) -> usize {
        match self {
            Ranking::Orderly { derivs, .. }
            | Ranking::Elimination { derivs, .. }
            | Ranking::Matrix { derivs, .. } => derivs.len(),
        }
    }

    fn derivs(&self) -> &[usize] {
        match self {
            Ranking::Orderly { derivs, .. }
            | Ranking::Elimination { derivs, .. }
            | Ranking::Matrix { derivs, .. } => derivs,
        }
    }

    fn pos(&self, v: &Name) -> usize {
        self.vars()
            .iter()
            .position(|w| w == v)
            .unwrap_or(usize::MAX)
    }

    pub fn compare(&self, a: &Deriv, b: &Deriv) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let by_idx = || idx_cmp(self.derivs(), &a.idx, &b.idx);
        match self {
            Ranking::Orderly { .. } => a
                .ord()
                .cmp(&b.ord())
                .then_with(by_idx)
                .then_with(|| self.pos(&a.var).cmp(&self.pos(&b.var))),
            Ranking::Elimination { blocks, .. } => {
                let block = |v: &Name| {
                    blocks
                        .iter()
                        .position(|bl| bl.contains(v))
                        .unwrap_or(usize::MAX)
                };
                block(&b.var)
                    .cmp(&block(&a.var))
                    .then_with(|| a.ord().cmp(&b.ord()))
                    .then_with(by_idx)
                    .then_with(|| self.pos(&a.var).cmp(&self.pos(&b.var)))
            }
            Ranking::Matrix { mats, .. } => {
                let w = |d: &Deriv| -> Vec<Q> {
                    let mt = &mats[self.pos(&d.var)];
                    mt.iter()
                        .map(|row| {
                            let mut s = row[row.len() - 1].clone();
                            for (c, i) in d.idx.iter().enumerate() {
                                s += &row[c] * Q::from_integer((*i).into());
                            }
                            s
                        })
                        .collect()
                };
                w(a).cmp(&w(b))
                    .then_with(|| self.pos(&a.var).cmp(&self.pos(&b.var)))
                    .then_with(by_idx)
            }
        }
    }

    /// Ranking text, as accepted by [`super::parse_ranking`].
    pub fn describe(&self) -> String {
        let perm = |d: &[usize]| {
            if d.iter().enumerate().all(|(i, &j)| i == j) {
                String::new()
            } else {
                format!(
                    "/{}",
                    d.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            }
        };
        match self {
            Ranking::Orderly { vars, derivs } => {
                format!("orderly({}){}", vars.join(","), perm(derivs))
            }
            Ranking::Elimination { blocks, derivs } => format!(
                "elim({}){}",
                blocks
                    .iter()
                    .map(|b| b.join(","))
                    .collect::<Vec<_>>()
                    .join(";"),
                perm(derivs)
            ),
            Ranking::Matrix { vars, mats, derivs } => {
                let groups: Vec<String> = vars
                    .iter()
                    .zip(mats)
                    .map(|(v, mt)| {
                        let rows: Vec<String> = mt
                            .iter()
                            .map(|r| {
                                r.iter()
                                    .map(crate::poly::fmt_q)
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            })
                            .collect();
                        format!("{v}: {}", rows.join(", "))
                    })
                    .collect();
                format!("matrix({}){}", groups.join("; "), perm(derivs))
            }
        }
    }
}

/// Lexicographic on the multi-index, most significant derivation first.
fn idx_cmp(derivs: &[usize], a: &[u32], b: &[u32]) -> Ordering {
    for &i in derivs {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Parameters `a{j}_{r}_{c}` for `n` matrices of shape `(m+1)×(m+1)`.
pub fn alpha_vars(m: usize, n: usize, sort: &str) -> Vec<Vec<Vec<Var>>> {
    (1..=n)
        .map(|j| {
            (1..=m + 1)
                .map(|r| {
                    (1..=m + 1)
                        .map(|c| Var::new(&format!("a{j}_{r}_{c}"), sort))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn lex_positive(v: &[VPoly]) -> Formula {
    let zero = Term::int(0);
    Formula::or((0..v.len()).map(|r| {
        Formula::and(
            v[..r]
                .iter()
                .map(|p| Formula::eq(poly_to_term(p), zero.clone()))
                .chain(std::iter::once(Formula::lt(
                    zero.clone(),
                    poly_to_term(&v[r]),
                ))),
        )
    }))
}

/// Ranking axioms for matrix parameters: shared derivation columns, each
/// lexicographically non-negative.
pub fn matrix_validity_formula(alpha: &[Vec<Vec<Var>>]) -> Formula {
    let mut parts = Vec::new();
    let Some(first) = alpha.first() else {
        return Formula::True;
    };
    let m = first.len() - 1;
    for mt in &alpha[1..] {
        for (r, row) in mt.iter().enumerate() {
            for c in 0..m {
                parts.push(Formula::eq(Term::var(&row[c]), Term::var(&first[r][c])));
            }
        }
    }
    for c in 0..m {
        let col: Vec<VPoly> = first.iter().map(|row| VPoly::var(row[c].clone())).collect();
        let zero = Formula::and(
            col.iter()
                .map(|p| Formula::eq(poly_to_term(p), Term::int(0))),
        );
        parts.push(Formula::or([zero, lex_positive(&col)]));
    }
    Formula::and(parts)
}

fn weight(alpha: &[Vec<Vec<Var>>], j: usize, d: &Deriv) -> Vec<VPoly> {
    alpha[j]
        .iter()
        .map(|row| {
            let m = row.len() - 1;
            let mut p = VPoly::var(row[m].clone());
            for (c, i) in d.idx.iter().enumerate() {
                p = p.add(&VPoly::var(row[c].clone()).scale(&Q::from_integer((*i).into())));
            }
            p
        })
        .collect()
}

/// `a < b` under the matrix ranking with parameters `alpha`, tie order
/// `vars` and derivation priority `derivs`.
pub fn matrix_less_formula(
    alpha: &[Vec<Vec<Var>>],
    vars: &[Name],
    derivs: &[usize],
    a: &Deriv,
    b: &Deriv,
) -> Formula {
    let pos = |v: &Name| vars.iter().position(|w| w == v).unwrap_or(usize::MAX);
    let (ja, jb) = (pos(&a.var), pos(&b.var));
    let diff: Vec<VPoly> = weight(alpha, jb, b)
        .iter()
        .zip(weight(alpha, ja, a))
        .map(|(wb, wa)| wb.sub(&wa))
        .collect();
    let tie = ja.cmp(&jb).then_with(|| idx_cmp(derivs, &a.idx, &b.idx)) == Ordering::Less;
    let all_eq = Formula::and(
        diff.iter()
            .map(|p| Formula::eq(poly_to_term(p), Term::int(0))),
    );
    Formula::or([
        lex_positive(&diff),
        Formula::and([all_eq, Formula::constant(tie)]),
    ])
}
