//! Uniform bounds for total algorithms over decidable theories.
//!
//! The crate is organised bottom-up:
//!
//! - [`logic`]: sorted first-order formulas, substitution, normal forms, parsing.
//! - [`theory`]: quantifier elimination and decision for DLO, linear rational
//!   arithmetic, the equational theory of algebraically closed fields, and
//!   disjoint unions of these.
//! - [`oracle`]: resumable algorithms that query an evaluation oracle.
//! - [`extract`]: the query-tree bound extractor.
//! - [`diffalg`]: differential polynomials, rankings, reduction and
//!   Rosenfeld–Gröbner decomposition.
//! - [`kolchin`]: numeric polynomials, chain-length bounds and the symbolic
//!   bound pipeline.
//! - [`delay`]: differential-difference polynomials and solution verifiers.

pub mod delay;
pub mod diffalg;
pub mod extract;
pub mod kolchin;
pub mod logic;
pub mod oracle;
pub mod poly;
pub mod theory;
