//! Exact-arithmetic toolkit for the quadratic family `phi_c(x) = x^2 - c` over Q.
//!
//! The crate computes rational periodic and preperiodic points of `phi_c`,
//! checks a collection of structural laws satisfied by such points (products of
//! numerator sums, modular class bounds, cycle-length bounds), verifies
//! Zieve-style period constraints over the p-adic integers at finite precision,
//! and drives a parameter sweep over `c = a/d^2` families looking for cycles of
//! length 4 or more.
//!
//! All arithmetic is exact: arbitrary-precision integers and reduced rationals
//! throughout, no floating point anywhere.

pub mod dynamics;
pub mod laws;
pub mod numbers;
pub mod search;
pub mod solver;
pub mod zieve;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not periodic at this precision: {0}")]
    NotPeriodic(String),
    #[error("iteration cap of {0} exceeded (internal error: theory guarantees termination)")]
    IterationCap(u64),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
