//! Formal Puiseux series and algebraic solutions of first order autonomous
//! algebraic ODEs F(y, y') = 0 with exact coefficients in Q or algebraic
//! extensions of Q.
//!
//! The pipeline: exact tower arithmetic ([`field`]), polynomial algebra
//! ([`upoly`], [`bipoly`], [`factor`]), truncated Puiseux series
//! ([`series`]), local places of the associated curve ([`curve`]), the
//! solution-place test and Briot-Bouquet coefficient solver ([`briot`]),
//! the full solver ([`solver`]) and the algebraic-solution decision
//! ([`algebraic`]). [`parse`] and [`report`] form the CLI surface.

pub mod algebraic;
pub mod bipoly;
pub mod briot;
pub mod curve;
pub mod factor;
pub mod field;
pub mod parse;
pub mod report;
pub mod series;
pub mod solver;
pub mod upoly;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live in incompatible field towers")]
    IncompatibleFields,
    #[error("tower degree {0} exceeds the cap {1} (set AODE_SOLVE_MAX_TOWER to raise it)")]
    TowerDegreeExceeded(u64, u64),
    #[error("minimal polynomial is reducible{}", .0.as_ref().map(|f| format!(": factor {f}")).unwrap_or_default())]
    Reducible(Option<String>),
    #[error("minimal polynomial of an existing tower level is reducible")]
    ReducibleMinimalPolynomial,
    #[error("order unknown beyond the truncation {0}")]
    OrderUnknown(String),
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("inconsistent coefficient equation: {0}")]
    Inconsistent(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
