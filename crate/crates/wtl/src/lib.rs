//! Formal-series engine for dispersionless integrable hierarchies.
//!
//! The crate provides exact truncated Laurent/Puiseux arithmetic
//! ([`series`]), global rational functions with residue calculus
//! ([`ratfun`]), the tau-structure of the genus-zero universal Whitham
//! hierarchy on its formal manifold ([`whitham`], [`lax`]), prepotential
//! derivative tables of Hurwitz–Frobenius manifolds ([`hurwitz`]), their
//! open-sector extension ([`open`]), parity-symmetric (D-type) reductions
//! ([`even`]), and machine verification of the stabilization identities
//! connecting the finite-dimensional and formal pictures ([`verify`]).
//!
//! Everything is generic over a coefficient field ([`coeff::Coeff`]):
//! exact big rationals, arbitrary-precision floats, first-order jets for
//! directional derivatives, and quadratic extensions of the rationals.
//!
//! A command-line front end (`wtl`) drives table generation, stabilization
//! sweeps, and the seeded verification suites; see the guide chapters under
//! [`guide`].

pub mod coeff;
pub mod even;
mod guide_doc;
pub mod hurwitz;
pub mod io;
pub mod lax;
pub mod open;
pub mod ratfun;
pub mod report;
pub mod series;
pub mod verify;
pub mod whitham;

pub use guide_doc::guide;

pub use coeff::{Coeff, Jet, Mpf, Quad, Rat};
pub use ratfun::GlobalRational;
pub use series::{Center, LaurentSeries};

/// Errors produced by the engine.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no {degree}th root available for {value}")]
    RootUnavailable { degree: u32, value: String },
    #[error("truncation too small at {center}: exponent {needed} lies at or beyond the known window (order {order})")]
    InsufficientTruncation {
        center: String,
        needed: String,
        order: String,
    },
    #[error("series centers differ: {left} vs {right}")]
    CenterMismatch { left: String, right: String },
    #[error("fractional exponents not supported here: {0}")]
    Puiseux(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
