//! Gutt–Hutchings and ECH capacities of convex and concave toric domains.
//!
//! A toric domain is described by its moment image `Ω ⊂ ℝⁿ≥0` ([`domains`]).
//! Capacities are computed from support functions of `Ω` ([`ghcap`], [`echcap`]),
//! perturbation families are built in [`families`], and brute-force references
//! used by the test suites live in [`oracle`].

pub mod domains;
pub mod echcap;
pub mod families;
pub mod ghcap;
pub mod numeric;
pub mod oracle;

pub use domains::{Curve, Curvature, Domain, GraphDomain, PolytopeDomain, Profile};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no sign change on [{a}, {b}] (f(a) = {fa}, f(b) = {fb})")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("singular linear system")]
    Singular,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("operation not supported: {0}")]
    Unsupported(String),
    #[error("enumeration of {0} compositions exceeds the cap")]
    TooManyCompositions(u128),
    #[error("curvature violated: {0}")]
    Curvature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
