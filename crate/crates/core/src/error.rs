//! Error type shared by all modules of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The function has no exponent of positive degree, so there is no hull,
    /// no critical rays and no r^q asymptotics to speak of.
    #[error("not an exponential polynomial of positive order (max deg Q = 0)")]
    NotExponentialOfPositiveOrder,

    /// Expression text rejected by the grammar. `position` is a byte offset
    /// into the source.
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    /// The argument of `exp(...)` did not flatten to a plain polynomial.
    #[error("non-polynomial exponent at position {position}: {message}")]
    NonPolynomialExponent { position: usize, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    /// A deserialized value violates an `ExpPoly` invariant.
    #[error("invalid exponential polynomial: {0}")]
    Invariant(String),

    #[error("convex hull of an empty point set")]
    EmptyPointSet,

    /// `default_c` hit a cusp with equal angular derivatives; cannot happen
    /// for distinct leading coefficients.
    #[error("internal error: vanishing cusp separation")]
    DegenerateCusp,

    /// Evaluation landed exactly on a zero where a logarithm or a logarithmic
    /// derivative was requested.
    #[error("evaluation at a zero of f")]
    EvaluationAtZero,

    /// |f| dropped below the boundary guard while sampling a contour. The
    /// caller is expected to perturb the region and retry.
    #[error("zero of f too close to the integration boundary (scaled |f| = {scaled_modulus:.3e})")]
    ZeroOnBoundary { scaled_modulus: f64 },

    /// The accumulated argument change failed the near-integer certificate.
    #[error("winding number {value} not within {tolerance} of an integer")]
    NonIntegerWinding { value: f64, tolerance: f64 },

    /// Subdivision gave up before separating zeros or meeting tolerances.
    #[error("zero search incomplete: {0}")]
    IncompleteSearch(String),

    /// A zero set was asked about radii it was never searched over.
    #[error("zero set incomplete to radius {requested}: searched only to {available}")]
    IncompleteZeroSet { requested: f64, available: f64 },

    /// Two strips claim the same zero (or can never separate inside the
    /// working disk); usually means c is too large for the radius range.
    #[error("overlapping strips: {0}")]
    OverlappingStrips(String),

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
