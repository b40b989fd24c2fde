//! Symbolic exponential polynomials `f(z) = Σ P_j(z)·e^{Q_j(z)}` and the
//! machinery to study where their zeros live: convex-hull geometry of the
//! leading exponent coefficients, critical rays and logarithmic strips,
//! overflow-safe evaluation, argument-principle zero location, Nevanlinna
//! proximity/characteristic functions, and empirical-vs-predicted reports
//! for the asymptotic zero-counting laws.
//!
//! The typical pipeline:
//!
//! ```
//! use expzero::{parse_expression, locate_zeros, Region, ZeroSearchParams};
//!
//! let f = parse_expression("exp(i*z) - exp(-i*z)").unwrap(); // 2i·sin z
//! let nf = f.normalize().unwrap();
//! let rays = expzero::critical_rays(&nf).unwrap();
//! assert_eq!(rays.len(), 2); // the real axis, both directions
//!
//! let zs = locate_zeros(&f, &Region::disk(0.0.into(), 4.0), &ZeroSearchParams::default()).unwrap();
//! assert_eq!(zs.total_multiplicity(), 3); // 0 and ±π
//! ```

pub mod error;
pub mod evaluate;
pub mod exppoly;
pub mod geometry;
pub mod nevanlinna;
pub mod parse;
pub mod poly;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
pub use evaluate::{eval_scaled, log_abs, logderiv, ScaledValue};
pub use exppoly::{ExpPoly, ExpTerm, LeadingEntry, NormalizedForm};
pub use geometry::{
    convex_hull, critical_rays, default_c, indicator, CriticalRay, HullGeometry, Indicator,
    StripSpec,
};
pub use nevanlinna::{proximity, proximity_inverse, CharacteristicSample};
pub use parse::{from_json, parse_expression, to_canonical_text, to_json};
pub use poly::Poly;
pub use verify::{predict_all, verify_counts, verify_characteristic, CountReport, Prediction};
pub use zeros::{
    classify_by_strip, locate_zeros, winding_count, Region, StripClassification, Zero, ZeroSet,
    ZeroSearchParams, ZeroTag,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
