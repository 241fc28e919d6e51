//! Componentwise Kähler geometry from a potential jet in Bochner gauge.
//!
//! The potential is `|z|² + H` with `H = Σ a_{αβ̄} z^α z̄^β`, `|α|, |β| ≥ 2`.
//! The Taylor coefficients `a_{αβ̄}` are either symbolic (jet variables) or
//! numbers. Every quantity is a truncated power series in `(z, z̄)` and is
//! finally evaluated at the origin.
//!
//! `a_{αβ̄}` carries weight `(|α| + |β|)/2 − 1`; the code uses the doubled
//! weight `|α| + |β| − 2` so that everything stays integral.

mod geometry;
mod poly;
mod potential;
mod scalars;
mod series;

use thiserror::Error;

pub use geometry::{curvature_package, laplacian_g, ComponentTensor, CurvaturePackage, Slot};
pub use poly::{Cap, Graded, JetMono, JetPoly, JetVar, MAX_DIM};
pub use potential::{JetValue, Potential};
pub use scalars::{
    named_scalar, named_scalar_at_order, named_scalar_audited, scalar_from_package, todd_form,
    NamedScalar,
};
pub use series::{Exp, ScalarSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("jet a[{alpha:?};{beta:?}] is not allowed in Bochner gauge (need |α|, |β| ≥ 2)")]
    ForbiddenJet { alpha: Vec<u8>, beta: Vec<u8> },
    #[error("dimension {0} is outside 1..={max}", max = MAX_DIM)]
    Dimension(usize),
    #[error("multi-index entry {0} too large")]
    IndexTooLarge(u32),
    #[error("series truncation exhausted; raise the truncation order")]
    Truncation,
    #[error("truncation order {got} below the minimum {min}")]
    OrderTooSmall { got: usize, min: usize },
    #[error("unknown named scalar `{0}`")]
    UnknownScalar(String),
    #[error("malformed potential: {0}")]
    Malformed(String),
    #[error("jet a[{alpha:?};{beta:?}] is inconsistent with its hermitian partner")]
    NotHermitian { alpha: Vec<u8>, beta: Vec<u8> },
    #[error("truncation audit failed for {0}: value changed at a higher order")]
    AuditFailed(String),
}
