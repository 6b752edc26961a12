//! Selective Rips complexes of finite metric spaces.
//!
//! A selective Rips complex refines the usual Rips construction: a finite
//! vertex set is a simplex when, for every `i`, it splits into at most `i`
//! clusters of diameter below the `i`-th entry of a non-increasing scale
//! sequence. This crate builds those complexes and the machinery around
//! them:
//!
//! - validated finite (pseudo-)metric spaces, geodesic samplers, and gluing
//!   of two spaces along a correspondence ([`metric`], [`sample`], [`glue`]);
//! - simplex membership, complex enumeration, and the induced one-parameter
//!   filtration ([`srips`], [`complex`]);
//! - crushings (ball-inclusion collapses) with per-step certificates,
//!   greedy crushability search, and the inscribed-radius bounds that
//!   schedule them ([`crushing`]);
//! - covers by ball traces, nerves, critical radii and perturbation
//!   margins ([`nerve`]);
//! - GF(2) simplicial homology, persistence barcodes, and
//!   inclusion-induced map ranks ([`homology`]);
//! - text/JSON/CSV/SVG serialization ([`io`]) and end-to-end experiment
//!   drivers ([`counterexample`], [`reconstruct`]).
//!
//! All core types are generic over the scalar via [`scalar::Scalar`];
//! the aliases below fix `f64`, which is what the CLI uses.

// Guards are written as negations of the desired strict comparison so
// that NaN inputs fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod counterexample;
pub mod crushing;
pub mod glue;
pub mod homology;
pub mod io;
pub mod metric;
pub mod nerve;
pub mod reconstruct;
pub mod sample;
pub mod scalar;
pub mod scales;
pub mod srips;

pub use complex::{Filtration, SimplicialComplex};
pub use homology::Barcode;
pub use metric::FiniteMetricSpace;
pub use scalar::Scalar;
pub use scales::ScaleSequence;

/// Finite metric space over `f64`.
pub type Space = FiniteMetricSpace<f64>;
/// Scale sequence over `f64`.
pub type Scales = ScaleSequence<f64>;
/// Pseudo-metric union over `f64`.
pub type Union = glue::PseudoMetricUnion<f64>;

/// Default absolute tolerance for triangle-inequality validation.
pub const DEFAULT_TRIANGLE_TOL: f64 = 1e-9;
/// Default divisor applied to the inscribed radius when crushing a glued
/// space (kept conservative so every strict bound in the schedule has slack).
pub const DEFAULT_K_DIVISOR: f64 = 8.0;
/// Default cap on cover-intersection arity.
pub const DEFAULT_SIZE_CAP: usize = 6;
/// Default cap on simplex dimension.
pub const DEFAULT_DIM_CAP: usize = 3;
