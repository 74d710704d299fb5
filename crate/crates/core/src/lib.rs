//! Three-point contraction conditions on finite metric spaces.
//!
//! A self-map `T` of a metric space may contract distances (Banach), contract
//! the perimeters of triangles, or satisfy a more general condition
//! `F(d(Tx,Ty), d(Ty,Tz), d(Tx,Tz)) <= alpha * G(d(x,y), d(y,z), d(x,z))`
//! for a pair of symmetric aggregators `F >= G`. On a finite space every
//! supremum is a maximum, so this crate computes the exact moduli together
//! with witnesses, the strict (Edelstein-style) variants, and runs certified
//! Picard iteration.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure and
//! deterministic. The triple sweeps expose partial results over index ranges
//! ([`classifier::RatioMax`], [`classifier::StrictMin`]) so that a caller can
//! run them in parallel and merge without changing the result.
//!
//! Modules:
//! - [`metric`]: spaces, maps, validation, perimeters and triple enumeration
//! - [`aggregators`]: the `F`/`G` families and their admissibility checks
//! - [`classifier`]: moduli, strict checks and full classification
//! - [`solver`]: Picard orbits, a priori bounds, fixed points
//! - [`gallery`]: worked example spaces and random instances

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(a < b)` is deliberate: it is true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod aggregators;
pub mod classifier;
pub mod gallery;
pub mod metric;
pub mod solver;

pub use aggregators::{AdmissibilityReport, AggregatorError, PhiSpec, TripleAggregator, Verdict};
pub use classifier::{
    banach_modulus, classify, fg_modulus, find_period2_points, is_edelstein_contractive,
    is_edelstein_perimeter, perimeter_modulus, pointwise_contractive_at, ClassificationReport,
    ClassifyError, ModulusReport, StrictVerdict, Sweep,
};
pub use gallery::{GalleryConfig, GalleryError};
pub use metric::{
    enumerate_triples, perimeter, validate_metric, DistanceMatrix, FiniteMetricSpace, MetricError,
    MetricValidationReport, SelfMap,
};
pub use solver::{
    a_priori_bound, check_perimeter_chain, enumerate_fixed_points, picard_orbit, solve_fixed_point,
    FixedPointResult, OrbitTrace, SolverError, Termination,
};
