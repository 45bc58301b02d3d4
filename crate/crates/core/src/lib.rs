//! Asymptotic chromatic constant and greedy colorings of random block graphs.
//!
//! The crate is organized around the pipeline:
//!
//! * [`model`] — block model parameters `(alpha, P)` and the scalar functions
//!   attached to them (class sizes, subset exponents, region membership).
//! * [`region`] — geometry of the admissible region: exact ray exits, boundary
//!   sampling, and the certified bracket for the chromatic constant `c*` with
//!   a convex-combination certificate.
//! * [`graph`] — seeded sampling of block graphs with bitset adjacency.
//! * [`indep`] — typed independent sets: queries, expected counts, randomized
//!   search, and exact oracles for small graphs.
//! * [`coloring`] — the two-regime greedy coloring built from a `c*`
//!   certificate, plus DSATUR and exact chromatic number baselines.
//!
//! Numeric code is generic over the scalar type through [`scalar::Real`];
//! the `*64` aliases below fix `f64` for ordinary use.

pub mod bits;
pub mod coloring;
pub mod error;
pub mod graph;
pub mod indep;
pub mod model;
pub mod region;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::BlockGraph;
pub use model::{natural_class_size, BlockModel, PairClass, ScaledType, SubsetIndex, TypeVector};
pub use region::{
    boundary_cloud, boundary_export, c_star, homogeneous_cstar, ray_exit, union_case_cstar,
    BoundarySample, CStarOptions, CStarResult, Regime,
};
pub use scalar::Real;

/// Double-precision aliases for the generic core types.
pub type BlockModel64 = model::BlockModel<f64>;
pub type ScaledType64 = model::ScaledType<f64>;
pub type BoundarySample64 = region::BoundarySample<f64>;
pub type CStarResult64 = region::CStarResult<f64>;
pub type CStarOptions64 = region::CStarOptions<f64>;

/// Single-precision aliases.
pub type BlockModel32 = model::BlockModel<f32>;
pub type ScaledType32 = model::ScaledType<f32>;
