//! Simplex-spline spaces over finite point configurations, built from regular
//! fine zonotopal tilings.
//!
//! Geometry is decided with exact rationals; spline values are computed in
//! `f32` or `f64` through the [`Real`] trait.

pub mod construction;
pub mod error;
pub mod evalgraph;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod polar;
pub mod query;
pub mod sampling;
pub mod scalar;
pub mod spline;
pub mod tiling;
pub mod verify;

pub use construction::{brute_force_regular_tiling, incremental_build};
pub use error::{Error, Result};
pub use evalgraph::{EdgeRule, EvalGraph};
pub use geometry::{HeightFunction, PointConfig};
pub use polar::{blossom, PolarForm, Polynomial};
pub use query::{Orienter, PointLocator};
pub use scalar::{Rational, Real};
pub use spline::{Query, SplineEvaluator};
pub use tiling::{Tile, ZonotopalTiling};
pub use verify::{verify_tiling, VerifyOptions};

pub type Query64 = Query<f64>;
pub type Query32 = Query<f32>;
pub type SplineEvaluator64<'a> = SplineEvaluator<'a, f64>;
pub type SplineEvaluator32<'a> = SplineEvaluator<'a, f32>;
pub type Polynomial64 = Polynomial<f64>;
pub type Polynomial32 = Polynomial<f32>;
pub type PolarForm64 = PolarForm<f64>;
pub type PolarForm32 = PolarForm<f32>;
