//! Procedural geometry diagrams with pixel masks, referring expressions and
//! polygon token sequences, plus the IoU / buffered-IoU evaluation harness.
//!
//! The analytic layer in [`geom`] is generic over [`scalar::Scalar`]
//! (`f32` or `f64`); rendering, masks, codec and metrics work in `f64`
//! pixel space.

pub mod codec;
pub mod geom;
pub mod lang;
pub mod manifest;
pub mod metrics;
pub mod morph;
pub mod pipeline;
pub mod raster;
pub mod render;
pub mod scalar;
pub mod scene;

pub use scalar::Scalar;

pub type Point = geom::Point2<f64>;
pub type Point32 = geom::Point2<f32>;
pub type Shape = geom::ShapeInstance<f64>;
pub type Shape32 = geom::ShapeInstance<f32>;
pub type Circle = geom::Circle<f64>;
pub type Circle32 = geom::Circle<f32>;
pub type Rect = geom::Rect<f64>;
pub type Rect32 = geom::Rect<f32>;
pub type Line = geom::LineEq<f64>;
pub type Line32 = geom::LineEq<f32>;
