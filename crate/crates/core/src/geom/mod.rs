//! Analytic construction and validation of the supported quadrilateral families.

mod incircle;
mod line;
mod point;
mod sample;
mod shape;
mod validate;

use thiserror::Error;

pub use incircle::{bisector_intersection, incenter, incircle_of, side_distances};
pub use line::{angle_bisector, line_intersection, LineEq, COLLINEAR_AREA_EPS, PARALLEL_DET_EPS};
pub use point::{Circle, Point2, Rect};
pub use sample::{
    ccw_from_lexmin, default_bounds, sample_kind, sample_shape, sample_shape_in, INCIRCLE_RADIUS_RANGE, MAX_ATTEMPTS,
    MIN_TANGENT_GAP_DEG, SIDE_RANGE,
};
pub use shape::{
    default_labels, make_trapezoid, ShapeInstance, ShapeKind, TrapezoidParams, BASE_RANGE, HEIGHT_RANGE, OFFSET_RANGE,
    RATIO_RANGE,
};
pub use validate::{
    constraint_residual, convex_hull, opposite_side_crosses, opposite_side_sines, pitot_residual, triangle_area,
    validate, validate_shape, ValidationReport, TRAPEZOID_EXCLUSIVITY_EPS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("no valid {kind} after {attempts} attempts")]
    GenerationExhausted { kind: ShapeKind, attempts: usize },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("lines are parallel or coincident")]
    NoIntersection,
    #[error("angle vertices are collinear")]
    DegenerateAngle,
    #[error("side distances from the bisector intersection disagree by {spread:e}")]
    NotTangential { spread: f64 },
    #[error("operation requires a {expected}, got a {got}")]
    WrongKind { expected: ShapeKind, got: ShapeKind },
}
