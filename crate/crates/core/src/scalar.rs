//! Scalar abstraction for the analytic geometry layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the constraint solver is generic over.
///
/// `CONSTRAINT_TOL` is the residual below which an equational constraint
/// (parallelism, right angle, equal lengths) counts as satisfied. It is
/// `1e-9` for `f64` and scaled up for `f32` where the same construction
/// cannot reach that precision.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    const CONSTRAINT_TOL: f64;
    const TANGENCY_TOL: f64;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    const CONSTRAINT_TOL: f64 = 1e-9;
    const TANGENCY_TOL: f64 = 1e-6;
}

impl Scalar for f32 {
    const CONSTRAINT_TOL: f64 = 1e-4;
    const TANGENCY_TOL: f64 = 1e-3;
}
