use serde::{Deserialize, Serialize};

use super::{triangle_area, GeomError, Point2};
use crate::scalar::Scalar;

/// Determinant magnitude below which two lines are treated as parallel.
pub const PARALLEL_DET_EPS: f64 = 1e-12;

/// Minimum triangle area (world units squared) for three points to count as
/// non-collinear.
pub const COLLINEAR_AREA_EPS: f64 = 1e-6;

/// Line `a x + b y = c`, normalized so that `a² + b² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineEq<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> LineEq<T> {
    /// Builds a normalized line from raw coefficients. Returns `None` when
    /// `(a, b)` is the zero vector.
    pub fn new(a: T, b: T, c: T) -> Option<Self> {
        let n = a.hypot(b);
        if n > T::zero() && n.is_finite() && c.is_finite() {
            Some(Self { a: a / n, b: b / n, c: c / n })
        } else {
            None
        }
    }

    /// Line through `p` with direction `dir`.
    pub fn through(p: Point2<T>, dir: Point2<T>) -> Option<Self> {
        let n = dir.perp();
        Self::new(n.x, n.y, n.x * p.x + n.y * p.y)
    }

    /// Line through two distinct points.
    pub fn through_points(p: Point2<T>, q: Point2<T>) -> Option<Self> {
        Self::through(p, q - p)
    }

    /// Unsigned distance from `p` to the line.
    pub fn distance(&self, p: Point2<T>) -> T {
        (self.a * p.x + self.b * p.y - self.c).abs()
    }

    /// Unit direction vector of the line.
    pub fn direction(&self) -> Point2<T> {
        Point2::new(self.b, -self.a)
    }

    pub fn contains(&self, p: Point2<T>, tol: T) -> bool {
        self.distance(p) <= tol
    }
}

/// Solves the 2×2 system formed by two lines.
pub fn line_intersection<T: Scalar>(l1: &LineEq<T>, l2: &LineEq<T>) -> Result<Point2<T>, GeomError> {
    let det = l1.a * l2.b - l2.a * l1.b;
    if det.abs() <= T::lit(PARALLEL_DET_EPS) {
        return Err(GeomError::NoIntersection);
    }
    let x = (l1.c * l2.b - l2.c * l1.b) / det;
    let y = (l1.a * l2.c - l2.a * l1.c) / det;
    Ok(Point2::new(x, y))
}

/// Interior angle bisector at `vertex` of the angle `prev – vertex – next`.
pub fn angle_bisector<T: Scalar>(
    prev: Point2<T>,
    vertex: Point2<T>,
    next: Point2<T>,
) -> Result<LineEq<T>, GeomError> {
    if triangle_area(prev, vertex, next) <= T::lit(COLLINEAR_AREA_EPS) {
        return Err(GeomError::DegenerateAngle);
    }
    let u = (prev - vertex).normalized().ok_or(GeomError::DegenerateAngle)?;
    let v = (next - vertex).normalized().ok_or(GeomError::DegenerateAngle)?;
    let dir = (u + v).normalized().ok_or(GeomError::DegenerateAngle)?;
    LineEq::through(vertex, dir).ok_or(GeomError::DegenerateAngle)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point2<f64>;

    #[test]
    fn axes_cross_at_origin() {
        let x_axis = LineEq::new(0.0, 1.0, 0.0).unwrap();
        let y_axis = LineEq::new(1.0, 0.0, 0.0).unwrap();
        let p = line_intersection(&x_axis, &y_axis).unwrap();
        assert_eq!((p.x, p.y), (0.0, 0.0));
    }

    #[test]
    fn parallel_lines_do_not_intersect() {
        let l1 = LineEq::new(0.0, 1.0, 0.0).unwrap();
        let l2 = LineEq::new(0.0, 1.0, 1.0).unwrap();
        assert!(matches!(line_intersection(&l1, &l2), Err(GeomError::NoIntersection)));
        assert!(matches!(line_intersection(&l1, &l1), Err(GeomError::NoIntersection)));
    }

    #[test]
    fn diagonal_system() {
        // x + y = 2, x - y = 0 solved by hand: (1, 1)
        let l1 = LineEq::<f64>::new(1.0, 1.0, 2.0).unwrap();
        let l2 = LineEq::new(1.0, -1.0, 0.0).unwrap();
        let p = line_intersection(&l1, &l2).unwrap();
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_invariant() {
        let l = LineEq::<f64>::new(3.0, 4.0, 10.0).unwrap();
        assert!((l.a * l.a + l.b * l.b - 1.0).abs() < 1e-15);
        assert!(LineEq::new(0.0, 0.0, 1.0).is_none());
    }

    fn bisector_dir(l: &LineEq<f64>) -> P {
        let d = l.direction();
        // canonical sign: first quadrant-ish
        if d.x < 0.0 || (d.x == 0.0 && d.y < 0.0) {
            -d
        } else {
            d
        }
    }

    #[test]
    fn bisector_of_right_angle() {
        let l = angle_bisector(P::new(1.0, 0.0), P::new(0.0, 0.0), P::new(0.0, 1.0)).unwrap();
        let d = bisector_dir(&l);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.x - s).abs() < 1e-12 && (d.y - s).abs() < 1e-12);
        assert!(l.distance(P::new(0.0, 0.0)) < 1e-15);

        let l2 = angle_bisector(P::new(2.0, 0.0), P::new(0.0, 0.0), P::new(0.0, 2.0)).unwrap();
        let d2 = bisector_dir(&l2);
        assert!((d.x - d2.x).abs() < 1e-15 && (d.y - d2.y).abs() < 1e-15);
        assert!((l.c - l2.c).abs() < 1e-15);
    }

    #[test]
    fn bisector_matches_half_angle_rotation() {
        // Oracle: rotate the first arm by half the angle between the arms.
        let prev = P::new(1.0, 0.0);
        let next = P::new(-1.0, 1.0);
        let l = angle_bisector(prev, P::new(0.0, 0.0), next).unwrap();
        let a0 = prev.y.atan2(prev.x);
        let a1 = next.y.atan2(next.x);
        let half = a0 + (a1 - a0) / 2.0;
        let expected = P::new(half.cos(), half.sin());
        let d = l.direction();
        assert!(d.cross(expected).abs() < 1e-12, "direction {d:?} vs {expected:?}");
        // and it is the interior bisector: same orientation as the arm sum
        let arm_sum = prev.normalized().unwrap() + next.normalized().unwrap();
        assert!(arm_sum.cross(expected).abs() < 1e-12 && arm_sum.dot(expected) > 0.0);
    }

    #[test]
    fn collinear_angle_rejected() {
        let r = angle_bisector(P::new(-1.0, 0.0), P::new(0.0, 0.0), P::new(1.0, 0.0));
        assert!(matches!(r, Err(GeomError::DegenerateAngle)));
    }

    #[test]
    fn works_in_f32() {
        let l1 = LineEq::<f32>::new(1.0, 1.0, 2.0).unwrap();
        let l2 = LineEq::<f32>::new(1.0, -1.0, 0.0).unwrap();
        let p = line_intersection(&l1, &l2).unwrap();
        assert!((p.x - 1.0).abs() < 1e-6 && (p.y - 1.0).abs() < 1e-6);
    }
}
