use super::{angle_bisector, line_intersection, Circle, GeomError, LineEq, Point2, ShapeInstance, ShapeKind};
use crate::scalar::Scalar;

/// Distances from `p` to the four side lines of the quadrilateral.
pub fn side_distances<T: Scalar>(v: &[Point2<T>; 4], p: Point2<T>) -> Result<[T; 4], GeomError> {
    let mut out = [T::zero(); 4];
    for (i, d) in out.iter_mut().enumerate() {
        let l = LineEq::through_points(v[i], v[(i + 1) % 4]).ok_or(GeomError::DegenerateAngle)?;
        *d = l.distance(p);
    }
    Ok(out)
}

/// Intersection of the interior bisectors at vertices `i` and `j`.
pub fn bisector_intersection<T: Scalar>(v: &[Point2<T>; 4], i: usize, j: usize) -> Result<Point2<T>, GeomError> {
    let bis = |k: usize| angle_bisector(v[(k + 3) % 4], v[k], v[(k + 1) % 4]);
    line_intersection(&bis(i)?, &bis(j)?)
}

/// Incircle of a convex quadrilateral from its angle bisectors.
///
/// The bisectors at `A` and `B` are intersected; the result is accepted only
/// when its distances to all four side lines agree within the tangency
/// tolerance of `T`.
pub fn incircle_of<T: Scalar>(v: &[Point2<T>; 4]) -> Result<Circle<T>, GeomError> {
    let center = bisector_intersection(v, 0, 1)?;
    let d = side_distances(v, center)?;
    let max = d.iter().cloned().fold(T::neg_infinity(), T::max);
    let min = d.iter().cloned().fold(T::infinity(), T::min);
    let spread = (max - min).as_f64();
    if spread > T::TANGENCY_TOL {
        return Err(GeomError::NotTangential { spread });
    }
    let radius = d.iter().fold(T::zero(), |a, &x| a + x) * T::lit(0.25);
    Ok(Circle { center, radius })
}

/// Incenter of a tangential quadrilateral.
pub fn incenter<T: Scalar>(shape: &ShapeInstance<T>) -> Result<Point2<T>, GeomError> {
    if shape.kind != ShapeKind::TangentialQuad {
        return Err(GeomError::WrongKind { expected: ShapeKind::TangentialQuad, got: shape.kind });
    }
    Ok(incircle_of(&shape.vertices)?.center)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point2<f64>;

    #[test]
    fn unit_square_incircle() {
        let v = [P::new(0.0, 0.0), P::new(1.0, 0.0), P::new(1.0, 1.0), P::new(0.0, 1.0)];
        let c = incircle_of(&v).unwrap();
        assert!((c.center.x - 0.5).abs() < 1e-12 && (c.center.y - 0.5).abs() < 1e-12);
        assert!((c.radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rhombus_incenter_at_origin() {
        // diagonals 2 (x) and 4 (y)
        let v = [P::new(0.0, -2.0), P::new(1.0, 0.0), P::new(0.0, 2.0), P::new(-1.0, 0.0)];
        let c = incircle_of(&v).unwrap();
        assert!(c.center.x.abs() < 1e-12 && c.center.y.abs() < 1e-12);
    }

    #[test]
    fn non_tangential_rejected() {
        let v = [P::new(0.0, 0.0), P::new(4.0, 0.0), P::new(4.0, 1.0), P::new(0.0, 1.0)];
        assert!(matches!(incircle_of(&v), Err(GeomError::NotTangential { .. })));
    }

    #[test]
    fn wrong_kind_reported() {
        let shape = ShapeInstance {
            kind: ShapeKind::Square,
            vertices: [P::new(0.0, 0.0), P::new(1.0, 0.0), P::new(1.0, 1.0), P::new(0.0, 1.0)],
            labels: crate::geom::default_labels(),
            incircle: None,
        };
        assert!(matches!(incenter(&shape), Err(GeomError::WrongKind { .. })));
    }
}
