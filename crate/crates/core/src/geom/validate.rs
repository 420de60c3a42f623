use serde::{Deserialize, Serialize};

use super::line::COLLINEAR_AREA_EPS;
use super::{Circle, LineEq, Point2, Rect, ShapeInstance, ShapeKind};
use crate::scalar::Scalar;

/// Outcome of the acceptance checks applied to a candidate quadrilateral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// All four points are convex-hull vertices.
    pub convex: bool,
    /// The given vertex order is the counter-clockwise hull order.
    pub ccw: bool,
    pub min_triple_area: f64,
    pub in_bounds: bool,
    /// Per-kind deviation from the defining constraint, when a kind was given.
    pub constraint_residual: Option<f64>,
    pub residual_tol: f64,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.convex
            && self.ccw
            && self.min_triple_area > COLLINEAR_AREA_EPS
            && self.in_bounds
            && self.constraint_residual.is_none_or(|r| r < self.residual_tol)
    }
}

pub fn triangle_area<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b - a).cross(c - a).abs() * T::lit(0.5)
}

/// Andrew's monotone chain. Returns hull vertices counter-clockwise,
/// dropping collinear points.
pub fn convex_hull<T: Scalar>(points: &[Point2<T>]) -> Vec<Point2<T>> {
    let mut pts: Vec<Point2<T>> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point2<T>, a: Point2<T>, b: Point2<T>| (a - o).cross(b - o);
    let mut hull: Vec<Point2<T>> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Geometric checks that do not depend on the shape family.
pub fn validate<T: Scalar>(vertices: &[Point2<T>; 4], bounds: &Rect<T>) -> ValidationReport {
    let hull = convex_hull(vertices);
    let convex = hull.len() == 4;
    let ccw = convex && {
        // the input order must be a cyclic rotation of the CCW hull order
        let start = hull.iter().position(|h| *h == vertices[0]);
        start.is_some_and(|s| (0..4).all(|i| hull[(s + i) % 4] == vertices[i]))
    };
    let mut min_area = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                let a = triangle_area(vertices[i], vertices[j], vertices[k]).as_f64();
                min_area = min_area.min(a);
            }
        }
    }
    let in_bounds = vertices.iter().all(|p| p.is_finite() && bounds.contains(*p));
    ValidationReport {
        convex,
        ccw,
        min_triple_area: min_area,
        in_bounds,
        constraint_residual: None,
        residual_tol: T::CONSTRAINT_TOL,
    }
}

/// Family checks on top of [`validate`].
pub fn validate_shape<T: Scalar>(shape: &ShapeInstance<T>, bounds: &Rect<T>) -> ValidationReport {
    let mut report = validate(&shape.vertices, bounds);
    let incircle_ok = shape.kind.has_incircle() == shape.incircle.is_some();
    let residual = constraint_residual(shape.kind, &shape.vertices, shape.incircle.as_ref());
    report.constraint_residual = Some(if incircle_ok { residual } else { f64::INFINITY });
    report.residual_tol = if shape.kind == ShapeKind::TangentialQuad { T::TANGENCY_TOL } else { T::CONSTRAINT_TOL };
    report
}

fn sin_between<T: Scalar>(u: Point2<T>, v: Point2<T>) -> f64 {
    let (u, v) = (u.to_f64(), v.to_f64());
    (u.cross(v) / (u.norm() * v.norm())).abs()
}

fn cos_between<T: Scalar>(u: Point2<T>, v: Point2<T>) -> f64 {
    let (u, v) = (u.to_f64(), v.to_f64());
    (u.dot(v) / (u.norm() * v.norm())).abs()
}

/// Sines of the angles between the two pairs of opposite sides
/// `(AB, DC)` and `(AD, BC)`.
pub fn opposite_side_sines<T: Scalar>(v: &[Point2<T>; 4]) -> (f64, f64) {
    let [a, b, c, d] = *v;
    (sin_between(b - a, c - d), sin_between(d - a, c - b))
}

/// Raw cross products of the opposite side pairs.
pub fn opposite_side_crosses<T: Scalar>(v: &[Point2<T>; 4]) -> (f64, f64) {
    let [a, b, c, d] = *v;
    ((b - a).cross(c - d).as_f64().abs(), (d - a).cross(c - b).as_f64().abs())
}

fn max_right_angle_dev<T: Scalar>(v: &[Point2<T>; 4]) -> f64 {
    (0..4)
        .map(|i| cos_between(v[(i + 3) % 4] - v[i], v[(i + 1) % 4] - v[i]))
        .fold(0.0, f64::max)
}

fn side_spread<T: Scalar>(v: &[Point2<T>; 4]) -> f64 {
    let s: Vec<f64> = (0..4).map(|i| v[i].distance(v[(i + 1) % 4]).as_f64()).collect();
    let max = s.iter().cloned().fold(f64::MIN, f64::max);
    let min = s.iter().cloned().fold(f64::MAX, f64::min);
    max - min
}

/// Required minimum raw cross product for the non-parallel pair of a trapezoid.
pub const TRAPEZOID_EXCLUSIVITY_EPS: f64 = 1e-6;

/// Deviation from the family's defining constraint. Zero means exact.
pub fn constraint_residual<T: Scalar>(kind: ShapeKind, v: &[Point2<T>; 4], incircle: Option<&Circle<T>>) -> f64 {
    let (s1, s2) = opposite_side_sines(v);
    let parallelogram = s1.max(s2);
    match kind {
        ShapeKind::Parallelogram => parallelogram,
        ShapeKind::Rectangle => parallelogram.max(max_right_angle_dev(v)),
        ShapeKind::Rhombus => parallelogram.max(side_spread(v)),
        ShapeKind::Square => parallelogram.max(max_right_angle_dev(v)).max(side_spread(v)),
        ShapeKind::Trapezoid | ShapeKind::IsoscelesTrapezoid => {
            let (c1, c2) = opposite_side_crosses(v);
            // exactly one pair: the other pair must be clearly non-parallel
            let (parallel, other_cross, legs) = if s1 <= s2 {
                (s1, c2, (v[0].distance(v[3]), v[1].distance(v[2])))
            } else {
                (s2, c1, (v[0].distance(v[1]), v[3].distance(v[2])))
            };
            if other_cross <= TRAPEZOID_EXCLUSIVITY_EPS {
                return f64::INFINITY;
            }
            if kind == ShapeKind::IsoscelesTrapezoid {
                parallel.max((legs.0 - legs.1).as_f64().abs())
            } else {
                parallel
            }
        }
        ShapeKind::TangentialQuad => match incircle {
            Some(c) if !strictly_inside(v, c.center) => f64::INFINITY,
            Some(c) => (0..4)
                .map(|i| match LineEq::through_points(v[i], v[(i + 1) % 4]) {
                    Some(l) => (l.distance(c.center) - c.radius).as_f64().abs(),
                    None => f64::INFINITY,
                })
                .fold(0.0, f64::max),
            None => pitot_residual(v),
        },
    }
}

fn strictly_inside<T: Scalar>(v: &[Point2<T>; 4], p: Point2<T>) -> bool {
    (0..4).all(|i| (v[(i + 1) % 4] - v[i]).cross(p - v[i]) > T::zero())
}

/// `|AB| + |CD| − |BC| − |DA|`, zero for tangential quadrilaterals.
pub fn pitot_residual<T: Scalar>(v: &[Point2<T>; 4]) -> f64 {
    let s: Vec<f64> = (0..4).map(|i| v[i].distance(v[(i + 1) % 4]).as_f64()).collect();
    (s[0] + s[2] - s[1] - s[3]).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point2<f64>;

    fn bounds() -> Rect<f64> {
        Rect::new(P::new(-100.0, -100.0), P::new(100.0, 100.0))
    }

    fn quad(p: [(f64, f64); 4]) -> [P; 4] {
        p.map(|(x, y)| P::new(x, y))
    }

    #[test]
    fn unit_square_accepted() {
        let r = validate(&quad([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), &bounds());
        assert!(r.accepted(), "{r:?}");
        assert!((r.min_triple_area - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collinear_triple_rejected() {
        let r = validate(&quad([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0)]), &bounds());
        assert!(!r.accepted());
        assert!(r.min_triple_area <= 1e-6);
    }

    #[test]
    fn dart_rejected_as_non_convex() {
        let v = quad([(0.0, 0.0), (4.0, 0.0), (1.0, 1.0), (0.0, 4.0)]);
        // oracle: only three extreme points
        assert_eq!(convex_hull(&v).len(), 3);
        let r = validate(&v, &bounds());
        assert!(!r.convex && !r.accepted());
    }

    #[test]
    fn clockwise_order_rejected() {
        let r = validate(&quad([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]), &bounds());
        assert!(r.convex && !r.ccw && !r.accepted());
    }

    #[test]
    fn out_of_bounds_rejected() {
        let small = Rect::new(P::new(0.0, 0.0), P::new(0.5, 0.5));
        let r = validate(&quad([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), &small);
        assert!(!r.in_bounds && !r.accepted());
    }

    #[test]
    fn residuals_for_exact_shapes() {
        let sq = quad([(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]);
        assert_eq!(constraint_residual(ShapeKind::Square, &sq, None), 0.0);
        let para = quad([(0.0, 0.0), (4.0, 0.0), (5.0, 2.0), (1.0, 2.0)]);
        assert_eq!(constraint_residual(ShapeKind::Parallelogram, &para, None), 0.0);
        assert!(constraint_residual(ShapeKind::Rectangle, &para, None) > 0.1);
        // a parallelogram is not a trapezoid under the exclusive definition
        assert_eq!(constraint_residual(ShapeKind::Trapezoid, &para, None), f64::INFINITY);
        let trap = quad([(0.0, 0.0), (6.0, 0.0), (4.0, 2.0), (2.0, 2.0)]);
        assert_eq!(constraint_residual(ShapeKind::IsoscelesTrapezoid, &trap, None), 0.0);
    }

    #[test]
    fn pitot_for_kite() {
        // kite with AB = DA = sqrt(2) and BC = CD = sqrt(10) is tangential
        let v = quad([(0.0, -1.0), (1.0, 0.0), (0.0, 3.0), (-1.0, 0.0)]);
        assert!(pitot_residual(&v) < 1e-15);
        let not_tangential = quad([(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 1.0)]);
        assert!((pitot_residual(&not_tangential) - 4.0).abs() < 1e-12);
    }
}
