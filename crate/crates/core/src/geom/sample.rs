use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::{
    default_labels, line_intersection, make_trapezoid, validate_shape, Circle, GeomError, LineEq, Point2, Rect,
    ShapeInstance, ShapeKind, TrapezoidParams,
};
use crate::scalar::Scalar;

/// Rejection budget for [`sample_shape`].
pub const MAX_ATTEMPTS: usize = 100;

pub const SIDE_RANGE: (f64, f64) = (3.0, 10.0);
pub const INCIRCLE_RADIUS_RANGE: (f64, f64) = (1.5, 4.0);
/// Minimum angular gap between consecutive tangent points, degrees.
pub const MIN_TANGENT_GAP_DEG: f64 = 30.0;

/// World rectangle every accepted shape must fit in (centroid at origin).
pub fn default_bounds<T: Scalar>() -> Rect<T> {
    Rect::new(Point2::from_f64(-12.0, -12.0), Point2::from_f64(12.0, 12.0))
}

/// Picks a family uniformly.
pub fn sample_kind<R: Rng + ?Sized>(rng: &mut R) -> ShapeKind {
    ShapeKind::ALL[rng.random_range(0..ShapeKind::ALL.len())]
}

/// Samples a valid instance of `kind` by analytic construction.
///
/// Each attempt builds the shape in its construction frame, orders the
/// vertices counter-clockwise starting from the lexicographically smallest
/// one, applies a random rotation and centers the centroid on the origin.
/// Attempts failing validation are discarded whole and redrawn.
pub fn sample_shape<T: Scalar, R: Rng + ?Sized>(kind: ShapeKind, rng: &mut R) -> Result<ShapeInstance<T>, GeomError> {
    sample_shape_in(kind, rng, &default_bounds())
}

pub fn sample_shape_in<T: Scalar, R: Rng + ?Sized>(
    kind: ShapeKind,
    rng: &mut R,
    bounds: &Rect<T>,
) -> Result<ShapeInstance<T>, GeomError> {
    for _ in 0..MAX_ATTEMPTS {
        let Some(framed) = construct::<T, R>(kind, rng) else {
            continue;
        };
        let angle = T::lit(rng.random_range(0.0..TAU));
        let rotated = framed.transformed(angle, Point2::new(T::zero(), T::zero()));
        let shape = rotated.transformed(T::zero(), -rotated.centroid());
        if validate_shape(&shape, bounds).accepted() {
            return Ok(shape);
        }
    }
    Err(GeomError::GenerationExhausted { kind, attempts: MAX_ATTEMPTS })
}

fn uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> T {
    T::lit(rng.random_range(lo..=hi))
}

/// Interior angle for parallelograms and rhombi: [35°, 145°] minus [85°, 95°].
fn oblique_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random_range(0.0..100.0);
    let deg = if u < 50.0 { 35.0 + u } else { 95.0 + (u - 50.0) };
    deg.to_radians()
}

fn parallelogram<T: Scalar>(a: T, b: T, angle: f64) -> [Point2<T>; 4] {
    let o = Point2::new(T::zero(), T::zero());
    let ab = Point2::new(a, T::zero());
    let ad = Point2::new(b * T::lit(angle.cos()), b * T::lit(angle.sin()));
    [o, ab, ab + ad, ad]
}

/// One construction attempt in the local frame, vertices already in CCW
/// order from the lexicographically smallest vertex.
fn construct<T: Scalar, R: Rng + ?Sized>(kind: ShapeKind, rng: &mut R) -> Option<ShapeInstance<T>> {
    let mut incircle = None;
    let raw: [Point2<T>; 4] = match kind {
        ShapeKind::Parallelogram => {
            let a = uniform(rng, SIDE_RANGE);
            let b = uniform(rng, SIDE_RANGE);
            parallelogram(a, b, oblique_angle(rng))
        }
        ShapeKind::Rectangle => {
            let a: T = uniform(rng, SIDE_RANGE);
            let b: T = uniform(rng, SIDE_RANGE);
            let z = T::zero();
            [Point2::new(z, z), Point2::new(a, z), Point2::new(a, b), Point2::new(z, b)]
        }
        ShapeKind::Rhombus => {
            let a = uniform(rng, SIDE_RANGE);
            parallelogram(a, a, oblique_angle(rng))
        }
        ShapeKind::Square => {
            let a: T = uniform(rng, SIDE_RANGE);
            let z = T::zero();
            [Point2::new(z, z), Point2::new(a, z), Point2::new(a, a), Point2::new(z, a)]
        }
        ShapeKind::Trapezoid | ShapeKind::IsoscelesTrapezoid => {
            let base_len: T = uniform(rng, super::BASE_RANGE);
            let ratio: T = T::lit(rng.random_range(super::RATIO_RANGE.0..super::RATIO_RANGE.1));
            let height: T = uniform(rng, super::HEIGHT_RANGE);
            let offset: T = if kind == ShapeKind::IsoscelesTrapezoid {
                (base_len - ratio * base_len) * T::lit(0.5)
            } else {
                uniform(rng, super::OFFSET_RANGE)
            };
            make_trapezoid(&TrapezoidParams { base_len, ratio, height, offset }).ok()?
        }
        ShapeKind::TangentialQuad => {
            let radius: T = uniform(rng, INCIRCLE_RADIUS_RANGE);
            let start: f64 = rng.random_range(0.0..TAU);
            // uniform spacings over the slack left after the minimum gaps
            let mut cuts = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let slack = TAU - 4.0 * MIN_TANGENT_GAP_DEG.to_radians();
            let fractions = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
            let gaps = fractions.map(|f| MIN_TANGENT_GAP_DEG.to_radians() + slack * f);
            if gaps.iter().any(|&g| g >= PI) {
                // adjacent tangents would not meet on the circle's side
                return None;
            }
            let mut angles = [start; 4];
            for i in 1..4 {
                angles[i] = angles[i - 1] + gaps[i - 1];
            }
            let tangents: Vec<LineEq<T>> = angles
                .iter()
                .map(|&a| LineEq::new(T::lit(a.cos()), T::lit(a.sin()), radius))
                .collect::<Option<_>>()?;
            let mut v = [Point2::new(T::zero(), T::zero()); 4];
            for i in 0..4 {
                v[i] = line_intersection(&tangents[i], &tangents[(i + 1) % 4]).ok()?;
            }
            incircle = Some(Circle { center: Point2::new(T::zero(), T::zero()), radius });
            v
        }
    };
    Some(ShapeInstance { kind, vertices: ccw_from_lexmin(raw), labels: default_labels(), incircle })
}

/// Orders four points counter-clockwise around their centroid, starting
/// from the lexicographically smallest.
pub fn ccw_from_lexmin<T: Scalar>(pts: [Point2<T>; 4]) -> [Point2<T>; 4] {
    let c = pts.iter().fold(Point2::new(T::zero(), T::zero()), |a, &p| a + p) * T::lit(0.25);
    let mut sorted = pts;
    sorted.sort_by(|p, q| {
        let ap = (p.y - c.y).atan2(p.x - c.x);
        let aq = (q.y - c.y).atan2(q.x - c.x);
        ap.partial_cmp(&aq).unwrap()
    });
    let start = (0..4)
        .reduce(|best, i| if sorted[i].lex_lt(sorted[best]) { i } else { best })
        .unwrap();
    [0, 1, 2, 3].map(|i| sorted[(start + i) % 4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{incircle_of, opposite_side_crosses, pitot_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_has_equal_sides_and_right_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s: ShapeInstance<f64> = sample_shape(ShapeKind::Square, &mut rng).unwrap();
        let l = s.side_lengths();
        for i in 0..4 {
            assert!((l[i] - l[0]).abs() < 1e-9);
            let v = &s.vertices;
            let u = v[(i + 1) % 4] - v[i];
            let w = v[(i + 3) % 4] - v[i];
            assert!(u.dot(w).abs() / (u.norm() * w.norm()) < 1e-9);
        }
    }

    #[test]
    fn trapezoid_has_exactly_one_parallel_pair() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: ShapeInstance<f64> = sample_shape(ShapeKind::Trapezoid, &mut rng).unwrap();
            let (c1, c2) = opposite_side_crosses(&s.vertices);
            let (par, other) = if c1 < c2 { (c1, c2) } else { (c2, c1) };
            assert!(par < 1e-9 && other > 1e-6, "seed {seed}: {c1} {c2}");
        }
    }

    #[test]
    fn parallelogram_diagonals_bisect() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: ShapeInstance<f64> = sample_shape(ShapeKind::Parallelogram, &mut rng).unwrap();
            let v = s.vertices;
            let m1 = v[0].midpoint(v[2]);
            let m2 = v[1].midpoint(v[3]);
            assert!(m1.distance(m2) < 1e-9);
        }
    }

    #[test]
    fn tangential_quad_is_consistent() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: ShapeInstance<f64> = sample_shape(ShapeKind::TangentialQuad, &mut rng).unwrap();
            let stored = s.incircle.unwrap();
            let c = incircle_of(&s.vertices).unwrap();
            assert!(c.center.distance(stored.center) < 1e-6);
            assert!((c.radius - stored.radius).abs() < 1e-6);
            assert!(pitot_residual(&s.vertices) < 1e-6);
        }
    }

    #[test]
    fn identical_seed_is_bit_identical() {
        for kind in ShapeKind::ALL {
            let a: ShapeInstance<f64> = sample_shape(kind, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
            let b: ShapeInstance<f64> = sample_shape(kind, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
            for (p, q) in a.vertices.iter().zip(&b.vertices) {
                assert_eq!(p.x.to_bits(), q.x.to_bits());
                assert_eq!(p.y.to_bits(), q.y.to_bits());
            }
        }
    }

    #[test]
    fn tiny_bounds_exhaust_attempts() {
        let bounds = Rect::new(Point2::from_f64(-0.1, -0.1), Point2::from_f64(0.1, 0.1));
        let r = sample_shape_in::<f64, _>(ShapeKind::Square, &mut ChaCha8Rng::seed_from_u64(1), &bounds);
        assert!(matches!(r, Err(GeomError::GenerationExhausted { attempts: MAX_ATTEMPTS, .. })));
    }

    #[test]
    fn f32_shapes_validate() {
        for kind in ShapeKind::ALL {
            let s: ShapeInstance<f32> = sample_shape(kind, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
            assert_eq!(s.kind, kind);
        }
    }

    #[test]
    fn trapezoid_construction_order_fixed() {
        let v = make_trapezoid(&TrapezoidParams { base_len: 8.0, ratio: 0.5, height: 4.0, offset: 2.0 }).unwrap();
        let o = ccw_from_lexmin(v);
        let got: Vec<(f64, f64)> = o.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(got, vec![(0.0, 0.0), (8.0, 0.0), (6.0, 4.0), (2.0, 4.0)]);
    }
}
