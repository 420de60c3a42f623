use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Circle, GeomError, Point2};
use crate::scalar::Scalar;

/// The quadrilateral families the generator can construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Parallelogram,
    Rectangle,
    Trapezoid,
    IsoscelesTrapezoid,
    Rhombus,
    Square,
    TangentialQuad,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 7] = [
        ShapeKind::Parallelogram,
        ShapeKind::Rectangle,
        ShapeKind::Trapezoid,
        ShapeKind::IsoscelesTrapezoid,
        ShapeKind::Rhombus,
        ShapeKind::Square,
        ShapeKind::TangentialQuad,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Parallelogram => "parallelogram",
            ShapeKind::Rectangle => "rectangle",
            ShapeKind::Trapezoid => "trapezoid",
            ShapeKind::IsoscelesTrapezoid => "isosceles_trapezoid",
            ShapeKind::Rhombus => "rhombus",
            ShapeKind::Square => "square",
            ShapeKind::TangentialQuad => "tangential_quad",
        }
    }

    /// Noun used in referring expressions.
    pub fn noun(self) -> &'static str {
        match self {
            ShapeKind::Parallelogram => "parallelogram",
            ShapeKind::Rectangle => "rectangle",
            ShapeKind::Trapezoid => "trapezoid",
            ShapeKind::IsoscelesTrapezoid => "isosceles trapezoid",
            ShapeKind::Rhombus => "rhombus",
            ShapeKind::Square => "square",
            ShapeKind::TangentialQuad => "quadrilateral",
        }
    }

    pub fn has_incircle(self) -> bool {
        self == ShapeKind::TangentialQuad
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShapeKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ShapeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| GeomError::ParamOutOfRange(format!("unknown shape kind `{s}`")))
    }
}

/// A solved quadrilateral: four counter-clockwise vertices plus labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeInstance<T> {
    pub kind: ShapeKind,
    pub vertices: [Point2<T>; 4],
    pub labels: [String; 4],
    pub incircle: Option<Circle<T>>,
}

pub fn default_labels() -> [String; 4] {
    ["A", "B", "C", "D"].map(String::from)
}

impl<T: Scalar> ShapeInstance<T> {
    pub fn side_lengths(&self) -> [T; 4] {
        let v = &self.vertices;
        [0, 1, 2, 3].map(|i| v[i].distance(v[(i + 1) % 4]))
    }

    pub fn centroid(&self) -> Point2<T> {
        let quarter = T::lit(0.25);
        let s = self.vertices.iter().fold(Point2::new(T::zero(), T::zero()), |a, &p| a + p);
        s * quarter
    }

    /// Applies a rigid motion (rotation about the origin, then translation)
    /// to vertices and incircle.
    pub fn transformed(&self, angle: T, offset: Point2<T>) -> Self {
        let map = |p: Point2<T>| p.rotated(angle) + offset;
        Self {
            kind: self.kind,
            vertices: self.vertices.map(map),
            labels: self.labels.clone(),
            incircle: self.incircle.map(|c| Circle { center: map(c.center), radius: c.radius }),
        }
    }

    pub fn to_f64(&self) -> ShapeInstance<f64> {
        ShapeInstance {
            kind: self.kind,
            vertices: self.vertices.map(Point2::to_f64),
            labels: self.labels.clone(),
            incircle: self.incircle.map(|c| Circle { center: c.center.to_f64(), radius: c.radius.as_f64() }),
        }
    }
}

/// Parameters of the trapezoid construction `A=(0,0)`, `B=(base,0)`,
/// `C=(offset,height)`, `D=(offset+ratio·base,height)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidParams<T> {
    pub base_len: T,
    pub ratio: T,
    pub height: T,
    pub offset: T,
}

pub const BASE_RANGE: (f64, f64) = (3.0, 10.0);
pub const RATIO_RANGE: (f64, f64) = (0.5, 0.95);
pub const HEIGHT_RANGE: (f64, f64) = (3.0, 10.0);
pub const OFFSET_RANGE: (f64, f64) = (-5.0, 5.0);

impl<T: Scalar> TrapezoidParams<T> {
    pub fn check(&self) -> Result<(), GeomError> {
        let within = |v: T, (lo, hi): (f64, f64)| v >= T::lit(lo) && v <= T::lit(hi);
        if !within(self.base_len, BASE_RANGE) {
            return Err(GeomError::ParamOutOfRange(format!("base length {} not in [3, 10]", self.base_len)));
        }
        // half-open: the top side must stay strictly shorter than the base
        if !(self.ratio >= T::lit(RATIO_RANGE.0) && self.ratio < T::lit(RATIO_RANGE.1)) {
            return Err(GeomError::ParamOutOfRange(format!("ratio {} not in [0.5, 0.95)", self.ratio)));
        }
        if !within(self.height, HEIGHT_RANGE) {
            return Err(GeomError::ParamOutOfRange(format!("height {} not in [3, 10]", self.height)));
        }
        if !within(self.offset, OFFSET_RANGE) {
            return Err(GeomError::ParamOutOfRange(format!("offset {} not in [-5, 5]", self.offset)));
        }
        Ok(())
    }
}

/// Places the trapezoid vertices literally as `[A, B, C, D]`.
///
/// The returned order is the construction order, not a polygon traversal:
/// `C` sits above `A`'s side. [`super::sample_shape`] reorders to CCW.
pub fn make_trapezoid<T: Scalar>(p: &TrapezoidParams<T>) -> Result<[Point2<T>; 4], GeomError> {
    p.check()?;
    let zero = T::zero();
    Ok([
        Point2::new(zero, zero),
        Point2::new(p.base_len, zero),
        Point2::new(p.offset, p.height),
        Point2::new(p.offset + p.ratio * p.base_len, p.height),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_construction() {
        let v = make_trapezoid(&TrapezoidParams { base_len: 8.0, ratio: 0.5, height: 4.0, offset: 2.0 }).unwrap();
        let got: Vec<(f64, f64)> = v.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(got, vec![(0.0, 0.0), (8.0, 0.0), (2.0, 4.0), (6.0, 4.0)]);
    }

    #[test]
    fn ratio_boundary_rejected() {
        let r = make_trapezoid(&TrapezoidParams { base_len: 1.0, ratio: 1.0, height: 1.0, offset: 0.0 });
        assert!(matches!(r, Err(GeomError::ParamOutOfRange(_))));
        let r = make_trapezoid(&TrapezoidParams { base_len: 5.0, ratio: 0.95, height: 5.0, offset: 0.0 });
        assert!(matches!(r, Err(GeomError::ParamOutOfRange(_))), "upper end is open");
    }

    #[test]
    fn top_side_length() {
        let v = make_trapezoid::<f64>(&TrapezoidParams { base_len: 10.0, ratio: 0.9, height: 3.0, offset: -5.0 }).unwrap();
        let cd = v[2].distance(v[3]);
        assert!((cd - 9.0).abs() < 1e-12);
        assert_eq!(v[2].y, v[3].y);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ShapeKind::ALL {
            assert_eq!(k.as_str().parse::<ShapeKind>().unwrap(), k);
        }
        assert_eq!(ShapeKind::ALL.len(), 7);
    }
}
