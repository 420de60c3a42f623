use super::{CodecError, Contour};
use crate::geom::Point2;

type P = Point2<f64>;

pub const DEFAULT_EPSILON: f64 = 1.0;

pub fn segment_distance(p: P, a: P, b: P) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Douglas–Peucker on an open chain; marks kept indices in `keep`.
fn dp_chain(pts: &[P], lo: usize, hi: usize, eps: f64, keep: &mut [bool]) {
    let mut stack = vec![(lo, hi)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (mut best, mut far) = (lo, -1.0);
        for i in lo + 1..hi {
            let d = segment_distance(pts[i], pts[lo], pts[hi]);
            if d > far {
                far = d;
                best = i;
            }
        }
        if far > eps {
            keep[best] = true;
            stack.push((lo, best));
            stack.push((best, hi));
        }
    }
}

/// Douglas–Peucker on a closed contour.
///
/// The loop is cut at two extreme points (the lexicographic minimum and
/// the point farthest from it), which are corners of the hull and so never
/// removable; each half is simplified as an open chain.
pub fn simplify(c: &Contour, eps: f64) -> Result<Contour, CodecError> {
    let n = c.points.len();
    if n < 3 {
        return Err(CodecError::DegenerateResult(n));
    }
    let start = (0..n).reduce(|b, i| if c.points[i].lex_lt(c.points[b]) { i } else { b }).unwrap();
    let pts: Vec<P> = (0..n).map(|i| c.points[(start + i) % n]).collect();
    let far = (1..n)
        .max_by(|&i, &j| pts[0].distance(pts[i]).partial_cmp(&pts[0].distance(pts[j])).unwrap())
        .unwrap();
    let mut ring = pts.clone();
    ring.push(pts[0]);
    let mut keep = vec![false; n + 1];
    keep[0] = true;
    keep[far] = true;
    dp_chain(&ring, 0, far, eps.max(0.0), &mut keep);
    dp_chain(&ring, far, n, eps.max(0.0), &mut keep);
    let points: Vec<P> = (0..n).filter(|&i| keep[i]).map(|i| pts[i]).collect();
    if points.len() < 3 {
        return Err(CodecError::DegenerateResult(points.len()));
    }
    Ok(Contour { points, hole: c.hole })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::extract_contours;
    use crate::raster::BinaryMask;

    fn contour(pts: &[(f64, f64)]) -> Contour {
        Contour { points: pts.iter().map(|&(x, y)| P::new(x, y)).collect(), hole: false }
    }

    #[test]
    fn exact_collinear_removed_at_zero() {
        let c = contour(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]);
        let s = simplify(&c, 0.0).unwrap();
        assert_eq!(s.points.len(), 4);
        assert!(!s.points.contains(&P::new(1.0, 0.0)));
    }

    #[test]
    fn digitised_circle() {
        let m = BinaryMask::from_fn(64, 64, |x, y| {
            let (dx, dy) = (x as f64 - 32.0, y as f64 - 32.0);
            dx * dx + dy * dy <= 400.0
        });
        let c = &extract_contours(&m)[0];
        let s = simplify(c, 2.0).unwrap();
        assert!(s.points.len() <= 20, "{}", s.points.len());
        // every original vertex lies within ε of the simplified loop
        let k = s.points.len();
        for p in &c.points {
            let d = (0..k).map(|i| segment_distance(*p, s.points[i], s.points[(i + 1) % k])).fold(f64::MAX, f64::min);
            assert!(d <= 2.0 + 1e-9);
        }
        // and every simplified vertex is an original vertex
        assert!(s.points.iter().all(|p| c.points.contains(p)));
    }

    #[test]
    fn huge_epsilon_is_degenerate() {
        let c = contour(&[(0.0, 0.0), (10.0, 0.0), (10.0, 1.0), (0.0, 1.0)]);
        assert!(matches!(simplify(&c, 100.0), Err(CodecError::DegenerateResult(2))));
    }

    #[test]
    fn vertex_count_non_increasing() {
        let c = contour(&[(0.0, 0.0), (3.0, 0.1), (6.0, 0.0), (6.0, 4.0), (3.0, 4.2), (0.0, 4.0)]);
        for eps in [0.0, 0.05, 0.15, 0.5] {
            assert!(simplify(&c, eps).unwrap().points.len() <= c.points.len());
        }
    }
}
