//! IoU and buffered IoU on rasters and on lattice polygons.

mod report;

pub use report::{evaluate, evaluate_batch, prediction_id, read_predictions, Aggregate, EvalError, EvalReport, EvalRow, Prediction, RowStatus};

use thiserror::Error;

use crate::codec::{dequantize, find_self_crossing, is_degenerate, row_spans, QuantizedPolygon};
use crate::morph::dilate;
use crate::raster::BinaryMask;
use crate::render::{merge_ranges, Piece};

pub const DEFAULT_BETA: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("polygon {index} self-intersects (edges {edges:?})")]
    InvalidPolygon { index: usize, edges: (usize, usize) },
    #[error("buffer radius {0} must be a finite non-negative number")]
    BadBeta(f64),
}

fn check_dims(a: &BinaryMask, b: &BinaryMask) -> Result<(), MetricError> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(MetricError::DimensionMismatch((a.width, a.height), (b.width, b.height)));
    }
    Ok(())
}

/// `|a ∩ b| / |a ∪ b|`, with two empty masks scoring 1.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64, MetricError> {
    check_dims(a, b)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.bits.iter().zip(&b.bits) {
        let (x, y) = (x != 0, y != 0);
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// Integer disk radius covering every lattice offset within Euclidean
/// distance `beta`.
fn disk_radius(beta: f64) -> usize {
    beta.floor() as usize
}

/// IoU after dilating both masks by a disk of radius `beta`.
pub fn biou_pixel(a: &BinaryMask, b: &BinaryMask, beta: f64) -> Result<f64, MetricError> {
    check_dims(a, b)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(MetricError::BadBeta(beta));
    }
    let r = disk_radius(beta);
    if r == 0 {
        return iou(a, b);
    }
    iou(&dilate(a, r), &dilate(b, r))
}

/// Pixels whose centres lie in the closed fill of any polygon or within
/// `beta` of any of its edges.
pub fn buffer_polygons(polys: &[QuantizedPolygon], beta: f64, width: usize, height: usize) -> Result<BinaryMask, MetricError> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(MetricError::BadBeta(beta));
    }
    let mut m = BinaryMask::new(width, height);
    let (mut spans, mut fspans, mut ranges) = (Vec::new(), Vec::new(), Vec::new());
    for (index, q) in polys.iter().enumerate() {
        let pts = dequantize(q, width, height).points;
        if pts.is_empty() {
            continue;
        }
        if let Some(edges) = find_self_crossing(&pts) {
            return Err(MetricError::InvalidPolygon { index, edges });
        }
        let degenerate = is_degenerate(&pts);
        let n = pts.len();
        let caps: Vec<Piece> = (0..n).map(|i| Piece::Capsule { a: pts[i], b: pts[(i + 1) % n], h: beta }).collect();
        let ymin = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - beta;
        let ymax = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max) + beta;
        let r0 = ymin.ceil().max(0.0) as usize;
        let r1 = ymax.floor().min(height as f64 - 1.0);
        if r1 < 0.0 {
            continue;
        }
        for y in r0..=r1 as usize {
            let yf = y as f64;
            ranges.clear();
            if !degenerate {
                row_spans(&pts, yf, &mut fspans);
                ranges.extend_from_slice(&fspans);
            }
            spans.clear();
            for c in &caps {
                c.spans(yf, &mut spans);
            }
            ranges.extend(spans.iter().map(|&(l, r)| (l.ceil() as i64, r.floor() as i64)).filter(|(l, r)| l <= r));
            merge_ranges(&mut ranges);
            for &(lo, hi) in &ranges {
                let (lo, hi) = (lo.max(0), hi.min(width as i64 - 1));
                if lo <= hi {
                    m.bits[y * width + lo as usize..=y * width + hi as usize].fill(1);
                }
            }
        }
    }
    Ok(m)
}

/// Buffered IoU computed from the polygons directly: each polygon is
/// offset outward by `beta` with round joins before rasterizing.
pub fn biou_polygon(
    pa: &[QuantizedPolygon],
    pb: &[QuantizedPolygon],
    beta: f64,
    width: usize,
    height: usize,
) -> Result<f64, MetricError> {
    let a = buffer_polygons(pa, beta, width, height)?;
    let b = buffer_polygons(pb, beta, width, height)?;
    iou(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::rasterize_polygons;
    use proptest::prelude::*;

    fn line(w: usize, h: usize, row: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| y == row && (4..w - 4).contains(&x))
    }

    #[test]
    fn iou_basics() {
        let a = BinaryMask::from_fn(30, 30, |x, y| (5..15).contains(&x) && (5..15).contains(&y));
        let b = BinaryMask::from_fn(30, 30, |x, y| (10..20).contains(&x) && (5..15).contains(&y));
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        assert!((iou(&a, &b).unwrap() - 50.0 / 150.0).abs() < 1e-15);
        let far = BinaryMask::from_fn(30, 30, |x, y| x > 25 && y > 25);
        assert_eq!(iou(&a, &far).unwrap(), 0.0);
        let e = BinaryMask::new(30, 30);
        assert_eq!(iou(&e, &e).unwrap(), 1.0);
        assert_eq!(iou(&e, &a).unwrap(), 0.0);
        assert!(iou(&e, &BinaryMask::new(3, 3)).is_err());
    }

    #[test]
    fn shifted_thin_line() {
        let a = line(64, 16, 7);
        let b = line(64, 16, 8);
        assert_eq!(iou(&a, &b).unwrap(), 0.0);
        // two 7-row bands offset by one row: about 6/8 before the caps
        let v = biou_pixel(&a, &b, 3.0).unwrap();
        assert!((0.7..0.8).contains(&v), "{v}");
    }

    #[test]
    fn zero_beta_is_iou() {
        let a = line(32, 8, 3);
        let b = line(32, 8, 2);
        assert_eq!(biou_pixel(&a, &b, 0.0).unwrap().to_bits(), iou(&a, &b).unwrap().to_bits());
    }

    #[test]
    fn polygon_identity_and_empty() {
        let sq = QuantizedPolygon::new(vec![(40, 40), (120, 40), (120, 120), (40, 120)]);
        assert_eq!(biou_polygon(std::slice::from_ref(&sq), std::slice::from_ref(&sq), 3.0, 100, 100).unwrap(), 1.0);
        assert_eq!(biou_polygon(&[], &[], 3.0, 100, 100).unwrap(), 1.0);
    }

    #[test]
    fn polygon_path_tracks_pixel_path() {
        let (w, h) = (256, 256);
        let a = QuantizedPolygon::new(vec![(40, 40), (120, 40), (120, 120), (40, 120)]);
        let b = QuantizedPolygon::new(vec![(41, 40), (121, 40), (121, 120), (41, 120)]);
        let poly = biou_polygon(std::slice::from_ref(&a), std::slice::from_ref(&b), 3.0, w, h).unwrap();
        let pix = biou_pixel(&rasterize_polygons(&[a], w, h), &rasterize_polygons(&[b], w, h), 3.0).unwrap();
        assert!((poly - pix).abs() <= 0.02, "{poly} vs {pix}");
    }

    #[test]
    fn self_intersection_reported() {
        let bow = QuantizedPolygon::new(vec![(0, 0), (100, 100), (100, 0), (0, 100)]);
        assert!(matches!(biou_polygon(&[bow], &[], 3.0, 64, 64), Err(MetricError::InvalidPolygon { index: 0, .. })));
    }

    fn mask_pair() -> impl Strategy<Value = (BinaryMask, BinaryMask)> {
        (prop::collection::vec(prop::bool::weighted(0.1), 24 * 24), prop::collection::vec(prop::bool::weighted(0.1), 24 * 24)).prop_map(
            |(a, b)| {
                let mk = |v: Vec<bool>| BinaryMask { width: 24, height: 24, bits: v.into_iter().map(u8::from).collect() };
                (mk(a), mk(b))
            },
        )
    }

    proptest! {
        #[test]
        fn bounded_symmetric_monotone((a, b) in mask_pair()) {
            let mut last = -1.0;
            for beta in [0.0, 1.0, 2.0, 3.0, 5.0] {
                let v = biou_pixel(&a, &b, beta).unwrap();
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert_eq!(v, biou_pixel(&b, &a, beta).unwrap());
                prop_assert!(v >= last);
                last = v;
            }
            prop_assert_eq!(iou(&a, &b).unwrap(), iou(&b, &a).unwrap());
        }
    }
}
