//! Mask ⇄ `<seg>` polygon token codec and the RLE baseline.

mod contour;
mod rasterize;
mod refine;
mod rle;
mod simplify;
mod tokens;

pub use contour::{extract_contours, extract_regions, label_components, shoelace, Contour, Region};
pub use rasterize::{fill_into, find_self_crossing, is_degenerate, rasterize_contours, rasterize_polygons, row_spans, segments_cross};
pub use refine::{refine_polygon, RefineTarget};
pub use rle::{rle_decode, rle_encode, RleMask};
pub use simplify::{segment_distance, simplify, DEFAULT_EPSILON};
pub use tokens::{
    decode_tokens, dequantize, dequantize_coord, encode_tokens, quantize, quantize_coord, token_count, MalformedSequence,
    QuantizedPolygon, QUANT_MAX, SEG_CLOSE, SEG_OPEN,
};

use thiserror::Error;

use crate::geom::Point2;
use crate::raster::BinaryMask;

type P = Point2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("simplification left {0} vertices")]
    DegenerateResult(usize),
    #[error(transparent)]
    Malformed(#[from] MalformedSequence),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeOptions {
    pub epsilon: f64,
    /// Lattice search radius for vertex refinement; 0 disables it.
    pub refine_radius: u8,
    pub refine_passes: usize,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, refine_radius: 2, refine_passes: 6 }
    }
}

impl EncodeOptions {
    pub fn plain() -> Self {
        Self { refine_radius: 0, ..Self::default() }
    }
}

/// Splices each hole into the outer loop through a zero-width slit at the
/// closest vertex pair, so a single even–odd fill reproduces the ring.
pub fn bridge_holes(outer: &[P], holes: &[Vec<P>]) -> Vec<P> {
    let mut merged = outer.to_vec();
    for hole in holes {
        if hole.is_empty() {
            continue;
        }
        let mut best = (0, 0, f64::INFINITY);
        for (i, p) in merged.iter().enumerate() {
            for (j, q) in hole.iter().enumerate() {
                let d = p.distance(*q);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        let (i, j, _) = best;
        let mut next = Vec::with_capacity(merged.len() + hole.len() + 2);
        next.extend_from_slice(&merged[..=i]);
        next.extend_from_slice(&hole[j..]);
        next.extend_from_slice(&hole[..=j]);
        next.extend_from_slice(&merged[i..]);
        merged = next;
    }
    merged
}

fn simplified_or_original(c: &Contour, eps: f64) -> Vec<P> {
    simplify(c, eps).map(|s| s.points).unwrap_or_else(|_| c.points.clone())
}

/// Mask to lattice polygons: one polygon per 8-connected component, holes
/// bridged in, simplified, quantized and (optionally) refined on the
/// lattice against the component's pixels.
pub fn encode_mask(m: &BinaryMask, opts: &EncodeOptions) -> Vec<QuantizedPolygon> {
    let (labels, _) = label_components(m);
    let mut out = Vec::new();
    for region in extract_regions(m) {
        let outer = simplified_or_original(&region.outer, opts.epsilon);
        let holes: Vec<Vec<P>> = region.holes.iter().map(|h| simplified_or_original(h, opts.epsilon)).collect();
        let merged = bridge_holes(&outer, &holes);
        let mut q = quantize(&Contour { points: merged, hole: false }, m.width, m.height);
        if opts.refine_radius > 0 {
            let target = RefineTarget { labels: &labels, label: region.label, width: m.width, height: m.height };
            refine_polygon(&mut q, &target, opts.refine_radius, opts.refine_passes);
        }
        while q.vertices.len() < 3 {
            // tiny component collapsed onto one lattice edge; keep it decodable
            let last = *q.vertices.last().unwrap();
            q.vertices.push(last);
        }
        out.push(q);
    }
    out
}

pub fn encode_mask_tokens(m: &BinaryMask, opts: &EncodeOptions) -> String {
    encode_tokens(&encode_mask(m, opts))
}

pub fn decode_mask_tokens(text: &str, width: usize, height: usize) -> Result<BinaryMask, MalformedSequence> {
    Ok(rasterize_polygons(&decode_tokens(text)?, width, height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::iou;

    fn ring(w: usize) -> BinaryMask {
        BinaryMask::from_fn(w, w, |x, y| {
            let (dx, dy) = (x as f64 - w as f64 / 2.0, y as f64 - w as f64 / 2.0);
            let r2 = dx * dx + dy * dy;
            r2 <= (w as f64 * 0.4).powi(2) && r2 >= (w as f64 * 0.25).powi(2)
        })
    }

    #[test]
    fn ring_round_trip_keeps_hole() {
        let m = ring(120);
        let polys = encode_mask(&m, &EncodeOptions::plain());
        assert_eq!(polys.len(), 1);
        let back = rasterize_polygons(&polys, 120, 120);
        assert!(!back.get(60, 60), "hole filled");
        assert!(iou(&m, &back).unwrap() > 0.85);
    }

    #[test]
    fn refinement_never_hurts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (w, h) = (rng.random_range(300..900), rng.random_range(300..900));
            let (x0, y0) = (rng.random_range(20.0..100.0), rng.random_range(20.0..100.0));
            let (x1, y1) = (w as f64 - rng.random_range(20.0..100.0), h as f64 - rng.random_range(20.0..100.0));
            let m = BinaryMask::from_fn(w, h, |x, y| {
                segment_distance(P::new(x as f64, y as f64), P::new(x0, y0), P::new(x1, y1)) <= 4.0
            });
            let plain = rasterize_polygons(&encode_mask(&m, &EncodeOptions::plain()), w, h);
            let refined = rasterize_polygons(&encode_mask(&m, &EncodeOptions::default()), w, h);
            let (a, b) = (iou(&m, &plain).unwrap(), iou(&m, &refined).unwrap());
            assert!(b >= a, "{a} -> {b}");
        }
    }

    #[test]
    fn bridge_splices_hole() {
        let outer = vec![P::new(0.0, 0.0), P::new(10.0, 0.0), P::new(10.0, 10.0), P::new(0.0, 10.0)];
        let hole = vec![P::new(3.0, 3.0), P::new(3.0, 7.0), P::new(7.0, 7.0), P::new(7.0, 3.0)];
        let merged = bridge_holes(&outer, &[hole]);
        assert_eq!(merged.len(), 10);
        assert_eq!(shoelace(&merged), 100.0 - 16.0);
    }

    #[test]
    fn blob_round_trip_iou() {
        let m = BinaryMask::from_fn(64, 64, |x, y| {
            let (dx, dy) = (x as f64 - 30.0, y as f64 - 34.0);
            dx * dx / 400.0 + dy * dy / 150.0 <= 1.0
        });
        let back = decode_mask_tokens(&encode_mask_tokens(&m, &EncodeOptions::plain()), 64, 64).unwrap();
        assert!(iou(&m, &back).unwrap() >= 0.85);
    }
}
