//! Closed even–odd scanline fill on pixel centres.

use super::{dequantize, shoelace, QuantizedPolygon};
use crate::geom::Point2;
use crate::raster::BinaryMask;

type P = Point2<f64>;

const ON_EDGE_EPS: f64 = 1e-9;

/// Inclusive pixel-column ranges whose centres lie in the closed even–odd
/// fill of `poly` on row `y`. Unclipped; may be negative.
pub fn row_spans(poly: &[P], y: f64, out: &mut Vec<(i64, i64)>) {
    out.clear();
    let n = poly.len();
    let mut xs: Vec<f64> = Vec::new();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
            xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for pair in xs.chunks_exact(2) {
        let lo = (pair[0] - ON_EDGE_EPS).ceil() as i64;
        let hi = (pair[1] + ON_EDGE_EPS).floor() as i64;
        if lo <= hi {
            out.push((lo, hi));
        }
    }
    // centres exactly on the boundary belong to the closed fill
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (ylo, yhi) = (a.y.min(b.y), a.y.max(b.y));
        if y < ylo - ON_EDGE_EPS || y > yhi + ON_EDGE_EPS {
            continue;
        }
        if (a.y - b.y).abs() <= ON_EDGE_EPS {
            let lo = (a.x.min(b.x) - ON_EDGE_EPS).ceil() as i64;
            let hi = (a.x.max(b.x) + ON_EDGE_EPS).floor() as i64;
            if lo <= hi {
                out.push((lo, hi));
            }
        } else {
            let x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x - x.round()).abs() <= ON_EDGE_EPS {
                out.push((x.round() as i64, x.round() as i64));
            }
        }
    }
    crate::render::merge_ranges(out);
}

/// Whether the polygon encloses no area (fewer than three distinct
/// vertices or all collinear).
pub fn is_degenerate(poly: &[P]) -> bool {
    let mut distinct: Vec<P> = Vec::new();
    for p in poly {
        if !distinct.contains(p) {
            distinct.push(*p);
        }
    }
    distinct.len() < 3 || shoelace(poly).abs() < 1e-12 && all_collinear(&distinct)
}

fn all_collinear(pts: &[P]) -> bool {
    let (a, b) = (pts[0], pts[1]);
    pts.iter().all(|&p| (b - a).cross(p - a).abs() < 1e-9)
}

/// 1-px polyline through the closed loop, sampled at unit steps.
fn stroke_into(poly: &[P], m: &mut BinaryMask) {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let steps = (b.x - a.x).abs().max((b.y - a.y).abs()).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let p = a + (b - a) * t;
            let (x, y) = (p.x.round() as i64, p.y.round() as i64);
            if x >= 0 && y >= 0 && (x as usize) < m.width && (y as usize) < m.height {
                m.set(x as usize, y as usize, true);
            }
        }
    }
}

/// Fills one pixel-space polygon into `m` (union).
pub fn fill_into(poly: &[P], m: &mut BinaryMask) {
    if poly.is_empty() {
        return;
    }
    if is_degenerate(poly) {
        stroke_into(poly, m);
        return;
    }
    let ymin = poly.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let ymax = poly.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let r0 = ((ymin - ON_EDGE_EPS).ceil().max(0.0)) as usize;
    let r1 = (ymax + ON_EDGE_EPS).floor().min(m.height as f64 - 1.0);
    if r1 < 0.0 {
        return;
    }
    let mut spans = Vec::new();
    for y in r0..=r1 as usize {
        row_spans(poly, y as f64, &mut spans);
        for &(lo, hi) in &spans {
            let lo = lo.max(0);
            let hi = hi.min(m.width as i64 - 1);
            if lo <= hi {
                m.bits[y * m.width + lo as usize..=y * m.width + hi as usize].fill(1);
            }
        }
    }
}

pub fn rasterize_contours(polys: &[Vec<P>], width: usize, height: usize) -> BinaryMask {
    let mut m = BinaryMask::new(width, height);
    for p in polys {
        fill_into(p, &mut m);
    }
    m
}

/// Union of the closed even–odd fills of the dequantized polygons.
pub fn rasterize_polygons(polys: &[QuantizedPolygon], width: usize, height: usize) -> BinaryMask {
    let mut m = BinaryMask::new(width, height);
    for q in polys {
        fill_into(&dequantize(q, width, height).points, &mut m);
    }
    m
}

fn orient(a: P, b: P, c: P) -> f64 {
    (b - a).cross(c - a)
}

/// Strict crossing of segments `ab` and `cd` (interiors cross at one point).
pub fn segments_cross(a: P, b: P, c: P, d: P) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// First pair of non-adjacent edges that properly cross, if any.
pub fn find_self_crossing(poly: &[P]) -> Option<(usize, usize)> {
    let n = poly.len();
    if n < 4 {
        return None;
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}
