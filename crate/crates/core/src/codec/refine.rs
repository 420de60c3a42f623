//! Greedy lattice refinement of quantized vertices.
//!
//! Rounding each vertex independently can cost several pixels of boundary
//! error per axis on large images. Each vertex is instead moved, one at a
//! time, to the lattice point in a small neighbourhood that minimises the
//! pixel XOR between the rasterized polygon and its source component. The
//! neighbourhood stays centred on the vertex's rounded position, so repeated
//! passes cannot walk a vertex away from the contour.

use super::{dequantize_coord, find_self_crossing, is_degenerate, row_spans, segments_cross, QuantizedPolygon};
use crate::geom::Point2;
use crate::render::Piece;

type P = Point2<f64>;

/// Pixels of one labelled component.
pub struct RefineTarget<'a> {
    pub labels: &'a [u32],
    pub label: u32,
    pub width: usize,
    pub height: usize,
}

impl RefineTarget<'_> {
    fn get(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.labels[y as usize * self.width + x as usize] == self.label
    }
}

fn to_px(q: (u8, u8), t: &RefineTarget) -> P {
    P::new(dequantize_coord(q.0, t.width), dequantize_coord(q.1, t.height))
}

fn in_spans(spans: &[(i64, i64)], x: i64) -> bool {
    spans.iter().any(|&(a, b)| a <= x && x <= b)
}

/// Change in XOR pixel count when vertex `i` of `old` moves to `new_p`.
/// Only pixels in the two triangles swept by the move can change.
fn move_delta(old: &[P], i: usize, new_p: P, t: &RefineTarget) -> i64 {
    let n = old.len();
    let prev = old[(i + n - 1) % n];
    let next = old[(i + 1) % n];
    let cur = old[i];
    let mut moved = old.to_vec();
    moved[i] = new_p;
    let tris = [Piece::Convex(vec![prev, cur, new_p]), Piece::Convex(vec![cur, new_p, next])];
    let ymin = [prev.y, cur.y, new_p.y, next.y].into_iter().fold(f64::INFINITY, f64::min);
    let ymax = [prev.y, cur.y, new_p.y, next.y].into_iter().fold(f64::NEG_INFINITY, f64::max);
    let r0 = (ymin.floor() as i64).max(0);
    let r1 = (ymax.ceil() as i64).min(t.height as i64 - 1);
    let (mut so, mut sn, mut ext) = (Vec::new(), Vec::new(), Vec::new());
    let mut delta = 0i64;
    for y in r0..=r1 {
        let yf = y as f64;
        ext.clear();
        for tri in &tris {
            tri.spans(yf, &mut ext);
        }
        if ext.is_empty() {
            continue;
        }
        let lo = ext.iter().map(|s| s.0).fold(f64::INFINITY, f64::min).floor() as i64 - 1;
        let hi = ext.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
        row_spans(old, yf, &mut so);
        row_spans(&moved, yf, &mut sn);
        for x in lo.max(0)..=hi.min(t.width as i64 - 1) {
            let a = in_spans(&so, x);
            let b = in_spans(&sn, x);
            if a != b {
                let tgt = t.get(x, y);
                delta += (b != tgt) as i64 - (a != tgt) as i64;
            }
        }
    }
    delta
}

/// Whether the two edges incident to vertex `i` cross any other edge.
fn creates_crossing(pts: &[P], i: usize) -> bool {
    let n = pts.len();
    let edges = [((i + n - 1) % n, i), (i, (i + 1) % n)];
    for &(a, b) in &edges {
        for j in 0..n {
            let (c, d) = (j, (j + 1) % n);
            if c == a || c == b || d == a || d == b {
                continue;
            }
            if segments_cross(pts[a], pts[b], pts[c], pts[d]) {
                return true;
            }
        }
    }
    false
}

pub fn refine_polygon(q: &mut QuantizedPolygon, t: &RefineTarget, radius: u8, passes: usize) {
    let n = q.vertices.len();
    if n < 3 {
        return;
    }
    let mut pts: Vec<P> = q.vertices.iter().map(|&v| to_px(v, t)).collect();
    if is_degenerate(&pts) {
        return;
    }
    let had_crossing = find_self_crossing(&pts).is_some();
    let origin = q.vertices.clone();
    let r = radius as i32;
    for _ in 0..passes {
        let mut improved = false;
        for i in 0..n {
            let (ox, oy) = origin[i];
            let mut best: Option<((u8, u8), i64)> = None;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (nx, ny) = (ox as i32 + dx, oy as i32 + dy);
                    if !(0..=255).contains(&nx) || !(0..=255).contains(&ny) || (nx as u8, ny as u8) == q.vertices[i] {
                        continue;
                    }
                    let cand = (nx as u8, ny as u8);
                    let p = to_px(cand, t);
                    let d = move_delta(&pts, i, p, t);
                    if d < 0 && best.is_none_or(|(_, bd)| d < bd) {
                        let old = pts[i];
                        pts[i] = p;
                        let ok = !is_degenerate(&pts) && (had_crossing || !creates_crossing(&pts, i));
                        pts[i] = old;
                        if ok {
                            best = Some((cand, d));
                        }
                    }
                }
            }
            if let Some((cand, _)) = best {
                q.vertices[i] = cand;
                pts[i] = to_px(cand, t);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{label_components, rasterize_polygons};
    use crate::raster::BinaryMask;

    fn xor(a: &BinaryMask, b: &BinaryMask) -> usize {
        a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn delta_matches_full_recount() {
        let (w, h) = (500, 400);
        let m = BinaryMask::from_fn(w, h, |x, y| {
            let v = (x as f64 - 100.0) * 0.3 - (y as f64 - 80.0);
            v.abs() < 5.0 && (90..420).contains(&x)
        });
        let (labels, _) = label_components(&m);
        let t = RefineTarget { labels: &labels, label: 1, width: w, height: h };
        let q = QuantizedPolygon::new(vec![(45, 52), (214, 137), (213, 142), (46, 60)]);
        let pts: Vec<P> = q.vertices.iter().map(|&v| to_px(v, &t)).collect();
        let base = xor(&rasterize_polygons(std::slice::from_ref(&q), w, h), &m) as i64;
        for (i, cand) in [(0, (44, 53)), (1, (216, 139)), (3, (47, 58)), (2, (210, 146))] {
            let mut moved = q.clone();
            moved.vertices[i] = cand;
            let full = xor(&rasterize_polygons(&[moved], w, h), &m) as i64;
            assert_eq!(move_delta(&pts, i, to_px(cand, &t), &t), full - base, "vertex {i}");
        }
    }

    #[test]
    fn refinement_reduces_error() {
        let (w, h) = (800, 600);
        let m = BinaryMask::from_fn(w, h, |x, y| {
            let v = (x as f64 - 100.0) * 0.41 - (y as f64 - 100.0);
            v.abs() < 4.5 && (100..700).contains(&x)
        });
        let (labels, _) = label_components(&m);
        let t = RefineTarget { labels: &labels, label: 1, width: w, height: h };
        let mut q = QuantizedPolygon::new(vec![(32, 39), (223, 122), (223, 130), (32, 47)]);
        let before = xor(&rasterize_polygons(std::slice::from_ref(&q), w, h), &m);
        refine_polygon(&mut q, &t, 2, 6);
        let after = xor(&rasterize_polygons(&[q], w, h), &m);
        assert!(after < before, "{before} -> {after}");
    }
}
