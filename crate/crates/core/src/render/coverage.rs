//! Scanline coverage of stroked primitives, in pixel coordinates (y down).
//!
//! Every primitive is flattened into convex pieces or discs/annuli whose
//! intersection with a horizontal line is cheap to compute exactly.

use crate::geom::Point2;

type P = Point2<f64>;

#[derive(Debug, Clone)]
pub enum Piece {
    /// Convex polygon, any orientation.
    Convex(Vec<P>),
    Disc { c: P, r: f64 },
    Annulus { c: P, r_in: f64, r_out: f64 },
    /// Segment with round caps.
    Capsule { a: P, b: P, h: f64 },
}

impl Piece {
    pub fn y_range(&self) -> (f64, f64) {
        match self {
            Piece::Convex(pts) => pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y))),
            Piece::Disc { c, r } => (c.y - r, c.y + r),
            Piece::Annulus { c, r_out, .. } => (c.y - r_out, c.y + r_out),
            Piece::Capsule { a, b, h } => (a.y.min(b.y) - h, a.y.max(b.y) + h),
        }
    }

    /// Closed x-intervals covered on the line at height `y`.
    pub fn spans(&self, y: f64, out: &mut Vec<(f64, f64)>) {
        match self {
            Piece::Convex(pts) => out.extend(convex_span(pts, y)),
            Piece::Disc { c, r } => out.extend(disc_span(*c, *r, y)),
            Piece::Annulus { c, r_in, r_out } => {
                let Some((o0, o1)) = disc_span(*c, *r_out, y) else { return };
                match disc_span(*c, *r_in, y) {
                    Some((i0, i1)) => {
                        // the inner boundary itself stays covered
                        out.push((o0, i0));
                        out.push((i1, o1));
                    }
                    None => out.push((o0, o1)),
                }
            }
            Piece::Capsule { a, b, h } => out.extend(capsule_span(*a, *b, *h, y)),
        }
    }
}

fn disc_span(c: P, r: f64, y: f64) -> Option<(f64, f64)> {
    let dy = y - c.y;
    let q = r * r - dy * dy;
    (q >= 0.0).then(|| {
        let dx = q.sqrt();
        (c.x - dx, c.x + dx)
    })
}

fn convex_span(pts: &[P], y: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..pts.len() {
        let p = pts[i];
        let q = pts[(i + 1) % pts.len()];
        if (p.y <= y && y <= q.y) || (q.y <= y && y <= p.y) {
            if p.y == q.y {
                lo = lo.min(p.x.min(q.x));
                hi = hi.max(p.x.max(q.x));
            } else {
                let x = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// The capsule is convex, so the union of its rectangle and end discs meets
/// the line in a single interval spanning the extreme piece endpoints.
fn capsule_span(a: P, b: P, h: f64, y: f64) -> Option<(f64, f64)> {
    let mut acc: Option<(f64, f64)> = None;
    let mut take = |s: Option<(f64, f64)>| {
        if let Some((l, r)) = s {
            acc = Some(match acc {
                Some((l0, r0)) => (l0.min(l), r0.max(r)),
                None => (l, r),
            });
        }
    };
    take(disc_span(a, h, y));
    take(disc_span(b, h, y));
    if let Some(d) = (b - a).normalized() {
        let n = d.perp() * h;
        take(convex_span(&[a + n, b + n, b - n, a - n], y));
    }
    acc
}

/// Flattens a closed polyline stroked with half-width `h` and mitred joins.
/// Joins whose miter ratio exceeds `limit` fall back to a bevel.
pub fn stroke_closed(points: &[P], h: f64, limit: f64, out: &mut Vec<Piece>) {
    let n = points.len();
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let Some(d) = (b - a).normalized() else { continue };
        let off = d.perp() * h;
        out.push(Piece::Convex(vec![a + off, b + off, b - off, a - off]));
    }
    for i in 0..n {
        let prev = points[(i + n - 1) % n];
        let v = points[i];
        let next = points[(i + 1) % n];
        let (Some(d1), Some(d2)) = ((v - prev).normalized(), (next - v).normalized()) else { continue };
        let turn = d1.cross(d2);
        if turn.abs() < 1e-12 {
            continue;
        }
        // outer side of the turn: right normals for a left turn
        let side = if turn > 0.0 { -1.0 } else { 1.0 };
        let n1 = d1.perp() * side;
        let n2 = d2.perp() * side;
        let cos_half = ((1.0 + n1.dot(n2)) / 2.0).max(0.0).sqrt();
        let p1 = v + n1 * h;
        let p2 = v + n2 * h;
        if cos_half > 0.0 && 1.0 / cos_half <= limit {
            let bis = (n1 + n2).normalized().unwrap_or(n1);
            let tip = v + bis * (h / cos_half);
            out.push(Piece::Convex(vec![v, p1, tip, p2]));
        } else {
            out.push(Piece::Convex(vec![v, p1, p2]));
        }
    }
}

/// Sorts and merges integer index ranges in place.
pub fn merge_ranges(r: &mut Vec<(i64, i64)>) {
    if r.len() < 2 {
        return;
    }
    r.sort_unstable();
    let mut w = 0;
    for i in 1..r.len() {
        if r[i].0 <= r[w].1 + 1 {
            r[w].1 = r[w].1.max(r[i].1);
        } else {
            w += 1;
            r[w] = r[i];
        }
    }
    r.truncate(w + 1);
}
