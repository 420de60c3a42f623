//! Border following on binary masks.
//!
//! The walk runs along pixel-edge cracks with the foreground on the right,
//! which makes hole detection and the 8-connectivity saddle rule explicit.
//! The emitted contour is the sequence of border pixel centres visited by
//! the walk, i.e. the same loop Moore-neighbour tracing produces. Pixel
//! `(x, y)` has its centre at `(x, y)` (y down).

use std::collections::HashMap;

use crate::geom::Point2;
use crate::raster::BinaryMask;

type P = Point2<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<P>,
    pub hole: bool,
}

impl Contour {
    /// Shoelace area in y-down coordinates: outer boundaries are positive.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.points)
    }
}

pub fn shoelace(pts: &[P]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() / 2.0
}

/// One 8-connected foreground component: its outer border and holes.
#[derive(Debug, Clone)]
pub struct Region {
    pub label: u32,
    pub outer: Contour,
    pub holes: Vec<Contour>,
}

/// 8-connected component labels, 0 for background, components numbered
/// from 1 in raster order of their first pixel.
pub fn label_components(m: &BinaryMask) -> (Vec<u32>, u32) {
    let mut labels = vec![0u32; m.bits.len()];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..m.bits.len() {
        if m.bits[start] == 0 || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % m.width) as i64, (i / m.width) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if m.get_signed(x + dx, y + dy) {
                        let j = (y + dy) as usize * m.width + (x + dx) as usize;
                        if labels[j] == 0 {
                            labels[j] = next;
                            stack.push(j);
                        }
                    }
                }
            }
        }
    }
    (labels, next)
}

type Corner = (i32, i32);

/// Directed unit edge with foreground on its right (y down), plus the pixel
/// it belongs to.
struct Edge {
    from: Corner,
    to: Corner,
    pixel: usize,
}

pub fn extract_regions(m: &BinaryMask) -> Vec<Region> {
    let (labels, n) = label_components(m);
    let mut edges = Vec::new();
    for y in 0..m.height {
        for x in 0..m.width {
            if !m.get(x, y) {
                continue;
            }
            let (xi, yi, xs, ys) = (x as i32, y as i32, x as i64, y as i64);
            let pixel = y * m.width + x;
            if !m.get_signed(xs, ys - 1) {
                edges.push(Edge { from: (xi, yi), to: (xi + 1, yi), pixel });
            }
            if !m.get_signed(xs + 1, ys) {
                edges.push(Edge { from: (xi + 1, yi), to: (xi + 1, yi + 1), pixel });
            }
            if !m.get_signed(xs, ys + 1) {
                edges.push(Edge { from: (xi + 1, yi + 1), to: (xi, yi + 1), pixel });
            }
            if !m.get_signed(xs - 1, ys) {
                edges.push(Edge { from: (xi, yi + 1), to: (xi, yi), pixel });
            }
        }
    }
    let mut out_of: HashMap<Corner, Vec<usize>> = HashMap::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        out_of.entry(e.from).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut regions: Vec<Option<Region>> = vec![None; n as usize];
    let mut holes: Vec<(u32, Contour)> = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let label = labels[edges[start].pixel];
        let mut corners = Vec::new();
        let mut pixels: Vec<usize> = Vec::new();
        let mut cur = start;
        loop {
            used[cur] = true;
            let e = &edges[cur];
            corners.push(e.from);
            if pixels.last() != Some(&e.pixel) {
                pixels.push(e.pixel);
            }
            let d = (e.to.0 - e.from.0, e.to.1 - e.from.1);
            let options = &out_of[&e.to];
            // at a saddle take the left turn, which keeps diagonal
            // foreground pixels on one border (8-connectivity)
            let next = options
                .iter()
                .copied()
                .filter(|&k| !used[k] || k == start)
                .min_by_key(|&k| {
                    let f = (edges[k].to.0 - edges[k].from.0, edges[k].to.1 - edges[k].from.1);
                    d.0 * f.1 - d.1 * f.0
                });
            match next {
                Some(k) if k == start => break,
                Some(k) => cur = k,
                None => break,
            }
        }
        while pixels.len() > 1 && pixels.first() == pixels.last() {
            pixels.pop();
        }
        let centres: Vec<P> = pixels.iter().map(|&i| P::new((i % m.width) as f64, (i / m.width) as f64)).collect();
        let contour = Contour { points: drop_collinear(&centres), hole: false };
        // the crack loop always encloses area, so its sign classifies
        // even one-pixel-wide borders
        if crack_area(&corners) > 0 {
            regions[label as usize - 1] = Some(Region { label, outer: contour, holes: vec![] });
        } else {
            holes.push((label, Contour { hole: true, ..contour }));
        }
    }
    let mut regions: Vec<Region> = regions.into_iter().flatten().collect();
    for (label, h) in holes {
        if let Some(r) = regions.iter_mut().find(|r| r.label == label) {
            r.holes.push(h);
        }
    }
    regions
}

fn crack_area(c: &[Corner]) -> i64 {
    let n = c.len();
    (0..n).map(|i| c[i].0 as i64 * c[(i + 1) % n].1 as i64 - c[(i + 1) % n].0 as i64 * c[i].1 as i64).sum()
}

/// Drops vertices that continue straight on; reversals (spur tips) stay.
/// Loops shorter than three points are padded by repetition so they remain
/// valid (degenerate) contours.
fn drop_collinear(pts: &[P]) -> Vec<P> {
    let n = pts.len();
    let mut out: Vec<P> = if n < 3 {
        pts.to_vec()
    } else {
        (0..n)
            .filter(|&i| {
                let a = pts[(i + n - 1) % n];
                let (b, c) = (pts[i], pts[(i + 1) % n]);
                let (u, v) = (b - a, c - b);
                u.cross(v) != 0.0 || u.dot(v) <= 0.0
            })
            .map(|i| pts[i])
            .collect()
    };
    while !out.is_empty() && out.len() < 3 {
        out.push(*out.last().unwrap());
    }
    out
}

/// Outer borders of every 8-connected component followed by their holes.
pub fn extract_contours(m: &BinaryMask) -> Vec<Contour> {
    extract_regions(m)
        .into_iter()
        .flat_map(|r| std::iter::once(r.outer).chain(r.holes))
        .collect()
}
