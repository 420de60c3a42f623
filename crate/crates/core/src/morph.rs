//! Binary morphology with Euclidean disks, topology-preserving thinning and
//! elastic warps.
//!
//! Pixels outside the frame are background for every operator, so erosion
//! eats into foreground that touches the border.

use rand::Rng;
use thiserror::Error;

use crate::raster::{BinaryMask, RasterImage};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaskError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
}

/// Half-widths of the disk of radius `r`: `w[dy] = max dx with dx² + dy² ≤ r²`.
pub fn disk_half_widths(r: usize) -> Vec<usize> {
    let r2 = r * r;
    (0..=r)
        .map(|dy| {
            let mut w = 0;
            while (w + 1) * (w + 1) + dy * dy <= r2 {
                w += 1;
            }
            w
        })
        .collect()
}

/// Foreground runs `[x0, x1]` of row `y`.
fn row_runs(m: &BinaryMask, y: usize, out: &mut Vec<(usize, usize)>) {
    out.clear();
    let row = &m.bits[y * m.width..(y + 1) * m.width];
    let mut x = 0;
    while x < row.len() {
        if row[x] != 0 {
            let s = x;
            while x < row.len() && row[x] != 0 {
                x += 1;
            }
            out.push((s, x - 1));
        } else {
            x += 1;
        }
    }
}

pub fn dilate(m: &BinaryMask, r: usize) -> BinaryMask {
    if r == 0 {
        return m.clone();
    }
    let w = disk_half_widths(r);
    let (wd, ht) = (m.width, m.height);
    let mut out = BinaryMask::new(wd, ht);
    let mut runs = Vec::new();
    for y in 0..ht {
        row_runs(m, y, &mut runs);
        if runs.is_empty() {
            continue;
        }
        for dy in -(r as i64)..=r as i64 {
            let yo = y as i64 + dy;
            if yo < 0 || yo >= ht as i64 {
                continue;
            }
            let hw = w[dy.unsigned_abs() as usize];
            let dst = &mut out.bits[yo as usize * wd..(yo as usize + 1) * wd];
            for &(x0, x1) in &runs {
                let lo = x0.saturating_sub(hw);
                let hi = (x1 + hw).min(wd - 1);
                dst[lo..=hi].fill(1);
            }
        }
    }
    out
}

/// Pixel survives iff the whole disk around it lies inside the frame and in
/// the foreground.
pub fn erode(m: &BinaryMask, r: usize) -> BinaryMask {
    if r == 0 {
        return m.clone();
    }
    // dilate the complement on a frame padded with complement-foreground
    let (w, h) = (m.width, m.height);
    let (pw, ph) = (w + 2 * r, h + 2 * r);
    let padded = BinaryMask::from_fn(pw, ph, |x, y| {
        let inside = x >= r && y >= r && x < w + r && y < h + r;
        !inside || !m.get(x - r, y - r)
    });
    let d = dilate(&padded, r);
    BinaryMask::from_fn(w, h, |x, y| !d.get(x + r, y + r))
}

pub fn close(m: &BinaryMask, r: usize) -> BinaryMask {
    erode(&dilate(m, r), r)
}

pub fn open(m: &BinaryMask, r: usize) -> BinaryMask {
    dilate(&erode(m, r), r)
}

/// Neighbours P2..P9 clockwise from north.
fn neighbours(m: &BinaryMask, x: usize, y: usize) -> [bool; 8] {
    let (x, y) = (x as i64, y as i64);
    [
        m.get_signed(x, y - 1),
        m.get_signed(x + 1, y - 1),
        m.get_signed(x + 1, y),
        m.get_signed(x + 1, y + 1),
        m.get_signed(x, y + 1),
        m.get_signed(x - 1, y + 1),
        m.get_signed(x - 1, y),
        m.get_signed(x - 1, y - 1),
    ]
}

/// Yokoi connectivity number for 8-connected foreground. A pixel whose
/// removal keeps topology has value 1.
fn connectivity8(n: &[bool; 8]) -> u32 {
    let c = |i: usize| !n[i % 8] as u32;
    [0, 2, 4, 6].iter().map(|&k| c(k) - c(k) * c(k + 1) * c(k + 2)).sum()
}

fn transitions(n: &[bool; 8]) -> usize {
    (0..8).filter(|&i| !n[i] && n[(i + 1) % 8]).count()
}

/// Skeletonises to 1-px width.
///
/// Candidates come from the two Zhang–Suen sub-iterations; each is then
/// deleted in raster order only while it is still a simple, non-end point,
/// so topology and component count are preserved.
pub fn thin(m: &BinaryMask) -> BinaryMask {
    let mut cur = m.clone();
    let mut candidates = Vec::new();
    loop {
        let mut changed = false;
        for sub in 0..2 {
            candidates.clear();
            for y in 0..cur.height {
                for x in 0..cur.width {
                    if !cur.get(x, y) {
                        continue;
                    }
                    let n = neighbours(&cur, x, y);
                    let b = n.iter().filter(|&&v| v).count();
                    if !(2..=6).contains(&b) || transitions(&n) != 1 {
                        continue;
                    }
                    let [p2, _, p4, _, p6, _, p8, _] = n;
                    let ok = if sub == 0 {
                        !(p2 && p4 && p6) && !(p4 && p6 && p8)
                    } else {
                        !(p2 && p4 && p8) && !(p2 && p6 && p8)
                    };
                    if ok {
                        candidates.push((x, y));
                    }
                }
            }
            for &(x, y) in &candidates {
                let n = neighbours(&cur, x, y);
                let b = n.iter().filter(|&&v| v).count();
                if b >= 2 && connectivity8(&n) == 1 {
                    cur.set(x, y, false);
                    changed = true;
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// Per-pixel displacement field, in pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticField {
    pub width: usize,
    pub height: usize,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

pub const DEFAULT_ALPHA: f64 = 2.0;
pub const DEFAULT_SIGMA: f64 = 8.0;

impl ElasticField {
    pub fn zero(width: usize, height: usize) -> Self {
        Self::constant(width, height, 0.0, 0.0)
    }

    pub fn constant(width: usize, height: usize, dx: f64, dy: f64) -> Self {
        Self { width, height, dx: vec![dx; width * height], dy: vec![dy; width * height] }
    }

    /// Uniform noise smoothed by a Gaussian of width `sigma`, rescaled so the
    /// longest displacement is exactly `alpha`.
    pub fn random<R: Rng + ?Sized>(width: usize, height: usize, alpha: f64, sigma: f64, rng: &mut R) -> Self {
        let n = width * height;
        let mut dx: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut dy: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        gaussian_blur(&mut dx, width, height, sigma);
        gaussian_blur(&mut dy, width, height, sigma);
        let peak = dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max);
        if peak > 0.0 {
            let k = alpha / peak;
            dx.iter_mut().chain(dy.iter_mut()).for_each(|v| *v *= k);
        }
        Self { width, height, dx, dy }
    }

    pub fn max_displacement(&self) -> f64 {
        self.dx.iter().zip(&self.dy).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }
}

fn gaussian_blur(v: &mut [f64], w: usize, h: usize, sigma: f64) {
    if sigma <= 0.0 || w == 0 || h == 0 {
        return;
    }
    let rad = (3.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = (-rad..=rad).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = kernel.iter().sum();
    let mut tmp = vec![0.0; v.len()];
    let clamp = |i: i64, n: usize| i.clamp(0, n as i64 - 1) as usize;
    for y in 0..h {
        for x in 0..w {
            let s: f64 = kernel.iter().enumerate().map(|(k, c)| c * v[y * w + clamp(x as i64 + k as i64 - rad, w)]).sum();
            tmp[y * w + x] = s / norm;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let s: f64 = kernel.iter().enumerate().map(|(k, c)| c * tmp[clamp(y as i64 + k as i64 - rad, h) * w + x]).sum();
            v[y * w + x] = s / norm;
        }
    }
}

/// Warps the image (bilinear, edge-clamped) and masks (nearest, outside is
/// background) with the same field. Output pixel `p` samples the input at
/// `p − d(p)`, so a constant positive `dx` moves content right.
pub fn elastic_deform(img: &RasterImage, masks: &[BinaryMask], field: &ElasticField) -> Result<(RasterImage, Vec<BinaryMask>), MaskError> {
    let dims = (img.width, img.height);
    for got in std::iter::once((field.width, field.height)).chain(masks.iter().map(|m| (m.width, m.height))) {
        if got != dims {
            return Err(MaskError::DimensionMismatch { expected: dims, got });
        }
    }
    let (w, h) = dims;
    let mut out = img.clone();
    let mut out_masks: Vec<BinaryMask> = masks.iter().map(|m| BinaryMask::new(m.width, m.height)).collect();
    let cx = |v: i64| v.clamp(0, w as i64 - 1) as usize;
    let cy = |v: i64| v.clamp(0, h as i64 - 1) as usize;
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let sx = x as f64 - field.dx[i];
            let sy = y as f64 - field.dy[i];
            let (fx, fy) = (sx.floor(), sy.floor());
            let (tx, ty) = (sx - fx, sy - fy);
            let (x0, y0) = (fx as i64, fy as i64);
            let mut px = [0u8; 3];
            for (c, slot) in px.iter_mut().enumerate() {
                let g = |xx: i64, yy: i64| img.get(cx(xx), cy(yy))[c] as f64;
                let top = g(x0, y0) * (1.0 - tx) + g(x0 + 1, y0) * tx;
                let bot = g(x0, y0 + 1) * (1.0 - tx) + g(x0 + 1, y0 + 1) * tx;
                *slot = (top * (1.0 - ty) + bot * ty).round().clamp(0.0, 255.0) as u8;
            }
            out.set(x, y, px);
            let (nx, ny) = (sx.round() as i64, sy.round() as i64);
            for (m, o) in masks.iter().zip(out_masks.iter_mut()) {
                o.bits[i] = m.get_signed(nx, ny) as u8;
            }
        }
    }
    Ok((out, out_masks))
}
