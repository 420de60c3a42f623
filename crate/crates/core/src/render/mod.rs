//! Deterministic supersampled rasterizer and dual-pass mask extraction.

mod coverage;
pub mod glyphs;
mod tikz;

pub use coverage::{merge_ranges, stroke_closed, Piece};
pub use tikz::{emit_tikz, emit_tikz_highlight};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point2;
use crate::raster::{BinaryMask, RasterImage};
use crate::scene::{dot_radius, label_box, ElementId, Primitive, Scene, Target, LABEL_ADVANCE, LABEL_CAP_HEIGHT, LABEL_STROKE_WIDTH, MITER_LIMIT};

type P = Point2<f64>;

pub const CM_PER_INCH: f64 = 2.54;
pub const DEFAULT_TAU: f64 = 50.0;
pub const DEFAULT_MAX_DIM: usize = 4096;
pub const MIN_DIM: usize = 32;
pub const DPI_RANGE: (u32, u32) = (72, 600);

pub const BLACK: [u8; 3] = [0, 0, 0];
pub const WHITE: [u8; 3] = [255, 255, 255];
pub const RED: [u8; 3] = [255, 0, 0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("canvas of {width}x{height} px exceeds the {cap} px cap")]
    CanvasOverflow { width: usize, height: usize, cap: usize },
    #[error("canvas of {width}x{height} px is below the {MIN_DIM} px minimum")]
    CanvasTooSmall { width: usize, height: usize },
    #[error("invalid style: {0}")]
    InvalidStyle(String),
    #[error("target `{0}` not in scene")]
    UnknownTarget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub dpi: u32,
    pub supersample: u32,
    pub ink: [u8; 3],
    pub background: [u8; 3],
    pub highlight: [u8; 3],
    pub max_dim: usize,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self::at_dpi(150)
    }
}

impl RenderStyle {
    pub fn at_dpi(dpi: u32) -> Self {
        Self { dpi, supersample: 4, ink: BLACK, background: WHITE, highlight: RED, max_dim: DEFAULT_MAX_DIM }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if !(DPI_RANGE.0..=DPI_RANGE.1).contains(&self.dpi) {
            return Err(RenderError::InvalidStyle(format!("dpi {} outside [72, 600]", self.dpi)));
        }
        if !(1..=16).contains(&self.supersample) {
            return Err(RenderError::InvalidStyle(format!("supersample {} outside [1, 16]", self.supersample)));
        }
        Ok(())
    }

    pub fn px_per_unit(&self) -> f64 {
        self.dpi as f64 / CM_PER_INCH
    }
}

/// Pixel dimensions of `scene` at `style`.
pub fn canvas_dims(scene: &Scene, style: &RenderStyle) -> Result<(usize, usize), RenderError> {
    style.validate()?;
    let s = style.px_per_unit();
    let width = (scene.canvas.width() * s).round() as usize;
    let height = (scene.canvas.height() * s).round() as usize;
    if width > style.max_dim || height > style.max_dim {
        return Err(RenderError::CanvasOverflow { width, height, cap: style.max_dim });
    }
    if width < MIN_DIM || height < MIN_DIM {
        return Err(RenderError::CanvasTooSmall { width, height });
    }
    Ok((width, height))
}

struct Frame {
    x0: f64,
    y1: f64,
    s: f64,
}

impl Frame {
    fn new(scene: &Scene, style: &RenderStyle) -> Self {
        Self { x0: scene.canvas.min.x, y1: scene.canvas.max.y, s: style.px_per_unit() }
    }

    fn map(&self, p: P) -> P {
        P::new((p.x - self.x0) * self.s, (self.y1 - p.y) * self.s)
    }
}

/// Pixel-space pieces for one primitive.
fn flatten(prim: &Primitive, stroke_width: f64, f: &Frame, out: &mut Vec<Piece>) {
    let h = stroke_width / 2.0 * f.s;
    match prim {
        Primitive::Segment { a, b } => out.push(Piece::Capsule { a: f.map(*a), b: f.map(*b), h }),
        Primitive::Circle { center, radius } => {
            let r = radius * f.s;
            out.push(Piece::Annulus { c: f.map(*center), r_in: (r - h).max(0.0), r_out: r + h })
        }
        Primitive::Dot { p } => out.push(Piece::Disc { c: f.map(*p), r: dot_radius(stroke_width) * f.s }),
        Primitive::PolygonOutline { points } => {
            let pts: Vec<P> = points.iter().map(|p| f.map(*p)).collect();
            stroke_closed(&pts, h, MITER_LIMIT, out);
        }
        Primitive::TextLabel { anchor, text, placement } => {
            let bx = label_box(*anchor, text, *placement, stroke_width);
            let unit = LABEL_CAP_HEIGHT / glyphs::GRID_H;
            let gh = LABEL_STROKE_WIDTH / 2.0 * f.s;
            for (i, c) in text.chars().enumerate() {
                let ox = bx.min.x + i as f64 * LABEL_ADVANCE;
                for poly in glyphs::glyph(c) {
                    let pts: Vec<P> = poly.iter().map(|&(gx, gy)| f.map(P::new(ox + gx * unit, bx.min.y + gy * unit))).collect();
                    for w in pts.windows(2) {
                        out.push(Piece::Capsule { a: w[0], b: w[1], h: gh });
                    }
                }
            }
        }
    }
}

struct Layer {
    pieces: Vec<Piece>,
    ys: Vec<(f64, f64)>,
}

impl Layer {
    fn new(pieces: Vec<Piece>) -> Self {
        let ys = pieces.iter().map(Piece::y_range).collect();
        Self { pieces, ys }
    }

    /// Covered subsample column ranges on the subsample row centred at `y`.
    fn ranges(&self, y: f64, ss: f64, max_col: i64, spans: &mut Vec<(f64, f64)>, out: &mut Vec<(i64, i64)>) {
        out.clear();
        spans.clear();
        for (pc, &(lo, hi)) in self.pieces.iter().zip(&self.ys) {
            if lo <= y && y <= hi {
                pc.spans(y, spans);
            }
        }
        for &(l, r) in spans.iter() {
            // subsample k has centre (k + 0.5) / ss
            let k0 = ((l * ss - 0.5).ceil() as i64).max(0);
            let k1 = ((r * ss - 0.5).floor() as i64).min(max_col);
            if k0 <= k1 {
                out.push((k0, k1));
            }
        }
        merge_ranges(out);
    }
}

/// Per-pixel subsample counts for one pixel row.
struct RowCounts {
    ink: Vec<u16>,
    red: Vec<u16>,
}

/// Shared scanline driver. `others` are drawn in ink, `target` (if any) on
/// top in the highlight colour. Calls `emit(row, counts)` once per pixel row.
fn scan(scene: &Scene, style: &RenderStyle, target: Option<&ElementId>, mut emit: impl FnMut(usize, &RowCounts)) -> Result<(usize, usize), RenderError> {
    let (w, h) = canvas_dims(scene, style)?;
    let f = Frame::new(scene, style);
    let mut others = vec![];
    let mut tgt = vec![];
    for e in &scene.elements {
        let dst = if Some(&e.id) == target { &mut tgt } else { &mut others };
        flatten(&e.primitive, scene.stroke_width, &f, dst);
    }
    let others = Layer::new(others);
    let tgt = Layer::new(tgt);
    let ss = style.supersample as i64;
    let ssf = ss as f64;
    let max_col = w as i64 * ss - 1;
    let mut counts = RowCounts { ink: vec![0; w], red: vec![0; w] };
    let (mut spans, mut ro, mut rt, mut all) = (vec![], vec![], vec![], vec![]);
    for row in 0..h {
        counts.ink.fill(0);
        counts.red.fill(0);
        for sub in 0..ss {
            let y = row as f64 + (sub as f64 + 0.5) / ssf;
            others.ranges(y, ssf, max_col, &mut spans, &mut ro);
            tgt.ranges(y, ssf, max_col, &mut spans, &mut rt);
            all.clear();
            all.extend_from_slice(&ro);
            all.extend_from_slice(&rt);
            merge_ranges(&mut all);
            for &(k0, k1) in &all {
                for k in k0..=k1 {
                    counts.ink[(k / ss) as usize] += 1;
                }
            }
            for &(k0, k1) in &rt {
                for k in k0..=k1 {
                    counts.red[(k / ss) as usize] += 1;
                }
            }
        }
        emit(row, &counts);
    }
    Ok((w, h))
}

/// Box-filtered colour for a pixel with `red` highlight, `black` ink and
/// `white` background subsamples out of `n`.
#[inline]
fn mix(style: &RenderStyle, n: u32, ink: u16, red: u16) -> [u8; 3] {
    let red = red as u32;
    let black = ink as u32 - red;
    let white = n - ink as u32;
    let ch = |i: usize| {
        ((style.background[i] as u32 * white + style.ink[i] as u32 * black + style.highlight[i] as u32 * red + n / 2) / n) as u8
    };
    [ch(0), ch(1), ch(2)]
}

fn render_with(scene: &Scene, style: &RenderStyle, target: Option<&ElementId>) -> Result<RasterImage, RenderError> {
    let (w, h) = canvas_dims(scene, style)?;
    let mut img = RasterImage::filled(w, h, style.background);
    let n = style.supersample * style.supersample;
    scan(scene, style, target, |row, c| {
        for x in 0..w {
            if c.ink[x] > 0 {
                img.set(x, row, mix(style, n, c.ink[x], c.red[x]));
            }
        }
    })?;
    Ok(img)
}

/// Main pass: every element in ink on the background.
pub fn render_scene(scene: &Scene, style: &RenderStyle) -> Result<RasterImage, RenderError> {
    render_with(scene, style, None)
}

/// Mask pass image: identical geometry, the target drawn last in the
/// highlight colour.
pub fn render_highlight(scene: &Scene, target: &Target, style: &RenderStyle) -> Result<RasterImage, RenderError> {
    if !scene.contains(&target.element_id) {
        return Err(RenderError::UnknownTarget(target.element_id.to_string()));
    }
    render_with(scene, style, Some(&target.element_id))
}

/// Per-pixel channel arithmetic `R − G/2 − B/2 > τ`.
#[inline]
pub fn channel_value([r, g, b]: [u8; 3]) -> f64 {
    r as f64 - g as f64 / 2.0 - b as f64 / 2.0
}

pub fn channel_mask(img: &RasterImage, tau: f64) -> BinaryMask {
    let bits = img.pixels.chunks_exact(3).map(|c| (channel_value([c[0], c[1], c[2]]) > tau) as u8).collect();
    BinaryMask { width: img.width, height: img.height, bits }
}

/// Ground-truth mask of `target`. Equivalent to thresholding
/// [`render_highlight`], without materialising the colour image.
pub fn render_mask(scene: &Scene, target: &Target, style: &RenderStyle, tau: f64) -> Result<BinaryMask, RenderError> {
    if !scene.contains(&target.element_id) {
        return Err(RenderError::UnknownTarget(target.element_id.to_string()));
    }
    let (w, h) = canvas_dims(scene, style)?;
    let mut mask = BinaryMask::new(w, h);
    let n = style.supersample * style.supersample;
    let bg_on = channel_value(style.background) > tau;
    if bg_on {
        mask.bits.fill(1);
    }
    scan(scene, style, Some(&target.element_id), |row, c| {
        for x in 0..w {
            if c.ink[x] > 0 {
                let on = channel_value(mix(style, n, c.ink[x], c.red[x])) > tau;
                mask.bits[row * w + x] = on as u8;
            }
        }
    })?;
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{default_labels, sample_shape, ShapeInstance, ShapeKind};
    use crate::scene::{build_scene, enumerate_targets, SceneOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_square_scene() -> Scene {
        let shape = ShapeInstance {
            kind: ShapeKind::Square,
            vertices: [P::new(0.0, 0.0), P::new(1.0, 0.0), P::new(1.0, 1.0), P::new(0.0, 1.0)],
            labels: default_labels(),
            incircle: None,
        };
        build_scene(&shape, &SceneOptions::default())
    }

    fn ink_count(img: &RasterImage) -> usize {
        img.pixels.chunks_exact(3).filter(|c| c != &WHITE).count()
    }

    #[test]
    fn channel_arithmetic_table() {
        let img = RasterImage { width: 4, height: 1, pixels: vec![255, 0, 0, 0, 0, 0, 255, 255, 255, 200, 80, 80] };
        let m = channel_mask(&img, DEFAULT_TAU);
        assert_eq!(m.bits, vec![1, 0, 0, 1]);
        assert_eq!(channel_value([200, 80, 80]), 120.0);
    }

    #[test]
    fn empty_scene_is_white() {
        let mut s = unit_square_scene();
        s.elements.clear();
        let img = render_scene(&s, &RenderStyle::at_dpi(100)).unwrap();
        assert!(img.pixels.iter().all(|&v| v == 255));
    }

    #[test]
    fn dims_double_with_dpi() {
        let s = unit_square_scene();
        let (w1, h1) = canvas_dims(&s, &RenderStyle::at_dpi(100)).unwrap();
        let (w2, h2) = canvas_dims(&s, &RenderStyle::at_dpi(200)).unwrap();
        assert_eq!((w2, h2), (2 * w1, 2 * h1));
    }

    #[test]
    fn ink_scales_with_square_of_dpi() {
        let s = unit_square_scene();
        let a = ink_count(&render_scene(&s, &RenderStyle::at_dpi(150)).unwrap());
        let b = ink_count(&render_scene(&s, &RenderStyle::at_dpi(300)).unwrap());
        let ratio = b as f64 / a as f64;
        assert!((3.6..=4.4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn overflow_and_style_errors() {
        let s = unit_square_scene();
        let mut st = RenderStyle::at_dpi(600);
        st.max_dim = 100;
        assert!(matches!(render_scene(&s, &st), Err(RenderError::CanvasOverflow { .. })));
        assert!(matches!(render_scene(&s, &RenderStyle::at_dpi(50)), Err(RenderError::InvalidStyle(_))));
    }

    #[test]
    fn mask_path_equals_threshold_of_highlight_render() {
        for seed in 0..6 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape: ShapeInstance<f64> = sample_shape(ShapeKind::ALL[seed as usize % 7], &mut rng).unwrap();
            let scene = build_scene(&shape, &SceneOptions { draw_diagonals: seed % 2 == 1, ..Default::default() });
            let style = RenderStyle::at_dpi(96);
            for t in enumerate_targets(&scene) {
                let slow = channel_mask(&render_highlight(&scene, &t, &style).unwrap(), DEFAULT_TAU);
                let fast = render_mask(&scene, &t, &style, DEFAULT_TAU).unwrap();
                assert_eq!(slow, fast, "{}", t.element_id);
                assert!(fast.count() > 0);
            }
        }
    }

    #[test]
    fn passes_share_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shape: ShapeInstance<f64> = sample_shape(ShapeKind::TangentialQuad, &mut rng).unwrap();
        let scene = build_scene(&shape, &SceneOptions::default());
        let style = RenderStyle::at_dpi(120);
        let main = render_scene(&scene, &style).unwrap();
        for t in enumerate_targets(&scene) {
            let hl = render_highlight(&scene, &t, &style).unwrap();
            for (a, b) in main.pixels.chunks_exact(3).zip(hl.pixels.chunks_exact(3)) {
                assert_eq!(a == WHITE, b == WHITE);
                // green and blue record only the background share
                assert_eq!(a[1], b[1]);
                assert_eq!(b[1], b[2]);
            }
        }
    }

    #[test]
    fn all_black_scene_masks_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let shape: ShapeInstance<f64> = sample_shape(ShapeKind::Rhombus, &mut rng).unwrap();
        let scene = build_scene(&shape, &SceneOptions::default());
        let img = render_scene(&scene, &RenderStyle::at_dpi(100)).unwrap();
        for tau in [0.0, 10.0, 50.0, 200.0] {
            assert!(channel_mask(&img, tau).is_empty());
        }
    }

    #[test]
    fn render_is_deterministic() {
        let s = unit_square_scene();
        let st = RenderStyle::at_dpi(137);
        assert_eq!(render_scene(&s, &st).unwrap(), render_scene(&s, &st).unwrap());
    }

    #[test]
    fn stroke_is_thin_at_working_dpi() {
        // a horizontal side at 300 dpi covers about 0.04 cm ≈ 4.7 px,
        // at 72 dpi about 1.1 px
        let s = unit_square_scene();
        let t = enumerate_targets(&s).into_iter().next().unwrap();
        for (dpi, lo, hi) in [(72, 1, 3), (300, 4, 6)] {
            let m = render_mask(&s, &t, &RenderStyle::at_dpi(dpi), DEFAULT_TAU).unwrap();
            let col = m.width / 2;
            let thick = (0..m.height).filter(|&y| m.get(col, y)).count();
            assert!((lo..=hi).contains(&thick), "dpi {dpi}: {thick}");
        }
    }
}
