use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Contour;
use crate::geom::Point2;

pub const QUANT_MAX: u32 = 255;
pub const SEG_OPEN: &str = "<seg>";
pub const SEG_CLOSE: &str = "</seg>";

/// Polygon with vertex coordinates on the `[0, 255]²` token lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizedPolygon {
    pub vertices: Vec<(u8, u8)>,
}

impl QuantizedPolygon {
    pub fn new(vertices: Vec<(u8, u8)>) -> Self {
        Self { vertices }
    }

    /// Coordinate tokens plus the two delimiters.
    pub fn token_count(&self) -> usize {
        2 * self.vertices.len() + 2
    }
}

pub fn token_count(polys: &[QuantizedPolygon]) -> usize {
    polys.iter().map(QuantizedPolygon::token_count).sum()
}

#[inline]
pub fn quantize_coord(v: f64, extent_px: usize) -> u8 {
    let span = extent_px.saturating_sub(1).max(1) as f64;
    // round half up
    (v * QUANT_MAX as f64 / span + 0.5).floor().clamp(0.0, QUANT_MAX as f64) as u8
}

#[inline]
pub fn dequantize_coord(q: u8, extent_px: usize) -> f64 {
    q as f64 * extent_px.saturating_sub(1).max(1) as f64 / QUANT_MAX as f64
}

/// Maps pixel coordinates onto the lattice, merging consecutive vertices
/// that land on the same lattice point.
pub fn quantize(c: &Contour, width: usize, height: usize) -> QuantizedPolygon {
    let mut v: Vec<(u8, u8)> = Vec::with_capacity(c.points.len());
    for p in &c.points {
        let q = (quantize_coord(p.x, width), quantize_coord(p.y, height));
        if v.last() != Some(&q) {
            v.push(q);
        }
    }
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    QuantizedPolygon { vertices: v }
}

pub fn dequantize(q: &QuantizedPolygon, width: usize, height: usize) -> Contour {
    Contour {
        points: q
            .vertices
            .iter()
            .map(|&(x, y)| Point2::new(dequantize_coord(x, width), dequantize_coord(y, height)))
            .collect(),
        hole: false,
    }
}

pub fn encode_tokens(polys: &[QuantizedPolygon]) -> String {
    let mut s = String::new();
    for (i, p) in polys.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(SEG_OPEN);
        for (k, (x, y)) in p.vertices.iter().enumerate() {
            let sep = if k + 1 < p.vertices.len() { "," } else { "" };
            write!(s, " {x},{y}{sep}").unwrap();
        }
        s.push(' ');
        s.push_str(SEG_CLOSE);
    }
    s
}

/// Distinct ways a token sequence can be malformed. Positions are byte
/// offsets into the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalformedSequence {
    #[error("unbalanced delimiter at byte {pos}")]
    Unbalanced { pos: usize },
    #[error("odd coordinate count {count} in block {block}")]
    OddCount { block: usize, count: usize },
    #[error("coordinate `{token}` outside [0, 255]")]
    OutOfRange { token: String },
    #[error("non-integer token `{token}`")]
    NonInteger { token: String },
    #[error("block {block} has {count} vertices, need at least 3")]
    TooFewVertices { block: usize, count: usize },
}

pub fn decode_tokens(text: &str) -> Result<Vec<QuantizedPolygon>, MalformedSequence> {
    let mut polys = Vec::new();
    let mut rest = text;
    let mut offset = 0;
    loop {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        rest = trimmed;
        if rest.is_empty() {
            return Ok(polys);
        }
        if !rest.starts_with(SEG_OPEN) {
            return Err(MalformedSequence::Unbalanced { pos: offset });
        }
        let body_start = SEG_OPEN.len();
        let close = rest.find(SEG_CLOSE).ok_or(MalformedSequence::Unbalanced { pos: offset })?;
        let body = &rest[body_start..close];
        if let Some(nested) = body.find(SEG_OPEN) {
            return Err(MalformedSequence::Unbalanced { pos: offset + body_start + nested });
        }
        polys.push(parse_block(body, polys.len())?);
        offset += close + SEG_CLOSE.len();
        rest = &rest[close + SEG_CLOSE.len()..];
    }
}

fn parse_block(body: &str, block: usize) -> Result<QuantizedPolygon, MalformedSequence> {
    let mut coords = Vec::new();
    for tok in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if tok.contains('<') || tok.contains('>') {
            return Err(MalformedSequence::NonInteger { token: tok.to_string() });
        }
        let v: i64 = match tok.parse() {
            Ok(v) => v,
            Err(_) if tok.bytes().all(|b| b.is_ascii_digit()) || tok.strip_prefix('-').is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())) => {
                // digits only but too long for i64
                return Err(MalformedSequence::OutOfRange { token: tok.to_string() });
            }
            Err(_) => return Err(MalformedSequence::NonInteger { token: tok.to_string() }),
        };
        if !(0..=QUANT_MAX as i64).contains(&v) {
            return Err(MalformedSequence::OutOfRange { token: tok.to_string() });
        }
        coords.push(v as u8);
    }
    if coords.len() % 2 == 1 {
        return Err(MalformedSequence::OddCount { block, count: coords.len() });
    }
    let vertices: Vec<(u8, u8)> = coords.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    if vertices.len() < 3 {
        return Err(MalformedSequence::TooFewVertices { block, count: vertices.len() });
    }
    Ok(QuantizedPolygon { vertices })
}
