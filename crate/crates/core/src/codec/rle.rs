use serde::{Deserialize, Serialize};

use crate::raster::BinaryMask;

/// Row-major run lengths alternating background/foreground, starting with
/// background (possibly a zero-length run).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub width: usize,
    pub height: usize,
    pub runs: Vec<u32>,
}

impl RleMask {
    /// One token per run.
    pub fn token_count(&self) -> usize {
        self.runs.len()
    }
}

pub fn rle_encode(m: &BinaryMask) -> RleMask {
    let mut runs = Vec::new();
    let mut cur = 0u8;
    let mut len = 0u32;
    for &b in &m.bits {
        let b = (b != 0) as u8;
        if b != cur {
            runs.push(len);
            cur = b;
            len = 0;
        }
        len += 1;
    }
    runs.push(len);
    RleMask { width: m.width, height: m.height, runs }
}

pub fn rle_decode(r: &RleMask) -> BinaryMask {
    let mut bits = Vec::with_capacity(r.width * r.height);
    for (i, &len) in r.runs.iter().enumerate() {
        bits.extend(std::iter::repeat_n((i % 2) as u8, len as usize));
    }
    bits.resize(r.width * r.height, 0);
    BinaryMask { width: r.width, height: r.height, bits }
}
