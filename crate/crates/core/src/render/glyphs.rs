//! Embedded single-stroke font on a 4×6 grid (x right, y up), A–Z and 0–9.
//!
//! Each glyph is a list of polylines separated by `|`; a point is two digits.

const GLYPHS: [(char, &str); 36] = [
    ('A', "002640|1333"),
    ('B', "00063645443330|3342413000"),
    ('C', "4536160501103041"),
    ('D', "00062644422000"),
    ('E', "46060040|0333"),
    ('F', "460600|0333"),
    ('G', "45361605011030414323"),
    ('H', "0006|4046|0343"),
    ('I', "1636|2620|1030"),
    ('J', "4641301001"),
    ('K', "0006|4602|1340"),
    ('L', "060040"),
    ('M', "0006234640"),
    ('N', "00064046"),
    ('O', "100105163645413010"),
    ('P', "00063645443330"),
    ('Q', "100105163645413010|2240"),
    ('R', "00063645443330|2340"),
    ('S', "453616050413334241301001"),
    ('T', "0646|2620"),
    ('U', "060110304146"),
    ('V', "062046"),
    ('W', "0610243046"),
    ('X', "0046|0640"),
    ('Y', "062346|2320"),
    ('Z', "06460040"),
    ('0', "100105163645413010|0145"),
    ('1', "152620|1030"),
    ('2', "05163645440040"),
    ('3', "0516364544334241301001|1333"),
    ('4', "30360242"),
    ('5', "4606033342413000"),
    ('6', "4536160501103041423303"),
    ('7', "064610"),
    ('8', "13040516364544331302011030414233"),
    ('9', "0110304145361605041343"),
];

pub const GRID_W: f64 = 4.0;
pub const GRID_H: f64 = 6.0;

/// Polylines of `c` in grid units. Lowercase maps to uppercase; characters
/// without a glyph render as an open box.
pub fn glyph(c: char) -> Vec<Vec<(f64, f64)>> {
    let c = c.to_ascii_uppercase();
    let strokes = GLYPHS.iter().find(|(g, _)| *g == c).map(|(_, s)| *s).unwrap_or("0040464600");
    strokes.split('|')
        .map(|poly| {
            poly.as_bytes()
                .chunks_exact(2)
                .map(|p| ((p[0] - b'0') as f64, (p[1] - b'0') as f64))
                .collect()
        })
        .collect()
}
