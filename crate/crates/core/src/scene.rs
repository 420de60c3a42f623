//! Drawable scene assembled from a solved shape, with referable targets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geom::{Point2, Rect, ShapeInstance, ShapeKind};
use crate::scalar::Scalar;

type P = Point2<f64>;

/// Stroke width in world units, roughly TikZ `thick`.
pub const DEFAULT_STROKE_WIDTH: f64 = 0.04;
/// Minimum distance between any element geometry and the canvas edge.
pub const SCENE_MARGIN: f64 = 0.5;
/// The canvas is snapped outward to whole inches so pixel dimensions scale
/// exactly with DPI.
pub const CANVAS_QUANTUM: f64 = 2.54;

/// Cap height of label glyphs in world units (about a 12 pt font).
pub const LABEL_CAP_HEIGHT: f64 = 0.3;
pub const LABEL_GLYPH_WIDTH: f64 = LABEL_CAP_HEIGHT * 4.0 / 6.0;
pub const LABEL_ADVANCE: f64 = LABEL_CAP_HEIGHT;
/// Distance between a vertex and the near edge of its label box.
pub const LABEL_GAP: f64 = 0.12;
pub const LABEL_STROKE_WIDTH: f64 = 0.03;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("malformed element id `{0}`")]
    BadElementId(String),
    #[error("element `{0}` not in scene")]
    UnknownElement(String),
    #[error("invalid scene: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Side,
    Vertex,
    Diagonal,
    Polygon,
    Incircle,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Side => "side",
            ElementKind::Vertex => "vertex",
            ElementKind::Diagonal => "diagonal",
            ElementKind::Polygon => "polygon",
            ElementKind::Incircle => "incircle",
        }
    }
}

/// Stable identifier of a scene element: `kind:labels`, e.g. `side:AB`.
/// The incircle carries no labels and prints as `incircle`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId {
    pub kind: ElementKind,
    pub labels: String,
}

impl ElementId {
    pub fn new(kind: ElementKind, labels: impl Into<String>) -> Self {
        Self { kind, labels: labels.into() }
    }

    pub fn side(a: &str, b: &str) -> Self {
        Self::new(ElementKind::Side, format!("{a}{b}"))
    }

    pub fn incircle() -> Self {
        Self::new(ElementKind::Incircle, "")
    }

    /// Vertex labels named by the id, in order.
    pub fn label_chars(&self) -> Vec<String> {
        self.labels.chars().map(String::from).collect()
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.is_empty() {
            f.write_str(self.kind.as_str())
        } else {
            write!(f, "{}:{}", self.kind.as_str(), self.labels)
        }
    }
}

impl FromStr for ElementId {
    type Err = SceneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SceneError::BadElementId(s.to_string());
        if s == "incircle" {
            return Ok(Self::incircle());
        }
        let (kind, labels) = s.split_once(':').ok_or_else(bad)?;
        let kind = match kind {
            "side" => ElementKind::Side,
            "vertex" => ElementKind::Vertex,
            "diagonal" => ElementKind::Diagonal,
            "polygon" => ElementKind::Polygon,
            _ => return Err(bad()),
        };
        if labels.is_empty() || !labels.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(bad());
        }
        Ok(Self::new(kind, labels))
    }
}

impl Serialize for ElementId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Above,
    Below,
    Left,
    Right,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Above => "above",
            Placement::Below => "below",
            Placement::Left => "left",
            Placement::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Primitive {
    Segment { a: P, b: P },
    Circle { center: P, radius: f64 },
    Dot { p: P },
    TextLabel { anchor: P, text: String, placement: Placement },
    PolygonOutline { points: [P; 4] },
}

impl Primitive {
    /// World-space extent including stroke.
    pub fn extent(&self, stroke_width: f64) -> Rect<f64> {
        let hw = stroke_width / 2.0;
        match self {
            Primitive::Segment { a, b } => Rect::bounding([*a, *b]).unwrap().expanded(hw),
            Primitive::Circle { center, radius } => Rect::new(*center, *center).expanded(radius + hw),
            Primitive::Dot { p } => Rect::new(*p, *p).expanded(dot_radius(stroke_width)),
            Primitive::TextLabel { anchor, text, placement } => {
                label_box(*anchor, text, *placement, stroke_width).expanded(LABEL_STROKE_WIDTH / 2.0)
            }
            Primitive::PolygonOutline { points } => {
                // miter tips can poke out by up to the miter limit times the half width
                Rect::bounding(points.iter().copied()).unwrap().expanded(hw * MITER_LIMIT)
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Primitive::Segment { a, b } => a.is_finite() && b.is_finite(),
            Primitive::Circle { center, radius } => center.is_finite() && radius.is_finite() && *radius > 0.0,
            Primitive::Dot { p } => p.is_finite(),
            Primitive::TextLabel { anchor, .. } => anchor.is_finite(),
            Primitive::PolygonOutline { points } => points.iter().all(|p| p.is_finite()),
        }
    }
}

pub const MITER_LIMIT: f64 = 4.0;

pub fn dot_radius(stroke_width: f64) -> f64 {
    stroke_width * 1.5
}

/// Box occupied by a label's glyphs (without glyph stroke).
pub fn label_box(anchor: P, text: &str, placement: Placement, stroke_width: f64) -> Rect<f64> {
    let n = text.chars().count().max(1) as f64;
    let w = n * LABEL_GLYPH_WIDTH + (n - 1.0) * (LABEL_ADVANCE - LABEL_GLYPH_WIDTH);
    let h = LABEL_CAP_HEIGHT;
    let g = LABEL_GAP + stroke_width / 2.0;
    let (cx, cy) = match placement {
        Placement::Above => (anchor.x, anchor.y + g + h / 2.0),
        Placement::Below => (anchor.x, anchor.y - g - h / 2.0),
        Placement::Right => (anchor.x + g + w / 2.0, anchor.y),
        Placement::Left => (anchor.x - g - w / 2.0, anchor.y),
    };
    Rect::new(P::new(cx - w / 2.0, cy - h / 2.0), P::new(cx + w / 2.0, cy + h / 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneElement {
    pub id: ElementId,
    pub primitive: Primitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub elements: Vec<SceneElement>,
    pub canvas: Rect<f64>,
    pub stroke_width: f64,
    pub kind: ShapeKind,
    pub labels: [String; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneOptions {
    pub draw_diagonals: bool,
    pub stroke_width: f64,
}

impl Default for SceneOptions {
    fn default() -> Self {
        Self { draw_diagonals: false, stroke_width: DEFAULT_STROKE_WIDTH }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Side,
    Polygon,
    Incircle,
    Diagonal,
}

impl TargetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetKind::Side => "side",
            TargetKind::Polygon => "polygon",
            TargetKind::Incircle => "incircle",
            TargetKind::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Target {
    pub element_id: ElementId,
    pub target_kind: TargetKind,
}

impl Target {
    pub fn from_id(id: ElementId) -> Option<Self> {
        let target_kind = match id.kind {
            ElementKind::Side => TargetKind::Side,
            ElementKind::Polygon => TargetKind::Polygon,
            ElementKind::Incircle => TargetKind::Incircle,
            ElementKind::Diagonal => TargetKind::Diagonal,
            ElementKind::Vertex => return None,
        };
        Some(Self { element_id: id, target_kind })
    }
}

fn label_placement(vertex: P, centroid: P) -> Placement {
    let d = vertex - centroid;
    if d.x.abs() > d.y.abs() {
        if d.x > 0.0 {
            Placement::Right
        } else {
            Placement::Left
        }
    } else if d.y >= 0.0 {
        Placement::Above
    } else {
        Placement::Below
    }
}

/// Snaps `[lo, hi]` outward to a whole number of `CANVAS_QUANTUM`s, centered.
fn snap_span(lo: f64, hi: f64) -> (f64, f64) {
    let n = ((hi - lo) / CANVAS_QUANTUM).ceil().max(1.0);
    let c = (lo + hi) / 2.0;
    let half = n * CANVAS_QUANTUM / 2.0;
    (c - half, c + half)
}

pub fn build_scene<T: Scalar>(shape: &ShapeInstance<T>, options: &SceneOptions) -> Scene {
    let shape = shape.to_f64();
    let v = shape.vertices;
    let l = &shape.labels;
    let centroid = shape.centroid();
    let mut elements = vec![SceneElement {
        id: ElementId::new(ElementKind::Polygon, l.concat()),
        primitive: Primitive::PolygonOutline { points: v },
    }];
    for i in 0..4 {
        let j = (i + 1) % 4;
        elements.push(SceneElement {
            id: ElementId::side(&l[i], &l[j]),
            primitive: Primitive::Segment { a: v[i], b: v[j] },
        });
    }
    if options.draw_diagonals {
        for (i, j) in [(0, 2), (1, 3)] {
            elements.push(SceneElement {
                id: ElementId::new(ElementKind::Diagonal, format!("{}{}", l[i], l[j])),
                primitive: Primitive::Segment { a: v[i], b: v[j] },
            });
        }
    }
    if let Some(c) = shape.incircle {
        elements.push(SceneElement {
            id: ElementId::incircle(),
            primitive: Primitive::Circle { center: c.center, radius: c.radius },
        });
    }
    for i in 0..4 {
        elements.push(SceneElement {
            id: ElementId::new(ElementKind::Vertex, l[i].clone()),
            primitive: Primitive::TextLabel {
                anchor: v[i],
                text: l[i].clone(),
                placement: label_placement(v[i], centroid),
            },
        });
    }
    let extent = elements
        .iter()
        .map(|e| e.primitive.extent(options.stroke_width))
        .reduce(|a, b| a.union(&b))
        .unwrap()
        .expanded(SCENE_MARGIN);
    let (x0, x1) = snap_span(extent.min.x, extent.max.x);
    let (y0, y1) = snap_span(extent.min.y, extent.max.y);
    Scene {
        elements,
        canvas: Rect::new(P::new(x0, y0), P::new(x1, y1)),
        stroke_width: options.stroke_width,
        kind: shape.kind,
        labels: shape.labels.clone(),
    }
}

impl Scene {
    pub fn element(&self, id: &ElementId) -> Option<&SceneElement> {
        self.elements.iter().find(|e| &e.id == id)
    }

    pub fn contains(&self, id: &ElementId) -> bool {
        self.element(id).is_some()
    }

    /// Checks the structural invariants. Augmented scenes may have lost
    /// their outline, so at most one outline is required.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut seen = HashSet::new();
        let mut outlines = 0;
        let inner = self.canvas.expanded(-SCENE_MARGIN);
        for e in &self.elements {
            if !seen.insert(&e.id) {
                return Err(SceneError::Invalid(format!("duplicate id {}", e.id)));
            }
            if !e.primitive.is_finite() {
                return Err(SceneError::Invalid(format!("non-finite geometry in {}", e.id)));
            }
            match &e.primitive {
                Primitive::PolygonOutline { .. } => outlines += 1,
                Primitive::TextLabel { text, .. } if text.is_empty() => {
                    return Err(SceneError::Invalid(format!("empty label text in {}", e.id)));
                }
                _ => {}
            }
            if !inner.contains_rect(&e.primitive.extent(self.stroke_width)) {
                return Err(SceneError::Invalid(format!("{} leaves the canvas margin", e.id)));
            }
        }
        if outlines > 1 {
            return Err(SceneError::Invalid("more than one polygon outline".into()));
        }
        Ok(())
    }
}

/// Default referable targets: sides in label order, the polygon, then the
/// incircle and diagonals when drawn.
pub fn enumerate_targets(scene: &Scene) -> Vec<Target> {
    let rank = |k: TargetKind| match k {
        TargetKind::Side => 0,
        TargetKind::Polygon => 1,
        TargetKind::Incircle => 2,
        TargetKind::Diagonal => 3,
    };
    let mut targets: Vec<(usize, Target)> = scene
        .elements
        .iter()
        .enumerate()
        .filter_map(|(i, e)| Target::from_id(e.id.clone()).map(|t| (i, t)))
        .collect();
    // stable: within a kind, scene order (which is label order)
    targets.sort_by_key(|(i, t)| (rank(t.target_kind), *i));
    targets.into_iter().map(|(_, t)| t).collect()
}

fn sides_adjacent(a: &ElementId, b: &ElementId) -> bool {
    a.kind == ElementKind::Side
        && b.kind == ElementKind::Side
        && a != b
        && a.labels.chars().any(|c| b.labels.contains(c))
}

/// Element dropout for augmentation. Labels, the target and (for side
/// targets) the sides sharing a vertex with it always survive; every other
/// element is removed independently with probability `p_drop`.
pub fn drop_non_target<R: Rng + ?Sized>(scene: &Scene, keep: &Target, p_drop: f64, rng: &mut R) -> Result<Scene, SceneError> {
    if !scene.contains(&keep.element_id) {
        return Err(SceneError::UnknownElement(keep.element_id.to_string()));
    }
    let p_drop = p_drop.clamp(0.0, 1.0);
    let mut out = scene.clone();
    out.elements.retain(|e| {
        let protected = e.id == keep.element_id
            || e.id.kind == ElementKind::Vertex
            || sides_adjacent(&e.id, &keep.element_id);
        if protected {
            return true;
        }
        rng.random::<f64>() >= p_drop
    });
    Ok(out)
}
