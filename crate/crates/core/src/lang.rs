//! Referring expressions at three levels of complexity.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::{ElementId, Scene, Target, TargetKind};

/// The built-in template inventory.
pub const DEFAULT_TEMPLATES: &str = include_str!("../templates/expressions.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityLevel {
    Direct,
    Descriptive,
    Topological,
}

impl ComplexityLevel {
    pub const ALL: [ComplexityLevel; 3] = [ComplexityLevel::Direct, ComplexityLevel::Descriptive, ComplexityLevel::Topological];

    pub fn as_str(self) -> &'static str {
        match self {
            ComplexityLevel::Direct => "direct",
            ComplexityLevel::Descriptive => "descriptive",
            ComplexityLevel::Topological => "topological",
        }
    }
}

impl fmt::Display for ComplexityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ComplexityLevel {
    type Err = LangError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| LangError::BadTemplate(format!("unknown level {s:?}")))
    }
}

/// Word-count bucket, recorded as metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthBand {
    /// 2–3 words.
    Short,
    /// 4–7 words.
    Medium,
    /// 8 or more.
    Long,
}

impl LengthBand {
    pub fn of(text: &str) -> Self {
        match text.split_whitespace().count() {
            0..=3 => LengthBand::Short,
            4..=7 => LengthBand::Medium,
            _ => LengthBand::Long,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LengthBand::Short => "short",
            LengthBand::Medium => "medium",
            LengthBand::Long => "long",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferringExpression {
    pub text: String,
    pub level: ComplexityLevel,
    pub target: ElementId,
    /// Line index of the template within its family.
    pub template_id: usize,
}

impl ReferringExpression {
    pub fn length_band(&self) -> LengthBand {
        LengthBand::of(&self.text)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LangError {
    #[error("no templates for ({0}, {1})")]
    NoTemplate(TargetKind, ComplexityLevel),
    #[error("target {0} is not in the scene")]
    UnknownTarget(ElementId),
    #[error("bad template: {0}")]
    BadTemplate(String),
}

const SLOTS: [&str; 4] = ["{A}", "{B}", "{C}", "{D}"];

/// Immutable template families keyed by (target kind, level).
#[derive(Debug, Clone)]
pub struct TemplateStore {
    families: Vec<((TargetKind, ComplexityLevel), Vec<String>)>,
}

fn parse_kind(s: &str) -> Result<TargetKind, LangError> {
    [TargetKind::Side, TargetKind::Polygon, TargetKind::Incircle, TargetKind::Diagonal]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| LangError::BadTemplate(format!("unknown target kind {s:?}")))
}

impl TemplateStore {
    /// Parses `kind<TAB>level<TAB>text` lines; `#` starts a comment line.
    pub fn parse(src: &str) -> Result<Self, LangError> {
        let mut families: Vec<((TargetKind, ComplexityLevel), Vec<String>)> = Vec::new();
        for (n, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let (Some(kind), Some(level), Some(text)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(LangError::BadTemplate(format!("line {}: expected three tab-separated fields", n + 1)));
            };
            let key = (parse_kind(kind.trim())?, level.trim().parse()?);
            let text = text.trim().to_string();
            if text.is_empty() {
                return Err(LangError::BadTemplate(format!("line {}: empty text", n + 1)));
            }
            match families.iter_mut().find(|(k, _)| *k == key) {
                Some((_, v)) => v.push(text),
                None => families.push((key, vec![text])),
            }
        }
        Ok(Self { families })
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_TEMPLATES).expect("built-in templates parse")
    }

    pub fn family(&self, kind: TargetKind, level: ComplexityLevel) -> &[String] {
        self.families.iter().find(|(k, _)| *k == (kind, level)).map(|(_, v)| v.as_slice()).unwrap_or(&[])
    }

    pub fn describe<R: Rng + ?Sized>(
        &self,
        target: &Target,
        scene: &Scene,
        level: ComplexityLevel,
        rng: &mut R,
    ) -> Result<ReferringExpression, LangError> {
        if !scene.contains(&target.element_id) {
            return Err(LangError::UnknownTarget(target.element_id.clone()));
        }
        let family = self.family(target.target_kind, level);
        if family.is_empty() {
            return Err(LangError::NoTemplate(target.target_kind, level));
        }
        let template_id = rng.random_range(0..family.len());
        let text = fill(&family[template_id], target, scene)?;
        Ok(ReferringExpression { text, level, target: target.element_id.clone(), template_id })
    }

    pub fn describe_all<R: Rng + ?Sized>(&self, target: &Target, scene: &Scene, rng: &mut R) -> Result<Vec<ReferringExpression>, LangError> {
        ComplexityLevel::ALL.into_iter().map(|l| self.describe(target, scene, l, rng)).collect()
    }
}

fn fill(template: &str, target: &Target, scene: &Scene) -> Result<String, LangError> {
    let labels = target.element_id.label_chars();
    let mut out = template.replace("{NOUN}", scene.kind.noun()).replace("{ALL}", &scene.labels.concat());
    for (i, slot) in SLOTS.iter().enumerate() {
        if out.contains(slot) {
            let label = labels
                .get(i)
                .ok_or_else(|| LangError::BadTemplate(format!("{template:?} uses {slot} but {} has {} labels", target.element_id, labels.len())))?;
            out = out.replace(slot, label);
        }
    }
    if out.contains('{') {
        return Err(LangError::BadTemplate(format!("unfilled slot in {template:?}")));
    }
    Ok(out)
}

/// Shorthand for the built-in store.
pub fn describe<R: Rng + ?Sized>(target: &Target, scene: &Scene, level: ComplexityLevel, rng: &mut R) -> Result<ReferringExpression, LangError> {
    TemplateStore::builtin().describe(target, scene, level, rng)
}

pub fn describe_all<R: Rng + ?Sized>(target: &Target, scene: &Scene, rng: &mut R) -> Result<Vec<ReferringExpression>, LangError> {
    TemplateStore::builtin().describe_all(target, scene, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{sample_shape, ShapeKind};
    use crate::scene::{build_scene, enumerate_targets, SceneOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scene(kind: ShapeKind, seed: u64) -> Scene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = sample_shape::<f64, _>(kind, &mut rng).unwrap();
        build_scene(&shape, &SceneOptions { draw_diagonals: true, ..SceneOptions::default() })
    }

    #[test]
    fn families_have_three_or_more() {
        let store = TemplateStore::builtin();
        for kind in [TargetKind::Side, TargetKind::Polygon, TargetKind::Incircle, TargetKind::Diagonal] {
            for level in ComplexityLevel::ALL {
                assert!(store.family(kind, level).len() >= 3, "{kind} {level}");
            }
        }
    }

    #[test]
    fn known_phrasings_present() {
        let store = TemplateStore::builtin();
        let s = scene(ShapeKind::Square, 1);
        let t = Target::from_id(ElementId::side("A", "B")).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..300 {
            for e in store.describe_all(&t, &s, &mut rng).unwrap() {
                seen.insert(e.text);
            }
        }
        for text in ["line AB", "the line segment from point A to point B", "a straight line connecting points A and B"] {
            assert!(seen.contains(text), "{text}");
        }
    }

    #[test]
    fn labels_and_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let store = TemplateStore::builtin();
        for kind in ShapeKind::ALL {
            let s = scene(kind, 3);
            for t in enumerate_targets(&s) {
                for _ in 0..10 {
                    let all = store.describe_all(&t, &s, &mut rng).unwrap();
                    let levels: Vec<_> = all.iter().map(|e| e.level).collect();
                    assert_eq!(levels, ComplexityLevel::ALL);
                    for e in &all {
                        for l in t.element_id.label_chars() {
                            let n = e.text.matches(l.as_str()).count();
                            assert!(n >= 1, "{:?} lacks {l}", e.text);
                            if e.level == ComplexityLevel::Direct {
                                assert_eq!(n, 1, "{:?}", e.text);
                            }
                        }
                        if t.target_kind == TargetKind::Incircle {
                            assert!(e.text.contains("circle"));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn polygon_direct_uses_noun() {
        let store = TemplateStore::builtin();
        let s = scene(ShapeKind::Trapezoid, 2);
        let t = Target::from_id(ElementId::new(crate::scene::ElementKind::Polygon, "ABCD")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let texts: Vec<String> = (0..60).map(|_| store.describe(&t, &s, ComplexityLevel::Direct, &mut rng).unwrap().text).collect();
        assert!(texts.iter().any(|t| t == "trapezoid ABCD"));
    }

    #[test]
    fn deterministic_and_uniform() {
        let store = TemplateStore::builtin();
        let s = scene(ShapeKind::Rhombus, 5);
        let t = Target::from_id(ElementId::side("B", "C")).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| store.describe_all(&t, &s, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(11), run(11));
        let fam = store.family(TargetKind::Side, ComplexityLevel::Descriptive).len();
        let mut counts = vec![0usize; fam];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 4000;
        for _ in 0..n {
            counts[store.describe(&t, &s, ComplexityLevel::Descriptive, &mut rng).unwrap().template_id] += 1;
        }
        let expect = n as f64 / fam as f64;
        assert!(counts.iter().all(|&c| (c as f64 - expect).abs() < 0.15 * expect), "{counts:?}");
    }

    #[test]
    fn errors() {
        let s = scene(ShapeKind::Square, 1);
        let store = TemplateStore::parse("side\tdirect\tline {A}{B}\n").unwrap();
        let t = Target::from_id(ElementId::side("A", "B")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            store.describe(&t, &s, ComplexityLevel::Topological, &mut rng),
            Err(LangError::NoTemplate(TargetKind::Side, ComplexityLevel::Topological))
        );
        let missing = Target::from_id(ElementId::incircle()).unwrap();
        assert!(matches!(store.describe(&missing, &s, ComplexityLevel::Direct, &mut rng), Err(LangError::UnknownTarget(_))));
        assert!(TemplateStore::parse("side\tloud\tx\n").is_err());
        assert!(TemplateStore::parse("side direct x\n").is_err());
    }

    #[test]
    fn length_bands() {
        assert_eq!(LengthBand::of("line AB"), LengthBand::Short);
        assert_eq!(LengthBand::of("the line segment from point A to point B"), LengthBand::Long);
        assert_eq!(LengthBand::of("the side joining A and B"), LengthBand::Medium);
    }
}
