use std::fmt::Write;

use crate::geom::Point2;
use crate::scene::{ElementId, ElementKind, Primitive, Scene};

fn coord(p: Point2<f64>) -> String {
    format!("({:.4}, {:.4})", p.x, p.y)
}

/// Name of the `\coordinate` matching `p`, if it is a labelled vertex.
fn vertex_name(scene: &Scene, p: Point2<f64>) -> Option<&str> {
    scene.elements.iter().find_map(|e| match &e.primitive {
        Primitive::TextLabel { anchor, text, .. } if *anchor == p => Some(text.as_str()),
        _ => None,
    })
}

fn point_ref(scene: &Scene, p: Point2<f64>) -> String {
    match vertex_name(scene, p) {
        Some(n) => format!("({n})"),
        None => coord(p),
    }
}

/// Standalone TikZ source for `scene`.
pub fn emit_tikz(scene: &Scene) -> String {
    emit(scene, None)
}

/// Same document with `target` drawn in red, as in the mask pass.
pub fn emit_tikz_highlight(scene: &Scene, target: &ElementId) -> String {
    emit(scene, Some(target))
}

fn emit(scene: &Scene, target: Option<&ElementId>) -> String {
    let mut s = String::new();
    s.push_str("\\documentclass{standalone}\n\\usepackage{tikz}\n\\usetikzlibrary{angles, quotes}\n\\usepackage{tkz-euclide}\n\n");
    s.push_str("\\begin{document}\n\\begin{tikzpicture}\n");
    for e in &scene.elements {
        if let Primitive::TextLabel { anchor, text, .. } = &e.primitive {
            writeln!(s, "  \\coordinate ({text}) at {};", coord(*anchor)).unwrap();
        }
    }
    s.push('\n');
    let has_outline = scene.elements.iter().any(|e| matches!(e.primitive, Primitive::PolygonOutline { .. }));
    // the highlighted element goes last so it sits on top
    let ordered = scene
        .elements
        .iter()
        .filter(|e| Some(&e.id) != target)
        .chain(scene.elements.iter().filter(|e| Some(&e.id) == target));
    for e in ordered {
        let color = if Some(&e.id) == target { "red" } else { "black" };
        match &e.primitive {
            Primitive::PolygonOutline { points } => {
                let path: Vec<String> = points.iter().map(|p| point_ref(scene, *p)).collect();
                writeln!(s, "  \\draw[thick, {color}] {} -- cycle;", path.join(" -- ")).unwrap();
            }
            Primitive::Segment { a, b } => {
                // sides coincide with the outline stroke unless it was dropped or is highlighted
                if e.id.kind == ElementKind::Side && has_outline && Some(&e.id) != target {
                    continue;
                }
                writeln!(s, "  \\draw[thick, {color}] {} -- {};", point_ref(scene, *a), point_ref(scene, *b)).unwrap();
            }
            Primitive::Circle { center, radius } => {
                writeln!(s, "  \\draw[thick, {color}] {} circle ({radius:.4});", coord(*center)).unwrap();
            }
            Primitive::Dot { p } => {
                writeln!(s, "  \\fill[{color}] {} circle (1.5pt);", coord(*p)).unwrap();
            }
            Primitive::TextLabel { .. } => {}
        }
    }
    for e in &scene.elements {
        if let Primitive::TextLabel { text, placement, .. } = &e.primitive {
            writeln!(s, "  \\node[{}] at ({text}) {{{text}}};", placement.as_str()).unwrap();
        }
    }
    s.push_str("\\end{tikzpicture}\n\\end{document}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{default_labels, ShapeInstance, ShapeKind};
    use crate::scene::{build_scene, SceneOptions};

    fn square() -> Scene {
        let p = Point2::new;
        let shape = ShapeInstance {
            kind: ShapeKind::Square,
            vertices: [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            labels: default_labels(),
            incircle: None,
        };
        build_scene(&shape, &SceneOptions { draw_diagonals: true, ..Default::default() })
    }

    #[test]
    fn listing_structure() {
        let t = emit_tikz(&square());
        assert!(t.contains("\\coordinate (A) at (0.0000, 0.0000);"));
        assert!(t.contains("\\coordinate (C) at (1.0000, 1.0000);"));
        assert!(t.contains("\\draw[thick, black] (A) -- (B) -- (C) -- (D) -- cycle;"));
        assert!(t.contains("\\draw[thick, black] (A) -- (C);"));
        assert!(t.contains("\\node[below] at (A) {A};"));
        assert_eq!(t.matches("\\begin{tikzpicture}").count(), 1);
        assert!(t.starts_with("\\documentclass{standalone}"));
    }

    #[test]
    fn byte_deterministic() {
        assert_eq!(emit_tikz(&square()), emit_tikz(&square()));
    }

    #[test]
    fn highlight_draws_target_red_last() {
        let t = emit_tikz_highlight(&square(), &ElementId::side("B", "C"));
        let red = t.find("\\draw[thick, red] (B) -- (C);").unwrap();
        let outline = t.find("cycle;").unwrap();
        assert!(red > outline);
    }
}
