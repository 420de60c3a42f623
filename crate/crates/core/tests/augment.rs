use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use geomforge::morph::{dilate, elastic_deform, ElasticField, DEFAULT_ALPHA, DEFAULT_SIGMA};
use geomforge::pipeline::{plan_sample, GenConfig};
use geomforge::raster::{BinaryMask, RasterImage};
use geomforge::render::{render_mask, render_scene, RenderStyle, DEFAULT_TAU};

fn ink(img: &RasterImage) -> BinaryMask {
    BinaryMask::from_fn(img.width, img.height, |x, y| img.get(x, y) != [255, 255, 255])
}

#[test]
fn warped_masks_stay_on_warped_ink() {
    let cfg = GenConfig { master_seed: 77, dpi: geomforge::pipeline::DpiPolicy { high_fraction: 0.0, ..Default::default() }, ..GenConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..4 {
        let plan = plan_sample(&cfg, i).unwrap();
        let style = RenderStyle::at_dpi(plan.dpi);
        let img = render_scene(&plan.scene, &style).unwrap();
        let masks: Vec<BinaryMask> = plan.targets.iter().map(|t| render_mask(&plan.scene, t, &style, DEFAULT_TAU).unwrap()).collect();
        let field = ElasticField::random(img.width, img.height, DEFAULT_ALPHA, DEFAULT_SIGMA, &mut rng);
        assert!(field.max_displacement() <= DEFAULT_ALPHA + 1e-9);
        let (warped, warped_masks) = elastic_deform(&img, &masks, &field).unwrap();
        let near = dilate(&ink(&warped), 2);
        for (t, m) in plan.targets.iter().zip(&warped_masks) {
            let stray = m.bits.iter().zip(&near.bits).filter(|&(&a, &b)| a != 0 && b == 0).count();
            assert_eq!(stray, 0, "sample {i} {}", t.element_id);
            assert!(!m.is_empty());
        }
    }
}

#[test]
fn zero_field_is_identity_on_rendered_sample() {
    let plan = plan_sample(&GenConfig::default(), 0).unwrap();
    let style = RenderStyle::at_dpi(96);
    let img = render_scene(&plan.scene, &style).unwrap();
    let m = render_mask(&plan.scene, &plan.targets[0], &style, DEFAULT_TAU).unwrap();
    let (w, ms) = elastic_deform(&img, std::slice::from_ref(&m), &ElasticField::zero(img.width, img.height)).unwrap();
    assert_eq!(w, img);
    assert_eq!(ms[0], m);
}
