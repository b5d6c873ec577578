use lbpx_core::{
    build_templates, grid_descriptor, grid_descriptor_window, lbp_map, nms, scan_detect, GrayImage, LbpParams,
    MappingKind, Metric,
};

fn texture(kind: u8, seed: u32) -> GrayImage {
    GrayImage::from_fn(40, 40, |x, y| {
        let noise = (((x as u32).wrapping_mul(2654435761) ^ (y as u32).wrapping_mul(40503) ^ seed) >> 5) % 12;
        let base = match kind {
            0 => 120,
            1 => if x % 2 == 0 { 70 } else { 180 },
            _ => if (x + y) % 2 == 0 { 70 } else { 180 },
        };
        (base + noise) as u8
    })
    .unwrap()
}

#[test]
fn train_and_predict_each_configuration() {
    let configs = [
        LbpParams::square3x3(MappingKind::U2),
        LbpParams::square3x3(MappingKind::Raw),
        LbpParams::circular(8, 1.0, MappingKind::Riu2).unwrap(),
        LbpParams::circular(12, 1.0, MappingKind::U2).unwrap(),
        LbpParams::circular(8, 1.5, MappingKind::Ri).unwrap(),
    ];
    let labels = ["flat", "stripes", "checker"];
    for params in configs {
        let describe = |img: &GrayImage| grid_descriptor(&lbp_map(img, &params).unwrap(), 2, 2).unwrap();
        let samples: Vec<_> =
            (0..3u8).flat_map(|k| (0..3).map(move |s| (labels[k as usize], texture(k, s)))).collect();
        let train: Vec<_> = samples.iter().map(|(l, img)| (*l, describe(img))).collect();
        let model = build_templates(&train).unwrap();
        for k in 0..3u8 {
            for metric in [Metric::Chi2, Metric::L1, Metric::Intersect] {
                let pred = model.predict(&describe(&texture(k, 99)), metric).unwrap();
                assert_eq!(pred.label, labels[k as usize], "{params:?} {metric}");
            }
        }
    }
}

#[test]
fn window_descriptor_feeds_detection() {
    let params = LbpParams::square3x3(MappingKind::U2);
    let patch = texture(2, 5).crop(0, 0, 20, 20).unwrap();
    let model = build_templates(&[("face", grid_descriptor(&lbp_map(&patch, &params).unwrap(), 2, 2).unwrap())]).unwrap();
    let mut scene = texture(0, 1);
    scene.paste(&patch, 8, 12).unwrap();

    let map = lbp_map(&scene, &params).unwrap();
    let direct = grid_descriptor_window(&map, 8, 12, 18, 18, 2, 2).unwrap();
    assert_eq!(&direct, model.template("face").unwrap());

    let hits = nms(&scan_detect(&scene, &model, (20, 20), 2, 0.5).unwrap(), 0.3);
    assert_eq!((hits[0].x, hits[0].y, hits[0].score), (8, 12, 0.0));
}
