use std::path::Path;
use std::process::Command;

use lbpx::cli::run;
use lbpx::files::{descriptor_from_json, model_from_json, parse_detection_lines};
use lbpx::pgm::{load_pgm, write_pgm_file};
use lbpx_core::{lbp_map, GrayImage, LbpParams, MappingKind};

fn lbpx(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["lbpx"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn stripes(vertical: bool, phase: u8) -> GrayImage {
    GrayImage::from_fn(24, 24, |x, y| {
        let on = if vertical { x % 2 == 0 } else { y % 2 == 0 };
        (if on { 200 } else { 40 }) + ((x * 7 + y * 3) as u8 + phase) % 9
    })
    .unwrap()
}

/// Two-class corpus with a manifest; returns the manifest path.
fn corpus(dir: &Path) -> String {
    let mut manifest = String::from("path,label,split\n");
    for i in 0..4u8 {
        for (label, vertical) in [("horizontal", false), ("vertical", true)] {
            let name = format!("{label}{i}.pgm");
            write_pgm_file(dir.join(&name), &stripes(vertical, i)).unwrap();
            let split = if i < 2 { "train" } else { "test" };
            manifest.push_str(&format!("{name},{label},{split}\n"));
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).unwrap();
    path.to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn map_writes_label_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    let img = stripes(true, 0);
    write_pgm_file(&input, &img).unwrap();
    let output = dir.path().join("map.pgm");
    let (code, _, err) = lbpx(&["map", "--input", &s(&input), "--output", &s(&output), "--mapping", "raw"]);
    assert_eq!(code, 0, "{err}");
    let written = load_pgm(&std::fs::read(&output).unwrap()).unwrap();
    let expected = lbp_map(&img, &LbpParams::square3x3(MappingKind::Raw)).unwrap();
    assert_eq!((written.width(), written.height()), (22, 22));
    assert!(written.data().iter().zip(expected.labels()).all(|(&a, &b)| a as u32 == b));
}

#[test]
fn describe_emits_descriptor_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    write_pgm_file(&input, &stripes(false, 1)).unwrap();
    let (code, out, _) = lbpx(&["describe", "--input", &s(&input), "--grid", "2x4", "--mapping", "riu2"]);
    assert_eq!(code, 0);
    let d = descriptor_from_json(&out).unwrap();
    assert_eq!((d.grid_rows, d.grid_cols, d.bin_count()), (2, 4, 10));
    for region in d.regions() {
        assert!((region.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn train_then_classify_training_image() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let model = dir.path().join("model.json");
    let (code, out, err) = lbpx(&["train", "--manifest", &manifest, "--output", &s(&model)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("trained 2 classes from 4 images"), "{out}");
    let m = model_from_json(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(m.labels().collect::<Vec<_>>(), ["horizontal", "vertical"]);

    let (code, out, _) = lbpx(&["classify", "--model", &s(&model), "--input", &s(&dir.path().join("vertical2.pgm"))]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "prediction: vertical");
    assert!(lines[1].starts_with("distance: "));
    assert_eq!(lines[2], "scores:");
    assert!(lines[3].starts_with("  horizontal ") && lines[4].starts_with("  vertical "));
}

#[test]
fn evaluate_reports_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = corpus(dir.path());
    let (code, out, _) = lbpx(&["evaluate", "--manifest", &manifest, "--bench-iterations", "3"]);
    assert_eq!(code, 0);
    let report = lbpx::eval::EvalReport::from_json(&out).unwrap();
    assert_eq!(report.accuracy, 1.0);
    assert_eq!(report.n_test, 4);
    assert!(report.fps.unwrap() > 0.0);
}

#[test]
fn detect_finds_planted_patch() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.csv");
    let patch = stripes(true, 0);
    write_pgm_file(dir.path().join("face.pgm"), &patch).unwrap();
    std::fs::write(&manifest, "path,label,split\nface.pgm,face,train\n").unwrap();
    let model = dir.path().join("face.json");
    assert_eq!(lbpx(&["train", "--manifest", &s(&manifest), "--output", &s(&model)]).0, 0);

    let mut scene = GrayImage::from_fn(64, 48, |x, y| ((x * 37 + y * 91) % 251) as u8).unwrap();
    scene.paste(&patch, 20, 12).unwrap();
    let scene_path = dir.path().join("scene.pgm");
    write_pgm_file(&scene_path, &scene).unwrap();
    let (code, out, err) = lbpx(&[
        "detect", "--model", &s(&model), "--input", &s(&scene_path), "--window", "24x24", "--threshold", "0.5",
    ]);
    assert_eq!(code, 0, "{err}");
    let hits = parse_detection_lines(&out).unwrap();
    assert_eq!((hits[0].x, hits[0].y, hits[0].score), (20, 12, 0.0));
    assert!(out.starts_with("{\"x\":20,\"y\":12,\"w\":24,\"h\":24,\"score\":0.000000}\n"));
}

#[test]
fn bench_reports_fps() {
    let (code, out, _) = lbpx(&["bench", "--iterations", "2"]);
    assert_eq!(code, 0);
    let keys: Vec<&str> = out.lines().map(|l| l.split(':').next().unwrap()).collect();
    assert_eq!(keys, ["image", "config", "threads", "iterations", "fps", "ms_per_frame"]);
    assert!(out.starts_with("image: 320x240\n"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = s(&dir.path().join("nope.csv"));
    // I/O
    let (code, _, err) = lbpx(&["train", "--manifest", &missing]);
    assert_eq!(code, 2);
    assert!(err.starts_with("lbpx: "));
    // usage
    assert_eq!(lbpx(&["frobnicate"]).0, 1);
    assert_eq!(lbpx(&["describe", "--input", "x.pgm", "--grid", "0x3"]).0, 1);
    // bad file content
    let junk = dir.path().join("junk.pgm");
    std::fs::write(&junk, b"P6\n").unwrap();
    assert_eq!(lbpx(&["map", "--input", &s(&junk)]).0, 2);
    // model/config mismatch: image too small for the model's operator
    let manifest = corpus(dir.path());
    let model = dir.path().join("model.json");
    assert_eq!(lbpx(&["train", "--manifest", &manifest, "--output", &s(&model)]).0, 0);
    let tiny = dir.path().join("tiny.pgm");
    write_pgm_file(&tiny, &GrayImage::filled(2, 2, 9).unwrap()).unwrap();
    assert_eq!(lbpx(&["classify", "--model", &s(&model), "--input", &s(&tiny)]).0, 3);
    // two classes and none named "face"
    let scene = dir.path().join("vertical0.pgm");
    assert_eq!(lbpx(&["detect", "--model", &s(&model), "--input", &s(&scene), "--window", "8x8", "--threshold", "1"]).0, 3);
}

#[test]
fn help_for_every_subcommand() {
    for sub in ["map", "describe", "train", "classify", "evaluate", "detect", "bench"] {
        let (code, out, _) = lbpx(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        assert!(out.contains("Usage"), "{sub}");
    }
}

#[test]
fn binary_honours_thread_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_lbpx"))
        .args(["bench", "--iterations", "2", "--threads", "8"])
        .env("LBPX_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("threads: 2\n"));

    let out = Command::new(env!("CARGO_BIN_EXE_lbpx")).arg("--version").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
