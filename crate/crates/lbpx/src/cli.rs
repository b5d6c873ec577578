//! The `lbpx` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 model or
//! configuration mismatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lbpx_core::{nms, scan_detect, GrayImage, LbpOperator, LbpParams, MappingKind, Metric, Sampling};

use crate::bench::benchmark_fps;
use crate::error::{Error, Result};
use crate::eval::{describe, evaluate_images, load_split, train, EvalConfig};
use crate::files::{descriptor_to_json, model_to_json, read_model_file, write_detection_lines};
use crate::manifest::{Manifest, Split};
use crate::parallel::{thread_count, thread_pool};
use crate::pgm::{label_map_image, read_pgm_file, save_pgm};

#[derive(Debug, Parser)]
#[command(name = "lbpx", version, about = "Local binary pattern texture features, classification and detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the per-pixel label map of an image as a PGM
    Map(MapArgs),
    /// Write the grid descriptor of an image as JSON
    Describe(DescribeArgs),
    /// Build class templates from the train split of a manifest
    Train(TrainArgs),
    /// Classify one image against a model
    Classify(ClassifyArgs),
    /// Train on the train split, score the test split, report accuracy
    Evaluate(EvaluateArgs),
    /// Sliding-window search for the model's face template
    Detect(DetectArgs),
    /// Measure label-map throughput in frames per second
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
struct LbpArgs {
    /// Number of sampling points P (square3x3 requires 8)
    #[arg(long, default_value_t = 8)]
    neighbors: u32,
    /// Sampling radius in pixels (ignored by square3x3)
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Neighbourhood: square3x3 or circular
    #[arg(long, default_value = "square3x3", value_parser = parse_sampling)]
    sampling: Sampling,
    /// Label mapping: raw, u2, ri or riu2
    #[arg(long, default_value = "u2", value_parser = parse_mapping)]
    mapping: MappingKind,
}

impl LbpArgs {
    fn params(&self) -> Result<LbpParams> {
        Ok(LbpParams::new(self.neighbors, self.radius, self.sampling, self.mapping)?)
    }
}

#[derive(Debug, Args)]
struct MapArgs {
    /// Input PGM image
    #[arg(long)]
    input: PathBuf,
    /// Output PGM path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    lbp: LbpArgs,
}

#[derive(Debug, Args)]
struct DescribeArgs {
    /// Input PGM image
    #[arg(long)]
    input: PathBuf,
    /// Output JSON path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    lbp: LbpArgs,
    /// Histogram grid as ROWSxCOLS
    #[arg(long, default_value = "3x3", value_parser = parse_dims)]
    grid: (usize, usize),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Manifest CSV with header path,label,split
    #[arg(long)]
    manifest: PathBuf,
    /// Output model JSON path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    lbp: LbpArgs,
    /// Histogram grid as ROWSxCOLS
    #[arg(long, default_value = "3x3", value_parser = parse_dims)]
    grid: (usize, usize),
    /// Comma-separated per-region weights stored in the model (for wchi2)
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Model JSON written by `train`
    #[arg(long)]
    model: PathBuf,
    /// Input PGM image
    #[arg(long)]
    input: PathBuf,
    /// Distance: chi2, wchi2, intersect or l1
    #[arg(long, default_value = "chi2", value_parser = parse_metric)]
    metric: Metric,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Manifest CSV with header path,label,split
    #[arg(long)]
    manifest: PathBuf,
    /// Output report JSON path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    lbp: LbpArgs,
    /// Histogram grid as ROWSxCOLS
    #[arg(long, default_value = "3x3", value_parser = parse_dims)]
    grid: (usize, usize),
    /// Distance: chi2, wchi2, intersect or l1
    #[arg(long, default_value = "chi2", value_parser = parse_metric)]
    metric: Metric,
    /// Comma-separated per-region weights (for wchi2)
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Also time this many label maps of the first test image and report fps
    #[arg(long)]
    bench_iterations: Option<usize>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Model JSON with a single class (or a class named "face")
    #[arg(long)]
    model: PathBuf,
    /// Scene PGM image
    #[arg(long)]
    input: PathBuf,
    /// Window size as WIDTHxHEIGHT
    #[arg(long, value_parser = parse_dims)]
    window: (usize, usize),
    /// Window step in pixels
    #[arg(long, default_value_t = 4)]
    stride: usize,
    /// Keep windows whose chi-square distance is at most this
    #[arg(long)]
    threshold: f64,
    /// Suppress boxes overlapping a better one by more than this IoU
    #[arg(long, default_value_t = 0.3)]
    iou: f64,
    /// Emit every window under the threshold without suppression
    #[arg(long)]
    no_nms: bool,
    /// Emit at most this many detections
    #[arg(long)]
    max_detections: Option<usize>,
    /// Output JSON-lines path (standard output when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Input PGM image (a 320x240 synthetic frame when omitted)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of timed label maps
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    /// Worker threads (1 = serial loop); capped by LBPX_THREADS
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Also write the report as JSON to this path
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    lbp: LbpArgs,
}

fn parse_sampling(s: &str) -> std::result::Result<Sampling, String> {
    s.parse().map_err(|e: lbpx_core::Error| e.to_string())
}

fn parse_mapping(s: &str) -> std::result::Result<MappingKind, String> {
    s.parse().map_err(|e: lbpx_core::Error| e.to_string())
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse().map_err(|e: lbpx_core::Error| e.to_string())
}

/// `"AxB"` → `(A, B)`, both at least 1.
fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad number in {s:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad number in {s:?}"))?;
    if a == 0 || b == 0 {
        return Err(format!("dimensions must be positive, got {s:?}"));
    }
    Ok((a, b))
}

fn emit(output: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::io(path, e)),
        None => out.write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Deterministic 320x240 noise frame for `bench` without an input.
fn synthetic_frame() -> GrayImage {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    GrayImage::from_fn(320, 240, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 56) as u8
    })
    .expect("fixed size")
}

fn params_line(p: &LbpParams) -> String {
    format!(
        "neighbors={} radius={:.6} sampling={} mapping={}",
        p.neighbors(),
        p.radius(),
        p.sampling(),
        p.mapping()
    )
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    let w = |out: &mut dyn Write, s: String| out.write_all(s.as_bytes()).map_err(|e| Error::io("<stdout>", e));
    match command {
        Command::Map(a) => {
            let op = LbpOperator::new(a.lbp.params()?)?;
            let img = read_pgm_file(&a.input)?;
            let map = op.map(&img)?;
            emit(a.output.as_deref(), &save_pgm(&label_map_image(&map)?), out)
        }
        Command::Describe(a) => {
            let op = LbpOperator::new(a.lbp.params()?)?;
            let img = read_pgm_file(&a.input)?;
            let d = describe(&op, &img, a.grid)?;
            emit(a.output.as_deref(), descriptor_to_json(&d).as_bytes(), out)
        }
        Command::Train(a) => {
            let config = EvalConfig { params: a.lbp.params()?, grid: a.grid, metric: Metric::Chi2, weights: a.weights };
            let manifest = Manifest::load(&a.manifest)?;
            let images = load_split(&manifest, Split::Train)?;
            let model = train(&images, &config)?;
            emit(a.output.as_deref(), model_to_json(&model).as_bytes(), out)?;
            if a.output.is_some() {
                w(out, format!("trained {} classes from {} images\n", model.classes().len(), images.len()))?;
            }
            Ok(())
        }
        Command::Classify(a) => {
            let model = read_model_file(&a.model)?;
            let img = read_pgm_file(&a.input)?;
            let op = LbpOperator::new(*model.params())?;
            let pred = model.predict(&describe(&op, &img, model.grid())?, a.metric)?;
            let mut text = format!("prediction: {}\ndistance: {:.6}\nscores:\n", pred.label, pred.distance);
            for (label, d) in &pred.scores {
                text.push_str(&format!("  {label} {d:.6}\n"));
            }
            w(out, text)
        }
        Command::Evaluate(a) => {
            let config = EvalConfig { params: a.lbp.params()?, grid: a.grid, metric: a.metric, weights: a.weights };
            let manifest = Manifest::load(&a.manifest)?;
            let train_set = load_split(&manifest, Split::Train)?;
            let test_set = load_split(&manifest, Split::Test)?;
            let mut report = evaluate_images(&train_set, &test_set, &config)?;
            if let Some(iterations) = a.bench_iterations {
                report.fps = Some(benchmark_fps(&test_set[0].1, &config.params, iterations, 1)?.fps);
            }
            emit(a.output.as_deref(), report.to_json().as_bytes(), out)?;
            if a.output.is_some() {
                let correct: u64 = (0..report.classes.len()).map(|i| report.confusion[i][i]).sum();
                w(out, format!("accuracy: {:.6} ({correct}/{})\n", report.accuracy, report.n_test))?;
            }
            Ok(())
        }
        Command::Detect(a) => {
            if !(0.0..=1.0).contains(&a.iou) {
                return Err(Error::Core(lbpx_core::Error::InvalidParameter(format!("iou {} outside [0, 1]", a.iou))));
            }
            let model = read_model_file(&a.model)?;
            let scene = read_pgm_file(&a.input)?;
            let hits = scan_detect(&scene, &model, a.window, a.stride, a.threshold)?;
            let mut hits = if a.no_nms { hits } else { nms(&hits, a.iou) };
            if let Some(n) = a.max_detections {
                hits.truncate(n);
            }
            let mut buf = Vec::new();
            write_detection_lines(&mut buf, &hits).expect("in-memory write");
            emit(a.output.as_deref(), &buf, out)
        }
        Command::Bench(a) => {
            let params = a.lbp.params()?;
            let img = match &a.input {
                Some(p) => read_pgm_file(p)?,
                None => synthetic_frame(),
            };
            let threads = thread_count(Some(a.threads));
            let r = benchmark_fps(&img, &params, a.iterations, threads)?;
            w(
                out,
                format!(
                    "image: {}x{}\nconfig: {}\nthreads: {}\niterations: {}\nfps: {:.6}\nms_per_frame: {:.6}\n",
                    r.width,
                    r.height,
                    params_line(&params),
                    r.threads,
                    r.iterations,
                    r.fps,
                    r.ms_per_frame
                ),
            )?;
            if let Some(path) = &a.output {
                let mut json = serde_json::to_string_pretty(&r).expect("bench report serialises");
                json.push('\n');
                std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
            }
            Ok(())
        }
    }
}

/// Runs one invocation; `args` includes the program name. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let pool = thread_pool(thread_count(None));
    let mut buf = Vec::new();
    let result = pool.install(|| execute(cli.command, &mut buf));
    let flushed = out.write_all(&buf).and_then(|()| out.flush());
    match result.and(flushed.map_err(|e| Error::io("<stdout>", e))) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "lbpx: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parse() {
        assert_eq!(parse_dims("3x3"), Ok((3, 3)));
        assert_eq!(parse_dims("32X24"), Ok((32, 24)));
        assert!(parse_dims("3").is_err());
        assert!(parse_dims("0x3").is_err());
        assert!(parse_dims("ax3").is_err());
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["lbpx", "describe", "--input", "a.pgm"]).unwrap();
        let Command::Describe(a) = cli.command else { panic!() };
        assert_eq!(a.lbp.params().unwrap(), LbpParams::square3x3(MappingKind::U2));
        assert_eq!(a.grid, (3, 3));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["lbpx", "map", "--input", "a.pgm", "--bogus"], &mut o, &mut e), 1);
        assert_eq!(run(["lbpx"], &mut o, &mut e), 1);
        assert_eq!(run(["lbpx", "map", "--input", "a.pgm", "--mapping", "nope"], &mut o, &mut e), 1);
    }

    #[test]
    fn synthetic_frame_is_fixed() {
        assert_eq!(synthetic_frame(), synthetic_frame());
        assert_eq!((synthetic_frame().width(), synthetic_frame().height()), (320, 240));
    }
}
