//! Command-line front end: edge detection, map synthesis, format
//! conversion, LUT dumps, detection profiles, timing estimates, and map
//! comparison, with JSON reports for scripting.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use onn_ham::analysis::{
    compare_maps, estimate_processing_time, gray_detection_profile, max_realtime_size,
    EdgeDetector, TimingModel,
};
use onn_ham::error::Error;
use onn_ham::filters::CannyParams;
use onn_ham::grid::BinaryGrid;
use onn_ham::ham::build_edge_ham;
use onn_ham::hnn::DEFAULT_MAX_SWEEPS;
use onn_ham::imaging::{
    binarize, gen_eval_map, load_idx_images, load_pgm, quantize9, save_pgm, EvalMapSpec,
    DEFAULT_BINARIZE_THRESHOLD,
};
use onn_ham::phase::{onn_run_traced, OnnConfig};
use onn_ham::pipeline::{
    build_bw_lut, encode_patch_phase, render_edge_map, scan_image, Backend, EdgeClass, Patch3,
    RenderStyle,
};
use onn_ham::GrayImage;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "onnham",
    version,
    about = "Oscillatory associative-memory edge detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Hnn,
    Phase,
}

#[derive(Args)]
struct BackendOpts {
    /// Network backend to run each 3x3 window through.
    #[arg(long, value_enum, default_value = "hnn")]
    backend: BackendArg,
    /// Saturation gain of the phase backend.
    #[arg(long)]
    gain: Option<f64>,
    /// Cycle budget of the phase backend.
    #[arg(long)]
    max_cycles: Option<u32>,
    /// Sweep budget of the Hopfield emulator.
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
    /// System clock frequency in Hz for the phase backend.
    #[arg(long)]
    f_sys: Option<f64>,
}

impl BackendOpts {
    fn build(&self) -> Backend {
        match self.backend {
            BackendArg::Hnn => Backend::HnnEmulator {
                max_sweeps: self.max_sweeps,
            },
            BackendArg::Phase => {
                let mut config = OnnConfig::default();
                if let Some(g) = self.gain {
                    config.gain = g;
                }
                if let Some(m) = self.max_cycles {
                    config.max_cycles = m;
                }
                if let Some(f) = self.f_sys {
                    config.f_sys = f;
                }
                Backend::PhaseOnn(config)
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan a PGM image and write the edge map.
    Detect {
        input: PathBuf,
        #[command(flatten)]
        backend: BackendOpts,
        /// Rendered edge map (PGM, edges black on white).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report with per-window classes.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Use the precomputed 512-entry table (binary images only).
        #[arg(long)]
        lut: bool,
        /// Binarize a 256-level input instead of quantizing to 9 levels.
        #[arg(long)]
        binarize: bool,
        /// Per-cycle phase trace (CSV), phase backend only.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate the synthetic evaluation map.
    Evalmap {
        #[arg(long)]
        out: PathBuf,
        /// Square side in pixels.
        #[arg(long, default_value_t = 24)]
        square: usize,
        /// Margin around and between squares.
        #[arg(long, default_value_t = 16)]
        gap: usize,
        /// Emit a single square of this gray level instead of the 3x3 grid.
        #[arg(long)]
        single_level: Option<u8>,
    },
    /// Convert between formats and depths.
    Convert {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Threshold a 256-level image to black and white.
        #[arg(long)]
        binarize: bool,
        /// Binarization threshold.
        #[arg(long, default_value_t = DEFAULT_BINARIZE_THRESHOLD)]
        threshold: u8,
        /// Quantize a 256-level image to 9 gray levels.
        #[arg(long)]
        quantize9: bool,
        /// Extract this image index from an IDX3 file instead of a PGM.
        #[arg(long)]
        from_idx: Option<usize>,
    },
    /// Build the 512-entry black/white lookup table.
    Lut {
        #[command(flatten)]
        backend: BackendOpts,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Gray-level detection profile of a detector.
    Profile {
        #[arg(long, value_enum, default_value = "onn-hnn")]
        detector: DetectorArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Processing-time estimate for an image size.
    Timing {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// Parallel network instances.
        #[arg(long, default_value_t = 1)]
        parallel: u32,
        /// Also report the largest real-time square size at this frame rate.
        #[arg(long)]
        fps: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare two rendered edge maps (dark pixels are marks).
    Compare {
        candidate: PathBuf,
        reference: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the trained 11-neuron weight matrix.
    InspectWeights {
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectorArg {
    OnnHnn,
    OnnPhase,
    Sobel,
    Canny,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        Error::InvalidParameter { .. } => 2,
        _ => 4,
    }
}

fn write_json<T: Serialize>(value: &T, path: &PathBuf) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct WindowRecord {
    row: usize,
    col: usize,
    class: EdgeClass,
}

#[derive(Serialize)]
struct DetectReport {
    schema_version: u32,
    width: usize,
    height: usize,
    edge_a: usize,
    edge_b: usize,
    no_edge: usize,
    unstable: usize,
    edge_windows: Vec<WindowRecord>,
}

fn load_nine_level(path: &PathBuf, binarize_first: bool) -> Result<GrayImage, Error> {
    let img = load_pgm(path)?;
    if img.max_value() == 8 {
        return Ok(img);
    }
    if binarize_first {
        quantize9(&binarize(&img, DEFAULT_BINARIZE_THRESHOLD)?)
    } else {
        quantize9(&img)
    }
}

fn write_phase_trace(image: &GrayImage, config: &OnnConfig, path: &PathBuf) -> Result<(), Error> {
    let weights = build_edge_ham();
    let mut out = String::from("row,col,cycle,s0,s1,s2,s3,s4,s5,s6,s7,s8,s9,s10\n");
    for r in 0..image.height() - 2 {
        for c in 0..image.width() - 2 {
            let mut levels = [0u8; 9];
            for dr in 0..3 {
                for dc in 0..3 {
                    levels[dr * 3 + dc] = image.pixel(r + dr, c + dc);
                }
            }
            let patch = Patch3::new(levels)?;
            let init = encode_patch_phase(&patch);
            let (_, trace) = onn_run_traced(&init, &weights, config)?;
            for (cycle, state) in trace.iter().enumerate() {
                let stages: Vec<String> = state.stages().iter().map(|s| s.to_string()).collect();
                out.push_str(&format!("{r},{c},{},{}\n", cycle + 1, stages.join(",")));
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn mask_from_rendered(image: &GrayImage) -> BinaryGrid {
    let mid = image.max_value() / 2;
    BinaryGrid::from_data(
        image.width(),
        image.height(),
        image.pixels().iter().map(|&p| p <= mid).collect(),
    )
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Detect {
            input,
            backend,
            out,
            json,
            lut,
            binarize,
            trace,
        } => {
            let image = load_nine_level(&input, binarize)?;
            let weights = build_edge_ham();
            let backend = backend.build();
            let table = if lut {
                Some(build_bw_lut(&weights, &backend)?)
            } else {
                None
            };
            let map = scan_image(&image, &weights, &backend, table.as_ref())?;
            let (a, b, n, u) = map.counts();
            println!(
                "{}x{} windows: {a} edge-a, {b} edge-b, {n} no-edge, {u} unstable",
                map.width(),
                map.height()
            );
            if let Some(path) = &trace {
                match &backend {
                    Backend::PhaseOnn(config) => write_phase_trace(&image, config, path)?,
                    Backend::HnnEmulator { .. } => {
                        return Err(Error::InvalidParameter {
                            name: "trace",
                            reason: "tracing needs --backend phase".into(),
                        })
                    }
                }
            }
            if let Some(path) = &out {
                save_pgm(&render_edge_map(&map, &RenderStyle::default()), path)?;
            }
            if let Some(path) = &json {
                let edge_windows = (0..map.height())
                    .flat_map(|r| (0..map.width()).map(move |c| (r, c)))
                    .filter(|&(r, c)| map.class(r, c).is_edge())
                    .map(|(r, c)| WindowRecord {
                        row: r,
                        col: c,
                        class: map.class(r, c),
                    })
                    .collect();
                let report = DetectReport {
                    schema_version: SCHEMA_VERSION,
                    width: map.width(),
                    height: map.height(),
                    edge_a: a,
                    edge_b: b,
                    no_edge: n,
                    unstable: u,
                    edge_windows,
                };
                write_json(&report, path)?;
            }
            Ok(())
        }
        Command::Evalmap {
            out,
            square,
            gap,
            single_level,
        } => {
            let spec = match single_level {
                Some(level) => EvalMapSpec {
                    square_size: square,
                    gap,
                    ..EvalMapSpec::single_square(level)
                },
                None => EvalMapSpec {
                    square_size: square,
                    gap,
                    ..EvalMapSpec::default()
                },
            };
            let map = gen_eval_map(&spec)?;
            save_pgm(&map, &out)?;
            println!(
                "wrote {}x{} map to {}",
                map.width(),
                map.height(),
                out.display()
            );
            Ok(())
        }
        Command::Convert {
            input,
            out,
            binarize: do_binarize,
            threshold,
            quantize9: do_quantize,
            from_idx,
        } => {
            let mut image = match from_idx {
                Some(index) => {
                    let images = load_idx_images(&input)?;
                    images
                        .get(index)
                        .cloned()
                        .ok_or_else(|| Error::InvalidParameter {
                            name: "from_idx",
                            reason: format!("index {index} of {} images", images.len()),
                        })?
                }
                None => load_pgm(&input)?,
            };
            if do_binarize {
                image = binarize(&image, threshold)?;
            }
            if do_quantize {
                image = quantize9(&image)?;
            }
            save_pgm(&image, &out)?;
            Ok(())
        }
        Command::Lut { backend, json } => {
            let weights = build_edge_ham();
            let table = build_bw_lut(&weights, &backend.build())?;
            let count = |class: EdgeClass| table.entries().iter().filter(|&&e| e == class).count();
            println!(
                "512 entries: {} edge-a, {} edge-b, {} no-edge, {} unstable",
                count(EdgeClass::EdgeA),
                count(EdgeClass::EdgeB),
                count(EdgeClass::NoEdge),
                count(EdgeClass::Unstable)
            );
            if let Some(path) = &json {
                #[derive(Serialize)]
                struct LutReport<'a> {
                    schema_version: u32,
                    entries: &'a [EdgeClass],
                }
                write_json(
                    &LutReport {
                        schema_version: SCHEMA_VERSION,
                        entries: table.entries(),
                    },
                    path,
                )?;
            }
            Ok(())
        }
        Command::Profile { detector, json } => {
            let det = match detector {
                DetectorArg::OnnHnn => EdgeDetector::Onn(Backend::hnn()),
                DetectorArg::OnnPhase => EdgeDetector::Onn(Backend::phase()),
                DetectorArg::Sobel => EdgeDetector::Sobel {
                    threshold_fraction: onn_ham::filters::DEFAULT_SOBEL_THRESHOLD,
                },
                DetectorArg::Canny => EdgeDetector::Canny(CannyParams::default()),
            };
            let profile = gray_detection_profile(&det)?;
            let detected: Vec<u8> = (0..9u8).filter(|&l| profile.detected[l as usize]).collect();
            println!("detected square levels: {detected:?}");
            if let Some(path) = &json {
                #[derive(Serialize)]
                struct ProfileReport {
                    schema_version: u32,
                    detected: [bool; 9],
                }
                write_json(
                    &ProfileReport {
                        schema_version: SCHEMA_VERSION,
                        detected: profile.detected,
                    },
                    path,
                )?;
            }
            Ok(())
        }
        Command::Timing {
            width,
            height,
            parallel,
            fps,
            json,
        } => {
            let model = TimingModel {
                parallel_onns: parallel,
                ..TimingModel::default()
            };
            let seconds = estimate_processing_time(width, height, &model)?;
            println!("{width}x{height}: {:.1} ms", seconds * 1e3);
            let realtime = match fps {
                Some(f) => {
                    let side = max_realtime_size(f, &model)?;
                    match side {
                        Some(n) => println!("max real-time size at {f} fps: {n}x{n}"),
                        None => println!("no feasible size at {f} fps"),
                    }
                    side
                }
                None => None,
            };
            if let Some(path) = &json {
                #[derive(Serialize)]
                struct TimingReport {
                    schema_version: u32,
                    width: usize,
                    height: usize,
                    parallel_onns: u32,
                    seconds: f64,
                    max_realtime_size: Option<u32>,
                }
                write_json(
                    &TimingReport {
                        schema_version: SCHEMA_VERSION,
                        width,
                        height,
                        parallel_onns: parallel,
                        seconds,
                        max_realtime_size: realtime,
                    },
                    path,
                )?;
            }
            Ok(())
        }
        Command::Compare {
            candidate,
            reference,
            json,
        } => {
            let cand = mask_from_rendered(&load_pgm(&candidate)?);
            let refr = mask_from_rendered(&load_pgm(&reference)?);
            let report = compare_maps(&cand, &refr)?;
            println!(
                "precision {:.4}, recall {:.4}, f1 {:.4}",
                report.precision, report.recall, report.f1
            );
            if let Some(path) = &json {
                #[derive(Serialize)]
                struct CompareReport {
                    schema_version: u32,
                    #[serde(flatten)]
                    metrics: onn_ham::analysis::ComparisonReport,
                }
                write_json(
                    &CompareReport {
                        schema_version: SCHEMA_VERSION,
                        metrics: report,
                    },
                    path,
                )?;
            }
            Ok(())
        }
        Command::InspectWeights { json } => {
            let weights = build_edge_ham();
            for i in 0..weights.n() {
                let row: Vec<String> = weights.row(i).iter().map(|w| format!("{w:+.0}")).collect();
                println!("{}", row.join(" "));
            }
            if let Some(path) = &json {
                #[derive(Serialize)]
                struct WeightsReport<'a> {
                    schema_version: u32,
                    #[serde(flatten)]
                    weights: &'a onn_ham::WeightMatrix,
                }
                write_json(
                    &WeightsReport {
                        schema_version: SCHEMA_VERSION,
                        weights: &weights,
                    },
                    path,
                )?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ONNHAM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
