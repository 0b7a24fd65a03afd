//! End-to-end acceptance suite. One test per criterion; each prints a
//! PASS line once its assertions hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use onn_ham::analysis::{
    double_detection_ratio, estimate_processing_time, gray_detection_profile, max_realtime_size,
    EdgeDetector, TimingModel,
};
use onn_ham::filters::{sobel_edges_thinned, CannyParams, DEFAULT_SOBEL_THRESHOLD};
use onn_ham::ham::{build_edge_ham, EDGE_INPUT_WEIGHTS};
use onn_ham::imaging::{
    gen_eval_map, load_idx_images, load_pgm, quantize9, save_idx_images, save_pgm, EvalMapSpec,
};
use onn_ham::phase::{onn_run, OnnConfig};
use onn_ham::pipeline::{
    build_bw_lut, detect_patch, encode_patch_phase, scan_image, Backend, EdgeClass, Patch3,
};
use onn_ham::GrayImage;

fn oracle_class(levels: &[u8; 9]) -> EdgeClass {
    let s: f64 = levels
        .iter()
        .zip(EDGE_INPUT_WEIGHTS)
        .map(|(&l, w)| (l as f64 / 4.0 - 1.0) * w)
        .sum();
    if s >= 2.0 {
        EdgeClass::EdgeA
    } else if s <= -2.0 {
        EdgeClass::EdgeB
    } else {
        EdgeClass::NoEdge
    }
}

fn random_levels(rng: &mut ChaCha8Rng) -> [u8; 9] {
    let mut levels = [0u8; 9];
    for l in &mut levels {
        *l = rng.gen_range(0..=8);
    }
    levels
}

fn random_binary_image(rng: &mut ChaCha8Rng, width: usize, height: usize) -> GrayImage {
    let pixels = (0..width * height)
        .map(|_| if rng.gen_bool(0.5) { 8u8 } else { 0 })
        .collect();
    GrayImage::new(width, height, 8, pixels).unwrap()
}

fn vertical_boundary_image(width: usize, height: usize) -> GrayImage {
    let pixels = (0..height)
        .flat_map(|_| (0..width).map(move |c| if c < width / 2 { 8u8 } else { 0 }))
        .collect();
    GrayImage::new(width, height, 8, pixels).unwrap()
}

#[test]
fn criterion_01_weight_reconstruction() {
    let w = build_edge_ham();
    assert_eq!(w.n(), 11);
    assert_eq!(w.n_in(), 9);
    for (i, &wi) in EDGE_INPUT_WEIGHTS.iter().enumerate() {
        assert_eq!(w.get(i, 9), wi);
        assert_eq!(w.get(i, 10), wi);
        for j in 0..9 {
            assert_eq!(w.get(i, j), 0.0);
        }
    }
    assert_eq!(w.get(9, 10), 2.0);
    for i in 0..11 {
        assert_eq!(w.get(i, i), 0.0);
        for j in 0..11 {
            assert_eq!(w.get(i, j), w.get(j, i));
        }
    }
    println!("criterion 1 (weight reconstruction): PASS");
}

#[test]
fn criterion_02_closed_form_dynamics_oracle() {
    let w = build_edge_ham();
    let backend = Backend::hnn();
    for code in 0u16..512 {
        let patch = Patch3::from_bw_code(code);
        let got = detect_patch(&patch, &w, &backend).unwrap();
        assert_eq!(got, oracle_class(patch.levels()), "code {code}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xED6E);
    for trial in 0..10_000 {
        let levels = random_levels(&mut rng);
        let patch = Patch3::new(levels).unwrap();
        let got = detect_patch(&patch, &w, &backend).unwrap();
        assert_eq!(got, oracle_class(&levels), "trial {trial}: {levels:?}");
    }
    println!("criterion 2 (closed-form dynamics oracle): PASS");
}

#[test]
fn criterion_03_backend_black_white_equivalence() {
    let w = build_edge_ham();
    let hnn = build_bw_lut(&w, &Backend::hnn()).unwrap();
    let phase = build_bw_lut(&w, &Backend::phase()).unwrap();
    for code in 0u16..512 {
        assert_eq!(
            hnn.entry(code).collapsed(),
            phase.entry(code).collapsed(),
            "code {code}"
        );
    }
    println!("criterion 3 (backend black/white equivalence): PASS");
}

#[test]
fn criterion_04_gray_level_profiles() {
    let cases: [(&str, EdgeDetector, u8); 3] = [
        ("hnn", EdgeDetector::Onn(Backend::hnn()), 6),
        (
            "sobel",
            EdgeDetector::Sobel {
                threshold_fraction: DEFAULT_SOBEL_THRESHOLD,
            },
            4,
        ),
        ("canny", EdgeDetector::Canny(CannyParams::default()), 6),
    ];
    for (name, det, max_level) in cases {
        let profile = gray_detection_profile(&det).unwrap();
        for level in 0..9u8 {
            assert_eq!(
                profile.detected[level as usize],
                level <= max_level,
                "{name} at level {level}"
            );
        }
    }
    println!("criterion 4 (gray-level detection profiles): PASS");
}

#[test]
fn criterion_05_gray_sensitivity_ordering() {
    let w = build_edge_ham();
    let map = gen_eval_map(&EvalMapSpec::default()).unwrap();
    let hnn_count = scan_image(&map, &w, &Backend::hnn(), None)
        .unwrap()
        .edge_count();
    let phase_count = scan_image(&map, &w, &Backend::phase(), None)
        .unwrap()
        .edge_count();
    assert!(
        phase_count <= hnn_count,
        "phase {phase_count} > hnn {hnn_count}"
    );
    if phase_count == hnn_count {
        let binary = gen_eval_map(&EvalMapSpec::single_square(0)).unwrap();
        let h = scan_image(&binary, &w, &Backend::hnn(), None)
            .unwrap()
            .edge_count();
        let p = scan_image(&binary, &w, &Backend::phase(), None)
            .unwrap()
            .edge_count();
        assert_eq!(h, p, "equality on gray map without binary equality");
    }
    println!("criterion 5 (gray sensitivity ordering): PASS");
}

#[test]
fn criterion_06_double_detection() {
    let w = build_edge_ham();
    let img = vertical_boundary_image(20, 12);
    for backend in [Backend::hnn(), Backend::phase()] {
        let map = scan_image(&img, &w, &backend, None).unwrap();
        let mask = map.edge_mask();
        let marked: Vec<usize> = (0..mask.width())
            .filter(|&c| (0..mask.height()).any(|r| mask.get(r, c)))
            .collect();
        assert_eq!(marked.len(), 2, "{backend:?}: columns {marked:?}");
        assert_eq!(marked[1], marked[0] + 1, "{backend:?}: not adjacent");
        for r in 0..mask.height() {
            for c in 0..mask.width() {
                assert_eq!(mask.get(r, c), marked.contains(&c), "{backend:?}");
            }
        }
        let reference = sobel_edges_thinned(&img, DEFAULT_SOBEL_THRESHOLD).unwrap();
        let ratio = double_detection_ratio(&mask, &reference).unwrap();
        assert_eq!(ratio, 2.0, "{backend:?}");
    }
    println!("criterion 6 (double detection, ratio 2.0): PASS");
}

#[test]
fn criterion_07_convergence_cycle_bounds() {
    let w = build_edge_ham();
    let config = OnnConfig::default();
    for code in 0u16..512 {
        let patch = Patch3::from_bw_code(code);
        let out = onn_run(&encode_patch_phase(&patch), &w, &config).unwrap();
        let class = onn_ham::pipeline::decode_phase(&out);
        if class.is_edge() {
            assert!(
                (2..=5).contains(&out.cycles),
                "code {code}: {} cycles",
                out.cycles
            );
        }
    }
    for uniform in [0u16, 511] {
        let patch = Patch3::from_bw_code(uniform);
        let out = onn_run(&encode_patch_phase(&patch), &w, &config).unwrap();
        assert_eq!(
            onn_ham::pipeline::decode_phase(&out),
            EdgeClass::Unstable,
            "code {uniform}"
        );
        assert_eq!(out.cycles, 10, "code {uniform}");
    }
    println!("criterion 7 (convergence cycle bounds): PASS");
}

#[test]
fn criterion_08_timing_table_reproduction() {
    let model = TimingModel::default();
    let table_ms = [
        (28usize, 1.5f64),
        (50, 5.2),
        (120, 31.9),
        (128, 35.6),
        (512, 582.6),
    ];
    for (side, expect_ms) in table_ms {
        let got_ms = estimate_processing_time(side, side, &model).unwrap() * 1e3;
        let rel = (got_ms - expect_ms).abs() / expect_ms;
        assert!(rel <= 0.03, "{side}: {got_ms:.3} ms vs {expect_ms} ms");
    }
    let par20 = TimingModel {
        parallel_onns: 20,
        ..model
    };
    let got_ms = estimate_processing_time(512, 512, &par20).unwrap() * 1e3;
    assert!(
        ((got_ms - 30.0) / 30.0).abs() <= 0.03,
        "parallel 20: {got_ms:.3} ms"
    );
    let side = max_realtime_size(30.0, &model).unwrap().unwrap();
    assert!(side >= 120, "real-time side {side}");
    println!("criterion 8 (timing table reproduction): PASS");
}

#[test]
fn criterion_09_pipeline_laws() {
    let w = build_edge_ham();
    let backend = Backend::hnn();
    let lut = build_bw_lut(&w, &backend).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB17);
    for trial in 0..100 {
        let width = rng.gen_range(3..=24);
        let height = rng.gen_range(3..=24);
        let img = random_binary_image(&mut rng, width, height);
        let direct = scan_image(&img, &w, &backend, None).unwrap();
        let fast = scan_image(&img, &w, &backend, Some(&lut)).unwrap();
        assert_eq!(direct, fast, "trial {trial}");
    }
    for side in 3..=64usize {
        let img = random_binary_image(&mut rng, side, side);
        let map = scan_image(&img, &w, &backend, None).unwrap();
        assert_eq!((map.width(), map.height()), (side - 2, side - 2));
    }
    for trial in 0..20 {
        let img = {
            let pixels: Vec<u8> = (0..12 * 12).map(|_| rng.gen_range(0..=8)).collect();
            GrayImage::new(12, 12, 8, pixels).unwrap()
        };
        let inverted =
            GrayImage::new(12, 12, 8, img.pixels().iter().map(|&p| 8 - p).collect()).unwrap();
        let (a, b, n, u) = scan_image(&img, &w, &backend, None).unwrap().counts();
        let (ia, ib, inn, iu) = scan_image(&inverted, &w, &backend, None).unwrap().counts();
        assert_eq!((a, b, n, u), (ib, ia, inn, iu), "trial {trial}");
    }
    println!("criterion 9 (pipeline laws): PASS");
}

#[test]
fn criterion_10_io_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x10);
    for trial in 0..25 {
        let width = rng.gen_range(1..=40);
        let height = rng.gen_range(1..=40);
        let pixels: Vec<u8> = (0..width * height).map(|_| rng.gen()).collect();
        let img = GrayImage::new(width, height, 255, pixels).unwrap();
        let path = dir.path().join(format!("t{trial}.pgm"));
        save_pgm(&img, &path).unwrap();
        assert_eq!(load_pgm(&path).unwrap(), img, "trial {trial}");
    }
    let images: Vec<GrayImage> = (0..5)
        .map(|_| {
            let pixels: Vec<u8> = (0..28 * 28).map(|_| rng.gen()).collect();
            GrayImage::new(28, 28, 255, pixels).unwrap()
        })
        .collect();
    let idx_path = dir.path().join("set.idx3");
    save_idx_images(&images, &idx_path).unwrap();
    assert_eq!(load_idx_images(&idx_path).unwrap(), images);
    let endpoints = GrayImage::new(3, 1, 255, vec![0, 100, 255]).unwrap();
    assert_eq!(quantize9(&endpoints).unwrap().pixels(), &[0, 3, 8]);
    let ramp = GrayImage::new(256, 1, 255, (0..=255).collect()).unwrap();
    let q = quantize9(&ramp).unwrap();
    for i in 1..256 {
        assert!(q.pixels()[i - 1] <= q.pixels()[i]);
    }
    println!("criterion 10 (I/O round-trips): PASS");
}
