//! Evaluation helpers: detector-agnostic edge masks, gray-level detection
//! profiles, map comparison metrics, and the processing-time model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::{canny_edges, sobel_edges, CannyParams};
use crate::grid::BinaryGrid;
use crate::ham::build_edge_ham;
use crate::imaging::GrayImage;
use crate::imaging::{gen_eval_map, EvalMapSpec};
use crate::pipeline::{scan_image, Backend};

/// One of the detectors under comparison, reduced to a common
/// edge/no-edge mask interface.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeDetector {
    Onn(Backend),
    Sobel { threshold_fraction: f64 },
    Canny(CannyParams),
}

impl EdgeDetector {
    /// Edge mask over all 3x3 windows, (W-2) x (H-2) for every variant.
    /// The ONN variants require a 9-level image.
    pub fn edge_mask(&self, image: &GrayImage) -> Result<BinaryGrid> {
        match self {
            EdgeDetector::Onn(backend) => {
                let weights = build_edge_ham();
                Ok(scan_image(image, &weights, backend, None)?.edge_mask())
            }
            EdgeDetector::Sobel { threshold_fraction } => sobel_edges(image, *threshold_fraction),
            EdgeDetector::Canny(params) => canny_edges(image, params),
        }
    }
}

/// Which square gray levels a detector finds against the white background.
/// Level 8 is the invisible square and can never be detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DetectionProfile {
    pub detected: [bool; 9],
}

impl DetectionProfile {
    pub fn detected_count(&self) -> usize {
        self.detected.iter().filter(|&&d| d).count()
    }

    /// Highest square level still detected.
    pub fn max_detected_level(&self) -> Option<u8> {
        (0..9u8).rev().find(|&l| self.detected[l as usize])
    }
}

/// Runs the detector on a single-square map for every square level and
/// records whether any window fires.
pub fn gray_detection_profile(detector: &EdgeDetector) -> Result<DetectionProfile> {
    let mut detected = [false; 9];
    for level in 0..=8u8 {
        let map = gen_eval_map(&EvalMapSpec::single_square(level))?;
        detected[level as usize] = detector.edge_mask(&map)?.count() > 0;
    }
    Ok(DetectionProfile { detected })
}

/// Ratio of marked windows in `candidate` to marked windows in the
/// single-pixel `reference`; 2.0 means every boundary is marked twice.
pub fn double_detection_ratio(candidate: &BinaryGrid, reference: &BinaryGrid) -> Result<f64> {
    if candidate.width() != reference.width() || candidate.height() != reference.height() {
        return Err(Error::DimensionMismatch {
            expected: reference.width() * reference.height(),
            got: candidate.width() * candidate.height(),
        });
    }
    if reference.count() == 0 {
        return Err(Error::EmptyReference);
    }
    Ok(candidate.count() as f64 / reference.count() as f64)
}

/// Pixel-wise agreement between a candidate mask and a reference mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Confusion counts and precision/recall/F1. Empty denominators score 1.0
/// (an empty candidate makes no false claims).
pub fn compare_maps(candidate: &BinaryGrid, reference: &BinaryGrid) -> Result<ComparisonReport> {
    if candidate.width() != reference.width() || candidate.height() != reference.height() {
        return Err(Error::DimensionMismatch {
            expected: reference.width() * reference.height(),
            got: candidate.width() * candidate.height(),
        });
    }
    let (mut tp, mut fp, mut fna, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for (&c, &r) in candidate.data().iter().zip(reference.data()) {
        match (c, r) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fna += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fna);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(ComparisonReport {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fna,
        true_negatives: tn,
        precision,
        recall,
        f1,
    })
}

/// Per-window cost model for a hardware scan: init plus compute time for
/// each 3x3 window, divided across parallel network instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingModel {
    pub t_init_s: f64,
    pub t_compute_s: f64,
    pub parallel_onns: u32,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self {
            t_init_s: 240e-9,
            t_compute_s: 2e-6,
            parallel_onns: 1,
        }
    }
}

impl TimingModel {
    fn validate(&self) -> Result<()> {
        if self.parallel_onns == 0 {
            return Err(Error::InvalidParameter {
                name: "parallel_onns",
                reason: "0 network instances".into(),
            });
        }
        if !(self.t_init_s >= 0.0 && self.t_compute_s > 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_init_s/t_compute_s",
                reason: format!("{}/{}", self.t_init_s, self.t_compute_s),
            });
        }
        Ok(())
    }

    fn window_time_s(&self) -> f64 {
        self.t_init_s + self.t_compute_s
    }
}

/// Seconds to scan a width x height image, stride 1, no padding.
pub fn estimate_processing_time(width: usize, height: usize, model: &TimingModel) -> Result<f64> {
    model.validate()?;
    if width < 3 || height < 3 {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: 3,
        });
    }
    let windows = ((width - 2) * (height - 2)) as f64;
    Ok(windows * model.window_time_s() / model.parallel_onns as f64)
}

/// Largest square image side that still scans within one frame at
/// `fps`. `None` when even a 3x3 image is too slow.
pub fn max_realtime_size(fps: f64, model: &TimingModel) -> Result<Option<u32>> {
    model.validate()?;
    if !(fps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "fps",
            reason: format!("{fps} must be positive"),
        });
    }
    let budget = 1.0 / fps;
    let windows = budget * model.parallel_onns as f64 / model.window_time_s();
    let side = windows.sqrt().floor() as i64 + 2;
    if side < 3 {
        return Ok(None);
    }
    Ok(Some(side as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::DEFAULT_SOBEL_THRESHOLD;

    #[test]
    fn onn_and_sobel_masks_share_geometry() {
        let map = gen_eval_map(&EvalMapSpec::single_square(0)).unwrap();
        let onn = EdgeDetector::Onn(Backend::hnn()).edge_mask(&map).unwrap();
        let sobel = EdgeDetector::Sobel {
            threshold_fraction: DEFAULT_SOBEL_THRESHOLD,
        }
        .edge_mask(&map)
        .unwrap();
        assert_eq!((onn.width(), onn.height()), (54, 54));
        assert_eq!((sobel.width(), sobel.height()), (54, 54));
        assert!(onn.count() > 0);
        assert!(sobel.count() > 0);
    }

    #[test]
    fn profile_black_square_always_detected() {
        for det in [
            EdgeDetector::Onn(Backend::hnn()),
            EdgeDetector::Sobel {
                threshold_fraction: DEFAULT_SOBEL_THRESHOLD,
            },
            EdgeDetector::Canny(CannyParams::default()),
        ] {
            let p = gray_detection_profile(&det).unwrap();
            assert!(p.detected[0], "{det:?}");
            assert!(!p.detected[8], "{det:?}");
        }
    }

    #[test]
    fn ratio_counts_marks() {
        let a = BinaryGrid::from_data(2, 2, vec![true, true, true, true]);
        let b = BinaryGrid::from_data(2, 2, vec![true, false, true, false]);
        assert_eq!(double_detection_ratio(&a, &b).unwrap(), 2.0);
        let empty = BinaryGrid::new(2, 2);
        assert!(matches!(
            double_detection_ratio(&a, &empty),
            Err(Error::EmptyReference)
        ));
    }

    #[test]
    fn comparison_metrics() {
        let cand = BinaryGrid::from_data(2, 2, vec![true, true, false, false]);
        let refr = BinaryGrid::from_data(2, 2, vec![true, false, true, false]);
        let rep = compare_maps(&cand, &refr).unwrap();
        assert_eq!(rep.true_positives, 1);
        assert_eq!(rep.false_positives, 1);
        assert_eq!(rep.false_negatives, 1);
        assert_eq!(rep.true_negatives, 1);
        assert_eq!(rep.precision, 0.5);
        assert_eq!(rep.recall, 0.5);
        assert_eq!(rep.f1, 0.5);
    }

    #[test]
    fn empty_candidate_has_unit_precision() {
        let cand = BinaryGrid::new(3, 3);
        let refr = BinaryGrid::from_data(3, 3, vec![true; 9]);
        let rep = compare_maps(&cand, &refr).unwrap();
        assert_eq!(rep.precision, 1.0);
        assert_eq!(rep.recall, 0.0);
    }

    #[test]
    fn processing_time_scales_with_windows() {
        let model = TimingModel::default();
        let t = estimate_processing_time(28, 28, &model).unwrap();
        assert!((t - 676.0 * 2.24e-6).abs() < 1e-12);
        let par = TimingModel {
            parallel_onns: 4,
            ..model
        };
        assert_eq!(estimate_processing_time(28, 28, &par).unwrap(), t / 4.0);
        assert!(matches!(
            estimate_processing_time(2, 28, &model),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn realtime_size_inverts_time_estimate() {
        let model = TimingModel::default();
        let n = max_realtime_size(30.0, &model).unwrap().unwrap();
        let fits = estimate_processing_time(n as usize, n as usize, &model).unwrap();
        assert!(fits <= 1.0 / 30.0);
        let too_big = estimate_processing_time(n as usize + 1, n as usize + 1, &model).unwrap();
        assert!(too_big > 1.0 / 30.0);
    }

    #[test]
    fn realtime_size_none_when_hopeless() {
        let model = TimingModel {
            t_compute_s: 10.0,
            ..TimingModel::default()
        };
        assert_eq!(max_realtime_size(30.0, &model).unwrap(), None);
    }
}
