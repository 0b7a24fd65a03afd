//! Full-image edge detection with the ONN-HAM network: patch encoding,
//! backend dispatch, output decoding, stride-1 scanning, and the 512-entry
//! black/white lookup-table fast path.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::BinaryGrid;
use crate::ham::WeightMatrix;
use crate::hnn::{self, BipolarState, HnnOutcomeKind};
use crate::imaging::GrayImage;
use crate::phase::{self, OnnConfig, PhaseOutcomeKind, PhaseState};

/// Per-window classification. `Unstable` is kept for analysis and collapses
/// to `NoEdge` for rendering and backend comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeClass {
    EdgeA,
    EdgeB,
    NoEdge,
    Unstable,
}

impl EdgeClass {
    /// Folds the unstable category into no-edge.
    pub fn collapsed(self) -> EdgeClass {
        match self {
            EdgeClass::Unstable => EdgeClass::NoEdge,
            other => other,
        }
    }

    pub fn is_edge(self) -> bool {
        matches!(self, EdgeClass::EdgeA | EdgeClass::EdgeB)
    }
}

/// Backend selector with its configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    HnnEmulator { max_sweeps: usize },
    PhaseOnn(OnnConfig),
}

impl Backend {
    pub fn hnn() -> Self {
        Backend::HnnEmulator {
            max_sweeps: hnn::DEFAULT_MAX_SWEEPS,
        }
    }

    pub fn phase() -> Self {
        Backend::PhaseOnn(OnnConfig::default())
    }
}

/// A 3x3 patch of gray levels 0..=8, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Patch3 {
    levels: [u8; 9],
}

impl Patch3 {
    pub fn new(levels: [u8; 9]) -> Result<Self> {
        for &l in &levels {
            if l > 8 {
                return Err(Error::LevelOutOfRange(l as i64));
            }
        }
        Ok(Self { levels })
    }

    /// Decodes a 9-bit black/white code: bit i set means pixel i is white
    /// (level 8), row-major.
    pub fn from_bw_code(code: u16) -> Self {
        let mut levels = [0u8; 9];
        for (i, l) in levels.iter_mut().enumerate() {
            if code >> i & 1 == 1 {
                *l = 8;
            }
        }
        Self { levels }
    }

    /// The 9-bit code of a binary patch; `None` if any level is not 0 or 8.
    pub fn bw_code(&self) -> Option<u16> {
        let mut code = 0u16;
        for (i, &l) in self.levels.iter().enumerate() {
            match l {
                8 => code |= 1 << i,
                0 => {}
                _ => return None,
            }
        }
        Some(code)
    }

    pub fn levels(&self) -> &[u8; 9] {
        &self.levels
    }
}

/// Initial Hopfield state for a patch: inputs at level/4 - 1, outputs at the
/// neutral pair (-1, +1).
pub fn encode_patch_hnn(patch: &Patch3) -> BipolarState {
    let mut values: Vec<f64> = patch.levels.iter().map(|&l| l as f64 / 4.0 - 1.0).collect();
    values.extend([-1.0, 1.0]);
    BipolarState::new(values).expect("levels validated")
}

/// Initial phase state for a patch: inputs at stage 8 - level, outputs at
/// the neutral pair (stage 8, stage 0).
pub fn encode_patch_phase(patch: &Patch3) -> PhaseState {
    let mut stages: Vec<u8> = patch.levels.iter().map(|&l| 8 - l).collect();
    stages.extend([8, 0]);
    PhaseState::new(stages).expect("levels validated")
}

/// Classifies a terminal Hopfield outcome by its two output neurons.
pub fn decode_hnn(outcome: &hnn::HnnOutcome) -> EdgeClass {
    let s = outcome.final_state.values();
    let (a, b) = (s[s.len() - 2], s[s.len() - 1]);
    match outcome.kind {
        HnnOutcomeKind::FixedPoint if a == 1.0 && b == 1.0 => EdgeClass::EdgeA,
        HnnOutcomeKind::FixedPoint if a == -1.0 && b == -1.0 => EdgeClass::EdgeB,
        HnnOutcomeKind::FixedPoint | HnnOutcomeKind::Cycle2 => EdgeClass::NoEdge,
        HnnOutcomeKind::NonConvergent => EdgeClass::Unstable,
    }
}

/// Classifies a terminal phase outcome: output stages in {0, 1} mean one
/// edge class, {7, 8} the other.
pub fn decode_phase(outcome: &phase::PhaseOutcome) -> EdgeClass {
    let s = outcome.final_stages.stages();
    let (a, b) = (s[s.len() - 2], s[s.len() - 1]);
    match outcome.kind {
        PhaseOutcomeKind::Stable if a <= 1 && b <= 1 => EdgeClass::EdgeA,
        PhaseOutcomeKind::Stable if a >= 7 && b >= 7 => EdgeClass::EdgeB,
        PhaseOutcomeKind::Stable => EdgeClass::NoEdge,
        PhaseOutcomeKind::Unstable => EdgeClass::Unstable,
    }
}

fn check_edge_network(weights: &WeightMatrix) -> Result<()> {
    if weights.n() != 11 || weights.n_in() != 9 {
        return Err(Error::DimensionMismatch {
            expected: 11,
            got: weights.n(),
        });
    }
    Ok(())
}

/// Runs one patch through the chosen backend and decodes the class.
pub fn detect_patch(
    patch: &Patch3,
    weights: &WeightMatrix,
    backend: &Backend,
) -> Result<EdgeClass> {
    check_edge_network(weights)?;
    match backend {
        Backend::HnnEmulator { max_sweeps } => {
            let init = encode_patch_hnn(patch);
            let outcome = hnn::hnn_run(&init, weights, *max_sweeps)?;
            Ok(decode_hnn(&outcome))
        }
        Backend::PhaseOnn(config) => {
            let init = encode_patch_phase(patch);
            let outcome = phase::onn_run(&init, weights, config)?;
            Ok(decode_phase(&outcome))
        }
    }
}

/// Per-window classification grid, (W-2) x (H-2), top-left registration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    classes: Vec<EdgeClass>,
}

impl EdgeMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn class(&self, row: usize, col: usize) -> EdgeClass {
        self.classes[row * self.width + col]
    }

    pub fn classes(&self) -> &[EdgeClass] {
        &self.classes
    }

    /// Counts per class: (EdgeA, EdgeB, NoEdge, Unstable).
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        let mut c = (0, 0, 0, 0);
        for class in &self.classes {
            match class {
                EdgeClass::EdgeA => c.0 += 1,
                EdgeClass::EdgeB => c.1 += 1,
                EdgeClass::NoEdge => c.2 += 1,
                EdgeClass::Unstable => c.3 += 1,
            }
        }
        c
    }

    pub fn edge_count(&self) -> usize {
        self.classes.iter().filter(|c| c.is_edge()).count()
    }

    /// Edge/no-edge mask with both edge classes merged.
    pub fn edge_mask(&self) -> BinaryGrid {
        BinaryGrid::from_data(
            self.width,
            self.height,
            self.classes.iter().map(|c| c.is_edge()).collect(),
        )
    }
}

/// 512-entry lookup table over all black/white 3x3 patches, indexed by the
/// 9-bit patch code (bit i set = pixel i white, row-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwLut {
    entries: Vec<EdgeClass>,
}

impl BwLut {
    pub fn entry(&self, code: u16) -> EdgeClass {
        self.entries[code as usize]
    }

    pub fn entries(&self) -> &[EdgeClass] {
        &self.entries
    }
}

/// Evaluates every black/white patch through the backend.
pub fn build_bw_lut(weights: &WeightMatrix, backend: &Backend) -> Result<BwLut> {
    check_edge_network(weights)?;
    let entries = (0u16..512)
        .map(|code| detect_patch(&Patch3::from_bw_code(code), weights, backend))
        .collect::<Result<Vec<_>>>()?;
    Ok(BwLut { entries })
}

fn window_patch(image: &GrayImage, row: usize, col: usize) -> Patch3 {
    let mut levels = [0u8; 9];
    for dr in 0..3 {
        for dc in 0..3 {
            levels[dr * 3 + dc] = image.pixel(row + dr, col + dc);
        }
    }
    Patch3 { levels }
}

/// Scans every 3x3 window with stride 1 and no padding. The image must be
/// quantized to 9 levels; with a LUT it must additionally be binary
/// (levels 0 and 8 only). The LUT path is bit-exact with direct evaluation.
pub fn scan_image(
    image: &GrayImage,
    weights: &WeightMatrix,
    backend: &Backend,
    lut: Option<&BwLut>,
) -> Result<EdgeMap> {
    check_edge_network(weights)?;
    if !image.is_nine_level() {
        return Err(Error::NotNineLevel(image.max_value()));
    }
    if image.width() < 3 || image.height() < 3 {
        return Err(Error::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            min: 3,
        });
    }
    if lut.is_some() && image.pixels().iter().any(|&p| p != 0 && p != 8) {
        return Err(Error::NotBinary);
    }
    let (out_w, out_h) = (image.width() - 2, image.height() - 2);
    let rows: Vec<Vec<EdgeClass>> = (0..out_h)
        .into_par_iter()
        .map(|r| {
            (0..out_w)
                .map(|c| {
                    let patch = window_patch(image, r, c);
                    match lut {
                        Some(table) => {
                            let code = patch.bw_code().expect("binary checked above");
                            Ok(table.entry(code))
                        }
                        None => detect_patch(&patch, weights, backend),
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeMap {
        width: out_w,
        height: out_h,
        classes: rows.into_iter().flatten().collect(),
    })
}

/// Pixel values used when rendering an edge map back to an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderStyle {
    pub edge_value: u8,
    pub background_value: u8,
    /// Render unstable windows as edges too (off by default).
    pub include_unstable: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            edge_value: 0,
            background_value: 255,
            include_unstable: false,
        }
    }
}

/// Renders the edge map: both edge classes map to `edge_value`, everything
/// else to `background_value`.
pub fn render_edge_map(map: &EdgeMap, style: &RenderStyle) -> GrayImage {
    let pixels = map
        .classes
        .iter()
        .map(|&c| {
            let edge = c.is_edge() || (style.include_unstable && c == EdgeClass::Unstable);
            if edge {
                style.edge_value
            } else {
                style.background_value
            }
        })
        .collect();
    GrayImage::new(map.width, map.height, 255, pixels).expect("map dimensions are valid")
}
