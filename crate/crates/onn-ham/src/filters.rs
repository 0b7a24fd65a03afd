//! Reference Sobel and Canny edge detectors.
//!
//! Convolution is valid-mode (no padding) so reference maps align
//! window-for-window with the ONN edge maps. Thresholds are expressed as
//! fractions of the full-scale magnitude, the response of a maximal-contrast
//! step, which makes the defaults independent of image depth.

use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, Grid};
use crate::imaging::GrayImage;

/// Slack for threshold comparisons: keeps exact-ratio boundary cases (for
/// instance a contrast exactly at the threshold fraction) from flipping on
/// float rounding.
const THRESHOLD_SLACK: f64 = 1e-6;

/// 3x3 convolution kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel(pub [[f64; 3]; 3]);

/// Horizontal-gradient Sobel kernel (responds to vertical boundaries).
pub const SOBEL_GX: Kernel = Kernel([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]]);

/// Vertical-gradient Sobel kernel (responds to horizontal boundaries).
pub const SOBEL_GY: Kernel = Kernel([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]]);

pub const DEFAULT_SOBEL_THRESHOLD: f64 = 0.5;

/// Gaussian smoothing and hysteresis parameters for Canny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub sigma: f64,
    /// Low hysteresis threshold, fraction of full-scale gradient magnitude.
    pub low: f64,
    /// High hysteresis threshold, fraction of full-scale gradient magnitude.
    pub high: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            sigma: 1.4,
            low: 0.10,
            high: 0.25,
        }
    }
}

impl CannyParams {
    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("{} must be positive", self.sigma),
            });
        }
        if !(0.0 < self.low && self.low < self.high && self.high <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "low/high",
                reason: format!("need 0 < low < high <= 1, got {}/{}", self.low, self.high),
            });
        }
        Ok(())
    }
}

fn image_to_grid(image: &GrayImage) -> Grid {
    Grid::from_data(
        image.width(),
        image.height(),
        image.pixels().iter().map(|&p| p as f64).collect(),
    )
}

fn convolve3_grid(grid: &Grid, kernel: &Kernel) -> Grid {
    let (w, h) = (grid.width(), grid.height());
    let mut out = Grid::zeros(w - 2, h - 2);
    for r in 0..h - 2 {
        for c in 0..w - 2 {
            let mut acc = 0.0;
            for (dr, krow) in kernel.0.iter().enumerate() {
                for (dc, &k) in krow.iter().enumerate() {
                    acc += k * grid.get(r + dr, c + dc);
                }
            }
            out.set(r, c, acc);
        }
    }
    out
}

/// Valid-mode correlation of a 3x3 kernel over the image; kernel row 0
/// aligns with the window's top row. Output is (W-2) x (H-2).
pub fn convolve3(image: &GrayImage, kernel: &Kernel) -> Result<Grid> {
    if image.width() < 3 || image.height() < 3 {
        return Err(Error::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            min: 3,
        });
    }
    Ok(convolve3_grid(&image_to_grid(image), kernel))
}

fn gradient_magnitude(gx: &Grid, gy: &Grid) -> Grid {
    let data = gx
        .data()
        .iter()
        .zip(gy.data())
        .map(|(x, y)| (x * x + y * y).sqrt())
        .collect();
    Grid::from_data(gx.width(), gx.height(), data)
}

/// Sobel gradient magnitude, valid mode.
pub fn sobel_magnitude(image: &GrayImage) -> Result<Grid> {
    let gx = convolve3(image, &SOBEL_GX)?;
    let gy = convolve3(image, &SOBEL_GY)?;
    Ok(gradient_magnitude(&gx, &gy))
}

/// Full-scale Sobel magnitude: the response of a maximal-contrast step.
pub fn sobel_full_scale(max_value: u8) -> f64 {
    4.0 * max_value as f64
}

/// Thresholded Sobel detector. Marks windows whose gradient magnitude
/// reaches `threshold_fraction` of full scale.
pub fn sobel_edges(image: &GrayImage, threshold_fraction: f64) -> Result<BinaryGrid> {
    if !(0.0 < threshold_fraction && threshold_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "threshold_fraction",
            reason: format!("{threshold_fraction} outside (0, 1]"),
        });
    }
    let mag = sobel_magnitude(image)?;
    let thr = threshold_fraction * sobel_full_scale(image.max_value()) - THRESHOLD_SLACK;
    Ok(BinaryGrid::from_data(
        mag.width(),
        mag.height(),
        mag.data().iter().map(|&m| m >= thr).collect(),
    ))
}

/// Thresholded Sobel with non-maximum suppression, so an ideal step marks a
/// single column instead of the two adjacent alignments plain [`sobel_edges`]
/// marks.
pub fn sobel_edges_thinned(image: &GrayImage, threshold_fraction: f64) -> Result<BinaryGrid> {
    if !(0.0 < threshold_fraction && threshold_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "threshold_fraction",
            reason: format!("{threshold_fraction} outside (0, 1]"),
        });
    }
    let gx = convolve3(image, &SOBEL_GX)?;
    let gy = convolve3(image, &SOBEL_GY)?;
    let mag = gradient_magnitude(&gx, &gy);
    let thinned = non_max_suppress(&mag, &gx, &gy);
    let thr = threshold_fraction * sobel_full_scale(image.max_value()) - THRESHOLD_SLACK;
    Ok(BinaryGrid::from_data(
        thinned.width(),
        thinned.height(),
        thinned.data().iter().map(|&m| m >= thr).collect(),
    ))
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|x| (-(x * x) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

fn reflect(idx: i64, len: usize) -> usize {
    let len = len as i64;
    let mut i = idx;
    if i < 0 {
        i = -i - 1;
    }
    if i >= len {
        i = 2 * len - i - 1;
    }
    i.clamp(0, len - 1) as usize
}

fn gaussian_blur_grid(grid: &Grid, sigma: f64) -> Grid {
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let (w, h) = (grid.width(), grid.height());
    // Horizontal pass.
    let mut tmp = Grid::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (ki, &kv) in kernel.iter().enumerate() {
                let src = reflect(c as i64 + ki as i64 - radius, w);
                acc += kv * grid.get(r, src);
            }
            tmp.set(r, c, acc);
        }
    }
    // Vertical pass.
    let mut out = Grid::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (ki, &kv) in kernel.iter().enumerate() {
                let src = reflect(r as i64 + ki as i64 - radius, h);
                acc += kv * tmp.get(src, c);
            }
            out.set(r, c, acc);
        }
    }
    out
}

/// Separable gaussian blur with reflected borders, rounded back to the
/// image's integer levels. Output has the same size and depth.
pub fn gaussian_blur(image: &GrayImage, sigma: f64) -> Result<GrayImage> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("{sigma} must be positive"),
        });
    }
    let blurred = gaussian_blur_grid(&image_to_grid(image), sigma);
    let max = image.max_value();
    let pixels = blurred
        .data()
        .iter()
        .map(|&v| v.round().clamp(0.0, max as f64) as u8)
        .collect();
    GrayImage::new(image.width(), image.height(), max, pixels)
}

/// Non-maximum suppression along the quantized gradient direction (4 bins).
/// Plateau ties keep the first pixel along the direction, so an ideal step
/// yields a single-pixel line. Returns the magnitude grid with suppressed
/// entries zeroed.
pub fn non_max_suppress(mag: &Grid, gx: &Grid, gy: &Grid) -> Grid {
    let (w, h) = (mag.width(), mag.height());
    let mut out = Grid::zeros(w, h);
    let sample = |r: i64, c: i64| -> f64 {
        if r < 0 || c < 0 || r >= h as i64 || c >= w as i64 {
            0.0
        } else {
            mag.get(r as usize, c as usize)
        }
    };
    for r in 0..h {
        for c in 0..w {
            let m = mag.get(r, c);
            if m == 0.0 {
                continue;
            }
            let angle = gy.get(r, c).atan2(gx.get(r, c)).to_degrees();
            let a = ((angle % 180.0) + 180.0) % 180.0;
            let (dr, dc) = if !(22.5..157.5).contains(&a) {
                (0i64, 1i64)
            } else if a < 67.5 {
                (1, 1)
            } else if a < 112.5 {
                (1, 0)
            } else {
                (1, -1)
            };
            let forward = sample(r as i64 + dr, c as i64 + dc);
            let backward = sample(r as i64 - dr, c as i64 - dc);
            // Non-strict against the forward neighbor, strict against the
            // backward one: a two-pixel plateau keeps exactly one pixel.
            if m >= forward && m > backward {
                out.set(r, c, m);
            }
        }
    }
    out
}

/// Canny detector: gaussian blur, Sobel gradients, non-maximum suppression,
/// hysteresis. Output grid is (W-2) x (H-2), aligned with [`sobel_edges`].
pub fn canny_edges(image: &GrayImage, params: &CannyParams) -> Result<BinaryGrid> {
    params.validate()?;
    if image.width() < 5 || image.height() < 5 {
        return Err(Error::ImageTooSmall {
            width: image.width(),
            height: image.height(),
            min: 5,
        });
    }
    let blurred = gaussian_blur_grid(&image_to_grid(image), params.sigma);
    let gx = convolve3_grid(&blurred, &SOBEL_GX);
    let gy = convolve3_grid(&blurred, &SOBEL_GY);
    let mag = gradient_magnitude(&gx, &gy);
    let suppressed = non_max_suppress(&mag, &gx, &gy);
    let full_scale = canny_full_scale(params.sigma, image.max_value());
    let high = params.high * full_scale - THRESHOLD_SLACK;
    let low = params.low * full_scale - THRESHOLD_SLACK;
    Ok(hysteresis(&suppressed, low, high))
}

/// Full-scale gradient magnitude for Canny: the peak Sobel response of a
/// maximal-contrast step after the same gaussian blur.
pub fn canny_full_scale(sigma: f64, max_value: u8) -> f64 {
    let radius = (3.0 * sigma).ceil() as usize;
    let w = 4 * radius + 16;
    let h = 2 * radius + 8;
    let mut step = Grid::zeros(w, h);
    for r in 0..h {
        for c in 0..w / 2 {
            step.set(r, c, max_value as f64);
        }
    }
    let blurred = gaussian_blur_grid(&step, sigma);
    let gx = convolve3_grid(&blurred, &SOBEL_GX);
    let gy = convolve3_grid(&blurred, &SOBEL_GY);
    gradient_magnitude(&gx, &gy).max_value()
}

fn hysteresis(suppressed: &Grid, low: f64, high: f64) -> BinaryGrid {
    let (w, h) = (suppressed.width(), suppressed.height());
    let mut out = BinaryGrid::new(w, h);
    let mut stack = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if suppressed.get(r, c) >= high && !out.get(r, c) {
                out.set(r, c, true);
                stack.push((r, c));
                while let Some((sr, sc)) = stack.pop() {
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            let (nr, nc) = (sr as i64 + dr, sc as i64 + dc);
                            if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                                continue;
                            }
                            let (nr, nc) = (nr as usize, nc as usize);
                            if !out.get(nr, nc) && suppressed.get(nr, nc) >= low {
                                out.set(nr, nc, true);
                                stack.push((nr, nc));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
