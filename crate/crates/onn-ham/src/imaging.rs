//! Image container, PGM and IDX I/O, quantization, and evaluation-map
//! synthesis.
//!
//! PGM (P2/P5, maxval <= 255) is the canonical on-disk format; saving always
//! emits P5. The declared max value doubles as the depth marker: 255 for
//! 256-level images, 8 for 9-level quantized images.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// 2-D grid of integer gray levels, row-major, with a declared maximum
/// value. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    max_value: u8,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, max_value: u8, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero dimension".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "pixel count {} does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        if let Some(&p) = pixels.iter().find(|&&p| p > max_value) {
            return Err(Error::InvalidImage(format!(
                "pixel value {p} exceeds declared max {max_value}"
            )));
        }
        Ok(Self {
            width,
            height,
            max_value,
            pixels,
        })
    }

    pub fn uniform(width: usize, height: usize, max_value: u8, value: u8) -> Result<Self> {
        Self::new(width, height, max_value, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn max_value(&self) -> u8 {
        self.max_value
    }

    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// True when every pixel is either 0 or the declared max.
    pub fn is_binary(&self) -> bool {
        self.pixels.iter().all(|&p| p == 0 || p == self.max_value)
    }

    pub fn is_nine_level(&self) -> bool {
        self.max_value == 8
    }
}

fn read_pgm_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    // Skip whitespace and '#' comments.
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::MalformedPgm("unexpected end of header".into()));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32> {
    let tok = read_pgm_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| Error::MalformedPgm(format!("bad {what}: {tok:?}")))
}

/// Loads a P2 (ASCII) or P5 (binary) PGM with maxval <= 255.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let magic = read_pgm_token(&bytes, &mut pos)?;
    if magic != "P2" && magic != "P5" {
        return Err(Error::MalformedPgm(format!("bad magic {magic:?}")));
    }
    let width = parse_header_number(&bytes, &mut pos, "width")? as usize;
    let height = parse_header_number(&bytes, &mut pos, "height")? as usize;
    let maxval = parse_header_number(&bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedPgmDepth(maxval));
    }
    let count = width * height;
    let pixels = if magic == "P5" {
        // Exactly one whitespace byte separates the header from the payload.
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(Error::MalformedPgm("missing header terminator".into()));
        }
        pos += 1;
        if bytes.len() < pos + count {
            return Err(Error::MalformedPgm(format!(
                "truncated payload: need {count} bytes, have {}",
                bytes.len() - pos
            )));
        }
        bytes[pos..pos + count].to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v = parse_header_number(&bytes, &mut pos, "pixel")?;
            if v > 255 {
                return Err(Error::MalformedPgm(format!("pixel {v} out of range")));
            }
            pixels.push(v as u8);
        }
        pixels
    };
    if pixels.iter().any(|&p| p as u32 > maxval) {
        return Err(Error::MalformedPgm("pixel exceeds maxval".into()));
    }
    GrayImage::new(width, height, maxval as u8, pixels)
}

/// Saves as binary P5.
pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(
        out,
        "P5\n{} {}\n{}\n",
        image.width, image.height, image.max_value
    )?;
    out.write_all(&image.pixels)?;
    out.flush()?;
    Ok(())
}

const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;

fn read_be_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::MalformedIdx("truncated header".into()))?;
    Ok(u32::from_be_bytes(buf))
}

/// Loads an IDX3 image file (the MNIST container format): big-endian magic
/// 0x00000803, count, rows, cols, then raw bytes.
pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Vec<GrayImage>> {
    let mut r = BufReader::new(File::open(path)?);
    let magic = read_be_u32(&mut r)?;
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::BadIdxMagic(magic));
    }
    let count = read_be_u32(&mut r)? as usize;
    let rows = read_be_u32(&mut r)? as usize;
    let cols = read_be_u32(&mut r)? as usize;
    if count > 0 && (rows == 0 || cols == 0) {
        return Err(Error::MalformedIdx("zero image dimension".into()));
    }
    let mut images = Vec::with_capacity(count);
    let mut buf = vec![0u8; rows * cols];
    for i in 0..count {
        r.read_exact(&mut buf)
            .map_err(|_| Error::MalformedIdx(format!("truncated at image {i}")))?;
        images.push(GrayImage::new(cols, rows, 255, buf.clone())?);
    }
    Ok(images)
}

/// Writes an IDX3 image file. All images must share one size and be
/// 256-level.
pub fn save_idx_images(images: &[GrayImage], path: impl AsRef<Path>) -> Result<()> {
    let (rows, cols) = match images.first() {
        Some(im) => (im.height, im.width),
        None => (0, 0),
    };
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&IDX_IMAGE_MAGIC.to_be_bytes())?;
    out.write_all(&(images.len() as u32).to_be_bytes())?;
    out.write_all(&(rows as u32).to_be_bytes())?;
    out.write_all(&(cols as u32).to_be_bytes())?;
    for im in images {
        if im.height != rows || im.width != cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: im.height * im.width,
            });
        }
        if im.max_value != 255 {
            return Err(Error::Not256Level(im.max_value));
        }
        out.write_all(&im.pixels)?;
    }
    out.flush()?;
    Ok(())
}

pub const DEFAULT_BINARIZE_THRESHOLD: u8 = 128;

/// Thresholds a 256-level image to {0, 255}.
pub fn binarize(image: &GrayImage, threshold: u8) -> Result<GrayImage> {
    if image.max_value != 255 {
        return Err(Error::Not256Level(image.max_value));
    }
    let pixels = image
        .pixels
        .iter()
        .map(|&p| if p >= threshold { 255 } else { 0 })
        .collect();
    GrayImage::new(image.width, image.height, 255, pixels)
}

/// Quantizes a 256-level image to 9 gray levels: level = round(p * 8 / 255).
pub fn quantize9(image: &GrayImage) -> Result<GrayImage> {
    if image.max_value != 255 {
        return Err(Error::Not256Level(image.max_value));
    }
    let pixels = image
        .pixels
        .iter()
        .map(|&p| (p as f64 * 8.0 / 255.0).round() as u8)
        .collect();
    GrayImage::new(image.width, image.height, 8, pixels)
}

/// Expands a 9-level image back to 256 levels (level * 255 / 8, rounded).
pub fn expand9(image: &GrayImage) -> Result<GrayImage> {
    if image.max_value != 8 {
        return Err(Error::NotNineLevel(image.max_value));
    }
    let pixels = image
        .pixels
        .iter()
        .map(|&p| (p as f64 * 255.0 / 8.0).round() as u8)
        .collect();
    GrayImage::new(image.width, image.height, 255, pixels)
}

/// Geometry of the synthetic evaluation map: gray squares on a white
/// background, `gap` pixels of margin around and between squares.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMapSpec {
    pub square_size: usize,
    pub gap: usize,
    pub rows: usize,
    pub cols: usize,
    pub background_level: u8,
    pub square_levels: Vec<u8>,
}

impl Default for EvalMapSpec {
    fn default() -> Self {
        Self {
            square_size: 24,
            gap: 16,
            rows: 3,
            cols: 3,
            background_level: 8,
            square_levels: (0..=8).collect(),
        }
    }
}

impl EvalMapSpec {
    /// Single square of one gray level, used for detection profiles.
    pub fn single_square(level: u8) -> Self {
        Self {
            rows: 1,
            cols: 1,
            square_levels: vec![level],
            ..Self::default()
        }
    }

    pub fn image_width(&self) -> usize {
        self.gap + self.cols * (self.square_size + self.gap)
    }

    pub fn image_height(&self) -> usize {
        self.gap + self.rows * (self.square_size + self.gap)
    }

    /// Top-left pixel of square (r, c).
    pub fn square_origin(&self, r: usize, c: usize) -> (usize, usize) {
        (
            self.gap + r * (self.square_size + self.gap),
            self.gap + c * (self.square_size + self.gap),
        )
    }
}

/// Renders the evaluation map as a 9-level image, squares placed row-major.
pub fn gen_eval_map(spec: &EvalMapSpec) -> Result<GrayImage> {
    if spec.square_size == 0 || spec.rows == 0 || spec.cols == 0 {
        return Err(Error::EvalMapGeometry("empty grid".into()));
    }
    if spec.square_levels.len() != spec.rows * spec.cols {
        return Err(Error::EvalMapGeometry(format!(
            "{} levels for a {}x{} grid",
            spec.square_levels.len(),
            spec.rows,
            spec.cols
        )));
    }
    if spec.background_level > 8 || spec.square_levels.iter().any(|&l| l > 8) {
        return Err(Error::LevelOutOfRange(
            *spec.square_levels.iter().max().unwrap_or(&0) as i64,
        ));
    }
    let (w, h) = (spec.image_width(), spec.image_height());
    let mut pixels = vec![spec.background_level; w * h];
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let level = spec.square_levels[r * spec.cols + c];
            let (y0, x0) = spec.square_origin(r, c);
            for y in y0..y0 + spec.square_size {
                for x in x0..x0 + spec.square_size {
                    pixels[y * w + x] = level;
                }
            }
        }
    }
    GrayImage::new(w, h, 8, pixels)
}
