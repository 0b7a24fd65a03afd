//! Edge detection with an oscillatory hetero-associative memory.
//!
//! An 11-neuron network (9 inputs for a 3x3 patch, 2 outputs) is trained
//! with a Hebbian rule on the two Sobel kernels and scanned over an image
//! window by window. Two behavioral backends run the same network: a
//! Hopfield emulator with synchronous sign dynamics and a model of the
//! fully digital phase-domain design. Reference Sobel and Canny detectors,
//! image I/O, and comparison metrics round out the toolkit.

// `!(x > 0.0)` is the NaN-rejecting form of the positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod filters;
pub mod grid;
pub mod ham;
pub mod hnn;
pub mod imaging;
pub mod phase;
pub mod pipeline;

pub use error::{Error, Result};
pub use ham::{build_edge_ham, WeightMatrix};
pub use imaging::GrayImage;
pub use pipeline::{scan_image, Backend, EdgeClass, EdgeMap};
