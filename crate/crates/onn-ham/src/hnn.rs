//! Hopfield-network emulator backend: synchronous sign dynamics with
//! fixed-point and 2-cycle detection.
//!
//! Every field is computed from the pre-sweep state. A zero field holds the
//! previous activation, which keeps the neutral output pair neutral when the
//! input drive vanishes and places the edge-detection threshold at |S| = 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ham::WeightMatrix;

pub const DEFAULT_MAX_SWEEPS: usize = 20;

/// Per-neuron activations in [-1, +1]. Updates produce {-1, +1}; in-between
/// values only survive from initialization through the hold rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipolarState {
    values: Vec<f64>,
}

impl BipolarState {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                return Err(Error::ActivationOutOfRange(v));
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HnnOutcomeKind {
    FixedPoint,
    Cycle2,
    NonConvergent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HnnOutcome {
    pub kind: HnnOutcomeKind,
    pub final_state: BipolarState,
    /// Full synchronous updates performed before the decision.
    pub sweeps: usize,
}

/// One synchronous update: s_i <- sign(sum_j w_ij s_j), holding s_i on a
/// zero field.
pub fn hnn_sweep(state: &BipolarState, weights: &WeightMatrix) -> Result<BipolarState> {
    let n = weights.n();
    if state.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.len(),
        });
    }
    let old = state.values();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let field: f64 = weights.row(i).iter().zip(old).map(|(w, s)| w * s).sum();
        next.push(if field > 0.0 {
            1.0
        } else if field < 0.0 {
            -1.0
        } else {
            old[i]
        });
    }
    Ok(BipolarState { values: next })
}

/// Iterates [`hnn_sweep`] until a fixed point, a 2-cycle, or the sweep
/// budget is reached. Deterministic.
pub fn hnn_run(
    init: &BipolarState,
    weights: &WeightMatrix,
    max_sweeps: usize,
) -> Result<HnnOutcome> {
    if max_sweeps < 2 {
        return Err(Error::InvalidParameter {
            name: "max_sweeps",
            reason: format!("{max_sweeps} < 2"),
        });
    }
    let mut prev_prev: Option<BipolarState> = None;
    let mut current = init.clone();
    for sweep in 1..=max_sweeps {
        let next = hnn_sweep(&current, weights)?;
        if next == current {
            return Ok(HnnOutcome {
                kind: HnnOutcomeKind::FixedPoint,
                final_state: next,
                sweeps: sweep,
            });
        }
        if prev_prev.as_ref() == Some(&next) {
            return Ok(HnnOutcome {
                kind: HnnOutcomeKind::Cycle2,
                final_state: next,
                sweeps: sweep,
            });
        }
        prev_prev = Some(std::mem::replace(&mut current, next));
    }
    Ok(HnnOutcome {
        kind: HnnOutcomeKind::NonConvergent,
        final_state: current,
        sweeps: max_sweeps,
    })
}
