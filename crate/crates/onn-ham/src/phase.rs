//! Behavioral model of the fully digital phase-domain ONN.
//!
//! Neurons carry one of 9 phase stages (0 = 0 degrees = white, 8 = 180
//! degrees = black). Each oscillation cycle recomputes every stage from the
//! pre-cycle state: the weighted field is normalized by the row's absolute
//! weight sum, amplified by a saturation gain, clamped to [-1, +1] and
//! quantized back to a stage. Stability means `stable_cycles` consecutive
//! equal states; otherwise the run is declared unstable after `max_cycles`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ham::WeightMatrix;

/// Default saturation gain. High enough that every field reachable in the
/// 11-neuron edge network saturates, which makes the phase dynamics agree
/// with the sign dynamics of the Hopfield emulator.
pub const DEFAULT_GAIN: f64 = 32.0;

/// Per-neuron phase stages, each in 0..=8.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseState {
    stages: Vec<u8>,
}

impl PhaseState {
    pub fn new(stages: Vec<u8>) -> Result<Self> {
        for &s in &stages {
            if s > 8 {
                return Err(Error::StageOutOfRange(s as i64));
            }
        }
        Ok(Self { stages })
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stages(&self) -> &[u8] {
        &self.stages
    }
}

/// Digital design parameters. The oscillator period is 16 system clocks and
/// the oscillator frequency is f_sys / 64.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnnConfig {
    pub f_sys: f64,
    pub clocks_per_period: u32,
    pub period_divisor: u32,
    pub gain: f64,
    pub max_cycles: u32,
    pub stable_cycles: u32,
    pub init_clocks: u32,
}

impl Default for OnnConfig {
    fn default() -> Self {
        Self {
            f_sys: 166e6,
            clocks_per_period: 16,
            period_divisor: 64,
            gain: DEFAULT_GAIN,
            max_cycles: 10,
            stable_cycles: 2,
            init_clocks: 40,
        }
    }
}

impl OnnConfig {
    pub fn f_osc(&self) -> f64 {
        self.f_sys / self.period_divisor as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.f_sys > 0.0) {
            return Err(Error::InvalidParameter {
                name: "f_sys",
                reason: format!("{} must be positive", self.f_sys),
            });
        }
        if !(self.gain > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gain",
                reason: format!("{} must be positive", self.gain),
            });
        }
        if self.stable_cycles < 2 || self.max_cycles < self.stable_cycles {
            return Err(Error::InvalidParameter {
                name: "max_cycles/stable_cycles",
                reason: format!(
                    "need max_cycles >= stable_cycles >= 2, got {}/{}",
                    self.max_cycles, self.stable_cycles
                ),
            });
        }
        Ok(())
    }
}

/// Gray level (0 black .. 8 white) to phase stage: white is 0 degrees.
pub fn level_to_stage(level: u8) -> Result<u8> {
    if level > 8 {
        return Err(Error::LevelOutOfRange(level as i64));
    }
    Ok(8 - level)
}

/// Phase stage to bipolar activation: stage 0 -> +1, stage 4 -> 0,
/// stage 8 -> -1.
pub fn stage_to_value(stage: u8) -> Result<f64> {
    if stage > 8 {
        return Err(Error::StageOutOfRange(stage as i64));
    }
    Ok(1.0 - stage as f64 / 4.0)
}

fn quantize(u: f64) -> u8 {
    // u in [-1, +1]; 4 * (1 - u) in [0, 8], rounded half away from zero.
    (4.0 * (1.0 - u)).round() as u8
}

/// One oscillation cycle, synchronous over all neurons.
pub fn onn_cycle(
    state: &PhaseState,
    weights: &WeightMatrix,
    config: &OnnConfig,
) -> Result<PhaseState> {
    let n = weights.n();
    if state.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.len(),
        });
    }
    config.validate()?;
    let values: Vec<f64> = state
        .stages()
        .iter()
        .map(|&s| stage_to_value(s).expect("validated stage"))
        .collect();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let row_sum = weights.row_abs_sum(i);
        if row_sum == 0.0 {
            next.push(state.stages()[i]);
            continue;
        }
        let field: f64 = weights.row(i).iter().zip(&values).map(|(w, v)| w * v).sum();
        let u = (config.gain * field / row_sum).clamp(-1.0, 1.0);
        next.push(quantize(u));
    }
    Ok(PhaseState { stages: next })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseOutcomeKind {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseOutcome {
    pub kind: PhaseOutcomeKind,
    pub final_stages: PhaseState,
    /// Oscillation cycles elapsed until the decision, confirming cycles
    /// included.
    pub cycles: u32,
}

/// Iterates [`onn_cycle`] until the state repeats for `stable_cycles`
/// consecutive cycles, or `max_cycles` elapse.
pub fn onn_run(
    init: &PhaseState,
    weights: &WeightMatrix,
    config: &OnnConfig,
) -> Result<PhaseOutcome> {
    onn_run_impl(init, weights, config, None)
}

/// Like [`onn_run`] but records the post-cycle state of every cycle.
pub fn onn_run_traced(
    init: &PhaseState,
    weights: &WeightMatrix,
    config: &OnnConfig,
) -> Result<(PhaseOutcome, Vec<PhaseState>)> {
    let mut trace = Vec::new();
    let outcome = onn_run_impl(init, weights, config, Some(&mut trace))?;
    Ok((outcome, trace))
}

fn onn_run_impl(
    init: &PhaseState,
    weights: &WeightMatrix,
    config: &OnnConfig,
    mut trace: Option<&mut Vec<PhaseState>>,
) -> Result<PhaseOutcome> {
    config.validate()?;
    let mut current = init.clone();
    let mut equal_run = 0u32;
    for cycle in 1..=config.max_cycles {
        let next = onn_cycle(&current, weights, config)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(next.clone());
        }
        equal_run = if next == current { equal_run + 1 } else { 1 };
        current = next;
        if equal_run >= config.stable_cycles {
            return Ok(PhaseOutcome {
                kind: PhaseOutcomeKind::Stable,
                final_stages: current,
                cycles: cycle,
            });
        }
    }
    Ok(PhaseOutcome {
        kind: PhaseOutcomeKind::Unstable,
        final_stages: current,
        cycles: config.max_cycles,
    })
}

/// Clock-accurate cost of one run, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OnnTiming {
    pub init_ns: f64,
    pub compute_ns: f64,
}

pub fn onn_timing(outcome: &PhaseOutcome, config: &OnnConfig) -> OnnTiming {
    let clock_ns = 1e9 / config.f_sys;
    OnnTiming {
        init_ns: config.init_clocks as f64 * clock_ns,
        compute_ns: outcome.cycles as f64 * config.period_divisor as f64 * clock_ns,
    }
}
