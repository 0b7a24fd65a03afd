//! Hebbian learning rules and the 11-neuron edge-detection network.
//!
//! Two rules are provided: the normalized auto-associative rule over single
//! patterns and the unnormalized hetero-associative rule over in-out pairs.
//! The hetero-associative rule concatenates each pair into one vector,
//! accumulates the outer-product sum, then zeroes the diagonal and every
//! connection inside the input block.

use serde::Serialize;

use crate::error::{Error, Result};

/// One training pattern: a real activation per neuron. Values beyond
/// [-1, +1] are allowed so convolution kernels can be used directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    values: Vec<f64>,
}

impl Pattern {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPatterns);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
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

/// An input pattern associated with a bipolar output pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternPair {
    input: Pattern,
    output: Pattern,
}

impl PatternPair {
    pub fn new(input: Pattern, output: Pattern) -> Result<Self> {
        for &v in output.values() {
            if v != 1.0 && v != -1.0 {
                return Err(Error::NonBipolarOutput(v));
            }
        }
        Ok(Self { input, output })
    }

    pub fn input(&self) -> &Pattern {
        &self.input
    }

    pub fn output(&self) -> &Pattern {
        &self.output
    }
}

/// Symmetric zero-diagonal synaptic couplings. The first `n_in` indices are
/// input neurons; matrices built by the hetero-associative rule have an
/// all-zero input-input block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMatrix {
    n: usize,
    n_in: usize,
    rows: Vec<Vec<f64>>,
}

impl WeightMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Sum of |w_ij| over row `i`.
    pub fn row_abs_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|w| w.abs()).sum()
    }
}

/// Normalized Hebbian rule for auto-associative memories:
/// w_ij = (1/k) sum_k X_i^k X_j^k with a zero diagonal.
pub fn hebbian_aam(patterns: &[Pattern]) -> Result<WeightMatrix> {
    if patterns.is_empty() {
        return Err(Error::EmptyPatterns);
    }
    let n = patterns[0].len();
    for p in patterns {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    let k = patterns.len() as f64;
    let mut rows = vec![vec![0.0; n]; n];
    for p in patterns {
        let x = p.values();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rows[i][j] += x[i] * x[j] / k;
                }
            }
        }
    }
    Ok(WeightMatrix { n, n_in: n, rows })
}

/// Doubles a scalar bipolar output so the pair can be initialized neutrally.
pub fn expand_output_pair(pair: &PatternPair) -> Result<PatternPair> {
    if pair.output.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: pair.output.len(),
        });
    }
    let v = pair.output.values()[0];
    PatternPair::new(pair.input.clone(), Pattern::new(vec![v, v])?)
}

/// Unnormalized Hebbian rule for hetero-associative memories. Each pair is
/// concatenated into one (n_in + n_out)-vector; the accumulated outer-product
/// sum keeps the input-output and output-output blocks and zeroes the
/// diagonal and the input-input block.
pub fn hebbian_ham(pairs: &[PatternPair]) -> Result<WeightMatrix> {
    if pairs.is_empty() {
        return Err(Error::EmptyPatterns);
    }
    let n_in = pairs[0].input.len();
    let n_out = pairs[0].output.len();
    for p in pairs {
        if p.input.len() != n_in {
            return Err(Error::DimensionMismatch {
                expected: n_in,
                got: p.input.len(),
            });
        }
        if p.output.len() != n_out {
            return Err(Error::DimensionMismatch {
                expected: n_out,
                got: p.output.len(),
            });
        }
    }
    let n = n_in + n_out;
    let mut rows = vec![vec![0.0; n]; n];
    for p in pairs {
        let z: Vec<f64> = p
            .input
            .values()
            .iter()
            .chain(p.output.values())
            .copied()
            .collect();
        for i in 0..n {
            for j in 0..n {
                rows[i][j] += z[i] * z[j];
            }
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 0.0;
        if i < n_in {
            for v in &mut row[..n_in] {
                *v = 0.0;
            }
        }
    }
    Ok(WeightMatrix { n, n_in, rows })
}

/// Input-to-output couplings of the edge network, hand-evaluated from the
/// unnormalized Hebbian sum over the two Sobel-kernel pairs.
pub const EDGE_INPUT_WEIGHTS: [f64; 9] = [0.0, 2.0, 2.0, -2.0, 0.0, 2.0, -2.0, -2.0, 0.0];

/// Horizontal Sobel kernel, row-major.
pub const SOBEL_H: [f64; 9] = [1.0, 2.0, 1.0, 0.0, 0.0, 0.0, -1.0, -2.0, -1.0];
/// Vertical Sobel kernel, row-major.
pub const SOBEL_V: [f64; 9] = [1.0, 0.0, -1.0, 2.0, 0.0, -2.0, 1.0, 0.0, -1.0];

/// Builds the 11-neuron edge-detection network: the two Sobel kernels are the
/// training inputs, associated with white (+1, +1) and black (-1, -1)
/// outputs respectively.
pub fn build_edge_ham() -> WeightMatrix {
    let horizontal = PatternPair::new(
        Pattern::new(SOBEL_H.to_vec()).unwrap(),
        Pattern::new(vec![1.0]).unwrap(),
    )
    .unwrap();
    let vertical = PatternPair::new(
        Pattern::new(SOBEL_V.to_vec()).unwrap(),
        Pattern::new(vec![-1.0]).unwrap(),
    )
    .unwrap();
    let pairs = [
        expand_output_pair(&horizontal).unwrap(),
        expand_output_pair(&vertical).unwrap(),
    ];
    hebbian_ham(&pairs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pat(v: &[f64]) -> Pattern {
        Pattern::new(v.to_vec()).unwrap()
    }

    #[test]
    fn aam_single_all_ones() {
        let w = hebbian_aam(&[pat(&[1.0, 1.0, 1.0])]).unwrap();
        let expect = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(w.get(i, j), e);
            }
        }
        assert_eq!(w.n_in(), 3);
    }

    #[test]
    fn aam_two_patterns_hand_derived() {
        let w = hebbian_aam(&[pat(&[1.0, 1.0, -1.0]), pat(&[1.0, -1.0, 1.0])]).unwrap();
        assert_eq!(w.get(0, 1), 0.0);
        assert_eq!(w.get(0, 2), 0.0);
        assert_eq!(w.get(1, 2), -1.0);
    }

    #[test]
    fn aam_sign_flip_invariant() {
        let a = hebbian_aam(&[pat(&[1.0, -1.0])]).unwrap();
        let b = hebbian_aam(&[pat(&[-1.0, 1.0])]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn aam_rejects_empty_and_mismatched() {
        assert!(matches!(hebbian_aam(&[]), Err(Error::EmptyPatterns)));
        let r = hebbian_aam(&[pat(&[1.0, 1.0]), pat(&[1.0])]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn expand_output_duplicates() {
        let p = PatternPair::new(pat(&[1.0, -1.0]), pat(&[1.0])).unwrap();
        let e = expand_output_pair(&p).unwrap();
        assert_eq!(e.output().values(), &[1.0, 1.0]);
        assert_eq!(e.input(), p.input());

        let m = PatternPair::new(pat(&[1.0]), pat(&[-1.0])).unwrap();
        assert_eq!(
            expand_output_pair(&m).unwrap().output().values(),
            &[-1.0, -1.0]
        );
    }

    #[test]
    fn non_bipolar_output_rejected() {
        let r = PatternPair::new(pat(&[1.0]), pat(&[0.0]));
        assert!(matches!(r, Err(Error::NonBipolarOutput(_))));
    }

    #[test]
    fn ham_single_scalar_pair() {
        let p = PatternPair::new(pat(&[1.0]), pat(&[1.0, 1.0])).unwrap();
        let w = hebbian_ham(&[p]).unwrap();
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(0, 2), 1.0);
        assert_eq!(w.get(1, 2), 1.0);
        assert_eq!(w.n_in(), 1);
    }

    #[test]
    fn edge_ham_matches_hand_derivation() {
        let w = build_edge_ham();
        assert_eq!(w.n(), 11);
        assert_eq!(w.n_in(), 9);
        for (i, &wi) in EDGE_INPUT_WEIGHTS.iter().enumerate() {
            assert_eq!(w.get(i, 9), wi);
            assert_eq!(w.get(i, 10), wi);
        }
        assert_eq!(w.get(9, 10), 2.0);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(w.get(i, j), 0.0);
            }
        }
        // Zero row sum over the input column: uniform patches get no drive.
        let s: f64 = (0..9).map(|i| w.get(i, 9)).sum();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn serializes_to_expected_shape() {
        let w = build_edge_ham();
        let v = serde_json::to_value(&w).unwrap();
        assert_eq!(v["n"], 11);
        assert_eq!(v["n_in"], 9);
        assert_eq!(v["rows"].as_array().unwrap().len(), 11);
    }

    fn pattern_strategy(len: usize) -> impl Strategy<Value = Pattern> {
        prop::collection::vec(prop_oneof![Just(-1.0), Just(1.0)], len)
            .prop_map(|v| Pattern::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn aam_symmetric_zero_diagonal(
            pats in prop::collection::vec(pattern_strategy(6), 1..5)
        ) {
            let w = hebbian_aam(&pats).unwrap();
            for i in 0..6 {
                prop_assert_eq!(w.get(i, i), 0.0);
                for j in 0..6 {
                    prop_assert_eq!(w.get(i, j), w.get(j, i));
                }
            }
        }

        #[test]
        fn aam_per_pattern_sign_flip(
            pats in prop::collection::vec(pattern_strategy(5), 1..4),
            flip in 0usize..4
        ) {
            let mut flipped = pats.clone();
            let idx = flip % flipped.len();
            let neg: Vec<f64> = flipped[idx].values().iter().map(|v| -v).collect();
            flipped[idx] = Pattern::new(neg).unwrap();
            prop_assert_eq!(hebbian_aam(&pats).unwrap(), hebbian_aam(&flipped).unwrap());
        }

        #[test]
        fn ham_symmetric_with_zero_input_block(
            ins in prop::collection::vec(pattern_strategy(4), 1..4),
            outs in prop::collection::vec(pattern_strategy(2), 4)
        ) {
            let pairs: Vec<PatternPair> = ins
                .into_iter()
                .zip(outs)
                .map(|(i, o)| PatternPair::new(i, o).unwrap())
                .collect();
            let w = hebbian_ham(&pairs).unwrap();
            for i in 0..w.n() {
                prop_assert_eq!(w.get(i, i), 0.0);
                for j in 0..w.n() {
                    prop_assert_eq!(w.get(i, j), w.get(j, i));
                    if i < 4 && j < 4 {
                        prop_assert_eq!(w.get(i, j), 0.0);
                    }
                }
            }
        }
    }
}
