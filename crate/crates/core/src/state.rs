//! Dense state-vector representation, the gate kernel and the measurement rule.
//!
//! Qubit `0` is the leftmost symbol of a ket `|q0 q1 ... q(n-1)>` and the most
//! significant bit of the amplitude index, so amplitude order is the
//! lexicographic order of basis strings.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{domain, validation, Result};
use crate::gates::GateMatrix;
use crate::rng::SimRng;

/// Tolerance on `sum |c_i|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Branches with probability below this are unreachable.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;
/// Default upper limit on the number of simulated qubits.
pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// Outcome of a projective measurement on a subset of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub measured_qubits: Vec<usize>,
    /// Outcome bits, one per measured qubit, in the order of `measured_qubits`.
    pub outcome: Vec<u8>,
    pub outcome_probability: f64,
}

impl MeasurementRecord {
    /// Outcome read as an integer, first measured qubit most significant.
    pub fn value(&self) -> usize {
        bits_to_value(&self.outcome)
    }

    pub fn bit_string(&self) -> String {
        self.outcome.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }
}

pub(crate) fn bits_to_value(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, b| (acc << 1) | (*b as usize))
}

pub(crate) fn value_to_bits(value: usize, width: usize) -> Vec<u8> {
    (0..width).map(|k| ((value >> (width - 1 - k)) & 1) as u8).collect()
}

impl StateVector {
    /// The computational basis state `|index>` on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_state_with_limit(num_qubits, index, DEFAULT_MAX_QUBITS)
    }

    pub fn basis_state_with_limit(num_qubits: usize, index: usize, max_qubits: usize) -> Result<Self> {
        if num_qubits > max_qubits {
            return Err(crate::Error::Resource(format!(
                "{num_qubits} qubits exceeds the configured limit of {max_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(domain(format!("basis index {index} out of range for {num_qubits} qubits")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    /// Builds a state from raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(validation(format!("amplitude count {len} is not a power of two")));
        }
        let state = Self { num_qubits: len.trailing_zeros() as usize, amplitudes };
        state.check_norm()?;
        Ok(state)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < MIN_BRANCH_PROBABILITY {
            return Err(validation("cannot normalize the zero vector"));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|c| c / norm).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(validation(format!("state norm^2 is {n}, expected 1")));
        }
        Ok(())
    }

    /// Probability of each basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Tensor product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector { num_qubits: self.num_qubits + other.num_qubits, amplitudes }
    }

    pub(crate) fn bit_position(&self, qubit: usize) -> usize {
        self.num_qubits - 1 - qubit
    }

    /// Reads the value of `qubits` (first listed = most significant) out of a basis index.
    pub fn register_value(&self, index: usize, qubits: &[usize]) -> usize {
        read_bits(self.num_qubits, index, qubits)
    }

    /// Overwrites the bits of `qubits` in a basis index with `value`.
    pub fn with_register_value(&self, index: usize, qubits: &[usize], value: usize) -> usize {
        write_bits(self.num_qubits, index, qubits, value)
    }

    pub(crate) fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(domain(format!("qubit {q} out of range for {} qubits", self.num_qubits)));
            }
            if qubits[..k].contains(&q) {
                return Err(domain(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    /// Applies `gate` to `targets` (identity elsewhere). `targets[0]` is the
    /// most significant qubit of the gate's local index.
    pub fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(domain(format!(
                "gate of arity {} applied to {} targets",
                gate.arity(),
                targets.len()
            )));
        }
        self.check_qubits(targets)?;
        self.apply_matrix_unchecked(gate.matrix(), targets);
        #[cfg(debug_assertions)]
        self.check_norm()?;
        Ok(())
    }

    /// Gate kernel over strided amplitude blocks. Never builds the 2^n x 2^n operator.
    pub(crate) fn apply_matrix_unchecked(&mut self, matrix: &DMatrix<Complex64>, targets: &[usize]) {
        let k = targets.len();
        if k == 1 {
            self.apply_single(matrix, targets[0]);
            return;
        }
        let local_dim = 1usize << k;
        let offsets: Vec<usize> = (0..local_dim)
            .map(|local| {
                targets.iter().enumerate().fold(0usize, |acc, (j, &q)| {
                    let bit = (local >> (k - 1 - j)) & 1;
                    acc | (bit << self.bit_position(q))
                })
            })
            .collect();
        let mask = offsets[local_dim - 1];
        let mut buffer = vec![Complex64::new(0.0, 0.0); local_dim];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 {
                continue;
            }
            for (slot, off) in buffer.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, value) in buffer.iter().enumerate() {
                    acc += matrix[(row, col)] * value;
                }
                self.amplitudes[base | off] = acc;
            }
        }
    }

    fn apply_single(&mut self, matrix: &DMatrix<Complex64>, qubit: usize) {
        let (m00, m01, m10, m11) = (matrix[(0, 0)], matrix[(0, 1)], matrix[(1, 0)], matrix[(1, 1)]);
        let stride = 1usize << self.bit_position(qubit);
        for block in self.amplitudes.chunks_mut(stride * 2) {
            let (low, high) = block.split_at_mut(stride);
            for (a, b) in low.iter_mut().zip(high.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m00 * x + m01 * y;
                *b = m10 * x + m11 * y;
            }
        }
    }

    /// One-qubit `matrix` on `target`, applied only on basis states where each
    /// `controls[k]` reads `values[k]`.
    pub(crate) fn apply_conditioned_single(
        &mut self,
        matrix: &DMatrix<Complex64>,
        target: usize,
        controls: &[usize],
        values: &[u8],
    ) {
        let (m00, m01, m10, m11) = (matrix[(0, 0)], matrix[(0, 1)], matrix[(1, 0)], matrix[(1, 1)]);
        let tbit = 1usize << self.bit_position(target);
        let (mut mask, mut want) = (0usize, 0usize);
        for (&q, &v) in controls.iter().zip(values) {
            let b = 1usize << self.bit_position(q);
            mask |= b;
            if v == 1 {
                want |= b;
            }
        }
        for idx in 0..self.amplitudes.len() {
            if idx & tbit != 0 || idx & mask != want {
                continue;
            }
            let (x, y) = (self.amplitudes[idx], self.amplitudes[idx | tbit]);
            self.amplitudes[idx] = m00 * x + m01 * y;
            self.amplitudes[idx | tbit] = m10 * x + m11 * y;
        }
    }

    /// Applies the basis permutation `|x> -> |perm(x)>`. `perm` must be a bijection.
    pub(crate) fn permute_basis(&mut self, perm: impl Fn(usize) -> usize) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (x, amp) in self.amplitudes.iter().enumerate() {
            out[perm(x)] = *amp;
        }
        self.amplitudes = out;
    }

    /// Multiplies each amplitude by a unit-modulus phase `phase(x)`.
    pub(crate) fn apply_diagonal(&mut self, phase: impl Fn(usize) -> Complex64) {
        for (x, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp *= phase(x);
        }
    }

    /// Exact probability that `qubits` read `values`; the state is unchanged.
    pub fn branch_probability(&self, qubits: &[usize], values: &[u8]) -> Result<f64> {
        self.check_qubits(qubits)?;
        if values.len() != qubits.len() {
            return Err(domain("value string length differs from qubit count"));
        }
        let target = bits_to_value(values);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.register_value(*i, qubits) == target)
            .map(|(_, c)| c.norm_sqr())
            .sum())
    }

    /// Distribution of the outcomes of `qubits`, indexed by outcome value.
    pub fn outcome_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_qubits(qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, c) in self.amplitudes.iter().enumerate() {
            probs[self.register_value(i, qubits)] += c.norm_sqr();
        }
        Ok(probs)
    }

    /// Projective measurement of `qubits`; collapses `self` and returns the record.
    pub fn measure(&mut self, qubits: &[usize], rng: &mut SimRng) -> Result<MeasurementRecord> {
        let probs = self.outcome_distribution(qubits)?;
        let total: f64 = probs.iter().sum();
        if total < MIN_BRANCH_PROBABILITY {
            return Err(validation("cannot measure the zero vector"));
        }
        let draw: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (value, p) in probs.iter().enumerate() {
            if *p < MIN_BRANCH_PROBABILITY {
                continue;
            }
            acc += p;
            chosen = Some(value);
            if draw < acc {
                break;
            }
        }
        let value = chosen.expect("at least one reachable branch");
        let bits = value_to_bits(value, qubits.len());
        self.collapse(qubits, &bits)
    }

    /// Forces the branch `qubits = values`, renormalizing by sqrt of its probability.
    pub fn collapse(&mut self, qubits: &[usize], values: &[u8]) -> Result<MeasurementRecord> {
        let p = self.branch_probability(qubits, values)?;
        if p < MIN_BRANCH_PROBABILITY {
            return Err(validation(format!("branch probability {p:e} is unreachable")));
        }
        let target = bits_to_value(values);
        let scale = 1.0 / p.sqrt();
        for i in 0..self.amplitudes.len() {
            if self.register_value(i, qubits) == target {
                self.amplitudes[i] *= scale;
            } else {
                self.amplitudes[i] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementRecord {
            measured_qubits: qubits.to_vec(),
            outcome: values.to_vec(),
            outcome_probability: p,
        })
    }

    /// Measures every qubit, returning the sampled basis index.
    pub fn measure_all(&mut self, rng: &mut SimRng) -> Result<usize> {
        let qubits: Vec<usize> = (0..self.num_qubits).collect();
        Ok(self.measure(&qubits, rng)?.value())
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(domain(format!(
                "overlap of {}-qubit and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Real-amplitude encoding with one extra trailing qubit:
    /// `sum c_i |i>  ->  sum Re(c_i)|i,0> + Im(c_i)|i,1>`.
    pub fn to_real_doubled(&self) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * 2);
        for c in &self.amplitudes {
            amplitudes.push(Complex64::new(c.re, 0.0));
            amplitudes.push(Complex64::new(c.im, 0.0));
        }
        StateVector { num_qubits: self.num_qubits + 1, amplitudes }
    }
}

pub(crate) fn read_bits(num_qubits: usize, index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | ((index >> (num_qubits - 1 - q)) & 1))
}

pub(crate) fn write_bits(num_qubits: usize, index: usize, qubits: &[usize], value: usize) -> usize {
    let width = qubits.len();
    let mut out = index;
    for (k, &q) in qubits.iter().enumerate() {
        let bit = (value >> (width - 1 - k)) & 1;
        let pos = num_qubits - 1 - q;
        out = (out & !(1 << pos)) | (bit << pos);
    }
    out
}

/// Free-function form of [`StateVector::basis_state`].
pub fn basis_state(num_qubits: usize, index: usize) -> Result<StateVector> {
    StateVector::basis_state(num_qubits, index)
}

/// Measures a copy of `state`, returning the record and the collapsed state.
pub fn measure_qubits(
    state: &StateVector,
    qubits: &[usize],
    rng: &mut SimRng,
) -> Result<(MeasurementRecord, StateVector)> {
    let mut out = state.clone();
    let record = out.measure(qubits, rng)?;
    Ok((record, out))
}

/// The quantum random bit: Hadamard on a fresh `|0>` followed by measurement.
pub fn quantum_random_bit(rng: &mut SimRng) -> u8 {
    random_bit_from(0, rng)
}

/// Same subroutine started from the basis state `|start>` of one qubit.
pub fn random_bit_from(start: usize, rng: &mut SimRng) -> u8 {
    let mut s = StateVector::basis_state(1, start & 1).expect("one qubit");
    let h = crate::gates::gate(crate::gates::NamedGate::H);
    s.apply_matrix_unchecked(h.matrix(), &[0]);
    s.measure(&[0], rng).expect("unit norm").outcome[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named_gate, NamedGate};
    use crate::rng::seeded;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn three_term() -> StateVector {
        let s = 1.0 / 3f64.sqrt();
        StateVector::from_amplitudes(vec![c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(-s, 0.0)]).unwrap()
    }

    #[test]
    fn basis_states() {
        let s = StateVector::basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::basis_state(2, 3).unwrap();
        assert_eq!(s.amplitude(3), c(1.0, 0.0));
        assert!(matches!(StateVector::basis_state(3, 8), Err(crate::Error::Domain(_))));
        assert!(matches!(StateVector::basis_state(25, 0), Err(crate::Error::Resource(_))));
    }

    #[test]
    fn hadamard_and_not() {
        let mut s = StateVector::basis_state(1, 0).unwrap();
        s.apply_gate(&named_gate(NamedGate::H).unwrap(), &[0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - c(h, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(1) - c(h, 0.0)).norm() < 1e-12);

        let mut s = StateVector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        s.apply_gate(&named_gate(NamedGate::Not).unwrap(), &[0]).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.8), c(0.6, 0.0)]);
    }

    #[test]
    fn cnot_permutes_basis() {
        let mut s = StateVector::basis_state(2, 0b10).unwrap();
        s.apply_gate(&named_gate(NamedGate::Cnot).unwrap(), &[0, 1]).unwrap();
        assert_eq!(s.amplitude(0b11), c(1.0, 0.0));
        // reversed control/target
        let mut s = StateVector::basis_state(2, 0b01).unwrap();
        s.apply_gate(&named_gate(NamedGate::Cnot).unwrap(), &[1, 0]).unwrap();
        assert_eq!(s.amplitude(0b11), c(1.0, 0.0));
    }

    #[test]
    fn bad_targets_rejected() {
        let mut s = StateVector::basis_state(2, 0).unwrap();
        let cnot = named_gate(NamedGate::Cnot).unwrap();
        assert!(s.apply_gate(&cnot, &[0, 0]).is_err());
        assert!(s.apply_gate(&cnot, &[0, 2]).is_err());
        assert!(s.apply_gate(&cnot, &[0]).is_err());
    }

    #[test]
    fn branch_probability_examples() {
        let s = three_term();
        assert!((s.branch_probability(&[0], &[0]).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let u = StateVector::from_amplitudes(vec![c(0.5, 0.0); 4]).unwrap();
        assert!((u.branch_probability(&[0, 1], &[1, 1]).unwrap() - 0.25).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut ghz = vec![c(0.0, 0.0); 8];
        ghz[0] = c(h, 0.0);
        ghz[7] = c(h, 0.0);
        let ghz = StateVector::from_amplitudes(ghz).unwrap();
        assert!((ghz.branch_probability(&[0], &[0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn collapse_of_three_term_state() {
        let mut s = three_term();
        let rec = s.collapse(&[0], &[0]).unwrap();
        assert!((rec.outcome_probability - 2.0 / 3.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - c(h, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(1) - c(h, 0.0)).norm() < 1e-12);

        let mut s = three_term();
        let rec = s.collapse(&[0], &[1]).unwrap();
        assert!((rec.outcome_probability - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.amplitude(3) - c(-1.0, 0.0)).norm() < 1e-12);

        let mut s = StateVector::basis_state(2, 0).unwrap();
        assert!(matches!(s.collapse(&[0], &[1]), Err(crate::Error::Validation(_))));
    }

    #[test]
    fn measuring_a_basis_state_is_certain() {
        let mut rng = seeded(1);
        let s = StateVector::basis_state(1, 1).unwrap();
        let (rec, after) = measure_qubits(&s, &[0], &mut rng).unwrap();
        assert_eq!(rec.outcome, vec![1]);
        assert_eq!(rec.outcome_probability, 1.0);
        assert_eq!(after, s);
    }

    #[test]
    fn hadamard_sampling_frequency() {
        let mut rng = seeded(2024);
        let h = named_gate(NamedGate::H).unwrap();
        let zeros = (0..10_000)
            .filter(|_| {
                let mut s = StateVector::basis_state(1, 0).unwrap();
                s.apply_gate(&h, &[0]).unwrap();
                s.measure(&[0], &mut rng).unwrap().outcome[0] == 0
            })
            .count();
        let freq = zeros as f64 / 10_000.0;
        assert!((0.485..=0.515).contains(&freq), "{freq}");
    }

    #[test]
    fn overlap_examples() {
        let s = three_term();
        assert!((s.overlap(&s).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(zero.overlap(&one).unwrap(), c(0.0, 0.0));
        let mut plus = zero.clone();
        plus.apply_gate(&named_gate(NamedGate::H).unwrap(), &[0]).unwrap();
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((plus.overlap(&zero).unwrap() - c(expected, 0.0)).norm() < 1e-12);
        assert!(zero.overlap(&s).is_err());
    }

    #[test]
    fn real_doubling() {
        let s = StateVector::basis_state(1, 0).unwrap();
        let d = s.to_real_doubled();
        assert_eq!(d.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::from_amplitudes(vec![c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        let d = s.to_real_doubled();
        assert_eq!(d.amplitudes(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(d.amplitudes().iter().all(|a| a.im == 0.0));
    }

    #[test]
    fn register_helpers_round_trip() {
        let s = StateVector::basis_state(4, 0).unwrap();
        let idx = s.with_register_value(0, &[3, 1], 0b10);
        assert_eq!(idx, 0b0001);
        assert_eq!(s.register_value(0b0101, &[1, 3]), 0b11);
    }

    #[test]
    fn quantum_random_bit_is_fair_and_reproducible() {
        let mut rng = seeded(11);
        let ones: usize = (0..10_000).map(|_| quantum_random_bit(&mut rng) as usize).sum();
        let freq = ones as f64 / 10_000.0;
        assert!((0.485..=0.515).contains(&freq), "{freq}");
        assert_eq!(quantum_random_bit(&mut seeded(5)), quantum_random_bit(&mut seeded(5)));
        let mut rng = seeded(12);
        let ones: usize = (0..10_000).map(|_| random_bit_from(1, &mut rng) as usize).sum();
        assert!((0.485..=0.515).contains(&(ones as f64 / 10_000.0)));
    }
}
