//! Local Pauli noise, CSS codes built from classical linear codes, the Steane
//! code, transversal gates, and the effective-noise recursion behind the
//! threshold result.

use std::collections::HashMap;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::f2_nullspace;
use crate::error::{domain, Error, Result};
use crate::gates::{gate, NamedGate};
use crate::rng::{derived, SimRng};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PauliKind {
    X,
    Y,
    Z,
}

impl PauliKind {
    fn gate(self) -> NamedGate {
        match self {
            PauliKind::X => NamedGate::Not,
            PauliKind::Y => NamedGate::PauliY,
            PauliKind::Z => NamedGate::PauliZ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PauliError {
    pub qubit: usize,
    pub kind: PauliKind,
}

/// Each qubit independently suffers an error with probability `eta`; the kind
/// is drawn from `weights` over `[X, Y, Z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub eta: f64,
    pub weights: [f64; 3],
}

impl NoiseModel {
    pub fn depolarizing(eta: f64) -> Result<Self> {
        Self::new(eta, [1.0 / 3.0; 3])
    }

    pub fn new(eta: f64, weights: [f64; 3]) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(domain(format!("η = {eta} outside [0, 1]")));
        }
        if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(domain("error kind weights must be nonnegative and sum to 1"));
        }
        Ok(Self { eta, weights })
    }

    /// Every error is the given kind.
    pub fn only(eta: f64, kind: PauliKind) -> Result<Self> {
        let mut w = [0.0; 3];
        w[kind as usize] = 1.0;
        Self::new(eta, w)
    }

    fn sample_kind(&self, rng: &mut SimRng) -> PauliKind {
        let u: f64 = rng.random();
        if u < self.weights[0] {
            PauliKind::X
        } else if u < self.weights[0] + self.weights[1] {
            PauliKind::Y
        } else {
            PauliKind::Z
        }
    }
}

pub fn apply_pauli(state: &mut StateVector, error: PauliError) -> Result<()> {
    state.apply_gate(&gate(error.kind.gate()), &[error.qubit])
}

/// Independent noise on every qubit of `state`; returns the sampled errors.
pub fn apply_noise(state: &mut StateVector, model: &NoiseModel, rng: &mut SimRng) -> Result<Vec<PauliError>> {
    let qubits: Vec<usize> = (0..state.num_qubits()).collect();
    apply_noise_on(state, &qubits, model, rng)
}

pub fn apply_noise_on(state: &mut StateVector, qubits: &[usize], model: &NoiseModel, rng: &mut SimRng) -> Result<Vec<PauliError>> {
    let mut errors = Vec::new();
    for &qubit in qubits {
        if rng.random::<f64>() < model.eta {
            let e = PauliError { qubit, kind: model.sample_kind(rng) };
            apply_pauli(state, e)?;
            errors.push(e);
        }
    }
    Ok(errors)
}

/// Gate-correlated noise: with probability `eta` one of the `4^k - 1`
/// nontrivial Paulis on the gate's `k` targets, uniformly.
pub fn apply_gate_noise(state: &mut StateVector, targets: &[usize], eta: f64, rng: &mut SimRng) -> Result<Vec<PauliError>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("η = {eta} outside [0, 1]")));
    }
    if rng.random::<f64>() >= eta || targets.is_empty() {
        return Ok(vec![]);
    }
    let code = rng.random_range(1..1usize << (2 * targets.len()));
    let mut errors = Vec::new();
    for (j, &qubit) in targets.iter().enumerate() {
        let kind = match code >> (2 * j) & 3 {
            0 => continue,
            1 => PauliKind::X,
            2 => PauliKind::Y,
            _ => PauliKind::Z,
        };
        let e = PauliError { qubit, kind };
        apply_pauli(state, e)?;
        errors.push(e);
    }
    Ok(errors)
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansion {
    /// Mass of each error weight `0..=cutoff`.
    pub masses: Vec<f64>,
    /// Mass of weights above the cutoff.
    pub tail: f64,
}

/// Expansion of the product of single-qubit channels by error weight.
pub fn discretization_expand(eta: f64, m: u64, cutoff: u64) -> Result<Expansion> {
    if cutoff > m {
        return Err(domain(format!("cutoff {cutoff} exceeds {m} qubits")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("η = {eta} outside [0, 1]")));
    }
    let mass = |j: u64| binomial(m, j) * eta.powi(j as i32) * (1.0 - eta).powi((m - j) as i32);
    let masses: Vec<f64> = (0..=cutoff).map(mass).collect();
    let tail = (cutoff + 1..=m).map(mass).sum();
    Ok(Expansion { masses, tail })
}

/// Classical linear code in `F_2^m`. Word bit `m-1-i` is position `i`, so a
/// word printed MSB first reads left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearCodeF2 {
    length: usize,
    rows: Vec<u64>,
}

fn rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let v = basis.iter().fold(r, |v, &b| v.min(v ^ b));
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

impl LinearCodeF2 {
    pub fn new(length: usize, rows: Vec<u64>) -> Result<Self> {
        if length == 0 || length > 20 {
            return Err(domain(format!("code length {length} outside 1..=20")));
        }
        if let Some(r) = rows.iter().find(|&&r| r >> length != 0) {
            return Err(domain(format!("row {r:b} longer than {length}")));
        }
        if rank(&rows) != rows.len() {
            return Err(domain("generator rows are linearly dependent"));
        }
        Ok(Self { length, rows })
    }

    /// Rows of `0`/`1` characters; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut length = None;
        let mut rows = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: k + 1, message };
            if !line.chars().all(|c| c == '0' || c == '1') {
                return Err(err(format!("row {line:?} is not a 0/1 string")));
            }
            match length {
                None => length = Some(line.len()),
                Some(l) if l != line.len() => return Err(err(format!("row length {} differs from {l}", line.len()))),
                _ => {}
            }
            rows.push(u64::from_str_radix(line, 2).map_err(|e| err(e.to_string()))?);
        }
        let length = length.ok_or_else(|| Error::Parse { line: 0, message: "no generator rows".into() })?;
        Self::new(length, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Validation(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        self.rows.iter().map(|r| format!("{:0w$b}\n", r, w = self.length)).collect()
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn codewords(&self) -> Vec<u64> {
        (0..1u64 << self.rows.len())
            .map(|c| self.rows.iter().enumerate().filter(|(j, _)| c >> j & 1 == 1).fold(0, |acc, (_, r)| acc ^ r))
            .collect()
    }

    pub fn contains(&self, v: u64) -> bool {
        v >> self.length == 0 && rank(&[self.rows.as_slice(), &[v]].concat()) == self.rows.len()
    }

    pub fn min_distance(&self) -> u32 {
        self.codewords().into_iter().filter(|&w| w != 0).map(u64::count_ones).min().unwrap_or(0)
    }
}

/// `{v : v·c = 0 for every c in C}`.
pub fn dual_code(code: &LinearCodeF2) -> LinearCodeF2 {
    let rows = f2_nullspace(code.rows(), code.length());
    LinearCodeF2 { length: code.length, rows }
}

/// The `[7,4]` Hamming code.
pub fn hamming_7_4() -> LinearCodeF2 {
    LinearCodeF2 { length: 7, rows: vec![0b1010101, 0b0110011, 0b0001111, 0b1111111] }
}

/// CSS code from `C` with `C⊥ ⊆ C`: logical word `w` is `Σ_{i ∈ C⊥} |i + w>`.
#[derive(Debug, Clone, Serialize)]
pub struct CssCode {
    code: LinearCodeF2,
    dual: LinearCodeF2,
    /// Coset representatives extending a basis of `C⊥` to one of `C`.
    logical_basis: Vec<u64>,
    correctable: usize,
    #[serde(skip)]
    decoder: HashMap<u64, u64>,
}

fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

impl CssCode {
    pub fn new(code: LinearCodeF2) -> Result<Self> {
        let dual = dual_code(&code);
        if let Some(r) = dual.rows().iter().find(|&&r| !code.contains(r)) {
            return Err(domain(format!("C⊥ is not contained in C: {r:0w$b}", w = code.length())));
        }
        let mut span = dual.rows().to_vec();
        let mut logical_basis = Vec::new();
        for &r in code.rows() {
            let extended = [span.as_slice(), &[r]].concat();
            if rank(&extended) > span.len() {
                span = extended;
                logical_basis.push(r);
            }
        }
        let correctable = ((code.min_distance().max(1) - 1) / 2) as usize;
        let mut css = Self { code, dual, logical_basis, correctable, decoder: HashMap::new() };
        css.decoder = css.build_decoder();
        Ok(css)
    }

    /// Smallest-weight error for each syndrome of weight at most `correctable`.
    fn build_decoder(&self) -> HashMap<u64, u64> {
        let m = self.code.length();
        let mut table = HashMap::new();
        let mut patterns: Vec<u64> = (0..1u64 << m).filter(|e| e.count_ones() as usize <= self.correctable).collect();
        patterns.sort_by_key(|e| (e.count_ones(), *e));
        for e in patterns {
            table.entry(self.syndrome(e)).or_insert(e);
        }
        table
    }

    pub fn syndrome(&self, e: u64) -> u64 {
        self.dual.rows().iter().fold(0, |acc, &r| (acc << 1) | parity(r & e))
    }

    pub fn code(&self) -> &LinearCodeF2 {
        &self.code
    }

    pub fn dual(&self) -> &LinearCodeF2 {
        &self.dual
    }

    pub fn length(&self) -> usize {
        self.code.length()
    }

    pub fn logical_qubits(&self) -> usize {
        self.code.dim() - self.dual.dim()
    }

    pub fn correctable(&self) -> usize {
        self.correctable
    }

    /// Coset representative of logical basis state `j`.
    pub fn logical_word(&self, j: usize) -> u64 {
        self.logical_basis.iter().rev().enumerate().filter(|(b, _)| j >> b & 1 == 1).fold(0, |acc, (_, w)| acc ^ w)
    }

    /// Whether `v` lies in `C⊥` (acts trivially on every codeword).
    pub fn is_stabilizer(&self, v: u64) -> bool {
        self.dual.contains(v)
    }
}

/// Seven-qubit code from the Hamming code.
pub fn steane() -> CssCode {
    CssCode::new(hamming_7_4()).expect("the Hamming code contains its dual")
}

/// `|w_L>` for a word `w` of `C`.
pub fn css_encode(css: &CssCode, w: u64) -> Result<StateVector> {
    if !css.code().contains(w) {
        return Err(domain(format!("{w:0m$b} is not a word of C", m = css.length())));
    }
    let m = css.length();
    let words = css.dual().codewords();
    let amp = Complex64::new(1.0 / (words.len() as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    for i in words {
        amps[(i ^ w) as usize] = amp;
    }
    StateVector::from_amplitudes(amps)
}

/// `Σ_j a_j |j_L>` over the `2^k` logical basis states.
pub fn css_encode_logical(css: &CssCode, logical: &[Complex64]) -> Result<StateVector> {
    if logical.len() != 1 << css.logical_qubits() {
        return Err(domain(format!("expected {} logical amplitudes", 1 << css.logical_qubits())));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << css.length()];
    for (j, a) in logical.iter().enumerate() {
        let basis = css_encode(css, css.logical_word(j))?;
        for (x, b) in amps.iter_mut().zip(basis.amplitudes()) {
            *x += a * b;
        }
    }
    StateVector::normalized(amps)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorrectionReport {
    pub bit_syndrome: u64,
    pub phase_syndrome: u64,
    pub bit_flips: Vec<usize>,
    pub phase_flips: Vec<usize>,
    /// False when a syndrome has no pattern within the correctable weight.
    pub correctable: bool,
}

/// Projective measurement of the parity of `qubits`; returns the outcome bit.
pub fn measure_parity(state: &mut StateVector, qubits: &[usize], rng: &mut SimRng) -> Result<u8> {
    state.check_qubits(qubits)?;
    let mask = qubits.iter().fold(0usize, |acc, &q| acc | 1 << state.bit_position(q));
    let odd: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(x, _)| (x & mask).count_ones() & 1 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let outcome = if rng.random::<f64>() < odd { 1 } else { 0 };
    let keep = if outcome == 1 { odd } else { 1.0 - odd };
    let scale = 1.0 / keep.max(f64::MIN_POSITIVE).sqrt();
    for (x, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if (x & mask).count_ones() as u8 & 1 == outcome {
            *a *= scale;
        } else {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    Ok(outcome)
}

fn positions(css: &CssCode, pattern: u64, block: &[usize]) -> Vec<usize> {
    let m = css.length();
    (0..m).filter(|i| pattern >> (m - 1 - i) & 1 == 1).map(|i| block[i]).collect()
}

fn correct_stage(state: &mut StateVector, css: &CssCode, block: &[usize], rng: &mut SimRng) -> Result<(u64, Vec<usize>, bool)> {
    let m = css.length();
    let mut syndrome = 0;
    for &row in css.dual().rows() {
        let qubits: Vec<usize> = (0..m).filter(|i| row >> (m - 1 - i) & 1 == 1).map(|i| block[i]).collect();
        syndrome = (syndrome << 1) | measure_parity(state, &qubits, rng)? as u64;
    }
    let Some(&pattern) = css.decoder.get(&syndrome) else {
        return Ok((syndrome, vec![], false));
    };
    let flips = positions(css, pattern, block);
    let x = gate(NamedGate::Not);
    for &q in &flips {
        state.apply_gate(&x, &[q])?;
    }
    Ok((syndrome, flips, true))
}

fn hadamard_all(state: &mut StateVector, block: &[usize]) -> Result<()> {
    let h = gate(NamedGate::H);
    block.iter().try_for_each(|&q| state.apply_gate(&h, &[q]))
}

/// Syndrome measurement and recovery on the code block `block`: parity checks
/// of `C` locate bit flips, then the same checks between Hadamard layers
/// locate phase flips.
pub fn css_correct_block(state: &mut StateVector, css: &CssCode, block: &[usize], rng: &mut SimRng) -> Result<CorrectionReport> {
    if block.len() != css.length() {
        return Err(domain(format!("block of {} qubits for a length-{} code", block.len(), css.length())));
    }
    let (bit_syndrome, bit_flips, ok_bits) = correct_stage(state, css, block, rng)?;
    hadamard_all(state, block)?;
    let (phase_syndrome, phase_flips, ok_phase) = correct_stage(state, css, block, rng)?;
    hadamard_all(state, block)?;
    Ok(CorrectionReport { bit_syndrome, phase_syndrome, bit_flips, phase_flips, correctable: ok_bits && ok_phase })
}

pub fn css_correct(state: &mut StateVector, css: &CssCode, rng: &mut SimRng) -> Result<CorrectionReport> {
    let block: Vec<usize> = (0..state.num_qubits()).collect();
    css_correct_block(state, css, &block, rng)
}

pub fn transversal_not(state: &mut StateVector, block: &[usize]) -> Result<()> {
    let x = gate(NamedGate::Not);
    block.iter().try_for_each(|&q| state.apply_gate(&x, &[q]))
}

/// Bitwise CNOT from block `a` to block `b`.
pub fn transversal_cnot(state: &mut StateVector, a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(domain("transversal CNOT needs blocks of equal length"));
    }
    let cx = gate(NamedGate::Cnot);
    a.iter().zip(b).try_for_each(|(&c, &t)| state.apply_gate(&cx, &[c, t]))
}

pub fn majority3(bit: u8) -> [u8; 3] {
    [bit & 1; 3]
}

pub fn majority3_decode(bits: [u8; 3]) -> u8 {
    u8::from(bits.iter().filter(|&&b| b & 1 == 1).count() >= 2)
}

/// Failure rate of the three-bit majority code: `3η²(1-η) + η³`.
pub fn eta_eff_majority(eta: f64) -> f64 {
    3.0 * eta * eta * (1.0 - eta) + eta.powi(3)
}

/// `C(A, d+1)·η^{d+1}`: more than `d` faults in an area of `A` locations.
pub fn effective_noise_bound(area: u64, d: u64, eta: f64) -> Result<f64> {
    if area < d + 1 {
        return Err(domain(format!("area {area} must be at least d + 1 = {}", d + 1)));
    }
    Ok(binomial(area, d + 1) * eta.powi(d as i32 + 1))
}

/// `η_0, η_1, ..., η_r` with `η_{j+1} = C(A, d+1)·η_j^{d+1}`.
pub fn concatenation_trajectory(eta0: f64, area: u64, d: u64, levels: usize) -> Result<Vec<f64>> {
    let mut out = vec![eta0];
    for _ in 0..levels {
        let next = effective_noise_bound(area, d, *out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// Positive fixed point `C(A, d+1)^{-1/d}` of the recursion.
pub fn threshold(area: u64, d: u64) -> Result<f64> {
    if d == 0 {
        return Err(domain("d = 0 corrects nothing and has no threshold"));
    }
    effective_noise_bound(area, d, 1.0).map(|c| c.powf(-1.0 / d as f64))
}

/// Levels needed to bring `η_0` below `target`, if it is below threshold.
pub fn levels_to_reach(eta0: f64, area: u64, d: u64, target: f64) -> Result<Option<usize>> {
    if eta0 >= threshold(area, d)? {
        return Ok(None);
    }
    let mut eta = eta0;
    let mut levels = 0;
    while eta > target {
        eta = effective_noise_bound(area, d, eta)?;
        levels += 1;
    }
    Ok(Some(levels))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotTrace {
    pub errors: Vec<Vec<PauliError>>,
    pub corrections: Vec<CorrectionReport>,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryReport {
    pub eta: f64,
    pub rounds: usize,
    pub shots: u64,
    pub failures: u64,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub std_error: f64,
    /// Per-round record of the first traced shots, when requested.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<ShotTrace>,
}

/// Logical fidelity below this counts as a failure.
pub const FAILURE_FIDELITY: f64 = 1.0 - 1e-9;

fn haar_logical(k: usize, rng: &mut SimRng) -> Vec<Complex64> {
    (0..1usize << k).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// Encodes a Haar-random logical state, alternates noise and correction for
/// `rounds` rounds and counts shots whose final fidelity drops below
/// [`FAILURE_FIDELITY`]. Shot `k` uses `derived(seed, k)`.
pub fn memory_experiment(css: &CssCode, model: &NoiseModel, rounds: usize, shots: u64, seed: u64, trace: usize) -> Result<MemoryReport> {
    if shots == 0 {
        return Err(domain("shots must be at least 1"));
    }
    let run = |k: u64| -> Result<(bool, Option<ShotTrace>)> {
        let mut rng = derived(seed, k);
        let ideal = css_encode_logical(css, &haar_logical(css.logical_qubits(), &mut rng))?;
        let mut s = ideal.clone();
        let keep = (k as usize) < trace;
        let mut t = ShotTrace { errors: vec![], corrections: vec![], fidelity: 1.0 };
        for _ in 0..rounds {
            let errors = apply_noise(&mut s, model, &mut rng)?;
            let report = css_correct(&mut s, css, &mut rng)?;
            if keep {
                t.errors.push(errors);
                t.corrections.push(report);
            }
        }
        let fidelity = ideal.fidelity(&s)?;
        t.fidelity = fidelity;
        Ok((fidelity < FAILURE_FIDELITY, keep.then_some(t)))
    };
    let results: Vec<(bool, Option<ShotTrace>)> = (0..shots).into_par_iter().map(run).collect::<Result<_>>()?;
    let failures = results.iter().filter(|(f, _)| *f).count() as u64;
    let rate = failures as f64 / shots as f64;
    Ok(MemoryReport {
        eta: model.eta,
        rounds,
        shots,
        failures,
        rate,
        std_error: (rate * (1.0 - rate) / shots as f64).sqrt(),
        traces: results.into_iter().filter_map(|(_, t)| t).collect(),
    })
}
