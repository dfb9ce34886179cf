//! Fourier transforms and phase estimation.
//!
//! `qfft_mod2m` is the H / controlled-R_k gate array followed by a bit
//! reversal, mapping `|a> -> 2^{-m/2} Σ_b e^{2πiab/2^m} |b>`. Registers list
//! their most significant qubit first.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{domain, validation, Error, Result};
use crate::gates::{add_controls, cis, gate, matrix_power, named_gate, GateMatrix, NamedGate};
use crate::rng::SimRng;
use crate::state::{read_bits, write_bits, StateVector};

/// Circle distance on `[0, 2π)`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn wrap(a: f64) -> f64 {
    a.rem_euclid(2.0 * PI)
}

/// Hadamard on every listed qubit: the Fourier transform over `Z_2^n`.
pub fn qft_z2n(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    state.check_qubits(qubits)?;
    let h = gate(NamedGate::H);
    for &q in qubits {
        state.apply_matrix_unchecked(h.matrix(), &[q]);
    }
    Ok(())
}

/// Gate list of the transform on `qubits`, keeping controlled `R_k` only for `k <= cutoff`.
pub fn qfft_gates(qubits: &[usize], cutoff: Option<u32>) -> Vec<(GateMatrix, Vec<usize>)> {
    let m = qubits.len();
    let h = gate(NamedGate::H);
    let mut out = Vec::new();
    for j in 0..m {
        out.push((h.clone(), vec![qubits[j]]));
        for l in (j + 1)..m {
            let k = (l - j + 1) as u32;
            if cutoff.is_some_and(|c| k > c) {
                continue;
            }
            let rk = named_gate(NamedGate::Rk(k.min(62))).expect("k >= 2");
            out.push((add_controls(&rk, 1), vec![qubits[l], qubits[j]]));
        }
    }
    for j in 0..m / 2 {
        out.push((gate(NamedGate::Swap), vec![qubits[j], qubits[m - 1 - j]]));
    }
    out
}

/// The transform as a circuit on `num_qubits` qubits acting on `qubits`.
pub fn qfft_circuit(num_qubits: usize, qubits: &[usize], cutoff: Option<u32>) -> Result<Circuit> {
    let mut c = Circuit::new(num_qubits);
    for (g, t) in qfft_gates(qubits, cutoff) {
        c.gate(g, &t)?;
    }
    Ok(c)
}

fn apply_gates(state: &mut StateVector, gates: &[(GateMatrix, Vec<usize>)]) {
    for (g, t) in gates {
        state.apply_matrix_unchecked(g.matrix(), t);
    }
}

/// Exact Fourier transform over `Z_{2^m}` on the register `qubits`.
pub fn qfft_mod2m(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    state.check_qubits(qubits)?;
    apply_gates(state, &qfft_gates(qubits, None));
    Ok(())
}

/// Inverse of [`qfft_mod2m`].
pub fn inverse_qfft_mod2m(state: &mut StateVector, qubits: &[usize]) -> Result<()> {
    state.check_qubits(qubits)?;
    for (g, t) in qfft_gates(qubits, None).iter().rev() {
        state.apply_matrix_unchecked(g.adjoint().matrix(), t);
    }
    Ok(())
}

/// The transform with every controlled `R_k`, `k > cutoff`, left out.
pub fn approx_qfft(state: &mut StateVector, qubits: &[usize], cutoff: u32) -> Result<()> {
    if cutoff == 0 {
        return Err(domain("cutoff must be at least 1"));
    }
    state.check_qubits(qubits)?;
    apply_gates(state, &qfft_gates(qubits, Some(cutoff)));
    Ok(())
}

/// Dense `F_{ab} = e^{2πiab/Q}/√Q` for `Q = 2^m`.
pub fn dft_matrix(m: usize) -> crate::gates::CMatrix {
    let q = 1usize << m;
    let norm = 1.0 / (q as f64).sqrt();
    crate::gates::CMatrix::from_fn(q, q, |a, b| cis(2.0 * PI * ((a * b) % q) as f64 / q as f64) * norm)
}

/// Operator-norm bound on the error of [`approx_qfft`]: each omitted
/// controlled `R_k` contributes `|1 - e^{2πi/2^k}|`, and there are `m - k + 1` of them.
pub fn approx_qfft_bound(m: usize, cutoff: u32) -> f64 {
    (cutoff as usize + 1..=m)
        .map(|k| (m - k + 1) as f64 * (Complex64::new(1.0, 0.0) - cis(2.0 * PI / 2f64.powi(k as i32))).norm())
        .sum()
}

fn register_width(q: usize) -> usize {
    (usize::BITS - (q - 1).leading_zeros()) as usize
}

/// `(1/√Q) Σ_b e^{2πiab/Q} |b>` on `⌈log2 Q⌉` qubits, built directly.
pub fn fourier_state(q: usize, a: usize) -> Result<StateVector> {
    if q < 2 {
        return Err(domain(format!("modulus must be at least 2, got {q}")));
    }
    let width = register_width(q);
    let norm = 1.0 / (q as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    for (b, amp) in amps.iter_mut().enumerate().take(q) {
        let phase = 2.0 * PI * ((a as u128 * b as u128) % q as u128) as f64 / q as f64;
        *amp = cis(phase) * norm;
    }
    StateVector::from_amplitudes(amps)
}

/// Writes the uniform superposition over `0..q` onto `register` (assumed `|0...0>`)
/// by the recursive split: a rotation `|0> -> √(Q0/Q)|0> + √(Q1/Q)|1>` on the
/// leading qubit with `Q0 = min(Q, 2^{rest})`, then the same construction
/// conditioned on that qubit for `Q0` and `Q1` on the remaining qubits.
pub fn prepare_uniform(state: &mut StateVector, register: &[usize], q: usize) -> Result<()> {
    if q < 1 || q > 1usize << register.len() {
        return Err(domain(format!("{q} values do not fit in {} qubits", register.len())));
    }
    state.check_qubits(register)?;
    split(state, register, 0, &mut Vec::new(), q);
    Ok(())
}

fn split(state: &mut StateVector, register: &[usize], level: usize, prefix: &mut Vec<u8>, count: usize) {
    if level == register.len() {
        return;
    }
    let half = 1usize << (register.len() - level - 1);
    let (q0, q1) = (count.min(half), count - count.min(half));
    let controls = &register[..level];
    if q1 > 0 {
        let theta = (q1 as f64).sqrt().atan2((q0 as f64).sqrt());
        // G(θ, π) sends |0> to cos θ|0> + sin θ|1>
        let g = named_gate(NamedGate::G { theta, phi: PI }).expect("finite angle");
        state.apply_conditioned_single(g.matrix(), register[level], controls, prefix);
    }
    prefix.push(0);
    split(state, register, level + 1, prefix, q0);
    prefix.pop();
    if q1 > 0 {
        prefix.push(1);
        split(state, register, level + 1, prefix, q1);
        prefix.pop();
    }
}

/// `|Ψ_{Q,0}>`: uniform over `0..Q` on `⌈log2 Q⌉` qubits, via [`prepare_uniform`].
pub fn prepare_fourier_zero(q: usize) -> Result<StateVector> {
    if q < 2 {
        return Err(domain(format!("modulus must be at least 2, got {q}")));
    }
    let width = register_width(q);
    let mut s = StateVector::basis_state(width, 0)?;
    let reg: Vec<usize> = (0..width).collect();
    prepare_uniform(&mut s, &reg, q)?;
    Ok(s)
}

/// `|a, b> -> e^{2πiab/Q} |a, b>`.
pub fn phase_kick(state: &mut StateVector, a_reg: &[usize], b_reg: &[usize], q: usize) -> Result<()> {
    if q < 2 {
        return Err(domain(format!("modulus must be at least 2, got {q}")));
    }
    let all: Vec<usize> = a_reg.iter().chain(b_reg).copied().collect();
    state.check_qubits(&all)?;
    let n = state.num_qubits();
    state.apply_diagonal(|idx| {
        let a = read_bits(n, idx, a_reg) as u128;
        let b = read_bits(n, idx, b_reg) as u128;
        cis(2.0 * PI * ((a * b) % q as u128) as f64 / q as f64)
    });
    Ok(())
}

/// First two steps of the cyclic Fourier transform: `|a>|0> -> |a>|Ψ_{Q,a}>`.
pub fn fourier_kick(state: &mut StateVector, a_reg: &[usize], b_reg: &[usize], q: usize) -> Result<()> {
    prepare_uniform(state, b_reg, q)?;
    phase_kick(state, a_reg, b_reg, q)
}

/// A unitary whose controlled powers can be applied to a target register.
pub trait PowerUnitary: Sync {
    /// Width of the target register.
    fn width(&self) -> usize;
    /// Applies `U^exponent` to a state on exactly `width()` qubits.
    fn apply_power(&self, state: &mut StateVector, exponent: u64) -> Result<()>;
}

impl PowerUnitary for GateMatrix {
    fn width(&self) -> usize {
        self.arity()
    }

    fn apply_power(&self, state: &mut StateVector, exponent: u64) -> Result<()> {
        let m = matrix_power(self.matrix(), exponent);
        let targets: Vec<usize> = (0..self.arity()).collect();
        state.apply_matrix_unchecked(&m, &targets);
        Ok(())
    }
}

/// Multiplication by `y` modulo `n` on `⌈log2 n⌉` qubits; basis states `>= n` are fixed.
#[derive(Debug, Clone, Copy)]
pub struct ModMul {
    pub n: u64,
    pub y: u64,
}

impl PowerUnitary for ModMul {
    fn width(&self) -> usize {
        (u64::BITS - (self.n - 1).leading_zeros()) as usize
    }

    fn apply_power(&self, state: &mut StateVector, exponent: u64) -> Result<()> {
        let f = crate::factoring::modpow(self.y, exponent, self.n);
        let n = self.n as usize;
        state.permute_basis(|g| if g < n { ((g as u128 * f as u128) % n as u128) as usize } else { g });
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    /// Doubling levels beyond the first: estimates of `2^j θ` for `j = 0..=bits`.
    pub bits: u32,
    /// Confidence parameter `s`; per-level failure is at most `2^{-s}/(bits+1)`.
    pub safety: u32,
    /// Samples per level and interferometer; `None` uses `48·(bits + safety)`.
    pub samples: Option<usize>,
}

impl PhaseConfig {
    pub fn new(bits: u32) -> Self {
        Self { bits, safety: 8, samples: None }
    }

    pub fn samples_per_level(&self) -> usize {
        self.samples.unwrap_or(48 * (self.bits + self.safety) as usize)
    }

    /// Hoeffding bound on the probability that any level misses by more than π/8.
    pub fn failure_bound(&self) -> f64 {
        // a level is good when both frequencies are within δ of their biases,
        // with 2√2·δ <= sin(π/8)
        let delta = (PI / 8.0).sin() / (2.0 * 2f64.sqrt());
        let m = self.samples_per_level() as f64;
        let per_level = 4.0 * (-2.0 * m * delta * delta).exp();
        (per_level * (self.bits + 1) as f64).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCounts {
    pub level: u32,
    /// Ones from the plain interferometer, bias `(1 - cos 2^jθ)/2`.
    pub ones_cos: usize,
    /// Ones with an extra `R_2` on the control, bias `(1 + sin 2^jθ)/2`.
    pub ones_sin: usize,
    pub samples: usize,
    /// Estimate of `2^j θ mod 2π` from the two frequencies.
    pub estimate: f64,
}

#[derive(Debug, Clone)]
pub struct PhaseEstimate {
    pub theta: f64,
    pub precision_bits: u32,
    pub levels: Vec<LevelCounts>,
    pub failure_bound: f64,
    /// Target register after all control measurements.
    pub final_state: StateVector,
}

/// Kitaev phase estimation. Each level runs `m` fresh control qubits through
/// `H`, controlled `U^{2^j}`, `H` and measures them one after another on the
/// shared target register, then repeats with an `R_2` on the control to get
/// the sign of the sine.
pub fn estimate_phase<U: PowerUnitary + ?Sized>(
    unitary: &U,
    eigenstate: &StateVector,
    config: PhaseConfig,
    rng: &mut SimRng,
) -> Result<PhaseEstimate> {
    if eigenstate.num_qubits() != unitary.width() {
        return Err(domain(format!(
            "target register has {} qubits, unitary acts on {}",
            eigenstate.num_qubits(),
            unitary.width()
        )));
    }
    if config.bits > 62 {
        return Err(domain("at most 62 doubling levels"));
    }
    let m = config.samples_per_level();
    if m == 0 {
        return Err(domain("samples per level must be positive"));
    }
    let mut psi = eigenstate.clone();
    let mut levels = Vec::with_capacity(config.bits as usize + 1);
    for j in 0..=config.bits {
        let exponent = 1u64 << j;
        let mut ones = [0usize; 2];
        for (run, count) in ones.iter_mut().enumerate() {
            for _ in 0..m {
                let mut v = psi.clone();
                unitary.apply_power(&mut v, exponent)?;
                let kick = if run == 1 { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
                // control after H·(controlled V)·H: |0>(ψ + kVψ)/2 + |1>(ψ - kVψ)/2
                let plus: Vec<Complex64> = psi.amplitudes().iter().zip(v.amplitudes()).map(|(a, b)| a + kick * b).collect();
                let minus: Vec<Complex64> = psi.amplitudes().iter().zip(v.amplitudes()).map(|(a, b)| a - kick * b).collect();
                let p1 = minus.iter().map(|z| z.norm_sqr()).sum::<f64>() / 4.0;
                let bit = rng.random::<f64>() < p1;
                let branch = if bit { minus } else { plus };
                psi = StateVector::normalized(branch)?;
                *count += bit as usize;
            }
        }
        let cos_est = 1.0 - 2.0 * ones[0] as f64 / m as f64;
        let sin_est = 2.0 * ones[1] as f64 / m as f64 - 1.0;
        levels.push(LevelCounts {
            level: j,
            ones_cos: ones[0],
            ones_sin: ones[1],
            samples: m,
            estimate: wrap(sin_est.atan2(cos_est)),
        });
    }
    let coarse: Vec<f64> = levels.iter().map(|l| l.estimate).collect();
    let theta = reconstruct_theta(&coarse)?;
    Ok(PhaseEstimate {
        theta,
        precision_bits: config.bits,
        levels,
        failure_bound: config.failure_bound(),
        final_state: psi,
    })
}

/// Recovers `θ` from estimates `coarse[j] ≈ 2^j θ mod 2π`, each within π/8,
/// by halving down from the top level and keeping the candidate interval
/// consistent with every level.
pub fn reconstruct_theta(coarse: &[f64]) -> Result<f64> {
    const HALF: f64 = PI / 8.0 + 1e-12;
    let Some(&top) = coarse.last() else {
        return Err(domain("no phase estimates given"));
    };
    // feasible arc for 2^j θ: (center, half-width)
    let mut arc = (wrap(top), HALF);
    for j in (0..coarse.len() - 1).rev() {
        let c = wrap(coarse[j]);
        let mut chosen = None;
        for shift in [0.0, PI] {
            let cand = (wrap(arc.0 / 2.0 + shift), arc.1 / 2.0);
            if let Some(x) = intersect(cand, (c, HALF)) {
                chosen = Some(x);
                break;
            }
        }
        arc = chosen.ok_or_else(|| validation(format!("phase estimates are inconsistent at level {j}")))?;
    }
    Ok(arc.0)
}

fn intersect(a: (f64, f64), b: (f64, f64)) -> Option<(f64, f64)> {
    let mut offset = (b.0 - a.0).rem_euclid(2.0 * PI);
    if offset > PI {
        offset -= 2.0 * PI;
    }
    let lo = (-a.1).max(offset - b.1);
    let hi = a.1.min(offset + b.1);
    (lo <= hi).then(|| (wrap(a.0 + (lo + hi) / 2.0), (hi - lo) / 2.0))
}

/// Distribution of the number of ones among `m` control qubits at one level,
/// computed unitarily: `m` controls each drive `U^{2^level}`, and a counting
/// register receives `|w(i)>`. The result is the exact measurement law of the counting register.
pub fn counting_distribution<U: PowerUnitary + ?Sized>(
    unitary: &U,
    eigenstate: &StateVector,
    level: u32,
    m: usize,
) -> Result<Vec<f64>> {
    if m == 0 || m > 12 {
        return Err(Error::Resource(format!("counting register supports 1..=12 controls, got {m}")));
    }
    let w = unitary.width();
    let cw = register_width(m + 1).max(1);
    let total = m + cw + w;
    if total > crate::state::DEFAULT_MAX_QUBITS {
        return Err(Error::Resource(format!("{total} qubits")));
    }
    let mut state = StateVector::basis_state(m + cw, 0)?.tensor(eigenstate);
    let controls: Vec<usize> = (0..m).collect();
    let counter: Vec<usize> = (m..m + cw).collect();
    let target: Vec<usize> = (m + cw..total).collect();
    qft_z2n(&mut state, &controls)?;
    // controlled powers: for each pattern of controls the target sees U^{2^level · w(i)}
    let dim_t = 1usize << w;
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    for idx_c in 0..1usize << m {
        let k = idx_c.count_ones() as u64;
        let base = write_bits(total, 0, &controls, idx_c);
        let amps: Vec<Complex64> = (0..dim_t).map(|t| state.amplitude(write_bits(total, base, &target, t))).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if norm == 0.0 {
            continue;
        }
        let mut sub = StateVector::normalized(amps)?;
        unitary.apply_power(&mut sub, (1u64 << level) * k)?;
        for t in 0..dim_t {
            out[write_bits(total, base, &target, t)] = sub.amplitude(t) * norm.sqrt();
        }
    }
    state = StateVector::from_amplitudes(out)?;
    qft_z2n(&mut state, &controls)?;
    state.permute_basis(|idx| {
        let ones = read_bits(total, idx, &controls).count_ones() as usize;
        let c = read_bits(total, idx, &counter);
        write_bits(total, idx, &counter, c ^ ones)
    });
    let dist = state.outcome_distribution(&counter)?;
    Ok(dist.into_iter().take(m + 1).collect())
}

/// Wraps `compute` as `compute`, bitwise CNOT copy of `result` onto `copy`,
/// then `compute` reversed, so every work and garbage qubit returns to its input value.
pub fn garbage_free(compute: &Circuit, result: &[usize], copy: &[usize]) -> Result<Circuit> {
    if result.len() != copy.len() {
        return Err(domain("result and copy registers differ in width"));
    }
    let mut out = compute.clone();
    for (&r, &c) in result.iter().zip(copy) {
        out.named(NamedGate::Cnot, &[r, c])?;
    }
    out.append(&compute.inverse()?)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::CMatrix;
    use crate::rng::seeded;

    fn dft(m: usize) -> CMatrix {
        let q = 1usize << m;
        CMatrix::from_fn(q, q, |b, a| cis(2.0 * PI * ((a * b) % q) as f64 / q as f64) / (q as f64).sqrt())
    }

    #[test]
    fn qfft_two_qubits_a1() {
        let mut s = StateVector::basis_state(2, 1).unwrap();
        qfft_mod2m(&mut s, &[0, 1]).unwrap();
        let want = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        for (a, b) in s.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qfft_matches_dense_dft() {
        for m in 1..=5 {
            let got = qfft_circuit(m, &(0..m).collect::<Vec<_>>(), None).unwrap().to_matrix().unwrap();
            assert!((got - dft(m)).iter().all(|z| z.norm() < 1e-10), "m={m}");
        }
    }

    #[test]
    fn gate_count() {
        for m in 1..=8usize {
            let g = qfft_gates(&(0..m).collect::<Vec<_>>(), None);
            assert_eq!(g.len(), m + m * (m - 1) / 2 + m / 2);
        }
    }

    #[test]
    fn inverse_undoes() {
        let mut s = StateVector::basis_state(3, 6).unwrap();
        qfft_mod2m(&mut s, &[0, 1, 2]).unwrap();
        inverse_qfft_mod2m(&mut s, &[0, 1, 2]).unwrap();
        assert!((s.amplitude(6).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_preparation() {
        let s = prepare_fourier_zero(3).unwrap();
        let r = 1.0 / 3f64.sqrt();
        for (i, want) in [r, r, r, 0.0].iter().enumerate() {
            assert!((s.amplitude(i) - c(*want, 0.0)).norm() < 1e-12);
        }
        for q in 2..=64 {
            let s = prepare_fourier_zero(q).unwrap();
            assert!(s.fidelity(&fourier_state(q, 0).unwrap()).unwrap() > 1.0 - 1e-12, "Q={q}");
        }
    }

    #[test]
    fn kick_builds_fourier_states() {
        let mut s = StateVector::basis_state(6, 2 << 3).unwrap();
        fourier_kick(&mut s, &[0, 1, 2], &[3, 4, 5], 5).unwrap();
        let want = StateVector::basis_state(3, 2).unwrap().tensor(&fourier_state(5, 2).unwrap());
        assert!(s.fidelity(&want).unwrap() > 1.0 - 1e-12);
        let mut k = StateVector::basis_state(4, 0b0101).unwrap();
        phase_kick(&mut k, &[0, 1], &[2, 3], 4).unwrap();
        assert!((k.amplitude(0b0101) - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn reconstruction() {
        assert_eq!(reconstruct_theta(&[0.0; 5]).unwrap(), 0.0);
        let theta = 2.0 * PI * 5.0 / 16.0;
        let exact: Vec<f64> = (0..5).map(|j| wrap(theta * 2f64.powi(j))).collect();
        assert!(circle_distance(reconstruct_theta(&exact).unwrap(), theta) < 1e-9);
        assert!(reconstruct_theta(&[0.0, PI / 2.0, 0.0]).is_err());
    }

    #[test]
    fn phase_of_z_and_r3() {
        let z = gate(NamedGate::PauliZ);
        let one = StateVector::basis_state(1, 1).unwrap();
        let zero = StateVector::basis_state(1, 0).unwrap();
        let cfg = PhaseConfig::new(6);
        let est = estimate_phase(&z, &one, cfg, &mut seeded(1)).unwrap();
        assert!(circle_distance(est.theta, PI) < 2.0 * PI / 128.0);
        assert_eq!(est.levels[0].ones_cos, est.levels[0].samples);
        let est = estimate_phase(&z, &zero, cfg, &mut seeded(1)).unwrap();
        assert!(circle_distance(est.theta, 0.0) < 2.0 * PI / 128.0);
        let r3 = named_gate(NamedGate::Rk(3)).unwrap();
        let est = estimate_phase(&r3, &one, cfg, &mut seeded(2)).unwrap();
        assert!(circle_distance(est.theta, PI / 4.0) < 2.0 * PI / 128.0);
        assert!(est.final_state.fidelity(&one).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn counting_register_is_binomial() {
        let r3 = named_gate(NamedGate::Rk(3)).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        let m = 6;
        let dist = counting_distribution(&r3, &one, 1, m).unwrap();
        let p = (1.0 - (PI / 2.0).cos()) / 2.0;
        let mut binom = 1.0;
        for (k, &got) in dist.iter().enumerate() {
            let want = binom * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
            assert!((got - want).abs() < 1e-10, "k={k}: {got} vs {want}");
            binom = binom * (m - k) as f64 / (k + 1) as f64;
        }
    }

    #[test]
    fn garbage_free_and() {
        // compute: garbage g = ab on qubit 2, result r = g on qubit 3
        let mut compute = Circuit::new(5);
        compute.named(NamedGate::Toffoli, &[0, 1, 2]).unwrap();
        compute.named(NamedGate::Cnot, &[2, 3]).unwrap();
        let wrapped = garbage_free(&compute, &[3], &[4]).unwrap();
        for ab in 0..4usize {
            let mut s = StateVector::basis_state(5, ab << 3).unwrap();
            wrapped.apply_unitary(&mut s).unwrap();
            let want = (ab << 3) | usize::from(ab == 3);
            assert!((s.amplitude(want).norm() - 1.0).abs() < 1e-12);
        }
    }
}
