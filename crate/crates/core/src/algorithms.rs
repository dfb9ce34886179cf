//! Oracle algorithms: Deutsch-Jozsa, Simon, Grover search, minimum finding,
//! and median and mean estimation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::circuit::{execute, sample, Circuit, Oracle};
use crate::error::{domain, Result};
use crate::gates::{GateLabel, GateMatrix, NamedGate};
use crate::rng::SimRng;
use crate::state::StateVector;

pub use crate::circuit::make_oracle;

/// Promise on an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PromiseTag {
    Constant,
    Balanced,
    OneToOne,
    /// `f(x) = f(x ⊕ s)` with `s != 0`.
    TwoToOne(u64),
}

fn bits_value(bits: &str) -> usize {
    usize::from_str_radix(bits, 2).unwrap_or(0)
}

fn hadamards(c: &mut Circuit, qubits: impl IntoIterator<Item = usize>) -> Result<()> {
    for q in qubits {
        c.named(NamedGate::H, &[q])?;
    }
    Ok(())
}

fn require_boolean(oracle: &Oracle) -> Result<()> {
    if oracle.output_width() != 1 {
        return Err(domain(format!("expected a Boolean oracle, output width is {}", oracle.output_width())));
    }
    Ok(())
}

/// `2|0><0| - I` on `n` qubits.
pub fn reflection_about_zero(n: usize) -> GateMatrix {
    let d = 1usize << n;
    let m = nalgebra::DMatrix::from_fn(d, d, |r, c| match (r == c, r) {
        (false, _) => Complex64::new(0.0, 0.0),
        (true, 0) => Complex64::new(1.0, 0.0),
        (true, _) => Complex64::new(-1.0, 0.0),
    });
    GateMatrix::from_trusted(GateLabel::Custom, m)
}

/// `H^n`, one query against an ancilla in `|->`, `H^n`, measure the inputs as `x`.
pub fn deutsch_jozsa_circuit(oracle: &Oracle) -> Result<Circuit> {
    require_boolean(oracle)?;
    let n = oracle.input_width();
    let mut c = Circuit::new(n + 1);
    c.register_oracle("f", oracle.clone())?;
    c.named(NamedGate::Not, &[n])?.named(NamedGate::H, &[n])?;
    hadamards(&mut c, 0..n)?;
    let inputs: Vec<usize> = (0..n).collect();
    c.query("f", &inputs, &[n])?;
    hadamards(&mut c, 0..n)?;
    c.measure(&inputs, "x")?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DjOutcome {
    pub tag: PromiseTag,
    pub measured: usize,
    pub queries: usize,
}

/// Constant iff the first register reads `0^n`. Without the promise the tag is
/// only a statement about that measurement.
pub fn deutsch_jozsa(oracle: &Oracle, rng: &mut SimRng) -> Result<DjOutcome> {
    let run = execute(&deutsch_jozsa_circuit(oracle)?, 0, rng)?;
    let measured = bits_value(run.register("x").unwrap_or("0"));
    let tag = if measured == 0 { PromiseTag::Constant } else { PromiseTag::Balanced };
    Ok(DjOutcome { tag, measured, queries: run.queries })
}

/// Basis of `{s : r·s = 0 (mod 2) for every row r}` over `n` bits.
pub fn f2_nullspace(rows: &[u64], n: usize) -> Vec<u64> {
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut pivots: Vec<(u32, u64)> = Vec::new();
    for &r in rows {
        let mut v = r & mask;
        for &(bit, p) in &pivots {
            if v >> bit & 1 == 1 {
                v ^= p;
            }
        }
        if v == 0 {
            continue;
        }
        let bit = 63 - v.leading_zeros();
        for (_, p) in pivots.iter_mut() {
            if *p >> bit & 1 == 1 {
                *p ^= v;
            }
        }
        pivots.push((bit, v));
    }
    let pivot_bits: u64 = pivots.iter().fold(0, |acc, &(b, _)| acc | 1 << b);
    (0..n as u32)
        .rev()
        .filter(|b| pivot_bits >> b & 1 == 0)
        .map(|free| {
            // set the free bit, then solve each pivot bit from its reduced row
            let mut s = 1u64 << free;
            for &(bit, p) in &pivots {
                if p >> free & 1 == 1 {
                    s |= 1 << bit;
                }
            }
            s
        })
        .collect()
}

/// `H^n`, query, measure the outputs as `y`, `H^n`, measure the inputs as `k`.
pub fn simon_circuit(oracle: &Oracle) -> Result<Circuit> {
    let (n, m) = (oracle.input_width(), oracle.output_width());
    let mut c = Circuit::new(n + m);
    c.register_oracle("f", oracle.clone())?;
    let inputs: Vec<usize> = (0..n).collect();
    let outputs: Vec<usize> = (n..n + m).collect();
    hadamards(&mut c, 0..n)?;
    c.query("f", &inputs, &outputs)?;
    c.measure(&outputs, "y")?;
    hadamards(&mut c, 0..n)?;
    c.measure(&inputs, "k")?;
    Ok(c)
}

/// `count` sampled values of the first register, in shot order of the histogram.
pub fn simon_samples(oracle: &Oracle, count: u64, seed: u64) -> Result<Vec<u64>> {
    let run = sample(&simon_circuit(oracle)?, 0, count, seed)?;
    let mut out = Vec::with_capacity(count as usize);
    for (bits, &c) in run.registers.get("k").into_iter().flatten() {
        out.extend(std::iter::repeat_n(bits_value(bits) as u64, c as usize));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimonOutcome {
    /// `None` when the samples leave more than one nonzero candidate.
    pub tag: Option<PromiseTag>,
    pub samples: Vec<u64>,
    pub nullspace: Vec<u64>,
    pub queries: u64,
}

/// Samples `c·n` values of `k` and reads the promise off their nullspace.
pub fn simon(oracle: &Oracle, c: usize, seed: u64) -> Result<SimonOutcome> {
    let n = oracle.input_width();
    let count = (c * n).max(1) as u64;
    let samples = simon_samples(oracle, count, seed)?;
    let nullspace = f2_nullspace(&samples, n);
    let tag = match nullspace.as_slice() {
        [] => Some(PromiseTag::OneToOne),
        [s] => Some(PromiseTag::TwoToOne(*s)),
        _ => None,
    };
    Ok(SimonOutcome { tag, samples, nullspace, queries: count })
}

/// Two-dimensional picture of Grover's rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverGeometry {
    pub n_items: usize,
    pub marked: usize,
    /// `sin θ = √(t/N)`.
    pub theta: f64,
    pub iterations: usize,
}

impl GroverGeometry {
    pub fn new(n_items: usize, marked: usize) -> Result<Self> {
        if marked == 0 || marked > n_items {
            return Err(domain(format!("marked count {marked} must lie in [1, {n_items}]")));
        }
        let theta = (marked as f64 / n_items as f64).sqrt().asin();
        let iterations = (PI / 4.0 * (n_items as f64 / marked as f64).sqrt()).floor() as usize;
        Ok(Self { n_items, marked, theta, iterations })
    }

    pub fn success_probability(&self, iterations: usize) -> f64 {
        ((2 * iterations + 1) as f64 * self.theta).sin().powi(2)
    }
}

/// One rotation `R_a R_b`: a phase query through the `|->` ancilla, then `H^n R_0 H^n`.
pub fn grover_iteration(oracle: &Oracle) -> Result<Circuit> {
    require_boolean(oracle)?;
    let n = oracle.input_width();
    let inputs: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n + 1);
    c.register_oracle("f", oracle.clone())?;
    c.query("f", &inputs, &[n])?;
    hadamards(&mut c, 0..n)?;
    c.gate(reflection_about_zero(n), &inputs)?;
    hadamards(&mut c, 0..n)?;
    Ok(c)
}

/// Full search circuit with `iterations` rotations; the inputs are measured as `x`.
pub fn grover_circuit(oracle: &Oracle, iterations: usize) -> Result<Circuit> {
    let n = oracle.input_width();
    let mut c = Circuit::new(n + 1);
    c.register_oracle("f", oracle.clone())?;
    c.named(NamedGate::Not, &[n])?.named(NamedGate::H, &[n])?;
    hadamards(&mut c, 0..n)?;
    let step = grover_iteration(oracle)?;
    for _ in 0..iterations {
        c.append(&step)?;
    }
    c.measure(&(0..n).collect::<Vec<_>>(), "x")?;
    Ok(c)
}

/// Exact probability that the search circuit measures a marked item.
pub fn grover_success_probability(oracle: &Oracle, iterations: usize) -> Result<f64> {
    let n = oracle.input_width();
    let mut c = grover_circuit(oracle, iterations)?;
    c = unitary_prefix(&c);
    let mut s = StateVector::basis_state(n + 1, 0)?;
    c.apply_unitary(&mut s)?;
    let inputs: Vec<usize> = (0..n).collect();
    let dist = s.outcome_distribution(&inputs)?;
    Ok(dist.iter().enumerate().filter(|(i, _)| oracle.eval(*i) == 1).map(|(_, p)| p).sum())
}

fn unitary_prefix(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.num_qubits());
    for (name, o) in c.oracles() {
        let _ = out.register_oracle(name, (**o).clone());
    }
    for op in c.ops() {
        match op {
            crate::circuit::CircuitOp::Measure { .. } => break,
            crate::circuit::CircuitOp::Gate { gate, targets } => {
                let _ = out.gate(gate.clone(), targets);
            }
            crate::circuit::CircuitOp::Query { oracle, inputs, outputs } => {
                let _ = out.query(oracle, inputs, outputs);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverResult {
    pub index: usize,
    /// Whether the returned index is marked; a miss should be resampled.
    pub found: bool,
    pub geometry: GroverGeometry,
    pub success_probability: f64,
    pub queries: usize,
}

/// Grover search with a known marked count `t`, using `⌊(π/4)√(N/t)⌋` rotations.
pub fn grover_search(oracle: &Oracle, t: usize, rng: &mut SimRng) -> Result<GroverResult> {
    require_boolean(oracle)?;
    if t == 0 {
        return Err(domain("grover_search needs at least one marked item"));
    }
    let geometry = GroverGeometry::new(oracle.size(), t)?;
    let run = execute(&grover_circuit(oracle, geometry.iterations)?, 0, rng)?;
    let index = bits_value(run.register("x").unwrap_or("0"));
    Ok(GroverResult {
        index,
        found: oracle.eval(index) == 1,
        geometry,
        success_probability: geometry.success_probability(geometry.iterations),
        queries: run.queries,
    })
}

/// Marked-count successes over `shots` runs of the search circuit.
pub fn grover_shots(oracle: &Oracle, iterations: usize, shots: u64, seed: u64) -> Result<u64> {
    let run = sample(&grover_circuit(oracle, iterations)?, 0, shots, seed)?;
    Ok(run
        .registers
        .get("x")
        .into_iter()
        .flatten()
        .filter(|(bits, _)| oracle.eval(bits_value(bits)) == 1)
        .map(|(_, c)| c)
        .sum())
}

/// Direct phase-oracle form of the rotation on `n` qubits, used by the
/// iterative searches below.
struct PhaseSearch<'a> {
    n: usize,
    marked: &'a [bool],
}

impl PhaseSearch<'_> {
    fn uniform(&self) -> Result<StateVector> {
        let mut s = StateVector::basis_state(self.n, 0)?;
        self.hadamards(&mut s)?;
        Ok(s)
    }

    fn hadamards(&self, s: &mut StateVector) -> Result<()> {
        let h = crate::gates::gate(NamedGate::H);
        for q in 0..self.n {
            s.apply_gate(&h, &[q])?;
        }
        Ok(())
    }

    fn phase_query(&self, s: &mut StateVector) {
        let m = self.marked;
        s.apply_diagonal(|i| if m[i] { Complex64::new(-1.0, 0.0) } else { Complex64::new(1.0, 0.0) });
    }

    fn reflect_uniform(&self, s: &mut StateVector) -> Result<()> {
        self.hadamards(s)?;
        s.apply_diagonal(|i| Complex64::new(if i == 0 { 1.0 } else { -1.0 }, 0.0));
        self.hadamards(s)
    }

    /// `R_a R_b`.
    fn rotate(&self, s: &mut StateVector) -> Result<()> {
        self.phase_query(s);
        self.reflect_uniform(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimumResult {
    pub index: usize,
    pub value: u64,
    pub grover_calls: usize,
    pub queries: usize,
    pub improvements: usize,
}

/// Minimum finding by repeated threshold searches. The threshold search for
/// items below the current candidate tries iteration counts `0, 1, 2, 4, ...`
/// up to `⌈(π/4)√N⌉`, checks each measured index classically and restarts from
/// any improvement; two full ladders without improvement end the search.
/// Items compare by `(f(i), i)`, so ties go to the smallest index.
pub fn find_minimum(oracle: &Oracle, rng: &mut SimRng) -> Result<MinimumResult> {
    let n = oracle.input_width();
    let size = oracle.size();
    let key = |i: usize| (oracle.eval(i), i);
    let mut best = rng.random_range(0..size);
    let q_max = (PI / 4.0 * (size as f64).sqrt()).ceil() as usize;
    let mut ladder = vec![0usize];
    let mut q = 1;
    while q < q_max {
        ladder.push(q);
        q *= 2;
    }
    ladder.push(q_max);
    let (mut calls, mut queries, mut improvements) = (0, 0, 0);
    'outer: loop {
        let marked: Vec<bool> = (0..size).map(|i| key(i) < key(best)).collect();
        let search = PhaseSearch { n, marked: &marked };
        for _round in 0..2 {
            for &q in &ladder {
                let mut s = search.uniform()?;
                for _ in 0..q {
                    search.rotate(&mut s)?;
                }
                calls += 1;
                queries += q;
                let candidate = s.measure_all(rng)?;
                if marked[candidate] {
                    best = candidate;
                    improvements += 1;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(MinimumResult { index: best, value: oracle.eval(best), grover_calls: calls, queries, improvements })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionEstimate {
    pub fraction: f64,
    /// `(rotations, shots, projections onto the uniform state)` per level.
    pub levels: Vec<(usize, u64, u64)>,
    pub queries: u64,
}

/// Estimates the fraction `p` of marked items to within `precision`, except
/// with probability about `failure`.
///
/// The domain is doubled with an all-marked half, so the padded imbalance
/// `η' = (1 + η)/2` equals `p` and has a known sign. With `sin θ = η'`, `k`
/// rotations by `2θ` from the uniform state leave it at angle `2kθ`, and
/// projecting back onto the uniform state succeeds with probability
/// `cos²(2kθ)`. A level without rotations compares the uniform state with its
/// phase-flipped image, succeeding with probability `sin²θ`. Levels use
/// `k = 1, 2, 4, ..., K` with `K >= 1/(2·precision)` and the estimate maximizes
/// the joint likelihood over a grid of `θ`.
pub fn estimate_fraction(marked: &[bool], precision: f64, failure: f64, rng: &mut SimRng) -> Result<FractionEstimate> {
    if marked.is_empty() || !marked.len().is_power_of_two() {
        return Err(domain("marked table length must be a power of two"));
    }
    if !(precision > 0.0 && precision < 1.0) {
        return Err(domain(format!("precision {precision} must lie in (0, 1)")));
    }
    let failure = failure.clamp(1e-12, 0.5);
    let padded: Vec<bool> = marked.iter().copied().chain(std::iter::repeat_n(true, marked.len())).collect();
    let search = PhaseSearch { n: marked.len().trailing_zeros() as usize + 1, marked: &padded };
    let shots = (24.0 + 8.0 * (1.0 / failure).ln()).ceil() as u64;
    let top = ((1.0 / (2.0 * precision)).ceil() as usize).next_power_of_two();

    let mut levels = Vec::new();
    let mut queries = 0u64;
    let mut record = |k: usize, s: &StateVector, shots: u64, rng: &mut SimRng| -> Result<()> {
        let mut probe = s.clone();
        search.hadamards(&mut probe)?;
        let p = probe.amplitude(0).norm_sqr().clamp(0.0, 1.0);
        let ones = Binomial::new(shots, p).map_err(|e| domain(e.to_string()))?.sample(rng);
        levels.push((k, shots, ones));
        queries += shots * if k == 0 { 1 } else { 2 * k as u64 };
        Ok(())
    };

    let alpha = search.uniform()?;
    let mut flipped = alpha.clone();
    search.phase_query(&mut flipped);
    record(0, &flipped, 4 * shots, rng)?;
    let mut s = alpha.clone();
    let mut done = 0;
    let mut k = 1;
    while k <= top {
        while done < k {
            // R_α R_γ with R_γ = -S R_α S on the plane
            search.phase_query(&mut s);
            search.reflect_uniform(&mut s)?;
            search.phase_query(&mut s);
            search.reflect_uniform(&mut s)?;
            done += 1;
        }
        record(k, &s, shots, rng)?;
        k *= 2;
    }

    let grid = 1 << 15;
    let loglik = |theta: f64| -> f64 {
        levels
            .iter()
            .map(|&(k, shots, ones)| {
                let p = if k == 0 { theta.sin().powi(2) } else { (2.0 * k as f64 * theta).cos().powi(2) };
                let p = p.clamp(1e-15, 1.0 - 1e-15);
                ones as f64 * p.ln() + (shots - ones) as f64 * (1.0 - p).ln()
            })
            .sum()
    };
    let theta = (0..=grid)
        .map(|j| PI / 2.0 * j as f64 / grid as f64)
        .map(|t| (t, loglik(t)))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;
    Ok(FractionEstimate { fraction: theta.sin(), levels, queries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedianEstimate {
    pub value: u64,
    pub steps: usize,
    pub queries: u64,
}

/// Binary search for the smallest `M` whose estimated rank fraction
/// `|{i : f(i) <= M}|/N` reaches one half, each estimate to within `ε/4`.
/// The result satisfies `|{f < M}| <= (1+ε)N/2` and `|{f <= M}| >= (1-ε)N/2`
/// except with probability at most 0.01.
pub fn estimate_median(oracle: &Oracle, eps: f64, rng: &mut SimRng) -> Result<MedianEstimate> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(format!("ε = {eps} must lie in (0, 1/2)")));
    }
    let (mut lo, mut hi) = (0u64, (1u64 << oracle.output_width()) - 1);
    let steps = oracle.output_width().max(1);
    let mut queries = 0;
    let mut taken = 0;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let marked: Vec<bool> = oracle.table().iter().map(|&v| v <= mid).collect();
        let est = estimate_fraction(&marked, eps / 4.0, 0.01 / steps as f64, rng)?;
        queries += est.queries;
        taken += 1;
        if est.fraction >= 0.5 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(MedianEstimate { value: lo, steps: taken, queries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Estimated mean of each binary digit of `f + 1/2`.
    pub digits: Vec<f64>,
    pub queries: u64,
}

/// Mean of `f: [N] -> [-1/2, 1/2]` through the digit split
/// `f + 1/2 = 0.f_1 f_2 ...`, with `⌈log2(2/ε)⌉` digits whose means are each
/// estimated to within `ε/2`.
pub fn estimate_mean(values: &[f64], eps: f64, rng: &mut SimRng) -> Result<MeanEstimate> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(format!("ε = {eps} must lie in (0, 1/2)")));
    }
    if let Some(v) = values.iter().find(|v| !(-0.5..=0.5).contains(*v)) {
        return Err(domain(format!("value {v} outside [-1/2, 1/2]")));
    }
    let d = (2.0 / eps).log2().ceil() as u32;
    let scale = (1u64 << d) as f64;
    let fixed: Vec<u64> = values.iter().map(|v| (((v + 0.5) * scale).floor() as u64).min((1 << d) - 1)).collect();
    let mut digits = Vec::with_capacity(d as usize);
    let mut mean = -0.5;
    let mut queries = 0;
    for j in 1..=d {
        let marked: Vec<bool> = fixed.iter().map(|x| x >> (d - j) & 1 == 1).collect();
        let est = estimate_fraction(&marked, eps / 2.0, 0.01 / d as f64, rng)?;
        queries += est.queries;
        mean += est.fraction / (1u64 << j) as f64;
        digits.push(est.fraction);
    }
    Ok(MeanEstimate { mean, digits, queries })
}
