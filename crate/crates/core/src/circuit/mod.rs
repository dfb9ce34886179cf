//! Circuits as time-ordered operation lists, their executor, shot sampling and
//! the run report.

mod oracle;
mod text;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, validation, Error, Result};
use crate::gates::{controlled, named_gate, CMatrix, GateMatrix, NamedGate};
use crate::rng::{derived, SimRng};
use crate::state::{StateVector, MIN_BRANCH_PROBABILITY};

pub use oracle::{make_oracle, Oracle};
pub use text::{parse_circuit, parse_circuit_with, parse_gate, render_circuit, render_gate};

/// Register label used by [`sample`] when a circuit measures nothing.
pub const IMPLICIT_REGISTER: &str = "all";

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    Gate { gate: GateMatrix, targets: Vec<usize> },
    /// One query to the named oracle: `|i>|j> -> |i>|j ⊕ f(i)>`.
    Query { oracle: String, inputs: Vec<usize>, outputs: Vec<usize> },
    Measure { qubits: Vec<usize>, label: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<CircuitOp>,
    oracles: BTreeMap<String, Arc<Oracle>>,
}

fn check_targets(num_qubits: usize, qubits: &[usize]) -> Result<()> {
    for (k, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(validation(format!("qubit {q} out of range for {num_qubits} qubits")));
        }
        if qubits[..k].contains(&q) {
            return Err(validation(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

fn valid_label(label: &str) -> bool {
    let mut chars = label.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, ops: Vec::new(), oracles: BTreeMap::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn oracles(&self) -> &BTreeMap<String, Arc<Oracle>> {
        &self.oracles
    }

    pub fn oracle(&self, name: &str) -> Option<&Oracle> {
        self.oracles.get(name).map(|o| o.as_ref())
    }

    /// Makes an oracle available to `query` under `name`.
    pub fn register_oracle(&mut self, name: &str, oracle: Oracle) -> Result<&mut Self> {
        if !valid_label(name) {
            return Err(validation(format!("invalid oracle name {name:?}")));
        }
        self.oracles.insert(name.to_string(), Arc::new(oracle));
        Ok(self)
    }

    pub fn gate(&mut self, gate: GateMatrix, targets: &[usize]) -> Result<&mut Self> {
        if gate.arity() != targets.len() {
            return Err(validation(format!(
                "gate {} has arity {} but {} targets were given",
                gate.label(),
                gate.arity(),
                targets.len()
            )));
        }
        check_targets(self.num_qubits, targets)?;
        self.ops.push(CircuitOp::Gate { gate, targets: targets.to_vec() });
        Ok(self)
    }

    pub fn named(&mut self, gate: NamedGate, targets: &[usize]) -> Result<&mut Self> {
        let g = named_gate(gate)?;
        self.gate(g, targets)
    }

    pub fn query(&mut self, oracle: &str, inputs: &[usize], outputs: &[usize]) -> Result<&mut Self> {
        let o = self
            .oracles
            .get(oracle)
            .ok_or_else(|| validation(format!("unknown oracle {oracle:?}")))?;
        if o.input_width() != inputs.len() || o.output_width() != outputs.len() {
            return Err(validation(format!(
                "oracle {oracle} takes {}+{} qubits, got {}+{}",
                o.input_width(),
                o.output_width(),
                inputs.len(),
                outputs.len()
            )));
        }
        let all: Vec<usize> = inputs.iter().chain(outputs).copied().collect();
        check_targets(self.num_qubits, &all)?;
        self.ops.push(CircuitOp::Query {
            oracle: oracle.to_string(),
            inputs: inputs.to_vec(),
            outputs: outputs.to_vec(),
        });
        Ok(self)
    }

    pub fn measure(&mut self, qubits: &[usize], label: &str) -> Result<&mut Self> {
        if !valid_label(label) {
            return Err(validation(format!("invalid register label {label:?}")));
        }
        if qubits.is_empty() {
            return Err(validation("measurement needs at least one qubit"));
        }
        check_targets(self.num_qubits, qubits)?;
        let taken = self.ops.iter().any(|op| matches!(op, CircuitOp::Measure { label: l, .. } if l == label));
        if taken {
            return Err(validation(format!("register label {label:?} used twice")));
        }
        self.ops.push(CircuitOp::Measure { qubits: qubits.to_vec(), label: label.to_string() });
        Ok(self)
    }

    /// Appends the operations of `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(domain("appending a circuit of a different width"));
        }
        for (name, o) in &other.oracles {
            if let Some(existing) = self.oracles.get(name) {
                if existing != o {
                    return Err(validation(format!("conflicting definitions of oracle {name}")));
                }
            }
            self.oracles.insert(name.clone(), o.clone());
        }
        for op in &other.ops {
            if let CircuitOp::Measure { label, .. } = op {
                if self.measurement_labels().contains(&label.as_str()) {
                    return Err(validation(format!("register label {label:?} used twice")));
                }
            }
            self.ops.push(op.clone());
        }
        Ok(self)
    }

    pub fn measurement_labels(&self) -> Vec<&str> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                CircuitOp::Measure { label, .. } => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn query_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, CircuitOp::Query { .. })).count()
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|op| matches!(op, CircuitOp::Measure { .. }))
    }

    /// The reversed circuit with every gate replaced by its adjoint. Oracle
    /// queries are their own inverses.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut out = Circuit { num_qubits: self.num_qubits, ops: Vec::new(), oracles: self.oracles.clone() };
        for op in self.ops.iter().rev() {
            out.ops.push(match op {
                CircuitOp::Gate { gate, targets } => CircuitOp::Gate { gate: gate.adjoint(), targets: targets.clone() },
                CircuitOp::Query { .. } => op.clone(),
                CircuitOp::Measure { .. } => return Err(domain("a circuit with measurements has no inverse")),
            });
        }
        Ok(out)
    }

    /// Applies the unitary part of the circuit to `state`, returning the number of oracle queries.
    pub fn apply_unitary(&self, state: &mut StateVector) -> Result<usize> {
        let mut queries = 0;
        for op in &self.ops {
            queries += self.apply_unitary_op(op, state)?;
        }
        Ok(queries)
    }

    fn apply_unitary_op(&self, op: &CircuitOp, state: &mut StateVector) -> Result<usize> {
        match op {
            CircuitOp::Gate { gate, targets } => {
                state.apply_matrix_unchecked(gate.matrix(), targets);
                Ok(0)
            }
            CircuitOp::Query { oracle, inputs, outputs } => {
                let o = self.oracles.get(oracle).ok_or_else(|| validation(format!("unknown oracle {oracle}")))?;
                o.query(state, inputs, outputs)?;
                Ok(1)
            }
            CircuitOp::Measure { .. } => Err(domain("measurement inside a unitary-only evaluation")),
        }
    }

    /// Dense matrix of a measurement-free circuit.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.num_qubits > 12 {
            return Err(Error::Resource(format!("dense matrix of {} qubits", self.num_qubits)));
        }
        let dim = 1usize << self.num_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = StateVector::basis_state(self.num_qubits, col)?;
            self.apply_unitary(&mut s)?;
            for (row, amp) in s.amplitudes().iter().enumerate() {
                m[(row, col)] = *amp;
            }
        }
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let mut labels: Vec<&str> = Vec::new();
        for op in &self.ops {
            match op {
                CircuitOp::Gate { gate, targets } => {
                    if gate.arity() != targets.len() {
                        return Err(validation("gate arity does not match its targets"));
                    }
                    check_targets(self.num_qubits, targets)?;
                }
                CircuitOp::Query { oracle, inputs, outputs } => {
                    if !self.oracles.contains_key(oracle) {
                        return Err(validation(format!("unknown oracle {oracle}")));
                    }
                    let all: Vec<usize> = inputs.iter().chain(outputs).copied().collect();
                    check_targets(self.num_qubits, &all)?;
                }
                CircuitOp::Measure { qubits, label } => {
                    check_targets(self.num_qubits, qubits)?;
                    if labels.contains(&label.as_str()) {
                        return Err(validation(format!("register label {label:?} used twice")));
                    }
                    labels.push(label);
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a single run: register label to bit string.
pub type Outcome = BTreeMap<String, String>;

/// Canonical single-string key of a joint outcome, `label=bits` joined by spaces.
pub fn outcome_key(outcome: &Outcome) -> String {
    outcome.iter().map(|(l, b)| format!("{l}={b}")).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub num_qubits: usize,
    pub shots: u64,
    /// Oracle queries per shot.
    pub queries: usize,
    /// Per-register outcome counts.
    pub registers: BTreeMap<String, BTreeMap<String, u64>>,
    /// Joint outcome counts keyed by [`outcome_key`].
    pub joint: BTreeMap<String, u64>,
    pub final_state: Option<StateVector>,
}

impl RunResult {
    fn empty(num_qubits: usize, queries: usize) -> Self {
        Self {
            num_qubits,
            shots: 0,
            queries,
            registers: BTreeMap::new(),
            joint: BTreeMap::new(),
            final_state: None,
        }
    }

    fn record(&mut self, outcome: &Outcome) {
        self.shots += 1;
        for (label, bits) in outcome {
            *self.registers.entry(label.clone()).or_default().entry(bits.clone()).or_insert(0) += 1;
        }
        *self.joint.entry(outcome_key(outcome)).or_insert(0) += 1;
    }

    fn merge(mut self, other: RunResult) -> RunResult {
        self.shots += other.shots;
        for (label, hist) in other.registers {
            let dst = self.registers.entry(label).or_default();
            for (bits, n) in hist {
                *dst.entry(bits).or_insert(0) += n;
            }
        }
        for (key, n) in other.joint {
            *self.joint.entry(key).or_insert(0) += n;
        }
        self
    }

    /// Bit string of `label` for a single-shot result.
    pub fn register(&self, label: &str) -> Option<&str> {
        let hist = self.registers.get(label)?;
        if self.shots != 1 {
            return None;
        }
        hist.keys().next().map(|s| s.as_str())
    }

    pub fn count(&self, label: &str, bits: &str) -> u64 {
        self.registers.get(label).and_then(|h| h.get(bits)).copied().unwrap_or(0)
    }

    pub fn report(&self, include_amplitudes: bool) -> RunReport {
        RunReport {
            qubits: self.num_qubits,
            shots: self.shots,
            queries_per_shot: self.queries,
            registers: self.registers.clone(),
            amplitudes: match (&self.final_state, include_amplitudes) {
                (Some(s), true) => Some(s.amplitudes().iter().map(|a| [a.re, a.im]).collect()),
                _ => None,
            },
        }
    }

    pub fn to_json(&self, include_amplitudes: bool) -> String {
        serde_json::to_string_pretty(&self.report(include_amplitudes)).expect("plain data")
    }

    /// Line-oriented text document. Amplitudes are written with 17 significant digits.
    pub fn to_text(&self, include_amplitudes: bool) -> String {
        let mut out = format!("qubits {}\nshots {}\nqueries_per_shot {}\n", self.num_qubits, self.shots, self.queries);
        for (label, hist) in &self.registers {
            for (bits, n) in hist {
                out.push_str(&format!("count {label} {bits} {n}\n"));
            }
        }
        if include_amplitudes {
            if let Some(s) = &self.final_state {
                for (i, a) in s.amplitudes().iter().enumerate() {
                    out.push_str(&format!("amplitude {i} {:.16e} {:.16e}\n", a.re, a.im));
                }
            }
        }
        out
    }

    /// `outcome,count` rows over the joint histogram.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count\n");
        for (key, n) in &self.joint {
            out.push_str(&format!("{key},{n}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub qubits: usize,
    pub shots: u64,
    pub queries_per_shot: usize,
    pub registers: BTreeMap<String, BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

/// Runs the circuit once from `|input>`, collapsing at each measurement.
pub fn execute(circuit: &Circuit, input: usize, rng: &mut SimRng) -> Result<RunResult> {
    circuit.validate()?;
    let mut state = StateVector::basis_state(circuit.num_qubits, input)?;
    let (outcome, queries) = run_ops(circuit, circuit.ops(), &mut state, rng)?;
    let mut result = RunResult::empty(circuit.num_qubits, queries);
    result.record(&outcome);
    result.final_state = Some(state);
    Ok(result)
}

fn run_ops(circuit: &Circuit, ops: &[CircuitOp], state: &mut StateVector, rng: &mut SimRng) -> Result<(Outcome, usize)> {
    let mut outcome = Outcome::new();
    let mut queries = 0;
    for op in ops {
        match op {
            CircuitOp::Measure { qubits, label } => {
                let rec = state.measure(qubits, rng)?;
                outcome.insert(label.clone(), rec.bit_string());
            }
            other => queries += circuit.apply_unitary_op(other, state)?,
        }
    }
    Ok((outcome, queries))
}

/// `shots` independent runs. Shot `k` uses the stream `derived(seed, k)`, so the
/// histogram does not depend on the thread count. Circuits without
/// measurements are measured in full at the end under [`IMPLICIT_REGISTER`].
pub fn sample(circuit: &Circuit, input: usize, shots: u64, seed: u64) -> Result<RunResult> {
    if shots == 0 {
        return Err(domain("shots must be at least 1"));
    }
    circuit.validate()?;
    let mut circuit = circuit.clone();
    if !circuit.has_measurements() {
        let all: Vec<usize> = (0..circuit.num_qubits).collect();
        circuit.measure(&all, IMPLICIT_REGISTER)?;
    }
    // simulate the measurement-free prefix once
    let split = circuit.ops.iter().position(|op| matches!(op, CircuitOp::Measure { .. })).unwrap_or(0);
    let mut prefix_state = StateVector::basis_state(circuit.num_qubits, input)?;
    let mut prefix_queries = 0;
    for op in &circuit.ops[..split] {
        prefix_queries += circuit.apply_unitary_op(op, &mut prefix_state)?;
    }
    let suffix = &circuit.ops[split..];
    let suffix_queries = suffix.iter().filter(|op| matches!(op, CircuitOp::Query { .. })).count();
    let circuit = &circuit;
    let prefix_state = &prefix_state;
    let result = (0..shots)
        .into_par_iter()
        .map(|k| -> Result<RunResult> {
            let mut rng = derived(seed, k);
            let mut state = prefix_state.clone();
            let (outcome, _) = run_ops(circuit, suffix, &mut state, &mut rng)?;
            let mut r = RunResult::empty(circuit.num_qubits, 0);
            r.record(&outcome);
            Ok(r)
        })
        .try_reduce(|| RunResult::empty(circuit.num_qubits, 0), |a, b| Ok(a.merge(b)))?;
    Ok(RunResult { queries: prefix_queries + suffix_queries, ..result })
}

/// Exact joint outcome distribution by enumerating every measurement branch.
pub fn exact_distribution(circuit: &Circuit, input: usize) -> Result<BTreeMap<String, f64>> {
    circuit.validate()?;
    let mut circuit = circuit.clone();
    if !circuit.has_measurements() {
        let all: Vec<usize> = (0..circuit.num_qubits).collect();
        circuit.measure(&all, IMPLICIT_REGISTER)?;
    }
    let state = StateVector::basis_state(circuit.num_qubits, input)?;
    let mut out = BTreeMap::new();
    branch(&circuit, 0, state, 1.0, Outcome::new(), &mut out)?;
    Ok(out)
}

fn branch(
    circuit: &Circuit,
    start: usize,
    mut state: StateVector,
    weight: f64,
    outcome: Outcome,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    for (pos, op) in circuit.ops.iter().enumerate().skip(start) {
        if let CircuitOp::Measure { qubits, label } = op {
            let dist = state.outcome_distribution(qubits)?;
            for (value, p) in dist.into_iter().enumerate() {
                if p < MIN_BRANCH_PROBABILITY {
                    continue;
                }
                let bits = crate::state::value_to_bits(value, qubits.len());
                let mut next = state.clone();
                let rec = next.collapse(qubits, &bits)?;
                let mut o = outcome.clone();
                o.insert(label.clone(), rec.bit_string());
                branch(circuit, pos + 1, next, weight * p, o, out)?;
            }
            return Ok(());
        }
        circuit.apply_unitary_op(op, &mut state)?;
    }
    *out.entry(outcome_key(&outcome)).or_insert(0.0) += weight;
    Ok(())
}

/// Random measurement-free circuit of `depth` gates drawn from `H`, `X`, `Z`,
/// `R_k`, random `G`, CNOT, controlled `G` and (for three or more qubits) Toffoli.
pub fn random_circuit(num_qubits: usize, depth: usize, rng: &mut SimRng) -> Result<Circuit> {
    use rand::seq::index::sample as pick;
    use rand::Rng;
    if num_qubits == 0 {
        return Err(domain("a random circuit needs at least one qubit"));
    }
    let mut c = Circuit::new(num_qubits);
    for _ in 0..depth {
        let kinds = match num_qubits {
            1 => 5,
            2 => 7,
            _ => 8,
        };
        let (gate, arity) = match rng.random_range(0..kinds) {
            0 => (named_gate(NamedGate::H)?, 1),
            1 => (named_gate(NamedGate::Not)?, 1),
            2 => (named_gate(NamedGate::PauliZ)?, 1),
            3 => (named_gate(NamedGate::Rk(rng.random_range(1..5)))?, 1),
            4 => (named_gate(NamedGate::G { theta: rng.random_range(0.0..6.3), phi: rng.random_range(0.0..6.3) })?, 1),
            5 => (named_gate(NamedGate::Cnot)?, 2),
            6 => (controlled(&named_gate(NamedGate::G { theta: rng.random_range(0.0..6.3), phi: rng.random_range(0.0..6.3) })?, 1)?, 2),
            _ => (named_gate(NamedGate::Toffoli)?, 3),
        };
        let targets = pick(rng, num_qubits, arity).into_vec();
        c.gate(gate, &targets)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use num_complex::Complex64;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.named(NamedGate::H, &[0]).unwrap().named(NamedGate::Cnot, &[0, 1]).unwrap();
        c
    }

    #[test]
    fn bell_state_from_kernel() {
        let r = execute(&bell(), 0, &mut seeded(0)).unwrap();
        let s = r.final_state.unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - Complex64::new(h, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(3) - Complex64::new(h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_circuit_keeps_input() {
        let r = execute(&Circuit::new(3), 5, &mut seeded(0)).unwrap();
        assert_eq!(r.final_state.unwrap().amplitude(5), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn bell_sampling() {
        let mut c = bell();
        c.measure(&[0, 1], "out").unwrap();
        let r = sample(&c, 0, 10_000, 3).unwrap();
        assert_eq!(r.shots, 10_000);
        let (n00, n11) = (r.count("out", "00"), r.count("out", "11"));
        assert!((4700..=5300).contains(&n00) && (4700..=5300).contains(&n11));
        assert_eq!(n00 + n11, 10_000);
        assert_eq!(sample(&c, 0, 10_000, 3).unwrap(), r);
    }

    #[test]
    fn single_shot_deterministic() {
        let mut c = Circuit::new(1);
        c.named(NamedGate::Not, &[0]).unwrap().measure(&[0], "m").unwrap();
        let r = sample(&c, 0, 1, 9).unwrap();
        assert_eq!(r.registers["m"].len(), 1);
        assert_eq!(r.count("m", "1"), 1);
    }

    #[test]
    fn mid_circuit_measurement_distribution() {
        let mut c = Circuit::new(2);
        c.named(NamedGate::H, &[0]).unwrap();
        c.measure(&[0], "a").unwrap();
        c.named(NamedGate::Cnot, &[0, 1]).unwrap();
        c.measure(&[1], "b").unwrap();
        let d = exact_distribution(&c, 0).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d["a=0 b=0"] - 0.5).abs() < 1e-12);
        assert!((d["a=1 b=1"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn builder_rejects_bad_ops() {
        let mut c = Circuit::new(2);
        assert!(c.named(NamedGate::H, &[2]).is_err());
        assert!(c.named(NamedGate::Cnot, &[1, 1]).is_err());
        assert!(c.named(NamedGate::Cnot, &[1]).is_err());
        c.measure(&[0], "m").unwrap();
        assert!(c.measure(&[1], "m").is_err());
        assert!(c.query("f", &[0], &[1]).is_err());
    }

    #[test]
    fn query_counter() {
        let mut c = Circuit::new(2);
        c.register_oracle("f", make_oracle(vec![0, 1]).unwrap()).unwrap();
        c.query("f", &[0], &[1]).unwrap().query("f", &[0], &[1]).unwrap();
        let r = execute(&c, 2, &mut seeded(1)).unwrap();
        assert_eq!(r.queries, 2);
        assert_eq!(r.final_state.unwrap().amplitude(2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut c = bell();
        c.named(NamedGate::Rk(3), &[1]).unwrap();
        let mut both = c.clone();
        both.append(&c.inverse().unwrap()).unwrap();
        let m = both.to_matrix().unwrap();
        assert!((m - CMatrix::identity(4, 4)).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn report_formats() {
        let mut c = bell();
        c.measure(&[0, 1], "out").unwrap();
        let r = execute(&c, 0, &mut seeded(2)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json(true)).unwrap();
        assert_eq!(json["shots"], 1);
        assert_eq!(json["amplitudes"].as_array().unwrap().len(), 4);
        assert!(r.to_text(true).contains("amplitude 0 "));
        assert!(r.to_csv().starts_with("outcome,count\n"));
    }
}
