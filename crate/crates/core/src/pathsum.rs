//! Feynman path sums in polynomial space, and the stochastic circuits they are
//! contrasted with.
//!
//! A path is a sequence of basis configurations, one per time step, and its
//! weight is the product of the gate entries along it. [`path_amplitude`]
//! walks the paths depth first, so at any moment it holds only the current
//! path: one configuration per step.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, CircuitOp};
use crate::error::{domain, Error, Result};
use crate::gates::{named_gate, NamedGate};
use crate::state::{read_bits, write_bits};

/// Largest register for which [`path_distribution`] enumerates outcomes.
pub const MAX_ENUMERATED_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PathStats {
    /// Nonzero-weight edges followed.
    pub edges: u64,
    /// Complete paths reaching the final configuration.
    pub paths: u64,
    /// Largest number of configurations held at once.
    pub max_live_configurations: usize,
}

/// One time step as seen by the walker: the targets and, for every input
/// value of the targets, the nonzero `(output value, weight)` pairs.
struct Step {
    targets: Vec<usize>,
    edges: Vec<Vec<(usize, Complex64)>>,
}

fn steps(circuit: &Circuit) -> Result<Vec<Step>> {
    let mut out = Vec::new();
    for op in circuit.ops() {
        match op {
            CircuitOp::Gate { gate, targets } => {
                let m = gate.matrix();
                let d = m.nrows();
                let edges = (0..d)
                    .map(|col| (0..d).filter(|&row| m[(row, col)] != Complex64::new(0.0, 0.0)).map(|row| (row, m[(row, col)])).collect())
                    .collect();
                out.push(Step { targets: targets.clone(), edges });
            }
            CircuitOp::Query { oracle, inputs, outputs } => {
                let f = circuit.oracle(oracle).ok_or_else(|| domain(format!("unknown oracle {oracle}")))?;
                let targets: Vec<usize> = inputs.iter().chain(outputs).copied().collect();
                let w = outputs.len();
                let one = Complex64::new(1.0, 0.0);
                let edges = (0..1usize << targets.len())
                    .map(|v| {
                        let (i, j) = (v >> w, v & ((1 << w) - 1));
                        vec![(((i << w) | (j ^ f.eval(i) as usize)), one)]
                    })
                    .collect();
                out.push(Step { targets, edges });
            }
            CircuitOp::Measure { .. } => {
                return Err(domain("path sums need a circuit without measurements"));
            }
        }
    }
    Ok(out)
}

struct Walker<'a> {
    n: usize,
    steps: &'a [Step],
    /// Bits still free to change after step `t`: union of later targets.
    later_mask: Vec<usize>,
    target: usize,
    live: usize,
    stats: PathStats,
}

impl Walker<'_> {
    fn walk(&mut self, t: usize, config: usize, weight: Complex64) -> Complex64 {
        self.live += 1;
        self.stats.max_live_configurations = self.stats.max_live_configurations.max(self.live);
        let result = if t == self.steps.len() {
            if config == self.target {
                self.stats.paths += 1;
                weight
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else if (config ^ self.target) & !self.later_mask[t] != 0 {
            // a bit no later gate touches already disagrees with the target
            Complex64::new(0.0, 0.0)
        } else {
            let step = &self.steps[t];
            let input = read_bits(self.n, config, &step.targets);
            let mut sum = Complex64::new(0.0, 0.0);
            for &(out, w) in &step.edges[input] {
                self.stats.edges += 1;
                let next = write_bits(self.n, config, &step.targets, out);
                sum += self.walk(t + 1, next, weight * w);
            }
            sum
        };
        self.live -= 1;
        result
    }
}

fn check_index(n: usize, index: usize, what: &str) -> Result<()> {
    if n < usize::BITS as usize && index >> n != 0 {
        return Err(domain(format!("{what} index {index} out of range for {n} qubits")));
    }
    Ok(())
}

/// `<j| C |i>` as a sum over paths, with traversal statistics.
pub fn path_amplitude_with_stats(circuit: &Circuit, i: usize, j: usize) -> Result<(Complex64, PathStats)> {
    let n = circuit.num_qubits();
    check_index(n, i, "initial")?;
    check_index(n, j, "final")?;
    let steps = steps(circuit)?;
    let mut later_mask = vec![0usize; steps.len() + 1];
    for t in (0..steps.len()).rev() {
        let bits = steps[t].targets.iter().fold(0usize, |acc, &q| acc | 1 << (n - 1 - q));
        later_mask[t] = later_mask[t + 1] | bits;
    }
    let mut walker = Walker { n, steps: &steps, later_mask, target: j, live: 0, stats: PathStats::default() };
    let amp = walker.walk(0, i, Complex64::new(1.0, 0.0));
    Ok((amp, walker.stats))
}

pub fn path_amplitude(circuit: &Circuit, i: usize, j: usize) -> Result<Complex64> {
    path_amplitude_with_stats(circuit, i, j).map(|(a, _)| a)
}

/// `Prob(j) = |<j|C|i>|²` for every `j`, one path sum per outcome.
pub fn path_distribution(circuit: &Circuit, i: usize) -> Result<Vec<f64>> {
    let n = circuit.num_qubits();
    if n > MAX_ENUMERATED_QUBITS {
        return Err(Error::Resource(format!("enumerating 2^{n} outcomes exceeds the {MAX_ENUMERATED_QUBITS}-qubit limit")));
    }
    (0..1usize << n).into_par_iter().map(|j| path_amplitude(circuit, i, j).map(|a| a.norm_sqr())).collect()
}

/// Tolerance on column sums of stochastic matrices.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;

/// Circuit of column-stochastic matrices on classical bits.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticCircuit {
    num_bits: usize,
    nodes: Vec<(DMatrix<f64>, Vec<usize>)>,
}

/// The one-bit matrix with every entry `1/2`.
pub fn randomizer() -> DMatrix<f64> {
    DMatrix::from_element(2, 2, 0.5)
}

impl StochasticCircuit {
    pub fn new(num_bits: usize) -> Self {
        Self { num_bits, nodes: Vec::new() }
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn nodes(&self) -> &[(DMatrix<f64>, Vec<usize>)] {
        &self.nodes
    }

    pub fn push(&mut self, matrix: DMatrix<f64>, targets: &[usize]) -> Result<&mut Self> {
        let d = 1usize << targets.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(domain(format!("{}x{} matrix on {} bits", matrix.nrows(), matrix.ncols(), targets.len())));
        }
        if matrix.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(domain("stochastic matrices have nonnegative entries"));
        }
        if let Some(c) = (0..d).find(|&c| (matrix.column(c).sum() - 1.0).abs() > STOCHASTIC_TOLERANCE) {
            return Err(domain(format!("column {c} sums to {}", matrix.column(c).sum())));
        }
        let mut seen = 0usize;
        for &t in targets {
            if t >= self.num_bits || seen >> t & 1 == 1 {
                return Err(Error::Validation(format!("bad target {t} for {} bits", self.num_bits)));
            }
            seen |= 1 << t;
        }
        self.nodes.push((matrix, targets.to_vec()));
        Ok(self)
    }

    /// Text form: a `stochastic` header, `bits N` (or `qubits N`), then one
    /// node per line: `r`, `id`, `not`, `cnot`, `toffoli`, `swap`, or
    /// `matrix(a,b,...)` with row-major entries, followed by the targets.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, message: String| Error::Parse { line, message };
        match lines.next() {
            Some((_, "stochastic")) => {}
            Some((k, other)) => return Err(err(k, format!("expected `stochastic` header, found {other:?}"))),
            None => return Err(err(0, "empty stochastic circuit".into())),
        }
        let (k, size) = lines.next().ok_or_else(|| err(0, "missing bit count".into()))?;
        let n = size
            .strip_prefix("bits ")
            .or_else(|| size.strip_prefix("qubits "))
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| err(k, format!("expected `bits N`, found {size:?}")))?;
        let mut sc = Self::new(n);
        for (k, line) in lines {
            let (spec, rest) = match (line.find('('), line.rfind(')')) {
                (Some(_), Some(close)) => (&line[..=close], &line[close + 1..]),
                _ => line.split_once(char::is_whitespace).unwrap_or((line, "")),
            };
            let targets: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(k, format!("bad target {t:?}"))))
                .collect::<Result<_>>()?;
            let matrix = node_matrix(spec).map_err(|m| err(k, m))?;
            sc.push(matrix, &targets).map_err(|e| err(k, e.to_string()))?;
        }
        Ok(sc)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("stochastic\nbits {}\n", self.num_bits);
        for (m, t) in &self.nodes {
            let entries: Vec<String> = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| (r, c))).map(|rc| format!("{}", m[rc])).collect();
            let targets: Vec<String> = t.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("matrix({}) {}\n", entries.join(","), targets.join(" ")));
        }
        out
    }
}

fn node_matrix(spec: &str) -> std::result::Result<DMatrix<f64>, String> {
    if let Some(body) = spec.strip_prefix("matrix(").and_then(|s| s.strip_suffix(')')) {
        let v: Vec<f64> = body
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad entry {p:?}")))
            .collect::<std::result::Result<_, _>>()?;
        let d = (v.len() as f64).sqrt().round() as usize;
        if d * d != v.len() || !d.is_power_of_two() {
            return Err(format!("{} entries do not form a 2^k square matrix", v.len()));
        }
        return Ok(DMatrix::from_row_slice(d, d, &v));
    }
    let named = match spec {
        "r" => return Ok(randomizer()),
        "i" | "id" => NamedGate::Identity,
        "x" | "not" => NamedGate::Not,
        "cnot" | "xor" => NamedGate::Cnot,
        "toffoli" => NamedGate::Toffoli,
        "swap" => NamedGate::Swap,
        other => return Err(format!("unknown stochastic node {other:?}")),
    };
    let m = named_gate(named).map_err(|e| e.to_string())?;
    Ok(m.matrix().map(|z| z.re))
}

/// Propagates a distribution through the matrix chain.
pub fn stochastic_simulate(sc: &StochasticCircuit, input: &[f64]) -> Result<Vec<f64>> {
    let n = sc.num_bits;
    if input.len() != 1 << n {
        return Err(domain(format!("input distribution has {} entries, expected {}", input.len(), 1usize << n)));
    }
    let mut p = input.to_vec();
    for (m, targets) in &sc.nodes {
        let mut next = vec![0.0; p.len()];
        for (x, &px) in p.iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            let col = read_bits(n, x, targets);
            for row in 0..m.nrows() {
                next[write_bits(n, x, targets, row)] += m[(row, col)] * px;
            }
        }
        p = next;
    }
    Ok(p)
}

/// Point mass on basis string `i`.
pub fn point_mass(n: usize, i: usize) -> Vec<f64> {
    let mut p = vec![0.0; 1 << n];
    p[i] = 1.0;
    p
}

/// The two-bit example: `H` (or `R`) on the second bit, the first, then the
/// second again, in diagram order.
pub fn interference_example() -> (Circuit, StochasticCircuit) {
    let mut q = Circuit::new(2);
    for t in [1, 0, 1] {
        q.named(NamedGate::H, &[t]).expect("valid target");
    }
    let mut s = StochasticCircuit::new(2);
    for t in [1, 0, 1] {
        s.push(randomizer(), &[t]).expect("valid node");
    }
    (q, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn interference_contrast() {
        let (q, s) = interference_example();
        let a: Vec<Complex64> = (0..4).map(|j| path_amplitude(&q, 3, j).unwrap()).collect();
        assert_eq!(a[0b00].norm(), 0.0);
        assert_eq!(a[0b10].norm(), 0.0);
        assert!((a[0b01] - FRAC_1_SQRT_2).norm() < 1e-12);
        assert!((a[0b11] + FRAC_1_SQRT_2).norm() < 1e-12);
        let p = stochastic_simulate(&s, &point_mass(2, 3)).unwrap();
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn single_gate_and_bell() {
        let mut c = Circuit::new(1);
        c.named(NamedGate::G { theta: 0.3, phi: 0.2 }, &[0]).unwrap();
        let m = named_gate(NamedGate::G { theta: 0.3, phi: 0.2 }).unwrap();
        assert!((path_amplitude(&c, 0, 1).unwrap() - m.matrix()[(1, 0)]).norm() < 1e-15);
        let mut bell = Circuit::new(2);
        bell.named(NamedGate::H, &[0]).unwrap().named(NamedGate::Cnot, &[0, 1]).unwrap();
        let p = path_distribution(&bell, 0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
        assert_eq!(path_distribution(&Circuit::new(3), 5).unwrap()[5], 1.0);
    }

    #[test]
    fn rejects_measurement_and_bad_matrices() {
        let mut c = Circuit::new(1);
        c.measure(&[0], "m").unwrap();
        assert!(path_amplitude(&c, 0, 0).is_err());
        let mut s = StochasticCircuit::new(1);
        assert!(s.push(DMatrix::from_row_slice(2, 2, &[0.5, 0.4, 0.5, 0.5]), &[0]).is_err());
        assert!(s.push(DMatrix::from_row_slice(2, 2, &[1.5, 0.0, -0.5, 1.0]), &[0]).is_err());
    }

    #[test]
    fn stochastic_text_round_trip() {
        let sc = StochasticCircuit::parse("stochastic\nbits 2\nr 1\nr 0 # first bit\nmatrix(0.5,0.5,0.5,0.5) 1\n").unwrap();
        assert_eq!(sc, interference_example().1);
        assert_eq!(StochasticCircuit::parse(&sc.to_text()).unwrap(), sc);
        assert!(matches!(StochasticCircuit::parse("stochastic\nbits 1\nh 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(StochasticCircuit::parse("qubits 1\n").is_err());
    }

    #[test]
    fn wide_register_without_state_vector() {
        let mut c = Circuit::new(40);
        for q in 0..40 {
            c.named(NamedGate::H, &[q]).unwrap();
        }
        let (amp, stats) = path_amplitude_with_stats(&c, 0, 0).unwrap();
        assert!((amp.re - 2f64.powi(-20)).abs() < 1e-18);
        assert!(stats.max_live_configurations <= 41);
    }
}
