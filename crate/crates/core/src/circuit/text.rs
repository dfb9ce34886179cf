//! Circuit text format.
//!
//! ```text
//! # Bell pair
//! qubits 2
//! h 0
//! cnot 0 1
//! measure 0 1 -> out
//! ```
//!
//! One operation per line, `#` comments. Gates are lowercase mnemonics with
//! parameters in parentheses (`rk(3) 2`, `g(0.5,1.2) 0`, `c2-u(0.4) 0 1 2`,
//! `adj-rk(2) 0`, `unitary(re,im,...) 0` with row-major entries). Oracle
//! queries read `query <name> <inputs> -> <outputs>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Circuit, CircuitOp, Oracle};
use crate::error::{Error, Result};
use crate::gates::{add_controls, named_gate, CMatrix, GateLabel, GateMatrix, NamedGate};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn params(body: &str) -> std::result::Result<Vec<f64>, String> {
    body.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad parameter {p:?}")))
        .collect()
}

fn expect_params(name: &str, got: &[f64], n: usize) -> std::result::Result<(), String> {
    if got.len() == n {
        Ok(())
    } else {
        Err(format!("{name} takes {n} parameter(s), got {}", got.len()))
    }
}

/// Parses one gate mnemonic.
pub fn parse_gate(spec: &str) -> std::result::Result<GateMatrix, String> {
    if let Some(rest) = spec.strip_prefix("adj-") {
        return Ok(parse_gate(rest)?.adjoint());
    }
    if let Some(rest) = spec.strip_prefix('c') {
        if let Some((count, base)) = rest.split_once('-') {
            if !count.is_empty() && count.chars().all(|c| c.is_ascii_digit()) {
                let n: usize = count.parse().map_err(|_| format!("bad control count {count:?}"))?;
                if n == 0 {
                    return Err("control count must be positive".into());
                }
                return Ok(add_controls(&parse_gate(base)?, n));
            }
        }
    }
    let (name, args) = match spec.split_once('(') {
        Some((name, rest)) => {
            let body = rest.strip_suffix(')').ok_or_else(|| format!("unclosed parameter list in {spec:?}"))?;
            (name, Some(body))
        }
        None => (spec, None),
    };
    let fixed = |g: NamedGate| -> std::result::Result<GateMatrix, String> {
        if args.is_some() {
            return Err(format!("{name} takes no parameters"));
        }
        named_gate(g).map_err(|e| e.to_string())
    };
    match name {
        "i" | "id" => fixed(NamedGate::Identity),
        "x" | "not" => fixed(NamedGate::Not),
        "y" => fixed(NamedGate::PauliY),
        "z" => fixed(NamedGate::PauliZ),
        "h" => fixed(NamedGate::H),
        "cnot" | "xor" => fixed(NamedGate::Cnot),
        "toffoli" => fixed(NamedGate::Toffoli),
        "swap" => fixed(NamedGate::Swap),
        "rk" | "g" | "u" | "w" | "unitary" => {
            let p = params(args.ok_or_else(|| format!("{name} needs parameters"))?)?;
            let gate = match name {
                "rk" => {
                    expect_params(name, &p, 1)?;
                    if p[0].fract() != 0.0 || p[0] < 1.0 || p[0] > u32::MAX as f64 {
                        return Err(format!("rk needs a positive integer, got {}", p[0]));
                    }
                    NamedGate::Rk(p[0] as u32)
                }
                "g" => {
                    expect_params(name, &p, 2)?;
                    NamedGate::G { theta: p[0], phi: p[1] }
                }
                "u" => {
                    expect_params(name, &p, 1)?;
                    NamedGate::U { alpha: p[0] }
                }
                "w" => {
                    expect_params(name, &p, 1)?;
                    NamedGate::W { alpha: p[0] }
                }
                _ => {
                    let entries = p.len() / 2;
                    let dim = (entries as f64).sqrt().round() as usize;
                    if p.len() % 2 != 0 || dim * dim != entries || !dim.is_power_of_two() || dim < 2 {
                        return Err(format!("unitary needs 2·4^k numbers, got {}", p.len()));
                    }
                    let m = CMatrix::from_row_iterator(
                        dim,
                        dim,
                        p.chunks(2).map(|pair| Complex64::new(pair[0], pair[1])),
                    );
                    return GateMatrix::custom(m).map_err(|e| e.to_string());
                }
            };
            named_gate(gate).map_err(|e| e.to_string())
        }
        _ => Err(format!("unknown gate {spec:?}")),
    }
}

fn render_label(label: &GateLabel, m: &CMatrix, out: &mut String) {
    match label {
        GateLabel::Custom => {
            out.push_str("unitary(");
            let mut first = true;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let z = m[(i, j)];
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    let _ = write!(out, "{},{}", z.re, z.im);
                }
            }
            out.push(')');
        }
        GateLabel::Controlled { controls, base } => {
            let _ = write!(out, "c{controls}-");
            let inner = m.nrows() >> controls;
            let off = m.nrows() - inner;
            let block = m.view((off, off), (inner, inner)).clone_owned();
            render_label(base, &block, out);
        }
        GateLabel::Adjoint(base) => {
            out.push_str("adj-");
            render_label(base, &m.adjoint(), out);
        }
        GateLabel::Named(_) => {
            let _ = write!(out, "{label}");
        }
    }
}

/// Mnemonic for a gate, reparseable by [`parse_gate`].
pub fn render_gate(gate: &GateMatrix) -> String {
    let mut out = String::new();
    render_label(gate.label(), gate.matrix(), &mut out);
    out
}

fn parse_qubits(line: usize, tokens: &[&str]) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line, format!("expected a qubit index, got {t:?}"))))
        .collect()
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::Validation(format!("line {line}: {m}")),
        Error::Domain(m) => Error::Domain(format!("line {line}: {m}")),
        other => other,
    }
}

/// Parses a circuit that makes no oracle queries.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_circuit_with(text, &BTreeMap::new())
}

/// Parses a circuit, resolving `query` lines against `oracles`.
pub fn parse_circuit_with(text: &str, oracles: &BTreeMap<String, Oracle>) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(c) = circuit.as_mut() else {
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens.as_slice() {
                ["qubits", count] => {
                    let k: usize = count.parse().map_err(|_| parse_err(line, format!("bad qubit count {count:?}")))?;
                    if k == 0 {
                        return Err(parse_err(line, "qubit count must be positive"));
                    }
                    let mut c = Circuit::new(k);
                    for (name, o) in oracles {
                        c.register_oracle(name, o.clone()).map_err(|e| at_line(line, e))?;
                    }
                    circuit = Some(c);
                    continue;
                }
                _ => return Err(parse_err(line, "expected `qubits <n>` before any operation")),
            }
        };
        if let Some(rest) = content.strip_prefix("measure ") {
            let (qs, label) = rest.split_once("->").ok_or_else(|| parse_err(line, "measure needs `-> label`"))?;
            let qubits = parse_qubits(line, &qs.split_whitespace().collect::<Vec<_>>())?;
            c.measure(&qubits, label.trim()).map_err(|e| at_line(line, e))?;
        } else if let Some(rest) = content.strip_prefix("query ") {
            let (head, outs) = rest.split_once("->").ok_or_else(|| parse_err(line, "query needs `-> outputs`"))?;
            let mut head = head.split_whitespace();
            let name = head.next().ok_or_else(|| parse_err(line, "query needs an oracle name"))?;
            let inputs = parse_qubits(line, &head.collect::<Vec<_>>())?;
            let outputs = parse_qubits(line, &outs.split_whitespace().collect::<Vec<_>>())?;
            if !c.oracles().contains_key(name) {
                return Err(parse_err(line, format!("unknown oracle {name:?}")));
            }
            c.query(name, &inputs, &outputs).map_err(|e| at_line(line, e))?;
        } else if content.starts_with("qubits") {
            return Err(parse_err(line, "duplicate `qubits` header"));
        } else {
            // the gate spec ends at the last ')' if it has parameters, else at the first space
            let split = match (content.find('('), content.rfind(')')) {
                (Some(open), Some(close)) if open < close && !content[..open].contains(char::is_whitespace) => close + 1,
                _ => content.find(char::is_whitespace).unwrap_or(content.len()),
            };
            let spec: String = content[..split].chars().filter(|c| !c.is_whitespace()).collect();
            let gate = parse_gate(&spec).map_err(|m| parse_err(line, m))?;
            let targets = parse_qubits(line, &content[split..].split_whitespace().collect::<Vec<_>>())?;
            if targets.len() != gate.arity() {
                return Err(parse_err(
                    line,
                    format!("{spec} acts on {} qubit(s), {} given", gate.arity(), targets.len()),
                ));
            }
            c.gate(gate, &targets).map_err(|e| at_line(line, e))?;
        }
    }
    circuit.ok_or_else(|| parse_err(1, "missing `qubits <n>` header"))
}

/// Text form of a circuit; [`parse_circuit_with`] inverts it given the same oracles.
pub fn render_circuit(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.num_qubits());
    let join = |qs: &[usize]| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
    for op in circuit.ops() {
        match op {
            CircuitOp::Gate { gate, targets } => {
                let _ = writeln!(out, "{} {}", render_gate(gate), join(targets));
            }
            CircuitOp::Query { oracle, inputs, outputs } => {
                let _ = writeln!(out, "query {oracle} {} -> {}", join(inputs), join(outputs));
            }
            CircuitOp::Measure { qubits, label } => {
                let _ = writeln!(out, "measure {} -> {label}", join(qubits));
            }
        }
    }
    out
}
