//! Approximate synthesis of three-qubit unitaries from the doubly-controlled
//! pair `U3`, `W3`.
//!
//! The target is split into eigenphase factors `U = U_7 ... U_0`. Each factor
//! is `R† D R`, where `R` rotates the eigenvector onto `|111>` through
//! two-level phase alignments (powers of `W3`) and real-plane rotations
//! (powers of `U3`), and `D` puts the eigenphase on `|111>`. Basis
//! permutations needed to reach each coordinate are built from `U3`/`W3`
//! powers as well.
//!
//! `U3` and `W3` act only where both controls are `1`, so on their own they fix
//! every basis state with fewer than two ones. Two ancilla qubits held in
//! `|1>` supply the unconditioned and singly-conditioned versions; ancillas are
//! only ever used as controls and are returned untouched. The reported
//! distance is measured on the ancilla-`|11>` block.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, validation, Error, Result};
use crate::gates::{
    add_controls, default_alpha, matrix_power, named_gate, phase_invariant_distance, unitary_eigen, CMatrix,
    GateLabel, GateMatrix, GateSequence, NamedGate,
};
use crate::state::StateVector;

/// Data wires are `0..3`; these two wires are ancillas prepared in `|1>`.
pub const ANCILLAS: [usize; 2] = [3, 4];
const TOTAL_QUBITS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisConfig {
    /// Rotation angle of `U` and `W`, in turns.
    pub alpha: f64,
    /// Largest repetition count considered for a single `U3`/`W3` power.
    pub scan_cap: u64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self { alpha: default_alpha(), scan_cap: 1 << 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UwGate {
    U3,
    W3,
}

/// `power` consecutive applications of a doubly-controlled gate with
/// controls `wires[0]`, `wires[1]` and target `wires[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UwStep {
    pub gate: UwGate,
    pub wires: [usize; 3],
    pub power: u64,
}

#[derive(Debug, Clone)]
pub struct UwSynthesis {
    pub steps: Vec<UwStep>,
    /// Verified phase-invariant operator-norm distance to the target.
    pub distance: f64,
    /// Total number of `U3`/`W3` applications.
    pub length: u64,
    pub max_power: u64,
    /// Number of two-level blocks the construction needed before approximation.
    pub blocks: usize,
    pub config: SynthesisConfig,
}

impl UwSynthesis {
    pub fn num_qubits(&self) -> usize {
        TOTAL_QUBITS
    }

    /// Operator on the data wires with the ancillas in `|11>`.
    pub fn effective_operator(&self) -> Result<CMatrix> {
        effective_operator(&self.steps, self.config.alpha)
    }

    /// Expands powers into individual applications. Refuses sequences longer than `max_len`.
    pub fn to_gate_sequence(&self, max_len: u64) -> Result<GateSequence> {
        if self.length > max_len {
            return Err(Error::Resource(format!(
                "sequence has {} applications, limit {max_len}",
                self.length
            )));
        }
        let u3 = uw_gate(UwGate::U3, self.config.alpha);
        let w3 = uw_gate(UwGate::W3, self.config.alpha);
        let mut seq = GateSequence::new(TOTAL_QUBITS);
        for step in &self.steps {
            let g = match step.gate {
                UwGate::U3 => &u3,
                UwGate::W3 => &w3,
            };
            for _ in 0..step.power {
                seq.push(g.clone(), step.wires.to_vec());
            }
        }
        Ok(seq)
    }
}

/// The doubly-controlled `U` or `W`.
pub fn uw_gate(which: UwGate, alpha: f64) -> GateMatrix {
    let base = match which {
        UwGate::U3 => named_gate(NamedGate::U { alpha }),
        UwGate::W3 => named_gate(NamedGate::W { alpha }),
    }
    .expect("finite alpha");
    add_controls(&base, 2)
}

/// A two-level operation before approximation: rotate (`U3`) or phase (`W3`)
/// by `turns` on the pair selected by `wires`.
#[derive(Debug, Clone, Copy)]
struct Block {
    gate: UwGate,
    wires: [usize; 3],
    turns: f64,
}

impl Block {
    fn inverse(self) -> Block {
        Block { turns: -self.turns, ..self }
    }
}

fn invert(blocks: &[Block]) -> Vec<Block> {
    blocks.iter().rev().map(|b| b.inverse()).collect()
}

/// NOT on `target` conditioned on `c0`, `c1` (ancillas stand in for fixed controls):
/// a quarter-turn rotation followed by a half-turn phase.
fn cc_not(c0: usize, c1: usize, target: usize) -> [Block; 2] {
    [
        Block { gate: UwGate::U3, wires: [c0, c1, target], turns: 0.25 },
        Block { gate: UwGate::W3, wires: [c0, c1, target], turns: 0.5 },
    ]
}

fn not(target: usize) -> [Block; 2] {
    cc_not(ANCILLAS[0], ANCILLAS[1], target)
}

fn cnot(control: usize, target: usize) -> [Block; 2] {
    cc_not(ANCILLAS[0], control, target)
}

/// Bit of data qubit `q` (qubit 0 most significant) in a 3-bit index.
fn bit(index: usize, q: usize) -> usize {
    (index >> (2 - q)) & 1
}

/// Permutation taking `|j>` to `|111 ⊕ e_t>` while fixing `|111>`, plus the chosen `t`.
fn pairing_permutation(j: usize) -> (Vec<Block>, usize) {
    let differing: Vec<usize> = (0..3).filter(|&q| bit(j, q) == 0).collect();
    let t = *differing.last().expect("j != 7");
    let mut blocks = Vec::new();
    for &u in differing.iter().filter(|&&u| u != t) {
        // flip u when t = 0: X_t CNOT(t→u) X_t
        blocks.extend(not(t));
        blocks.extend(cnot(t, u));
        blocks.extend(not(t));
    }
    (blocks, t)
}

fn turns_of(angle: f64) -> f64 {
    angle / (2.0 * PI)
}

/// Two-level blocks mapping the unit vector `v` to a multiple of `|111>`.
fn rotate_to_top(mut v: [Complex64; 8]) -> Vec<Block> {
    let mut blocks = Vec::new();
    for j in 0..7 {
        if v[j].norm() < 1e-15 {
            continue;
        }
        let (perm, t) = pairing_permutation(j);
        let others: Vec<usize> = (0..3).filter(|&q| q != t).collect();
        let wires = [others[0], others[1], t];
        let (x, y) = (v[j], v[7]);
        let phase = if y.norm() < 1e-15 { 0.0 } else { x.arg() - y.arg() };
        let (rx, ry) = (x.norm(), y.norm());
        let gamma = (-rx).atan2(ry);
        blocks.extend(perm.iter().copied());
        blocks.push(Block { gate: UwGate::W3, wires, turns: turns_of(phase) });
        blocks.push(Block { gate: UwGate::U3, wires, turns: turns_of(gamma) });
        blocks.extend(invert(&perm));
        v[7] = Complex64::from_polar((rx * rx + ry * ry).sqrt(), x.arg());
        v[j] = Complex64::new(0.0, 0.0);
    }
    blocks
}

/// Sorted table of `(p·α mod 1, p)` for `p = 1..=cap`.
struct MultipleTable {
    entries: Vec<(f64, u64)>,
}

impl MultipleTable {
    fn new(alpha: f64, cap: u64) -> Self {
        let mut entries: Vec<(f64, u64)> =
            (1..=cap).map(|p| ((p as f64 * alpha).rem_euclid(1.0), p)).collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { entries }
    }

    fn circular_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    /// Smallest power within `tol` turns of `target`, else the nearest power.
    fn lookup(&self, target: f64, tol: f64) -> (u64, f64) {
        let target = target.rem_euclid(1.0);
        let n = self.entries.len();
        let pos = self.entries.partition_point(|e| e.0 < target);
        let mut best: Option<(u64, f64)> = None;
        let mut nearest = (0u64, f64::INFINITY);
        // walk outward in both directions, with wraparound, while within tolerance
        for dir in [1isize, -1] {
            let mut k = 0usize;
            loop {
                let idx = if dir == 1 {
                    (pos + k) % n
                } else {
                    (pos + n - 1 - k % n) % n
                };
                let (frac, p) = self.entries[idx];
                let gap = Self::circular_gap(frac, target);
                if gap < nearest.1 {
                    nearest = (p, gap);
                }
                if gap > tol && k > 0 {
                    break;
                }
                if gap <= tol && best.is_none_or(|(bp, _)| p < bp) {
                    best = Some((p, gap));
                }
                k += 1;
                if k >= n {
                    break;
                }
            }
        }
        best.unwrap_or(nearest)
    }
}

fn effective_operator(steps: &[UwStep], alpha: f64) -> Result<CMatrix> {
    let mut columns: Vec<StateVector> = (0..8)
        .map(|i| StateVector::basis_state(TOTAL_QUBITS, (i << 2) | 0b11))
        .collect::<Result<_>>()?;
    let u = named_gate(NamedGate::U { alpha })?;
    let w = named_gate(NamedGate::W { alpha })?;
    for step in steps {
        let base = match step.gate {
            UwGate::U3 => &u,
            UwGate::W3 => &w,
        };
        let powered = GateMatrix::from_trusted(GateLabel::Custom, matrix_power(base.matrix(), step.power));
        let cc = add_controls(&powered, 2);
        for col in &mut columns {
            col.apply_matrix_unchecked(cc.matrix(), &step.wires);
        }
    }
    let mut m = CMatrix::zeros(8, 8);
    for (j, col) in columns.iter().enumerate() {
        for (idx, amp) in col.amplitudes().iter().enumerate() {
            if idx & 0b11 != 0b11 {
                if amp.norm() > 1e-12 {
                    return Err(validation("ancilla left the |11> block"));
                }
                continue;
            }
            m[(idx >> 2, j)] = *amp;
        }
    }
    Ok(m)
}

/// Approximates a three-qubit unitary by `U3`/`W3` powers to within `eps`
/// (global phase ignored), verifying the result.
pub fn synthesize_uw(target: &GateMatrix, eps: f64, config: SynthesisConfig) -> Result<UwSynthesis> {
    if target.arity() != 3 {
        return Err(domain(format!("synthesis target must act on 3 qubits, got {}", target.arity())));
    }
    if !(eps > 0.0) {
        return Err(domain(format!("eps must be positive, got {eps}")));
    }
    if config.scan_cap == 0 {
        return Err(domain("scan cap must be positive"));
    }
    // members of the gate set need no construction
    for which in [UwGate::U3, UwGate::W3] {
        let g = uw_gate(which, config.alpha);
        if phase_invariant_distance(target.matrix(), g.matrix())? < 1e-12 {
            let steps = vec![UwStep { gate: which, wires: [0, 1, 2], power: 1 }];
            let distance = phase_invariant_distance(target.matrix(), &effective_operator(&steps, config.alpha)?)?;
            return Ok(UwSynthesis { steps, distance, length: 1, max_power: 1, blocks: 1, config });
        }
    }

    let mut blocks = Vec::new();
    for (theta, vec) in unitary_eigen(target.matrix()) {
        if theta.abs() < 1e-12 {
            continue;
        }
        let mut v = [Complex64::new(0.0, 0.0); 8];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = vec[i];
        }
        let r = rotate_to_top(v);
        blocks.extend(r.iter().copied());
        blocks.push(Block { gate: UwGate::W3, wires: [0, 1, 2], turns: turns_of(theta) });
        blocks.extend(invert(&r));
    }
    let blocks: Vec<Block> = blocks
        .into_iter()
        .filter(|b| MultipleTable::circular_gap(b.turns, 0.0) > 1e-15)
        .collect();

    let num_blocks = blocks.len().max(1);
    // each block contributes at most 2π·(turn error) in operator norm
    let tol = 0.9 * eps / (2.0 * PI * num_blocks as f64);
    let table = MultipleTable::new(config.alpha, config.scan_cap);
    let mut steps = Vec::with_capacity(blocks.len());
    let mut predicted = 0.0;
    for b in &blocks {
        let (power, gap) = table.lookup(b.turns, tol);
        predicted += 2.0 * PI * gap;
        steps.push(UwStep { gate: b.gate, wires: b.wires, power });
    }
    if predicted > eps {
        return Err(Error::Failure(format!(
            "scan cap {} too small: predicted error {predicted:.3e} exceeds eps {eps}",
            config.scan_cap
        )));
    }
    let achieved = effective_operator(&steps, config.alpha)?;
    let distance = phase_invariant_distance(target.matrix(), &achieved)?;
    if distance > eps {
        return Err(Error::Failure(format!("verified distance {distance:.3e} exceeds eps {eps}")));
    }
    let length = steps.iter().map(|s| s.power).sum();
    let max_power = steps.iter().map(|s| s.power).max().unwrap_or(0);
    Ok(UwSynthesis { steps, distance, length, max_power, blocks: blocks.len(), config })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{controlled, gate};

    #[test]
    fn member_of_the_set_is_returned_directly() {
        let cfg = SynthesisConfig::default();
        let w3 = uw_gate(UwGate::W3, cfg.alpha);
        let out = synthesize_uw(&w3, 0.01, cfg).unwrap();
        assert_eq!(out.steps, vec![UwStep { gate: UwGate::W3, wires: [0, 1, 2], power: 1 }]);
        assert!(out.distance < 1e-12);
    }

    #[test]
    fn table_lookup_finds_close_multiples() {
        let alpha = default_alpha();
        let table = MultipleTable::new(alpha, 1 << 16);
        for target in [0.0001, 0.25, 0.5, 0.77, 0.9999] {
            let (p, gap) = table.lookup(target, 1e-4);
            assert!(gap <= 1e-4, "{target}: {gap}");
            let actual = (p as f64 * alpha).rem_euclid(1.0);
            assert!((MultipleTable::circular_gap(actual, target) - gap).abs() < 1e-12);
        }
    }

    #[test]
    fn toffoli_within_tolerance() {
        let out = synthesize_uw(&gate(NamedGate::Toffoli), 0.1, SynthesisConfig::default()).unwrap();
        assert!(out.distance <= 0.1);
        assert!(out.length > 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = SynthesisConfig::default();
        assert!(synthesize_uw(&gate(NamedGate::Toffoli), 0.0, cfg).is_err());
        assert!(synthesize_uw(&gate(NamedGate::Cnot), 0.1, cfg).is_err());
    }

    #[test]
    fn tiny_cap_is_reported() {
        let cfg = SynthesisConfig { scan_cap: 3, ..Default::default() };
        let g = named_gate(NamedGate::G { theta: PI / 7.0, phi: 0.0 }).unwrap();
        let target = controlled(&g, 2).unwrap();
        assert!(matches!(synthesize_uw(&target, 1e-3, cfg), Err(Error::Failure(_))));
    }

    #[test]
    fn general_unitary_uses_ancilla_permutations() {
        // a permutation that moves |000>, which no U3/W3 product can do without ancillas
        let mut m = CMatrix::zeros(8, 8);
        for col in 0..8usize {
            m[((col + 1) % 8, col)] = Complex64::new(1.0, 0.0);
        }
        let target = GateMatrix::custom(m).unwrap();
        let out = synthesize_uw(&target, 0.1, SynthesisConfig::default()).unwrap();
        assert!(out.distance <= 0.1, "{}", out.distance);
    }

    #[test]
    fn controlled_controlled_g_at_tighter_eps() {
        let g = named_gate(NamedGate::G { theta: PI / 7.0, phi: 0.0 }).unwrap();
        let target = controlled(&g, 2).unwrap();
        let out = synthesize_uw(&target, 0.05, SynthesisConfig::default()).unwrap();
        assert!(out.distance <= 0.05);
        // independent check of the reported distance
        let direct = phase_invariant_distance(target.matrix(), &out.effective_operator().unwrap()).unwrap();
        assert!((direct - out.distance).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_target() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw = CMatrix::from_fn(8, 8, |_, _| Complex64::new(next(), next()));
        let q = raw.qr().q();
        let target = GateMatrix::custom(q).unwrap();
        let out = synthesize_uw(&target, 0.1, SynthesisConfig::default()).unwrap();
        assert!(out.distance <= 0.1, "{}", out.distance);
    }
}
