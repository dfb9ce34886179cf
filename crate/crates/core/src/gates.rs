//! Gate matrices: the named single- and multi-qubit gates, controlled
//! versions, the two-qubit decomposition of doubly-controlled gates, and the
//! operator-norm approximation distance.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{domain, validation, Result};
use crate::state::StateVector;

/// Entrywise tolerance of the unitarity check `U U† = I`.
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

/// Irrational angle (in turns) used by the universal `U`/`W` pair.
pub fn default_alpha() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Gates with a fixed matrix given by name and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedGate {
    Identity,
    Not,
    PauliY,
    PauliZ,
    H,
    Cnot,
    Toffoli,
    Swap,
    /// `diag(1, e^{2πi/2^k})`, `k >= 1`.
    Rk(u32),
    /// General real-plane rotation with a relative phase.
    G { theta: f64, phi: f64 },
    /// Rotation by `2πα` in the real plane.
    U { alpha: f64 },
    /// Phase `e^{2πiα}` on `|1>`.
    W { alpha: f64 },
}

/// Provenance of a gate matrix, used when printing circuits.
#[derive(Debug, Clone, PartialEq)]
pub enum GateLabel {
    Named(NamedGate),
    Controlled { controls: usize, base: Box<GateLabel> },
    Adjoint(Box<GateLabel>),
    Custom,
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateLabel::Named(g) => match g {
                NamedGate::Identity => write!(f, "i"),
                NamedGate::Not => write!(f, "x"),
                NamedGate::PauliY => write!(f, "y"),
                NamedGate::PauliZ => write!(f, "z"),
                NamedGate::H => write!(f, "h"),
                NamedGate::Cnot => write!(f, "cnot"),
                NamedGate::Toffoli => write!(f, "toffoli"),
                NamedGate::Swap => write!(f, "swap"),
                NamedGate::Rk(k) => write!(f, "rk({k})"),
                NamedGate::G { theta, phi } => write!(f, "g({theta},{phi})"),
                NamedGate::U { alpha } => write!(f, "u({alpha})"),
                NamedGate::W { alpha } => write!(f, "w({alpha})"),
            },
            GateLabel::Controlled { controls, base } => write!(f, "c{controls}-{base}"),
            GateLabel::Adjoint(base) => write!(f, "adj-{base}"),
            GateLabel::Custom => write!(f, "unitary"),
        }
    }
}

/// A validated `2^k x 2^k` unitary acting on `k` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    label: GateLabel,
    arity: usize,
    matrix: CMatrix,
}

impl GateMatrix {
    /// Validates shape and unitarity.
    pub fn new(label: GateLabel, matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(validation(format!("{}x{} is not a qubit operator shape", dim, matrix.ncols())));
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARITY_TOLERANCE {
            return Err(validation(format!("matrix is not unitary (max |UU†-I| = {dev:e})")));
        }
        Ok(Self { label, arity: dim.trailing_zeros() as usize, matrix })
    }

    pub fn custom(matrix: CMatrix) -> Result<Self> {
        Self::new(GateLabel::Custom, matrix)
    }

    pub(crate) fn from_trusted(label: GateLabel, matrix: CMatrix) -> Self {
        debug_assert!(unitarity_deviation(&matrix) < 1e-8);
        let arity = matrix.nrows().trailing_zeros() as usize;
        Self { label, arity, matrix }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &GateLabel {
        &self.label
    }

    pub fn adjoint(&self) -> GateMatrix {
        let label = match &self.label {
            GateLabel::Adjoint(inner) => (**inner).clone(),
            GateLabel::Named(
                g @ (NamedGate::Identity
                | NamedGate::Not
                | NamedGate::PauliY
                | NamedGate::PauliZ
                | NamedGate::H
                | NamedGate::Cnot
                | NamedGate::Toffoli
                | NamedGate::Swap),
            ) => GateLabel::Named(*g),
            other => GateLabel::Adjoint(Box::new(other.clone())),
        };
        GateMatrix { label, arity: self.arity, matrix: self.matrix.adjoint() }
    }

    /// Matrix power by repeated squaring.
    pub fn power(&self, exponent: u64) -> CMatrix {
        matrix_power(&self.matrix, exponent)
    }
}

pub(crate) fn matrix_power(m: &CMatrix, mut exponent: u64) -> CMatrix {
    let mut result = CMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = &result * &base;
        }
        exponent >>= 1;
        if exponent > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Largest entrywise deviation of `U U†` from the identity.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let expected = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            worst = worst.max((prod[(i, j)] - expected).norm());
        }
    }
    worst
}

fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

fn permutation_matrix(dim: usize, perm: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(perm(col), col)] = c(1.0, 0.0);
    }
    m
}

/// Matrix of a named gate.
pub fn named_gate(gate: NamedGate) -> Result<GateMatrix> {
    let (zero, one) = (c(0.0, 0.0), c(1.0, 0.0));
    let matrix = match gate {
        NamedGate::Identity => CMatrix::identity(2, 2),
        NamedGate::Not => mat2(zero, one, one, zero),
        NamedGate::PauliY => mat2(zero, c(0.0, -1.0), c(0.0, 1.0), zero),
        NamedGate::PauliZ => mat2(one, zero, zero, -one),
        NamedGate::H => {
            let h = c(FRAC_1_SQRT_2, 0.0);
            mat2(h, h, h, -h)
        }
        NamedGate::Cnot => permutation_matrix(4, |x| if x & 0b10 != 0 { x ^ 1 } else { x }),
        NamedGate::Toffoli => permutation_matrix(8, |x| if x & 0b110 == 0b110 { x ^ 1 } else { x }),
        NamedGate::Swap => permutation_matrix(4, |x| ((x & 1) << 1) | (x >> 1)),
        NamedGate::Rk(k) => {
            if k == 0 || k > 62 {
                return Err(domain(format!("R_k requires 1 <= k <= 62, got {k}")));
            }
            mat2(one, zero, zero, cis(2.0 * PI / (1u64 << k) as f64))
        }
        NamedGate::G { theta, phi } => {
            if !theta.is_finite() || !phi.is_finite() {
                return Err(domain("G parameters must be finite"));
            }
            let (s, co) = theta.sin_cos();
            mat2(c(co, 0.0), cis(phi) * s, -cis(-phi) * s, c(co, 0.0))
        }
        NamedGate::U { alpha } => {
            if !alpha.is_finite() {
                return Err(domain("U parameter must be finite"));
            }
            let (s, co) = (2.0 * PI * alpha).sin_cos();
            mat2(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0))
        }
        NamedGate::W { alpha } => {
            if !alpha.is_finite() {
                return Err(domain("W parameter must be finite"));
            }
            mat2(one, zero, zero, cis(2.0 * PI * alpha))
        }
    };
    Ok(GateMatrix::from_trusted(GateLabel::Named(gate), matrix))
}

/// Convenience accessor for parameter-free gates.
pub fn gate(g: NamedGate) -> GateMatrix {
    named_gate(g).expect("parameter-free gate")
}

/// Adds `num_controls` leading control qubits to any gate.
pub(crate) fn add_controls(base: &GateMatrix, num_controls: usize) -> GateMatrix {
    let inner = base.dim();
    let dim = inner << num_controls;
    let mut m = CMatrix::identity(dim, dim);
    let offset = dim - inner;
    for i in 0..inner {
        for j in 0..inner {
            m[(offset + i, offset + j)] = base.matrix[(i, j)];
        }
    }
    let label = GateLabel::Controlled { controls: num_controls, base: Box::new(base.label.clone()) };
    GateMatrix::from_trusted(label, m)
}

/// `gate` conditioned on `num_controls` leading qubits all being `1`.
pub fn controlled(gate: &GateMatrix, num_controls: usize) -> Result<GateMatrix> {
    if gate.arity() != 1 {
        return Err(domain(format!("controlled() takes a one-qubit gate, got arity {}", gate.arity())));
    }
    if num_controls == 0 {
        return Err(domain("num_controls must be at least 1"));
    }
    Ok(add_controls(gate, num_controls))
}

fn principal_sqrt(z: Complex64) -> Complex64 {
    let mut arg = z.arg();
    if arg <= -PI + 1e-12 {
        arg = PI;
    }
    Complex64::from_polar(z.norm().sqrt(), arg / 2.0)
}

/// Principal square root of a one-qubit unitary.
pub fn matrix_sqrt_2x2(q: &GateMatrix) -> Result<GateMatrix> {
    if q.arity() != 1 {
        return Err(domain("matrix_sqrt_2x2 takes a one-qubit gate"));
    }
    let m = q.matrix();
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr / 4.0 - det).sqrt();
    let (l1, l2) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let root = if (l1 - l2).norm() < 1e-9 {
        // normal matrix with a double eigenvalue is a multiple of the identity
        CMatrix::identity(2, 2) * principal_sqrt((l1 + l2) / 2.0)
    } else {
        let (r1, r2) = (principal_sqrt(l1), principal_sqrt(l2));
        let s = r1 * r2;
        let t = r1 + r2;
        (m + CMatrix::identity(2, 2) * s) / t
    };
    let label = GateLabel::Custom;
    GateMatrix::new(label, root)
}

/// Ordered gate applications on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    pub num_qubits: usize,
    pub steps: Vec<(GateMatrix, Vec<usize>)>,
}

impl GateSequence {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, steps: Vec::new() }
    }

    pub fn push(&mut self, gate: GateMatrix, targets: Vec<usize>) {
        self.steps.push((gate, targets));
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Full `2^n x 2^n` product (later steps multiply on the left).
    pub fn product(&self) -> Result<CMatrix> {
        let mut op = Operator::identity(self.num_qubits);
        for (g, targets) in &self.steps {
            op.apply(g, targets)?;
        }
        Ok(op.into_matrix())
    }
}

/// Dense operator accumulated by applying gates to every column.
pub(crate) struct Operator {
    columns: Vec<StateVector>,
}

impl Operator {
    pub(crate) fn identity(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let columns = (0..dim).map(|i| StateVector::basis_state(num_qubits, i).expect("in range")).collect();
        Self { columns }
    }

    pub(crate) fn apply(&mut self, g: &GateMatrix, targets: &[usize]) -> Result<()> {
        for col in &mut self.columns {
            col.apply_gate(g, targets)?;
        }
        Ok(())
    }

    pub(crate) fn into_matrix(self) -> CMatrix {
        let dim = self.columns.len();
        CMatrix::from_fn(dim, dim, |r, col| self.columns[col].amplitude(r))
    }
}

/// Dense matrix of `gate` on `targets` within an `n`-qubit register.
pub fn embed(gate: &GateMatrix, targets: &[usize], num_qubits: usize) -> Result<CMatrix> {
    let mut seq = GateSequence::new(num_qubits);
    seq.push(gate.clone(), targets.to_vec());
    seq.product()
}

/// Two-qubit-gate decomposition of the doubly-controlled `Q` on wires
/// `(0, 1; target 2)`, with `V = sqrt(Q)`:
/// `C-V(1→2)`, `CNOT(0→1)`, `C-V†(1→2)`, `CNOT(0→1)`, `C-V(0→2)`.
pub fn barenco_decompose(q: &GateMatrix) -> Result<GateSequence> {
    let v = matrix_sqrt_2x2(q)?;
    let cv = controlled(&v, 1)?;
    let cv_dag = controlled(&v.adjoint(), 1)?;
    let cnot = gate(NamedGate::Cnot);
    let mut seq = GateSequence::new(3);
    seq.push(cv.clone(), vec![1, 2]);
    seq.push(cnot.clone(), vec![0, 1]);
    seq.push(cv_dag, vec![1, 2]);
    seq.push(cnot, vec![0, 1]);
    seq.push(cv, vec![0, 2]);
    Ok(seq)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Operator-norm distance `||U - V||`.
pub fn approximation_distance(u: &GateMatrix, v: &GateMatrix) -> Result<f64> {
    matrix_distance(u.matrix(), v.matrix())
}

pub fn matrix_distance(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(domain(format!("dimension mismatch {:?} vs {:?}", u.shape(), v.shape())));
    }
    Ok(operator_norm(&(u - v)))
}

/// Eigenphases and orthonormal eigenvectors of a unitary.
///
/// Diagonalizes the Hermitian part, then separates each of its degenerate
/// clusters (`cos θ` collisions) with the anti-Hermitian part.
pub(crate) fn unitary_eigen(u: &CMatrix) -> Vec<(f64, DVector<Complex64>)> {
    let n = u.nrows();
    let re_part = (u + u.adjoint()).map(|z| z * 0.5);
    let im_part = (u - u.adjoint()).map(|z| z * c(0.0, -0.5));
    let eig = re_part.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < 1e-7 {
            end += 1;
        }
        let cluster = CMatrix::from_fn(n, end - start, |i, j| eig.eigenvectors[(i, order[start + j])]);
        let restricted = cluster.adjoint() * &im_part * &cluster;
        let inner = restricted.symmetric_eigen();
        for j in 0..(end - start) {
            let v = &cluster * inner.eigenvectors.column(j);
            let phase = (v.adjoint() * u * &v)[(0, 0)].arg();
            out.push((phase, v));
        }
        start = end;
    }
    out
}

/// `min_φ ||U - e^{iφ} V||`, searched around the trace-optimal phase.
pub fn phase_invariant_distance(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(domain(format!("dimension mismatch {:?} vs {:?}", u.shape(), v.shape())));
    }
    let overlap: Complex64 = (v.adjoint() * u).trace();
    let phi0 = if overlap.norm() > 1e-12 { overlap.arg() } else { 0.0 };
    let eval = |phi: f64| operator_norm(&(u - v * cis(phi)));
    // golden-section refinement of the phase around the Frobenius optimum
    let (mut lo, mut hi) = (phi0 - 0.5, phi0 + 0.5);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval(x2);
        }
    }
    Ok(eval(phi0).min(f1).min(f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() < tol)
    }

    /// Independent operator-norm oracle: power iteration on A†A.
    fn power_iteration_norm(a: &CMatrix) -> f64 {
        let ata = a.adjoint() * a;
        let n = ata.nrows();
        let mut v = nalgebra::DVector::from_fn(n, |i, _| c(1.0 + i as f64 * 0.37, 0.1 * i as f64));
        let mut lambda = 0.0;
        for _ in 0..500 {
            let w = &ata * &v;
            let norm = w.norm();
            if norm < 1e-300 {
                return 0.0;
            }
            lambda = norm / v.norm();
            v = w.map(|z| z / norm);
        }
        lambda.sqrt()
    }

    #[test]
    fn every_named_gate_is_unitary() {
        let gates = [
            NamedGate::Identity,
            NamedGate::Not,
            NamedGate::PauliY,
            NamedGate::PauliZ,
            NamedGate::H,
            NamedGate::Cnot,
            NamedGate::Toffoli,
            NamedGate::Swap,
            NamedGate::Rk(1),
            NamedGate::Rk(7),
            NamedGate::G { theta: 0.3, phi: -1.1 },
            NamedGate::U { alpha: default_alpha() },
            NamedGate::W { alpha: default_alpha() },
        ];
        for g in gates {
            let m = named_gate(g).unwrap();
            assert!(unitarity_deviation(m.matrix()) < UNITARITY_TOLERANCE, "{g:?}");
        }
        assert!(named_gate(NamedGate::Rk(0)).is_err());
    }

    #[test]
    fn not_and_rk_examples() {
        let not = gate(NamedGate::Not);
        assert_eq!(not.matrix(), &mat2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        let r1 = named_gate(NamedGate::Rk(1)).unwrap();
        assert!(close(r1.matrix(), &mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)), 1e-15));
    }

    #[test]
    fn toffoli_flips_target_on_110() {
        let mut s = StateVector::basis_state(3, 0b110).unwrap();
        s.apply_gate(&gate(NamedGate::Toffoli), &[0, 1, 2]).unwrap();
        assert_eq!(s.amplitude(0b111), c(1.0, 0.0));
    }

    #[test]
    fn controlled_examples() {
        let not = gate(NamedGate::Not);
        assert_eq!(controlled(&not, 1).unwrap().matrix(), gate(NamedGate::Cnot).matrix());
        assert_eq!(controlled(&not, 2).unwrap().matrix(), gate(NamedGate::Toffoli).matrix());
        let id = controlled(&gate(NamedGate::Identity), 3).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(16, 16));
        assert!(controlled(&gate(NamedGate::Cnot), 1).is_err());
        assert!(controlled(&not, 0).is_err());
    }

    #[test]
    fn controlled_block_equals_base() {
        let g = named_gate(NamedGate::G { theta: 0.7, phi: 0.2 }).unwrap();
        let cg = controlled(&g, 2).unwrap();
        let block = cg.matrix().view((6, 6), (2, 2)).into_owned();
        assert_eq!(&block, g.matrix());
    }

    #[test]
    fn square_roots() {
        let id = gate(NamedGate::Identity);
        assert!(close(matrix_sqrt_2x2(&id).unwrap().matrix(), id.matrix(), 1e-12));
        let not = gate(NamedGate::Not);
        let v = matrix_sqrt_2x2(&not).unwrap();
        assert!(close(&(v.matrix() * v.matrix()), not.matrix(), 1e-9));
        let z = gate(NamedGate::PauliZ);
        let v = matrix_sqrt_2x2(&z).unwrap();
        assert!(close(v.matrix(), &mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)), 1e-12));
    }

    #[test]
    fn barenco_examples() {
        let toffoli = gate(NamedGate::Toffoli);
        let prod = barenco_decompose(&gate(NamedGate::Not)).unwrap().product().unwrap();
        assert!(close(&prod, toffoli.matrix(), 1e-9));
        let prod = barenco_decompose(&gate(NamedGate::Identity)).unwrap().product().unwrap();
        assert!(close(&prod, &CMatrix::identity(8, 8), 1e-9));
        let w = named_gate(NamedGate::W { alpha: default_alpha() }).unwrap();
        let prod = barenco_decompose(&w).unwrap().product().unwrap();
        assert!(close(&prod, controlled(&w, 2).unwrap().matrix(), 1e-9));
    }

    #[test]
    fn distances() {
        let h = gate(NamedGate::H);
        assert!(approximation_distance(&h, &h).unwrap() < 1e-12);
        let id = gate(NamedGate::Identity);
        let not = gate(NamedGate::Not);
        let d = approximation_distance(&id, &not).unwrap();
        let oracle = power_iteration_norm(&(id.matrix() - not.matrix()));
        assert!((oracle - 2.0).abs() < 1e-9);
        assert!((d - oracle).abs() < 1e-9);
        for k in 1..6 {
            let rk = named_gate(NamedGate::Rk(k)).unwrap();
            let expected = (c(1.0, 0.0) - cis(2.0 * PI / (1u64 << k) as f64)).norm();
            assert!((approximation_distance(&rk, &id).unwrap() - expected).abs() < 1e-12);
        }
        assert!(approximation_distance(&id, &gate(NamedGate::Cnot)).is_err());
    }

    #[test]
    fn phase_invariant_distance_ignores_global_phase() {
        let h = gate(NamedGate::H);
        let shifted = h.matrix() * cis(1.234);
        assert!(phase_invariant_distance(h.matrix(), &shifted).unwrap() < 1e-9);
        assert!(matrix_distance(h.matrix(), &shifted).unwrap() > 0.5);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(GateMatrix::custom(m), Err(crate::Error::Validation(_))));
        let m = CMatrix::identity(3, 3);
        assert!(GateMatrix::custom(m).is_err());
    }
}
