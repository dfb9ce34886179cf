//! Number theory, order finding (Shor and Kitaev), factoring and toy RSA.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::circuit::Oracle;
use crate::error::{domain, Error, Result};
use crate::rng::{fork_seed, seeded, SimRng};
use crate::state::StateVector;
use crate::transforms::{estimate_phase, qfft_mod2m, qft_z2n, ModMul, PhaseConfig, PowerUnitary};

/// Largest modulus simulated with the full two-register state vector.
pub const MAX_SHOR_MODULUS: u64 = 64;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `y^x mod n` by square-and-multiply.
pub fn modpow(y: u64, mut x: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let n128 = n as u128;
    let mut base = y as u128 % n128;
    let mut acc = 1u128;
    while x > 0 {
        if x & 1 == 1 {
            acc = acc * base % n128;
        }
        base = base * base % n128;
        x >>= 1;
    }
    acc as u64
}

/// `d` with `e·d ≡ 1 (mod phi)`, `0 < d < phi` (extended Euclid).
pub fn mod_inverse(e: u64, phi: u64) -> Result<u64> {
    if phi == 0 {
        return Err(domain("modulus must be positive"));
    }
    let (mut r0, mut r1) = (phi as i128, (e % phi) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(domain(format!("{e} has no inverse modulo {phi} (gcd {r0})")));
    }
    let d = t0.rem_euclid(phi as i128) as u64;
    Ok(if d == 0 { phi.min(1) } else { d })
}

/// Trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, k)` with `n = p^k`, `k >= 2`, if `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 4 {
        return None;
    }
    for k in (2..=63u32).rev() {
        let root = (n as f64).powf(1.0 / k as f64).round() as u64;
        for p in root.saturating_sub(1).max(2)..=root + 1 {
            if p.checked_pow(k) == Some(n) && is_prime(p) {
                return Some((p, k));
            }
        }
    }
    None
}

/// Least `r > 0` with `y^r ≡ 1 (mod n)`, by scanning.
pub fn classical_order(y: u64, n: u64) -> Result<u64> {
    if n < 2 || gcd(y, n) != 1 {
        return Err(domain(format!("{y} is not a unit modulo {n}")));
    }
    let mut acc = y % n;
    for r in 1..=n {
        if acc == 1 {
            return Ok(r);
        }
        acc = ((acc as u128 * y as u128) % n as u128) as u64;
    }
    unreachable!("the order of a unit divides φ(n) < n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

/// Convergents `p_i/q_i` of `k/q`, in order.
pub fn convergents(k: u64, q: u64) -> Vec<Fraction> {
    let mut out = Vec::new();
    let (mut a, mut b) = (k as u128, q as u128);
    let (mut p_prev, mut p) = (0u128, 1u128);
    let (mut q_prev, mut qq) = (1u128, 0u128);
    while b != 0 {
        let t = a / b;
        (p_prev, p) = (p, t * p + p_prev);
        (q_prev, qq) = (qq, t * qq + q_prev);
        out.push(Fraction { num: p as u64, den: qq as u64 });
        (a, b) = (b, a - t * b);
    }
    out
}

/// The convergent of `k/q` with the largest denominator below `bound`.
pub fn continued_fraction_approx(k: u64, q: u64, bound: u64) -> Fraction {
    convergents(k, q)
        .into_iter()
        .take_while(|f| f.den < bound.max(2))
        .last()
        .unwrap_or(Fraction { num: 0, den: 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderProblem {
    pub n: u64,
    pub y: u64,
    pub q: u64,
}

impl OrderProblem {
    /// Uses the smallest power of two `Q >= N²`.
    pub fn new(n: u64, y: u64) -> Result<Self> {
        let q = (n * n).next_power_of_two();
        Self::with_modulus(n, y, q)
    }

    pub fn with_modulus(n: u64, y: u64, q: u64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("N must be at least 2, got {n}")));
        }
        if y < 2 || y >= n || gcd(y, n) != 1 {
            return Err(domain(format!("Y = {y} must lie in [2, N) and be coprime to N = {n}")));
        }
        if q < n * n || !q.is_power_of_two() {
            return Err(domain(format!("Q = {q} must be a power of two at least N² = {}", n * n)));
        }
        Ok(Self { n, y, q })
    }

    fn first_width(&self) -> usize {
        self.q.trailing_zeros() as usize
    }

    fn second_width(&self) -> usize {
        (u64::BITS - (self.n - 1).leading_zeros()) as usize
    }

    pub fn num_qubits(&self) -> usize {
        self.first_width() + self.second_width()
    }

    /// Whether `k` satisfies `-r/2 <= kr mod Q <= r/2` (signed residue).
    pub fn is_good_k(&self, k: u64, r: u64) -> bool {
        let res = (k as u128 * r as u128 % self.q as u128) as i128;
        let signed = if res > self.q as i128 / 2 { res - self.q as i128 } else { res };
        2 * signed.abs() <= r as i128
    }

    /// State after the uniform superposition and the modular-exponentiation query.
    fn query_state(&self) -> Result<StateVector> {
        if self.n > MAX_SHOR_MODULUS {
            return Err(Error::Resource(format!(
                "full state-vector order finding supports N <= {MAX_SHOR_MODULUS}; use the Kitaev route"
            )));
        }
        let (l, w) = (self.first_width(), self.second_width());
        let mut s = StateVector::basis_state(l + w, 0)?;
        let first: Vec<usize> = (0..l).collect();
        let second: Vec<usize> = (l..l + w).collect();
        qft_z2n(&mut s, &first)?;
        let table = (0..self.q).map(|x| modpow(self.y, x, self.n)).collect();
        Oracle::new(table, w)?.query(&mut s, &first, &second)?;
        Ok(s)
    }
}

/// Exact distribution of the measured `k` in Shor's procedure.
pub fn shor_k_distribution(problem: &OrderProblem) -> Result<Vec<f64>> {
    let mut s = problem.query_state()?;
    let first: Vec<usize> = (0..problem.first_width()).collect();
    qfft_mod2m(&mut s, &first)?;
    s.outcome_distribution(&first)
}

/// Total probability of the `k` satisfying the good-k criterion for order `r`.
pub fn good_k_mass(problem: &OrderProblem, r: u64) -> Result<f64> {
    let dist = shor_k_distribution(problem)?;
    Ok(dist.iter().enumerate().filter(|(k, _)| problem.is_good_k(*k as u64, r)).map(|(_, p)| p).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepeatRecord {
    /// Measured value (Shor) or `round(θ/2π · 2^{bits+1})` (Kitaev).
    pub measured: u64,
    pub modulus: u64,
    pub convergents: Vec<Fraction>,
    pub accepted: Option<u64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub n: u64,
    pub y: u64,
    pub order: Option<u64>,
    pub repeats: Vec<RepeatRecord>,
}

impl OrderReport {
    pub fn order_or_failure(&self) -> Result<u64> {
        self.order.ok_or_else(|| {
            Error::Failure(format!(
                "order of {} mod {} not found in {} repeats",
                self.y,
                self.n,
                self.repeats.len()
            ))
        })
    }
}

/// Reduces a verified multiple of the order to the order itself.
fn minimal_order(y: u64, n: u64, mut d: u64) -> u64 {
    let mut changed = true;
    while changed {
        changed = false;
        for p in 2..=d {
            if d % p == 0 && is_prime(p) && modpow(y, d / p, n) == 1 {
                d /= p;
                changed = true;
                break;
            }
        }
    }
    d
}

fn classify(y: u64, n: u64, measured: u64, modulus: u64) -> RepeatRecord {
    let frac = continued_fraction_approx(measured, modulus, n);
    let conv: Vec<Fraction> = convergents(measured, modulus).into_iter().take_while(|f| f.den < n).collect();
    let d = frac.den;
    let (accepted, reason) = if modpow(y, d, n) == 1 && d >= 1 {
        let r = minimal_order(y, n, d);
        (Some(r), if r == d { "denominator satisfies Y^d = 1".to_string() } else { format!("reduced {d} to {r}") })
    } else {
        (None, format!("denominator {d} fails Y^d = 1"))
    };
    RepeatRecord { measured, modulus, convergents: conv, accepted, reason }
}

/// Shor's order finding: superpose the first register, query `Y^l mod N`,
/// measure the second register, Fourier transform the first, measure `k`
/// and read `r` off the continued fraction of `k/Q`.
pub fn shor_order(problem: &OrderProblem, rng: &mut SimRng, max_repeats: usize) -> Result<OrderReport> {
    let prepared = problem.query_state()?;
    let (l, w) = (problem.first_width(), problem.second_width());
    let first: Vec<usize> = (0..l).collect();
    let second: Vec<usize> = (l..l + w).collect();
    let mut report = OrderReport { n: problem.n, y: problem.y, order: None, repeats: Vec::new() };
    for _ in 0..max_repeats {
        let mut s = prepared.clone();
        let c = s.measure(&second, rng)?.value();
        // the collapsed state is |ψ> ⊗ |c>, so the transform only needs the first register
        let mut psi = StateVector::normalized((0..1usize << l).map(|x| s.amplitude(x << w | c)).collect())?;
        qfft_mod2m(&mut psi, &first)?;
        let k = psi.measure(&first, rng)?.value() as u64;
        let rec = classify(problem.y, problem.n, k, problem.q);
        let done = rec.accepted;
        report.repeats.push(rec);
        if done.is_some() {
            report.order = done;
            break;
        }
    }
    Ok(report)
}

/// Doubling levels used by Kitaev order finding: `2⌈log2 N⌉ + 1`.
pub fn kitaev_bits(n: u64) -> u32 {
    2 * (u64::BITS - (n - 1).leading_zeros()) + 1
}

/// Kitaev's order finding: phase estimation of `|g> -> |gY mod N>` from `|1>`,
/// then continued fractions on `θ/2π`.
pub fn kitaev_order(n: u64, y: u64, config: PhaseConfig, rng: &mut SimRng, max_repeats: usize) -> Result<OrderReport> {
    if n < 3 || y < 2 || y >= n || gcd(y, n) != 1 {
        return Err(domain(format!("Y = {y} must lie in [2, N) and be coprime to N = {n}")));
    }
    let u = ModMul { n, y };
    if u.width() > 20 {
        return Err(Error::Resource(format!("N = {n} needs more than 20 qubits")));
    }
    let start = StateVector::basis_state(u.width(), 1)?;
    let modulus = 1u64 << (config.bits + 1);
    let mut report = OrderReport { n, y, order: None, repeats: Vec::new() };
    for _ in 0..max_repeats {
        let est = estimate_phase(&u, &start, config, rng)?;
        let measured = ((est.theta / (2.0 * PI) * modulus as f64).round() as u64) % modulus;
        let rec = classify(y, n, measured, modulus);
        let done = rec.accepted;
        report.repeats.push(rec);
        if done.is_some() {
            report.order = done;
            break;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderMethod {
    Classical,
    Shor,
    Kitaev,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FactorRoute {
    /// Even, or a prime power, found classically.
    Classical,
    /// `gcd(Y, N) > 1` for the random `Y`.
    Gcd { y: u64 },
    /// `gcd(Y^{r/2} ± 1, N)` with the order `r` of `Y`.
    Order { y: u64, r: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    pub n: u64,
    pub factor: u64,
    pub route: FactorRoute,
    pub quantum_repeats: usize,
    pub attempts: Vec<OrderReport>,
}

#[derive(Debug, Clone, Copy)]
pub struct FactorConfig {
    pub method: OrderMethod,
    /// Budget of quantum repeats across all random choices of `Y`.
    pub max_quantum_repeats: usize,
    pub max_attempts: usize,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self { method: OrderMethod::Shor, max_quantum_repeats: 20, max_attempts: 64 }
    }
}

/// Nontrivial factor of an odd composite `n` through order finding, with
/// classical handling of even numbers and prime powers.
pub fn factor(n: u64, rng: &mut SimRng, config: FactorConfig) -> Result<FactorReport> {
    if n < 4 || is_prime(n) {
        return Err(domain(format!("{n} has no nontrivial factor")));
    }
    let classical = |f: u64| FactorReport { n, factor: f, route: FactorRoute::Classical, quantum_repeats: 0, attempts: vec![] };
    if n % 2 == 0 {
        return Ok(classical(2));
    }
    if let Some((p, _)) = prime_power(n) {
        return Ok(classical(p));
    }
    let mut used = 0usize;
    let mut attempts = Vec::new();
    for _ in 0..config.max_attempts {
        let y = rng.random_range(2..n);
        let g = gcd(y, n);
        if g > 1 {
            return Ok(FactorReport { n, factor: g, route: FactorRoute::Gcd { y }, quantum_repeats: used, attempts });
        }
        let budget = config.max_quantum_repeats.saturating_sub(used);
        if budget == 0 && config.method != OrderMethod::Classical {
            break;
        }
        let report = match config.method {
            OrderMethod::Classical => OrderReport {
                n,
                y,
                order: Some(classical_order(y, n)?),
                repeats: vec![],
            },
            OrderMethod::Shor => {
                let mut child = seeded(fork_seed(rng));
                shor_order(&OrderProblem::new(n, y)?, &mut child, budget)?
            }
            OrderMethod::Kitaev => {
                let mut child = seeded(fork_seed(rng));
                kitaev_order(n, y, PhaseConfig::new(kitaev_bits(n)), &mut child, budget)?
            }
        };
        used += report.repeats.len();
        let order = report.order;
        attempts.push(report);
        let Some(r) = order else { continue };
        if r % 2 == 1 {
            continue;
        }
        let half = modpow(y, r / 2, n);
        if half == n - 1 {
            continue;
        }
        for candidate in [gcd(half + n - 1, n), gcd(half + 1, n)] {
            if candidate > 1 && candidate < n {
                return Ok(FactorReport {
                    n,
                    factor: candidate,
                    route: FactorRoute::Order { y, r },
                    quantum_repeats: used,
                    attempts,
                });
            }
        }
    }
    Err(Error::Failure(format!("no factor of {n} after {used} quantum repeats and {} order attempts", attempts.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsaKey {
    pub n: u64,
    pub e: u64,
    pub p: u64,
    pub q: u64,
    pub d: u64,
}

impl RsaKey {
    pub fn public(&self) -> (u64, u64) {
        (self.n, self.e)
    }
}

pub fn rsa_keygen(p: u64, q: u64, e: u64) -> Result<RsaKey> {
    if p == q || !is_prime(p) || !is_prime(q) {
        return Err(domain(format!("P = {p} and Q = {q} must be distinct primes")));
    }
    let n = p.checked_mul(q).filter(|&n| n < 1 << 32).ok_or_else(|| domain("modulus too large"))?;
    let phi = (p - 1) * (q - 1);
    if gcd(e, phi) != 1 {
        return Err(domain(format!("E = {e} is not coprime to (P-1)(Q-1) = {phi}")));
    }
    let d = mod_inverse(e, phi)?;
    Ok(RsaKey { n, e, p, q, d })
}

pub fn rsa_encrypt(m: u64, key: &RsaKey) -> Result<u64> {
    if m >= key.n {
        return Err(domain(format!("message {m} must be below N = {}", key.n)));
    }
    Ok(modpow(m, key.e, key.n))
}

pub fn rsa_decrypt(c: u64, key: &RsaKey) -> Result<u64> {
    if c >= key.n {
        return Err(domain(format!("ciphertext {c} must be below N = {}", key.n)));
    }
    Ok(modpow(c, key.d, key.n))
}

/// Recovers the plaintext from `c` and the public key alone: with `r` the
/// order of `c`, `D' = E^{-1} mod r` and `M = c^{D'} mod N`. A ciphertext
/// sharing a factor with `N` exposes that factor directly through the gcd.
pub fn rsa_crack(c: u64, public: (u64, u64), mut order: impl FnMut(u64, u64) -> Result<u64>) -> Result<u64> {
    let (n, e) = public;
    if c >= n {
        return Err(domain(format!("ciphertext {c} must be below N = {n}")));
    }
    if c <= 1 {
        return Ok(c);
    }
    let g = gcd(c, n);
    if g > 1 {
        let (p, q) = (g, n / g);
        let d = mod_inverse(e, (p - 1) * (q - 1))?;
        return Ok(modpow(c, d, n));
    }
    let r = order(c, n)?;
    if modpow(c, r, n) != 1 {
        return Err(Error::Failure(format!("order finder returned {r}, which is not an order of {c}")));
    }
    let d = mod_inverse(e % r, r)?;
    Ok(modpow(c, d, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_arithmetic() {
        assert_eq!(modpow(7, 4, 15), 1);
        assert_eq!(modpow(5, 0, 7), 1);
        assert_eq!(modpow(2, 7, 33), 29);
        assert_eq!(mod_inverse(7, 20).unwrap(), 3);
        assert_eq!(mod_inverse(1, 20).unwrap(), 1);
        assert!(mod_inverse(4, 8).is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(continued_fraction_approx(192, 256, 15), Fraction { num: 3, den: 4 });
        assert_eq!(continued_fraction_approx(0, 256, 15), Fraction { num: 0, den: 1 });
        assert_eq!(continued_fraction_approx(31, 64, 10), Fraction { num: 1, den: 2 });
        let dens: Vec<u64> = convergents(31, 64).iter().map(|f| f.den).collect();
        assert_eq!(dens, vec![1, 2, 31, 64]);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(125), Some((5, 3)));
        assert_eq!(prime_power(15), None);
    }

    #[test]
    fn shor_small_orders() {
        let p = OrderProblem::new(15, 7).unwrap();
        assert_eq!(p.q, 256);
        let rep = shor_order(&p, &mut seeded(3), 20).unwrap();
        assert_eq!(rep.order, Some(4));
        let p = OrderProblem::new(21, 2).unwrap();
        assert_eq!(p.q, 512);
        assert_eq!(shor_order(&p, &mut seeded(4), 20).unwrap().order, Some(6));
    }

    #[test]
    fn exact_periodicity() {
        let p = OrderProblem::new(15, 7).unwrap();
        let dist = shor_k_distribution(&p).unwrap();
        for (k, prob) in dist.iter().enumerate() {
            if k % 64 == 0 {
                assert!((prob - 0.25).abs() < 1e-12);
            } else {
                assert!(*prob < 1e-12);
            }
        }
    }

    #[test]
    fn kitaev_eigenvector_phase() {
        // Σ_j e^{2πij/4}|7^j mod 15> picks up e^{-2πi/4}
        use num_complex::Complex64;
        let u = ModMul { n: 15, y: 7 };
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        for j in 0..4u64 {
            amps[modpow(7, j, 15) as usize] = Complex64::from_polar(0.5, 2.0 * PI * j as f64 / 4.0);
        }
        let v = StateVector::from_amplitudes(amps).unwrap();
        let mut w = v.clone();
        u.apply_power(&mut w, 1).unwrap();
        let ratio = v.overlap(&w).unwrap();
        assert!((ratio - Complex64::from_polar(1.0, -PI / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn kitaev_orders() {
        let cfg = PhaseConfig::new(kitaev_bits(15));
        assert_eq!(kitaev_order(15, 7, cfg, &mut seeded(5), 20).unwrap().order, Some(4));
        assert_eq!(kitaev_order(15, 4, cfg, &mut seeded(6), 20).unwrap().order, Some(2));
    }

    #[test]
    fn factoring_routes() {
        let r = factor(15, &mut seeded(1), FactorConfig::default()).unwrap();
        assert!(r.factor == 3 || r.factor == 5);
        let r = factor(9, &mut seeded(1), FactorConfig::default()).unwrap();
        assert_eq!((r.factor, r.route), (3, FactorRoute::Classical));
        assert!(factor(13, &mut seeded(1), FactorConfig::default()).is_err());
    }

    #[test]
    fn rsa_examples() {
        let key = rsa_keygen(3, 11, 7).unwrap();
        assert_eq!(key.d, 3);
        assert_eq!(rsa_encrypt(2, &key).unwrap(), 29);
        assert_eq!(rsa_decrypt(29, &key).unwrap(), 2);
        assert_eq!(rsa_encrypt(0, &key).unwrap(), 0);
        assert_eq!(classical_order(29, 33).unwrap(), 10);
        assert_eq!(rsa_crack(29, key.public(), classical_order).unwrap(), 2);
        assert!(rsa_keygen(3, 11, 5).is_err());
        assert!(rsa_keygen(4, 11, 7).is_err());
    }
}
