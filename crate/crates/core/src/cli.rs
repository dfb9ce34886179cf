//! The `qvm` command line.
//!
//! Every subcommand builds a structured report; `--format` picks JSON, CSV or
//! plain text. Exit status is 0 on success, 1 when the algorithm reports a
//! failure, and 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::algorithms::{
    deutsch_jozsa, estimate_mean, estimate_median, find_minimum, grover_shots, simon, GroverGeometry, PromiseTag,
};
use crate::circuit::{execute, parse_circuit_with, random_circuit, sample, Oracle};
use crate::error::{Error, Result};
use crate::factoring::{
    classical_order, factor, kitaev_order, kitaev_bits, rsa_crack, rsa_decrypt, rsa_encrypt, rsa_keygen, shor_order,
    FactorConfig, OrderMethod, OrderProblem, OrderReport,
};
use crate::gates::matrix_distance;
use crate::pathsum::{interference_example, path_amplitude, path_amplitude_with_stats, point_mass, stochastic_simulate};
use crate::qec::{
    apply_pauli, concatenation_trajectory, css_correct, css_encode_logical, discretization_expand, effective_noise_bound,
    eta_eff_majority, levels_to_reach, memory_experiment, steane, threshold, CssCode, LinearCodeF2, NoiseModel,
    PauliError, PauliKind,
};
use crate::rng::{fork_seed, seeded};
use crate::state::StateVector;
use crate::transforms::{approx_qfft_bound, dft_matrix, qfft_circuit, PhaseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "qvm", version, about = "Quantum circuit simulator and algorithm suite")]
pub struct Cli {
    /// Seed for every random choice; identical flags give identical output.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DjKind {
    Zero,
    One,
    Balanced,
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Depolarizing,
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderFinder {
    Shor,
    Kitaev,
    Classical,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deutsch-Jozsa on a table file or a generated constant/balanced function.
    Dj {
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        #[arg(long, value_enum, default_value_t = DjKind::Balanced)]
        kind: DjKind,
    },
    /// Simon's algorithm; `--secret 0` generates a one-to-one function.
    Simon {
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        /// Hidden string in binary.
        #[arg(long, default_value = "101")]
        secret: String,
        /// Samples per input bit.
        #[arg(long, default_value_t = 4)]
        reps: usize,
    },
    /// Grover search for the marked indices.
    Grover {
        #[arg(long = "n", alias = "qubits", default_value_t = 3)]
        n: usize,
        /// Marked indices, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        marked: Vec<usize>,
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Rotation count; defaults to floor((π/4)√(N/t)).
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Minimum finding over a table file or a random table.
    Min {
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        qubits: usize,
    },
    /// ε-approximate median; the default table is f(i) = i.
    Median {
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        qubits: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Mean estimation; table entries v read as v/2^w - 1/2.
    Mean {
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        qubits: usize,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Factor N with Shor's order finding, or find the order of Y.
    Shor {
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        y: Option<u64>,
        #[arg(long, default_value_t = 20)]
        max_repeats: usize,
    },
    /// Factor N with phase-estimation order finding.
    KitaevFactor {
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        y: Option<u64>,
        #[arg(long, default_value_t = 20)]
        max_repeats: usize,
        /// Doubling levels; defaults to 2⌈log2 N⌉ + 1.
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Toy RSA: key generation, every round trip, and decryption by order finding.
    RsaDemo {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 11)]
        q: u64,
        #[arg(long, default_value_t = 7)]
        e: u64,
        #[arg(long, value_enum, default_value_t = OrderFinder::Shor)]
        method: OrderFinder,
    },
    /// CSS code demo: single-error sweep and a memory experiment.
    QeccDemo {
        /// Generator-matrix file for C; defaults to the Hamming code.
        #[arg(long)]
        code: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long, value_enum, default_value_t = NoiseKind::Depolarizing)]
        noise: NoiseKind,
    },
    /// Effective-noise recursion and threshold.
    Threshold {
        #[arg(long, default_value_t = 10)]
        area: u64,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 1e-12)]
        target: f64,
    },
    /// Path sums against the state engine, and the interference example.
    PathsumVerify {
        circuit: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        qubits: usize,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 100)]
        circuits: usize,
    },
    /// Run a circuit file.
    Run {
        circuit: PathBuf,
        /// Oracle tables as `name=path`, or a path whose file stem is the name.
        #[arg(long)]
        oracle: Vec<String>,
        #[arg(long, default_value_t = 0)]
        input: usize,
    },
    /// QFFT against the dense DFT, and the approximate QFT bound.
    QfftVerify {
        #[arg(long, default_value_t = 8)]
        qubits: usize,
        #[arg(long, default_value_t = 4)]
        cutoff: u32,
    },
}

/// Report plus the status it should exit with.
struct Outcome {
    report: Map<String, Value>,
    histogram: Option<BTreeMap<String, u64>>,
    failed: bool,
}

impl Outcome {
    fn new(command: &str, seed: u64) -> Self {
        let mut report = Map::new();
        report.insert("command".into(), json!(command));
        report.insert("seed".into(), json!(seed));
        Self { report, histogram: None, failed: false }
    }

    fn set(&mut self, key: &str, value: impl serde::Serialize) -> &mut Self {
        self.report.insert(key.into(), serde_json::to_value(value).expect("plain data"));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => CliOutput {
            code: i32::from(out.failed),
            stdout: render(&out, cli.format),
            stderr: String::new(),
        },
        Err(Error::Failure(msg)) => CliOutput { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(e) => CliOutput { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Error {
    Error::Validation(format!("{flag}: {msg}"))
}

fn load_oracle(path: &std::path::Path) -> Result<Oracle> {
    Oracle::load(path).map_err(|e| usage("--oracle", e))
}

fn random_balanced(n: usize, rng: &mut crate::rng::SimRng) -> Result<Oracle> {
    let size = 1usize << n;
    let mut table: Vec<u64> = (0..size).map(|i| u64::from(i < size / 2)).collect();
    table.shuffle(rng);
    Oracle::new(table, 1)
}

/// Two-to-one table with period `s`, or a random permutation when `s = 0`.
pub fn simon_table(n: usize, s: u64, rng: &mut crate::rng::SimRng) -> Result<Oracle> {
    let size = 1usize << n;
    let mut labels: Vec<u64> = (0..size as u64).collect();
    labels.shuffle(rng);
    let mut table = vec![u64::MAX; size];
    let mut next = 0;
    for x in 0..size {
        if table[x] == u64::MAX {
            table[x] = labels[next];
            table[x ^ s as usize] = labels[next];
            next += 1;
        }
    }
    Oracle::new(table, n.max(1))
}

fn order_repeats(report: &OrderReport) -> Value {
    json!(report
        .repeats
        .iter()
        .map(|r| json!({
            "measured": r.measured,
            "modulus": r.modulus,
            "convergents": r.convergents.iter().map(|f| format!("{}/{}", f.num, f.den)).collect::<Vec<_>>(),
            "accepted": r.accepted,
            "reason": r.reason,
        }))
        .collect::<Vec<_>>())
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let seed = cli.seed;
    let mut rng = seeded(seed);
    match &cli.command {
        Command::Dj { oracle, qubits, kind } => {
            let f = match oracle {
                Some(p) => load_oracle(p)?,
                None => match kind {
                    DjKind::Zero => Oracle::new(vec![0; 1 << qubits], 1)?,
                    DjKind::One => Oracle::new(vec![1; 1 << qubits], 1)?,
                    DjKind::Parity => Oracle::from_fn(*qubits, 1, |i| (i.count_ones() & 1) as u64)?,
                    DjKind::Balanced => random_balanced(*qubits, &mut rng)?,
                },
            };
            let out = deutsch_jozsa(&f, &mut rng)?;
            let mut o = Outcome::new("dj", seed);
            o.set("qubits", f.input_width() + 1)
                .set("queries", out.queries)
                .set("tag", out.tag)
                .set("measured", format!("{:0w$b}", out.measured, w = f.input_width()));
            Ok(o)
        }
        Command::Simon { oracle, qubits, secret, reps } => {
            let (f, s) = match oracle {
                Some(p) => (load_oracle(p)?, None),
                None => {
                    let s = u64::from_str_radix(secret, 2).map_err(|_| usage("--secret", "expected a binary string"))?;
                    if s >> qubits != 0 {
                        return Err(usage("--secret", format!("longer than {qubits} bits")));
                    }
                    (simon_table(*qubits, s, &mut rng)?, Some(s))
                }
            };
            let out = simon(&f, *reps, fork_seed(&mut rng))?;
            let n = f.input_width();
            let mut o = Outcome::new("simon", seed);
            let tag = match out.tag {
                Some(PromiseTag::TwoToOne(s)) => json!({ "two_to_one": format!("{s:0n$b}") }),
                Some(PromiseTag::OneToOne) => json!("one_to_one"),
                _ => json!("inconclusive"),
            };
            let violations = s.map(|s| out.samples.iter().filter(|&&k| (k & s).count_ones() % 2 == 1).count());
            o.set("qubits", n + f.output_width())
                .set("queries", out.queries)
                .set("tag", tag)
                .set("nullspace", out.nullspace.iter().map(|v| format!("{v:0n$b}")).collect::<Vec<_>>())
                .set("orthogonality_violations", violations);
            if cli.verbose {
                o.set("samples", out.samples.iter().map(|v| format!("{v:0n$b}")).collect::<Vec<_>>());
            }
            o.failed = out.tag.is_none();
            Ok(o)
        }
        Command::Grover { n, marked, oracle, iterations } => {
            let f = match oracle {
                Some(p) => load_oracle(p)?,
                None => {
                    if let Some(bad) = marked.iter().find(|&&m| m >> n != 0) {
                        return Err(usage("--marked", format!("index {bad} out of range for {n} qubits")));
                    }
                    Oracle::from_fn(*n, 1, |i| u64::from(marked.contains(&i)))?
                }
            };
            let t = f.table().iter().filter(|&&v| v == 1).count();
            let geometry = GroverGeometry::new(f.size(), t).map_err(|e| usage("--marked", e))?;
            let q = iterations.unwrap_or(geometry.iterations);
            let run = sample(&crate::algorithms::grover_circuit(&f, q)?, 0, cli.shots, seed)?;
            let successes = grover_shots(&f, q, cli.shots, seed)?;
            let mut o = Outcome::new("grover", seed);
            o.set("qubits", f.input_width() + 1)
                .set("items", f.size())
                .set("marked", t)
                .set("iterations", q)
                .set("queries", run.queries)
                .set("shots", cli.shots)
                .set("success_probability", geometry.success_probability(q))
                .set("success_frequency", successes as f64 / cli.shots as f64);
            o.histogram = run.registers.get("x").cloned();
            Ok(o)
        }
        Command::Min { oracle, qubits } => {
            let f = match oracle {
                Some(p) => load_oracle(p)?,
                None => {
                    let w = qubits + 2;
                    let table = (0..1usize << qubits).map(|_| rng.random_range(0..1u64 << w)).collect();
                    Oracle::new(table, w)?
                }
            };
            let out = find_minimum(&f, &mut rng)?;
            let truth = (0..f.size()).min_by_key(|&i| (f.eval(i), i)).unwrap_or(0);
            let mut o = Outcome::new("min", seed);
            o.set("qubits", f.input_width())
                .set("queries", out.queries)
                .set("index", out.index)
                .set("value", out.value)
                .set("grover_calls", out.grover_calls)
                .set("improvements", out.improvements)
                .set("classical_argmin", truth);
            o.failed = out.index != truth;
            Ok(o)
        }
        Command::Median { oracle, qubits, eps } => {
            let f = match oracle {
                Some(p) => load_oracle(p)?,
                None => Oracle::from_fn(*qubits, (*qubits).max(1), |i| i as u64)?,
            };
            let out = estimate_median(&f, *eps, &mut rng).map_err(|e| usage("--eps", e))?;
            let n = f.size() as f64;
            let below = f.table().iter().filter(|&&v| v < out.value).count() as f64 / n;
            let at_most = f.table().iter().filter(|&&v| v <= out.value).count() as f64 / n;
            let mut o = Outcome::new("median", seed);
            o.set("qubits", f.input_width() + 1)
                .set("queries", out.queries)
                .set("eps", eps)
                .set("median", out.value)
                .set("binary_search_steps", out.steps)
                .set("fraction_below", below)
                .set("fraction_at_most", at_most);
            o.failed = below > (1.0 + eps) / 2.0 || at_most < (1.0 - eps) / 2.0;
            Ok(o)
        }
        Command::Mean { oracle, qubits, eps } => {
            let values: Vec<f64> = match oracle {
                Some(p) => {
                    let f = load_oracle(p)?;
                    let scale = (1u64 << f.output_width()) as f64;
                    f.table().iter().map(|&v| v as f64 / scale - 0.5).collect()
                }
                None => {
                    let size = 1usize << qubits;
                    (0..size).map(|k| -0.5 + k as f64 / size as f64).collect()
                }
            };
            let out = estimate_mean(&values, *eps, &mut rng).map_err(|e| usage("--eps", e))?;
            let truth = values.iter().sum::<f64>() / values.len() as f64;
            let mut o = Outcome::new("mean", seed);
            o.set("qubits", values.len().trailing_zeros() + 1)
                .set("queries", out.queries)
                .set("eps", eps)
                .set("mean", out.mean)
                .set("digit_means", &out.digits)
                .set("direct_mean", truth);
            o.failed = (out.mean - truth).abs() > *eps;
            Ok(o)
        }
        Command::Shor { n, y, max_repeats } => {
            let mut o = Outcome::new("shor", seed);
            o.set("n", n);
            if let Some(y) = y {
                let problem = OrderProblem::new(*n, *y).map_err(|e| usage("--y", e))?;
                let report = shor_order(&problem, &mut rng, *max_repeats)?;
                o.set("qubits", problem.num_qubits())
                    .set("q", problem.q)
                    .set("y", y)
                    .set("order", report.order)
                    .set("queries", report.repeats.len())
                    .set("repeats", order_repeats(&report));
                o.failed = report.order.is_none();
                return Ok(o);
            }
            let config = FactorConfig { method: OrderMethod::Shor, max_quantum_repeats: *max_repeats, ..Default::default() };
            let out = factor(*n, &mut rng, config).map_err(|e| match e {
                Error::Domain(m) => usage("--n", m),
                other => other,
            })?;
            let qubits = OrderProblem::new(*n, 2).map(|p| p.num_qubits()).unwrap_or(0);
            o.set("qubits", qubits)
                .set("factor", out.factor)
                .set("cofactor", n / out.factor)
                .set("route", &out.route)
                .set("quantum_repeats", out.quantum_repeats)
                .set("queries", out.quantum_repeats)
                .set("repeats", out.attempts.iter().map(|a| json!({ "y": a.y, "order": a.order, "repeats": order_repeats(a) })).collect::<Vec<_>>());
            Ok(o)
        }
        Command::KitaevFactor { n, y, max_repeats, levels } => {
            let mut o = Outcome::new("kitaev-factor", seed);
            let width = (u64::BITS - n.saturating_sub(1).leading_zeros()) as usize;
            o.set("n", n).set("qubits", width + 1);
            if let Some(y) = y {
                let bits = levels.unwrap_or_else(|| kitaev_bits(*n));
                let report = kitaev_order(*n, *y, PhaseConfig::new(bits), &mut rng, *max_repeats).map_err(|e| usage("--y", e))?;
                let cfg = PhaseConfig::new(bits);
                o.set("y", y)
                    .set("levels", bits)
                    .set("samples_per_level", cfg.samples_per_level())
                    .set("failure_bound", cfg.failure_bound())
                    .set("order", report.order)
                    .set("queries", report.repeats.len() * 2 * cfg.samples_per_level() * (bits as usize + 1))
                    .set("repeats", order_repeats(&report));
                o.failed = report.order.is_none();
                return Ok(o);
            }
            let config = FactorConfig { method: OrderMethod::Kitaev, max_quantum_repeats: *max_repeats, ..Default::default() };
            let out = factor(*n, &mut rng, config).map_err(|e| match e {
                Error::Domain(m) => usage("--n", m),
                other => other,
            })?;
            o.set("factor", out.factor)
                .set("cofactor", n / out.factor)
                .set("route", &out.route)
                .set("quantum_repeats", out.quantum_repeats)
                .set("queries", out.quantum_repeats)
                .set("repeats", out.attempts.iter().map(|a| json!({ "y": a.y, "order": a.order, "repeats": order_repeats(a) })).collect::<Vec<_>>());
            Ok(o)
        }
        Command::RsaDemo { p, q, e, method } => {
            let key = rsa_keygen(*p, *q, *e).map_err(|err| usage("--p/--q/--e", err))?;
            let mut round_trips = 0;
            let mut cracked = 0;
            let mut repeats = 0;
            let mut rows = Vec::new();
            for m in 0..key.n {
                let c = rsa_encrypt(m, &key)?;
                let back = rsa_decrypt(c, &key)?;
                round_trips += u64::from(back == m);
                let recovered = rsa_crack(c, key.public(), |y, n| match method {
                    OrderFinder::Classical => classical_order(y, n),
                    OrderFinder::Shor => {
                        let r = shor_order(&OrderProblem::new(n, y)?, &mut rng, 20)?;
                        repeats += r.repeats.len();
                        r.order_or_failure()
                    }
                    OrderFinder::Kitaev => {
                        let r = kitaev_order(n, y, PhaseConfig::new(kitaev_bits(n)), &mut rng, 20)?;
                        repeats += r.repeats.len();
                        r.order_or_failure()
                    }
                })?;
                cracked += u64::from(recovered == m);
                rows.push(json!({ "message": m, "ciphertext": c, "decrypted": back, "cracked": recovered }));
            }
            let mut o = Outcome::new("rsa-demo", seed);
            o.set("n", key.n)
                .set("e", key.e)
                .set("d", key.d)
                .set("qubits", OrderProblem::new(key.n, 2).map(|p| p.num_qubits()).unwrap_or(0))
                .set("queries", repeats)
                .set("messages", key.n)
                .set("round_trips", round_trips)
                .set("cracked", cracked);
            if cli.verbose {
                o.set("rows", rows);
            }
            o.failed = round_trips != key.n || cracked != key.n;
            Ok(o)
        }
        Command::QeccDemo { code, eta, rounds, noise } => {
            let css = match code {
                Some(p) => CssCode::new(LinearCodeF2::load(p).map_err(|e| usage("--code", e))?).map_err(|e| usage("--code", e))?,
                None => steane(),
            };
            let model = match noise {
                NoiseKind::Depolarizing => NoiseModel::depolarizing(*eta),
                NoiseKind::X => NoiseModel::only(*eta, PauliKind::X),
                NoiseKind::Y => NoiseModel::only(*eta, PauliKind::Y),
                NoiseKind::Z => NoiseModel::only(*eta, PauliKind::Z),
            }
            .map_err(|e| usage("--eta", e))?;
            let m = css.length();
            let logical: Vec<Complex64> = (0..1usize << css.logical_qubits()).map(|j| Complex64::new(1.0 + j as f64, 0.5)).collect();
            let ideal = css_encode_logical(&css, &logical)?;
            let mut corrected = 0;
            let mut worst = 1.0f64;
            for qubit in 0..m {
                for kind in [PauliKind::X, PauliKind::Y, PauliKind::Z] {
                    let mut s = ideal.clone();
                    apply_pauli(&mut s, PauliError { qubit, kind })?;
                    css_correct(&mut s, &css, &mut rng)?;
                    let f = ideal.fidelity(&s)?;
                    worst = worst.min(f);
                    corrected += usize::from(f > 1.0 - 1e-10);
                }
            }
            let trace = if cli.verbose { 5 } else { 0 };
            let report = memory_experiment(&css, &model, *rounds, cli.shots, seed, trace)?;
            let t = css.correctable() as u64;
            let mut o = Outcome::new("qecc-demo", seed);
            o.set("qubits", m)
                .set("queries", 0)
                .set("logical_qubits", css.logical_qubits())
                .set("correctable", t)
                .set("single_errors_corrected", format!("{corrected}/{}", 3 * m))
                .set("worst_single_error_fidelity", worst)
                .set("eta", eta)
                .set("rounds", rounds)
                .set("shots", report.shots)
                .set("failures", report.failures)
                .set("failure_rate", report.rate)
                .set("std_error", report.std_error)
                .set("weight_tail", discretization_expand(*eta, m as u64, t)?.tail)
                .set("effective_noise_bound", effective_noise_bound(m as u64, t, *eta)?);
            if cli.verbose {
                o.set("traces", &report.traces);
            }
            o.failed = corrected != 3 * m;
            Ok(o)
        }
        Command::Threshold { area, d, eta, levels, target } => {
            let eta_c = threshold(*area, *d).map_err(|e| usage("--d", e))?;
            let mut o = Outcome::new("threshold", seed);
            o.set("qubits", 0)
                .set("queries", 0)
                .set("area", area)
                .set("d", d)
                .set("threshold", eta_c)
                .set("trajectory", concatenation_trajectory(*eta, *area, *d, *levels)?)
                .set("majority_eta_eff", eta_eff_majority(*eta))
                .set("levels_to_target", levels_to_reach(*eta, *area, *d, *target)?);
            Ok(o)
        }
        Command::PathsumVerify { circuit, qubits, depth, circuits } => {
            let list = match circuit {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| usage("circuit", e))?;
                    vec![parse_circuit_with(&text, &BTreeMap::new())?]
                }
                None => (0..*circuits)
                    .map(|_| {
                        let n = rng.random_range(1..=*qubits);
                        let d = rng.random_range(1..=*depth);
                        random_circuit(n, d, &mut rng)
                    })
                    .collect::<Result<_>>()?,
            };
            let mut worst = 0.0f64;
            let mut live = 0usize;
            for c in &list {
                let n = c.num_qubits();
                for i in [0usize, (1 << n) - 1] {
                    let mut s = StateVector::basis_state(n, i)?;
                    c.apply_unitary(&mut s)?;
                    for j in 0..1usize << n {
                        let (a, stats) = path_amplitude_with_stats(c, i, j)?;
                        worst = worst.max((a - s.amplitude(j)).norm());
                        live = live.max(stats.max_live_configurations);
                    }
                }
            }
            let (q, sc) = interference_example();
            let quantum: Vec<f64> = (0..4).map(|j| path_amplitude(&q, 3, j).map(|a| a.norm_sqr())).collect::<Result<_>>()?;
            let stochastic = stochastic_simulate(&sc, &point_mass(2, 3))?;
            let mut o = Outcome::new("pathsum-verify", seed);
            o.set("qubits", list.iter().map(|c| c.num_qubits()).max().unwrap_or(0))
                .set("queries", 0)
                .set("circuits", list.len())
                .set("max_amplitude_deviation", worst)
                .set("max_live_configurations", live)
                .set("interference_quantum", quantum)
                .set("interference_stochastic", stochastic);
            o.failed = worst > 1e-9;
            Ok(o)
        }
        Command::Run { circuit, oracle, input } => {
            let mut oracles = BTreeMap::new();
            for spec in oracle {
                let (name, path) = match spec.split_once('=') {
                    Some((name, path)) => (name.to_string(), PathBuf::from(path)),
                    None => {
                        let p = PathBuf::from(spec);
                        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("f").to_string();
                        (stem, p)
                    }
                };
                oracles.insert(name, load_oracle(&path)?);
            }
            let text = std::fs::read_to_string(circuit).map_err(|e| usage("circuit", e))?;
            let c = parse_circuit_with(&text, &oracles)?;
            let mut result = sample(&c, *input, cli.shots, seed)?;
            if cli.verbose {
                result.final_state = execute(&c, *input, &mut rng)?.final_state;
            }
            let mut o = Outcome::new("run", seed);
            o.report.insert("run".into(), serde_json::to_value(result.report(cli.verbose)).expect("plain data"));
            o.set("qubits", result.num_qubits).set("queries", result.queries);
            o.histogram = Some(result.joint.clone());
            if cli.format == Format::Text {
                o.report.insert("__text".into(), json!(result.to_text(cli.verbose)));
            }
            Ok(o)
        }
        Command::QfftVerify { qubits, cutoff } => {
            if *qubits == 0 || *qubits > 10 {
                return Err(usage("--qubits", "expected 1..=10"));
            }
            let mut deviations = Vec::new();
            for m in 1..=*qubits {
                let reg: Vec<usize> = (0..m).collect();
                let u = qfft_circuit(m, &reg, None)?.to_matrix()?;
                let f = dft_matrix(m);
                deviations.push((u - f).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
            let reg: Vec<usize> = (0..*qubits).collect();
            let approx = qfft_circuit(*qubits, &reg, Some(*cutoff))?.to_matrix()?;
            let exact = qfft_circuit(*qubits, &reg, None)?.to_matrix()?;
            let distance = matrix_distance(&approx, &exact)?;
            let bound = approx_qfft_bound(*qubits, *cutoff);
            let mut o = Outcome::new("qfft-verify", seed);
            o.set("qubits", qubits)
                .set("queries", 0)
                .set("max_entry_deviation", &deviations)
                .set("cutoff", cutoff)
                .set("approx_distance", distance)
                .set("approx_bound", bound);
            o.failed = deviations.iter().any(|&d| d > 1e-10) || distance > bound;
            Ok(o)
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render(out: &Outcome, format: Format) -> String {
    let mut report = out.report.clone();
    let text = report.remove("__text");
    match format {
        Format::Json => {
            if let Some(h) = &out.histogram {
                report.insert("histogram".into(), json!(h));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(report)).expect("plain data");
            s.push('\n');
            s
        }
        Format::Csv => {
            if let Some(h) = &out.histogram {
                let mut s = String::from("outcome,count\n");
                for (k, n) in h {
                    s.push_str(&format!("{k},{n}\n"));
                }
                return s;
            }
            let mut rows = Vec::new();
            flatten("", &Value::Object(report), &mut rows);
            let mut s = String::from("key,value\n");
            for (k, v) in rows {
                let v = if v.contains(',') || v.contains('"') { format!("\"{}\"", v.replace('"', "\"\"")) } else { v };
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
        Format::Text => {
            if let Some(Value::String(t)) = text {
                return t;
            }
            let mut rows = Vec::new();
            flatten("", &Value::Object(report), &mut rows);
            let mut s: String = rows.into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect();
            if let Some(h) = &out.histogram {
                for (k, n) in h {
                    s.push_str(&format!("count {k} {n}\n"));
                }
            }
            s
        }
    }
}
