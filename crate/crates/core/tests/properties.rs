//! Property checks on the state engine, circuit format and transforms.
use num_complex::Complex64;
use proptest::prelude::*;
use qvm::circuit::{parse_circuit, random_circuit, render_circuit};
use qvm::rng::seeded;
use qvm::transforms::{inverse_qfft_mod2m, qfft_mod2m};
use qvm::{Oracle, StateVector};

fn random_state(n: usize, seed: u64) -> StateVector {
    use rand::Rng;
    let mut rng = seeded(seed);
    let amps = (0..1usize << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    StateVector::normalized(amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circuits_preserve_norm(n in 1usize..7, depth in 1usize..15, seed in any::<u64>()) {
        let c = random_circuit(n, depth, &mut seeded(seed)).unwrap();
        let mut s = random_state(n, seed ^ 1);
        c.apply_unitary(&mut s).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_undoes_circuit(n in 1usize..6, depth in 1usize..12, seed in any::<u64>()) {
        let c = random_circuit(n, depth, &mut seeded(seed)).unwrap();
        let start = random_state(n, seed ^ 2);
        let mut s = start.clone();
        c.apply_unitary(&mut s).unwrap();
        c.inverse().unwrap().apply_unitary(&mut s).unwrap();
        prop_assert!(start.fidelity(&s).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn text_round_trip_keeps_the_operator(n in 1usize..5, depth in 1usize..10, seed in any::<u64>()) {
        let c = random_circuit(n, depth, &mut seeded(seed)).unwrap();
        let back = parse_circuit(&render_circuit(&c)).unwrap();
        let d = (c.to_matrix().unwrap() - back.to_matrix().unwrap()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12, "{}", d);
    }

    #[test]
    fn qfft_round_trip(m in 1usize..8, seed in any::<u64>()) {
        let start = random_state(m, seed);
        let reg: Vec<usize> = (0..m).collect();
        let mut s = start.clone();
        qfft_mod2m(&mut s, &reg).unwrap();
        inverse_qfft_mod2m(&mut s, &reg).unwrap();
        prop_assert!(start.fidelity(&s).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn oracle_tables_round_trip(n in 1usize..6, w in 1usize..8, seed in any::<u64>(), binary in any::<bool>()) {
        use rand::Rng;
        let mut rng = seeded(seed);
        let table: Vec<u64> = (0..1usize << n).map(|_| rng.random_range(0..1u64 << w)).collect();
        let f = Oracle::new(table, w).unwrap();
        let back = Oracle::parse_table(&f.to_table_text(binary)).unwrap();
        prop_assert_eq!(back.table(), f.table());
    }
}
