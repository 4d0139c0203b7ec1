mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbvqe::pauli_bench::*;
use sbvqe::sb_plan::MeasurementPlan;
use sbvqe::tb_model::{assemble_hamiltonian, fold};
use sbvqe::{Complex, SparseHermitian, Supercell, SupercellDims, TbParameterSet};

fn all_words(n: usize) -> Vec<String> {
    let mut words = vec![String::new()];
    for _ in 0..n {
        words = words
            .iter()
            .flat_map(|w| "IXYZ".chars().map(move |ch| format!("{w}{ch}")))
            .collect();
    }
    words
}

/// `(1/2^N) Tr(P H)` over all `4^N` words.
fn trace_oracle(h: &SparseHermitian) -> Vec<(String, f64)> {
    let n = h.n_qubits();
    let dense = h.to_dense();
    let threshold = PAULI_DROP_TOLERANCE * h.max_abs();
    all_words(n)
        .into_iter()
        .filter_map(|w| {
            let coeff = (word_matrix(&w) * &dense).trace() / Complex::new((1 << n) as f64, 0.0);
            (coeff.re.abs() > threshold).then_some((w, coeff.re))
        })
        .collect()
}

fn commutes_densely(p: &PauliTerm, q: &PauliTerm) -> bool {
    let (a, b) = (word_matrix(&p.word()), word_matrix(&q.word()));
    max_abs_diff(&(&a * &b), &(&b * &a)) < 1e-12
}

fn random_word<R: Rng>(n: usize, rng: &mut R) -> PauliTerm {
    let w: String = (0..n)
        .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
        .collect();
    PauliTerm::from_word(&w, 1.0).unwrap()
}

fn fixture_fold() -> SparseHermitian {
    let cell = Supercell::build(SupercellDims::new(1, 1, 2), true).unwrap();
    fold(
        &assemble_hamiltonian(&cell, &TbParameterSet::pbi3_fixture(), true).unwrap(),
        0.0,
    )
}

#[test]
fn random_hermitian_decomposition_matches_trace_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for density in [1.0, 0.3, 0.05] {
        let h = random_hermitian(4, density, &mut rng);
        let terms = pauli_decompose(&h).unwrap();
        let oracle = trace_oracle(&h);
        assert_eq!(terms.len(), oracle.len());
        for (w, coeff) in &oracle {
            let t = terms.iter().find(|t| &t.word() == w).unwrap();
            assert!((t.coeff - coeff).abs() < 1e-12);
        }
        let rebuilt = pauli_rebuild(4, &terms).unwrap();
        assert!(max_abs_diff(&rebuilt.to_dense(), &h.to_dense()) < 1e-12);
    }
}

#[test]
fn words_are_unique_and_coefficients_nonzero() {
    let terms = pauli_decompose(&fixture_fold()).unwrap();
    let mut words: Vec<String> = terms.iter().map(|t| t.word()).collect();
    words.sort();
    words.dedup();
    assert_eq!(words.len(), terms.len());
    assert!(terms.iter().all(|t| t.coeff != 0.0));
}

#[test]
fn fixture_circuit_count_ordering() {
    let f = fixture_fold();
    let terms = pauli_decompose(&f).unwrap();
    let (qwc, gc) = (qwc_group(&terms).len(), gc_group(&terms).len());
    let sb = MeasurementPlan::from_hamiltonian(&f).circuit_count();
    assert!(
        gc <= sb && sb <= qwc && qwc <= terms.len(),
        "gc {gc} sb {sb} qwc {qwc} naive {}",
        terms.len()
    );
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let opts = BenchOptions {
        min_sample_time: std::time::Duration::ZERO,
        ..Default::default()
    };
    let sizes = [SupercellDims::new(1, 1, 1)];
    let p = TbParameterSet::pbi3_fixture();
    let strip = |mut rs: Vec<GroupingReport>| {
        for r in &mut rs {
            r.mapping_time_s = 0.0;
            r.decompose_time_s = 0.0;
            r.group_time_s = 0.0;
        }
        rs
    };
    let a = strip(benchmark(&sizes, false, &p, 0.0, &opts).unwrap());
    let b = strip(benchmark(&sizes, false, &p, 0.0, &opts).unwrap());
    assert_eq!(a, b);
    let naive = a
        .iter()
        .find(|r| r.method == Method::Naive)
        .unwrap()
        .circuit_count
        .unwrap();
    assert!(a
        .iter()
        .all(|r| r.circuit_count.unwrap() <= naive && r.circuit_count.unwrap() >= 1));
}

#[test]
fn zero_timeout_censors() {
    let opts = BenchOptions {
        methods: vec![Method::Gc],
        timeout: std::time::Duration::ZERO,
        ..Default::default()
    };
    let r = benchmark_operator(&fixture_fold(), SupercellDims::new(1, 1, 2), &opts).unwrap();
    assert!(r[0].censored);
    assert_eq!(r[0].circuit_count, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutation_tests_match_matrix_commutators(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (random_word(n, &mut rng), random_word(n, &mut rng));
        prop_assert_eq!(commute(&p, &q), commutes_densely(&p, &q));
        let qubit_wise = (0..n).all(|k| {
            let (a, b) = (p.letter(k), q.letter(k));
            a == b || a == 'I' || b == 'I'
        });
        prop_assert_eq!(qubit_wise_commute(&p, &q), qubit_wise);
    }

    #[test]
    fn groups_commute_exhaustively(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, 0.4, &mut rng);
        let terms = pauli_decompose(&h).unwrap();
        for (groups, qw) in [(qwc_group(&terms), true), (gc_group(&terms), false)] {
            prop_assert_eq!(groups.iter().map(|g| g.len()).sum::<usize>(), terms.len());
            for g in &groups {
                for (i, a) in g.iter().enumerate() {
                    for b in &g[i + 1..] {
                        prop_assert!(commutes_densely(a, b));
                        if qw {
                            // Each single-qubit factor commutes on its own.
                            for k in 0..n {
                                let (la, lb) = (pauli_matrix(a.letter(k)), pauli_matrix(b.letter(k)));
                                prop_assert!(max_abs_diff(&(&la * &lb), &(&lb * &la)) < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rebuild_is_exact(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, 0.3, &mut rng);
        let rebuilt = pauli_rebuild(n, &pauli_decompose(&h).unwrap()).unwrap();
        let diff: DMatrix<Complex> = rebuilt.to_dense() - h.to_dense();
        prop_assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }
}
