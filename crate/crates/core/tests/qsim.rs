mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbvqe::qsim::*;
use sbvqe::sb_plan::{ghz_descriptor, GroupMember, MeasurementGroup, MeasurementPlan, Part};
use sbvqe::{Complex, SparseHermitian};

fn circuit_for(n: usize, x: usize, part: Part) -> sbvqe::sb_plan::GhzCircuit {
    ghz_descriptor(&MeasurementGroup {
        n_qubits: n,
        x,
        part,
        members: vec![],
    })
}

/// Two-qubit block on wires `(a, a + 1)` of an `n`-qubit register, as a dense matrix.
fn embed_block(n: usize, a: usize, u: &[[Complex; 4]; 4]) -> DMatrix<Complex> {
    let dim = 1 << n;
    let (hi, lo) = (n - 1 - a, n - 2 - a);
    let mut m = DMatrix::<Complex>::zeros(dim, dim);
    for col in 0..dim {
        let cin = ((col >> hi) & 1) << 1 | ((col >> lo) & 1);
        let rest = col & !(1 << hi) & !(1 << lo);
        for r in 0..4 {
            let row = rest | ((r >> 1) << hi) | ((r & 1) << lo);
            m[(row, col)] += u[r][cin];
        }
    }
    m
}

#[test]
fn ansatz_equals_dense_block_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ansatz = AnsatzCircuit::new(4, 2);
    let theta = random_angles(ansatz.n_params(), &mut rng);
    let mut u = DMatrix::<Complex>::identity(16, 16);
    let mut k = 0;
    for _ in 0..ansatz.layers {
        for (a, b) in ansatz.layer_pairs() {
            assert_eq!(b, a + 1);
            let block: [f64; PARAMS_PER_BLOCK] = theta[k..k + PARAMS_PER_BLOCK].try_into().unwrap();
            k += PARAMS_PER_BLOCK;
            u = embed_block(4, a, &su4_block(&block)) * u;
        }
    }
    let psi = apply_ansatz(&ansatz, &theta).unwrap();
    for (i, amp) in psi.amplitudes().iter().enumerate() {
        assert!((amp - u[(i, 0)]).norm() < 1e-12);
    }
}

#[test]
fn su4_block_is_unitary_and_locally_full_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let theta: [f64; 15] = random_angles(15, &mut rng).try_into().unwrap();
        let u = su4_block(&theta);
        let um = DMatrix::from_fn(4, 4, |i, j| u[i][j]);
        assert!(max_abs_diff(&(um.adjoint() * &um), &DMatrix::identity(4, 4)) < 1e-12);
        assert!((um.determinant() - Complex::new(1.0, 0.0)).norm() < 1e-10);

        // Jacobian of θ ↦ U in the 32 real coordinates; SU(4) has dimension 15.
        let h = 1e-6;
        let mut jac = DMatrix::<f64>::zeros(32, 15);
        for p in 0..15 {
            let (mut tp, mut tm) = (theta, theta);
            tp[p] += h;
            tm[p] -= h;
            let (up, um) = (su4_block(&tp), su4_block(&tm));
            for i in 0..4 {
                for j in 0..4 {
                    let d = (up[i][j] - um[i][j]) / (2.0 * h);
                    jac[(2 * (4 * i + j), p)] = d.re;
                    jac[(2 * (4 * i + j) + 1, p)] = d.im;
                }
            }
        }
        let sv = jac.svd(false, false).singular_values;
        assert!(sv.iter().all(|&s| s > 1e-6), "rank-deficient: {sv}");
    }
}

#[test]
fn adjoint_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let h = random_hermitian(4, 0.3, &mut rng);
    let ansatz = AnsatzCircuit::new(4, 2);
    let circuit = ansatz.compile();
    for _ in 0..3 {
        let theta = random_angles(ansatz.n_params(), &mut rng);
        let (cost, grad) = circuit.expectation_and_gradient(&h, &theta).unwrap();
        let psi = circuit.run(&theta).unwrap();
        assert!((cost - quadratic_form(&h.to_dense(), &psi)).abs() < 1e-12);
        let step = 1e-5;
        for p in 0..theta.len() {
            let (mut tp, mut tm) = (theta.clone(), theta.clone());
            tp[p] += step;
            tm[p] -= step;
            let fp = h
                .expectation(circuit.run(&tp).unwrap().amplitudes())
                .unwrap();
            let fm = h
                .expectation(circuit.run(&tm).unwrap().amplitudes())
                .unwrap();
            assert!((grad[p] - (fp - fm) / (2.0 * step)).abs() < 1e-7);
        }
    }
}

#[test]
fn sampled_estimator_is_unbiased_with_bounded_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let psi = random_state(3, &mut rng);
    let x = 0b101;
    for part in [Part::Real, Part::Imag] {
        let members: Vec<GroupMember> = (0..8usize)
            .filter(|&z| z < z ^ x)
            .map(|z| GroupMember {
                z,
                coeff: 0.3 * z as f64 - 0.5,
            })
            .collect();
        let g = MeasurementGroup {
            n_qubits: 3,
            x,
            part,
            members,
        };
        let exact = exact_group_expectation(&psi, &g).unwrap();
        let dist = ghz_distribution(&psi, &ghz_descriptor(&g)).unwrap();
        let (trials, shots) = (2000, 50u64);
        let estimates: Vec<f64> = (0..trials)
            .map(|_| {
                sampled_group_expectation(&sample_outcomes(&dist, shots, &mut rng).unwrap(), &g)
                    .unwrap()
            })
            .collect();
        let mean = estimates.iter().sum::<f64>() / trials as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let per_shot_bound = g.max_abs_coeff().powi(2);
        assert!(
            var * shots as f64 <= per_shot_bound * 1.1,
            "{part}: {} > {per_shot_bound}",
            var * shots as f64
        );
        let se = (per_shot_bound / (shots as f64 * trials as f64)).sqrt();
        assert!((mean - exact).abs() < 5.0 * se, "{part}: {mean} vs {exact}");
    }
}

#[test]
fn plan_expectation_matches_quadratic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 1..=6 {
        let h = random_hermitian(n, 0.4, &mut rng);
        let psi = random_state(n, &mut rng);
        let plan = MeasurementPlan::from_hamiltonian(&h);
        let got = exact_plan_expectation(&psi, &plan).unwrap();
        let want = quadratic_form(&h.to_dense(), &psi);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ghz_readout_identity(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(n, &mut rng);
        for x in 1..1usize << n {
            let re = ghz_distribution(&psi, &circuit_for(n, x, Part::Real)).unwrap();
            let im = ghz_distribution(&psi, &circuit_for(n, x, Part::Imag)).unwrap();
            for z in 0..1usize << n {
                let prod = amplitude_product(&psi, z, z ^ x);
                prop_assert!((probability_difference(&re, z) - prod.re).abs() < 1e-12);
                prop_assert!((probability_difference(&im, z) + prod.im).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotations_preserve_norm(seed in any::<u64>(), x in 0usize..32, z in 0usize..32, theta in -7.0f64..7.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut psi = random_state(5, &mut rng);
        psi.apply_pauli_rotation(PauliMask { x, z }, theta);
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_conserves_shots(seed in any::<u64>(), shots in 1u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(3, &mut rng);
        let dist = ghz_distribution(&psi, &circuit_for(3, 0b011, Part::Real)).unwrap();
        let tally = sample_outcomes(&dist, shots, &mut rng).unwrap();
        prop_assert_eq!(tally.counts.iter().sum::<u64>(), shots);
        for (k, &cnt) in tally.counts.iter().enumerate() {
            if dist.probabilities[k] < 1e-15 {
                prop_assert_eq!(cnt, 0);
            }
        }
    }
}

#[test]
fn observable_dimension_checked() {
    let h = SparseHermitian::diagonal(&[1.0, 2.0]).unwrap();
    let c = AnsatzCircuit::new(2, 1).compile();
    assert!(c
        .expectation_and_gradient(&h, &vec![0.0; c.n_params])
        .is_err());
}
