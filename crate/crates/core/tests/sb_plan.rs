mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sbvqe::sb_plan::*;
use sbvqe::tb_model::{assemble_hamiltonian, fold};
use sbvqe::{Supercell, SupercellDims, TbParameterSet};

fn fixture_fold() -> sbvqe::SparseHermitian {
    let cell = Supercell::build(SupercellDims::new(1, 1, 2), true).unwrap();
    let h = assemble_hamiltonian(&cell, &TbParameterSet::pbi3_fixture(), true).unwrap();
    fold(&h, 0.0)
}

/// Distinct `(x, part)` keys read off the dense upper triangle.
fn brute_force_keys(h: &sbvqe::SparseHermitian) -> BTreeSet<GroupKey> {
    let d = h.to_dense();
    let mut keys = BTreeSet::new();
    for r in 0..h.dim() {
        for col in r..h.dim() {
            let v = d[(r, col)];
            if v.re != 0.0 {
                keys.insert(GroupKey {
                    x: r ^ col,
                    part: Part::Real,
                });
            }
            if r != col && v.im != 0.0 {
                keys.insert(GroupKey {
                    x: r ^ col,
                    part: Part::Imag,
                });
            }
        }
    }
    keys
}

#[test]
fn fixture_plan_breakdown() {
    let f = fixture_fold();
    let plan = MeasurementPlan::from_hamiltonian(&f);
    let b = plan.breakdown();
    assert_eq!(b.total(), plan.circuit_count());
    assert_eq!(b.diagonal, 1);
    assert!(b.max_cnots <= plan.n_qubits);
    let keys: BTreeSet<GroupKey> = plan.groups.iter().map(|g| g.key()).collect();
    assert_eq!(keys, brute_force_keys(&f));
}

#[test]
fn diagonal_matrix_needs_one_circuit() {
    let h = sbvqe::SparseHermitian::diagonal(&[0.5, -1.0, 2.0, 0.0]).unwrap();
    let plan = MeasurementPlan::from_hamiltonian(&h);
    assert_eq!(plan.circuit_count(), 1);
    assert!(!ghz_descriptor(&plan.groups[0]).has_ancilla());
    let mut csv = Vec::new();
    write_plan_csv(&mut csv, &plan, None, &[]).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 2);
}

#[test]
fn allocation_meets_the_variance_target() {
    let plan = MeasurementPlan::from_hamiltonian(&fixture_fold());
    for eps in [0.5, 0.1, 0.03] {
        let a = allocate_shots(&plan, eps).unwrap();
        let var: f64 = plan
            .groups
            .iter()
            .map(|g| g.max_abs_coeff().powi(2) / a.shots_for(g.key()).unwrap() as f64)
            .sum();
        assert!(var <= eps * eps * (1.0 + 1e-12), "eps {eps}: {var}");
        let bound = shot_bound(&plan, eps).unwrap();
        assert!(a.total as f64 >= bound * (1.0 - 1e-12));
        assert!(a.total as f64 <= bound + plan.circuit_count() as f64);
    }
    assert!(allocate_shots(&plan, 0.0).is_err());
    assert!(allocate_shots(&plan, -1.0).is_err());
}

#[test]
fn csv_rows_follow_the_plan() {
    let plan = MeasurementPlan::from_hamiltonian(&fixture_fold());
    let a = allocate_shots(&plan, 0.1).unwrap();
    let mut csv = Vec::new();
    write_plan_csv(&mut csv, &plan, Some(&a), &["omega = 0".into()]).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), plan.circuit_count());
    let shots: u64 = rows
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(shots, a.total);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), n in 1usize..7, density in 0.0f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, density, &mut rng);
        let terms = decompose(&h);
        prop_assert_eq!(reconstruct(n, &terms), h.clone());
        for t in &terms {
            prop_assert!(t.z <= t.z_prime);
        }
    }

    #[test]
    fn grouping_invariants(seed in any::<u64>(), n in 1usize..7, density in 0.0f64..0.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(n, density, &mut rng);
        let terms = decompose(&h);
        let plan = group_terms(n, &terms);
        let keys: Vec<GroupKey> = plan.groups.iter().map(|g| g.key()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(&keys, &sorted);
        prop_assert_eq!(keys.into_iter().collect::<BTreeSet<_>>(), brute_force_keys(&h));
        let mut placements = 0;
        for t in &terms {
            let x = t.z ^ t.z_prime;
            if t.coeff.re != 0.0 {
                let g = plan.find(GroupKey { x, part: Part::Real }).unwrap();
                prop_assert!(g.members.iter().any(|m| m.z == t.z && m.coeff == t.coeff.re));
                placements += 1;
            }
            if x != 0 && t.coeff.im != 0.0 {
                let g = plan.find(GroupKey { x, part: Part::Imag }).unwrap();
                prop_assert!(g.members.iter().any(|m| m.z == t.z && m.coeff == t.coeff.im));
                placements += 1;
            }
        }
        prop_assert_eq!(placements, plan.breakdown().members);
        for g in &plan.groups {
            prop_assert!(g.members.iter().all(|m| m.z < m.z ^ g.x || g.x == 0));
        }
    }

    #[test]
    fn cnot_targets_encode_the_displacement(n in 1usize..10, x_raw in any::<usize>()) {
        let x = x_raw & ((1 << n) - 1);
        let g = MeasurementGroup { n_qubits: n, x, part: Part::Real, members: vec![] };
        let c = ghz_descriptor(&g);
        prop_assert_eq!(c.cnot_count(), x.count_ones() as usize);
        let rebuilt: usize = c.cnot_targets.iter().map(|&j| 1usize << (n - j)).sum();
        prop_assert_eq!(rebuilt, x);
        prop_assert!(c.cnot_targets.iter().all(|&j| (1..=n).contains(&j)));
        prop_assert_eq!(c.has_ancilla(), x != 0);
    }

    #[test]
    fn bound_scales_as_inverse_square(eps in 0.01f64..1.0, k in 1.0f64..10.0) {
        let plan = MeasurementPlan::from_hamiltonian(&fixture_fold());
        let a = shot_bound(&plan, eps).unwrap();
        let b = shot_bound(&plan, eps / k).unwrap();
        prop_assert!((b / a - k * k).abs() <= 1e-9 * k * k);
    }
}
