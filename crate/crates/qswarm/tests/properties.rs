//! Property-based invariants over randomized inputs: metric behavior of the
//! trace distance, purity bounds, involutions, exponential inverses,
//! generator tracelessness, recovery fixed points, surface normalization,
//! and scenario round trips. Inputs are built from seeded generators so
//! failures replay deterministically.

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qswarm::dynamics::{lindblad_generator, recover_evolution_procrustes, Dissipator, Hamiltonian};
use qswarm::qcore::matrix::reversed_basis_order;
use qswarm::qcore::ops::{purity, trace_distance};
use qswarm::qcore::{matrix_exp, CMatrix, DensityMatrix, Tolerances};
use qswarm::scenario::{parse_scenario, serialize_scenario, MissionSpec, RobotSpec, ScenarioFile};
use qswarm::surface::surface_grid;
use qswarm::swarm::{robot_from_amplitudes, CompositionMode, QubitRole, SwarmState};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn to_lib(m: &CMat) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Random mixture of `rank` random kets — a valid density matrix.
fn random_density(rng: &mut StdRng, dim: usize, rank: usize) -> DensityMatrix {
    let weights = random_weights(rng, rank);
    let mut acc = CMatrix::zeros(dim, dim);
    for &w in &weights {
        let ket = random_ket(rng, dim);
        let v = nalgebra::DVector::from_vec(ket);
        acc += (&v * v.adjoint()).map(|z| z * Complex64::new(w, 0.0));
    }
    DensityMatrix::with_default_tol(acc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_distance_is_a_bounded_symmetric_metric(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 1usize << qubits;
        let rank_a = rng.gen_range(1..=dim);
        let rank_b = rng.gen_range(1..=dim);
        let a = random_density(&mut rng, dim, rank_a);
        let b = random_density(&mut rng, dim, rank_b);
        let dab = trace_distance(&a, &b).unwrap();
        let dba = trace_distance(&b, &a).unwrap();
        prop_assert!((dab - dba).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&dab));
        prop_assert!(trace_distance(&a, &a).unwrap() <= 1e-12);
        // Independent route: Jacobi eigenvalues of the difference.
        let oracle = oracle_trace_distance(
            &CMat::from_fn(dim, dim, |r, c| a.matrix()[(r, c)]),
            &CMat::from_fn(dim, dim, |r, c| b.matrix()[(r, c)]),
        );
        prop_assert!((dab - oracle).abs() <= 1e-9);
    }

    #[test]
    fn purity_lies_between_maximally_mixed_and_pure(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 1usize << qubits;
        let rank = rng.gen_range(1..=2 * dim);
        let rho = random_density(&mut rng, dim, rank);
        let p = purity(&rho);
        prop_assert!(p >= 1.0 / dim as f64 - 1e-12);
        prop_assert!(p <= 1.0 + 1e-12);
    }

    #[test]
    fn basis_reversal_is_an_involution(seed in any::<u64>(), qubits in 1usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 1usize << qubits;
        let m = to_lib(&random_hermitian(&mut rng, dim, 1.0));
        let twice = reversed_basis_order(&reversed_basis_order(&m));
        prop_assert!((&twice - &m).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn matrix_exponential_inverts_cleanly(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 1usize << qubits;
        let a = to_lib(&random_hermitian(&mut rng, dim, 1.5));
        let e_plus = matrix_exp(&a).unwrap();
        let e_minus = matrix_exp(&a.map(|z| -z)).unwrap();
        let product = &e_plus * &e_minus;
        let defect = (&product - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        prop_assert!(defect <= 1e-10, "exp(A)exp(−A) defect {}", defect);
    }

    #[test]
    fn generator_is_traceless_for_normal_jump_operators(seed in any::<u64>(), qubits in 1usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 1usize << qubits;
        let rho = random_density(&mut rng, dim, dim);
        let h = Hamiltonian::new(to_lib(&random_hermitian(&mut rng, dim, 1.0)), 1.0).unwrap();
        // Symmetric real jump operators are normal, the regime in which the
        // generator's literal form conserves trace.
        let raw = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        let l = (&raw + raw.transpose()).map(|z| z * 0.5);
        let d = Dissipator::new(l, rng.gen_range(0.0..2.0)).unwrap();
        let gen = lindblad_generator(&rho, &h, &[d]).unwrap();
        prop_assert!(gen.trace().norm() <= 1e-10, "generator trace {}", gen.trace());
    }

    #[test]
    fn recovery_between_identical_full_rank_states_is_identity(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 1usize << qubits;
        let rho = random_density(&mut rng, dim, 2 * dim);
        let o = recover_evolution_procrustes(&rho, &rho).unwrap();
        let defect = (o.matrix() - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        prop_assert!(defect <= 1e-9, "O deviates from identity by {}", defect);
    }

    #[test]
    fn surface_series_stay_normalized_probabilities(seed in any::<u64>(), resolution in 2usize..=9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let roles = vec![QubitRole::PositionX, QubitRole::Success];
        let robots = (0..rng.gen_range(1..=4))
            .map(|i| {
                let amps = random_ket(&mut rng, 4);
                robot_from_amplitudes(format!("r{}", i), roles.clone(), amps, true, &Tolerances::default()).unwrap()
            })
            .collect();
        let swarm = SwarmState::new(robots, None, CompositionMode::Mixed).unwrap();
        let grid = surface_grid(&swarm, resolution).unwrap();
        for series in &grid.series {
            for &v in &series.values {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "value {} out of range", v);
            }
            // One axis: the two endpoints are the position probabilities.
            let sum = series.values[0] + series.values[resolution - 1];
            prop_assert!((sum - 1.0).abs() <= 1e-9, "endpoint sum {}", sum);
        }
    }

    #[test]
    fn scenario_serialization_round_trips(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let robots: Vec<RobotSpec> = (0..n)
            .map(|i| RobotSpec {
                id: format!("r{}", i),
                roles: vec![QubitRole::PositionX, QubitRole::Success],
                amplitudes: random_ket(&mut rng, 4).iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        let file = ScenarioFile {
            schema_version: 1,
            robots,
            weights: Some(random_weights(&mut rng, n)),
            mode: CompositionMode::Mixed,
            dynamics: None,
            mission: rng.gen_bool(0.5).then(|| MissionSpec {
                target_bits: vec![rng.gen_range(0..=1)],
                delta: rng.gen_range(0.01..0.5),
                max_iterations: rng.gen_range(1..200),
                eta: rng.gen_range(0.1..1.0),
                noise_std: rng.gen_range(0.0..2.0),
                seed: rng.gen(),
            }),
        };
        file.validate().unwrap();
        let text = serialize_scenario(&file).unwrap();
        let reparsed = parse_scenario(&text).unwrap();
        prop_assert_eq!(&file, &reparsed);
        // And a second pass through text is byte-stable.
        let text2 = serialize_scenario(&reparsed).unwrap();
        prop_assert_eq!(text, text2);
    }
}
