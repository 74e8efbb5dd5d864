//! Invariant checks: randomized sweeps over states, directions, and
//! classical models, plus statistical soundness of every sampler.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;

use spinhalf::bell::{classical_bell_check, mc_singlet_joint, quantum_bell_lhs, DirectionTriple,
    JointDistribution};
use spinhalf::entangle::{entanglement_score, factorize, joint_prob_general, make_two_spin,
    singlet, singlet_joint_prob, Sign};
use spinhalf::measure::{measure_once, recover_phase, sample_frequencies, RngStream};
use spinhalf::qcore::{mix, phase_equal, purity, tensor_product, ComplexAmp, PureState};
use spinhalf::spin::{basis_pair, component_probs, expectation, spin_state, Direction};

fn random_direction(rng: &mut RngStream) -> Direction {
    let z = 2.0 * rng.next_uniform() - 1.0;
    let phi = TAU * rng.next_uniform();
    let s = (1.0 - z * z).max(0.0).sqrt();
    Direction::from_xyz(s * phi.cos(), s * phi.sin(), z).unwrap()
}

proptest! {
    #[test]
    fn component_probabilities_form_a_distribution(
        theta in 0.0..=PI,
        phi in 0.0..TAU,
        dir_theta in 0.0..=PI,
        dir_phi in 0.0..TAU,
    ) {
        let psi = spin_state(theta, phi).unwrap();
        let e = Direction::from_angles(dir_theta, dir_phi).unwrap();
        let (p_plus, p_minus) = component_probs(&psi, &e).unwrap();
        prop_assert!(p_plus >= -1e-15 && p_minus >= -1e-15);
        prop_assert!((p_plus + p_minus - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn expectation_flips_sign_under_antipode(
        theta in 0.0..=PI,
        phi in 0.0..TAU,
        dir_theta in 0.0..=PI,
        dir_phi in 0.0..TAU,
    ) {
        let psi = spin_state(theta, phi).unwrap();
        let e = Direction::from_angles(dir_theta, dir_phi).unwrap();
        let forward = expectation(&psi, &e).unwrap();
        let backward = expectation(&psi, &e.antipode()).unwrap();
        prop_assert!((forward + backward).abs() <= 1e-12);
        prop_assert!(forward.abs() <= 0.5 + 1e-12);
    }

    #[test]
    fn mixture_matches_superposition_in_its_own_basis(
        theta in 0.0..=PI,
        phi in 0.0..TAU,
    ) {
        let psi = spin_state(theta, phi).unwrap();
        let z_basis = [
            PureState::basis_state(2, 0).unwrap(),
            PureState::basis_state(2, 1).unwrap(),
        ];
        let weights = [psi.amps()[0].norm_sqr(), psi.amps()[1].norm_sqr()];
        let rho = mix(&z_basis, &weights).unwrap();
        let (p_plus, p_minus) = component_probs(&psi, &Direction::plus_z()).unwrap();
        prop_assert!((spinhalf::qcore::density_expectation(&rho, &z_basis[0]).unwrap() - p_plus).abs() <= 1e-12);
        prop_assert!((spinhalf::qcore::density_expectation(&rho, &z_basis[1]).unwrap() - p_minus).abs() <= 1e-12);
        prop_assert!(purity(&rho) <= 1.0 + 1e-12);
        prop_assert!(purity(&rho) >= 0.5 - 1e-12);
    }

    #[test]
    fn product_states_factorize_and_reassemble(
        theta_a in 0.0..=PI,
        phi_a in 0.0..TAU,
        theta_b in 0.0..=PI,
        phi_b in 0.0..TAU,
    ) {
        let u = spin_state(theta_a, phi_a).unwrap();
        let v = spin_state(theta_b, phi_b).unwrap();
        let product = tensor_product(&u, &v).unwrap();
        let alphas: [ComplexAmp; 4] = [
            product.amps()[0],
            product.amps()[1],
            product.amps()[2],
            product.amps()[3],
        ];
        let state = make_two_spin(alphas, Direction::plus_z(), Direction::plus_z()).unwrap();
        prop_assert!(entanglement_score(&state) <= 1e-12);
        let result = factorize(&state, 1e-9);
        prop_assert!(result.factorizable);
        let rebuilt = tensor_product(
            result.factor_a.as_ref().unwrap(),
            result.factor_b.as_ref().unwrap(),
        )
        .unwrap();
        prop_assert!(phase_equal(&rebuilt, &product, 1e-9));
    }

    #[test]
    fn entanglement_score_stays_in_unit_interval(raw in prop::array::uniform8(-1.0f64..1.0)) {
        let alphas = [
            ComplexAmp::new(raw[0], raw[1]),
            ComplexAmp::new(raw[2], raw[3]),
            ComplexAmp::new(raw[4], raw[5]),
            ComplexAmp::new(raw[6], raw[7]),
        ];
        let norm_sqr: f64 = alphas.iter().map(|c| c.norm_sqr()).sum();
        prop_assume!(norm_sqr > 1e-6);
        let state = make_two_spin(alphas, Direction::plus_z(), Direction::plus_z()).unwrap();
        let score = entanglement_score(&state);
        prop_assert!((0.0..=1.0).contains(&score));
    }

    #[test]
    fn equatorial_phase_recovers_from_x_and_y_statistics(phi in 0.0..TAU) {
        let psi = spin_state(FRAC_PI_2, phi).unwrap();
        let (p_x, _) = component_probs(&psi, &Direction::plus_x()).unwrap();
        let (p_y, _) = component_probs(&psi, &Direction::plus_y()).unwrap();
        let recovered = recover_phase(p_x, p_y);
        let diff = (recovered - phi).abs();
        let circular = diff.min(TAU - diff);
        prop_assert!(circular <= 1e-9);
    }
}

#[test]
fn born_frequencies_within_four_sigma() {
    let shots = 100_000;
    let mut dir_rng = RngStream::with_stream(55, 500);
    for trial in 0..20u64 {
        let e = random_direction(&mut dir_rng);
        let theta = dir_rng.next_uniform() * PI;
        let phi = dir_rng.next_uniform() * TAU * 0.999;
        let psi = spin_state(theta, phi).unwrap();
        let (plus, minus) = basis_pair(&e);
        let (p_plus, _) = component_probs(&psi, &e).unwrap();
        let mut rng = RngStream::with_stream(55, trial);
        let freq = sample_frequencies(&psi, &[plus, minus], shots, &mut rng).unwrap();
        let sigma = (p_plus * (1.0 - p_plus) / shots as f64).sqrt();
        if sigma == 0.0 {
            assert_eq!(freq.ratio(0), p_plus);
        } else {
            assert!((freq.ratio(0) - p_plus).abs() <= 4.0 * sigma);
        }
    }
}

#[test]
fn collapse_is_idempotent() {
    let mut rng = RngStream::with_stream(66, 0);
    for _ in 0..50 {
        let e = random_direction(&mut rng);
        let theta = rng.next_uniform() * PI;
        let phi = rng.next_uniform() * TAU * 0.999;
        let psi = spin_state(theta, phi).unwrap();
        let (plus, minus) = basis_pair(&e);
        let basis = [plus, minus];
        let first = measure_once(&psi, &basis, &mut rng).unwrap();
        assert!(phase_equal(&first.collapsed, &basis[first.index], 1e-12));
        for _ in 0..100 {
            let again = measure_once(&first.collapsed, &basis, &mut rng).unwrap();
            assert_eq!(again.index, first.index);
            assert_eq!(again.value, first.value);
        }
    }
}

#[test]
fn identical_seeds_reproduce_and_streams_differ() {
    let psi = spin_state(1.1, 0.3).unwrap();
    let (plus, minus) = basis_pair(&Direction::plus_z());
    let basis = [plus, minus];
    let run = |stream: u64| {
        let mut rng = RngStream::with_stream(5, stream);
        sample_frequencies(&psi, &basis, 10_000, &mut rng).unwrap()
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3).counts(), run(4).counts());
}

#[test]
fn equatorial_phase_grid_separates_pure_from_mixed() {
    let z_basis = [
        PureState::basis_state(2, 0).unwrap(),
        PureState::basis_state(2, 1).unwrap(),
    ];
    let rho = mix(&z_basis, &[0.5, 0.5]).unwrap();
    for k in 0..36 {
        let phi = k as f64 * TAU / 36.0;
        let psi = spin_state(FRAC_PI_2, phi).unwrap();
        let (p_x, _) = component_probs(&psi, &Direction::plus_x()).unwrap();
        let (p_y, _) = component_probs(&psi, &Direction::plus_y()).unwrap();
        let matched = Direction::from_angles(FRAC_PI_2, recover_phase(p_x, p_y)).unwrap();
        let (p_pure, p_mixed) =
            spinhalf::measure::discriminate_phase(&psi, &rho, &matched).unwrap();
        assert!((p_pure - p_mixed).abs() >= 0.49);
    }
}

#[test]
fn joint_outcomes_are_complete_and_match_both_routes() {
    let state = singlet();
    let mut rng = RngStream::with_stream(77, 0);
    for _ in 0..1000 {
        let a = random_direction(&mut rng);
        let b = random_direction(&mut rng);
        let mut total = 0.0;
        for ea in Sign::BOTH {
            for eb in Sign::BOTH {
                let direct = joint_prob_general(&state, ea, &a, eb, &b);
                let closed = singlet_joint_prob(ea, &a, eb, &b);
                assert!((direct - closed).abs() <= 1e-12);
                total += closed;
            }
        }
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn singlet_keeps_its_form_in_every_common_basis() {
    let state = singlet();
    let mut rng = RngStream::with_stream(78, 0);
    for _ in 0..100 {
        let f = random_direction(&mut rng);
        let turned = state.reexpress(f, f);
        let amps = turned.amps();
        assert!(amps[0].norm() <= 1e-12);
        assert!(amps[3].norm() <= 1e-12);
        assert!((amps[1] + amps[2]).norm() <= 1e-12);
        assert!((amps[1].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-12);
    }
}

#[test]
fn bell_lhs_dual_routes_agree_for_arbitrary_triples() {
    let mut rng = RngStream::with_stream(99, 0);
    for _ in 0..10_000 {
        let triple = DirectionTriple::new(
            random_direction(&mut rng),
            random_direction(&mut rng),
            random_direction(&mut rng),
        );
        let lhs = quantum_bell_lhs(&triple).unwrap();
        assert!((-0.5 - 1e-12..=1.0 + 1e-12).contains(&lhs));
    }
}

#[test]
fn anticorrelated_models_never_go_negative() {
    let mut rng = RngStream::with_stream(88, 0);
    for _ in 0..10_000 {
        let theta_ab = rng.next_uniform() * PI;
        let theta_bc = rng.next_uniform() * PI;
        let triple = DirectionTriple::coplanar(theta_ab, theta_bc).unwrap();
        let mut q = [0.0; 8];
        let mut total = 0.0;
        for slot in q.iter_mut() {
            *slot = rng.next_uniform();
            total += *slot;
        }
        for slot in q.iter_mut() {
            *slot /= total;
        }
        let dist = JointDistribution::from_anticorrelated(q).unwrap();
        assert!(classical_bell_check(&dist, &triple).lhs >= -1e-12);
    }
}

#[test]
fn mc_singlet_tables_track_the_law() {
    let shots = 100_000;
    let mut dir_rng = RngStream::with_stream(123, 1_000_000);
    let mut bad_trials = 0;
    for trial in 0..300u64 {
        let a = random_direction(&mut dir_rng);
        let b = random_direction(&mut dir_rng);
        let mut rng = RngStream::with_stream(123, trial);
        let table = mc_singlet_joint(&a, &b, shots, &mut rng).unwrap();
        let mut trial_ok = true;
        for ea in Sign::BOTH {
            for eb in Sign::BOTH {
                let p = singlet_joint_prob(ea, &a, eb, &b);
                let ratio = table.ratios[ea.index()][eb.index()];
                let sigma = (p * (1.0 - p) / shots as f64).sqrt();
                if sigma == 0.0 {
                    trial_ok &= ratio == p;
                } else {
                    trial_ok &= (ratio - p).abs() <= 4.0 * sigma;
                }
            }
        }
        if !trial_ok {
            bad_trials += 1;
        }
    }
    assert!(
        bad_trials <= 1,
        "{bad_trials} of 300 trials fell outside four standard deviations"
    );
}

#[test]
fn mixture_spectra_are_probability_distributions() {
    let mut rng = RngStream::with_stream(44, 0);
    for _ in 0..1000 {
        let n = 2 + (rng.next_uniform() * 3.0) as usize;
        let mut states = Vec::new();
        let mut weights = Vec::new();
        let mut total = 0.0;
        for _ in 0..n {
            let theta = rng.next_uniform() * PI;
            let phi = rng.next_uniform() * TAU * 0.999;
            states.push(spin_state(theta, phi).unwrap());
            let w = rng.next_uniform() + 1e-3;
            weights.push(w);
            total += w;
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        let rho = mix(&states, &weights).unwrap();
        let eigs = rho.eigenvalues();
        assert_eq!(eigs.len(), 2);
        assert!(eigs.windows(2).all(|p| p[0] <= p[1]));
        assert!(eigs.iter().all(|l| *l >= -1e-9));
        assert!((eigs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        let p = purity(&rho);
        assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p));
        assert!((eigs.iter().map(|l| l * l).sum::<f64>() - p).abs() <= 1e-9);
    }
}
