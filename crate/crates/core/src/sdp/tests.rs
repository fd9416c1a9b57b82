extern crate std;

use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::channels::{propagate_assemblage, random_kraus_channel, ChannelSpec};
use crate::hermat::ComplexMatrix;
use crate::random::{random_assemblage, random_unitary, rng_from_seed};
use crate::steering::{
    depolarized_assemblage, pauli_measurement_set, premeasure, strategy_table, Pauli,
};

fn xyz() -> crate::steering::MeasurementSet {
    pauli_measurement_set(&[Pauli::X, Pauli::Y, Pauli::Z]).unwrap()
}

fn problem(asm: &Assemblage) -> SdpProblem {
    build_sw_sdp(asm, &strategy_table(asm.n_meas()).unwrap()).unwrap()
}

fn solved(asm: &Assemblage) -> SdpSolution {
    let p = problem(asm);
    let sol = solve(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal, "gap {}", sol.gap);
    check_invariants(&p, &sol);
    sol
}

fn check_invariants(p: &SdpProblem, sol: &SdpSolution) {
    for s in &sol.sigma_tilde {
        assert!(psd_min_eig(s).unwrap() >= -1e-8);
    }
    for c in 0..p.n_constraints() {
        assert!(psd_min_eig(&p.slack(c, &sol.sigma_tilde)).unwrap() >= -1e-8);
    }
    assert!(sol.gap <= 1e-7);
    assert!(sol.mu_star >= 0.0 && sol.mu_star <= 1.0 + 1e-8);
    dual_certificate(sol, p).unwrap();
}

#[test]
fn problem_shapes() {
    let mut rng = rng_from_seed(1);
    for (labels, n_var, n_con) in [
        (vec![Pauli::X, Pauli::Y, Pauli::Z], 8, 6),
        (vec![Pauli::X, Pauli::Z], 4, 4),
        (vec![Pauli::Z], 2, 2),
    ] {
        let ms = pauli_measurement_set(&labels).unwrap();
        let asm = random_assemblage(&mut rng, &ms);
        let p = problem(&asm);
        assert_eq!(p.n_lambda(), n_var);
        assert_eq!(p.n_constraints(), n_con);
        let table = strategy_table(labels.len()).unwrap();
        for x in 0..labels.len() {
            for a in Outcome::BOTH {
                let c = SdpProblem::constraint_index(x, a);
                for l in 0..n_var {
                    assert_eq!(p.coefficient(c, l) == 1, table.d(l, a, x));
                }
            }
        }
    }
}

#[test]
fn three_setting_index_sets() {
    // (x, a) -> strategies with D = 1, rows ordered as +++, ++-, ..., ---
    // reversed: row n assigns + to setting x iff bit (2 − x) of n is set
    let mut rng = rng_from_seed(2);
    let p = problem(&random_assemblage(&mut rng, &xyz()));
    let want: [(usize, Outcome, [usize; 4]); 6] = [
        (0, Outcome::Plus, [4, 5, 6, 7]),
        (0, Outcome::Minus, [0, 1, 2, 3]),
        (1, Outcome::Plus, [2, 3, 6, 7]),
        (1, Outcome::Minus, [0, 1, 4, 5]),
        (2, Outcome::Plus, [1, 3, 5, 7]),
        (2, Outcome::Minus, [0, 2, 4, 6]),
    ];
    for (x, a, set) in want {
        assert_eq!(p.support(SdpProblem::constraint_index(x, a)), set);
    }
}

#[test]
fn mismatched_table_is_rejected() {
    let mut rng = rng_from_seed(3);
    let asm = random_assemblage(&mut rng, &xyz());
    assert!(matches!(
        build_sw_sdp(&asm, &strategy_table(2).unwrap()),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn single_setting_is_unsteerable() {
    let mut rng = rng_from_seed(4);
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let ms = pauli_measurement_set(&[p]).unwrap();
        for _ in 0..5 {
            let sol = solved(&random_assemblage(&mut rng, &ms));
            assert!((sol.mu_star - 1.0).abs() < 1e-7, "{}", sol.mu_star);
        }
    }
}

#[test]
fn depolarized_examples() {
    let sol = solved(&depolarized_assemblage(0.0, &xyz()).unwrap());
    assert!((sol.mu_star - 1.0).abs() < 1e-7);

    let sol = solved(&depolarized_assemblage(1.0 / 3f64.sqrt(), &xyz()).unwrap());
    assert!((sol.mu_star - 1.0).abs() < 1e-6, "{}", sol.mu_star);

    let sol = solved(&depolarized_assemblage(1.0, &xyz()).unwrap());
    assert!(sol.mu_star.abs() < 1e-7, "{}", sol.mu_star);
}

#[test]
fn identity_channel_is_maximally_steerable() {
    let rho0 = ComplexMatrix::identity(2).scale_real(0.5);
    let sol = solved(&premeasure(&rho0, &xyz()).unwrap());
    assert!(sol.mu_star.abs() < 1e-7);
    let ms = pauli_measurement_set(&[Pauli::X, Pauli::Z]).unwrap();
    let sol = solved(&premeasure(&rho0, &ms).unwrap());
    assert!(sol.mu_star.abs() < 1e-7);
}

#[test]
fn certificate_examples() {
    let asm = depolarized_assemblage(0.0, &xyz()).unwrap();
    let p = problem(&asm);
    let zeros = vec![ComplexMatrix::zeros(2); 6];
    assert!(matches!(
        check_dual_point(&p, &zeros),
        Err(Error::CertificateInvalid(_))
    ));
    // F = I on both outcomes of the first setting covers every strategy once
    let mut f = zeros.clone();
    f[0] = ComplexMatrix::identity(2);
    f[1] = ComplexMatrix::identity(2);
    assert!((check_dual_point(&p, &f).unwrap() - 1.0).abs() < 1e-15);

    let p1 = problem(&depolarized_assemblage(1.0, &xyz()).unwrap());
    let sol = solve(&p1, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let report = dual_certificate(&sol, &p1).unwrap();
    assert!(report.dual_value.abs() < 1e-7);
    assert!(report.gap <= 1e-7);
}

#[test]
fn certificate_rejects_tampering() {
    let mut rng = rng_from_seed(8);
    let asm = random_assemblage(&mut rng, &xyz());
    let p = problem(&asm);
    let sol = solve(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let mut bad = sol.clone();
    bad.gap += 1e-6;
    assert!(dual_certificate(&bad, &p).is_err());
    let mut bad = sol.clone();
    bad.multipliers[0] = ComplexMatrix::zeros(2);
    bad.multipliers[1] = ComplexMatrix::zeros(2);
    assert!(dual_certificate(&bad, &p).is_err());
    let mut bad = sol.clone();
    bad.sigma_tilde[0] = ComplexMatrix::identity(2);
    assert!(dual_certificate(&bad, &p).is_err());
    let mut bad = sol;
    bad.status = SolveStatus::MaxIter;
    assert!(dual_certificate(&bad, &p).is_err());
}

#[test]
fn non_psd_members_are_rejected() {
    let mut asm = depolarized_assemblage(0.5, &xyz()).unwrap();
    *asm.member_mut(0, Outcome::Plus) = ComplexMatrix::from_real_diag(&[0.5, -0.01]);
    assert!(matches!(
        build_sw_sdp(&asm, &strategy_table(3).unwrap()),
        Err(Error::NotPsd(_))
    ));
}

#[test]
fn random_instances_converge_with_certificates() {
    let mut rng = rng_from_seed(9);
    for ms in [
        xyz(),
        pauli_measurement_set(&[Pauli::X, Pauli::Z]).unwrap(),
        pauli_measurement_set(&[Pauli::Z, Pauli::Y]).unwrap(),
    ] {
        for _ in 0..20 {
            let sol = solved(&random_assemblage(&mut rng, &ms));
            let tail = &sol.gap_history[sol.gap_history.len().saturating_sub(100)..];
            for w in tail.windows(2) {
                assert!(w[1] <= w[0], "complementarity increased: {w:?}");
            }
        }
    }
}

#[test]
fn evolved_assemblages_converge() {
    let rho0 = ComplexMatrix::identity(2).scale_real(0.5);
    let asm = premeasure(&rho0, &xyz()).unwrap();
    for spec in [
        ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 1.0 / 6.0,
        },
        ChannelSpec::Exchange {
            j: 1.0,
            gamma2: 0.1,
        },
        ChannelSpec::LorentzianAD {
            g: 2.0,
            omega_w: 1.0,
        },
        ChannelSpec::LorentzianAD {
            g: 0.3,
            omega_w: 1.0,
        },
    ] {
        for k in 0..20 {
            let t = 0.37 * k as f64;
            let evolved = propagate_assemblage(&spec, t, &asm).unwrap();
            let sol = solved(&evolved);
            assert!(sol.mu_star <= 1.0 + 1e-8);
        }
    }
}

#[test]
fn scale_covariance() {
    let mut rng = rng_from_seed(12);
    for _ in 0..5 {
        let asm = random_assemblage(&mut rng, &xyz());
        let base = solved(&asm).mu_star;
        for c in [1.0, 0.5, 0.1, 1e-3] {
            let scaled = asm.map_members(|m| Ok(m.scale_real(c))).unwrap();
            let sol = solve(&problem(&scaled), DEFAULT_TOL * c, DEFAULT_MAX_ITER).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal);
            assert!((sol.mu_star - c * base).abs() <= 1e-7 * c, "c={c}");
            assert!((sol.mu_star / c - base).abs() <= 1e-7);
        }
    }
}

#[test]
fn unitary_invariance() {
    // σ ↦ UσU† maps LHS models to LHS models
    let mut rng = rng_from_seed(13);
    for _ in 0..5 {
        let asm = random_assemblage(&mut rng, &xyz());
        let u = random_unitary(&mut rng, 2);
        let rotated = asm
            .map_members(|m| Ok((&(&u * m) * &u.adjoint()).hermitian_part()))
            .unwrap();
        assert!((solved(&asm).mu_star - solved(&rotated).mu_star).abs() < 2e-8);
    }
}

#[test]
fn relabeling_invariance() {
    let mut rng = rng_from_seed(14);
    let asm = random_assemblage(&mut rng, &xyz());
    let swapped: Vec<[ComplexMatrix; 2]> = asm
        .members()
        .iter()
        .rev()
        .map(|[p, m]| [m.clone(), p.clone()])
        .collect();
    let relabeled = Assemblage::from_parts(asm.labels().to_vec(), swapped, 0.0);
    assert!((solved(&asm).mu_star - solved(&relabeled).mu_star).abs() < 2e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixing_with_unsteerable_is_concave(seed in 0u64..1000, s in 0.0f64..=1.0) {
        let mut rng = rng_from_seed(seed);
        let asm = random_assemblage(&mut rng, &xyz());
        let lhs = depolarized_assemblage(1.0 / 3f64.sqrt(), &xyz()).unwrap();
        let mixed = asm.mix(&lhs, s).unwrap();
        let mu = solved(&asm).mu_star;
        let mu_mixed = solved(&mixed).mu_star;
        prop_assert!(mu_mixed >= (1.0 - s) * mu + s - 1e-6);
    }

    #[test]
    fn channels_never_decrease_mu(seed in 0u64..1000, n_kraus in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let asm = random_assemblage(&mut rng, &xyz());
        let ch = random_kraus_channel(seed + 1, n_kraus).unwrap();
        let out = propagate_assemblage(&ch, 0.0, &asm).unwrap();
        prop_assert!(solved(&out).mu_star >= solved(&asm).mu_star - 1e-6);
    }
}

#[test]
fn pure_eigenstate_assemblage_of_two_settings() {
    // σ_{a|x} = Π_{a|x}/2 for X and Z: no LHS weight survives
    let ms = pauli_measurement_set(&[Pauli::X, Pauli::Z]).unwrap();
    let asm = premeasure(&ComplexMatrix::identity(2).scale_real(0.5), &ms).unwrap();
    assert!(solved(&asm).mu_star.abs() < 1e-7);
}
