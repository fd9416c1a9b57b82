extern crate std;

use core::f64::consts::PI;

use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::channels::lorentzian_g;
use crate::hermat::ComplexMatrix;
use crate::random::{random_density_matrix, random_unitary, rng_from_seed};
use crate::steering::{depolarized_assemblage, pauli_measurement_set, Pauli};
use crate::Complex64;

fn xyz() -> MeasurementSet {
    pauli_measurement_set(&[Pauli::X, Pauli::Y, Pauli::Z]).unwrap()
}

fn mixed() -> ComplexMatrix {
    ComplexMatrix::identity(2).scale_real(0.5)
}

fn series(values: Vec<f64>) -> TraceSeries {
    TraceSeries {
        times: (0..values.len()).map(|i| i as f64).collect(),
        values,
        metadata: TraceMetadata {
            channel: ChannelSpec::identity(2),
            labels: Vec::new(),
            tol: None,
        },
    }
}

/// `a|00⟩ + b|11⟩` as a density matrix.
fn schmidt_state(a: f64, b: f64) -> ComplexMatrix {
    let v = [
        Complex64::new(a, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(b, 0.0),
    ];
    ComplexMatrix::projector(&v)
}

fn werner(p: f64) -> ComplexMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let bell = schmidt_state(h, h);
    &bell.scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0)
}

#[test]
fn tsw_examples() {
    let full = tsw(&premeasure(&mixed(), &xyz()).unwrap()).unwrap();
    assert!((full.value - 1.0).abs() < 1e-6);
    assert!((full.value + full.solution.mu_star - 1.0).abs() < 1e-12);

    for v in [0.0, 0.3, 1.0 / 3f64.sqrt()] {
        let r = tsw(&depolarized_assemblage(v, &xyz()).unwrap()).unwrap();
        assert!(r.value < 1e-6, "v={v}: {}", r.value);
    }

    // x-independent members admit the trivial hidden-state model
    let mut rng = rng_from_seed(4);
    let rho = random_density_matrix(&mut rng, 2);
    let half = rho.scale_real(0.5);
    let asm = Assemblage::from_parts(
        vec!["X".into(), "Y".into(), "Z".into()],
        vec![[half.clone(), half.clone()]; 3],
        0.0,
    );
    assert!(tsw(&asm).unwrap().value < 1e-7);
}

#[test]
fn tsw_is_scale_invariant() {
    let asm = premeasure(&mixed(), &xyz()).unwrap();
    let asm = crate::channels::propagate_assemblage(
        &ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 1.0,
        },
        0.7,
        &asm,
    )
    .unwrap();
    let base = tsw(&asm).unwrap().value;
    for c in [0.05, 0.4, 1.0] {
        let scaled = asm.map_members(|m| Ok(m.scale_real(c))).unwrap();
        assert!((tsw(&scaled).unwrap().value - base).abs() < 1e-7, "c={c}");
    }
}

#[test]
fn tsw_rejects_zero_assemblage() {
    let z = ComplexMatrix::zeros(2);
    let asm = Assemblage::from_parts(vec!["X".into()], vec![[z.clone(), z]], 0.0);
    assert!(matches!(tsw(&asm), Err(Error::InvalidState(_))));
}

#[test]
fn trace_grid_and_metadata() {
    let s = tsw_trace(
        &ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 0.0,
        },
        &xyz(),
        &mixed(),
        10.0,
        21,
    )
    .unwrap();
    s.validate().unwrap();
    assert_eq!(s.times.len(), 21);
    assert_eq!(s.times[0], 0.0);
    assert_eq!(s.times[20], 10.0);
    assert_eq!(s.metadata.labels, vec!["X", "Y", "Z"]);
    for v in &s.values {
        assert!((v - 1.0).abs() < 1e-6);
    }
    assert!(uniform_grid(1.0, 1).is_err());
    assert!(uniform_grid(0.0, 5).is_err());
}

#[test]
fn exchange_trace_dips_and_revives() {
    let s = tsw_trace(
        &ChannelSpec::Exchange {
            j: 1.0,
            gamma2: 0.0,
        },
        &xyz(),
        &mixed(),
        PI,
        21,
    )
    .unwrap();
    assert!(s.values[10] < 1e-4, "{}", s.values[10]);
    assert!(s.values[20] > 1.0 - 1e-3, "{}", s.values[20]);
}

#[test]
fn damped_rabi_trace_is_non_increasing() {
    let s = tsw_trace(
        &ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 1.0,
        },
        &xyz(),
        &mixed(),
        8.0,
        41,
    )
    .unwrap();
    for w in s.values.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "{w:?}");
    }
    assert_eq!(n_tsw(&s, DEFAULT_SLOPE_THRESHOLD).value, 0.0);
}

#[test]
fn measures_on_simple_series() {
    let down = series(vec![1.0, 0.8, 0.5, 0.1]);
    assert_eq!(n_tsw(&down, 0.0).value, 0.0);
    assert!(n_abs(&down, 0.0).value.abs() < 1e-12);
    let flat = series(vec![0.4; 5]);
    assert_eq!(n_tsw(&flat, 0.0).value, 0.0);
    assert_eq!(n_abs(&flat, 0.0).value, 0.0);

    let wave = series(vec![1.0, 0.2, 0.7, 0.3, 0.9]);
    let r = n_tsw(&wave, 1e-6);
    assert!((r.value - 1.1).abs() < 1e-12);
    assert_eq!(r.convention, NmConvention::PositiveSlope);
    assert_eq!(r.n_points, 5);
    assert!((n_abs(&wave, 1e-6).value - 2.2).abs() < 1e-12);

    // increments at or below the threshold are noise
    let noisy = series(vec![0.5, 0.5 + 1e-7, 0.5, 0.5 + 2e-7]);
    assert_eq!(n_tsw(&noisy, 1e-6).value, 0.0);
    assert!(n_tsw(&noisy, 0.0).value > 0.0);
}

proptest! {
    #[test]
    fn abs_measure_is_twice_positive_slope(
        values in prop::collection::vec(0.0f64..1.0, 2..60),
        threshold in prop_oneof![Just(0.0), 0.0f64..0.2],
    ) {
        let s = series(values);
        let p = n_tsw(&s, threshold).value;
        prop_assert!(p >= 0.0);
        prop_assert!((n_abs(&s, threshold).value - 2.0 * p).abs() < 1e-9);
    }

    #[test]
    fn sorted_descending_series_has_no_backflow(mut values in prop::collection::vec(0.0f64..1.0, 2..40)) {
        values.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(n_tsw(&series(values), 0.0).value, 0.0);
    }
}

#[test]
fn concurrence_examples() {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    assert!((concurrence(&schmidt_state(h, h)).unwrap() - 1.0).abs() < 1e-10);
    assert!(concurrence(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap() < 1e-10);
    // Werner states: C = max(0, (3p − 1)/2)
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
        let got = concurrence(&werner(p)).unwrap();
        assert!((got - want).abs() < 1e-9, "p={p}: {got} vs {want}");
    }
    // pure a|00⟩ + b|11⟩: C = 2|ab|
    for theta in [0.0, 0.3, 0.7, 1.2] {
        let (a, b) = (f64::cos(theta), f64::sin(theta));
        let got = concurrence(&schmidt_state(a, b)).unwrap();
        assert!((got - 2.0 * (a * b).abs()).abs() < 1e-9);
    }
}

#[test]
fn concurrence_rejects_invalid_states() {
    assert!(matches!(concurrence(&mixed()), Err(Error::InvalidState(_))));
    assert!(concurrence(&ComplexMatrix::identity(4)).is_err());
}

#[test]
fn concurrence_is_local_unitary_invariant_and_zero_on_products() {
    let mut rng = rng_from_seed(21);
    for _ in 0..20 {
        let a = random_density_matrix(&mut rng, 2);
        let b = random_density_matrix(&mut rng, 2);
        assert!(concurrence(&kron(&a, &b)).unwrap() < 1e-7);

        let rho = random_density_matrix(&mut rng, 4);
        let u = kron(&random_unitary(&mut rng, 2), &random_unitary(&mut rng, 2));
        let rotated = (&(&u * &rho) * &u.adjoint()).hermitian_part();
        let (c0, c1) = (concurrence(&rho).unwrap(), concurrence(&rotated).unwrap());
        assert!((c0 - c1).abs() < 1e-8);
        assert!((0.0..=1.0).contains(&c0));
    }
}

#[test]
fn nc_trace_examples() {
    let id = nc_trace(&ChannelSpec::identity(2), 5.0, 6).unwrap();
    assert!(id.values.iter().all(|v| (v - 1.0).abs() < 1e-9));

    let rabi = nc_trace(
        &ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 1.0,
        },
        8.0,
        81,
    )
    .unwrap();
    for w in rabi.values.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{w:?}");
    }
    assert!(n_abs(&rabi, DEFAULT_SLOPE_THRESHOLD).value < 1e-9);

    let ex = nc_trace(
        &ChannelSpec::Exchange {
            j: 1.0,
            gamma2: 0.0,
        },
        PI,
        21,
    )
    .unwrap();
    assert!(ex.values[10] < 1e-3, "{}", ex.values[10]);
    assert!(ex.values[20] > 0.99);
    assert!(n_abs(&ex, DEFAULT_SLOPE_THRESHOLD).value > 0.0);
}

#[test]
fn damping_choi_concurrence_equals_amplitude() {
    // (id ⊗ AD)(Φ⁺) is an X state with coherence G/2 and an empty |e,g⟩
    // corner, so its concurrence is |G|
    let (g, w) = (2.0, 1.0);
    let s = nc_trace(&ChannelSpec::LorentzianAD { g, omega_w: w }, 10.0, 41).unwrap();
    for (t, c) in s.times.iter().zip(&s.values) {
        let want = lorentzian_g(g, w, *t).unwrap().abs();
        assert!((c - want).abs() < 1e-8, "t={t}: {c} vs {want}");
    }
}

#[test]
fn nc_trace_rejects_non_qubit_channels() {
    let ch = ChannelSpec::identity(3);
    assert!(nc_trace(&ch, 1.0, 3).is_err());
}

#[test]
fn exchange_tsw_is_discontinuous_at_the_swap_point() {
    // Off the swap point the members keep coherences of order G = cos(Jt)
    // with excited populations of order G², and the weight tends to 1/4 as
    // G → 0. References from an external conic solver at G = sin δ.
    let ch = ChannelSpec::Exchange {
        j: 1.0,
        gamma2: 0.0,
    };
    let prop = crate::channels::Propagator::new(ch).unwrap();
    let initial = premeasure(&mixed(), &xyz()).unwrap();
    let at = |t: f64| {
        tsw(&prop.propagate_assemblage(t, &initial).unwrap())
            .unwrap()
            .value
    };
    for (delta, want) in [(0.3, 0.294_659_566), (0.1, 0.254_995_687)] {
        let got = at(PI / 2.0 + delta);
        assert!((got - want).abs() < 1e-6, "δ={delta}: {got} vs {want}");
    }
    assert!((at(PI / 2.0 + 1e-3) - 0.25).abs() < 1e-5);
    assert!(at(PI / 2.0) < 1e-6);
}
