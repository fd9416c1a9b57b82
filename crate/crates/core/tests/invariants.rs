use std::f64::consts::PI;

use tsw_core::channels::{propagate_assemblage, random_kraus_channel, ChannelSpec};
use tsw_core::measures::{n_tsw, nc_trace, tsw, tsw_trace, DEFAULT_SLOPE_THRESHOLD};
use tsw_core::random::{random_assemblage, random_unitary, rng_from_seed};
use tsw_core::steering::{pauli_measurement_set, MeasurementSet, Pauli};
use tsw_core::ComplexMatrix;

fn xyz() -> MeasurementSet {
    pauli_measurement_set(&[Pauli::X, Pauli::Y, Pauli::Z]).unwrap()
}

fn mixed() -> ComplexMatrix {
    ComplexMatrix::identity(2).scale_real(0.5)
}

#[test]
fn channels_never_increase_tsw() {
    let ms = xyz();
    let mut rng = rng_from_seed(2024);
    for seed in 0..200u64 {
        let asm = random_assemblage(&mut rng, &ms);
        let ch = random_kraus_channel(10_000 + seed, 1 + (seed as usize % 4)).unwrap();
        let before = tsw(&asm).unwrap().value;
        let after = tsw(&propagate_assemblage(&ch, 0.0, &asm).unwrap())
            .unwrap()
            .value;
        assert!(after <= before + 1e-6, "seed {seed}: {before} -> {after}");
    }
}

#[test]
fn tsw_is_invariant_under_a_global_unitary() {
    let ms = xyz();
    let mut rng = rng_from_seed(77);
    let asm = random_assemblage(&mut rng, &ms);
    let base = tsw(&asm).unwrap().value;
    for _ in 0..50 {
        let u = random_unitary(&mut rng, 2);
        let rotated = asm
            .map_members(|m| Ok((&(&u * m) * &u.adjoint()).hermitian_part()))
            .unwrap();
        let v = tsw(&rotated).unwrap().value;
        assert!((v - base).abs() <= 1e-6, "{base} vs {v}");
    }
}

#[test]
fn damped_rabi_is_divisible() {
    for gamma1 in [0.0, 1.0 / 6.0, 0.5, 1.0] {
        let s = tsw_trace(
            &ChannelSpec::RabiDecay { g1: 1.0, gamma1 },
            &xyz(),
            &mixed(),
            10.0,
            101,
        )
        .unwrap();
        for i in 0..s.values.len() {
            for j in i + 1..s.values.len() {
                assert!(
                    s.values[j] <= s.values[i] + 1e-6,
                    "γ₁={gamma1}: TSW({}) = {} > TSW({}) = {}",
                    s.times[j],
                    s.values[j],
                    s.times[i],
                    s.values[i]
                );
            }
        }
        assert_eq!(n_tsw(&s, DEFAULT_SLOPE_THRESHOLD).value, 0.0);
    }
}

#[test]
fn exchange_tsw_and_concurrence_vanish_and_revive_together() {
    let j = 1.0;
    let ch = ChannelSpec::Exchange { j, gamma2: 0.0 };
    let steps = 41;
    let t_max = PI / j;
    let s = tsw_trace(&ch, &xyz(), &mixed(), t_max, steps).unwrap();
    let c = nc_trace(&ch, t_max, steps).unwrap();
    let mid = (steps - 1) / 2;
    assert!((s.times[mid] - PI / (2.0 * j)).abs() < 1e-12);
    assert!(s.values[mid] < 1e-3 && c.values[mid] < 1e-3);
    assert!(s.values[steps - 1] > 0.99 && c.values[steps - 1] > 0.99);
    assert!(n_tsw(&s, DEFAULT_SLOPE_THRESHOLD).value > 0.9);
}
