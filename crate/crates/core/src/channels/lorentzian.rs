//! Amplitude damping of a qubit coupled to a reservoir with a Lorentzian
//! spectral density.
//!
//! The excited-state amplitude follows
//! `G(t) = e^{−ωt/2} [cosh(bt/2) + (ω/b) sinh(bt/2)]`, `b = √(ω² − 2gω)`,
//! evaluated in complex arithmetic so that the oscillating regime
//! (`g > ω/2`, imaginary `b`) shares the same code path. With `z = bt/2` the
//! bracket is written `cosh z + (ωt/2)·sinh(z)/z`, which has no `0/0` at
//! `b = 0`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hermat::ComplexMatrix;

fn check_params(g: f64, omega_w: f64) -> Result<()> {
    if !(omega_w > 0.0 && omega_w.is_finite()) {
        return Err(Error::BadParameter(alloc::format!(
            "spectral width must be positive, got {omega_w}"
        )));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::BadParameter(alloc::format!(
            "coupling must be non-negative, got {g}"
        )));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// `sinh(z)/z`.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

fn half_bt(g: f64, omega_w: f64, t: f64) -> Complex64 {
    let b = Complex64::new(omega_w * omega_w - 2.0 * g * omega_w, 0.0).sqrt();
    b * (0.5 * t)
}

fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() > 1e-12 * z.re.abs().max(1.0) {
        return Err(Error::NumericalBreakdown(alloc::format!(
            "G(t) has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `G(t)`; real for every admissible parameter set.
pub fn lorentzian_g(g: f64, omega_w: f64, t: f64) -> Result<f64> {
    check_params(g, omega_w)?;
    check_time(t)?;
    let z = half_bt(g, omega_w, t);
    let bracket = z.cosh() + sinhc(z) * (0.5 * omega_w * t);
    real_part_checked(bracket * (-0.5 * omega_w * t).exp())
}

/// `dG/dt = −gω·(t/2)·sinh(z)/z·e^{−ωt/2}`.
pub fn lorentzian_g_dot(g: f64, omega_w: f64, t: f64) -> Result<f64> {
    check_params(g, omega_w)?;
    check_time(t)?;
    let z = half_bt(g, omega_w, t);
    let d = sinhc(z) * (-g * omega_w * 0.5 * t * (-0.5 * omega_w * t).exp());
    real_part_checked(d)
}

/// Time-local decay rate `γ(t) = −(2/|G|) d|G|/dt = −2 Ġ/G`.
///
/// Negative values signal information backflow.
pub fn lorentzian_gamma(g: f64, omega_w: f64, t: f64) -> Result<f64> {
    let big_g = lorentzian_g(g, omega_w, t)?;
    if big_g.abs() <= 1e-12 * (-0.5 * omega_w * t).exp() {
        return Err(Error::SingularAtZeroOfG(t));
    }
    Ok(-2.0 * lorentzian_g_dot(g, omega_w, t)? / big_g)
}

/// First positive zero of `G`, which exists only for `g > ω/2`:
/// `t₀ = 2(π − atan(β/ω))/β` with `β = √(2gω − ω²)`.
pub fn lorentzian_first_zero(g: f64, omega_w: f64) -> Option<f64> {
    check_params(g, omega_w).ok()?;
    let beta2 = 2.0 * g * omega_w - omega_w * omega_w;
    if beta2 <= 0.0 {
        return None;
    }
    let beta = beta2.sqrt();
    Some(2.0 * (core::f64::consts::PI - (beta / omega_w).atan()) / beta)
}

/// The damping map in the `{|e⟩, |g⟩}` basis (index 0 is `|e⟩`):
/// `ρ_ee ↦ |G|²ρ_ee`, `ρ_eg ↦ Gρ_eg`, `ρ_gg ↦ ρ_gg + (1 − |G|²)ρ_ee`.
pub fn lorentzian_apply(
    g: f64,
    omega_w: f64,
    t: f64,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if rho.dim() != 2 {
        return Err(Error::BadDimension(alloc::format!(
            "qubit channel applied to a {}-dimensional operator",
            rho.dim()
        )));
    }
    Ok(damping_map(lorentzian_g(g, omega_w, t)?, rho))
}

pub(crate) fn damping_map(big_g: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let p = big_g * big_g;
    let mut out = ComplexMatrix::zeros(2);
    out[(0, 0)] = rho[(0, 0)] * p;
    out[(0, 1)] = rho[(0, 1)] * big_g;
    out[(1, 0)] = rho[(1, 0)] * big_g;
    out[(1, 1)] = rho[(1, 1)] + rho[(0, 0)] * (1.0 - p);
    out
}

/// Transfer matrix of the damping map on row-major `vec(ρ)`.
pub(crate) fn damping_transfer(big_g: f64) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(4);
    let p = big_g * big_g;
    t[(0, 0)] = Complex64::new(p, 0.0);
    t[(1, 1)] = Complex64::new(big_g, 0.0);
    t[(2, 2)] = Complex64::new(big_g, 0.0);
    t[(3, 3)] = Complex64::new(1.0, 0.0);
    t[(3, 0)] = Complex64::new(1.0 - p, 0.0);
    t
}
