//! Temporal steerable weight, its time traces, the non-Markovianity
//! measures built from a trace, and the ancilla concurrence used for
//! comparison.
//!
//! `TSW = 1 − μ*`, where `μ*` is the largest total weight of an unsteerable
//! component (see [`crate::sdp`]). Assemblages whose settings do not carry
//! unit trace are handled by dividing `μ*` by the average of `Tr Σ_a σ_{a|x}`.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::channels::{ChannelSpec, Propagator};
use crate::error::{Error, Result};
use crate::hermat::{kron, pauli_y, psd_sqrt, ComplexMatrix};
use crate::sdp::{build_sw_sdp, solve, SdpSolution, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::steering::{check_state, premeasure, strategy_table, Assemblage, MeasurementSet};

/// Default threshold below which positive TSW increments are treated as
/// solver noise.
pub const DEFAULT_SLOPE_THRESHOLD: f64 = 1e-6;

/// Trace tolerance accepted by [`concurrence`].
pub const STATE_TOL: f64 = 1e-8;

const JACOBI_SWEEPS: usize = 40;

#[derive(Debug, Clone)]
pub struct TswResult {
    /// `1 − μ*/N` clamped to `[0, 1]`, with `N` the average setting trace.
    pub value: f64,
    pub solution: SdpSolution,
    pub time_tag: f64,
}

/// TSW of `asm` with the default solver settings.
pub fn tsw(asm: &Assemblage) -> Result<TswResult> {
    tsw_with(asm, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn tsw_with(asm: &Assemblage, tol: f64, max_iter: usize) -> Result<TswResult> {
    let norm = (0..asm.n_meas())
        .map(|x| asm.marginal(x).trace().re)
        .sum::<f64>()
        / asm.n_meas() as f64;
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidState(alloc::format!(
            "assemblage has average trace {norm}"
        )));
    }
    let table = strategy_table(asm.n_meas())?;
    let solution = solve(&build_sw_sdp(asm, &table)?, tol, max_iter)?;
    let value = (1.0 - solution.mu_star / norm).clamp(0.0, 1.0);
    Ok(TswResult {
        value,
        solution,
        time_tag: asm.time_tag,
    })
}

/// What a [`TraceSeries`] was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMetadata {
    pub channel: ChannelSpec,
    /// Measurement labels; empty for concurrence traces.
    pub labels: Vec<String>,
    /// Solver tolerance; `None` for concurrence traces.
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: TraceMetadata,
}

impl TraceSeries {
    /// Checks equal lengths, a strictly increasing grid and values in
    /// `[0, 1 + 1e-7]`.
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.values.len() {
            return Err(Error::CountMismatch {
                expected: self.times.len(),
                got: self.values.len(),
            });
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::OutOfRange(
                "time grid is not strictly increasing".into(),
            ));
        }
        if let Some(v) = self
            .values
            .iter()
            .find(|v| !(**v >= 0.0 && **v <= 1.0 + 1e-7))
        {
            return Err(Error::OutOfRange(alloc::format!("trace value {v}")));
        }
        Ok(())
    }
}

/// `t_i = i·t_max/(n_steps − 1)` for `i = 0..n_steps`.
pub fn uniform_grid(t_max: f64, n_steps: usize) -> Result<Vec<f64>> {
    if n_steps < 2 {
        return Err(Error::OutOfRange(alloc::format!(
            "a trace needs at least 2 points, got {n_steps}"
        )));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::OutOfRange(alloc::format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    let last = (n_steps - 1) as f64;
    Ok((0..n_steps).map(|i| t_max * i as f64 / last).collect())
}

/// TSW of `Λ_t(premeasure(ρ₀))` on a uniform grid.
pub fn tsw_trace(
    ch: &ChannelSpec,
    ms: &MeasurementSet,
    rho0: &ComplexMatrix,
    t_max: f64,
    n_steps: usize,
) -> Result<TraceSeries> {
    tsw_trace_with(ch, ms, rho0, t_max, n_steps, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn tsw_trace_with(
    ch: &ChannelSpec,
    ms: &MeasurementSet,
    rho0: &ComplexMatrix,
    t_max: f64,
    n_steps: usize,
    tol: f64,
    max_iter: usize,
) -> Result<TraceSeries> {
    let times = uniform_grid(t_max, n_steps)?;
    let prop = Propagator::new(ch.clone())?;
    let initial = premeasure(rho0, ms)?;
    let values = times
        .iter()
        .map(|&t| Ok(tsw_with(&prop.propagate_assemblage(t, &initial)?, tol, max_iter)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceSeries {
        times,
        values,
        metadata: TraceMetadata {
            channel: ch.clone(),
            labels: ms.labels(),
            tol: Some(tol),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmConvention {
    /// `Σ max(Δᵢ, 0)`.
    PositiveSlope,
    /// `Σ |Δᵢ| + f(t_f) − f(t₀)`, twice [`NmConvention::PositiveSlope`].
    AbsPlusBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmResult {
    pub value: f64,
    pub convention: NmConvention,
    pub slope_threshold: f64,
    /// Number of grid points the value was computed on.
    pub n_points: usize,
}

/// Grid increments with positive ones at or below `threshold` set to zero.
fn increments(values: &[f64], threshold: f64) -> impl Iterator<Item = f64> + '_ {
    values.windows(2).map(move |w| {
        let d = w[1] - w[0];
        if d > 0.0 && d <= threshold {
            0.0
        } else {
            d
        }
    })
}

/// Sum of the positive increments larger than `threshold`.
pub fn n_tsw(series: &TraceSeries, threshold: f64) -> NmResult {
    NmResult {
        value: positive_slope(&series.values, threshold),
        convention: NmConvention::PositiveSlope,
        slope_threshold: threshold,
        n_points: series.values.len(),
    }
}

/// `Σ |Δᵢ| + f(t_f) − f(t₀)` on the increments kept by [`n_tsw`]; the
/// boundary term is the sum of those increments, so the result is exactly
/// twice [`n_tsw`] up to rounding.
pub fn n_abs(series: &TraceSeries, threshold: f64) -> NmResult {
    NmResult {
        value: abs_plus_boundary(&series.values, threshold),
        convention: NmConvention::AbsPlusBoundary,
        slope_threshold: threshold,
        n_points: series.values.len(),
    }
}

pub fn positive_slope(values: &[f64], threshold: f64) -> f64 {
    increments(values, threshold).map(|d| d.max(0.0)).sum()
}

pub fn abs_plus_boundary(values: &[f64], threshold: f64) -> f64 {
    let (abs, net) =
        increments(values, threshold).fold((0.0, 0.0), |(a, n), d| (a + d.abs(), n + d));
    (abs + net).max(0.0)
}

/// Wootters concurrence of a two-qubit state:
/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λᵢ` the decreasing singular values of
/// `√ρ √ρ̃`, `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::InvalidState(alloc::format!(
            "concurrence needs a 4x4 state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    check_state(rho, STATE_TOL)?;
    let root = psd_sqrt(&rho.hermitian_part())?;
    let yy = kron(&pauli_y(), &pauli_y());
    let flipped_root = &(&yy * &root.conj()) * &yy;
    let mut l = singular_values(&(&root * &flipped_root));
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Singular values by one-sided Jacobi rotations on the columns. Small
/// singular values come out with absolute error near `ε·‖A‖`, where going
/// through the eigenvalues of `AA†` would give `√ε·‖A‖`.
fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm2(&cols[p]);
                let beta = norm2(&cols[q]);
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let x = cols[p][i];
                    let y = cols[q][i] * phase;
                    cols[p][i] = x * c - y * s;
                    cols[q][i] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter().map(|v| norm2(v).sqrt()).collect()
}

/// Concurrence of `(id ⊗ Λ_t)(|Φ⁺⟩⟨Φ⁺|)` on a uniform grid. For the exchange
/// model the environment qubit is traced out before the concurrence is
/// taken, so the ancilla stays isolated.
pub fn nc_trace(ch: &ChannelSpec, t_max: f64, n_steps: usize) -> Result<TraceSeries> {
    let times = uniform_grid(t_max, n_steps)?;
    let prop = Propagator::new(ch.clone())?;
    if prop.dim() != 2 {
        return Err(Error::BadDimension(alloc::format!(
            "concurrence traces need a qubit channel, got dimension {}",
            prop.dim()
        )));
    }
    let values = times
        .iter()
        .map(|&t| concurrence(&prop.choi(t)?.hermitian_part()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceSeries {
        times,
        values,
        metadata: TraceMetadata {
            channel: ch.clone(),
            labels: Vec::new(),
            tol: None,
        },
    })
}

#[cfg(test)]
mod tests;
