//! The steerable-weight semidefinite program
//!
//! ```text
//! maximize   Σ_λ Tr σ̃_λ
//! subject to σ_{a|x} − Σ_λ D_λ(a|x) σ̃_λ ⪰ 0   for every (x, a)
//!            σ̃_λ ⪰ 0                          for every λ
//! ```
//!
//! and its dual
//!
//! ```text
//! minimize   Σ_{a,x} Tr(σ_{a|x} F_{a|x})
//! subject to Σ_{a,x} D_λ(a|x) F_{a|x} ⪰ I   for every λ
//!            F_{a|x} ⪰ 0.
//! ```
//!
//! [`solve`] runs a primal-dual interior-point method and then rounds its
//! iterate to an exactly feasible pair: the `σ̃_λ` are clipped and scaled
//! into the feasible set and the multipliers are clipped and scaled until
//! every dual constraint holds. The reported `gap` is the difference between
//! these two certified bounds, so `mu_star ≤ μ* ≤ mu_star + gap`.

mod ipm;
mod whiten;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hermat::{eig_hermitian, psd_min_eig, psd_project, ComplexMatrix};
use crate::steering::{Assemblage, Outcome, StrategyTable};
use whiten::Whitening;

/// Default convergence tolerance on the certified gap.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap of the interior-point method.
pub const DEFAULT_MAX_ITER: usize = 500;
/// Members may be non-PSD by at most this much; see [`build_sw_sdp`].
pub const MEMBER_PSD_TOL: f64 = 1e-8;
/// Relative size below which whitened member eigenvalues count as zero.
pub const MEMBER_RANK_TOL: f64 = 1e-9;
/// Slack allowed when checking a dual certificate.
pub const CERTIFICATE_TOL: f64 = 1e-7;

/// One steerable-weight instance.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    table: StrategyTable,
    dim: usize,
    labels: Vec<String>,
    /// `σ_{a|x}` at index `2x + a.index()`.
    constraints: Vec<ComplexMatrix>,
    /// Strategies with `D_λ(a|x) = 1`, per constraint.
    support: Vec<Vec<usize>>,
}

impl SdpProblem {
    pub fn n_meas(&self) -> usize {
        self.table.n_meas()
    }

    pub fn n_lambda(&self) -> usize {
        self.table.n_rows()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &StrategyTable {
        &self.table
    }

    /// Index of the constraint belonging to `(x, a)`.
    pub fn constraint_index(x: usize, a: Outcome) -> usize {
        2 * x + a.index()
    }

    /// `σ_{a|x}` of constraint `c`.
    pub fn constraint(&self, c: usize) -> &ComplexMatrix {
        &self.constraints[c]
    }

    /// Coefficient of `σ̃_λ` in constraint `c`, either 0 or 1.
    pub fn coefficient(&self, c: usize, lambda: usize) -> u8 {
        u8::from(self.support[c].binary_search(&lambda).is_ok())
    }

    /// Strategies entering constraint `c`, ascending.
    pub fn support(&self, c: usize) -> &[usize] {
        &self.support[c]
    }

    /// `σ_{a|x} − Σ_λ D_λ(a|x) σ̃_λ`.
    pub fn slack(&self, c: usize, sigma_tilde: &[ComplexMatrix]) -> ComplexMatrix {
        let mut s = self.constraints[c].clone();
        for &l in &self.support[c] {
            s -= &sigma_tilde[l];
        }
        s
    }

    /// `Σ_{a,x} D_λ(a|x) F_{a|x}`.
    pub fn dual_lhs(&self, lambda: usize, multipliers: &[ComplexMatrix]) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim);
        for (c, f) in multipliers.iter().enumerate() {
            if self.coefficient(c, lambda) == 1 {
                s += f;
            }
        }
        s
    }

    /// `Σ Tr(σ_{a|x} F_{a|x})`.
    pub fn dual_objective(&self, multipliers: &[ComplexMatrix]) -> f64 {
        self.constraints
            .iter()
            .zip(multipliers)
            .map(|(s, f)| crate::hermat::re_trace_product(s, f))
            .sum()
    }
}

/// Encodes `asm` as a steerable-weight problem over `table`.
///
/// Members must be Hermitian and PSD up to [`MEMBER_PSD_TOL`]; negative
/// eigenvalues are clipped to zero. Each member is then compared against the
/// average marginal `R = Σ_a σ_{a|x}`: eigenvalues of `R^{-1/2} σ R^{-1/2}`
/// below [`MEMBER_RANK_TOL`] times the largest one are set to zero, so that
/// members that are rank-deficient up to rounding become exactly so.
/// Normalization and non-signaling are not required.
pub fn build_sw_sdp(asm: &Assemblage, table: &StrategyTable) -> Result<SdpProblem> {
    if table.n_meas() != asm.n_meas() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "strategy table for {} settings, assemblage has {}",
            table.n_meas(),
            asm.n_meas()
        )));
    }
    let dim = asm.dim();
    let mut members = Vec::with_capacity(2 * asm.n_meas());
    let mut support = Vec::with_capacity(2 * asm.n_meas());
    for x in 0..asm.n_meas() {
        for a in Outcome::BOTH {
            let m = asm.member(x, a);
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "member ({x}, {a}) has dimension {}, expected {dim}",
                    m.dim()
                )));
            }
            let h = m.checked_hermitian()?;
            let min = psd_min_eig(&h)?;
            if min < -MEMBER_PSD_TOL {
                return Err(Error::NotPsd(min));
            }
            members.push(if min < 0.0 { psd_project(&h)? } else { h });
            support.push(table.strategies_for(x, a).collect());
        }
    }
    let w = Whitening::new(&members)?;
    let white = w
        .whiten_all(&members)
        .into_iter()
        .map(|m| eig_hermitian(&m))
        .collect::<Result<Vec<_>>>()?;
    let cut = MEMBER_RANK_TOL
        * white
            .iter()
            .map(|e| e.eigenvalues[dim - 1])
            .fold(0.0, f64::max);
    let constraints = members
        .into_iter()
        .zip(white)
        .map(|(h, e)| {
            if e.eigenvalues[0] > cut {
                h
            } else {
                w.unapply(&e.reconstruct_with(|l| if l > cut { l } else { 0.0 }))
            }
        })
        .collect();
    Ok(SdpProblem {
        table: table.clone(),
        dim,
        labels: asm.labels().to_vec(),
        constraints,
        support,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Certified gap within tolerance.
    Optimal,
    /// Iteration cap reached; the best certified pair is returned.
    MaxIter,
    /// The problem has no feasible point (malformed input).
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Certified lower bound on the optimum, `Σ Tr σ̃_λ`.
    pub mu_star: f64,
    /// Exactly feasible primal blocks.
    pub sigma_tilde: Vec<ComplexMatrix>,
    /// Dual multipliers `F_{a|x}` (index `2x + a`), exactly dual feasible.
    pub multipliers: Vec<ComplexMatrix>,
    /// Certified upper bound on the optimum, `Σ Tr(σ_{a|x} F_{a|x})`.
    pub dual_value: f64,
    /// `|dual_value − mu_star|`. Both points satisfy their constraints up to
    /// rounding, so the signed difference is nonnegative up to rounding.
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Complementarity `⟨X, Z⟩` per interior-point iteration.
    pub gap_history: Vec<f64>,
}

/// Solves the problem to a certified gap of `tol`.
pub fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    if !(tol > 0.0) {
        return Err(Error::BadParameter(alloc::format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    ipm::solve(p, tol, max_iter)
}

/// Result of checking a primal-dual pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    /// Smallest eigenvalue over all `Σ D F − I`.
    pub min_dual_slack: f64,
    /// Smallest eigenvalue over all multipliers.
    pub min_multiplier_eig: f64,
    /// Smallest eigenvalue over all primal constraints and `σ̃_λ`.
    pub min_primal_slack: f64,
}

/// Value `Σ Tr(σ F)` of a user-supplied dual point, after checking
/// `F ⪰ 0` and `Σ D F ⪰ I` within [`CERTIFICATE_TOL`].
pub fn check_dual_point(p: &SdpProblem, multipliers: &[ComplexMatrix]) -> Result<f64> {
    dual_slacks(p, multipliers).map(|(_, _, v)| v)
}

fn dual_slacks(p: &SdpProblem, multipliers: &[ComplexMatrix]) -> Result<(f64, f64, f64)> {
    if multipliers.len() != p.n_constraints() {
        return Err(Error::CountMismatch {
            expected: p.n_constraints(),
            got: multipliers.len(),
        });
    }
    let mut min_f = f64::INFINITY;
    for (c, f) in multipliers.iter().enumerate() {
        if f.dim() != p.dim {
            return Err(Error::DimensionMismatch(alloc::format!(
                "multiplier {c} has dimension {}",
                f.dim()
            )));
        }
        min_f = min_f.min(psd_min_eig(f)?);
    }
    if min_f < -CERTIFICATE_TOL {
        return Err(Error::CertificateInvalid(alloc::format!(
            "multiplier with eigenvalue {min_f:.3e}"
        )));
    }
    let id = ComplexMatrix::identity(p.dim);
    let mut min_slack = f64::INFINITY;
    for l in 0..p.n_lambda() {
        let s = psd_min_eig(&(&p.dual_lhs(l, multipliers) - &id))?;
        if s < -CERTIFICATE_TOL {
            return Err(Error::CertificateInvalid(alloc::format!(
                "dual constraint for strategy {l} violated by {:.3e}",
                -s
            )));
        }
        min_slack = min_slack.min(s);
    }
    Ok((min_f, min_slack, p.dual_objective(multipliers)))
}

/// Independently re-verifies an optimal solution: primal feasibility, dual
/// feasibility, and that the dual minus primal objective equals the gap.
pub fn dual_certificate(sol: &SdpSolution, p: &SdpProblem) -> Result<CertificateReport> {
    if sol.status != SolveStatus::Optimal {
        return Err(Error::CertificateInvalid(alloc::format!(
            "solution status is {:?}",
            sol.status
        )));
    }
    if sol.sigma_tilde.len() != p.n_lambda() {
        return Err(Error::CountMismatch {
            expected: p.n_lambda(),
            got: sol.sigma_tilde.len(),
        });
    }
    let (min_multiplier_eig, min_dual_slack, dual_value) = dual_slacks(p, &sol.multipliers)?;

    let mut min_primal_slack = f64::INFINITY;
    for s in &sol.sigma_tilde {
        min_primal_slack = min_primal_slack.min(psd_min_eig(s)?);
    }
    for c in 0..p.n_constraints() {
        min_primal_slack = min_primal_slack.min(psd_min_eig(&p.slack(c, &sol.sigma_tilde))?);
    }
    if min_primal_slack < -1e-8 {
        return Err(Error::CertificateInvalid(alloc::format!(
            "primal point infeasible by {:.3e}",
            -min_primal_slack
        )));
    }
    let primal_value: f64 = sol.sigma_tilde.iter().map(|s| s.trace().re).sum();
    let signed = dual_value - primal_value;
    let gap = signed.abs();
    if (gap - sol.gap).abs() > 1e-9 || (primal_value - sol.mu_star).abs() > 1e-9 {
        return Err(Error::CertificateInvalid(alloc::format!(
            "recomputed gap {gap:.3e} differs from reported {:.3e}",
            sol.gap
        )));
    }
    if signed < -CERTIFICATE_TOL {
        return Err(Error::CertificateInvalid(alloc::format!(
            "dual value below primal value by {:.3e}",
            -signed
        )));
    }
    Ok(CertificateReport {
        primal_value,
        dual_value,
        gap,
        min_dual_slack,
        min_multiplier_eig,
        min_primal_slack,
    })
}

#[cfg(test)]
mod tests;
