//! Congruence `σ ↦ SσS` with `S = R^{-1/2}`, `R` the average over settings
//! of `Σ_a σ_{a|x}`.
//!
//! Whitened PSD members satisfy `SσS ⪯ n_meas·I`, so eigenvalues that differ
//! by orders of magnitude in the original frame become comparable.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::hermat::{eig_hermitian, ComplexMatrix};

/// Relative size below which an eigenvalue of `R` counts as an exact zero.
const NULL_TOL: f64 = 1e-200;

#[derive(Debug, Clone)]
pub(crate) struct Whitening {
    s: ComplexMatrix,
    s_inv: ComplexMatrix,
    /// `S⁻²`, equal to `R` away from its exact null space.
    r: ComplexMatrix,
}

impl Whitening {
    pub(crate) fn new(members: &[ComplexMatrix]) -> Result<Self> {
        let d = members[0].dim();
        let mut r = ComplexMatrix::zeros(d);
        for m in members {
            r += m;
        }
        let r = r.scale_real(2.0 / members.len() as f64).hermitian_part();
        let e = eig_hermitian(&r)?;
        let r_max = e.eigenvalues[d - 1].max(f64::MIN_POSITIVE);
        let floor = |x: f64| if x > NULL_TOL * r_max { x } else { r_max };
        Ok(Self {
            s: e.reconstruct_with(|x| 1.0 / floor(x).sqrt())
                .hermitian_part(),
            s_inv: e.reconstruct_with(|x| floor(x).sqrt()).hermitian_part(),
            r: e.reconstruct_with(floor).hermitian_part(),
        })
    }

    /// `SmS`: members and slacks into the whitened frame, multipliers out of
    /// it.
    pub(crate) fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        (&(&self.s * m) * &self.s).hermitian_part()
    }

    /// `S⁻¹mS⁻¹`: members and `σ̃` out of the whitened frame.
    pub(crate) fn unapply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        (&(&self.s_inv * m) * &self.s_inv).hermitian_part()
    }

    /// Objective weight of whitened `σ̃`: `Tr σ̃ = Tr(S⁻² SσS)`.
    pub(crate) fn weight(&self) -> &ComplexMatrix {
        &self.r
    }

    pub(crate) fn whiten_all(&self, members: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        members.iter().map(|m| self.apply(m)).collect()
    }
}
