//! Vectorized master equations.
//!
//! Density matrices are vectorized row-major, `vec(ρ)[i·d + j] = ρ_ij`, so
//! `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::Result;
use crate::hermat::{eig_general, kron, ComplexMatrix, GeneralEigen};

/// Largest `h·‖L‖∞` used by the RK4 propagator.
pub const RK4_STEP_SCALE: f64 = 1e-3;

/// Lindblad generator `ρ̇ = −i[H, ρ] + Σₖ γₖ (AₖρAₖ† − ½{Aₖ†Aₖ, ρ})` as a
/// `d² × d²` matrix.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Liouvillian {
    pub fn new(hamiltonian: &ComplexMatrix, jumps: &[(f64, ComplexMatrix)]) -> Self {
        let d = hamiltonian.dim();
        let id = ComplexMatrix::identity(d);
        let minus_i = Complex64::new(0.0, -1.0);
        let mut l = (&kron(hamiltonian, &id) - &kron(&id, &hamiltonian.transpose())).scale(minus_i);
        for (rate, a) in jumps {
            if *rate == 0.0 {
                continue;
            }
            let ada = &a.adjoint() * a;
            let mut d_term = kron(a, &a.conj());
            d_term.axpy(-0.5, &kron(&ada, &id));
            d_term.axpy(-0.5, &kron(&id, &ada.transpose()));
            l.axpy(*rate, &d_term);
        }
        Self { dim: d, matrix: l }
    }

    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `L vec(ρ)`, unvectorized.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvec(&self.matrix.mul_vec(&vec_of(rho)), self.dim)
    }

    fn inf_norm(&self) -> f64 {
        let n = self.matrix.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Default number of RK4 steps for evolving to time `t`.
    pub fn default_steps(&self, t: f64) -> usize {
        ((t * self.inf_norm() / RK4_STEP_SCALE).ceil() as usize).max(1)
    }

    /// Propagator `e^{Lt}` from `steps` classic RK4 steps of size `t/steps`.
    ///
    /// For a linear autonomous system one RK4 step is the matrix polynomial
    /// `I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`; the steps are composed by
    /// repeated squaring.
    pub fn rk4_propagator(&self, t: f64, steps: usize) -> ComplexMatrix {
        let n = self.matrix.dim();
        if t == 0.0 {
            return ComplexMatrix::identity(n);
        }
        let steps = steps.max(1);
        let h = t / steps as f64;
        let hl = self.matrix.scale_real(h);
        let mut step = ComplexMatrix::identity(n);
        let mut power = ComplexMatrix::identity(n);
        for k in 1..=4u32 {
            power = &power * &hl;
            let fact = (1..=k).product::<u32>() as f64;
            step.axpy(1.0 / fact, &power);
        }
        matrix_power(&step, steps)
    }

    pub fn eigen(&self) -> Result<LiouvillianEigen> {
        Ok(LiouvillianEigen {
            eig: eig_general(&self.matrix)?,
        })
    }
}

/// Cached eigendecomposition of a Liouvillian, `e^{Lt} = V e^{Λt} V⁻¹`.
#[derive(Debug, Clone)]
pub struct LiouvillianEigen {
    eig: GeneralEigen,
}

impl LiouvillianEigen {
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.eig.apply_fn(|l| (l * t).exp())
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eig.values
    }
}

fn matrix_power(m: &ComplexMatrix, mut n: usize) -> ComplexMatrix {
    let mut result: Option<ComplexMatrix> = None;
    let mut base = m.clone();
    loop {
        if n & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        n >>= 1;
        if n == 0 {
            break;
        }
        base = &base * &base;
    }
    result.unwrap_or_else(|| ComplexMatrix::identity(m.dim()))
}

pub fn vec_of(rho: &ComplexMatrix) -> Vec<Complex64> {
    rho.as_slice().to_vec()
}

pub fn unvec(v: &[Complex64], dim: usize) -> ComplexMatrix {
    ComplexMatrix::new(dim, v.to_vec()).expect("vector of length dim²")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermat::{pauli_x, pauli_z};

    #[test]
    fn vectorization_identity() {
        let a = pauli_x();
        let b = pauli_z().scale(Complex64::new(0.0, 1.0));
        let rho = ComplexMatrix::from_fn(2, |i, j| Complex64::new((i + 2 * j) as f64, i as f64));
        let lhs = vec_of(&(&(&a * &rho) * &b));
        let rhs = kron(&a, &b.transpose()).mul_vec(&vec_of(&rho));
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn unitary_generator_matches_commutator() {
        let h = pauli_x().scale_real(0.7);
        let l = Liouvillian::new(&h, &[]);
        let rho = ComplexMatrix::from_real_diag(&[0.3, 0.7]);
        let want = (&(&h * &rho) - &(&rho * &h)).scale(Complex64::new(0.0, -1.0));
        assert!(l.apply(&rho).distance(&want) < 1e-15);
    }

    #[test]
    fn matrix_power_counts() {
        let m = pauli_x().scale_real(2.0);
        let p = matrix_power(&m, 5);
        assert!(p.distance(&pauli_x().scale_real(32.0)) < 1e-12);
        assert_eq!(matrix_power(&m, 1), m);
    }
}
