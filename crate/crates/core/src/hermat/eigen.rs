use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::Result;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    /// `Σᵢ f(λᵢ) vᵢvᵢ†`, exactly Hermitian.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                out[(i, i)].re += (vi * v[i].conj()).re;
                for j in i + 1..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out[(i, j)] = out[(j, i)].conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Inputs within the Hermiticity tolerance are symmetrized first.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let mut a = m.checked_hermitian()?;
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) on (p, q) followed by the real rotation
    let upp = Complex64::new(c, 0.0);
    let uqp = -phase.conj() * s;
    let upq = Complex64::new(s, 0.0);
    let uqq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn psd_min_eig(m: &ComplexMatrix) -> Result<f64> {
    if m.dim() == 2 {
        let h = m.checked_hermitian()?;
        return Ok(eig2_min(&h));
    }
    Ok(eig_hermitian(m)?.eigenvalues[0])
}

/// Closed form for the 2×2 case. For a positive larger eigenvalue the
/// smaller one is taken as `det / λ_max`, which keeps its relative accuracy
/// on strongly graded matrices such as `[[1e12, 1e6], [1e6, 2]]`.
fn eig2_min(h: &ComplexMatrix) -> f64 {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let radius = half.hypot(b.norm());
    let max = mean + radius;
    if max > 0.0 {
        (a * d - b.norm_sqr()) / max
    } else {
        mean - radius
    }
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
pub fn psd_project(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    if eig.eigenvalues[0] >= 0.0 {
        return m.checked_hermitian();
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0)))
}

/// Principal square root of a PSD matrix (negative rounding clipped).
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(m)?.reconstruct_with(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::error::Error;
    use crate::hermat::{pauli_x, pauli_z};
    use crate::random::{random_hermitian, rng_from_seed};
    use proptest::prelude::*;

    fn residual_ok(m: &ComplexMatrix, eig: &EigenDecomposition) {
        let norm = m.frobenius_norm().max(1e-300);
        for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let mv = m.mul_vec(v);
            let r: f64 = mv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b * *lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r <= 1e-12 * norm, "residual {r}");
        }
        assert!(eig.reconstruct().distance(m) <= 1e-12 * norm.max(1.0));
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn graded_two_by_two_min_eigenvalue_is_relatively_accurate() {
        let m = ComplexMatrix::from_pairs(&[&[(1e12, 0.0), (1e6, 0.0)], &[(1e6, 0.0), (2.0, 0.0)]])
            .unwrap();
        // det = 1e12 and λmax ≈ 1e12 + 1, so λmin ≈ 1 − 1e-12
        let min = psd_min_eig(&m).unwrap();
        assert!((min - (1.0 - 1e-12)).abs() < 1e-14, "{min}");
    }

    #[test]
    fn identity_and_paulis() {
        let eig = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, [1.0, 1.0]);

        let eig = eig_hermitian(&pauli_z()).unwrap();
        assert_eq!(eig.eigenvalues, [-1.0, 1.0]);
        assert!((eig.eigenvectors[0][1].norm() - 1.0).abs() < 1e-15);
        assert!((eig.eigenvectors[1][0].norm() - 1.0).abs() < 1e-15);

        let eig = eig_hermitian(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-15);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        // (|0> - |1>)/√2 and (|0> + |1>)/√2 up to a global phase
        let minus = &eig.eigenvectors[0];
        let plus = &eig.eigenvectors[1];
        assert!(((minus[0] * minus[1].conj()).re + 0.5).abs() < 1e-15);
        assert!(((plus[0] * plus[1].conj()).re - 0.5).abs() < 1e-15);
        assert!((minus[0].norm() - h).abs() < 1e-15);
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
        assert!(psd_min_eig(&m).is_err());
        assert!(psd_project(&m).is_err());
    }

    #[test]
    fn min_eig_examples() {
        assert_eq!(psd_min_eig(&pauli_z()).unwrap(), -1.0);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert_eq!(psd_min_eig(&half).unwrap(), 0.5);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::projector(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]);
        assert!(psd_min_eig(&plus).unwrap().abs() < 1e-15);
    }

    #[test]
    fn project_examples() {
        let p = psd_project(&pauli_z()).unwrap();
        assert!(p.distance(&ComplexMatrix::from_real_diag(&[1.0, 0.0])) < 1e-15);
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(psd_project(&i2).unwrap(), i2);
        let p = psd_project(&ComplexMatrix::from_real_diag(&[3.0, -2.0])).unwrap();
        assert!(p.distance(&ComplexMatrix::from_real_diag(&[3.0, 0.0])) < 1e-15);
    }

    #[test]
    fn thousand_random_matrices() {
        let mut rng = rng_from_seed(42);
        for k in 0..1000 {
            let dim = if k % 2 == 0 { 2 } else { 4 };
            let m = random_hermitian(&mut rng, dim);
            residual_ok(&m, &eig_hermitian(&m).unwrap());
        }
        for dim in [3, 5, 8] {
            let m = random_hermitian(&mut rng, dim);
            residual_ok(&m, &eig_hermitian(&m).unwrap());
        }
    }

    #[test]
    fn closed_form_min_matches_jacobi() {
        let mut rng = rng_from_seed(5);
        for _ in 0..200 {
            let m = random_hermitian(&mut rng, 2);
            let a = psd_min_eig(&m).unwrap();
            let b = eig_hermitian(&m).unwrap().eigenvalues[0];
            assert!((a - b).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn project_is_idempotent(seed in 0u64..10_000, four in any::<bool>()) {
            let mut rng = rng_from_seed(seed);
            let m = random_hermitian(&mut rng, if four { 4 } else { 2 });
            let p = psd_project(&m).unwrap();
            prop_assert!(psd_min_eig(&p).unwrap() >= -1e-13);
            let pp = psd_project(&p).unwrap();
            prop_assert!(pp.distance(&p) <= 1e-12);
        }
    }
}
