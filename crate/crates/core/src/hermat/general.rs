//! Eigendecomposition of general (non-normal) complex matrices via a
//! Hessenberg reduction and single-shift QR iteration to Schur form.
//!
//! Used for Liouvillian superoperators, which are not Hermitian. Only
//! diagonalizable inputs are supported.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_QR_ITER_PER_EIGENVALUE: usize = 60;

/// `M = V diag(values) V⁻¹`.
#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub values: Vec<Complex64>,
    /// Eigenvectors as columns.
    pub vectors: ComplexMatrix,
    pub vectors_inv: ComplexMatrix,
}

impl GeneralEigen {
    /// `V diag(f(λ)) V⁻¹`.
    pub fn apply_fn(&self, mut f: impl FnMut(Complex64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let fl: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * fl[k] * self.vectors_inv[(k, j)])
                .sum()
        })
    }
}

/// Eigendecomposition of a diagonalizable complex matrix.
pub fn eig_general(m: &ComplexMatrix) -> Result<GeneralEigen> {
    let n = m.dim();
    let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut t = m.clone();
    let mut q = ComplexMatrix::identity(n);
    hessenberg(&mut t, &mut q);
    schur_qr(&mut t, &mut q)?;

    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let small = 1e-9 * tnorm;

    let mut vectors = ComplexMatrix::zeros(n);
    for k in 0..n {
        let lam = values[k];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let numer: Complex64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
            let denom = t[(j, j)] - lam;
            y[j] = if denom.norm() < small {
                // clustered eigenvalue: diagonalizable only if the coupling vanishes
                if numer.norm() > 1e-7 * tnorm {
                    return Err(Error::NumericalBreakdown(alloc::string::String::from(
                        "matrix is defective (non-diagonalizable)",
                    )));
                }
                Complex64::new(0.0, 0.0)
            } else {
                -numer / denom
            };
        }
        let v = q.mul_vec(&y);
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            vectors[(i, k)] = v[i] / vn;
        }
    }

    let vectors_inv = inverse(&vectors)?;
    let eig = GeneralEigen {
        values,
        vectors,
        vectors_inv,
    };
    let recon = eig.apply_fn(|l| l);
    if recon.distance(m) > 1e-9 * norm {
        return Err(Error::NumericalBreakdown(alloc::format!(
            "eigendecomposition reconstruction error {:.3e}",
            recon.distance(m) / norm
        )));
    }
    Ok(eig)
}

/// Householder reduction to upper Hessenberg form, accumulating `q`.
fn hessenberg(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.dim();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // v = x + phase·‖x‖·e₁, H = I − 2 v v† / (v† v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A ← H A
        for j in 0..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * a[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                a[(k + 1 + i, j)] -= v[i] * s * beta;
            }
        }
        // A ← A H, Q ← Q H
        for r in 0..n {
            let s: Complex64 = (0..v.len()).map(|i| a[(r, k + 1 + i)] * v[i]).sum();
            for i in 0..v.len() {
                a[(r, k + 1 + i)] -= s * v[i].conj() * beta;
            }
            let s: Complex64 = (0..v.len()).map(|i| q[(r, k + 1 + i)] * v[i]).sum();
            for i in 0..v.len() {
                q[(r, k + 1 + i)] -= s * v[i].conj() * beta;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Unitary `G` with `G [x; y] = [r; 0]`, stored as `(x/r, y/r)`.
fn givens(x: Complex64, y: Complex64) -> Option<(Complex64, Complex64)> {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r == 0.0 {
        None
    } else {
        Some((x / r, y / r))
    }
}

fn schur_qr(a: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = a.dim();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = a[(lo, lo - 1)].norm();
            let diag = a[(lo - 1, lo - 1)].norm() + a[(lo, lo)].norm();
            if sub <= eps * diag.max(f64::MIN_POSITIVE) {
                a[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_QR_ITER_PER_EIGENVALUE {
            return Err(Error::NumericalBreakdown(alloc::string::String::from(
                "QR iteration did not converge",
            )));
        }

        let shift = if iter.is_multiple_of(11) {
            // exceptional shift
            a[(hi, hi)] + Complex64::new(a[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(
                a[(hi - 1, hi - 1)],
                a[(hi - 1, hi)],
                a[(hi, hi - 1)],
                a[(hi, hi)],
            )
        };

        let mut x = a[(lo, lo)] - shift;
        let mut y = a[(lo + 1, lo)];
        for k in lo..hi {
            if k > lo {
                x = a[(k, k - 1)];
                y = a[(k + 1, k - 1)];
            }
            let Some((gx, gy)) = givens(x, y) else {
                continue;
            };
            // rows k, k+1 ← G rows, G = [[x̄, ȳ], [−y, x]]
            for j in 0..n {
                let u = a[(k, j)];
                let w = a[(k + 1, j)];
                a[(k, j)] = gx.conj() * u + gy.conj() * w;
                a[(k + 1, j)] = -gy * u + gx * w;
            }
            // columns k, k+1 ← columns G†
            for r in 0..n {
                let u = a[(r, k)];
                let w = a[(r, k + 1)];
                a[(r, k)] = u * gx + w * gy;
                a[(r, k + 1)] = -u * gy.conj() + w * gx.conj();
                let u = q[(r, k)];
                let w = q[(r, k + 1)];
                q[(r, k)] = u * gx + w * gy;
                q[(r, k + 1)] = -u * gy.conj() + w * gx.conj();
            }
            if k > lo {
                a[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 block closer to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Matrix inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() <= 1e-14 * scale {
            return Err(Error::NumericalBreakdown(alloc::string::String::from(
                "singular matrix",
            )));
        }
        if pivot != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = t;
            }
        }
        let p = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let acj = a[(col, j)];
                let icj = inv[(col, j)];
                a[(i, j)] -= f * acj;
                inv[(i, j)] -= f * icj;
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex_matrix, random_hermitian, rng_from_seed};

    #[test]
    fn random_matrices_decompose() {
        let mut rng = rng_from_seed(17);
        for dim in [2, 3, 4, 7, 16] {
            for _ in 0..5 {
                let m = random_complex_matrix(&mut rng, dim);
                let eig = eig_general(&m).unwrap();
                assert!(eig.apply_fn(|l| l).distance(&m) < 1e-10 * m.frobenius_norm());
                for k in 0..dim {
                    let v: Vec<Complex64> = (0..dim).map(|i| eig.vectors[(i, k)]).collect();
                    let mv = m.mul_vec(&v);
                    let r: f64 = mv
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| (a - b * eig.values[k]).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    assert!(r < 1e-10 * m.frobenius_norm());
                }
            }
        }
    }

    #[test]
    fn degenerate_normal_matrix() {
        // Hermitian with a repeated eigenvalue, embedded as a general matrix
        let mut rng = rng_from_seed(2);
        let h = random_hermitian(&mut rng, 4);
        let u = crate::hermat::eig_hermitian(&h).unwrap();
        let d = u.reconstruct_with(|l| if l < 0.0 { -1.0 } else { 2.0 });
        let eig = eig_general(&d).unwrap();
        assert!(eig.apply_fn(|l| l).distance(&d) < 1e-10);
    }

    #[test]
    fn jordan_block_is_rejected() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(eig_general(&m).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = rng_from_seed(8);
        let m = random_complex_matrix(&mut rng, 6);
        let inv = inverse(&m).unwrap();
        assert!((&m * &inv).distance(&ComplexMatrix::identity(6)) < 1e-12);
        assert!(inverse(&ComplexMatrix::zeros(3)).is_err());
    }
}
