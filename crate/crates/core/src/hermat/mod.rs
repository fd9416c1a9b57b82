//! Dense complex linear algebra for the small matrices used throughout the
//! crate (qubit states, two- and three-qubit operators, superoperators).
//!
//! Matrices are square and stored row-major. Entries are `Complex64`, i.e.
//! pairs of `f64`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};

mod eigen;
mod general;

pub use eigen::{eig_hermitian, psd_min_eig, psd_project, psd_sqrt, EigenDecomposition};
pub use general::{eig_general, inverse, GeneralEigen};

/// Relative Frobenius tolerance below which a matrix counts as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadDimension(alloc::format!(
                "{} entries cannot form a non-empty {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        m
    }

    /// Builds a matrix from rows given as `(re, im)` pairs.
    pub fn from_pairs(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadDimension(alloc::format!(
                    "row of length {} in a {dim}-row matrix",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&(re, im)| Complex64::new(re, im)));
        }
        Self::new(dim, data)
    }

    /// `|ket><bra|`.
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Self {
        assert_eq!(ket.len(), bra.len(), "outer product of unequal vectors");
        Self::from_fn(ket.len(), |i, j| ket[i] * bra[j].conj())
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &[Complex64]) -> Self {
        Self::outer(psi, psi)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.dim, other.dim, "axpy of unequal dimensions");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    /// `‖M − M†‖_F / ‖M‖_F`, zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Symmetrizes after checking the Hermiticity tolerance.
    pub fn checked_hermitian(&self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(self.hermitian_part())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "distance between unequal dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sum of unequal dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "difference of unequal dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "product of unequal dimensions");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(-1.0, rhs);
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    ComplexMatrix::from_fn(na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

/// Which factor of a two-qubit operator to keep in [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The first tensor factor.
    First,
    /// The second tensor factor.
    Second,
}

/// Partial trace of a 4×4 operator on `C² ⊗ C²`, keeping one qubit.
pub fn partial_trace(m: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    if m.dim != 4 {
        return Err(Error::BadDimension(alloc::format!(
            "partial trace expects a 4x4 operator, got {}x{}",
            m.dim,
            m.dim
        )));
    }
    partial_trace_dims(m, 2, 2, keep)
}

/// Partial trace on `C^da ⊗ C^db`.
pub fn partial_trace_dims(
    m: &ComplexMatrix,
    da: usize,
    db: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if m.dim != da * db {
        return Err(Error::BadDimension(alloc::format!(
            "operator of dimension {} is not {da}x{db}",
            m.dim
        )));
    }
    Ok(match keep {
        Subsystem::First => ComplexMatrix::from_fn(da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    })
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.dim != b.dim {
        return Err(Error::BadDimension(alloc::format!(
            "inner product of {}x{} and {}x{}",
            a.dim,
            a.dim,
            b.dim,
            b.dim
        )));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `Re Tr(A B)` without forming the product.
pub(crate) fn re_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a.data[i * n + k];
            let y = b.data[k * n + i];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
}

pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 1)] = Complex64::new(0.0, -1.0);
    m[(1, 0)] = Complex64::new(0.0, 1.0);
    m
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// Orthonormal (Frobenius) basis of the real vector space of `dim × dim`
/// Hermitian matrices: diagonal units first, then symmetric and
/// antisymmetric off-diagonal pairs.
pub fn hermitian_basis(dim: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let mut e = ComplexMatrix::zeros(dim);
        e[(i, i)] = ONE;
        basis.push(e);
    }
    let h = core::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in i + 1..dim {
            let mut s = ComplexMatrix::zeros(dim);
            s[(i, j)] = Complex64::new(h, 0.0);
            s[(j, i)] = Complex64::new(h, 0.0);
            basis.push(s);
            let mut a = ComplexMatrix::zeros(dim);
            a[(i, j)] = Complex64::new(0.0, -h);
            a[(j, i)] = Complex64::new(0.0, h);
            basis.push(a);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, rng_from_seed};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zi = kron(&pauli_z(), &i2);
        assert_eq!(zi, ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
        let xx = kron(&pauli_x(), &pauli_x());
        let out = xx.mul_vec(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert_eq!(out, [c(0.0), c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = rng_from_seed(3);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let cc = random_hermitian(&mut rng, 2);
        let d = random_hermitian(&mut rng, 2);
        let lhs = &kron(&a, &b) * &kron(&cc, &d);
        let rhs = kron(&(&a * &cc), &(&b * &d));
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = rng_from_seed(9);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let pt = partial_trace(&kron(&a, &b), Subsystem::First).unwrap();
        assert!(pt.distance(&a.scale(b.trace())) < 1e-12);

        let h = core::f64::consts::FRAC_1_SQRT_2;
        let phi = [c(h), c(0.0), c(0.0), c(h)];
        let bell = ComplexMatrix::projector(&phi);
        let pt = partial_trace(&bell, Subsystem::First).unwrap();
        assert!(pt.distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        // |eg><eg| with |e> = |0>, |g> = |1>
        let eg = ComplexMatrix::projector(&[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let pt = partial_trace(&eg, Subsystem::Second).unwrap();
        assert_eq!(pt, ComplexMatrix::from_real_diag(&[0.0, 1.0]));

        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(2), Subsystem::First),
            Err(Error::BadDimension(_))
        ));
    }

    #[test]
    fn frobenius_inner_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(frobenius_inner(&i2, &i2).unwrap(), c(2.0));
        assert_eq!(frobenius_inner(&pauli_x(), &pauli_z()).unwrap(), c(0.0));
        assert_eq!(frobenius_inner(&pauli_z(), &pauli_z()).unwrap(), c(2.0));
        assert!(frobenius_inner(&i2, &ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        for dim in 1..=4 {
            let basis = hermitian_basis(dim);
            assert_eq!(basis.len(), dim * dim);
            for (k, a) in basis.iter().enumerate() {
                assert!(a.is_hermitian(1e-15));
                for (l, b) in basis.iter().enumerate() {
                    let ip = frobenius_inner(a, b).unwrap();
                    let want = if k == l { 1.0 } else { 0.0 };
                    assert!((ip - c(want)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn new_rejects_wrong_length() {
        assert!(ComplexMatrix::new(2, alloc::vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(0, Vec::new()).is_err());
    }
}
