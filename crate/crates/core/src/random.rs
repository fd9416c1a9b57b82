//! Seeded random fixtures: Gaussian matrices, density matrices, unitaries,
//! isometries and assemblages. All generators are deterministic in the seed.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermat::{kron, partial_trace, ComplexMatrix, Subsystem};
use crate::steering::{Assemblage, MeasurementSet};

pub type FixtureRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_complex_matrix(rng, dim).hermitian_part()
}

/// `G G† / Tr(G G†)` for a Ginibre `G` (full rank almost surely).
pub fn random_density_matrix<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = random_complex_matrix(rng, dim);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}

/// Columns of a `rows × cols` Gaussian matrix orthonormalized by modified
/// Gram–Schmidt. Returned column-major: `out[c][r]`.
pub fn random_isometry<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<Complex64>> {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while out.len() < cols {
        let mut v: Vec<Complex64> = (0..rows).map(|_| gaussian(rng)).collect();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for u in &out {
                let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= ip * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for vi in &mut v {
            *vi /= norm;
        }
        out.push(v);
    }
    out
}

/// Haar-like random unitary from an orthonormalized Ginibre matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let cols = random_isometry(rng, dim, dim);
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Assemblage obtained by measuring the first qubit of a random two-qubit
/// state in the Pauli bases: `σ_{a|x} = Tr_A[(Π_{a|x} ⊗ I) ρ_AB]`.
pub fn random_assemblage<R: Rng>(rng: &mut R, ms: &MeasurementSet) -> Assemblage {
    let rho_ab = random_density_matrix(rng, 4);
    let id = ComplexMatrix::identity(2);
    let members = ms
        .measurements()
        .iter()
        .map(|m| {
            m.projectors().map(|p| {
                let op = &kron(p, &id) * &rho_ab;
                partial_trace(&op, Subsystem::Second)
                    .expect("4x4 operator")
                    .hermitian_part()
            })
        })
        .collect();
    Assemblage::from_parts(ms.labels(), members, 0.0)
}
