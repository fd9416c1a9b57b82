//! Infeasible primal-dual interior-point method (HKM direction with a
//! Mehrotra predictor-corrector step) for the steerable-weight problem.
//!
//! In block form the steering problem reads `max bᵀy` subject to
//! `Z = C − Σᵢ yᵢ Aᵢ ⪰ 0`, where `y` holds the coordinates of every `σ̃_λ`
//! in an orthonormal Hermitian basis. `Z` has one block per constraint
//! (`σ_{a|x} − Σ D σ̃`) followed by one block per strategy (`σ̃_λ`). The
//! conic dual variable `X` has the same shape; its constraint blocks are the
//! multipliers `F_{a|x}`.
//!
//! The problem is solved in whitened coordinates (see `whiten`):
//! feasibility is invariant under the congruence, the objective becomes
//! `Tr(R σ̃)`, and certificates are mapped back and checked in the original
//! coordinates.
//!
//! Rank-deficient members leave the feasible set without interior points,
//! which stalls interior-point methods. Before iterating, every constraint
//! is restricted to the range of its member and every `σ̃_λ` to the
//! intersection of the ranges it enters (facial reduction). The dual
//! certificate is completed on the discarded directions afterwards.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::whiten::Whitening;
use super::{SdpProblem, SdpSolution, SolveStatus};
use crate::error::{Error, Result};
use crate::hermat::{
    eig_hermitian, hermitian_basis, psd_min_eig, psd_project, re_trace_product, ComplexMatrix,
};

/// Fraction of the distance to the cone boundary taken per step.
const STEP_FRACTION: f64 = 0.98;
/// Primal slack accepted when rounding `σ̃` into the feasible set, relative
/// to the largest member eigenvalue.
const ROUNDING_SLACK: f64 = 1e-12;
const BISECTION_STEPS: usize = 60;
const REFINEMENT_STEPS: usize = 2;
/// Member eigenvalues below this fraction of the largest one span the
/// discarded face; above the cut applied when building the problem.
const FACE_TOL: f64 = 1e-10;
/// Eigenvalue threshold for deciding that a direction lies in every range.
const INTERSECTION_TOL: f64 = 1e-9;

/// Orthonormal columns spanning a subspace of `C^d`.
#[derive(Debug, Clone)]
struct Face {
    dim: usize,
    /// `None` for the whole space.
    cols: Option<Vec<Vec<Complex64>>>,
}

impl Face {
    fn full(dim: usize) -> Self {
        Self { dim, cols: None }
    }

    fn from_cols(dim: usize, cols: Vec<Vec<Complex64>>) -> Self {
        if cols.len() == dim {
            Self::full(dim)
        } else {
            Self {
                dim,
                cols: Some(cols),
            }
        }
    }

    fn rank(&self) -> usize {
        self.cols.as_ref().map_or(self.dim, Vec::len)
    }

    fn is_full(&self) -> bool {
        self.cols.is_none()
    }

    /// `F† M F`.
    fn compress(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.cols {
            None => m.clone(),
            Some(cols) => ComplexMatrix::from_fn(cols.len(), |i, j| {
                let mv = m.mul_vec(&cols[j]);
                cols[i].iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
            }),
        }
    }

    /// `F A F†` for Hermitian `A`.
    fn expand(&self, a: &ComplexMatrix) -> ComplexMatrix {
        match &self.cols {
            None => a.clone(),
            Some(cols) => {
                let r = cols.len();
                ComplexMatrix::from_fn(self.dim, |i, j| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..r {
                        for l in 0..r {
                            acc += cols[k][i] * a[(k, l)] * cols[l][j].conj();
                        }
                    }
                    acc
                })
                .hermitian_part()
            }
        }
    }

    /// `I − F F†`.
    fn complement_projector(&self) -> ComplexMatrix {
        let Some(cols) = &self.cols else {
            return ComplexMatrix::zeros(self.dim);
        };
        let mut q = ComplexMatrix::identity(self.dim);
        for c in cols {
            q -= &ComplexMatrix::projector(c);
        }
        q
    }
}

struct Layout<'a> {
    p: &'a SdpProblem,
    nc: usize,
    nl: usize,
    cfaces: Vec<Face>,
    vfaces: Vec<Face>,
    /// Hermitian basis of each reduced `σ̃_λ` block.
    vbasis: Vec<Vec<ComplexMatrix>>,
    offsets: Vec<usize>,
    m: usize,
    /// `tmat[c][j][k]`: basis element `k` of the `j`-th strategy in the
    /// support of `c`, compressed to the face of `c`.
    tmat: Vec<Vec<Vec<ComplexMatrix>>>,
    c_hat: Vec<ComplexMatrix>,
    /// Objective weight `R = S⁻²` compressed to each strategy face.
    weight: Vec<ComplexMatrix>,
    w: Whitening,
    /// Largest eigenvalue over the original members.
    scale: f64,
}

impl<'a> Layout<'a> {
    fn new(p: &'a SdpProblem) -> Result<Self> {
        let d = p.dim();
        let nc = p.n_constraints();
        let nl = p.n_lambda();
        let w = Whitening::new(&(0..nc).map(|c| p.constraint(c).clone()).collect::<Vec<_>>())?;
        let scale = (0..nc)
            .map(|c| eig_hermitian(p.constraint(c)).map(|e| e.eigenvalues[d - 1]))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let members: Vec<ComplexMatrix> = (0..nc).map(|c| w.apply(p.constraint(c))).collect();
        let eigs = members
            .iter()
            .map(eig_hermitian)
            .collect::<Result<Vec<_>>>()?;
        let face_scale = eigs
            .iter()
            .map(|e| e.eigenvalues[d - 1])
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let cfaces: Vec<Face> = eigs
            .iter()
            .map(|e| {
                let keep: Vec<Vec<Complex64>> = e
                    .eigenvalues
                    .iter()
                    .zip(&e.eigenvectors)
                    .filter(|(l, _)| **l > FACE_TOL * face_scale)
                    .map(|(_, v)| v.clone())
                    .collect();
                Face::from_cols(d, keep)
            })
            .collect();

        let mut membership = vec![Vec::new(); nl];
        for c in 0..nc {
            for &l in p.support(c) {
                membership[l].push(c);
            }
        }
        let vfaces = membership
            .iter()
            .map(|cs: &Vec<usize>| {
                if cs.iter().all(|&c| cfaces[c].is_full()) {
                    return Ok(Face::full(d));
                }
                let mut q = ComplexMatrix::zeros(d);
                for &c in cs {
                    q += &cfaces[c].complement_projector();
                }
                let e = eig_hermitian(&q)?;
                let keep = e
                    .eigenvalues
                    .iter()
                    .zip(&e.eigenvectors)
                    .filter(|(l, _)| **l < INTERSECTION_TOL)
                    .map(|(_, v)| v.clone())
                    .collect();
                Ok(Face::from_cols(d, keep))
            })
            .collect::<Result<Vec<_>>>()?;

        let vbasis: Vec<Vec<ComplexMatrix>> =
            vfaces.iter().map(|f| hermitian_basis(f.rank())).collect();
        let mut offsets = Vec::with_capacity(nl);
        let mut m = 0;
        for b in &vbasis {
            offsets.push(m);
            m += b.len();
        }
        let tmat = (0..nc)
            .map(|c| {
                p.support(c)
                    .iter()
                    .map(|&l| {
                        vbasis[l]
                            .iter()
                            .map(|e| cfaces[c].compress(&vfaces[l].expand(e)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let c_hat = (0..nc)
            .map(|c| cfaces[c].compress(&members[c]).hermitian_part())
            .collect();
        let weight = vfaces
            .iter()
            .map(|f| f.compress(w.weight()).hermitian_part())
            .collect();
        Ok(Self {
            p,
            nc,
            nl,
            cfaces,
            vfaces,
            vbasis,
            offsets,
            m,
            tmat,
            c_hat,
            weight,
            w,
            scale,
        })
    }

    fn n_blocks(&self) -> usize {
        self.nc + self.nl
    }

    fn block_dim(&self, i: usize) -> usize {
        if i < self.nc {
            self.cfaces[i].rank()
        } else {
            self.vfaces[i - self.nc].rank()
        }
    }

    /// Reduced `σ̃_λ`.
    fn sigma_hat(&self, y: &[f64], l: usize) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.vfaces[l].rank());
        for (k, b) in self.vbasis[l].iter().enumerate() {
            s.axpy(y[self.offsets[l] + k], b);
        }
        s
    }

    /// `Σᵢ yᵢ Aᵢ`.
    fn adjoint_op(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = (0..self.nc)
            .map(|c| {
                let mut s = ComplexMatrix::zeros(self.cfaces[c].rank());
                for (j, &l) in self.p.support(c).iter().enumerate() {
                    for (k, t) in self.tmat[c][j].iter().enumerate() {
                        s.axpy(y[self.offsets[l] + k], t);
                    }
                }
                s
            })
            .collect();
        out.extend((0..self.nl).map(|l| -&self.sigma_hat(y, l)));
        out
    }

    /// `(Re Tr(Aᵢ W))ᵢ`.
    fn op(&self, w: &[ComplexMatrix]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for c in 0..self.nc {
            for (j, &l) in self.p.support(c).iter().enumerate() {
                for (k, t) in self.tmat[c][j].iter().enumerate() {
                    out[self.offsets[l] + k] += re_trace_product(t, &w[c]);
                }
            }
        }
        for l in 0..self.nl {
            for (k, e) in self.vbasis[l].iter().enumerate() {
                out[self.offsets[l] + k] -= re_trace_product(e, &w[self.nc + l]);
            }
        }
        out
    }

    fn objective(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.m];
        for l in 0..self.nl {
            for (k, e) in self.vbasis[l].iter().enumerate() {
                b[self.offsets[l] + k] = re_trace_product(e, &self.weight[l]);
            }
        }
        b
    }

    fn c_blocks(&self) -> Vec<ComplexMatrix> {
        let mut out = self.c_hat.clone();
        out.extend(self.vfaces.iter().map(|f| ComplexMatrix::zeros(f.rank())));
        out
    }

    /// Schur complement `M_ij = Re Tr(Aᵢ X Aⱼ Z⁻¹)`.
    fn schur(&self, x: &[ComplexMatrix], zinv: &[ComplexMatrix]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m * m];
        for c in 0..self.nc {
            let support = self.p.support(c);
            let prods: Vec<Vec<ComplexMatrix>> = self.tmat[c]
                .iter()
                .map(|ts| ts.iter().map(|t| &(&x[c] * t) * &zinv[c]).collect())
                .collect();
            for (j, &l) in support.iter().enumerate() {
                for (k, t) in self.tmat[c][j].iter().enumerate() {
                    let row = (self.offsets[l] + k) * m;
                    for (jp, &lp) in support.iter().enumerate() {
                        for (kp, pr) in prods[jp].iter().enumerate() {
                            out[row + self.offsets[lp] + kp] += re_trace_product(t, pr);
                        }
                    }
                }
            }
        }
        for l in 0..self.nl {
            let blk = self.nc + l;
            let prods: Vec<ComplexMatrix> = self.vbasis[l]
                .iter()
                .map(|e| &(&x[blk] * e) * &zinv[blk])
                .collect();
            for (k, e) in self.vbasis[l].iter().enumerate() {
                let row = (self.offsets[l] + k) * m;
                for (kp, pr) in prods.iter().enumerate() {
                    out[row + self.offsets[l] + kp] += re_trace_product(e, pr);
                }
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let s = 0.5 * (out[i * m + j] + out[j * m + i]);
                out[i * m + j] = s;
                out[j * m + i] = s;
            }
        }
        out
    }
}

fn inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| re_trace_product(x, y)).sum()
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
fn cholesky(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = a.dim();
    let mut l = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

fn lower_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.dim();
    let mut inv = ComplexMatrix::zeros(n);
    for j in 0..n {
        inv[(j, j)] = Complex64::new(1.0, 0.0) / l[(j, j)];
        for i in j + 1..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

fn hpd_inverse(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let li = lower_inverse(&cholesky(a)?);
    Some((&li.adjoint() * &li).hermitian_part())
}

/// Largest `α` with `X + αΔX ⪰ 0` (possibly infinite), or `None` once `X`
/// has numerically left the cone.
fn max_step(x: &[ComplexMatrix], dx: &[ComplexMatrix]) -> Option<f64> {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        if xb.dim() == 0 {
            continue;
        }
        let li = lower_inverse(&cholesky(xb)?);
        let w = (&(&li * db) * &li.adjoint()).hermitian_part();
        let min = psd_min_eig(&w).ok()?;
        if !min.is_finite() {
            return None;
        }
        if min < 0.0 {
            alpha = alpha.min(-1.0 / min);
        }
    }
    Some(alpha)
}

/// In-place Cholesky of a dense symmetric positive definite matrix.
fn real_cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], n: usize, rhs: &[f64]) -> Vec<f64> {
    let mut z = rhs.to_vec();
    for i in 0..n {
        let mut s = z[i];
        for k in 0..i {
            s -= l[i * n + k] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l[k * n + i] * z[k];
        }
        z[i] = s / l[i * n + i];
    }
    z
}

/// Cholesky factor of the Schur complement after symmetric scaling to unit
/// diagonal, with a diagonal shift when the matrix is numerically singular,
/// and iterative refinement against the unshifted matrix.
struct SchurFactor<'m> {
    m: &'m [f64],
    n: usize,
    /// `1/√M_ii`.
    d: Vec<f64>,
    l: Vec<f64>,
}

impl<'m> SchurFactor<'m> {
    fn new(m: &'m [f64], n: usize) -> Option<Self> {
        let d: Vec<f64> = (0..n)
            .map(|i| {
                let v = m[i * n + i];
                (v > 0.0).then(|| 1.0 / v.sqrt())
            })
            .collect::<Option<_>>()?;
        let mut shift = 0.0;
        for _ in 0..8 {
            let mut l: Vec<f64> = (0..n * n).map(|k| m[k] * d[k / n] * d[k % n]).collect();
            for i in 0..n {
                l[i * n + i] += shift;
            }
            if real_cholesky(&mut l, n) {
                return Some(Self { m, n, d, l });
            }
            shift = if shift == 0.0 { 1e-14 } else { shift * 100.0 };
        }
        None
    }

    fn solve_scaled(&self, rhs: &[f64]) -> Vec<f64> {
        let r: Vec<f64> = rhs.iter().zip(&self.d).map(|(r, d)| r * d).collect();
        cholesky_solve(&self.l, self.n, &r)
            .into_iter()
            .zip(&self.d)
            .map(|(x, d)| x * d)
            .collect()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = self.solve_scaled(rhs);
        for _ in 0..REFINEMENT_STEPS {
            let r: Vec<f64> = (0..n)
                .map(|i| rhs[i] - (0..n).map(|j| self.m[i * n + j] * x[j]).sum::<f64>())
                .collect();
            for (xi, di) in x.iter_mut().zip(self.solve_scaled(&r)) {
                *xi += di;
            }
        }
        x
    }
}

fn sub_blocks(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

struct Certified {
    primal: f64,
    dual: f64,
    gap: f64,
    sigma_tilde: Vec<ComplexMatrix>,
    multipliers: Vec<ComplexMatrix>,
}

/// Largest `s ∈ [0, 1]` keeping `s·σ̃` primal feasible, by bisection.
fn feasible_scale(lay: &Layout, sigmas: &[ComplexMatrix]) -> Result<Option<f64>> {
    let p = lay.p;
    let slack = ROUNDING_SLACK * lay.scale;
    let feasible = |s: f64| -> Result<bool> {
        let scaled: Vec<ComplexMatrix> = sigmas.iter().map(|m| m.scale_real(s)).collect();
        for c in 0..lay.nc {
            if psd_min_eig(&p.slack(c, &scaled))? < -slack {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if feasible(1.0)? {
        return Ok(Some(1.0));
    }
    if !feasible(0.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Cheapest dual-feasible completion of the reduced multipliers: weight
/// `t` on the discarded face of each constraint, then a uniform rescaling
/// so that every `Σ D F ⪰ I`.
///
/// Feasibility is tested in whitened coordinates, in the eigenbasis of the
/// summed discarded projectors. There the weight `t` only enlarges diagonal
/// entries, and a Cholesky factorization of the diagonally scaled matrix
/// stays accurate for weights far beyond the norm-wise rounding limit.
fn complete_dual(lay: &Layout, x: &[ComplexMatrix]) -> Result<Option<(f64, Vec<ComplexMatrix>)>> {
    let p = lay.p;
    let d = p.dim();
    let base = (0..lay.nc)
        .map(|c| {
            let f = if x[c].dim() == 0 {
                x[c].clone()
            } else {
                psd_project(&x[c].hermitian_part())?
            };
            psd_project(&lay.cfaces[c].expand(&f))
        })
        .collect::<Result<Vec<_>>>()?;
    let complements: Vec<ComplexMatrix> =
        lay.cfaces.iter().map(Face::complement_projector).collect();
    let mut base_value = 0.0;
    let mut comp_value = 0.0;
    for c in 0..lay.nc {
        let member = lay.w.apply(p.constraint(c));
        base_value += re_trace_product(&member, &base[c]);
        comp_value += re_trace_product(&member, &complements[c]).abs();
    }

    struct Block {
        base: ComplexMatrix,
        weight: ComplexMatrix,
        q: Vec<f64>,
    }
    let mut blocks = Vec::with_capacity(lay.nl);
    for l in 0..lay.nl {
        let mut b = ComplexMatrix::zeros(d);
        let mut q = ComplexMatrix::zeros(d);
        for c in 0..lay.nc {
            if p.coefficient(c, l) == 1 {
                b += &base[c];
                q += &complements[c];
            }
        }
        let e = eig_hermitian(&q.hermitian_part())?;
        let basis = ComplexMatrix::from_fn(d, |i, j| e.eigenvectors[j][i]);
        let rotate = |m: &ComplexMatrix| (&(&basis.adjoint() * m) * &basis).hermitian_part();
        blocks.push(Block {
            base: rotate(&b),
            weight: rotate(lay.w.weight()),
            q: e.eigenvalues.iter().map(|v| v.max(0.0)).collect(),
        });
    }
    // Smallest `κ` with `κ(B + t·diag(q)) ⪰ R`, or `None` if no `κ` works.
    let kappa = |blk: &Block, t: f64| -> Result<Option<f64>> {
        let mut n = blk.base.clone();
        for (i, qi) in blk.q.iter().enumerate() {
            n[(i, i)] += Complex64::new(t * qi, 0.0);
        }
        let mut scale = Vec::with_capacity(d);
        for i in 0..d {
            let v = n[(i, i)].re;
            if !(v > 0.0) {
                return Ok(None);
            }
            scale.push(1.0 / v.sqrt());
        }
        let scaled =
            |m: &ComplexMatrix| ComplexMatrix::from_fn(d, |i, j| m[(i, j)] * (scale[i] * scale[j]));
        let Some(chol) = cholesky(&scaled(&n)) else {
            return Ok(None);
        };
        let li = lower_inverse(&chol);
        let g = (&(&li * &scaled(&blk.weight)) * &li.adjoint()).hermitian_part();
        let top = eig_hermitian(&g)?.eigenvalues[d - 1];
        Ok((top.is_finite() && top > 0.0).then_some(top))
    };

    let reduced = lay.cfaces.iter().any(|f| !f.is_full());
    let weights: Vec<f64> = if reduced {
        core::iter::once(0.0)
            .chain((-8..=64).map(|k| 10f64.powf(0.25 * k as f64)))
            .collect()
    } else {
        vec![0.0]
    };
    let mut best: Option<(f64, f64, f64)> = None;
    for t in weights {
        let mut k: f64 = 0.0;
        let mut ok = true;
        for blk in &blocks {
            match kappa(blk, t)? {
                Some(v) => k = k.max(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let k = k * (1.0 + 1e-12);
        let value = k * (base_value + t * comp_value);
        if best.is_none_or(|(v, _, _)| value < v) {
            best = Some((value, t, k));
        }
    }
    let Some((_, t, k)) = best else {
        return Ok(None);
    };
    let f: Vec<ComplexMatrix> = base
        .iter()
        .zip(&complements)
        .map(|(b, q)| {
            let mut m = b.clone();
            m.axpy(t, q);
            lay.w.apply(&m).scale_real(k)
        })
        .collect();
    Ok(Some((p.dual_objective(&f), f)))
}

/// Rounds an interior-point iterate to a feasible primal-dual pair of the
/// original problem.
fn certify(lay: &Layout, y: &[f64], x: &[ComplexMatrix]) -> Result<Option<Certified>> {
    let clipped = (0..lay.nl)
        .map(|l| {
            let s = lay.sigma_hat(y, l);
            let s = if s.dim() == 0 { s } else { psd_project(&s)? };
            let s = lay.vfaces[l].expand(&s);
            psd_project(&lay.w.unapply(&s))
        })
        .collect::<Result<Vec<_>>>()?;
    let Some(s) = feasible_scale(lay, &clipped)? else {
        return Ok(None);
    };
    let sigma_tilde: Vec<ComplexMatrix> = clipped.iter().map(|m| m.scale_real(s)).collect();
    let primal: f64 = sigma_tilde.iter().map(|m| m.trace().re).sum();
    let Some((dual, multipliers)) = complete_dual(lay, x)? else {
        return Ok(None);
    };
    Ok(Some(Certified {
        gap: (dual - primal).abs(),
        primal,
        dual,
        sigma_tilde,
        multipliers,
    }))
}

pub(super) fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    let lay = Layout::new(p)?;
    let m = lay.m;
    let nb = lay.n_blocks();
    let n_total: usize = (0..nb).map(|i| lay.block_dim(i)).sum();
    let n_total = n_total.max(1) as f64;
    let b = lay.objective();

    let mut y = vec![0.0; m];
    let mut x: Vec<ComplexMatrix> = (0..nb)
        .map(|i| ComplexMatrix::identity(lay.block_dim(i)))
        .collect();
    let mut z = x.clone();
    let c_blocks = lay.c_blocks();

    let mut history = Vec::new();
    let mut best: Option<Certified> = None;
    let mut iterations = 0;
    let mut broke_down = false;

    while iterations < max_iter {
        let comp = inner(&x, &z);
        history.push(comp);
        if comp <= tol {
            if let Some(cert) = certify(&lay, &y, &x)? {
                let done = cert.gap <= tol;
                if best.as_ref().is_none_or(|b| cert.gap < b.gap) {
                    best = Some(cert);
                }
                if done {
                    break;
                }
            }
        }
        iterations += 1;

        let Some(zinv) = z.iter().map(hpd_inverse).collect::<Option<Vec<_>>>() else {
            broke_down = true;
            break;
        };
        // R_d = C − Z − Aᵀy
        let aty = lay.adjoint_op(&y);
        let rd: Vec<ComplexMatrix> = (0..nb).map(|i| &(&c_blocks[i] - &z[i]) - &aty[i]).collect();
        let mu = comp / n_total;

        let schur = lay.schur(&x, &zinv);
        let Some(factor) = SchurFactor::new(&schur, m) else {
            broke_down = true;
            break;
        };
        let a_zinv = lay.op(&zinv);
        let ax = lay.op(&x);
        let xrz: Vec<ComplexMatrix> = (0..nb).map(|i| &(&x[i] * &rd[i]) * &zinv[i]).collect();
        let a_xrz = lay.op(&xrz);

        let direction = |sigma_mu: f64, corr: Option<&[ComplexMatrix]>| {
            let mut rhs: Vec<f64> = (0..m)
                .map(|i| b[i] - sigma_mu * a_zinv[i] + a_xrz[i])
                .collect();
            if let Some(corr) = corr {
                for (r, v) in rhs.iter_mut().zip(lay.op(corr)) {
                    *r += v;
                }
            }
            let step = |dy: &[f64]| {
                let dz = sub_blocks(&rd, &lay.adjoint_op(dy));
                let dx: Vec<ComplexMatrix> = (0..nb)
                    .map(|i| {
                        let mut t = zinv[i].scale_real(sigma_mu);
                        t -= &x[i];
                        t -= &(&(&x[i] * &dz[i]) * &zinv[i]);
                        if let Some(corr) = corr {
                            t -= &corr[i];
                        }
                        t.hermitian_part()
                    })
                    .collect::<Vec<_>>();
                (dx, dz)
            };
            let mut dy = factor.solve(&rhs);
            let (mut dx, mut dz) = step(&dy);
            // Refine against the step actually taken: A(X + ΔX) = b.
            for _ in 0..REFINEMENT_STEPS {
                let res: Vec<f64> = lay
                    .op(&dx)
                    .iter()
                    .zip(&ax)
                    .zip(&b)
                    .map(|((u, v), w)| w - v - u)
                    .collect();
                let delta = factor.solve(&res);
                for (d, e) in dy.iter_mut().zip(&delta) {
                    *d += e;
                }
                (dx, dz) = step(&dy);
            }
            (dy, dx, dz)
        };

        // predictor
        let (_, dxa, dza) = direction(0.0, None);
        let (Some(ap), Some(ad)) = (max_step(&x, &dxa), max_step(&z, &dza)) else {
            broke_down = true;
            break;
        };
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut comp_aff = 0.0;
        for i in 0..nb {
            let mut xa = x[i].clone();
            xa.axpy(ap, &dxa[i]);
            let mut za = z[i].clone();
            za.axpy(ad, &dza[i]);
            comp_aff += re_trace_product(&xa, &za);
        }
        let sigma = (comp_aff / comp).clamp(0.0, 1.0).powi(3);

        // corrector
        let corr: Vec<ComplexMatrix> = (0..nb).map(|i| &(&dxa[i] * &dza[i]) * &zinv[i]).collect();
        let (dy, dx, dz) = direction(sigma * mu, Some(&corr));
        let (Some(ap), Some(ad)) = (max_step(&x, &dx), max_step(&z, &dz)) else {
            broke_down = true;
            break;
        };
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);
        for i in 0..nb {
            x[i].axpy(ap, &dx[i]);
            z[i].axpy(ad, &dz[i]);
        }
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += ad * di;
        }
    }

    if best.as_ref().is_none_or(|b| b.gap > tol) {
        if let Some(cert) = certify(&lay, &y, &x)? {
            if best.as_ref().is_none_or(|b| cert.gap < b.gap) {
                best = Some(cert);
            }
        }
    }
    let Some(best) = best else {
        return Err(Error::NumericalBreakdown(alloc::format!(
            "no certified point after {iterations} iterations"
        )));
    };
    let status = if best.gap <= tol {
        SolveStatus::Optimal
    } else if broke_down {
        return Err(Error::NumericalBreakdown(alloc::format!(
            "interior-point iteration broke down with certified gap {:.3e}",
            best.gap
        )));
    } else {
        SolveStatus::MaxIter
    };
    Ok(SdpSolution {
        mu_star: best.primal,
        sigma_tilde: best.sigma_tilde,
        multipliers: best.multipliers,
        dual_value: best.dual,
        gap: best.gap,
        iterations,
        status,
        gap_history: history,
    })
}
