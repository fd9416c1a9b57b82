//! Qubit channels used as time evolutions of an assemblage.
//!
//! Three physical models plus arbitrary Kraus maps:
//!
//! * [`ChannelSpec::RabiDecay`]: `H = g₁(σ₊ + σ₋)` with Lindblad decay `σ₋`
//!   at rate `γ₁`. The basis is `{|+⟩, |−⟩}` written in computational
//!   coordinates, `σ₊ = |+⟩⟨−|`, so `H = g₁Z` and the decay drives `|+⟩` to
//!   `|−⟩`.
//! * [`ChannelSpec::Exchange`]: the system is coupled to an environment qubit
//!   prepared in `|e⟩` through `H = J(σ₊⊗σ₋ + σ₋⊗σ₊)`; the system also decays
//!   at rate `γ₂`. Here `|e⟩ = |0⟩`, `|g⟩ = |1⟩` and the system is the first
//!   tensor factor.
//! * [`ChannelSpec::LorentzianAD`]: exact amplitude damping with amplitude
//!   [`lorentzian_g`].
//! * [`ChannelSpec::Kraus`]: `ρ ↦ Σ K ρ K†`, independent of `t`.
//!
//! Lindblad models are integrated with fixed-step RK4 on the vectorized
//! master equation; [`Propagator::transfer_exact`] gives the
//! eigendecomposition result for cross-checks.

mod liouville;
mod lorentzian;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermat::{kron, ComplexMatrix};
use crate::random::{random_isometry, rng_from_seed};
use crate::steering::Assemblage;

pub use liouville::{unvec, vec_of, Liouvillian, LiouvillianEigen, RK4_STEP_SCALE};
pub use lorentzian::{
    lorentzian_apply, lorentzian_first_zero, lorentzian_g, lorentzian_g_dot, lorentzian_gamma,
};

/// Tolerance on `Σ K†K = I`.
pub const KRAUS_COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    RabiDecay { g1: f64, gamma1: f64 },
    Exchange { j: f64, gamma2: f64 },
    LorentzianAD { g: f64, omega_w: f64 },
    Kraus { operators: Vec<ComplexMatrix> },
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParameter(alloc::format!(
            "{name} must be a finite non-negative rate, got {v}"
        )))
    }
}

impl ChannelSpec {
    /// The identity channel as a single Kraus operator.
    pub fn identity(dim: usize) -> Self {
        ChannelSpec::Kraus {
            operators: alloc::vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelSpec::RabiDecay { g1, gamma1 } => {
                check_rate("g1", *g1)?;
                check_rate("gamma1", *gamma1)
            }
            ChannelSpec::Exchange { j, gamma2 } => {
                check_rate("J", *j)?;
                check_rate("gamma2", *gamma2)
            }
            ChannelSpec::LorentzianAD { g, omega_w } => {
                check_rate("g", *g)?;
                check_rate("omega_w", *omega_w)?;
                if *omega_w == 0.0 {
                    return Err(Error::BadParameter("omega_w must be positive".into()));
                }
                Ok(())
            }
            ChannelSpec::Kraus { operators } => {
                let first = operators.first().ok_or(Error::EmptySet)?;
                let d = first.dim();
                let mut sum = ComplexMatrix::zeros(d);
                for k in operators {
                    if k.dim() != d {
                        return Err(Error::DimensionMismatch(alloc::format!(
                            "Kraus operators of dimension {} and {}",
                            d,
                            k.dim()
                        )));
                    }
                    sum += &(&k.adjoint() * k);
                }
                let defect = sum.distance(&ComplexMatrix::identity(d));
                if defect > KRAUS_COMPLETENESS_TOL {
                    return Err(Error::BadParameter(alloc::format!(
                        "Kraus completeness residual {defect:.3e}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Dimension of the system the channel acts on.
    pub fn dim(&self) -> usize {
        match self {
            ChannelSpec::Kraus { operators } => operators.first().map_or(0, ComplexMatrix::dim),
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// Lindblad evolution of `dim_sys · dim_env` levels; the environment,
    /// when present, starts in `|0⟩⟨0|` and is traced out.
    Lindblad {
        liouvillian: Liouvillian,
        env_dim: usize,
    },
    Lorentzian {
        g: f64,
        omega_w: f64,
    },
    Kraus(Vec<ComplexMatrix>),
}

/// A validated channel ready to be evaluated at arbitrary times.
#[derive(Debug, Clone)]
pub struct Propagator {
    spec: ChannelSpec,
    kind: Kind,
}

fn qubit_ops() -> (ComplexMatrix, ComplexMatrix) {
    // σ₊ = |0⟩⟨1|, σ₋ = |1⟩⟨0|
    let one = Complex64::new(1.0, 0.0);
    let mut plus = ComplexMatrix::zeros(2);
    plus[(0, 1)] = one;
    (plus.clone(), plus.adjoint())
}

impl Propagator {
    pub fn new(spec: ChannelSpec) -> Result<Self> {
        spec.validate()?;
        let kind = match &spec {
            ChannelSpec::RabiDecay { g1, gamma1 } => {
                let (sp, sm) = qubit_ops();
                let h = (&sp + &sm).scale_real(*g1);
                // in computational coordinates |+⟩ ↦ |0⟩, so σ₊ + σ₋ = Z
                let h = rabi_frame(&h);
                let jump = rabi_frame(&sm);
                Kind::Lindblad {
                    liouvillian: Liouvillian::new(&h, &[(*gamma1, jump)]),
                    env_dim: 1,
                }
            }
            ChannelSpec::Exchange { j, gamma2 } => {
                let (sp, sm) = qubit_ops();
                let h = (&kron(&sp, &sm) + &kron(&sm, &sp)).scale_real(*j);
                let jump = kron(&sm, &ComplexMatrix::identity(2));
                Kind::Lindblad {
                    liouvillian: Liouvillian::new(&h, &[(*gamma2, jump)]),
                    env_dim: 2,
                }
            }
            ChannelSpec::LorentzianAD { g, omega_w } => Kind::Lorentzian {
                g: *g,
                omega_w: *omega_w,
            },
            ChannelSpec::Kraus { operators } => Kind::Kraus(operators.clone()),
        };
        Ok(Self { spec, kind })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Transfer matrix of the system map at time `t` on row-major `vec(ρ)`,
    /// with the default RK4 step for Lindblad models.
    pub fn transfer(&self, t: f64) -> Result<ComplexMatrix> {
        self.transfer_impl(t, None)
    }

    /// As [`transfer`](Self::transfer) with an explicit number of RK4 steps.
    pub fn transfer_with_steps(&self, t: f64, steps: usize) -> Result<ComplexMatrix> {
        self.transfer_impl(t, Some(steps))
    }

    /// Transfer matrix from the Liouvillian eigendecomposition
    /// `V e^{Λt} V⁻¹`; other variants are already exact.
    pub fn transfer_exact(&self, t: f64) -> Result<ComplexMatrix> {
        check_time(t)?;
        match &self.kind {
            Kind::Lindblad {
                liouvillian,
                env_dim,
            } => {
                let full = liouvillian.eigen()?.propagator(t);
                Ok(reduce_transfer(
                    &full,
                    liouvillian.hilbert_dim() / env_dim,
                    *env_dim,
                ))
            }
            _ => self.transfer(t),
        }
    }

    fn transfer_impl(&self, t: f64, steps: Option<usize>) -> Result<ComplexMatrix> {
        check_time(t)?;
        Ok(match &self.kind {
            Kind::Lindblad {
                liouvillian,
                env_dim,
            } => {
                let steps = steps.unwrap_or_else(|| liouvillian.default_steps(t));
                let full = liouvillian.rk4_propagator(t, steps);
                reduce_transfer(&full, liouvillian.hilbert_dim() / env_dim, *env_dim)
            }
            Kind::Lorentzian { g, omega_w } => {
                lorentzian::damping_transfer(lorentzian_g(*g, *omega_w, t)?)
            }
            Kind::Kraus(ops) => ops
                .iter()
                .map(|k| kron(k, &k.conj()))
                .reduce(|a, b| &a + &b)
                .expect("validated Kraus set is non-empty"),
        })
    }

    /// `Λ_t(ρ)`. `ρ` need not be normalized or positive; the map is linear.
    pub fn apply(&self, t: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let tm = self.transfer(t)?;
        apply_transfer(&tm, rho)
    }

    /// Normalized Choi state `(id ⊗ Λ_t)(|Φ⁺⟩⟨Φ⁺|)`, ancilla first.
    pub fn choi(&self, t: f64) -> Result<ComplexMatrix> {
        Ok(choi_of_transfer(&self.transfer(t)?, self.dim()))
    }

    /// Evolves every member of `asm` to time `t`.
    pub fn propagate_assemblage(&self, t: f64, asm: &Assemblage) -> Result<Assemblage> {
        let tm = self.transfer(t)?;
        let mut out = asm.map_members(|m| Ok(apply_transfer(&tm, m)?.hermitian_part()))?;
        out.time_tag = t;
        Ok(out)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// Change of frame taking the `{|+⟩, |−⟩}` basis to `{|0⟩, |1⟩}`:
/// `M ↦ H M H` with `H` the Hadamard matrix.
fn rabi_frame(m: &ComplexMatrix) -> ComplexMatrix {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let had = ComplexMatrix::from_fn(2, |i, j| {
        Complex64::new(if i == 1 && j == 1 { -s } else { s }, 0.0)
    });
    &(&had * m) * &had
}

/// Applies a row-major transfer matrix to an operator.
pub fn apply_transfer(tm: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = rho.dim();
    if tm.dim() != d * d {
        return Err(Error::BadDimension(alloc::format!(
            "channel on dimension {} applied to a {d}x{d} operator",
            (tm.dim() as f64).sqrt() as usize
        )));
    }
    Ok(unvec(&tm.mul_vec(&vec_of(rho)), d))
}

/// Choi state of a transfer matrix: `(1/d) Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
pub fn choi_of_transfer(tm: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d * d);
    let w = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            let col = i * d + j;
            for k in 0..d {
                for l in 0..d {
                    out[(i * d + k, j * d + l)] = tm[(k * d + l, col)] * w;
                }
            }
        }
    }
    out
}

/// Restricts a `(ds·de)²` propagator to the system: the environment starts in
/// `|0⟩⟨0|` and is traced out at the end.
fn reduce_transfer(full: &ComplexMatrix, ds: usize, de: usize) -> ComplexMatrix {
    if de == 1 {
        return full.clone();
    }
    let n = ds * de;
    ComplexMatrix::from_fn(ds * ds, |row, col| {
        let (i, j) = (row / ds, row % ds);
        let (k, l) = (col / ds, col % ds);
        let gcol = (k * de) * n + l * de;
        (0..de)
            .map(|e| full[((i * de + e) * n + j * de + e, gcol)])
            .sum()
    })
}

pub fn rabi_decay_apply(
    g1: f64,
    gamma1: f64,
    t: f64,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    Propagator::new(ChannelSpec::RabiDecay { g1, gamma1 })?.apply(t, rho)
}

pub fn exchange_apply(j: f64, gamma2: f64, t: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    Propagator::new(ChannelSpec::Exchange { j, gamma2 })?.apply(t, rho)
}

/// Random qubit channel with `n_kraus` operators cut from a seeded random
/// `2n × 2` isometry.
pub fn random_kraus_channel(seed: u64, n_kraus: usize) -> Result<ChannelSpec> {
    if n_kraus == 0 {
        return Err(Error::OutOfRange(
            "at least one Kraus operator is required".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let cols = random_isometry(&mut rng, 2 * n_kraus, 2);
    let operators = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(2, |i, j| cols[j][2 * k + i]))
        .collect();
    Ok(ChannelSpec::Kraus { operators })
}

pub fn propagate_assemblage(ch: &ChannelSpec, t: f64, asm: &Assemblage) -> Result<Assemblage> {
    Propagator::new(ch.clone())?.propagate_assemblage(t, asm)
}
