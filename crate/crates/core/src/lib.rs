//! Temporal steerable weight of qubit channels.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! - [`hermat`]: small dense complex matrices, Hermitian eigendecomposition,
//!   Kronecker products, partial traces and PSD projections.
//! - [`steering`]: measurement sets, assemblages, deterministic strategy
//!   tables and hidden-state (unsteerable) assemblages.
//! - [`channels`]: the qubit evolutions used to generate time-dependent
//!   assemblages (Rabi oscillation with decay, exchange coupling to an
//!   environment qubit, Lorentzian amplitude damping, Kraus maps).
//! - [`sdp`]: the steerable-weight semidefinite program and a primal-dual
//!   interior-point solver with dual certificates.
//! - [`measures`]: TSW evaluation, time traces, the integrated
//!   non-Markovianity measures and the concurrence witness.

#![no_std]
// NaN must fail positivity checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod channels;
pub mod error;
pub mod hermat;
pub mod measures;
pub mod random;
pub mod sdp;
pub mod steering;

pub use error::{Error, Result};
pub use hermat::{ComplexMatrix, EigenDecomposition};
pub use num_complex::Complex64;
