//! The verification suite: seeded invariant checks grouped by module, each
//! reporting how many checks ran, how many failed, and the worst margin
//! (tolerance minus observed error; negative means failure).

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use tsw_core::channels::{random_kraus_channel, ChannelSpec, Propagator};
use tsw_core::hermat::{
    eig_hermitian, kron, partial_trace, pauli_x, pauli_y, pauli_z, psd_min_eig, psd_project,
    Subsystem,
};
use tsw_core::measures::{concurrence, n_abs, n_tsw, nc_trace, tsw, tsw_trace};
use tsw_core::random::{
    random_assemblage, random_density_matrix, random_hermitian, rng_from_seed, FixtureRng,
};
use tsw_core::sdp::{
    build_sw_sdp, check_dual_point, dual_certificate, solve, SdpProblem, SolveStatus,
};
use tsw_core::sdp::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use tsw_core::steering::{
    depolarized_assemblage, lhs_assemblage, pauli_measurement_set, premeasure, strategy_table,
    validate, Assemblage, MeasurementSet, Pauli,
};
use tsw_core::{Complex64, ComplexMatrix};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::run::thread_pool;

pub const GROUPS: [&str; 7] = [
    "hermat",
    "steering",
    "channels",
    "sdp",
    "sdp-oracle",
    "monotonicity",
    "measures",
];

/// Assemblages in the bracketing group.
pub const ORACLE_ASSEMBLAGES: usize = 50;
/// Allowed shortfall of the solver below the oracle's best feasible value.
pub const ORACLE_SLACK: f64 = 1e-5;
/// Allowed excess of the solver over its own re-checked dual value.
pub const DUAL_SLACK: f64 = 1e-7;
/// Allowed TSW increase under a channel.
pub const MONOTONICITY_TOL: f64 = 1e-6;
/// Assemblages per channel in the monotonicity battery.
pub const ASSEMBLAGES_PER_CHANNEL: usize = 10;

const ORACLE_ITERS: usize = 600;
const ORACLE_FINAL_PENALTY: f64 = 1e6;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    pub worst_margin: f64,
    /// Up to five failure descriptions.
    pub failed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl GroupReport {
    fn new(name: &str) -> Self {
        GroupReport {
            name: name.to_string(),
            checks: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
            failed: Vec::new(),
            note: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }

    /// Records `tol − error`; NaN counts as a failure.
    fn check(&mut self, what: impl FnOnce() -> String, tol: f64, error: f64) {
        let margin = tol - error;
        self.checks += 1;
        if margin.is_nan() || margin < self.worst_margin {
            self.worst_margin = if margin.is_nan() {
                f64::NEG_INFINITY
            } else {
                margin
            };
        }
        if !(margin >= 0.0) {
            self.failures += 1;
            if self.failed.len() < 5 {
                self.failed
                    .push(format!("{}: error {error:.3e} > {tol:.1e}", what()));
            }
        }
    }

    fn check_ok<T>(&mut self, what: impl FnOnce() -> String, r: tsw_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures += 1;
                self.worst_margin = f64::NEG_INFINITY;
                if self.failed.len() < 5 {
                    self.failed.push(format!("{}: {e}", what()));
                }
                None
            }
        }
    }

    fn absorb(&mut self, other: GroupReport) {
        self.checks += other.checks;
        self.failures += other.failures;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        for f in other.failed {
            if self.failed.len() < 5 {
                self.failed.push(f);
            }
        }
    }
}

fn xyz() -> MeasurementSet {
    pauli_measurement_set(&[Pauli::X, Pauli::Y, Pauli::Z]).expect("Pauli set")
}

fn mixed() -> ComplexMatrix {
    ComplexMatrix::identity(2).scale_real(0.5)
}

/// Largest violation magnitude reported by `validate` with zero tolerance.
fn assemblage_defect(asm: &Assemblage) -> f64 {
    validate(asm, 0.0)
        .iter()
        .map(|v| v.magnitude)
        .fold(0.0, f64::max)
}

fn hermat_group(seed: u64) -> GroupReport {
    let mut r = GroupReport::new("hermat");
    let mut rng = rng_from_seed(seed);
    for k in 0..100 {
        let dim = 2 + k % 7;
        let h = random_hermitian(&mut rng, dim);
        let scale = h.max_abs().max(1.0);
        let Some(e) = r.check_ok(|| format!("eig of {dim}x{dim}"), eig_hermitian(&h)) else {
            continue;
        };
        r.check(
            || format!("reconstruction {dim}x{dim}"),
            1e-10,
            e.reconstruct().distance(&h) / scale,
        );
        let mut ortho = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let ip: Complex64 = e.eigenvectors[i]
                    .iter()
                    .zip(&e.eigenvectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((ip - want).norm());
            }
        }
        r.check(|| format!("orthonormality {dim}x{dim}"), 1e-10, ortho);
        r.check(
            || format!("ascending eigenvalues {dim}x{dim}"),
            0.0,
            e.eigenvalues
                .windows(2)
                .map(|w| w[0] - w[1])
                .fold(0.0, f64::max),
        );

        if let Some(p) = r.check_ok(|| "psd_project".into(), psd_project(&h)) {
            if let Some(min) = r.check_ok(|| "psd_min_eig".into(), psd_min_eig(&p)) {
                r.check(
                    || format!("projection is PSD {dim}x{dim}"),
                    1e-12 * scale,
                    -min,
                );
            }
            if let Some(pp) = r.check_ok(|| "psd_project".into(), psd_project(&p)) {
                r.check(
                    || format!("projection is idempotent {dim}x{dim}"),
                    1e-10 * scale,
                    pp.distance(&p),
                );
            }
        }
    }
    for _ in 0..50 {
        let a = random_density_matrix(&mut rng, 2);
        let b = random_density_matrix(&mut rng, 2);
        let ab = kron(&a, &b);
        if let Some(tb) = r.check_ok(
            || "partial trace".into(),
            partial_trace(&ab, Subsystem::Second),
        ) {
            r.check(|| "Tr_A(a⊗b) = b".into(), 1e-12, tb.distance(&b));
        }
        if let Some(ta) = r.check_ok(
            || "partial trace".into(),
            partial_trace(&ab, Subsystem::First),
        ) {
            r.check(|| "Tr_B(a⊗b) = a".into(), 1e-12, ta.distance(&a));
        }
    }
    r
}

/// `σ̃_λ = (I + Σ_x s_x P_x/√3)/16` for the eight sign patterns of the
/// outcomes assigned by strategy `λ`.
pub fn bloch_corner_states() -> Vec<ComplexMatrix> {
    let table = strategy_table(3).expect("three settings");
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let r = 1.0 / 3f64.sqrt();
    (0..table.n_rows())
        .map(|l| {
            let mut m = ComplexMatrix::identity(2);
            for (x, a) in table.row(l).into_iter().enumerate() {
                m.axpy(r * f64::from(a.value()), &paulis[x]);
            }
            m.scale_real(1.0 / 16.0)
        })
        .collect()
}

fn steering_group(seed: u64) -> GroupReport {
    let mut r = GroupReport::new("steering");
    let ms = xyz();
    let mut rng = rng_from_seed(seed.wrapping_add(1));
    if let Some(asm) = r.check_ok(|| "premeasure(I/2)".into(), premeasure(&mixed(), &ms)) {
        r.check(
            || "premeasure(I/2) is valid".into(),
            1e-12,
            assemblage_defect(&asm),
        );
    }
    for k in 0..50 {
        let asm = random_assemblage(&mut rng, &ms);
        r.check(
            || format!("random assemblage {k} is valid"),
            1e-9,
            assemblage_defect(&asm),
        );

        let rho = random_density_matrix(&mut rng, 2);
        if let Some(pre) = r.check_ok(|| "premeasure".into(), premeasure(&rho, &ms)) {
            let psd = pre
                .members()
                .iter()
                .flatten()
                .map(|m| psd_min_eig(m).map_or(f64::INFINITY, |e| -e))
                .fold(0.0, f64::max);
            r.check(|| format!("premeasure {k} members are PSD"), 1e-12, psd);
            let tr = (0..pre.n_meas())
                .map(|x| (pre.marginal(x).trace().re - 1.0).abs())
                .fold(0.0, f64::max);
            r.check(|| format!("premeasure {k} has unit trace"), 1e-12, tr);
        }

        let table = strategy_table(3).expect("three settings");
        let sigmas: Vec<ComplexMatrix> = (0..table.n_rows())
            .map(|_| random_density_matrix(&mut rng, 2).scale_real(rng.random::<f64>()))
            .collect();
        let total: f64 = sigmas.iter().map(|s| s.trace().re).sum();
        let sigmas: Vec<ComplexMatrix> = sigmas.iter().map(|s| s.scale_real(1.0 / total)).collect();
        if let Some(lhs) = r.check_ok(
            || "lhs_assemblage".into(),
            lhs_assemblage(&table, &sigmas, ms.labels()),
        ) {
            r.check(
                || format!("hidden-state assemblage {k} is valid"),
                1e-12,
                assemblage_defect(&lhs),
            );
        }
    }
    let table = strategy_table(3).expect("three settings");
    let corner = lhs_assemblage(&table, &bloch_corner_states(), ms.labels());
    let depol = depolarized_assemblage(1.0 / 3f64.sqrt(), &ms);
    if let (Some(c), Some(d)) = (
        r.check_ok(|| "Bloch corner assemblage".into(), corner),
        r.check_ok(|| "depolarized assemblage".into(), depol),
    ) {
        let dist = c
            .members()
            .iter()
            .flatten()
            .zip(d.members().iter().flatten())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max);
        r.check(|| "Bloch corners reproduce v = 1/√3".into(), 1e-12, dist);
    }
    r
}

fn channel_checks(r: &mut GroupReport, ch: &ChannelSpec, times: &[f64], rng: &mut FixtureRng) {
    let Some(prop) = r.check_ok(|| format!("{ch:?}"), Propagator::new(ch.clone())) else {
        return;
    };
    for &t in times {
        if let Some(choi) = r.check_ok(|| format!("Choi of {ch:?} at {t}"), prop.choi(t)) {
            if let Some(min) =
                r.check_ok(|| "psd_min_eig".into(), psd_min_eig(&choi.hermitian_part()))
            {
                r.check(|| format!("{ch:?} is CP at t = {t}"), 1e-9, -min);
            }
        }
        let rho = random_density_matrix(rng, prop.dim());
        if let Some(out) = r.check_ok(|| format!("{ch:?} at {t}"), prop.apply(t, &rho)) {
            r.check(
                || format!("{ch:?} preserves trace at t = {t}"),
                1e-9,
                (out.trace() - Complex64::new(1.0, 0.0)).norm(),
            );
        }
    }
}

fn channels_group(seed: u64) -> GroupReport {
    let mut r = GroupReport::new("channels");
    let mut rng = rng_from_seed(seed.wrapping_add(2));
    for k in 0..50u64 {
        let spec = random_kraus_channel(
            seed.wrapping_mul(1000).wrapping_add(k),
            1 + (k as usize % 4),
        );
        if let Some(ch) = r.check_ok(|| format!("random Kraus channel {k}"), spec) {
            r.check_ok(|| format!("Kraus completeness {k}"), ch.validate());
            channel_checks(&mut r, &ch, &[0.0], &mut rng);
        }
    }
    let times: Vec<f64> = (0..10).map(|i| 0.7 * i as f64).collect();
    let models = [
        ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 0.0,
        },
        ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 0.5,
        },
        ChannelSpec::Exchange {
            j: 1.0,
            gamma2: 0.0,
        },
        ChannelSpec::Exchange {
            j: 1.0,
            gamma2: 0.1,
        },
        ChannelSpec::LorentzianAD {
            g: 0.3,
            omega_w: 1.0,
        },
        ChannelSpec::LorentzianAD {
            g: 2.0,
            omega_w: 1.0,
        },
    ];
    for ch in &models {
        channel_checks(&mut r, ch, &times, &mut rng);
        if matches!(ch, ChannelSpec::LorentzianAD { .. }) {
            continue;
        }
        let Ok(prop) = Propagator::new(ch.clone()) else {
            continue;
        };
        for &t in &times {
            let pair = prop
                .transfer(t)
                .and_then(|a| Ok((a, prop.transfer_exact(t)?)));
            if let Some((rk4, exact)) = r.check_ok(|| format!("{ch:?} propagators at {t}"), pair) {
                r.check(
                    || format!("{ch:?} RK4 vs eigendecomposition at t = {t}"),
                    1e-8,
                    (&rk4 - &exact).max_abs(),
                );
            }
        }
    }
    r
}

fn sdp_group(seed: u64) -> GroupReport {
    let ms = xyz();
    let mut rng = rng_from_seed(seed.wrapping_add(3));
    let mut cases: Vec<(String, Assemblage)> = (0..30)
        .map(|k| {
            (
                format!("random assemblage {k}"),
                random_assemblage(&mut rng, &ms),
            )
        })
        .collect();
    cases.push((
        "premeasure(I/2)".into(),
        premeasure(&mixed(), &ms).expect("valid state"),
    ));
    for v in [0.0, 0.5, 0.7, 1.0] {
        cases.push((
            format!("depolarized v = {v}"),
            depolarized_assemblage(v, &ms).expect("v in range"),
        ));
    }
    let parts: Vec<GroupReport> = cases
        .par_iter()
        .map(|(name, asm)| {
            let mut r = GroupReport::new("sdp");
            let Some(p) = r.check_ok(
                || name.clone(),
                build_sw_sdp(asm, &strategy_table(3).expect("three settings")),
            ) else {
                return r;
            };
            let Some(sol) = r.check_ok(|| name.clone(), solve(&p, DEFAULT_TOL, DEFAULT_MAX_ITER))
            else {
                return r;
            };
            r.check(
                || format!("{name} status {:?}", sol.status),
                0.0,
                if sol.status == SolveStatus::Optimal {
                    0.0
                } else {
                    1.0
                },
            );
            r.check(|| format!("{name} duality gap"), 1e-7, sol.gap);
            if sol.status == SolveStatus::Optimal {
                if let Some(cert) =
                    r.check_ok(|| format!("{name} certificate"), dual_certificate(&sol, &p))
                {
                    r.check(
                        || format!("{name} certificate gap"),
                        1e-7,
                        (cert.dual_value - cert.primal_value).abs(),
                    );
                }
            }
            r
        })
        .collect();
    let mut r = GroupReport::new("sdp");
    for p in parts {
        r.absorb(p);
    }
    r
}

/// `m − P(m)`: the negative spectral part of a Hermitian matrix.
fn negative_part(m: &ComplexMatrix) -> tsw_core::Result<ComplexMatrix> {
    Ok(m - &psd_project(m)?)
}

fn primal_feasible(p: &SdpProblem, sigmas: &[ComplexMatrix]) -> tsw_core::Result<bool> {
    for c in 0..p.n_constraints() {
        if psd_min_eig(&p.slack(c, sigmas))? < 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Best feasible primal value found by random-restart projected gradient
/// ascent on a quadratic penalty of the constraint violations.
///
/// Each restart starts from random PSD blocks, takes gradient steps on
/// `Σ Tr σ̃_λ − ρ Σ ‖(slack)₋‖²` followed by a projection onto the PSD cone
/// while `ρ` grows geometrically, and finally shrinks all blocks by a
/// common factor, found by bisection, until every constraint holds. The
/// returned value is therefore a lower bound on the optimum that shares no
/// code with the interior-point solver.
pub fn oracle_lower_bound(p: &SdpProblem, seed: u64, restarts: usize) -> tsw_core::Result<f64> {
    let mut rng = rng_from_seed(seed);
    let dim = p.dim();
    let n_l = p.n_lambda();
    let budget: f64 = (0..p.n_constraints())
        .step_by(2)
        .map(|c| p.constraint(c).trace().re + p.constraint(c + 1).trace().re)
        .fold(f64::INFINITY, f64::min);
    let lipschitz = (p.n_meas() * n_l) as f64;
    let growth = ORACLE_FINAL_PENALTY.powf(1.0 / ORACLE_ITERS as f64);
    let id = ComplexMatrix::identity(dim);

    let mut best = 0.0f64;
    for _ in 0..restarts {
        let mut sigmas: Vec<ComplexMatrix> = (0..n_l)
            .map(|_| {
                let w = 2.0 * rng.random::<f64>() * budget / n_l as f64;
                random_density_matrix(&mut rng, dim).scale_real(w)
            })
            .collect();
        let mut penalty = 1.0;
        // Nesterov extrapolation point
        let mut ahead = sigmas.clone();
        for k in 0..ORACLE_ITERS {
            let negs = (0..p.n_constraints())
                .map(|c| negative_part(&p.slack(c, &ahead)))
                .collect::<tsw_core::Result<Vec<_>>>()?;
            let step = 1.0 / (penalty * lipschitz);
            let momentum = k as f64 / (k as f64 + 3.0);
            for (l, (s, y)) in sigmas.iter_mut().zip(ahead.iter_mut()).enumerate() {
                let mut grad = id.clone();
                for (c, n) in negs.iter().enumerate() {
                    if p.coefficient(c, l) == 1 {
                        grad.axpy(2.0 * penalty, n);
                    }
                }
                let mut next = y.clone();
                next.axpy(step, &grad);
                let next = psd_project(&next)?;
                let mut extrapolated = next.scale_real(1.0 + momentum);
                extrapolated.axpy(-momentum, s);
                *y = extrapolated;
                *s = next;
            }
            penalty *= growth;
        }

        let scaled = |f: f64| sigmas.iter().map(|s| s.scale_real(f)).collect::<Vec<_>>();
        let (mut lo, mut hi) = (0.0, 1.0);
        if primal_feasible(p, &sigmas)? {
            lo = 1.0;
        } else {
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if primal_feasible(p, &scaled(mid))? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        let value: f64 = scaled(lo).iter().map(|s| s.trace().re).sum();
        best = best.max(value);
    }
    Ok(best)
}

/// Outcome of bracketing one solve between the oracle and its own dual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub mu_star: f64,
    pub oracle: f64,
    /// `Σ Tr(σ F)` recomputed from the returned multipliers.
    pub dual: f64,
}

impl Bracket {
    pub fn holds(&self) -> bool {
        self.mu_star >= self.oracle - ORACLE_SLACK && self.mu_star <= self.dual + DUAL_SLACK
    }
}

pub fn bracket(asm: &Assemblage, seed: u64, restarts: usize) -> tsw_core::Result<Bracket> {
    let p = build_sw_sdp(asm, &strategy_table(asm.n_meas())?)?;
    let sol = solve(&p, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(Bracket {
        mu_star: sol.mu_star,
        oracle: oracle_lower_bound(&p, seed, restarts)?,
        dual: check_dual_point(&p, &sol.multipliers)?,
    })
}

/// The random assemblages used by the bracketing group.
pub fn oracle_assemblages(seed: u64) -> Vec<Assemblage> {
    let mut rng = rng_from_seed(seed.wrapping_add(4));
    let ms = xyz();
    (0..ORACLE_ASSEMBLAGES)
        .map(|_| random_assemblage(&mut rng, &ms))
        .collect()
}

fn oracle_group(seed: u64, restarts: usize) -> GroupReport {
    let cases = oracle_assemblages(seed);
    let results: Vec<tsw_core::Result<Bracket>> = cases
        .par_iter()
        .enumerate()
        .map(|(k, asm)| bracket(asm, seed.wrapping_add(k as u64), restarts))
        .collect();
    let mut r = GroupReport::new("sdp-oracle");
    let mut shortfall = Vec::new();
    for (k, b) in results.into_iter().enumerate() {
        if let Some(b) = r.check_ok(|| format!("assemblage {k}"), b) {
            r.check(
                || format!("assemblage {k} above oracle"),
                ORACLE_SLACK,
                b.oracle - b.mu_star,
            );
            r.check(
                || format!("assemblage {k} below dual"),
                DUAL_SLACK,
                b.mu_star - b.dual,
            );
            shortfall.push(b.mu_star - b.oracle);
        }
    }
    if !shortfall.is_empty() {
        let max = shortfall.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = shortfall.iter().sum::<f64>() / shortfall.len() as f64;
        r.note = Some(format!(
            "{restarts} restarts; solver exceeds oracle by mean {mean:.2e}, max {max:.2e}"
        ));
    }
    r
}

fn monotonicity_group(seed: u64, n_channels: usize) -> GroupReport {
    let ms = xyz();
    let mut rng = rng_from_seed(seed.wrapping_add(5));
    let asms: Vec<Assemblage> = (0..ASSEMBLAGES_PER_CHANNEL)
        .map(|_| random_assemblage(&mut rng, &ms))
        .collect();
    let base: Vec<tsw_core::Result<f64>> =
        asms.par_iter().map(|a| tsw(a).map(|r| r.value)).collect();
    let parts: Vec<GroupReport> = (0..n_channels as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = GroupReport::new("monotonicity");
            let spec = random_kraus_channel(
                seed.wrapping_mul(7919).wrapping_add(k),
                1 + (k as usize % 4),
            );
            let Some(ch) = r.check_ok(|| format!("channel {k}"), spec) else {
                return r;
            };
            for (i, asm) in asms.iter().enumerate() {
                let Ok(before) = &base[i] else { continue };
                let after = tsw_core::channels::propagate_assemblage(&ch, 0.0, asm)
                    .and_then(|a| tsw(&a))
                    .map(|t| t.value);
                if let Some(after) = r.check_ok(|| format!("channel {k} on assemblage {i}"), after)
                {
                    r.check(
                        || format!("channel {k} on assemblage {i}"),
                        MONOTONICITY_TOL,
                        after - before,
                    );
                }
            }
            r
        })
        .collect();
    let mut r = GroupReport::new("monotonicity");
    for (i, b) in base.into_iter().enumerate() {
        r.check_ok(|| format!("assemblage {i}"), b);
    }
    for p in parts {
        r.absorb(p);
    }
    r.note = Some(format!(
        "{n_channels} channels x {ASSEMBLAGES_PER_CHANNEL} assemblages"
    ));
    r
}

fn measures_group() -> GroupReport {
    let mut r = GroupReport::new("measures");
    let ms = xyz();
    let traces = [
        (
            ChannelSpec::RabiDecay {
                g1: 1.0,
                gamma1: 1.0,
            },
            8.0,
        ),
        (
            ChannelSpec::Exchange {
                j: 1.0,
                gamma2: 0.0,
            },
            PI,
        ),
        (
            ChannelSpec::Exchange {
                j: 1.0,
                gamma2: 0.1,
            },
            2.0 * PI,
        ),
        (
            ChannelSpec::LorentzianAD {
                g: 2.0,
                omega_w: 1.0,
            },
            20.0,
        ),
    ];
    let series: Vec<_> = traces
        .par_iter()
        .map(|(ch, t_max)| tsw_trace(ch, &ms, &mixed(), *t_max, 41))
        .collect();
    for ((ch, _), s) in traces.iter().zip(series) {
        let Some(s) = r.check_ok(|| format!("trace of {ch:?}"), s) else {
            continue;
        };
        r.check_ok(|| format!("trace of {ch:?} is well formed"), s.validate());
        let (a, b) = (n_abs(&s, 1e-6).value, n_tsw(&s, 1e-6).value);
        r.check(
            || format!("n_abs = 2 n_tsw for {ch:?}"),
            1e-9,
            (a - 2.0 * b).abs(),
        );
        if let ChannelSpec::RabiDecay { .. } = ch {
            r.check(|| "damped Rabi has no backflow".into(), 1e-4, b);
        }
        if let ChannelSpec::Exchange { gamma2, .. } = ch {
            if *gamma2 == 0.0 {
                r.check(|| "exchange TSW vanishes at π/2".into(), 1e-3, s.values[20]);
                r.check(
                    || "exchange TSW revives at π".into(),
                    1e-3,
                    1.0 - s.values[40],
                );
            }
        }
    }

    let h = FRAC_1_SQRT_2;
    let bell = ComplexMatrix::projector(&[
        Complex64::new(h, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(h, 0.0),
    ]);
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut w = bell.scale_real(p);
        w.axpy((1.0 - p) / 4.0, &ComplexMatrix::identity(4));
        if let Some(c) = r.check_ok(|| format!("Werner p = {p}"), concurrence(&w)) {
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            r.check(
                || format!("Werner concurrence p = {p}"),
                1e-9,
                (c - want).abs(),
            );
        }
    }

    let ex = nc_trace(
        &ChannelSpec::Exchange {
            j: 1.0,
            gamma2: 0.0,
        },
        PI,
        41,
    );
    if let Some(s) = r.check_ok(|| "exchange concurrence trace".into(), ex) {
        r.check(
            || "exchange concurrence vanishes at π/2".into(),
            1e-3,
            s.values[20],
        );
        r.check(
            || "exchange concurrence revives at π".into(),
            1e-3,
            1.0 - s.values[40],
        );
    }
    let rabi = nc_trace(
        &ChannelSpec::RabiDecay {
            g1: 1.0,
            gamma1: 1.0,
        },
        8.0,
        81,
    );
    if let Some(s) = r.check_ok(|| "Rabi concurrence trace".into(), rabi) {
        r.check(|| "damped Rabi N_C".into(), 1e-4, n_abs(&s, 1e-6).value);
    }
    r
}

/// Runs the selected groups on the current rayon pool.
pub fn run_groups(groups: &[&str], seed: u64, seeds: usize, restarts: usize) -> Vec<GroupReport> {
    groups
        .iter()
        .map(|&g| match g {
            "hermat" => hermat_group(seed),
            "steering" => steering_group(seed),
            "channels" => channels_group(seed),
            "sdp" => sdp_group(seed),
            "sdp-oracle" => oracle_group(seed, restarts),
            "monotonicity" => monotonicity_group(seed, seeds),
            "measures" => measures_group(),
            other => {
                let mut r = GroupReport::new(other);
                r.failures = 1;
                r.failed.push("unknown group".into());
                r
            }
        })
        .collect()
}

pub fn write_report(w: &mut dyn Write, reports: &[GroupReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(
            w,
            "{:<13} {}  {:>5}/{:<5} passed  worst margin {:+.3e}",
            r.name,
            if r.passed() { "PASS" } else { "FAIL" },
            r.checks - r.failures,
            r.checks,
            r.worst_margin
        )?;
        if let Some(n) = &r.note {
            writeln!(w, "{:<13} {n}", "")?;
        }
        for f in &r.failed {
            writeln!(w, "{:<13} - {f}", "")?;
        }
    }
    Ok(())
}

pub fn run_verify(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let reports = thread_pool(cfg.workers)?
        .install(|| run_groups(&cfg.groups, cfg.seed, cfg.seeds, cfg.restarts));
    if cfg.json {
        writeln!(stdout, "{}", serde_json::to_string_pretty(&reports)?)?;
    } else {
        write_report(stdout, &reports)?;
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} groups failed: {}",
            failed.len(),
            reports.len(),
            failed.join(", ")
        )))
    }
}
