//! The `trace`, `sweep` and `steer` commands.
//!
//! Grid points are independent solves, so they are evaluated on a rayon
//! pool and collected in grid order; the output does not depend on the
//! number of workers.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use tsw_core::channels::{ChannelSpec, Propagator};
use tsw_core::hermat::psd_min_eig;
use tsw_core::measures::{
    concurrence, n_abs, n_tsw, positive_slope, tsw_with, uniform_grid, NmResult, TraceMetadata,
    TraceSeries,
};
use tsw_core::sdp::{build_sw_sdp, SdpProblem, MEMBER_PSD_TOL};
use tsw_core::steering::{premeasure, strategy_table, validate, Assemblage, Outcome};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::io::{create_file, fmt_float, read_assemblage, write_csv};

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))
}

fn tsw_at(
    prop: &Propagator,
    initial: &Assemblage,
    t: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let solve = || Ok(tsw_with(&prop.propagate_assemblage(t, initial)?, tol, max_iter)?.value);
    solve().map_err(|e| CliError::numerical_at(format_args!("{:?} at t = {t}", prop.spec()), e))
}

fn concurrence_at(prop: &Propagator, t: f64) -> Result<f64> {
    let c = || concurrence(&prop.choi(t)?.hermitian_part());
    c().map_err(|e| {
        CliError::numerical_at(
            format_args!("concurrence of {:?} at t = {t}", prop.spec()),
            e,
        )
    })
}

fn qubit_propagator(ch: ChannelSpec) -> Result<Propagator> {
    Propagator::new(ch).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct TraceReport {
    pub tsw: TraceSeries,
    /// Ancilla concurrence, with `--with-nc`.
    pub nc: Option<TraceSeries>,
    pub n_tsw: NmResult,
    /// The `|dTSW| + boundary` convention.
    pub n_i: NmResult,
    pub n_c: Option<NmResult>,
}

/// Evaluates the trace on the current rayon pool.
pub fn compute_trace(cfg: &RunConfig) -> Result<TraceReport> {
    let ch = cfg.model.channel();
    let prop = qubit_propagator(ch.clone())?;
    let times = uniform_grid(cfg.t_max, cfg.n_steps)?;
    let initial = premeasure(&cfg.rho0, &cfg.meas)?;
    let values = times
        .par_iter()
        .map(|&t| tsw_at(&prop, &initial, t, cfg.tol, cfg.max_iter))
        .collect::<Result<Vec<_>>>()?;
    let tsw = TraceSeries {
        times: times.clone(),
        values,
        metadata: TraceMetadata {
            channel: ch.clone(),
            labels: cfg.meas.labels(),
            tol: Some(cfg.tol),
        },
    };
    let nc = if cfg.with_nc {
        let values = times
            .par_iter()
            .map(|&t| concurrence_at(&prop, t))
            .collect::<Result<Vec<_>>>()?;
        Some(TraceSeries {
            times,
            values,
            metadata: TraceMetadata {
                channel: ch,
                labels: Vec::new(),
                tol: None,
            },
        })
    } else {
        None
    };
    Ok(TraceReport {
        n_tsw: n_tsw(&tsw, cfg.slope_threshold),
        n_i: n_abs(&tsw, cfg.slope_threshold),
        n_c: nc.as_ref().map(|s| n_abs(s, cfg.slope_threshold)),
        tsw,
        nc,
    })
}

#[derive(Debug, Serialize)]
struct TraceSummary {
    n_tsw: f64,
    n_i: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_c: Option<f64>,
    slope_threshold: f64,
    points: usize,
}

fn write_trace_summary(w: &mut dyn Write, r: &TraceReport, json: bool) -> Result<()> {
    if json {
        let s = TraceSummary {
            n_tsw: r.n_tsw.value,
            n_i: r.n_i.value,
            n_c: r.n_c.map(|n| n.value),
            slope_threshold: r.n_tsw.slope_threshold,
            points: r.n_tsw.n_points,
        };
        writeln!(w, "{}", serde_json::to_string(&s)?)?;
        return Ok(());
    }
    writeln!(w, "N_TSW = {}", fmt_float(r.n_tsw.value))?;
    writeln!(w, "N_i   = {}", fmt_float(r.n_i.value))?;
    if let Some(n) = r.n_c {
        writeln!(w, "N_C   = {}", fmt_float(n.value))?;
    }
    writeln!(
        w,
        "({} points, slope threshold {:e})",
        r.n_tsw.n_points, r.n_tsw.slope_threshold
    )?;
    Ok(())
}

/// Writes the CSV to `--out` (summary on `stdout`) or to `stdout`
/// (summary on `stderr`).
fn emit_csv(
    cfg: &RunConfig,
    header: &[&str],
    rows: &[Vec<f64>],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    summary: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            let mut f = create_file(path)?;
            write_csv(&mut f, header, rows)?;
            f.flush()?;
            summary(stdout)
        }
        None => {
            write_csv(&mut *stdout, header, rows)?;
            summary(stderr)
        }
    }
}

pub fn run_trace(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let report = thread_pool(cfg.workers)?.install(|| compute_trace(cfg))?;
    let rows: Vec<Vec<f64>> = match &report.nc {
        Some(nc) => report
            .tsw
            .times
            .iter()
            .zip(&report.tsw.values)
            .zip(&nc.values)
            .map(|((&t, &v), &c)| vec![t, v, c])
            .collect(),
        None => report
            .tsw
            .times
            .iter()
            .zip(&report.tsw.values)
            .map(|(&t, &v)| vec![t, v])
            .collect(),
    };
    let header: &[&str] = if report.nc.is_some() {
        &["t", "tsw", "concurrence"]
    } else {
        &["t", "tsw"]
    };
    emit_csv(cfg, header, &rows, stdout, stderr, |w| {
        write_trace_summary(w, &report, cfg.json)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub n_tsw: f64,
    pub n_c: Option<f64>,
}

/// Evaluates every (parameter, time) pair on the current rayon pool and
/// integrates each curve in ascending parameter order.
pub fn compute_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let range = cfg
        .sweep
        .ok_or_else(|| CliError::Config("no sweep range configured".into()))?;
    let params = range.values();
    let props = params
        .iter()
        .map(|&v| qubit_propagator(cfg.model.with_param(range.param, v).channel()))
        .collect::<Result<Vec<_>>>()?;
    let times = uniform_grid(cfg.t_max, cfg.n_steps)?;
    let initial = premeasure(&cfg.rho0, &cfg.meas)?;
    let jobs: Vec<(usize, f64)> = (0..props.len())
        .flat_map(|k| times.iter().map(move |&t| (k, t)))
        .collect();
    let tsw = jobs
        .par_iter()
        .map(|&(k, t)| tsw_at(&props[k], &initial, t, cfg.tol, cfg.max_iter))
        .collect::<Result<Vec<_>>>()?;
    let nc = if cfg.with_nc {
        Some(
            jobs.par_iter()
                .map(|&(k, t)| concurrence_at(&props[k], t))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let n = times.len();
    Ok(params
        .iter()
        .enumerate()
        .map(|(k, &param)| SweepRow {
            param,
            n_tsw: positive_slope(&tsw[k * n..(k + 1) * n], cfg.slope_threshold),
            n_c: nc.as_ref().map(|c| {
                tsw_core::measures::abs_plus_boundary(&c[k * n..(k + 1) * n], cfg.slope_threshold)
            }),
        })
        .collect())
}

pub fn run_sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let rows = thread_pool(cfg.workers)?.install(|| compute_sweep(cfg))?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.param, r.n_tsw];
            v.extend(r.n_c);
            v
        })
        .collect();
    let header: &[&str] = if cfg.with_nc {
        &["param", "n_tsw", "n_c"]
    } else {
        &["param", "n_tsw"]
    };
    let range = cfg.sweep.expect("checked by compute_sweep");
    emit_csv(cfg, header, &table, stdout, stderr, |w| {
        writeln!(
            w,
            "swept {} over {} points, {} time steps up to t = {}",
            range.param, range.points, cfg.n_steps, cfg.t_max
        )?;
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSlack {
    pub x: String,
    pub a: i8,
    /// Smallest eigenvalue of `σ_{a|x} − Σ_λ D_λ(a|x) σ̃_λ`.
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteerReport {
    pub tsw: f64,
    pub mu_star: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub status: String,
    pub constraints: Vec<ConstraintSlack>,
    /// Smallest eigenvalue over the hidden states `σ̃_λ`.
    pub min_hidden_state_eig: f64,
}

/// Validates `asm` and solves its steerable-weight problem.
pub fn steer_report(asm: &Assemblage, tol: f64, max_iter: usize) -> Result<SteerReport> {
    let violations = validate(asm, MEMBER_PSD_TOL);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(CliError::Config(format!(
            "assemblage fails validation (settings {}):\n{}",
            asm.labels().join(", "),
            list.join("\n")
        )));
    }
    let result = tsw_with(asm, tol, max_iter)?;
    let problem: SdpProblem = build_sw_sdp(asm, &strategy_table(asm.n_meas())?)?;
    let sol = &result.solution;
    let mut constraints = Vec::with_capacity(problem.n_constraints());
    for (x, label) in asm.labels().iter().enumerate() {
        for a in Outcome::BOTH {
            let c = SdpProblem::constraint_index(x, a);
            constraints.push(ConstraintSlack {
                x: label.clone(),
                a: a.value(),
                min_eig: psd_min_eig(&problem.slack(c, &sol.sigma_tilde))?,
            });
        }
    }
    let min_hidden_state_eig = sol
        .sigma_tilde
        .iter()
        .map(psd_min_eig)
        .collect::<tsw_core::Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(SteerReport {
        tsw: result.value,
        mu_star: sol.mu_star,
        dual_value: sol.dual_value,
        gap: sol.gap,
        iterations: sol.iterations,
        status: format!("{:?}", sol.status),
        constraints,
        min_hidden_state_eig,
    })
}

pub fn run_steer(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let path = cfg
        .file
        .as_deref()
        .ok_or_else(|| CliError::Config("steer needs an assemblage file".into()))?;
    let asm = read_assemblage(path)?;
    let r = steer_report(&asm, cfg.tol, cfg.max_iter)?;
    if cfg.json {
        writeln!(stdout, "{}", serde_json::to_string_pretty(&r)?)?;
        return Ok(());
    }
    writeln!(stdout, "TSW        {:.6}", r.tsw)?;
    writeln!(stdout, "mu*        {}", fmt_float(r.mu_star))?;
    writeln!(stdout, "dual       {}", fmt_float(r.dual_value))?;
    writeln!(stdout, "gap        {:.3e}", r.gap)?;
    writeln!(stdout, "iterations {}", r.iterations)?;
    writeln!(stdout, "status     {}", r.status)?;
    writeln!(stdout, "min eigenvalue of each constraint slack:")?;
    for c in &r.constraints {
        writeln!(stdout, "  x={} a={:+}  {:+.3e}", c.x, c.a, c.min_eig)?;
    }
    writeln!(
        stdout,
        "min eigenvalue of the hidden states: {:+.3e}",
        r.min_hidden_state_eig
    )?;
    Ok(())
}
