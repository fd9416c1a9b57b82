//! Measurement sets, assemblages, deterministic strategies and hidden-state
//! assemblages.
//!
//! Outcomes are dichotomic. The outcome `+1` is stored at index 0 and `-1`
//! at index 1, so an assemblage over the settings `X, Y, Z` is laid out as
//! `σ_{+1|X}, σ_{-1|X}, σ_{+1|Y}, …`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermat::{psd_min_eig, ComplexMatrix};

/// Tolerance for the projector checks on measurement sets.
pub const PROJECTOR_TOL: f64 = 1e-12;
/// Largest number of settings supported by [`StrategyTable`].
pub const MAX_SETTINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(a: i64) -> Option<Self> {
        match a {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn label(self) -> &'static str {
        match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Eigenvectors for `+1` and `-1`: `|±⟩`, `|R⟩/|L⟩`, `|0⟩/|1⟩`.
    pub fn eigenvectors(self) -> [[Complex64; 2]; 2] {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| Complex64::new(x, 0.0);
        let i = |x: f64| Complex64::new(0.0, x);
        match self {
            Pauli::X => [[r(h), r(h)], [r(h), r(-h)]],
            Pauli::Y => [[r(h), i(h)], [r(h), i(-h)]],
            Pauli::Z => [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
        }
    }
}

/// A dichotomic projective measurement `{Π₊, Π₋}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    label: String,
    projectors: [ComplexMatrix; 2],
}

impl Measurement {
    /// Validates that both projectors are Hermitian, idempotent, PSD and
    /// sum to the identity.
    pub fn new(
        label: impl Into<String>,
        plus: ComplexMatrix,
        minus: ComplexMatrix,
    ) -> Result<Self> {
        let label = label.into();
        let dim = plus.dim();
        if minus.dim() != dim {
            return Err(Error::BadDimension(alloc::format!(
                "projectors of measurement {label} differ in dimension"
            )));
        }
        for p in [&plus, &minus] {
            if !p.is_hermitian(PROJECTOR_TOL) || (&(p * p) - p).frobenius_norm() > PROJECTOR_TOL {
                return Err(Error::OutOfRange(alloc::format!(
                    "measurement {label} has a non-projector element"
                )));
            }
        }
        if (&plus + &minus).distance(&ComplexMatrix::identity(dim)) > PROJECTOR_TOL {
            return Err(Error::OutOfRange(alloc::format!(
                "projectors of measurement {label} do not sum to the identity"
            )));
        }
        Ok(Self {
            label,
            projectors: [plus, minus],
        })
    }

    pub fn pauli(p: Pauli) -> Self {
        let [plus, minus] = p.eigenvectors();
        Self {
            label: p.label().to_string(),
            projectors: [
                ComplexMatrix::projector(&plus),
                ComplexMatrix::projector(&minus),
            ],
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn projector(&self, a: Outcome) -> &ComplexMatrix {
        &self.projectors[a.index()]
    }

    pub fn projectors(&self) -> [&ComplexMatrix; 2] {
        [&self.projectors[0], &self.projectors[1]]
    }
}

/// Ordered list of measurement settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    measurements: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn new(measurements: Vec<Measurement>) -> Result<Self> {
        if measurements.is_empty() {
            return Err(Error::EmptySet);
        }
        for (i, m) in measurements.iter().enumerate() {
            if measurements[..i].iter().any(|o| o.label == m.label) {
                return Err(Error::DuplicateLabel(m.label.clone()));
            }
        }
        if measurements.len() > MAX_SETTINGS {
            return Err(Error::OutOfRange(alloc::format!(
                "{} settings exceed the maximum of {MAX_SETTINGS}",
                measurements.len()
            )));
        }
        let dim = measurements[0].projectors[0].dim();
        if measurements.iter().any(|m| m.projectors[0].dim() != dim) {
            return Err(Error::BadDimension(String::from(
                "measurements act on different dimensions",
            )));
        }
        Ok(Self { measurements })
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.measurements[0].projectors[0].dim()
    }

    pub fn labels(&self) -> Vec<String> {
        self.measurements.iter().map(|m| m.label.clone()).collect()
    }
}

/// Pauli eigenbasis measurements, in the given order.
pub fn pauli_measurement_set(labels: &[Pauli]) -> Result<MeasurementSet> {
    if labels.is_empty() {
        return Err(Error::EmptySet);
    }
    for (i, p) in labels.iter().enumerate() {
        if labels[..i].contains(p) {
            return Err(Error::DuplicateLabel(p.label().to_string()));
        }
    }
    MeasurementSet::new(labels.iter().map(|&p| Measurement::pauli(p)).collect())
}

/// Parses strings such as `"xyz"` or `"XZ"`.
pub fn parse_pauli_labels(s: &str) -> Result<Vec<Pauli>> {
    s.chars()
        .map(|c| {
            Pauli::from_char(c)
                .ok_or_else(|| Error::OutOfRange(alloc::format!("unknown Pauli label '{c}'")))
        })
        .collect()
}

/// The family of unnormalized conditional states `σ_{a|x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    labels: Vec<String>,
    members: Vec<[ComplexMatrix; 2]>,
    /// Evolution time this assemblage represents.
    pub time_tag: f64,
}

impl Assemblage {
    /// Builds an assemblage without validating it; see [`validate`].
    pub fn from_parts(
        labels: Vec<String>,
        members: Vec<[ComplexMatrix; 2]>,
        time_tag: f64,
    ) -> Self {
        assert_eq!(labels.len(), members.len(), "one label per setting");
        assert!(!members.is_empty(), "assemblage needs at least one setting");
        Self {
            labels,
            members,
            time_tag,
        }
    }

    pub fn n_meas(&self) -> usize {
        self.members.len()
    }

    pub fn dim(&self) -> usize {
        self.members[0][0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn member(&self, x: usize, a: Outcome) -> &ComplexMatrix {
        &self.members[x][a.index()]
    }

    pub fn member_mut(&mut self, x: usize, a: Outcome) -> &mut ComplexMatrix {
        &mut self.members[x][a.index()]
    }

    pub fn members(&self) -> &[[ComplexMatrix; 2]] {
        &self.members
    }

    /// `Σ_a σ_{a|x}`.
    pub fn marginal(&self, x: usize) -> ComplexMatrix {
        &self.members[x][0] + &self.members[x][1]
    }

    /// `p(a|x) = Tr σ_{a|x}`.
    pub fn probability(&self, x: usize, a: Outcome) -> f64 {
        self.member(x, a).trace().re
    }

    /// Applies `f` to every member.
    pub fn map_members(
        &self,
        mut f: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|[p, m]| Ok([f(p)?, f(m)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            labels: self.labels.clone(),
            members,
            time_tag: self.time_tag,
        })
    }

    /// `(1 − s)·self + s·other`, member by member.
    pub fn mix(&self, other: &Assemblage, s: f64) -> Result<Self> {
        if other.n_meas() != self.n_meas() || other.dim() != self.dim() {
            return Err(Error::DimensionMismatch(String::from(
                "mixing assemblages of different shape",
            )));
        }
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| {
                [0, 1].map(|k| {
                    let mut m = a[k].scale_real(1.0 - s);
                    m.axpy(s, &b[k]);
                    m
                })
            })
            .collect();
        Ok(Self {
            labels: self.labels.clone(),
            members,
            time_tag: self.time_tag,
        })
    }
}

/// `σ_{a|x} = Π_{a|x} ρ₀ Π_{a|x}` at time zero.
pub fn premeasure(rho0: &ComplexMatrix, ms: &MeasurementSet) -> Result<Assemblage> {
    check_state(rho0, 1e-9)?;
    if rho0.dim() != ms.dim() {
        return Err(Error::BadDimension(alloc::format!(
            "state of dimension {} measured with {}-dimensional projectors",
            rho0.dim(),
            ms.dim()
        )));
    }
    let rho = rho0.hermitian_part();
    let members = ms
        .measurements()
        .iter()
        .map(|m| m.projectors().map(|p| (&(p * &rho) * p).hermitian_part()))
        .collect();
    Ok(Assemblage::from_parts(ms.labels(), members, 0.0))
}

/// Checks that `rho` is a Hermitian, PSD, unit-trace matrix within `tol`.
pub fn check_state(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    if !rho.is_hermitian(crate::hermat::HERMITIAN_TOL) {
        return Err(Error::InvalidState(String::from("not Hermitian")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidState(alloc::format!("trace {} != 1", tr.re)));
    }
    let min = psd_min_eig(rho)?;
    if min < -tol {
        return Err(Error::InvalidState(alloc::format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

/// The `2^n` deterministic assignments of outcomes to settings.
///
/// Row `n` assigns `+1` to setting `x` iff bit `n_meas − 1 − x` of `n` is set,
/// so rows run from all `-1` to all `+1` with the last setting varying
/// fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTable {
    n_meas: usize,
}

impl StrategyTable {
    pub fn n_meas(&self) -> usize {
        self.n_meas
    }

    pub fn n_rows(&self) -> usize {
        1 << self.n_meas
    }

    /// Outcome that strategy `lambda` assigns to setting `x`.
    #[inline]
    pub fn outcome(&self, lambda: usize, x: usize) -> Outcome {
        if (lambda >> (self.n_meas - 1 - x)) & 1 == 1 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    /// `D_λ(a|x) ∈ {0, 1}`.
    #[inline]
    pub fn d(&self, lambda: usize, a: Outcome, x: usize) -> bool {
        self.outcome(lambda, x) == a
    }

    pub fn row(&self, lambda: usize) -> Vec<Outcome> {
        (0..self.n_meas).map(|x| self.outcome(lambda, x)).collect()
    }

    /// Strategies with `D_λ(a|x) = 1`.
    pub fn strategies_for(&self, x: usize, a: Outcome) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_rows()).filter(move |&l| self.d(l, a, x))
    }
}

pub fn strategy_table(n_meas: usize) -> Result<StrategyTable> {
    if n_meas == 0 || n_meas > MAX_SETTINGS {
        return Err(Error::OutOfRange(alloc::format!(
            "number of settings {n_meas} outside 1..={MAX_SETTINGS}"
        )));
    }
    Ok(StrategyTable { n_meas })
}

/// `σ_{a|x} = Σ_λ D_λ(a|x) σ̃_λ`.
pub fn lhs_assemblage(
    table: &StrategyTable,
    sigmas: &[ComplexMatrix],
    labels: Vec<String>,
) -> Result<Assemblage> {
    if sigmas.len() != table.n_rows() {
        return Err(Error::CountMismatch {
            expected: table.n_rows(),
            got: sigmas.len(),
        });
    }
    if labels.len() != table.n_meas() {
        return Err(Error::CountMismatch {
            expected: table.n_meas(),
            got: labels.len(),
        });
    }
    for s in sigmas {
        let min = psd_min_eig(s)?;
        if min < -1e-12 {
            return Err(Error::NotPsd(min));
        }
    }
    let dim = sigmas[0].dim();
    let members = (0..table.n_meas())
        .map(|x| {
            Outcome::BOTH.map(|a| {
                let mut m = ComplexMatrix::zeros(dim);
                for l in table.strategies_for(x, a) {
                    m += &sigmas[l];
                }
                m
            })
        })
        .collect();
    Ok(Assemblage::from_parts(labels, members, 0.0))
}

/// `σ_{a|x} = ½[v·Π_{a|x} + (1 − v)·I/2]`.
pub fn depolarized_assemblage(v: f64, ms: &MeasurementSet) -> Result<Assemblage> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(alloc::format!(
            "visibility {v} outside [0, 1]"
        )));
    }
    let dim = ms.dim();
    let noise = ComplexMatrix::identity(dim).scale_real((1.0 - v) / dim as f64);
    let members = ms
        .measurements()
        .iter()
        .map(|m| {
            m.projectors().map(|p| {
                let mut s = p.scale_real(v);
                s += &noise;
                s.scale_real(0.5)
            })
        })
        .collect();
    Ok(Assemblage::from_parts(ms.labels(), members, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NotPsd,
    NonSignaling,
    TotalTrace,
}

/// One failed assemblage invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub setting: usize,
    /// Set for per-member checks.
    pub outcome: Option<Outcome>,
    /// For `NonSignaling`, the setting compared against.
    pub other_setting: Option<usize>,
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::NotPsd => write!(
                f,
                "NotPsd at (x={}, a={}): min eigenvalue {:.3e}",
                self.setting,
                self.outcome.map_or(Outcome::Plus, |a| a),
                -self.magnitude
            ),
            ViolationKind::NonSignaling => write!(
                f,
                "NonSignaling between x={} and x={}: marginal distance {:.3e}",
                self.setting,
                self.other_setting.unwrap_or(0),
                self.magnitude
            ),
            ViolationKind::TotalTrace => write!(
                f,
                "TotalTrace at x={}: |Tr Σ_a σ_(a|x) − 1| = {:.3e}",
                self.setting, self.magnitude
            ),
        }
    }
}

/// Checks positivity of every member, non-signaling (one entry for the
/// worst pair of settings) and unit total trace per setting.
pub fn validate(asm: &Assemblage, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for x in 0..asm.n_meas() {
        for a in Outcome::BOTH {
            let m = asm.member(x, a);
            let magnitude = match psd_min_eig(m) {
                Ok(min) => -min,
                Err(_) => m.hermiticity_defect().max(f64::MIN_POSITIVE) + tol,
            };
            if magnitude > tol {
                out.push(Violation {
                    kind: ViolationKind::NotPsd,
                    setting: x,
                    outcome: Some(a),
                    other_setting: None,
                    magnitude,
                });
            }
        }
    }

    let marginals: Vec<ComplexMatrix> = (0..asm.n_meas()).map(|x| asm.marginal(x)).collect();
    let mut worst: Option<(usize, usize, f64)> = None;
    for x in 0..marginals.len() {
        for y in x + 1..marginals.len() {
            let d = marginals[x].distance(&marginals[y]);
            if d > tol && worst.is_none_or(|(_, _, w)| d > w) {
                worst = Some((x, y, d));
            }
        }
    }
    if let Some((x, y, d)) = worst {
        out.push(Violation {
            kind: ViolationKind::NonSignaling,
            setting: x,
            outcome: None,
            other_setting: Some(y),
            magnitude: d,
        });
    }

    for (x, m) in marginals.iter().enumerate() {
        let tr = m.trace();
        let dev = (tr - Complex64::new(1.0, 0.0)).norm();
        if dev > tol {
            out.push(Violation {
                kind: ViolationKind::TotalTrace,
                setting: x,
                outcome: None,
                other_setting: None,
                magnitude: dev,
            });
        }
    }
    out
}
