//! Assemblage and matrix JSON files, and CSV output.
//!
//! An assemblage file looks like
//!
//! ```json
//! { "n_meas": 2, "labels": ["X", "Z"],
//!   "members": [ { "x": "X", "a": 1, "matrix": [[[0.25, 0], [0.25, 0]], [[0.25, 0], [0.25, 0]]] }, ... ] }
//! ```
//!
//! with one member per label and outcome `a ∈ {+1, -1}`, each matrix a list
//! of rows of `[re, im]` pairs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tsw_core::steering::{Assemblage, Outcome};
use tsw_core::{Complex64, ComplexMatrix};

use crate::error::{CliError, Result};

/// Row-major list of rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberJson {
    pub x: String,
    pub a: i64,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblageJson {
    pub n_meas: usize,
    pub labels: Vec<String>,
    pub members: Vec<MemberJson>,
}

pub fn matrix_from_json(m: &MatrixJson) -> Result<ComplexMatrix> {
    let n = m.len();
    if n == 0 {
        return Err(CliError::Config("matrix has no rows".into()));
    }
    if let Some((i, row)) = m.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(CliError::Config(format!(
            "matrix is not square: row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    let data: Vec<Complex64> = m
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Config("matrix has a non-finite entry".into()));
    }
    ComplexMatrix::new(n, data).map_err(|e| CliError::Config(e.to_string()))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

impl AssemblageJson {
    pub fn from_assemblage(asm: &Assemblage) -> Self {
        let members = asm
            .labels()
            .iter()
            .enumerate()
            .flat_map(|(x, label)| {
                Outcome::BOTH.map(|a| MemberJson {
                    x: label.clone(),
                    a: a.value().into(),
                    matrix: matrix_to_json(asm.member(x, a)),
                })
            })
            .collect();
        AssemblageJson {
            n_meas: asm.n_meas(),
            labels: asm.labels().to_vec(),
            members,
        }
    }

    /// Checks the schema and builds the assemblage. Members may come in any
    /// order, but every `(x, a)` pair must appear exactly once.
    pub fn to_assemblage(&self) -> Result<Assemblage> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n_meas == 0 || self.labels.len() != self.n_meas {
            return bad(format!(
                "n_meas is {} but {} labels are given",
                self.n_meas,
                self.labels.len()
            ));
        }
        for (i, l) in self.labels.iter().enumerate() {
            if self.labels[..i].contains(l) {
                return bad(format!("duplicate label {l:?}"));
            }
        }
        let mut slots: Vec<[Option<ComplexMatrix>; 2]> = vec![[None, None]; self.n_meas];
        for m in &self.members {
            let Some(x) = self.labels.iter().position(|l| *l == m.x) else {
                return bad(format!("member refers to unknown label {:?}", m.x));
            };
            let Some(a) = Outcome::from_value(m.a) else {
                return bad(format!("outcome must be +1 or -1, got {}", m.a));
            };
            let slot = &mut slots[x][a.index()];
            if slot.is_some() {
                return bad(format!("member (x={}, a={a}) given twice", m.x));
            }
            let matrix = matrix_from_json(&m.matrix)
                .map_err(|e| CliError::Config(format!("member (x={}, a={a}): {e}", m.x)))?;
            *slot = Some(matrix);
        }
        let mut members = Vec::with_capacity(self.n_meas);
        for (x, pair) in slots.into_iter().enumerate() {
            let [Some(p), Some(m)] = pair else {
                return bad(format!("setting {:?} lacks a member", self.labels[x]));
            };
            members.push([p, m]);
        }
        let dim = members[0][0].dim();
        if members.iter().flatten().any(|m| m.dim() != dim) {
            return bad("members have different dimensions".into());
        }
        Ok(Assemblage::from_parts(self.labels.clone(), members, 0.0))
    }
}

pub fn parse_assemblage(text: &str) -> Result<Assemblage> {
    let file: AssemblageJson = serde_json::from_str(text)?;
    file.to_assemblage()
}

pub fn read_assemblage(path: &Path) -> Result<Assemblage> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let at = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let file: AssemblageJson = serde_json::from_str(&text).map_err(|e| at(e.to_string()))?;
    file.to_assemblage().map_err(|e| match e {
        CliError::Config(msg) => at(msg),
        other => other,
    })
}

pub fn assemblage_to_json(asm: &Assemblage) -> String {
    serde_json::to_string_pretty(&AssemblageJson::from_assemblage(asm))
        .expect("assemblage JSON is always serializable")
}

pub fn write_assemblage(path: &Path, asm: &Assemblage) -> Result<()> {
    std::fs::write(path, assemblage_to_json(asm) + "\n")?;
    Ok(())
}

/// Reads a bare matrix in the member format.
pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let m: MatrixJson = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    matrix_from_json(&m)
}

/// Scientific notation with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(w: impl Write, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row.iter().map(|&v| fmt_float(v)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
