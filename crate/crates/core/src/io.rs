//! Exchange formats.
//!
//! * covariance matrix: `{"n_modes": N, "ordering": "qpqp", "data": [[…], …]}`
//! * standard form: `{"n_modes": N, "vq": [[…], …]}`
//! * recipe: see [`Recipe`]
//!
//! Floats are written with a fixed number of significant digits (17 by
//! default, which round-trips every finite double exactly).

use std::io;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::engineering::Recipe;
use crate::error::{Error, Result};
use crate::gmps::BondAnalysis;
use crate::standard_form::StandardForm;
use crate::symplectic::CovarianceMatrix;

pub const ROUND_TRIP_DIGITS: usize = 17;

/// Formats `x` with `digits` significant digits, positional for moderate
/// exponents and scientific otherwise. Trailing zeros are kept.
pub fn format_float(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return format!("{:.*}", digits - 1, x);
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        format!("{:.*}", (digits as i32 - 1 - exp) as usize, x)
    } else {
        sci
    }
}

/// serde_json formatter writing floats through [`format_float`].
#[derive(Debug, Clone, Copy)]
pub struct DigitsFormatter {
    pub digits: usize,
}

impl Formatter for DigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, format!("cannot write {value} as JSON")));
        }
        writer.write_all(format_float(value, self.digits).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    // serde_json turns NaN and infinities into null before they reach the
    // formatter; none of our documents contain a legitimate null.
    fn write_null<W: ?Sized + io::Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite number or null value"))
    }
}

/// Serializes to one line of JSON with floats at `digits` significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T, digits: usize) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, DigitsFormatter { digits });
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Row-major matrix given either as nested rows or as one flat array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixData {
    pub fn to_matrix(&self, dim: usize) -> Result<DMatrix<f64>> {
        match self {
            MatrixData::Rows(r) => {
                if r.len() != dim || r.iter().any(|row| row.len() != dim) {
                    return Err(Error::Format(format!("expected {dim}×{dim} rows")));
                }
                Ok(DMatrix::from_fn(dim, dim, |i, j| r[i][j]))
            }
            MatrixData::Flat(v) => {
                if v.len() != dim * dim {
                    return Err(Error::Format(format!("expected {} entries, got {}", dim * dim, v.len())));
                }
                Ok(DMatrix::from_row_slice(dim, dim, v))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmDocument {
    pub n_modes: usize,
    pub ordering: String,
    pub data: MatrixData,
}

impl CmDocument {
    pub fn from_cm(cm: &CovarianceMatrix) -> Self {
        CmDocument { n_modes: cm.n_modes(), ordering: "qpqp".into(), data: MatrixData::Rows(rows(cm.data())) }
    }

    /// Raw matrix, checked only for shape and ordering.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        if self.ordering != "qpqp" {
            return Err(Error::Format(format!("unsupported ordering {:?}, expected \"qpqp\"", self.ordering)));
        }
        if self.n_modes == 0 {
            return Err(Error::Format("n_modes must be positive".into()));
        }
        self.data.to_matrix(2 * self.n_modes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFormDocument {
    pub n_modes: usize,
    pub vq: MatrixData,
}

impl StandardFormDocument {
    pub fn from_form(sf: &StandardForm) -> Self {
        StandardFormDocument { n_modes: sf.n_modes(), vq: MatrixData::Rows(rows(sf.vq())) }
    }

    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        if self.n_modes == 0 {
            return Err(Error::Format("n_modes must be positive".into()));
        }
        self.vq.to_matrix(self.n_modes)
    }
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn cm_to_json(cm: &CovarianceMatrix, digits: usize) -> Result<String> {
    to_json(&CmDocument::from_cm(cm), digits)
}

/// Parses and validates a covariance matrix document.
pub fn cm_from_json(text: &str) -> Result<CovarianceMatrix> {
    CovarianceMatrix::new(parse::<CmDocument>(text)?.matrix()?)
}

pub fn standard_form_to_json(sf: &StandardForm, digits: usize) -> Result<String> {
    to_json(&StandardFormDocument::from_form(sf), digits)
}

pub fn standard_form_document(text: &str) -> Result<StandardFormDocument> {
    parse(text)
}

pub fn recipe_from_json(text: &str) -> Result<Recipe> {
    parse(text)
}

pub fn recipe_to_json(recipe: &Recipe, digits: usize) -> Result<String> {
    to_json(recipe, digits)
}

/// Square matrix as CSV with 1-based mode labels on both axes.
pub fn matrix_csv(m: &[Vec<f64>], digits: usize) -> String {
    let n = m.len();
    let mut out = String::from("mode");
    for j in 1..=n {
        out.push_str(&format!(",{j}"));
    }
    out.push('\n');
    for (i, row) in m.iter().enumerate() {
        out.push_str(&(i + 1).to_string());
        for x in row {
            out.push(',');
            out.push_str(&format_float(*x, digits));
        }
        out.push('\n');
    }
    out
}

pub fn bond_table_csv(rows: &[BondAnalysis]) -> String {
    let mut out = String::from("N,theta,M_general,M_invariant,parity\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n_modes,
            r.theta,
            r.min_bonds_general,
            r.min_bonds_invariant,
            r.parity.as_str()
        ));
    }
    out
}
