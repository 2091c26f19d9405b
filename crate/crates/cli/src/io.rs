//! Text I/O: sample files, bandwidth matrices and density-grid artifacts.
//!
//! All floating-point output uses Rust's shortest round-trip formatting, so
//! every written value parses back to the identical bit pattern.

use std::fmt::Write as _;
use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use fastkde::{DensityGrid, GridSpec, Method, SampleMatrix};
use ndarray::{Array2, ArrayD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::{BandwidthError, LoadError};

/// Field separator for sample files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    /// Comma if the first data line contains one, otherwise whitespace.
    Auto,
    Char(char),
    Whitespace,
}

fn split_fields(line: &str, delimiter: Delimiter) -> Vec<&str> {
    match delimiter {
        Delimiter::Char(c) => line.split(c).map(str::trim).collect(),
        Delimiter::Whitespace => line.split_whitespace().collect(),
        Delimiter::Auto => unreachable!("resolved before splitting"),
    }
}

fn parse_finite(field: &str) -> Option<f64> {
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => LoadError::FileNotFound(path.to_path_buf()),
        _ => LoadError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
    })
}

/// Parses delimited numeric rows into an `n×d` sample. Blank lines and lines
/// starting with `#` are skipped; a first row that is not entirely numeric is
/// taken as a header. Reported line numbers are 1-based physical lines.
pub fn parse_samples(text: &str, delimiter: Delimiter) -> Result<SampleMatrix<f64>, LoadError> {
    let mut delimiter = delimiter;
    let mut width = None;
    let mut values = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if delimiter == Delimiter::Auto {
            delimiter = if line.contains(',') {
                Delimiter::Char(',')
            } else {
                Delimiter::Whitespace
            };
        }
        let fields = split_fields(line, delimiter);
        let parsed: Vec<Option<f64>> = fields.iter().map(|f| parse_finite(f)).collect();
        let is_first = std::mem::replace(&mut first, false);
        if let Some(bad) = parsed.iter().position(Option::is_none) {
            if is_first {
                continue;
            }
            return Err(LoadError::ParseError {
                line: line_no,
                field: fields[bad].to_string(),
            });
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(LoadError::InconsistentColumns {
                    line: line_no,
                    expected: w,
                    found: fields.len(),
                })
            }
            Some(_) => {}
        }
        values.extend(parsed.into_iter().flatten());
    }
    let d = width.ok_or(LoadError::Empty)?;
    let n = values.len() / d;
    let points = Array2::from_shape_vec((n, d), values).expect("rows have uniform width");
    SampleMatrix::new(points).map_err(|_| LoadError::Empty)
}

pub fn load_samples(path: &Path, delimiter: Delimiter) -> Result<SampleMatrix<f64>, LoadError> {
    parse_samples(&read_text(path)?, delimiter)
}

fn parse_matrix_rows<'a>(rows: impl Iterator<Item = &'a str>) -> Result<Array2<f64>, BandwidthError> {
    let mut parsed: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let entries = row
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| parse_finite(f).ok_or_else(|| BandwidthError::Parse(f.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if !entries.is_empty() {
            parsed.push(entries);
        }
    }
    let d = parsed.len();
    if d == 0 || parsed.iter().any(|r| r.len() != d) {
        return Err(BandwidthError::Ragged(parsed.iter().map(Vec::len).collect()));
    }
    Ok(Array2::from_shape_fn((d, d), |(i, j)| parsed[i][j]))
}

/// Inline syntax: rows separated by `;`, entries by `,` or whitespace,
/// e.g. `"1,0.8;0.8,1"`.
pub fn parse_bandwidth(spec: &str) -> Result<Array2<f64>, BandwidthError> {
    parse_matrix_rows(spec.split(';'))
}

/// Plain text file with `d` rows of `d` comma- or whitespace-separated numbers.
pub fn load_bandwidth_file(path: &Path) -> Result<Array2<f64>, String> {
    let text = read_text(path).map_err(|e| e.to_string())?;
    parse_matrix_rows(text.lines().filter(|l| !l.trim_start().starts_with('#'))).map_err(|e| e.to_string())
}

/// Grid geometry as stored in artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub sizes: Vec<usize>,
}

/// JSON artifact of one density evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub method: String,
    pub tau: f64,
    /// Kernel half-widths `L_k`; absent for the naive sum.
    pub support: Option<Vec<usize>>,
    pub bandwidth: Vec<Vec<f64>>,
    pub n: usize,
    pub grid: GridRecord,
    /// Densities in row-major (last index fastest) node order.
    pub values: Vec<f64>,
}

impl DensityRecord {
    pub fn new(density: &DensityGrid<f64>, tau: f64, bandwidth: &Array2<f64>, n: usize) -> Self {
        let grid = &density.grid;
        Self {
            method: density.method.name().to_string(),
            tau,
            support: density.support.clone(),
            bandwidth: bandwidth.rows().into_iter().map(|r| r.to_vec()).collect(),
            n,
            grid: GridRecord {
                lower: grid.lower().to_vec(),
                upper: grid.upper().to_vec(),
                sizes: grid.sizes().to_vec(),
            },
            values: density.values.iter().copied().collect(),
        }
    }

    /// Rebuilds the density grid; node coordinates are recomputed from the
    /// stored geometry exactly as the estimator computed them.
    pub fn to_density(&self) -> Result<DensityGrid<f64>, String> {
        let grid = GridSpec::new(self.grid.lower.clone(), self.grid.upper.clone(), self.grid.sizes.clone())
            .map_err(|e| e.to_string())?;
        let method: Method = self.method.parse().map_err(|e: fastkde::KdeError| e.to_string())?;
        let values = ArrayD::from_shape_vec(IxDyn(&self.grid.sizes), self.values.clone()).map_err(|e| e.to_string())?;
        Ok(DensityGrid {
            grid,
            values,
            method,
            support: self.support.clone(),
        })
    }
}

pub fn density_to_json(record: &DensityRecord) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("record is plain data");
    s.push('\n');
    s
}

pub fn density_from_json(text: &str) -> Result<DensityRecord, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// One line per node: `x1,…,xd,density`, nodes in row-major order.
pub fn density_to_csv(density: &DensityGrid<f64>) -> String {
    let grid = &density.grid;
    let d = grid.dim();
    let mut out = String::new();
    let header: Vec<String> = (1..=d).map(|k| format!("x{k}")).chain(["density".to_string()]).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    let nodes = grid.nodes();
    for (row, value) in nodes.points().rows().into_iter().zip(density.values.iter()) {
        for x in row {
            write!(out, "{x:?},").unwrap();
        }
        writeln!(out, "{value:?}").unwrap();
    }
    out
}

/// Reads a CSV artifact back as (node coordinates, densities).
pub fn density_from_csv(text: &str) -> Result<(Array2<f64>, Vec<f64>), LoadError> {
    let table = parse_samples(text, Delimiter::Char(','))?;
    let points = table.into_inner();
    let d = points.ncols() - 1;
    let coords = points.slice(ndarray::s![.., ..d]).to_owned();
    let values = points.column(d).to_vec();
    Ok((coords, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_and_comments() {
        let s = parse_samples("# comment\n1 2\n\n3\t4\n", Delimiter::Auto).unwrap();
        assert_eq!(s.points(), ndarray::array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn bad_field_reports_line() {
        let err = parse_samples("1,2\n3,x\n", Delimiter::Auto).unwrap_err();
        assert_eq!(
            err,
            LoadError::ParseError {
                line: 2,
                field: "x".into()
            }
        );
    }

    #[test]
    fn non_finite_rejected() {
        let err = parse_samples("1,2\n3,nan\n", Delimiter::Auto).unwrap_err();
        assert!(matches!(err, LoadError::ParseError { line: 2, .. }));
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(parse_samples("a,b\n", Delimiter::Auto).unwrap_err(), LoadError::Empty);
    }

    #[test]
    fn inline_bandwidth() {
        assert_eq!(parse_bandwidth("1,0.8;0.8,1").unwrap(), ndarray::array![[1.0, 0.8], [0.8, 1.0]]);
        assert_eq!(parse_bandwidth("2").unwrap(), ndarray::array![[2.0]]);
        assert!(matches!(parse_bandwidth("1,2;3"), Err(BandwidthError::Ragged(_))));
        assert!(matches!(parse_bandwidth("1,a;0,1"), Err(BandwidthError::Parse(_))));
    }
}
