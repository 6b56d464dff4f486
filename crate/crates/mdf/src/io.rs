//! CSV readers and writers for the crate's file formats.
//!
//! * distance matrix: no header, m rows of m comma-separated floats
//! * point sample: header `x0,x1,...,x{d-1}`, one row per point
//! * density function: header `r,value`, one row per grid radius
//! * weights: single column of floats, no header
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! written file re-parses to bit-identical values and identical inputs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::density::DensityFunction;
use crate::distance::DistanceMatrix;
use crate::error::{MdfError, Result};
use crate::grid::RadiusGrid;
use crate::points::PointSample;

fn parse_f64(cell: &str, context: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| MdfError::Parse(format!("{context}: cannot parse {cell:?} as a float")))
}

fn non_empty_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim_end).filter(|l| !l.is_empty())
}

/// Reads a headerless square matrix and validates it as a distance matrix.
pub fn read_distance_matrix(path: impl AsRef<Path>, symmetrize: bool) -> Result<DistanceMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in non_empty_lines(&text).enumerate() {
        let row = line
            .split(',')
            .map(|c| parse_f64(c, &format!("{}:{}", path.display(), lineno + 1)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DistanceMatrix::from_raw(&rows, symmetrize)
}

pub fn write_distance_matrix(path: impl AsRef<Path>, matrix: &DistanceMatrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..matrix.size() {
        let mut first = true;
        for &v in matrix.row(i) {
            if !first {
                out.push(',');
            }
            write!(out, "{v}").expect("string write");
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a point sample CSV (`x0,x1,...` header). The sample carries
/// seed 0 and the file stem as its sampler name.
pub fn read_point_sample(path: impl AsRef<Path>) -> Result<PointSample> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = non_empty_lines(&text);
    let header = lines
        .next()
        .ok_or_else(|| MdfError::Parse(format!("{}: empty file", path.display())))?;
    let dim = header.split(',').count();
    for (i, col) in header.split(',').enumerate() {
        if col.trim() != format!("x{i}") {
            return Err(MdfError::Parse(format!(
                "{}: expected header column x{i}, found {col:?}",
                path.display()
            )));
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| parse_f64(c, &format!("{}:{}", path.display(), lineno + 2)))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != dim {
            return Err(MdfError::Parse(format!(
                "{}:{}: row has {} cells, header has {dim}",
                path.display(),
                lineno + 2,
                row.len()
            )));
        }
        rows.push(row);
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    PointSample::from_rows(&rows, 0, name)
}

pub fn write_point_sample(path: impl AsRef<Path>, points: &PointSample) -> Result<()> {
    let mut out = String::new();
    for i in 0..points.dim() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "x{i}").expect("string write");
    }
    out.push('\n');
    for p in points.iter() {
        let mut first = true;
        for &v in p {
            if !first {
                out.push(',');
            }
            write!(out, "{v}").expect("string write");
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a density function CSV (`r,value` header).
pub fn read_density_function(path: impl AsRef<Path>) -> Result<DensityFunction> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = non_empty_lines(&text);
    match lines.next() {
        Some(h) if h.trim() == "r,value" => {}
        other => {
            return Err(MdfError::Parse(format!(
                "{}: expected header \"r,value\", found {other:?}",
                path.display()
            )))
        }
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 2 {
            return Err(MdfError::Parse(format!(
                "{}:{}: expected two cells",
                path.display(),
                lineno + 2
            )));
        }
        radii.push(parse_f64(cells[0], "r")?);
        values.push(parse_f64(cells[1], "value")?);
    }
    DensityFunction::new(RadiusGrid::from_radii(radii)?, values)
}

pub fn write_density_function(path: impl AsRef<Path>, f: &DensityFunction) -> Result<()> {
    let mut out = String::from("r,value\n");
    for (r, v) in f.grid().radii().iter().zip(f.values()) {
        writeln!(out, "{r},{v}").expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a single-column weight file.
pub fn read_weights(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    non_empty_lines(&text)
        .enumerate()
        .map(|(lineno, line)| parse_f64(line, &format!("{}:{}", path.display(), lineno + 1)))
        .collect()
}
