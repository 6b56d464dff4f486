//! Point clouds in ambient Euclidean coordinates.

use crate::error::{MdfError, Result};

/// A finite list of points in ambient Euclidean coordinates together with
/// generation metadata (seed and sampler name) for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    data: Vec<f64>, // row-major, len = m * dim
    dim: usize,
    seed: u64,
    sampler: String,
}

impl PointSample {
    pub fn new(data: Vec<f64>, dim: usize, seed: u64, sampler: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(MdfError::InvalidArgument("dimension must be positive".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(MdfError::InvalidArgument(format!(
                "coordinate buffer of length {} is not a nonempty multiple of dim {dim}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(MdfError::InvalidArgument(
                "coordinates must be finite".into(),
            ));
        }
        Ok(Self {
            data,
            dim,
            seed,
            sampler: sampler.into(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], seed: u64, sampler: impl Into<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(MdfError::InvalidArgument("no points".into()));
        }
        let dim = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(MdfError::Shape(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(data, dim, seed, sampler)
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least one point
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sampler(&self) -> &str {
        &self.sampler
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// Euclidean distance between two coordinate slices of equal length.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}
