//! Pairwise distance matrices, the universal estimator input.

use crate::error::{MdfError, Result};

/// Tolerated asymmetry |d_ij - d_ji| when symmetrization is not requested.
/// Graph-reconstructed matrices can be slightly asymmetric from
/// floating-point path ties.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-9;

/// Tolerated magnitude of diagonal entries.
pub const DIAGONAL_TOLERANCE: f64 = 1e-12;

/// A square, symmetric matrix of pairwise distances with a zero diagonal
/// and finite, nonnegative entries. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates a raw square matrix into a `DistanceMatrix`.
    ///
    /// With `symmetrize`, entries are first replaced by the arithmetic mean
    /// of the two directed entries. Without it, asymmetry beyond
    /// [`ASYMMETRY_TOLERANCE`] is an error; asymmetry within tolerance is
    /// averaged away so the result is exactly symmetric either way.
    /// Diagonal entries beyond [`DIAGONAL_TOLERANCE`] are an error and are
    /// stored as exact zeros otherwise.
    pub fn from_raw(raw: &[Vec<f64>], symmetrize: bool) -> Result<Self> {
        let m = raw.len();
        if m == 0 {
            return Err(MdfError::Shape("matrix must have at least one row".into()));
        }
        for (i, row) in raw.iter().enumerate() {
            if row.len() != m {
                return Err(MdfError::Shape(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
        }
        for (i, row) in raw.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MdfError::Validation(format!(
                        "entry ({i},{j}) is not finite"
                    )));
                }
                if v < 0.0 {
                    return Err(MdfError::Validation(format!(
                        "entry ({i},{j}) = {v} is negative"
                    )));
                }
            }
        }
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            let d = raw[i][i];
            if d.abs() > DIAGONAL_TOLERANCE {
                return Err(MdfError::Validation(format!(
                    "diagonal entry ({i},{i}) = {d} exceeds tolerance"
                )));
            }
            for j in (i + 1)..m {
                let a = raw[i][j];
                let b = raw[j][i];
                if !symmetrize && (a - b).abs() > ASYMMETRY_TOLERANCE {
                    return Err(MdfError::Validation(format!(
                        "entries ({i},{j}) = {a} and ({j},{i}) = {b} are asymmetric"
                    )));
                }
                let v = if a == b { a } else { 0.5 * (a + b) };
                entries[i * m + j] = v;
                entries[j * m + i] = v;
            }
        }
        Ok(Self { size: m, entries })
    }

    /// Builds a matrix directly from a symmetric distance closure.
    /// `dist(i, j)` must already be symmetric with `dist(i, i) = 0`.
    pub fn from_fn(m: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(MdfError::Shape("matrix must have at least one row".into()));
        }
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            for j in (i + 1)..m {
                let v = dist(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(MdfError::Validation(format!(
                        "distance ({i},{j}) = {v} is invalid"
                    )));
                }
                entries[i * m + j] = v;
                entries[j * m + i] = v;
            }
        }
        Ok(Self { size: m, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Off-diagonal entries d(i, j) with i < j that are strictly positive,
    /// in row-major order. Used by percentile-based grid rules.
    pub fn positive_distances(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.size * (self.size - 1) / 2);
        for i in 0..self.size {
            for j in (i + 1)..self.size {
                let d = self.get(i, j);
                if d > 0.0 {
                    out.push(d);
                }
            }
        }
        out
    }

    /// Largest entry of the matrix.
    pub fn max_distance(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_metric_matrix() {
        let d = DistanceMatrix::from_raw(&[vec![0.0, 1.0], vec![1.0, 0.0]], false).unwrap();
        assert_eq!(d.size(), 2);
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(d.get(1, 0), 1.0);
    }

    #[test]
    fn symmetrizes_by_averaging() {
        let d = DistanceMatrix::from_raw(&[vec![0.0, 1.0], vec![2.0, 0.0]], true).unwrap();
        assert_eq!(d.get(0, 1), 1.5);
        assert_eq!(d.get(1, 0), 1.5);
    }

    #[test]
    fn rejects_negative_entries() {
        let r = DistanceMatrix::from_raw(&[vec![0.0, -1.0], vec![-1.0, 0.0]], false);
        assert!(matches!(r, Err(MdfError::Validation(_))));
    }

    #[test]
    fn rejects_asymmetry_without_symmetrize() {
        let r = DistanceMatrix::from_raw(&[vec![0.0, 1.0], vec![2.0, 0.0]], false);
        assert!(matches!(r, Err(MdfError::Validation(_))));
    }

    #[test]
    fn rejects_shape_and_diagonal_and_nonfinite() {
        assert!(matches!(
            DistanceMatrix::from_raw(&[vec![0.0, 1.0]], false),
            Err(MdfError::Shape(_))
        ));
        assert!(matches!(
            DistanceMatrix::from_raw(&[vec![1e-6, 1.0], vec![1.0, 0.0]], false),
            Err(MdfError::Validation(_))
        ));
        assert!(matches!(
            DistanceMatrix::from_raw(&[vec![0.0, f64::NAN], vec![1.0, 0.0]], false),
            Err(MdfError::Validation(_))
        ));
        assert!(matches!(
            DistanceMatrix::from_raw(&[], false),
            Err(MdfError::Shape(_))
        ));
    }

    #[test]
    fn single_point_matrix() {
        let d = DistanceMatrix::from_raw(&[vec![0.0]], false).unwrap();
        assert_eq!(d.size(), 1);
        assert!(d.positive_distances().is_empty());
    }

    proptest! {
        // Validated output satisfies all invariants regardless of the
        // (tolerably asymmetric) input.
        #[test]
        fn output_is_exactly_symmetric_with_zero_diagonal(
            vals in proptest::collection::vec(1.0f64..100.0, 16),
            jitter in proptest::collection::vec(-5e-10f64..5e-10, 16),
        ) {
            let m = 4;
            let mut raw = vec![vec![0.0; m]; m];
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        let base = vals[i.min(j) * m + i.max(j)];
                        raw[i][j] = base + jitter[i * m + j].abs() * if i < j { 1.0 } else { -1.0 };
                    }
                }
            }
            let d = DistanceMatrix::from_raw(&raw, false).unwrap();
            for i in 0..m {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..m {
                    prop_assert_eq!(d.get(i, j), d.get(j, i));
                    prop_assert!(d.get(i, j) >= 0.0 && d.get(i, j).is_finite());
                }
            }
        }
    }
}
