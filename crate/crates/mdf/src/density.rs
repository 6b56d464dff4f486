//! K-functions sampled on a radius grid.

use crate::error::{MdfError, Result};
use crate::grid::RadiusGrid;

/// A K-function sampled on a [`RadiusGrid`]. Values are dimensionless
/// proportions (counts per sample for empirical estimators, volume ratios
/// for theoretical functions).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFunction {
    grid: RadiusGrid,
    values: Vec<f64>,
}

impl DensityFunction {
    pub fn new(grid: RadiusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(MdfError::InvalidArgument(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(MdfError::InvalidArgument(
                "density values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &RadiusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise multiplication by a positive constant, e.g. for
    /// proportion normalisation of Ripley estimates.
    pub fn scaled(&self, c: f64) -> DensityFunction {
        DensityFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Euclidean norm of the grid-sampled difference `sqrt(sum_i (f_i - g_i)^2)`.
///
/// The result is in the same proportion units as the inputs; callers that
/// need count units multiply by the sample size (see `manifold_score`).
pub fn l2_function_distance(f: &DensityFunction, g: &DensityFunction) -> Result<f64> {
    if f.grid != g.grid {
        return Err(MdfError::GridMismatch(
            "functions are sampled on different radius grids".into(),
        ));
    }
    let sum: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}
