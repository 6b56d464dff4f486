//! Radius grids on which all K-functions are sampled.

use crate::error::{MdfError, Result};

/// A strictly increasing sequence of positive radii ending at `r_max`.
///
/// Every density function in this crate is sampled on such a grid. Grids
/// start strictly above zero because every estimator is identically zero
/// at r = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusGrid {
    radii: Vec<f64>,
}

impl RadiusGrid {
    /// Builds `steps` linearly spaced radii on `(0, r_max]`:
    /// `radii[i] = r_max * (i + 1) / steps`. The last radius is exactly
    /// `r_max`.
    pub fn linear(r_max: f64, steps: usize) -> Result<Self> {
        if r_max <= 0.0 || !r_max.is_finite() {
            return Err(MdfError::InvalidArgument(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }
        if steps < 2 {
            return Err(MdfError::InvalidArgument(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        let radii = (0..steps)
            .map(|i| r_max * ((i + 1) as f64 / steps as f64))
            .collect();
        Self::from_radii(radii)
    }

    /// Validates an explicit radius sequence.
    pub fn from_radii(radii: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 {
            return Err(MdfError::InvalidArgument(format!(
                "grid needs at least 2 radii, got {}",
                radii.len()
            )));
        }
        if !radii.iter().all(|r| r.is_finite() && *r > 0.0) {
            return Err(MdfError::InvalidArgument(
                "grid radii must be positive and finite".into(),
            ));
        }
        if !radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(MdfError::InvalidArgument(
                "grid radii must be strictly increasing".into(),
            ));
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least two radii
    }

    /// The largest (final) radius.
    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("grid is nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_spacing_matches_definition() {
        let g = RadiusGrid::linear(1.0, 4).unwrap();
        assert_eq!(g.radii(), &[0.25, 0.5, 0.75, 1.0]);
        let g = RadiusGrid::linear(0.3, 2).unwrap();
        assert_eq!(g.radii(), &[0.15, 0.3]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(RadiusGrid::linear(0.0, 4).is_err());
        assert!(RadiusGrid::linear(-1.0, 4).is_err());
        assert!(RadiusGrid::linear(1.0, 1).is_err());
        assert!(RadiusGrid::from_radii(vec![0.1, 0.1]).is_err());
        assert!(RadiusGrid::from_radii(vec![0.2, 0.1]).is_err());
        assert!(RadiusGrid::from_radii(vec![0.0, 0.1]).is_err());
    }

    proptest! {
        #[test]
        fn linear_grid_increasing_and_ends_at_r_max(
            r_max in 1e-6f64..1e6,
            steps in 2usize..400,
        ) {
            let g = RadiusGrid::linear(r_max, steps).unwrap();
            prop_assert_eq!(g.len(), steps);
            prop_assert!(g.radii().windows(2).all(|w| w[0] < w[1]));
            // (i+1)/steps is exactly 1.0 at the last step, so the final
            // radius is exactly r_max.
            prop_assert_eq!(g.r_max(), r_max);
        }
    }
}
