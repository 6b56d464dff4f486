//! Declared properties of the latent manifold.

use crate::error::{MdfError, Result};

/// Curvature descriptor of a manifold model. Exactly one is active.
#[derive(Debug, Clone, PartialEq)]
pub enum Curvature {
    /// Zero scalar curvature everywhere; no correction factor.
    Flat,
    /// Scalar curvature supplied per sample point (externally, e.g. from an
    /// analytic formula). Using this makes a score non-intrinsic.
    PointwiseScalar(Vec<f64>),
    /// Two-manifold described by its Euler characteristic; with `area`
    /// present the exact correction is used, otherwise the heuristic one.
    Surface { chi: i64, area: Option<f64> },
    /// Hypersurface described by the first Laplacian eigenvalue.
    Hypersurface { lambda1: f64 },
}

/// Declared properties of the latent manifold: intrinsic dimension,
/// optional volume, and one curvature descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    dimension: usize,
    volume: Option<f64>,
    curvature: Curvature,
}

impl ManifoldModel {
    pub fn new(dimension: usize, volume: Option<f64>, curvature: Curvature) -> Result<Self> {
        if dimension == 0 {
            return Err(MdfError::InvalidArgument(
                "manifold dimension must be positive".into(),
            ));
        }
        if let Some(v) = volume {
            if v <= 0.0 || !v.is_finite() {
                return Err(MdfError::InvalidArgument(format!(
                    "volume must be positive and finite, got {v}"
                )));
            }
        }
        match &curvature {
            Curvature::Surface { area, .. } => {
                if dimension != 2 {
                    return Err(MdfError::InvalidArgument(format!(
                        "surface curvature descriptor requires dimension 2, got {dimension}"
                    )));
                }
                if let Some(a) = area {
                    if *a <= 0.0 || !a.is_finite() {
                        return Err(MdfError::InvalidArgument(format!(
                            "surface area must be positive and finite, got {a}"
                        )));
                    }
                }
            }
            Curvature::Hypersurface { lambda1 } => {
                if *lambda1 <= 0.0 || !lambda1.is_finite() {
                    return Err(MdfError::InvalidArgument(format!(
                        "lambda1 must be positive and finite, got {lambda1}"
                    )));
                }
            }
            Curvature::PointwiseScalar(values) => {
                if values.is_empty() || !values.iter().all(|v| v.is_finite()) {
                    return Err(MdfError::InvalidArgument(
                        "pointwise scalar curvature must be a nonempty finite list".into(),
                    ));
                }
            }
            Curvature::Flat => {}
        }
        Ok(Self {
            dimension,
            volume,
            curvature,
        })
    }

    /// Convenience constructor for a flat model.
    pub fn flat(dimension: usize, volume: Option<f64>) -> Result<Self> {
        Self::new(dimension, volume, Curvature::Flat)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn volume(&self) -> Option<f64> {
        self.volume
    }

    pub fn curvature(&self) -> &Curvature {
        &self.curvature
    }

    /// Whether scoring with this model uses only the distance matrix and
    /// the declared global invariants. Pointwise curvature needs external
    /// per-point data, so it is not intrinsic.
    pub fn is_intrinsic(&self) -> bool {
        !matches!(self.curvature, Curvature::PointwiseScalar(_))
    }
}
