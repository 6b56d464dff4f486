//! Classical Ripley K-function estimators on axis-aligned box domains,
//! with boundary erosion as the edge correction. Serves as a baseline and
//! cross-check for the manifold density function.

use crate::density::DensityFunction;
use crate::error::{MdfError, Result};
use crate::grid::RadiusGrid;
use crate::points::{euclidean, PointSample};

/// An axis-aligned box `[lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl RectDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(MdfError::Shape(
                "domain bounds must be nonempty and of equal dimension".into(),
            ));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(MdfError::InvalidArgument(format!(
                    "domain axis {i} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit cube `[0, 1]^d`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Lebesgue volume of the box.
    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }
}

/// Shrinks the box by `r` on every side: the inner region where balls of
/// radius `r` stay inside the domain.
pub fn erode_domain(dom: &RectDomain, r: f64) -> Result<RectDomain> {
    if r <= 0.0 || !r.is_finite() {
        return Err(MdfError::InvalidArgument(format!(
            "erosion radius must be positive, got {r}"
        )));
    }
    for (lo, hi) in dom.lower.iter().zip(&dom.upper) {
        if hi - lo <= 2.0 * r {
            return Err(MdfError::EmptyErosion { radius: r });
        }
    }
    RectDomain::new(
        dom.lower.iter().map(|lo| lo + r).collect(),
        dom.upper.iter().map(|hi| hi - r).collect(),
    )
}

/// Shared indicator sum: for every grid radius, the sum of `inv_weight[x]`
/// over points `x != p` with `|x - p| < r`, accumulated in ascending
/// distance order (ties by index) so results are reproducible bit-for-bit.
fn weighted_neighbor_sums(
    points: &PointSample,
    p: usize,
    grid: &RadiusGrid,
    inv_weights: &[f64],
) -> Vec<f64> {
    let mut dists: Vec<(f64, usize)> = (0..points.len())
        .filter(|&x| x != p)
        .map(|x| (euclidean(points.point(p), points.point(x)), x))
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut values = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut j = 0;
    for &r in grid.radii() {
        while j < dists.len() && dists[j].0 < r {
            acc += inv_weights[dists[j].1];
            j += 1;
        }
        values.push(acc);
    }
    values
}

fn check_point_index(points: &PointSample, p: usize) -> Result<()> {
    if p >= points.len() {
        return Err(MdfError::InvalidArgument(format!(
            "point index {p} out of range for {} points",
            points.len()
        )));
    }
    Ok(())
}

fn check_domain(points: &PointSample, dom: &RectDomain) -> Result<()> {
    if points.dim() != dom.dim() {
        return Err(MdfError::Shape(format!(
            "points have dimension {} but the domain has dimension {}",
            points.dim(),
            dom.dim()
        )));
    }
    Ok(())
}

/// Local empirical Ripley K at point `p`:
/// `lambda^-1 * sum_{x != p} I(|x - p| < r)` with `lambda = m / vol(dom)`.
///
/// `p` must lie in the domain eroded by the largest grid radius; by the
/// usual convention the point itself is not counted (pass
/// `include_self = true` to count it, for comparisons with the MDF).
pub fn ripley_local(
    points: &PointSample,
    p: usize,
    grid: &RadiusGrid,
    dom: &RectDomain,
    include_self: bool,
) -> Result<DensityFunction> {
    check_point_index(points, p)?;
    check_domain(points, dom)?;
    let eroded = erode_domain(dom, grid.r_max())?;
    if !eroded.contains(points.point(p)) {
        return Err(MdfError::Boundary { index: p });
    }
    let inv_lambda = dom.volume() / points.len() as f64;
    let inv_weights = vec![inv_lambda; points.len()];
    let mut values = weighted_neighbor_sums(points, p, grid, &inv_weights);
    if include_self {
        for v in &mut values {
            *v += inv_lambda;
        }
    }
    DensityFunction::new(grid.clone(), values)
}

/// Aggregated empirical Ripley K: the mean of [`ripley_local`] over all
/// points inside the eroded domain.
pub fn ripley_aggregated(
    points: &PointSample,
    grid: &RadiusGrid,
    dom: &RectDomain,
    include_self: bool,
) -> Result<DensityFunction> {
    check_domain(points, dom)?;
    let eroded = erode_domain(dom, grid.r_max())?;
    let interior: Vec<usize> = (0..points.len())
        .filter(|&i| eroded.contains(points.point(i)))
        .collect();
    if interior.is_empty() {
        return Err(MdfError::Boundary { index: 0 });
    }
    let mut sums = vec![0.0; grid.len()];
    for &p in &interior {
        let local = ripley_local(points, p, grid, dom, include_self)?;
        for (s, v) in sums.iter_mut().zip(local.values()) {
            *s += v;
        }
    }
    let n = interior.len() as f64;
    DensityFunction::new(grid.clone(), sums.iter().map(|s| s / n).collect())
}

/// Inhomogeneous local Ripley K: neighbors weighted by the reciprocal of
/// their estimated intensity, `sum_{x != p} weight[x]^-1 I(|x - p| < r)`.
/// With constant weights `m / vol(dom)` this reduces to [`ripley_local`]
/// bit-for-bit.
pub fn ripley_inhomogeneous(
    points: &PointSample,
    weights: &[f64],
    p: usize,
    grid: &RadiusGrid,
    dom: &RectDomain,
) -> Result<DensityFunction> {
    check_point_index(points, p)?;
    check_domain(points, dom)?;
    if weights.len() != points.len() {
        return Err(MdfError::InvalidArgument(format!(
            "{} weights supplied for {} points",
            weights.len(),
            points.len()
        )));
    }
    if !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
        return Err(MdfError::InvalidArgument(
            "intensity weights must be positive and finite".into(),
        ));
    }
    let eroded = erode_domain(dom, grid.r_max())?;
    if !eroded.contains(points.point(p)) {
        return Err(MdfError::Boundary { index: p });
    }
    let inv_weights: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    let values = weighted_neighbor_sums(points, p, grid, &inv_weights);
    DensityFunction::new(grid.clone(), values)
}

/// Divides a K-function by the domain volume, giving the proportion of
/// sample points expected in each ball rather than a count per intensity.
pub fn proportion_normalized(k: &DensityFunction, dom: &RectDomain) -> DensityFunction {
    k.scaled(1.0 / dom.volume())
}
