//! Manifold density function estimators, the manifold score, and the
//! intrinsic parameter searches over Euler characteristic, lambda_1, and
//! dimension.
//!
//! All estimators consume a [`SortedDistanceMatrix`] and count
//! neighbors in open balls by merging each sorted row against the radius
//! grid. Summations run in a fixed order so results are bit-stable
//! regardless of how callers parallelize.

use crate::density::{l2_function_distance, DensityFunction};
use crate::distance::DistanceMatrix;
use crate::error::{MdfError, Result};
use crate::geometry::{
    euclidean_ball_volume, surface_aggregate_factor, theoretical_mdf, Lambda1Candidate,
    ScalingFactor,
};
use crate::grid::RadiusGrid;
use crate::model::ManifoldModel;

/// Row-sorted view of a distance matrix: row `i` holds the m distances
/// from point `i` (self-distance 0 included) in ascending order, so ball
/// counts reduce to binary searches or grid merges.
#[derive(Debug, Clone)]
pub struct SortedDistanceMatrix {
    rows: Vec<Vec<f64>>,
}

/// Sorts every row of a distance matrix ascending.
pub fn sort_rows(d: &DistanceMatrix) -> SortedDistanceMatrix {
    let rows = (0..d.size())
        .map(|i| {
            let mut row = d.row(i).to_vec();
            row.sort_by(f64::total_cmp);
            row
        })
        .collect();
    SortedDistanceMatrix { rows }
}

impl SortedDistanceMatrix {
    /// Number of points.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Largest distance in the matrix.
    pub fn max_distance(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.last())
            .fold(0.0, |a, &b| a.max(b))
    }

    /// Number of points strictly inside the open ball of radius `r`
    /// around point `p`. The point itself is counted iff `include_self`.
    pub fn ball_count(&self, p: usize, r: f64, include_self: bool) -> Result<usize> {
        if p >= self.rows.len() {
            return Err(MdfError::InvalidArgument(format!(
                "point index {p} out of range for {} points",
                self.rows.len()
            )));
        }
        debug_assert!(r > 0.0);
        let within = self.rows[p].partition_point(|&d| d < r);
        // The self-distance 0 is always < r, so dropping self removes one.
        Ok(if include_self { within } else { within - 1 })
    }

    /// Ball counts for every radius of the grid in one merge pass.
    fn counts_over_grid(&self, p: usize, grid: &RadiusGrid, include_self: bool) -> Vec<usize> {
        let row = &self.rows[p];
        let mut counts = Vec::with_capacity(grid.len());
        let mut j = 0;
        for &r in grid.radii() {
            while j < row.len() && row[j] < r {
                j += 1;
            }
            counts.push(if include_self { j } else { j - 1 });
        }
        counts
    }
}

/// Local manifold density function at point `p`: the curvature-corrected
/// fraction of sample points inside each grid ball,
/// `factor(p, r) * |B_r(p) ∩ X| / m`.
pub fn local_mdf(
    s: &SortedDistanceMatrix,
    p: usize,
    grid: &RadiusGrid,
    model: &ManifoldModel,
    include_self: bool,
) -> Result<DensityFunction> {
    if p >= s.size() {
        return Err(MdfError::InvalidArgument(format!(
            "point index {p} out of range for {} points",
            s.size()
        )));
    }
    let m = s.size() as f64;
    let factor = ScalingFactor::at_point(model, p)?;
    let counts = s.counts_over_grid(p, grid, include_self);
    let values = grid
        .radii()
        .iter()
        .zip(&counts)
        .map(|(&r, &c)| Ok(factor.evaluate(r)? * (c as f64 / m)))
        .collect::<Result<Vec<f64>>>()?;
    DensityFunction::new(grid.clone(), values)
}

/// Aggregated manifold density function:
/// `(1/m^2) * sum_p factor(p, r) * |B_r(p) ∩ X|`.
///
/// For global curvature descriptors the factor is pulled outside the sum
/// over points; for pointwise scalar curvature it stays inside, applied in
/// point-index order.
pub fn aggregated_mdf(
    s: &SortedDistanceMatrix,
    grid: &RadiusGrid,
    model: &ManifoldModel,
    include_self: bool,
) -> Result<DensityFunction> {
    match ScalingFactor::global_for(model) {
        Some(factor) => {
            let flat = flat_aggregated_values(s, grid, include_self);
            let values = grid
                .radii()
                .iter()
                .zip(&flat)
                .map(|(&r, &v)| Ok(factor.evaluate(r)? * v))
                .collect::<Result<Vec<f64>>>()?;
            DensityFunction::new(grid.clone(), values)
        }
        None => {
            let m = s.size();
            let mm = (m * m) as f64;
            let mut sums = vec![0.0; grid.len()];
            for p in 0..m {
                let factor = ScalingFactor::at_point(model, p)?;
                let counts = s.counts_over_grid(p, grid, include_self);
                for (i, (&r, &c)) in grid.radii().iter().zip(&counts).enumerate() {
                    sums[i] += factor.evaluate(r)? * c as f64;
                }
            }
            let values = sums.iter().map(|v| v / mm).collect();
            DensityFunction::new(grid.clone(), values)
        }
    }
}

/// Unscaled aggregated values `total_count(r) / m^2`, shared by the flat
/// estimator and by every global scaling so that scaled variants are
/// bitwise products of these values.
fn flat_aggregated_values(s: &SortedDistanceMatrix, grid: &RadiusGrid, include_self: bool) -> Vec<f64> {
    let m = s.size();
    let mut totals = vec![0usize; grid.len()];
    for p in 0..m {
        let counts = s.counts_over_grid(p, grid, include_self);
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t += c;
        }
    }
    let mm = (m * m) as f64;
    totals.iter().map(|&t| t as f64 / mm).collect()
}

/// A manifold score together with the quantities it was computed from.
#[derive(Debug, Clone)]
pub struct ScoreReport {
    /// `1 - ||k_theo - k_hat||_2`; 1 for a perfect fit, unbounded below.
    pub score: f64,
    /// The same error in count units: `m * ||k_theo - k_hat||_2`.
    pub error: f64,
    pub grid: RadiusGrid,
    /// Description of the scaling that produced `k_hat`, when known.
    pub scaling: Option<String>,
    pub sample_size: usize,
}

impl ScoreReport {
    /// A negative score means the estimate is farther from the theoretical
    /// function than the zero function; reports flag it.
    pub fn is_degenerate(&self) -> bool {
        self.score < 0.0
    }

    pub fn with_scaling(mut self, scaling: impl Into<String>) -> Self {
        self.scaling = Some(scaling.into());
        self
    }
}

/// The manifold score `1 - (1/m) * (m * ||k_theo - k_hat||_2)`. The count
/// scaling and the normalization cancel, so the score is `1 - l2`; the
/// count-unit error is reported alongside so its `<= m * sqrt(G)` bound
/// stays checkable.
pub fn manifold_score(
    k_theo: &DensityFunction,
    k_hat: &DensityFunction,
    m: usize,
) -> Result<ScoreReport> {
    let l2 = l2_function_distance(k_theo, k_hat)?;
    Ok(ScoreReport {
        score: 1.0 - l2,
        error: m as f64 * l2,
        grid: k_theo.grid().clone(),
        scaling: None,
        sample_size: m,
    })
}

/// Least-squares fit of the theoretical form `ball_volume(n, r) / V` to
/// the small-radius part of an empirical MDF, for runs where no manifold
/// volume is supplied. Uses the first quarter of the grid (at least two
/// points): minimizing `sum (c * b_i - k_i)^2` over `c = 1/V` gives
/// `c = sum(b_i k_i) / sum(b_i^2)`. Self counts are excluded: at small
/// radii the constant 1/m self term would bias the fitted density.
pub fn fit_volume(s: &SortedDistanceMatrix, grid: &RadiusGrid, n: usize) -> Result<f64> {
    let flat = flat_aggregated_values(s, grid, false);
    let take = (grid.len() / 4).max(2).min(grid.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (&r, &k) in grid.radii().iter().zip(&flat).take(take) {
        let b = euclidean_ball_volume(n, r);
        num += b * k;
        den += b * b;
    }
    if num <= 0.0 || den <= 0.0 {
        return Err(MdfError::NoCandidate(
            "volume fit failed: no mass at small radii".into(),
        ));
    }
    Ok(den / num)
}

fn score_scaled_flat(
    flat: &[f64],
    factor: &ScalingFactor,
    grid: &RadiusGrid,
    k_theo: &DensityFunction,
    m: usize,
) -> Result<ScoreReport> {
    let values = grid
        .radii()
        .iter()
        .zip(flat)
        .map(|(&r, &v)| Ok(factor.evaluate(r)? * v))
        .collect::<Result<Vec<f64>>>()?;
    let k_hat = DensityFunction::new(grid.clone(), values)?;
    Ok(manifold_score(k_theo, &k_hat, m)?.with_scaling(factor.to_string()))
}

/// Searches the integer interval `chi_range` for the Euler characteristic
/// whose heuristic-scaled aggregated MDF best matches the theoretical MDF
/// of a surface with the given volume. Candidates whose scaling is not
/// admissible are skipped. Ties prefer smaller `|chi|`, then larger `chi`.
pub fn search_euler_characteristic(
    s: &SortedDistanceMatrix,
    grid: &RadiusGrid,
    volume: f64,
    chi_range: std::ops::RangeInclusive<i64>,
) -> Result<(i64, ScoreReport)> {
    if chi_range.is_empty() {
        return Err(MdfError::NoCandidate("empty chi range".into()));
    }
    let model = ManifoldModel::flat(2, Some(volume))?;
    let k_theo = theoretical_mdf(&model, grid)?;
    let flat = flat_aggregated_values(s, grid, true);

    let mut candidates: Vec<i64> = chi_range.collect();
    candidates.sort_by_key(|&chi| (chi.abs(), -chi));

    let mut best: Option<(i64, ScoreReport)> = None;
    for chi in candidates {
        if surface_aggregate_factor(chi, grid.r_max(), None).is_err() {
            continue; // heuristic denominator not positive for this chi
        }
        let factor = ScalingFactor::SurfaceHeuristic { chi };
        let report = score_scaled_flat(&flat, &factor, grid, &k_theo, s.size())?;
        let better = match &best {
            None => true,
            Some((_, b)) => report.score > b.score,
        };
        if better {
            best = Some((chi, report));
        }
    }
    best.ok_or_else(|| MdfError::NoCandidate("no admissible Euler characteristic".into()))
}

/// Searches a list of lambda_1 candidates for the one whose
/// hypersurface-scaled aggregated MDF best matches the theoretical MDF.
/// Candidates singular anywhere on the grid are skipped; ties prefer the
/// smaller lambda_1.
pub fn search_lambda1(
    s: &SortedDistanceMatrix,
    grid: &RadiusGrid,
    volume: f64,
    n: usize,
    candidates: &[Lambda1Candidate],
) -> Result<(Lambda1Candidate, ScoreReport)> {
    if candidates.is_empty() {
        return Err(MdfError::NoCandidate("empty lambda1 candidate list".into()));
    }
    let model = ManifoldModel::flat(n, Some(volume))?;
    let k_theo = theoretical_mdf(&model, grid)?;
    let flat = flat_aggregated_values(s, grid, true);

    let mut ordered: Vec<&Lambda1Candidate> = candidates.iter().collect();
    ordered.sort_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.name.cmp(&b.name)));

    let mut best: Option<(Lambda1Candidate, ScoreReport)> = None;
    for cand in ordered {
        let factor = ScalingFactor::Hypersurface {
            lambda1: cand.value,
            n,
        };
        // The factor is largest at r_max; if it is admissible there it is
        // admissible on the whole grid.
        if factor.evaluate(grid.r_max()).is_err() {
            continue;
        }
        let report = score_scaled_flat(&flat, &factor, grid, &k_theo, s.size())?;
        let better = match &best {
            None => true,
            Some((_, b)) => report.score > b.score,
        };
        if better {
            best = Some((cand.clone(), report));
        }
    }
    best.ok_or_else(|| MdfError::NoCandidate("all lambda1 candidates are singular on the grid".into()))
}

/// Curvature descriptor family used by the dimension search; the concrete
/// factor is instantiated at each candidate dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureFamily {
    Flat,
    Surface { chi: i64, area: Option<f64> },
    Hypersurface { lambda1: f64 },
}

impl CurvatureFamily {
    fn factor_at(&self, n: usize) -> ScalingFactor {
        match *self {
            CurvatureFamily::Flat => ScalingFactor::Flat,
            // The surface factors do not involve the dimension.
            CurvatureFamily::Surface { chi, area: Some(a) } => {
                ScalingFactor::SurfaceExact { chi, area: a }
            }
            CurvatureFamily::Surface { chi, area: None } => ScalingFactor::SurfaceHeuristic { chi },
            CurvatureFamily::Hypersurface { lambda1 } => ScalingFactor::Hypersurface { lambda1, n },
        }
    }
}

/// Searches an integer interval of dimensions for the one maximizing the
/// manifold score, with the curvature family instantiated at each
/// candidate dimension. Ties prefer the smaller dimension.
pub fn search_dimension(
    s: &SortedDistanceMatrix,
    grid: &RadiusGrid,
    volume: f64,
    d_range: std::ops::RangeInclusive<usize>,
    family: &CurvatureFamily,
) -> Result<(usize, ScoreReport)> {
    if d_range.is_empty() {
        return Err(MdfError::NoCandidate("empty dimension range".into()));
    }
    let flat = flat_aggregated_values(s, grid, true);

    let mut best: Option<(usize, ScoreReport)> = None;
    for n in d_range {
        if n == 0 {
            continue;
        }
        let k_theo_values: Vec<f64> = grid
            .radii()
            .iter()
            .map(|&r| euclidean_ball_volume(n, r) / volume)
            .collect();
        let k_theo = DensityFunction::new(grid.clone(), k_theo_values)?;
        let factor = family.factor_at(n);
        if factor.evaluate(grid.r_max()).is_err() {
            continue;
        }
        let report = score_scaled_flat(&flat, &factor, grid, &k_theo, s.size())?;
        let better = match &best {
            None => true,
            Some((_, b)) => report.score > b.score,
        };
        if better {
            best = Some((n, report));
        }
    }
    best.ok_or_else(|| MdfError::NoCandidate("no admissible dimension".into()))
}
