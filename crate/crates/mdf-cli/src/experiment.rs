//! Experiment harness: samples, reconstructs distances, scores every
//! configured column over (size, trial) cells, and writes the report
//! files. Cells run in parallel but results are collected and written in
//! a fixed order, and every random stream is derived from
//! (base seed, size, trial, variant), so outputs are byte-identical
//! across runs and worker counts.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use mdf::{
    aggregated_mdf, fit_volume, flat_torus_distance_matrix, great_circle_matrix,
    knn_geodesic_matrix, lift_to_dimension, manifold_score, pca_embed, sample_points,
    sphere_surface_area, theoretical_mdf, DensityFunction, DistanceMatrix, Family, ManifoldModel,
    PointSample, RadiusGrid, SamplerSpec, ScalingFactor, ScoreReport, SortedDistanceMatrix,
    Variant,
};

use crate::config::{ColumnScaling, ExperimentConfig, GridSection, VolumeSpec};

/// Everything a scored cell reports.
#[derive(Debug, Clone)]
pub struct CellData {
    pub report: ScoreReport,
    pub k_theo: DensityFunction,
    pub k_hat: DensityFunction,
    pub volume: f64,
    pub volume_source: &'static str,
    pub intrinsic: bool,
}

/// Nearest-rank percentile of an unsorted list.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((sorted.len() as f64 * q).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

/// Builds the radius grid for a matrix under the configured rule.
pub fn build_grid(matrix: &DistanceMatrix, grid: &GridSection) -> Result<RadiusGrid> {
    let r_max = match grid.rule.as_str() {
        "fixed" => grid.r_max.context("fixed rule needs r_max")?,
        "percentile" => {
            let q = grid.percentile.context("percentile rule needs percentile")?;
            percentile(&matrix.positive_distances(), q)
                .context("matrix has no positive distances")?
        }
        other => bail!("unknown grid rule {other:?}"),
    };
    Ok(RadiusGrid::linear(r_max, grid.steps)?)
}

/// The analytic volume of a sampler family, used when the config says
/// `volume = "analytic"`. This is a supervised input: the harness knows
/// which manifold it sampled.
pub fn analytic_volume(family: Family) -> f64 {
    match family {
        Family::FlatTorus => 1.0,
        Family::Sphere { ambient_dim } | Family::Hypersphere { ambient_dim } => {
            sphere_surface_area(ambient_dim)
        }
        Family::KleinBottle => mdf::sampler::klein::tables().area,
    }
}

fn scaling_factor(scaling: &ColumnScaling, dimension: usize) -> ScalingFactor {
    match *scaling {
        ColumnScaling::Flat => ScalingFactor::Flat,
        ColumnScaling::Surface { chi, area: Some(a) } => ScalingFactor::SurfaceExact { chi, area: a },
        ColumnScaling::Surface { chi, area: None } => ScalingFactor::SurfaceHeuristic { chi },
        ColumnScaling::Hypersurface { lambda1 } => ScalingFactor::Hypersurface {
            lambda1,
            n: dimension,
        },
    }
}

/// Scores one distance matrix against the theoretical MDF of the model,
/// with the given column scaling applied to the flat aggregated estimate.
pub fn score_matrix(
    matrix: &DistanceMatrix,
    grid_cfg: &GridSection,
    dimension: usize,
    volume: (f64, &'static str),
    scaling: &ColumnScaling,
    include_self: bool,
) -> Result<CellData> {
    let sorted = mdf::sort_rows(matrix);
    let grid = build_grid(matrix, grid_cfg)?;
    score_sorted(&sorted, &grid, dimension, volume, scaling, include_self)
}

pub fn score_sorted(
    sorted: &SortedDistanceMatrix,
    grid: &RadiusGrid,
    dimension: usize,
    (volume, volume_source): (f64, &'static str),
    scaling: &ColumnScaling,
    include_self: bool,
) -> Result<CellData> {
    let m = sorted.size();
    let model = ManifoldModel::flat(dimension, Some(volume))?;
    let k_theo = theoretical_mdf(&model, grid)?;
    let flat_model = ManifoldModel::flat(dimension, None)?;
    let flat = aggregated_mdf(sorted, grid, &flat_model, include_self)?;
    let factor = scaling_factor(scaling, dimension);
    let values = grid
        .radii()
        .iter()
        .zip(flat.values())
        .map(|(&r, &v)| Ok(factor.evaluate(r)? * v))
        .collect::<mdf::Result<Vec<f64>>>()?;
    let k_hat = DensityFunction::new(grid.clone(), values)?;
    let report = manifold_score(&k_theo, &k_hat, m)?.with_scaling(factor.to_string());
    Ok(CellData {
        report,
        k_theo,
        k_hat,
        volume,
        volume_source,
        // curvature descriptors and fitted/analytic volumes use only
        // global invariants; nothing here needs per-point ground truth
        intrinsic: true,
    })
}

fn resolve_volume(
    spec: &VolumeSpec,
    family: Family,
    sorted: &SortedDistanceMatrix,
    grid: &RadiusGrid,
    dimension: usize,
) -> Result<(f64, &'static str)> {
    Ok(match spec {
        VolumeSpec::Value(v) => (*v, "supplied"),
        VolumeSpec::Rule(rule) if rule == "analytic" => (analytic_volume(family), "analytic"),
        VolumeSpec::Rule(rule) if rule == "fit" => (fit_volume(sorted, grid, dimension)?, "fitted"),
        VolumeSpec::Rule(other) => bail!("unknown volume rule {other:?}"),
    })
}

const LIFT_SALT: u64 = 0x6C69_6674; // "lift"

fn variant_salts(variant: Variant) -> [u64; 2] {
    match variant {
        Variant::Uniform => [1, 0],
        Variant::Cross => [2, 0],
        Variant::CrossWithNoise(f) => [3, f.to_bits()],
        Variant::SineDensity => [4, 0],
    }
}

/// One (size, trial, column-group) work unit: columns sharing a variant
/// and embedding share the sample and the distance matrix.
struct Job {
    size_idx: usize,
    trial: usize,
    group_idx: usize,
}

struct Group {
    variant: Variant,
    embed: Option<usize>,
    column_indices: Vec<usize>,
}

struct CellOutcome {
    size: usize,
    trial: usize,
    label: String,
    result: std::result::Result<CellData, String>,
}

fn build_matrix(
    config: &ExperimentConfig,
    family: Family,
    points: &PointSample,
) -> Result<DistanceMatrix> {
    match config.distances.method.as_str() {
        "exact" => match family {
            Family::FlatTorus => Ok(flat_torus_distance_matrix(points)?),
            Family::Sphere { .. } | Family::Hypersphere { .. } => {
                Ok(great_circle_matrix(points)?)
            }
            Family::KleinBottle => bail!("no exact geodesics for the Klein bottle"),
        },
        "knn" => {
            let k = config.distances.k.context("knn distances need k")?;
            Ok(knn_geodesic_matrix(points, k)?)
        }
        other => bail!("unknown distance method {other:?}"),
    }
}

fn run_group(
    config: &ExperimentConfig,
    family: Family,
    group: &Group,
    size: usize,
    trial: usize,
) -> Vec<(usize, std::result::Result<CellData, String>)> {
    let run = || -> Result<(SortedDistanceMatrix, RadiusGrid)> {
        let salts = variant_salts(group.variant);
        let seed = mdf::derive_seed(config.seed, &[size as u64, trial as u64, salts[0], salts[1]]);
        let spec = SamplerSpec::new(family, group.variant, size, seed)?;
        let mut points = sample_points(&spec)?;
        if let Some(lift) = &config.lift {
            let lift_seed = mdf::derive_seed(
                config.seed,
                &[size as u64, trial as u64, salts[0], salts[1], LIFT_SALT],
            );
            points = lift_to_dimension(&points, lift.target_dim, lift_seed)?;
        }
        if let Some(dim) = group.embed {
            points = pca_embed(&points, dim)?;
        }
        let matrix = build_matrix(config, family, &points)?;
        let grid = build_grid(&matrix, &config.grid)?;
        Ok((mdf::sort_rows(&matrix), grid))
    };

    match run() {
        Ok((sorted, grid)) => group
            .column_indices
            .iter()
            .map(|&ci| {
                let column = &config.columns[ci];
                let cell = (|| -> Result<CellData> {
                    let volume = resolve_volume(
                        &config.model.volume,
                        family,
                        &sorted,
                        &grid,
                        config.model.dimension,
                    )?;
                    let scaling = config.column_scaling(column)?;
                    score_sorted(&sorted, &grid, config.model.dimension, volume, &scaling, true)
                })();
                (ci, cell.map_err(|e| format!("{e:#}")))
            })
            .collect(),
        Err(e) => {
            let msg = format!("{e:#}");
            group
                .column_indices
                .iter()
                .map(|&ci| (ci, Err(msg.clone())))
                .collect()
        }
    }
}

/// One scored (or failed) cell of an experiment run.
#[derive(Debug, Clone)]
pub struct CellScore {
    pub size: usize,
    pub trial: usize,
    pub label: String,
    pub outcome: std::result::Result<f64, String>,
}

/// Result of an experiment run.
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub failed_cells: usize,
    pub summary: String,
    pub cells: Vec<CellScore>,
}

impl RunOutcome {
    /// Successful scores of one column at one size.
    pub fn scores(&self, size: usize, label: &str) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.size == size && c.label == label)
            .filter_map(|c| c.outcome.as_ref().ok().copied())
            .collect()
    }
}

pub fn run_experiment(config: &ExperimentConfig, output_override: Option<PathBuf>) -> Result<RunOutcome> {
    let family = config.family()?;
    let output_dir = output_override.unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(output_dir.join("functions"))
        .with_context(|| format!("cannot create {}", output_dir.display()))?;

    // group columns by shared (variant, embed)
    let mut groups: Vec<Group> = Vec::new();
    for (ci, column) in config.columns.iter().enumerate() {
        let variant = config.column_variant(column)?;
        match groups
            .iter_mut()
            .find(|g| g.variant == variant && g.embed == column.embed)
        {
            Some(g) => g.column_indices.push(ci),
            None => groups.push(Group {
                variant,
                embed: column.embed,
                column_indices: vec![ci],
            }),
        }
    }

    let mut jobs = Vec::new();
    for size_idx in 0..config.sizes.len() {
        for trial in 0..config.trials {
            for group_idx in 0..groups.len() {
                jobs.push(Job {
                    size_idx,
                    trial,
                    group_idx,
                });
            }
        }
    }

    let outcomes: Vec<Vec<CellOutcome>> = jobs
        .par_iter()
        .map(|job| {
            let size = config.sizes[job.size_idx];
            run_group(config, family, &groups[job.group_idx], size, job.trial)
                .into_iter()
                .map(|(ci, result)| CellOutcome {
                    size,
                    trial: job.trial,
                    label: config.columns[ci].label.clone(),
                    result,
                })
                .collect()
        })
        .collect();
    let mut cells: Vec<CellOutcome> = outcomes.into_iter().flatten().collect();
    cells.sort_by(|a, b| {
        (a.size, a.trial, column_order(config, &a.label)).cmp(&(
            b.size,
            b.trial,
            column_order(config, &b.label),
        ))
    });

    // per-trial scores, failures, and function files
    let mut scores_csv = String::from("size,trial,column,score,error_counts,volume,scaling,degenerate\n");
    let mut failures_csv = String::from("size,trial,column,message\n");
    let mut failed_cells = 0usize;
    for cell in &cells {
        match &cell.result {
            Ok(data) => {
                use std::fmt::Write as _;
                writeln!(
                    scores_csv,
                    "{},{},{},{},{},{},{},{}",
                    cell.size,
                    cell.trial,
                    cell.label,
                    data.report.score,
                    data.report.error,
                    data.volume,
                    data.report.scaling.as_deref().unwrap_or("flat"),
                    data.report.is_degenerate()
                )
                .expect("string write");
                let mut func = String::from("r,theoretical,empirical\n");
                for ((r, t), e) in data
                    .k_theo
                    .grid()
                    .radii()
                    .iter()
                    .zip(data.k_theo.values())
                    .zip(data.k_hat.values())
                {
                    writeln!(func, "{r},{t},{e}").expect("string write");
                }
                std::fs::write(
                    output_dir
                        .join("functions")
                        .join(format!("k_{}_t{}_{}.csv", cell.size, cell.trial, cell.label)),
                    func,
                )?;
            }
            Err(msg) => {
                use std::fmt::Write as _;
                failed_cells += 1;
                writeln!(
                    failures_csv,
                    "{},{},{},{}",
                    cell.size,
                    cell.trial,
                    cell.label,
                    msg.replace(',', ";").replace('\n', " ")
                )
                .expect("string write");
            }
        }
    }

    // summary: one row per size, one column per configured column,
    // mean +- sample standard deviation over the successful trials
    let mut summary = String::from("size");
    for column in &config.columns {
        summary.push(',');
        summary.push_str(&column.label);
    }
    summary.push('\n');
    for &size in &config.sizes {
        summary.push_str(&size.to_string());
        for column in &config.columns {
            let scores: Vec<f64> = cells
                .iter()
                .filter(|c| c.size == size && c.label == column.label)
                .filter_map(|c| c.result.as_ref().ok().map(|d| d.report.score))
                .collect();
            summary.push(',');
            if scores.is_empty() {
                summary.push_str("error");
            } else {
                let (mean, std) = mean_std(&scores);
                use std::fmt::Write as _;
                write!(summary, "{mean:.4} ± {std:.4}").expect("string write");
            }
        }
        summary.push('\n');
    }

    std::fs::write(output_dir.join("summary.csv"), &summary)?;
    std::fs::write(output_dir.join("scores.csv"), scores_csv)?;
    if failed_cells > 0 {
        std::fs::write(output_dir.join("failures.csv"), failures_csv)?;
    }

    // externally produced embeddings, scored once each
    if !config.embeddings.is_empty() {
        let mut emb_csv = String::from("label,score,error_counts,volume,scaling,degenerate\n");
        for e in &config.embeddings {
            let points = mdf::io::read_point_sample(&e.path)?;
            let matrix = build_matrix(config, family, &points)?;
            let sorted = mdf::sort_rows(&matrix);
            let grid = build_grid(&matrix, &config.grid)?;
            let volume = resolve_volume(
                &config.model.volume,
                family,
                &sorted,
                &grid,
                config.model.dimension,
            )?;
            let data = score_sorted(
                &sorted,
                &grid,
                config.model.dimension,
                volume,
                &ColumnScaling::Flat,
                true,
            )?;
            use std::fmt::Write as _;
            writeln!(
                emb_csv,
                "{},{},{},{},{},{}",
                e.label,
                data.report.score,
                data.report.error,
                data.volume,
                data.report.scaling.as_deref().unwrap_or("flat"),
                data.report.is_degenerate()
            )
            .expect("string write");
        }
        std::fs::write(output_dir.join("embeddings.csv"), emb_csv)?;
    }

    let cell_scores = cells
        .iter()
        .map(|c| CellScore {
            size: c.size,
            trial: c.trial,
            label: c.label.clone(),
            outcome: c
                .result
                .as_ref()
                .map(|d| d.report.score)
                .map_err(Clone::clone),
        })
        .collect();

    Ok(RunOutcome {
        output_dir,
        failed_cells,
        summary,
        cells: cell_scores,
    })
}

fn column_order(config: &ExperimentConfig, label: &str) -> usize {
    config
        .columns
        .iter()
        .position(|c| c.label == label)
        .unwrap_or(usize::MAX)
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Scores a point cloud (for example an embedding produced by an external
/// tool) against a manifold model: kNN-graph geodesics, grid rule, flat
/// aggregated MDF with the requested scaling, manifold score.
pub fn score_embedding(
    points: &PointSample,
    dimension: usize,
    volume: f64,
    scaling: &ColumnScaling,
    k: usize,
    grid_cfg: &GridSection,
    include_self: bool,
) -> Result<CellData> {
    let matrix = knn_geodesic_matrix(points, k)?;
    score_matrix(
        &matrix,
        grid_cfg,
        dimension,
        (volume, "supplied"),
        scaling,
        include_self,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_is_nearest_rank() {
        let v = vec![4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&v, 0.25).unwrap(), 1.0);
        assert_eq!(percentile(&v, 0.5).unwrap(), 2.0);
        assert_eq!(percentile(&v, 0.51).unwrap(), 3.0);
        assert_eq!(percentile(&v, 1.0).unwrap(), 4.0);
        assert_eq!(percentile(&[], 0.5), None);
    }

    #[test]
    fn analytic_volumes() {
        assert_eq!(analytic_volume(Family::FlatTorus), 1.0);
        let s2 = analytic_volume(Family::Sphere { ambient_dim: 3 });
        assert!((s2 - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(analytic_volume(Family::KleinBottle) > 0.0);
    }

    #[test]
    fn mean_std_matches_sample_convention() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-12);
        let (_, s1) = mean_std(&[5.0]);
        assert_eq!(s1, 0.0);
    }
}
