//! TOML experiment configuration.
//!
//! A config names a sampler family, the trial protocol (sizes, trial
//! count, base seed), how distances are reconstructed, the radius grid
//! rule, the manifold model, and one column per reported table column
//! (variant plus scaling, optionally PCA-embedded first). See the
//! `configs/` directory for a complete example per experiment.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use mdf::{Family, SamplerSpec, Variant};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub sizes: Vec<usize>,
    pub output_dir: PathBuf,
    pub sampler: SamplerSection,
    #[serde(default)]
    pub lift: Option<LiftSection>,
    pub distances: DistanceSection,
    pub grid: GridSection,
    pub model: ModelSection,
    pub columns: Vec<ColumnSection>,
    #[serde(default)]
    pub embeddings: Vec<EmbeddingSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    /// `flat-torus`, `sphere`, `hypersphere`, or `klein-bottle`.
    pub family: String,
    /// Ambient dimension, spheres only.
    #[serde(default)]
    pub ambient_dim: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSection {
    /// Append uniform `[0, 2pi)` coordinates up to this dimension.
    pub target_dim: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceSection {
    /// `exact` (wrap metric on the torus, great-circle on spheres) or
    /// `knn` (neighbor-graph shortest paths).
    pub method: String,
    #[serde(default)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub steps: usize,
    /// `percentile` of the positive pairwise distances, or `fixed`.
    pub rule: String,
    #[serde(default)]
    pub percentile: Option<f64>,
    #[serde(default)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub dimension: usize,
    /// `"analytic"` (the family's known volume), `"fit"` (least-squares
    /// power-law fit to the small-radius empirical MDF), or a number.
    pub volume: VolumeSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum VolumeSpec {
    Rule(String),
    Value(f64),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSection {
    pub label: String,
    /// `uniform`, `cross`, `cross-noise`, or `sine-density`.
    pub variant: String,
    #[serde(default)]
    pub noise_fraction: Option<f64>,
    /// `flat`, `surface`, or `hypersurface`.
    pub scaling: String,
    #[serde(default)]
    pub chi: Option<i64>,
    /// Present: exact surface form; absent: heuristic form.
    #[serde(default)]
    pub area: Option<f64>,
    #[serde(default)]
    pub lambda1: Option<f64>,
    /// PCA-project the (lifted) sample to this dimension before
    /// reconstructing distances.
    #[serde(default)]
    pub embed: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub label: String,
    /// Point-sample CSV produced by an external embedding tool.
    pub path: PathBuf,
}

/// How a column turns the flat estimate into its reported estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnScaling {
    Flat,
    Surface { chi: i64, area: Option<f64> },
    Hypersurface { lambda1: f64 },
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("cannot parse config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config = Self::parse(&text)?;
        // embedding paths are relative to the config file
        if let Some(dir) = path.parent() {
            for e in &mut config.embeddings {
                if e.path.is_relative() {
                    e.path = dir.join(&e.path);
                }
            }
        }
        config.check_paths()?;
        Ok(config)
    }

    pub fn family(&self) -> Result<Family> {
        match self.sampler.family.as_str() {
            "flat-torus" => Ok(Family::FlatTorus),
            "sphere" => Ok(Family::Sphere {
                ambient_dim: self
                    .sampler
                    .ambient_dim
                    .context("sphere family needs sampler.ambient_dim")?,
            }),
            "hypersphere" => Ok(Family::Hypersphere {
                ambient_dim: self
                    .sampler
                    .ambient_dim
                    .context("hypersphere family needs sampler.ambient_dim")?,
            }),
            "klein-bottle" => Ok(Family::KleinBottle),
            other => bail!("unknown sampler family {other:?}"),
        }
    }

    pub fn column_variant(&self, column: &ColumnSection) -> Result<Variant> {
        match column.variant.as_str() {
            "uniform" => Ok(Variant::Uniform),
            "cross" => Ok(Variant::Cross),
            "cross-noise" => Ok(Variant::CrossWithNoise(
                column
                    .noise_fraction
                    .context("cross-noise variant needs noise_fraction")?,
            )),
            "sine-density" => Ok(Variant::SineDensity),
            other => bail!("unknown variant {other:?} in column {:?}", column.label),
        }
    }

    pub fn column_scaling(&self, column: &ColumnSection) -> Result<ColumnScaling> {
        match column.scaling.as_str() {
            "flat" => Ok(ColumnScaling::Flat),
            "surface" => Ok(ColumnScaling::Surface {
                chi: column
                    .chi
                    .with_context(|| format!("column {:?} needs chi", column.label))?,
                area: column.area,
            }),
            "hypersurface" => Ok(ColumnScaling::Hypersurface {
                lambda1: column
                    .lambda1
                    .with_context(|| format!("column {:?} needs lambda1", column.label))?,
            }),
            other => bail!("unknown scaling {other:?} in column {:?}", column.label),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.sizes.is_empty() {
            bail!("sizes must be nonempty");
        }
        if self.sizes.iter().any(|&s| s == 0) {
            bail!("sizes must be positive");
        }
        if self.columns.is_empty() {
            bail!("at least one column is required");
        }
        let family = self.family()?;

        match self.distances.method.as_str() {
            "exact" => {
                if matches!(family, Family::KleinBottle) {
                    bail!("no exact geodesics are available for the Klein bottle; use knn");
                }
                if self.lift.is_some() || self.columns.iter().any(|c| c.embed.is_some()) {
                    bail!("exact distances are defined on the original sample; lifting or embedding requires knn distances");
                }
            }
            "knn" => {
                let k = self.distances.k.context("knn distances need k")?;
                if k == 0 {
                    bail!("k must be positive");
                }
            }
            other => bail!("unknown distance method {other:?}"),
        }

        match self.grid.rule.as_str() {
            "percentile" => {
                let q = self.grid.percentile.context("percentile rule needs percentile")?;
                if !(q > 0.0 && q <= 1.0) {
                    bail!("percentile must lie in (0, 1], got {q}");
                }
            }
            "fixed" => {
                let r = self.grid.r_max.context("fixed rule needs r_max")?;
                if !(r > 0.0) {
                    bail!("r_max must be positive, got {r}");
                }
            }
            other => bail!("unknown grid rule {other:?}"),
        }
        if self.grid.steps < 2 {
            bail!("grid needs at least 2 steps");
        }

        if let VolumeSpec::Rule(rule) = &self.model.volume {
            if rule != "analytic" && rule != "fit" {
                bail!("volume must be \"analytic\", \"fit\", or a number, got {rule:?}");
            }
        }
        if let VolumeSpec::Value(v) = &self.model.volume {
            if !(*v > 0.0) {
                bail!("volume must be positive, got {v}");
            }
        }

        if let Some(lift) = &self.lift {
            let base_dim = match family {
                Family::FlatTorus => 2,
                Family::KleinBottle => 3,
                Family::Sphere { ambient_dim } | Family::Hypersphere { ambient_dim } => ambient_dim,
            };
            if lift.target_dim <= base_dim {
                bail!(
                    "lift target {} must exceed the sampler dimension {base_dim}",
                    lift.target_dim
                );
            }
        }

        let mut labels = std::collections::BTreeSet::new();
        for column in &self.columns {
            if !labels.insert(&column.label) {
                bail!("duplicate column label {:?}", column.label);
            }
            let variant = self.column_variant(column)?;
            let scaling = self.column_scaling(column)?;
            // SamplerSpec validation catches family/variant conflicts
            SamplerSpec::new(family, variant, 1, 0)
                .with_context(|| format!("column {:?}", column.label))?;
            if matches!(scaling, ColumnScaling::Surface { .. }) && self.model.dimension != 2 {
                bail!(
                    "column {:?}: surface scaling requires model dimension 2",
                    column.label
                );
            }
            if let Some(embed) = column.embed {
                if embed == 0 {
                    bail!("column {:?}: embed dimension must be positive", column.label);
                }
            }
        }
        for e in &self.embeddings {
            if !labels.insert(&e.label) {
                bail!("duplicate label {:?}", e.label);
            }
        }
        Ok(())
    }

    fn check_paths(&self) -> Result<()> {
        for e in &self.embeddings {
            if !e.path.is_file() {
                bail!(
                    "embedding {:?} references missing file {}",
                    e.label,
                    e.path.display()
                );
            }
        }
        Ok(())
    }
}
