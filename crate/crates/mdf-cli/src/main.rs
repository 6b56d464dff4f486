use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mdf::{
    aggregated_mdf, erode_domain, lambda1_catalog, lift_to_dimension, local_mdf,
    proportion_normalized, ripley_aggregated, ripley_inhomogeneous, ripley_local,
    sample_flat_torus, sample_points, search_dimension, search_euler_characteristic,
    search_lambda1, sort_rows, CurvatureFamily, DistanceMatrix, Family, ManifoldModel,
    RadiusGrid, RectDomain, SamplerSpec, SortedDistanceMatrix, Variant,
};
use mdf_cli::config::{ColumnScaling, ExperimentConfig, GridSection};
use mdf_cli::experiment::{build_grid, run_experiment, score_sorted};
use mdf_cli::report::{format_report, write_function_pair};

#[derive(Parser)]
#[command(
    name = "mdf",
    version,
    about = "Manifold density functions: estimators, manifold scores, parameter searches, Ripley baselines, and experiment tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded sample from one of the built-in families
    Sample(SampleArgs),
    /// Reconstruct a distance matrix from a point-sample CSV
    Distances(DistancesArgs),
    /// Compute an aggregated (or local) MDF from distances
    Mdf(MdfArgs),
    /// Score distances or a point cloud against a manifold model
    Score(ScoreArgs),
    /// Search the Euler characteristic that maximizes the manifold score
    SearchChi(SearchChiArgs),
    /// Search the lambda1 catalog for the best hypersurface scaling
    SearchLambda1(SearchLambdaArgs),
    /// Search the intrinsic dimension that maximizes the manifold score
    SearchDim(SearchDimArgs),
    /// Ripley K-function baselines on an axis-aligned box domain
    Ripley(RipleyArgs),
    /// Run a configured experiment and write its report CSVs
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV: a point sample (header x0,x1,...) or a headerless
    /// square distance matrix; detected from the first line
    #[arg(long)]
    input: PathBuf,
    /// Neighbor count for graph geodesics when the input is a point sample
    #[arg(long, default_value_t = 6)]
    k_neighbors: usize,
    /// Average the two directed entries when reading a distance matrix
    #[arg(long, default_value_t = false)]
    symmetrize: bool,
}

impl InputArgs {
    fn load_matrix(&self) -> Result<DistanceMatrix> {
        let text = std::fs::read_to_string(&self.input)
            .with_context(|| format!("cannot read {}", self.input.display()))?;
        let first = text.lines().next().unwrap_or_default();
        if first.trim_start().starts_with("x0") {
            let points = mdf::io::read_point_sample(&self.input)?;
            Ok(mdf::knn_geodesic_matrix(&points, self.k_neighbors)?)
        } else {
            Ok(mdf::io::read_distance_matrix(&self.input, self.symmetrize)?)
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 100)]
    grid_steps: usize,
    /// Fixed largest radius; default is a percentile of the distances
    #[arg(long)]
    r_max: Option<f64>,
    /// Percentile (in (0,1]) of positive pairwise distances for r_max
    #[arg(long, default_value_t = 0.25)]
    percentile: f64,
}

impl GridArgs {
    fn section(&self) -> GridSection {
        match self.r_max {
            Some(r) => GridSection {
                steps: self.grid_steps,
                rule: "fixed".into(),
                percentile: None,
                r_max: Some(r),
            },
            None => GridSection {
                steps: self.grid_steps,
                rule: "percentile".into(),
                percentile: Some(self.percentile),
                r_max: None,
            },
        }
    }
}

#[derive(Args)]
struct ScalingArgs {
    /// Euler characteristic for surface scaling
    #[arg(long)]
    chi: Option<i64>,
    /// Surface area for the exact surface form (heuristic form if absent)
    #[arg(long)]
    area: Option<f64>,
    /// First Laplacian eigenvalue for hypersurface scaling
    #[arg(long)]
    lambda1: Option<f64>,
}

impl ScalingArgs {
    fn column_scaling(&self) -> Result<ColumnScaling> {
        match (self.chi, self.lambda1) {
            (Some(_), Some(_)) => bail!("--chi and --lambda1 are mutually exclusive"),
            (Some(chi), None) => Ok(ColumnScaling::Surface { chi, area: self.area }),
            (None, Some(lambda1)) => Ok(ColumnScaling::Hypersurface { lambda1 }),
            (None, None) => Ok(ColumnScaling::Flat),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    /// flat-torus | sphere | hypersphere | klein-bottle
    #[arg(long)]
    family: String,
    /// uniform | cross | cross-noise | sine-density
    #[arg(long, default_value = "uniform")]
    variant: String,
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ambient dimension for sphere families
    #[arg(long)]
    ambient_dim: Option<usize>,
    /// Noise fraction for the cross-noise variant
    #[arg(long)]
    noise_fraction: Option<f64>,
    /// Lift the sample to this ambient dimension with uniform coordinates
    #[arg(long)]
    lift_to: Option<usize>,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct DistancesArgs {
    /// Point-sample CSV
    #[arg(long)]
    input: PathBuf,
    /// knn | great-circle | torus-wrap
    #[arg(long, default_value = "knn")]
    method: String,
    #[arg(long, default_value_t = 6)]
    k_neighbors: usize,
    /// Output distance-matrix CSV
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct MdfArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    scaling: ScalingArgs,
    /// Intrinsic dimension of the model
    #[arg(long)]
    dimension: usize,
    /// Emit the local MDF of this point instead of the aggregated one
    #[arg(long)]
    point: Option<usize>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    include_self: bool,
    /// Output CSV (header r,value)
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    scaling: ScalingArgs,
    #[arg(long)]
    dimension: usize,
    /// Manifold volume; omit to fit c*r^n to the small-radius MDF
    #[arg(long)]
    volume: Option<f64>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    include_self: bool,
    /// Label reported in the output
    #[arg(long, default_value = "score")]
    name: String,
    /// Also write the function pair and the report here
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SearchChiArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    volume: f64,
    #[arg(long, default_value_t = -4)]
    chi_min: i64,
    #[arg(long, default_value_t = 4)]
    chi_max: i64,
}

#[derive(Args)]
struct SearchLambdaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    volume: f64,
    #[arg(long)]
    dimension: usize,
}

#[derive(Args)]
struct SearchDimArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    scaling: ScalingArgs,
    #[arg(long)]
    volume: f64,
    #[arg(long, default_value_t = 1)]
    d_min: usize,
    #[arg(long, default_value_t = 4)]
    d_max: usize,
}

#[derive(Args)]
struct RipleyArgs {
    /// Point-sample CSV
    #[arg(long)]
    input: PathBuf,
    /// Domain lower corner, comma separated (e.g. "0,0")
    #[arg(long)]
    domain_min: String,
    /// Domain upper corner, comma separated (e.g. "1,1")
    #[arg(long)]
    domain_max: String,
    #[arg(long, default_value_t = 100)]
    grid_steps: usize,
    #[arg(long)]
    r_max: f64,
    /// Compute a single point's local K instead of the aggregated one
    #[arg(long)]
    point: Option<usize>,
    /// Per-point intensity weights (single-column CSV) for the
    /// inhomogeneous estimator; requires --point
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    include_self: bool,
    /// Divide by the domain volume (proportion form)
    #[arg(long, default_value_t = false)]
    normalized: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the config's trial count
    #[arg(long)]
    trials: Option<usize>,
}

fn parse_family(name: &str, ambient_dim: Option<usize>) -> Result<Family> {
    Ok(match name {
        "flat-torus" => Family::FlatTorus,
        "klein-bottle" => Family::KleinBottle,
        "sphere" => Family::Sphere {
            ambient_dim: ambient_dim.context("sphere family needs --ambient-dim")?,
        },
        "hypersphere" => Family::Hypersphere {
            ambient_dim: ambient_dim.context("hypersphere family needs --ambient-dim")?,
        },
        other => bail!("unknown family {other:?}"),
    })
}

fn parse_variant(name: &str, noise_fraction: Option<f64>) -> Result<Variant> {
    Ok(match name {
        "uniform" => Variant::Uniform,
        "cross" => Variant::Cross,
        "cross-noise" => Variant::CrossWithNoise(
            noise_fraction.context("cross-noise variant needs --noise-fraction")?,
        ),
        "sine-density" => Variant::SineDensity,
        other => bail!("unknown variant {other:?}"),
    })
}

fn parse_corner(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse corner coordinate {c:?}"))
        })
        .collect()
}

fn grid_for(matrix: &DistanceMatrix, grid: &GridArgs) -> Result<RadiusGrid> {
    build_grid(matrix, &grid.section())
}

fn load_sorted(input: &InputArgs) -> Result<(SortedDistanceMatrix, DistanceMatrix)> {
    let matrix = input.load_matrix()?;
    Ok((sort_rows(&matrix), matrix))
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let family = parse_family(&args.family, args.ambient_dim)?;
    let variant = parse_variant(&args.variant, args.noise_fraction)?;
    let spec = SamplerSpec::new(family, variant, args.size, args.seed)?;
    std::fs::create_dir_all(&args.output_dir)?;
    let mut points = match family {
        Family::FlatTorus => {
            let (points, matrix) = sample_flat_torus(&spec)?;
            mdf::io::write_distance_matrix(args.output_dir.join("distances.csv"), &matrix)?;
            points
        }
        _ => sample_points(&spec)?,
    };
    if let Some(target) = args.lift_to {
        points = lift_to_dimension(&points, target, mdf::derive_seed(args.seed, &[target as u64]))?;
    }
    mdf::io::write_point_sample(args.output_dir.join("points.csv"), &points)?;
    println!("points={}", args.output_dir.join("points.csv").display());
    Ok(())
}

fn cmd_distances(args: DistancesArgs) -> Result<()> {
    let points = mdf::io::read_point_sample(&args.input)?;
    let matrix = match args.method.as_str() {
        "knn" => mdf::knn_geodesic_matrix(&points, args.k_neighbors)?,
        "great-circle" => mdf::great_circle_matrix(&points)?,
        "torus-wrap" => mdf::flat_torus_distance_matrix(&points)?,
        other => bail!("unknown distance method {other:?}"),
    };
    mdf::io::write_distance_matrix(&args.output, &matrix)?;
    println!("matrix={}", args.output.display());
    Ok(())
}

fn model_for(scaling: &ColumnScaling, dimension: usize) -> Result<ManifoldModel> {
    let curvature = match *scaling {
        ColumnScaling::Flat => mdf::Curvature::Flat,
        ColumnScaling::Surface { chi, area } => mdf::Curvature::Surface { chi, area },
        ColumnScaling::Hypersurface { lambda1 } => mdf::Curvature::Hypersurface { lambda1 },
    };
    Ok(ManifoldModel::new(dimension, None, curvature)?)
}

fn cmd_mdf(args: MdfArgs) -> Result<()> {
    let (sorted, matrix) = load_sorted(&args.input)?;
    let grid = grid_for(&matrix, &args.grid)?;
    let scaling = args.scaling.column_scaling()?;
    let model = model_for(&scaling, args.dimension)?;
    let k = match args.point {
        Some(p) => local_mdf(&sorted, p, &grid, &model, args.include_self)?,
        None => aggregated_mdf(&sorted, &grid, &model, args.include_self)?,
    };
    mdf::io::write_density_function(&args.output, &k)?;
    println!("mdf={}", args.output.display());
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let (sorted, matrix) = load_sorted(&args.input)?;
    let grid = grid_for(&matrix, &args.grid)?;
    let scaling = args.scaling.column_scaling()?;
    let volume = match args.volume {
        Some(v) => (v, "supplied"),
        None => (mdf::fit_volume(&sorted, &grid, args.dimension)?, "fitted"),
    };
    let data = score_sorted(&sorted, &grid, args.dimension, volume, &scaling, args.include_self)?;
    print!("{}", format_report(&args.name, &data));
    if let Some(dir) = args.output_dir {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(
            dir.join(format!("{}.report.txt", args.name)),
            format_report(&args.name, &data),
        )?;
        write_function_pair(dir.join(format!("{}.csv", args.name)), &data)?;
    }
    Ok(())
}

fn cmd_search_chi(args: SearchChiArgs) -> Result<()> {
    let (sorted, matrix) = load_sorted(&args.input)?;
    let grid = grid_for(&matrix, &args.grid)?;
    let (chi, report) =
        search_euler_characteristic(&sorted, &grid, args.volume, args.chi_min..=args.chi_max)?;
    println!("chi={chi}");
    println!("score={}", report.score);
    println!("error_counts={}", report.error);
    println!("scaling={}", report.scaling.as_deref().unwrap_or("flat"));
    Ok(())
}

fn cmd_search_lambda1(args: SearchLambdaArgs) -> Result<()> {
    let (sorted, matrix) = load_sorted(&args.input)?;
    let grid = grid_for(&matrix, &args.grid)?;
    let candidates = lambda1_catalog(args.dimension, Some(args.volume));
    let (pick, report) = search_lambda1(&sorted, &grid, args.volume, args.dimension, &candidates)?;
    println!("lambda1={}", pick.value);
    println!("family={}", pick.name);
    println!("score={}", report.score);
    println!("error_counts={}", report.error);
    Ok(())
}

fn cmd_search_dim(args: SearchDimArgs) -> Result<()> {
    let (sorted, matrix) = load_sorted(&args.input)?;
    let grid = grid_for(&matrix, &args.grid)?;
    let family = match args.scaling.column_scaling()? {
        ColumnScaling::Flat => CurvatureFamily::Flat,
        ColumnScaling::Surface { chi, area } => CurvatureFamily::Surface { chi, area },
        ColumnScaling::Hypersurface { lambda1 } => CurvatureFamily::Hypersurface { lambda1 },
    };
    let (n, report) =
        search_dimension(&sorted, &grid, args.volume, args.d_min..=args.d_max, &family)?;
    println!("dimension={n}");
    println!("score={}", report.score);
    println!("error_counts={}", report.error);
    Ok(())
}

fn cmd_ripley(args: RipleyArgs) -> Result<()> {
    let points = mdf::io::read_point_sample(&args.input)?;
    let dom = RectDomain::new(parse_corner(&args.domain_min)?, parse_corner(&args.domain_max)?)?;
    let grid = RadiusGrid::linear(args.r_max, args.grid_steps)?;
    let k = match (args.point, &args.weights) {
        (Some(p), Some(weights_path)) => {
            let weights = mdf::io::read_weights(weights_path)?;
            ripley_inhomogeneous(&points, &weights, p, &grid, &dom)?
        }
        (Some(p), None) => ripley_local(&points, p, &grid, &dom, args.include_self)?,
        (None, None) => ripley_aggregated(&points, &grid, &dom, args.include_self)?,
        (None, Some(_)) => bail!("--weights requires --point"),
    };
    let k = if args.normalized {
        proportion_normalized(&k, &dom)
    } else {
        k
    };
    mdf::io::write_density_function(&args.output, &k)?;
    let eroded = erode_domain(&dom, grid.r_max())?;
    println!("ripley={}", args.output.display());
    println!(
        "interior_points={}",
        (0..points.len())
            .filter(|&i| eroded.contains(points.point(i)))
            .count()
    );
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let mut config = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid configuration: {e:#}");
            return Ok(ExitCode::from(2));
        }
    };
    if let Some(trials) = args.trials {
        if trials == 0 {
            eprintln!("invalid configuration: trials must be at least 1");
            return Ok(ExitCode::from(2));
        }
        config.trials = trials;
    }
    let outcome = run_experiment(&config, args.output_dir)?;
    print!("{}", outcome.summary);
    println!("output_dir={}", outcome.output_dir.display());
    if outcome.failed_cells > 0 {
        eprintln!("{} cell(s) failed; see failures.csv", outcome.failed_cells);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(args) => cmd_sample(args).map(|()| ExitCode::SUCCESS),
        Command::Distances(args) => cmd_distances(args).map(|()| ExitCode::SUCCESS),
        Command::Mdf(args) => cmd_mdf(args).map(|()| ExitCode::SUCCESS),
        Command::Score(args) => cmd_score(args).map(|()| ExitCode::SUCCESS),
        Command::SearchChi(args) => cmd_search_chi(args).map(|()| ExitCode::SUCCESS),
        Command::SearchLambda1(args) => cmd_search_lambda1(args).map(|()| ExitCode::SUCCESS),
        Command::SearchDim(args) => cmd_search_dim(args).map(|()| ExitCode::SUCCESS),
        Command::Ripley(args) => cmd_ripley(args).map(|()| ExitCode::SUCCESS),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
