//! Deterministic, seeded samplers for every experiment family: the flat
//! torus with exact wrap distances, spheres in any ambient dimension, the
//! Klein bottle immersion, their "cross" stratifications and noisy
//! variants, and the random lift to higher ambient dimension.
//!
//! Randomness comes from a ChaCha8 stream seeded with [`derive_seed`], a
//! SplitMix64-based mix of the user seed and context salts, so identical
//! specs reproduce bit-identical samples on every platform.

pub mod klein;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::distance::DistanceMatrix;
use crate::error::{MdfError, Result};
use crate::points::PointSample;

const TWO_PI: f64 = 2.0 * PI;

/// Sample family: which manifold (or stratification carrier) to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Unit-area flat torus `[0,1)^2` with wrap-around geodesics.
    FlatTorus,
    /// Unit sphere `S^{d-1}` in ambient dimension `d`.
    Sphere { ambient_dim: usize },
    /// The Klein bottle immersion in R^3.
    KleinBottle,
    /// Alias family for spheres in higher ambient dimension.
    Hypersphere { ambient_dim: usize },
}

impl Family {
    fn name(&self) -> String {
        match self {
            Family::FlatTorus => "flat-torus".into(),
            Family::Sphere { ambient_dim } => format!("sphere{ambient_dim}"),
            Family::KleinBottle => "klein-bottle".into(),
            Family::Hypersphere { ambient_dim } => format!("hypersphere{ambient_dim}"),
        }
    }
}

/// Sampling variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Uniform with respect to the surface measure.
    Uniform,
    /// The "cross" stratification of the family.
    Cross,
    /// Cross with the given fraction of points drawn uniformly instead.
    CrossWithNoise(f64),
    /// Klein bottle only: density proportional to `(1 + sin u) / 2` along
    /// the u parameter.
    SineDensity,
}

impl Variant {
    fn name(&self) -> String {
        match self {
            Variant::Uniform => "uniform".into(),
            Variant::Cross => "cross".into(),
            Variant::CrossWithNoise(f) => format!("cross-noise{f}"),
            Variant::SineDensity => "sine-density".into(),
        }
    }
}

/// A fully specified sampling request.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub family: Family,
    pub variant: Variant,
    pub m: usize,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(family: Family, variant: Variant, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(MdfError::InvalidArgument("sample size must be positive".into()));
        }
        if let Variant::CrossWithNoise(f) = variant {
            if f <= 0.0 || f >= 1.0 || f.is_nan() {
                return Err(MdfError::InvalidArgument(format!(
                    "noise fraction must lie in (0, 1), got {f}"
                )));
            }
        }
        if variant == Variant::SineDensity && family != Family::KleinBottle {
            return Err(MdfError::InvalidArgument(
                "the sine-density variant is defined only on the Klein bottle".into(),
            ));
        }
        match family {
            Family::Sphere { ambient_dim } | Family::Hypersphere { ambient_dim } => {
                if ambient_dim < 3 {
                    return Err(MdfError::InvalidArgument(format!(
                        "sphere sampling needs ambient dimension >= 3, got {ambient_dim}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self {
            family,
            variant,
            m,
            seed,
        })
    }

    fn label(&self) -> String {
        format!("{}:{}", self.family.name(), self.variant.name())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with context salts (sample size, trial index,
/// variant id, ...) into the seed of an independent ChaCha8 stream.
/// One SplitMix64 step absorbs each salt.
pub fn derive_seed(base: u64, salts: &[u64]) -> u64 {
    let mut state = base;
    let mut out = splitmix64(&mut state);
    for &salt in salts {
        state ^= salt.wrapping_mul(0xA24B_AED4_963E_E407);
        out ^= splitmix64(&mut state);
    }
    out
}

/// Exact flat-torus geodesic between points of `[0,1)^2`: per-axis wrap
/// `min(|a - b|, 1 - |a - b|)`, combined Euclidean-style.
pub fn flat_torus_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let raw = (x - y).abs();
        let wrapped = raw.min(1.0 - raw);
        sum += wrapped * wrapped;
    }
    sum.sqrt()
}

/// Exact pairwise wrap-distance matrix of a flat-torus sample.
pub fn flat_torus_distance_matrix(points: &PointSample) -> Result<DistanceMatrix> {
    DistanceMatrix::from_fn(points.len(), |i, j| {
        flat_torus_distance(points.point(i), points.point(j))
    })
}

fn torus_uniform_point(rng: &mut ChaCha8Rng) -> [f64; 2] {
    [rng.random::<f64>(), rng.random::<f64>()]
}

fn torus_cross_point(rng: &mut ChaCha8Rng) -> [f64; 2] {
    // the two unit-length segments carry equal arc length
    let t = rng.random::<f64>();
    if rng.random::<f64>() < 0.5 {
        [0.5, t]
    } else {
        [t, 0.5]
    }
}

/// Number of noise points in a cross-with-noise sample of size `m`.
fn noise_count(m: usize, fraction: f64) -> usize {
    ((m as f64 * fraction).round() as usize).min(m)
}

/// Samples the flat torus and returns both the points and their exact
/// wrap-distance matrix. The torus has unit area.
pub fn sample_flat_torus(spec: &SamplerSpec) -> Result<(PointSample, DistanceMatrix)> {
    if spec.family != Family::FlatTorus {
        return Err(MdfError::InvalidArgument(format!(
            "flat-torus sampler called with family {:?}",
            spec.family
        )));
    }
    let mut rng = spec.rng();
    let mut rows = Vec::with_capacity(spec.m);
    match spec.variant {
        Variant::Uniform => {
            for _ in 0..spec.m {
                rows.push(torus_uniform_point(&mut rng).to_vec());
            }
        }
        Variant::Cross => {
            for _ in 0..spec.m {
                rows.push(torus_cross_point(&mut rng).to_vec());
            }
        }
        Variant::CrossWithNoise(f) => {
            let noise = noise_count(spec.m, f);
            for _ in 0..spec.m - noise {
                rows.push(torus_cross_point(&mut rng).to_vec());
            }
            for _ in 0..noise {
                rows.push(torus_uniform_point(&mut rng).to_vec());
            }
        }
        Variant::SineDensity => unreachable!("rejected by SamplerSpec::new"),
    }
    let points = PointSample::from_rows(&rows, spec.seed, spec.label())?;
    let matrix = flat_torus_distance_matrix(&points)?;
    Ok((points, matrix))
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn sphere_cross_point(rng: &mut ChaCha8Rng, dim: usize, first_block: bool) -> Vec<f64> {
    let block = dim.div_ceil(2);
    let sub = unit_vector(rng, block);
    let mut out = vec![0.0; dim];
    let offset = if first_block { 0 } else { dim - block };
    out[offset..offset + block].copy_from_slice(&sub);
    out
}

/// Samples the unit sphere `S^{d-1}` in the ambient dimension carried by
/// the family. The cross stratification places half the points on the
/// sub-sphere spanned by the first `ceil(d/2)` coordinates and half on
/// the sub-sphere spanned by the last `ceil(d/2)`.
pub fn sample_sphere(spec: &SamplerSpec) -> Result<PointSample> {
    let dim = match spec.family {
        Family::Sphere { ambient_dim } | Family::Hypersphere { ambient_dim } => ambient_dim,
        other => {
            return Err(MdfError::InvalidArgument(format!(
                "sphere sampler called with family {other:?}"
            )))
        }
    };
    let mut rng = spec.rng();
    let mut rows = Vec::with_capacity(spec.m);
    match spec.variant {
        Variant::Uniform => {
            for _ in 0..spec.m {
                rows.push(unit_vector(&mut rng, dim));
            }
        }
        Variant::Cross => {
            let half = spec.m.div_ceil(2);
            for i in 0..spec.m {
                rows.push(sphere_cross_point(&mut rng, dim, i < half));
            }
        }
        Variant::CrossWithNoise(f) => {
            let noise = noise_count(spec.m, f);
            let cross = spec.m - noise;
            let half = cross.div_ceil(2);
            for i in 0..cross {
                rows.push(sphere_cross_point(&mut rng, dim, i < half));
            }
            for _ in 0..noise {
                rows.push(unit_vector(&mut rng, dim));
            }
        }
        Variant::SineDensity => unreachable!("rejected by SamplerSpec::new"),
    }
    PointSample::from_rows(&rows, spec.seed, spec.label())
}

const MAX_REJECTION_ATTEMPTS_PER_POINT: usize = 100_000;

/// Draws Klein bottle parameters for the requested variant. Returns the
/// parameter pairs together with the total number of candidate draws, so
/// tests can check the rejection rate against the envelope ratio.
pub fn sample_klein_params(spec: &SamplerSpec) -> Result<(Vec<(f64, f64)>, usize)> {
    if spec.family != Family::KleinBottle {
        return Err(MdfError::InvalidArgument(format!(
            "Klein bottle sampler called with family {:?}",
            spec.family
        )));
    }
    let tables = klein::tables();
    let mut rng = spec.rng();
    let mut params = Vec::with_capacity(spec.m);
    let mut attempts = 0usize;

    let draw_density = |rng: &mut ChaCha8Rng,
                            attempts: &mut usize,
                            density: &dyn Fn(f64, f64) -> f64,
                            envelope: f64|
     -> Result<(f64, f64)> {
        for _ in 0..MAX_REJECTION_ATTEMPTS_PER_POINT {
            *attempts += 1;
            let u = TWO_PI * rng.random::<f64>();
            let v = TWO_PI * rng.random::<f64>();
            if rng.random::<f64>() * envelope < density(u, v) {
                return Ok((u, v));
            }
        }
        Err(MdfError::InvalidArgument(
            "rejection sampling failed to accept; envelope is inconsistent".into(),
        ))
    };

    match spec.variant {
        Variant::Uniform => {
            for _ in 0..spec.m {
                params.push(draw_density(
                    &mut rng,
                    &mut attempts,
                    &klein::jacobian,
                    tables.jacobian_envelope,
                )?);
            }
        }
        Variant::SineDensity => {
            let density = |u: f64, v: f64| klein::jacobian(u, v) * klein::sine_weight(u);
            for _ in 0..spec.m {
                params.push(draw_density(
                    &mut rng,
                    &mut attempts,
                    &density,
                    tables.sine_envelope,
                )?);
            }
        }
        Variant::Cross => {
            for _ in 0..spec.m {
                params.push(klein_cross_param(&mut rng, &mut attempts, tables)?);
            }
        }
        Variant::CrossWithNoise(f) => {
            let noise = noise_count(spec.m, f);
            for _ in 0..spec.m - noise {
                params.push(klein_cross_param(&mut rng, &mut attempts, tables)?);
            }
            for _ in 0..noise {
                params.push(draw_density(
                    &mut rng,
                    &mut attempts,
                    &klein::jacobian,
                    tables.jacobian_envelope,
                )?);
            }
        }
    }
    Ok((params, attempts))
}

/// Arc-length-weighted draw from the cross curves {u = pi} and {v = pi}.
fn klein_cross_param(
    rng: &mut ChaCha8Rng,
    attempts: &mut usize,
    tables: &klein::KleinTables,
) -> Result<(f64, f64)> {
    let total = tables.cross_v_length + tables.cross_u_length;
    if rng.random::<f64>() < tables.cross_v_length / total {
        // constant speed along {u = pi}: parameter is uniform
        *attempts += 1;
        Ok((std::f64::consts::PI, TWO_PI * rng.random::<f64>()))
    } else {
        for _ in 0..MAX_REJECTION_ATTEMPTS_PER_POINT {
            *attempts += 1;
            let u = TWO_PI * rng.random::<f64>();
            if rng.random::<f64>() * tables.cross_u_speed_envelope < klein::cross_u_speed(u) {
                return Ok((u, std::f64::consts::PI));
            }
        }
        Err(MdfError::InvalidArgument(
            "rejection sampling failed to accept; envelope is inconsistent".into(),
        ))
    }
}

/// Samples the Klein bottle immersion in R^3.
pub fn sample_klein_bottle(spec: &SamplerSpec) -> Result<PointSample> {
    let (params, _) = sample_klein_params(spec)?;
    let rows: Vec<Vec<f64>> = params
        .iter()
        .map(|&(u, v)| klein::immerse(u, v).to_vec())
        .collect();
    PointSample::from_rows(&rows, spec.seed, spec.label())
}

/// Appends `target_dim - d` coordinates to every point, each drawn iid
/// uniformly from `[0, 2pi)`. Points are processed in index order, new
/// coordinates in axis order.
pub fn lift_to_dimension(points: &PointSample, target_dim: usize, seed: u64) -> Result<PointSample> {
    let d = points.dim();
    if target_dim <= d {
        return Err(MdfError::InvalidArgument(format!(
            "lift target {target_dim} must exceed current dimension {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[target_dim as u64]));
    let mut data = Vec::with_capacity(points.len() * target_dim);
    for p in points.iter() {
        data.extend_from_slice(p);
        for _ in d..target_dim {
            data.push(TWO_PI * rng.random::<f64>());
        }
    }
    PointSample::new(
        data,
        target_dim,
        points.seed(),
        format!("{}+lift{target_dim}", points.sampler()),
    )
}

/// Dispatches to the family sampler, returning only the point cloud.
pub fn sample_points(spec: &SamplerSpec) -> Result<PointSample> {
    match spec.family {
        Family::FlatTorus => Ok(sample_flat_torus(spec)?.0),
        Family::Sphere { .. } | Family::Hypersphere { .. } => sample_sphere(spec),
        Family::KleinBottle => sample_klein_bottle(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, variant: Variant, m: usize, seed: u64) -> SamplerSpec {
        SamplerSpec::new(family, variant, m, seed).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SamplerSpec::new(Family::FlatTorus, Variant::Uniform, 0, 1).is_err());
        assert!(SamplerSpec::new(Family::FlatTorus, Variant::CrossWithNoise(0.0), 5, 1).is_err());
        assert!(SamplerSpec::new(Family::FlatTorus, Variant::CrossWithNoise(1.0), 5, 1).is_err());
        assert!(SamplerSpec::new(Family::FlatTorus, Variant::SineDensity, 5, 1).is_err());
        assert!(SamplerSpec::new(Family::Sphere { ambient_dim: 2 }, Variant::Uniform, 5, 1).is_err());
        assert!(SamplerSpec::new(Family::KleinBottle, Variant::SineDensity, 5, 1).is_ok());
    }

    #[test]
    fn wrap_distance_examples() {
        assert!((flat_torus_distance(&[0.1, 0.5], &[0.9, 0.5]) - 0.2).abs() < 1e-15);
        assert_eq!(flat_torus_distance(&[0.3, 0.8], &[0.3, 0.8]), 0.0);
        let d = flat_torus_distance(&[0.05, 0.05], &[0.95, 0.95]);
        assert!((d - (0.02f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn wrap_distance_is_a_metric_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let p: Vec<Vec<f64>> = (0..3)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let dab = flat_torus_distance(&p[0], &p[1]);
            let dba = flat_torus_distance(&p[1], &p[0]);
            let dac = flat_torus_distance(&p[0], &p[2]);
            let dcb = flat_torus_distance(&p[2], &p[1]);
            assert_eq!(dab, dba);
            assert!(dab <= dac + dcb + 1e-12);
        }
    }

    #[test]
    fn torus_samples_live_in_the_unit_square() {
        for variant in [Variant::Uniform, Variant::Cross, Variant::CrossWithNoise(0.1)] {
            let (pts, d) = sample_flat_torus(&spec(Family::FlatTorus, variant, 200, 9)).unwrap();
            assert_eq!(pts.len(), 200);
            for p in pts.iter() {
                assert!(p.iter().all(|x| (0.0..1.0).contains(x)));
            }
            assert_eq!(d.size(), 200);
        }
    }

    #[test]
    fn torus_cross_points_touch_the_cross() {
        let (pts, _) = sample_flat_torus(&spec(Family::FlatTorus, Variant::Cross, 300, 4)).unwrap();
        for p in pts.iter() {
            assert!(p[0] == 0.5 || p[1] == 0.5);
        }
        // cross-with-noise keeps exactly round(f * m) uniform points
        let (pts, _) =
            sample_flat_torus(&spec(Family::FlatTorus, Variant::CrossWithNoise(0.1), 300, 4))
                .unwrap();
        let off_cross = pts.iter().filter(|p| p[0] != 0.5 && p[1] != 0.5).count();
        assert!(off_cross <= 30);
        assert!(off_cross >= 20); // a noise point can land on the cross only with probability 0
    }

    #[test]
    fn samplers_are_deterministic() {
        for family in [
            Family::FlatTorus,
            Family::Sphere { ambient_dim: 3 },
            Family::KleinBottle,
        ] {
            let s = spec(family, Variant::Uniform, 50, 77);
            let a = sample_points(&s).unwrap();
            let b = sample_points(&s).unwrap();
            assert_eq!(a, b, "family {family:?}");
            let c = sample_points(&spec(family, Variant::Uniform, 50, 78)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        for variant in [Variant::Uniform, Variant::Cross] {
            let pts = sample_sphere(&spec(Family::Sphere { ambient_dim: 5 }, variant, 400, 12))
                .unwrap();
            for p in pts.iter() {
                let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_cross_blocks_in_three_dimensions() {
        let pts = sample_sphere(&spec(Family::Sphere { ambient_dim: 3 }, Variant::Cross, 100, 3))
            .unwrap();
        for p in pts.iter() {
            assert!(p[2] == 0.0 || p[0] == 0.0);
        }
    }

    #[test]
    fn sphere_uniform_coordinate_means_vanish() {
        let m = 10_000;
        let pts =
            sample_sphere(&spec(Family::Sphere { ambient_dim: 4 }, Variant::Uniform, m, 21))
                .unwrap();
        let bound = 4.0 / (m as f64).sqrt();
        for axis in 0..4 {
            let mean: f64 = pts.iter().map(|p| p[axis]).sum::<f64>() / m as f64;
            assert!(mean.abs() < bound, "axis {axis}: mean {mean}");
        }
    }

    #[test]
    fn klein_rejection_rate_matches_envelope_ratio() {
        let t = klein::tables();
        let s = spec(Family::KleinBottle, Variant::Uniform, 10_000, 31);
        let (params, attempts) = sample_klein_params(&s).unwrap();
        assert_eq!(params.len(), 10_000);
        // expected attempts per accepted point = 4 pi^2 * envelope / area
        let expected = TWO_PI * TWO_PI * t.jacobian_envelope / t.area;
        let observed = attempts as f64 / params.len() as f64;
        assert!(
            observed < expected * 1.1 && observed > expected * 0.9,
            "observed {observed}, expected {expected}"
        );
    }

    #[test]
    fn klein_cross_parameters_lie_on_the_cross() {
        let s = spec(Family::KleinBottle, Variant::Cross, 500, 8);
        let (params, _) = sample_klein_params(&s).unwrap();
        for (u, v) in params {
            assert!(u == PI || v == PI);
        }
    }

    #[test]
    fn klein_uniform_mass_splits_evenly_across_v_halves() {
        // the two v-halves carry equal Jacobian mass (quadrature oracle in
        // the klein module), so point counts obey a binomial 3-sigma bound
        let lower_mass = klein::region_mass(0.0, TWO_PI, 0.0, PI);
        let total = klein::tables().area;
        let p = lower_mass / total;
        let m = 4000;
        let s = spec(Family::KleinBottle, Variant::Uniform, m, 13);
        let (params, _) = sample_klein_params(&s).unwrap();
        let count = params.iter().filter(|(_, v)| *v < PI).count() as f64;
        let sigma = (m as f64 * p * (1.0 - p)).sqrt();
        assert!((count - m as f64 * p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn lift_preserves_prefix_and_is_uniform() {
        let s = spec(Family::KleinBottle, Variant::Uniform, 10_000, 17);
        let base = sample_klein_bottle(&s).unwrap();
        let lifted = lift_to_dimension(&base, 10, 23).unwrap();
        assert_eq!(lifted.dim(), 10);
        for i in 0..base.len() {
            assert_eq!(&lifted.point(i)[..3], base.point(i));
        }
        // Kolmogorov-Smirnov against U[0, 2pi) at alpha = 0.01:
        // critical value sqrt(-ln(alpha/2)/2) / sqrt(n) = 1.6276 / sqrt(n)
        let n = base.len();
        let mut coords: Vec<f64> = (0..n).map(|i| lifted.point(i)[5]).collect();
        coords.sort_by(f64::total_cmp);
        let mut ks: f64 = 0.0;
        for (i, &x) in coords.iter().enumerate() {
            let cdf = x / TWO_PI;
            let hi = (i + 1) as f64 / n as f64 - cdf;
            let lo = cdf - i as f64 / n as f64;
            ks = ks.max(hi.max(lo));
        }
        assert!(ks < 1.6276 / (n as f64).sqrt(), "ks = {ks}");

        assert!(lift_to_dimension(&base, 3, 23).is_err());
        assert!(lift_to_dimension(&base, 2, 23).is_err());
    }

    #[test]
    fn derive_seed_separates_contexts() {
        let a = derive_seed(42, &[1, 2, 3]);
        let b = derive_seed(42, &[1, 2, 4]);
        let c = derive_seed(43, &[1, 2, 3]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, &[1, 2, 3]));
    }
}
