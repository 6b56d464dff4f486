//! Closed-form geometric quantities: Euclidean ball volumes, the
//! theoretical manifold density function, the curvature scaling factors,
//! and the catalog of first-Laplacian-eigenvalue bounds for hypersurfaces.

use std::f64::consts::PI;

use crate::density::DensityFunction;
use crate::error::{MdfError, Result};
use crate::grid::RadiusGrid;
use crate::model::{Curvature, ManifoldModel};

/// Lanczos approximation of the gamma function (g = 7, 9 coefficients).
/// Relative error is below 1e-13 for arguments in [0.5, 60], which covers
/// every half-integer produced by ball-volume formulas in this crate.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision)]
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = COEFFS[0];
        for (i, &c) in COEFFS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        let t = x + G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Volume of the Euclidean ball of radius `r` in dimension `n`:
/// `pi^(n/2) * r^n / gamma(n/2 + 1)`.
pub fn euclidean_ball_volume(n: usize, r: f64) -> f64 {
    debug_assert!(n >= 1);
    debug_assert!(r >= 0.0);
    unit_ball_volume(n) * r.powi(n as i32)
}

/// Volume of the unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0)
}

/// Surface area (n-1 dimensional volume) of the unit sphere in ambient
/// dimension `n`: `2 * pi^(n/2) / gamma(n/2)`.
pub fn sphere_surface_area(ambient_dim: usize) -> f64 {
    debug_assert!(ambient_dim >= 1);
    2.0 * PI.powf(ambient_dim as f64 / 2.0) / gamma(ambient_dim as f64 / 2.0)
}

/// Theoretical manifold density function of a uniform sample: the ratio
/// of Euclidean ball volume to manifold volume at every grid radius.
pub fn theoretical_mdf(model: &ManifoldModel, grid: &RadiusGrid) -> Result<DensityFunction> {
    let volume = model.volume().ok_or_else(|| {
        MdfError::MissingParameter("manifold volume is required for the theoretical MDF".into())
    })?;
    let values = grid
        .radii()
        .iter()
        .map(|&r| euclidean_ball_volume(model.dimension(), r) / volume)
        .collect();
    DensityFunction::new(grid.clone(), values)
}

fn factor_from_deficit(deficit: f64, r: f64, what: &str) -> Result<f64> {
    let denom = 1.0 - deficit;
    if denom <= 0.0 {
        return Err(MdfError::SingularScaling {
            radius: r,
            detail: format!("{what} has denominator {denom} <= 0"),
        });
    }
    Ok(1.0 / denom)
}

/// Local curvature correction `(1 - sc * r^2 / (6(n+2)))^-1` from the
/// ball-volume ratio for scalar curvature `sc` at a point.
pub fn local_curvature_factor(sc: f64, n: usize, r: f64) -> Result<f64> {
    debug_assert!(n >= 1);
    factor_from_deficit(sc * r * r / (6.0 * (n as f64 + 2.0)), r, "local scalar factor")
}

/// Aggregated surface correction from the Euler characteristic.
///
/// With `area` present this is the exact form `(1 - pi*chi*r^2/(24A))^-1`;
/// without it, the radius-free heuristic `(1 - pi*chi/24)^-1` obtained by
/// taking `A` of order `r^2`.
pub fn surface_aggregate_factor(chi: i64, r: f64, area: Option<f64>) -> Result<f64> {
    match area {
        Some(a) => factor_from_deficit(PI * chi as f64 * r * r / (24.0 * a), r, "surface factor"),
        None => factor_from_deficit(PI * chi as f64 / 24.0, r, "heuristic surface factor"),
    }
}

/// Aggregated hypersurface correction
/// `(1 - r^2 * lambda1 * (n-1) / (12 n (n+2)))^-1` from the first
/// Laplacian eigenvalue. At n = 1 the coefficient vanishes and the factor
/// is exactly 1.
pub fn hypersurface_aggregate_factor(lambda1: f64, n: usize, r: f64) -> Result<f64> {
    debug_assert!(n >= 1);
    let nf = n as f64;
    factor_from_deficit(
        r * r * lambda1 * (nf - 1.0) / (12.0 * nf * (nf + 2.0)),
        r,
        "hypersurface factor",
    )
}

/// A multiplicative correction applied to an empirical estimator, kept
/// with the parameters it was built from so reports can describe it.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingFactor {
    /// No correction.
    Flat,
    /// Pointwise correction from the scalar curvature at one sample point.
    LocalScalar { sc: f64, n: usize },
    /// Exact surface correction from Euler characteristic and area.
    SurfaceExact { chi: i64, area: f64 },
    /// Radius-free surface correction from the Euler characteristic alone.
    SurfaceHeuristic { chi: i64 },
    /// Hypersurface correction from the first Laplacian eigenvalue.
    Hypersurface { lambda1: f64, n: usize },
}

impl ScalingFactor {
    /// Evaluates the factor at radius `r`. Errors if the denominator is
    /// not positive (radius too large for the curvature parameters).
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        match *self {
            ScalingFactor::Flat => Ok(1.0),
            ScalingFactor::LocalScalar { sc, n } => local_curvature_factor(sc, n, r),
            ScalingFactor::SurfaceExact { chi, area } => {
                surface_aggregate_factor(chi, r, Some(area))
            }
            ScalingFactor::SurfaceHeuristic { chi } => surface_aggregate_factor(chi, r, None),
            ScalingFactor::Hypersurface { lambda1, n } => {
                hypersurface_aggregate_factor(lambda1, n, r)
            }
        }
    }

    /// The global factor for a model, if its curvature descriptor is
    /// global (everything except pointwise scalar curvature).
    pub fn global_for(model: &ManifoldModel) -> Option<ScalingFactor> {
        match *model.curvature() {
            Curvature::Flat => Some(ScalingFactor::Flat),
            Curvature::Surface { chi, area: Some(a) } => {
                Some(ScalingFactor::SurfaceExact { chi, area: a })
            }
            Curvature::Surface { chi, area: None } => Some(ScalingFactor::SurfaceHeuristic { chi }),
            Curvature::Hypersurface { lambda1 } => Some(ScalingFactor::Hypersurface {
                lambda1,
                n: model.dimension(),
            }),
            Curvature::PointwiseScalar(_) => None,
        }
    }

    /// The factor applied at sample point `p` under the given model.
    pub fn at_point(model: &ManifoldModel, p: usize) -> Result<ScalingFactor> {
        match model.curvature() {
            Curvature::PointwiseScalar(values) => {
                let sc = *values.get(p).ok_or_else(|| {
                    MdfError::MissingParameter(format!(
                        "no scalar curvature value supplied for point {p}"
                    ))
                })?;
                Ok(ScalingFactor::LocalScalar {
                    sc,
                    n: model.dimension(),
                })
            }
            _ => Ok(Self::global_for(model).expect("non-pointwise curvature is global")),
        }
    }
}

impl std::fmt::Display for ScalingFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalingFactor::Flat => write!(f, "flat"),
            ScalingFactor::LocalScalar { sc, n } => write!(f, "local-scalar(sc={sc},n={n})"),
            ScalingFactor::SurfaceExact { chi, area } => {
                write!(f, "surface-exact(chi={chi},area={area})")
            }
            ScalingFactor::SurfaceHeuristic { chi } => write!(f, "surface-heuristic(chi={chi})"),
            ScalingFactor::Hypersurface { lambda1, n } => {
                write!(f, "hypersurface(lambda1={lambda1},n={n})")
            }
        }
    }
}

/// A named candidate value for the first Laplacian eigenvalue of a
/// hypersurface family, taken at the equality case of the known bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda1Candidate {
    pub name: String,
    pub value: f64,
    pub requires_volume: bool,
}

impl Lambda1Candidate {
    fn new(name: impl Into<String>, value: f64, requires_volume: bool) -> Self {
        Self {
            name: name.into(),
            value,
            requires_volume,
        }
    }
}

/// Catalog of saturated lambda_1 bounds for an n-dimensional manifold:
///
/// * submanifold of a hypersphere: `n`
/// * minimal submanifold of real projective space: `2(n+1)`
/// * complex projective space (n even): `2(n+2)`
/// * quaternion projective space (n multiple of 4): `2(n+4)`
/// * Cayley plane: `4n`
/// * conformal Clifford torus (n = 2, volume known): `4 pi^2 / volume`
/// * Veronese surface (n = 2, volume known): `12 pi / volume`
/// * CR submanifolds: `2(n^2+n+2a)/n` and `2(n^2+n+12a)/n` for
///   `a in 1..=n/2`
///
/// Inapplicable entries are silently omitted. The list is sorted by value
/// (then name) so searches have a deterministic tie order.
pub fn lambda1_catalog(n: usize, volume: Option<f64>) -> Vec<Lambda1Candidate> {
    debug_assert!(n >= 2);
    let nf = n as f64;
    let mut out = vec![
        Lambda1Candidate::new("hypersphere-submanifold", nf, false),
        Lambda1Candidate::new("real-projective", 2.0 * (nf + 1.0), false),
        Lambda1Candidate::new("cayley-plane", 4.0 * nf, false),
    ];
    if n.is_multiple_of(2) {
        out.push(Lambda1Candidate::new("complex-projective", 2.0 * (nf + 2.0), false));
    }
    if n.is_multiple_of(4) {
        out.push(Lambda1Candidate::new("quaternion-projective", 2.0 * (nf + 4.0), false));
    }
    if n == 2 {
        if let Some(v) = volume {
            out.push(Lambda1Candidate::new("clifford-torus", 4.0 * PI * PI / v, true));
            out.push(Lambda1Candidate::new("veronese-surface", 12.0 * PI / v, true));
        }
    }
    for a in 1..=(n / 2) {
        let af = a as f64;
        out.push(Lambda1Candidate::new(
            format!("cr-complex-projective(a={a})"),
            2.0 * (nf * nf + nf + 2.0 * af) / nf,
            false,
        ));
        out.push(Lambda1Candidate::new(
            format!("cr-quaternion-projective(a={a})"),
            2.0 * (nf * nf + nf + 12.0 * af) / nf,
            false,
        ));
    }
    out.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| a.name.cmp(&b.name))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const REL: f64 = 1e-12;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let denom = expected.abs().max(1.0);
        assert!(
            ((actual - expected) / denom).abs() < tol,
            "actual {actual} vs expected {expected}"
        );
    }

    #[test]
    fn gamma_matches_exact_values() {
        // Integers: gamma(k) = (k-1)!
        let mut fact = 1.0;
        for k in 1..20u32 {
            assert_rel(gamma(k as f64), fact, REL);
            fact *= k as f64;
        }
        // Half-integers: gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
        let sqrt_pi = PI.sqrt();
        assert_rel(gamma(0.5), sqrt_pi, REL);
        assert_rel(gamma(1.5), 0.5 * sqrt_pi, REL);
        assert_rel(gamma(2.5), 0.75 * sqrt_pi, REL);
        assert_rel(gamma(3.5), 1.875 * sqrt_pi, REL);
        // A large argument in the supported range.
        assert_rel(gamma(51.0), 3.0414093201713376e64, 1e-11);
    }

    #[test]
    fn ball_volume_closed_forms() {
        // v1 = 2r, v2 = pi r^2, v3 = 4/3 pi r^3, v4 = pi^2/2 r^4
        for &r in &[0.3, 1.0, 2.5] {
            assert_rel(euclidean_ball_volume(1, r), 2.0 * r, REL);
            assert_rel(euclidean_ball_volume(2, r), PI * r * r, REL);
            assert_rel(euclidean_ball_volume(3, r), 4.0 / 3.0 * PI * r.powi(3), REL);
            assert_rel(euclidean_ball_volume(4, r), PI * PI / 2.0 * r.powi(4), REL);
        }
        assert_eq!(euclidean_ball_volume(2, 0.0), 0.0);
        assert_rel(euclidean_ball_volume(2, 1.0), PI, REL);
        assert_rel(euclidean_ball_volume(3, 1.0), 4.18879020478639098, REL);
    }

    #[test]
    fn sphere_areas() {
        assert_rel(sphere_surface_area(2), 2.0 * PI, REL); // circle
        assert_rel(sphere_surface_area(3), 4.0 * PI, REL); // S^2
        assert_rel(sphere_surface_area(4), 2.0 * PI * PI, REL); // S^3
    }

    #[test]
    fn theoretical_mdf_values() {
        let grid = RadiusGrid::from_radii(vec![0.1, 0.5]).unwrap();
        let torus = ManifoldModel::flat(2, Some(1.0)).unwrap();
        let k = theoretical_mdf(&torus, &grid).unwrap();
        assert_rel(k.values()[0], PI * 0.01, REL);

        let sphere = ManifoldModel::new(
            2,
            Some(4.0 * PI),
            Curvature::Surface { chi: 2, area: Some(4.0 * PI) },
        )
        .unwrap();
        let k = theoretical_mdf(&sphere, &grid).unwrap();
        assert_rel(k.values()[1], 0.0625, REL);

        let no_volume = ManifoldModel::flat(2, None).unwrap();
        assert!(matches!(
            theoretical_mdf(&no_volume, &grid),
            Err(MdfError::MissingParameter(_))
        ));
    }

    #[test]
    fn theoretical_mdf_doubling_ratio_is_exact() {
        // Ball volume is c * r^n with r^n computed by powi, so doubling the
        // radius scales the value by exactly 2^n.
        for n in 1..=6usize {
            let model = ManifoldModel::flat(n, Some(3.7)).unwrap();
            let grid = RadiusGrid::from_radii(vec![0.37, 0.74]).unwrap();
            let k = theoretical_mdf(&model, &grid).unwrap();
            assert_eq!(k.values()[1] / k.values()[0], (1u64 << n) as f64);
        }
    }

    #[test]
    fn local_factor_values() {
        assert_eq!(local_curvature_factor(0.0, 2, 0.3).unwrap(), 1.0);
        assert_eq!(local_curvature_factor(0.0, 7, 2.0).unwrap(), 1.0);
        // (1 - 2*0.09/24)^-1 evaluated directly
        assert_rel(local_curvature_factor(2.0, 2, 0.3).unwrap(), 1.0075566750629723, REL);
        assert!(matches!(
            local_curvature_factor(24.0, 2, 1.0),
            Err(MdfError::SingularScaling { .. })
        ));
    }

    #[test]
    fn surface_factor_values() {
        // chi = 0: no scaling regardless of radius or area
        assert_eq!(surface_aggregate_factor(0, 0.7, None).unwrap(), 1.0);
        assert_eq!(surface_aggregate_factor(0, 0.7, Some(2.0)).unwrap(), 1.0);
        // heuristic forms evaluated directly
        assert_rel(
            surface_aggregate_factor(2, 0.1, None).unwrap(),
            1.0 / (1.0 - PI / 12.0), // 1.3546453138512415
            REL,
        );
        assert_rel(
            surface_aggregate_factor(-2, 0.1, None).unwrap(),
            1.0 / (1.0 + PI / 12.0), // 0.7925190087024975
            REL,
        );
        // heuristic factor is radius-free
        assert_eq!(
            surface_aggregate_factor(2, 0.1, None).unwrap(),
            surface_aggregate_factor(2, 10.0, None).unwrap()
        );
        // chi large enough makes the heuristic denominator nonpositive
        assert!(matches!(
            surface_aggregate_factor(8, 0.1, None),
            Err(MdfError::SingularScaling { .. })
        ));
    }

    #[test]
    fn hypersurface_factor_values() {
        // (1 - 0.25*2*1/96)^-1 evaluated directly
        assert_rel(
            hypersurface_aggregate_factor(2.0, 2, 0.5).unwrap(),
            1.0052356020942408,
            REL,
        );
        // (1 - 0.09*5*4/420)^-1 with the sub-hypersphere rule lambda1 = n
        assert_rel(
            hypersurface_aggregate_factor(5.0, 5, 0.3).unwrap(),
            1.0043041606886658,
            REL,
        );
        // n = 1 has a vanishing coefficient
        assert_eq!(hypersurface_aggregate_factor(3.0, 1, 0.5).unwrap(), 1.0);
        assert!(matches!(
            hypersurface_aggregate_factor(100.0, 2, 1.0),
            Err(MdfError::SingularScaling { .. })
        ));
    }

    #[test]
    fn radius_dependent_factors_tend_to_one() {
        let r = 1e-12;
        let factors = [
            local_curvature_factor(5.0, 3, r).unwrap(),
            surface_aggregate_factor(2, r, Some(4.0 * PI)).unwrap(),
            hypersurface_aggregate_factor(5.0, 5, r).unwrap(),
        ];
        for f in factors {
            assert!((f - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn factors_increase_with_radius_for_positive_curvature() {
        let radii = [0.1, 0.2, 0.4, 0.8];
        let mut prev = 0.0;
        for &r in &radii {
            let f = local_curvature_factor(2.0, 2, r).unwrap();
            assert!(f > prev);
            prev = f;
        }
        let mut prev = 0.0;
        for &r in &radii {
            let f = surface_aggregate_factor(2, r, Some(4.0 * PI)).unwrap();
            assert!(f > prev);
            prev = f;
        }
        let mut prev = 0.0;
        for &r in &radii {
            let f = hypersurface_aggregate_factor(5.0, 5, r).unwrap();
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn surface_and_local_forms_agree_on_constant_curvature() {
        // For a closed surface of constant Gaussian curvature G the total
        // curvature is G * A = 2 pi chi, so the exact surface factor equals
        // the local factor evaluated at sc = pi chi / A (= G / 2). The unit
        // sphere gives G = 1, chi = 2, A = 4 pi.
        let cases = [
            (2i64, 4.0 * PI),       // unit sphere
            (2, 16.0 * PI),         // sphere of radius 2
            (-2, 12.56637061435917), // genus-2 surface, hyperbolic area
        ];
        for (chi, area) in cases {
            let sc = PI * chi as f64 / area;
            for &r in &[0.05, 0.3, 0.9] {
                let surf = surface_aggregate_factor(chi, r, Some(area)).unwrap();
                let local = local_curvature_factor(sc, 2, r).unwrap();
                assert!((surf - local).abs() < 1e-12, "chi={chi} r={r}");
            }
        }
    }

    #[test]
    fn catalog_contents() {
        let c5 = lambda1_catalog(5, None);
        let values: Vec<f64> = c5.iter().map(|c| c.value).collect();
        for expected in [5.0, 12.0, 20.0] {
            assert!(values.iter().any(|v| (v - expected).abs() < REL));
        }
        assert!(c5.iter().all(|c| c.name != "complex-projective"));
        // CR families for n = 5, a in {1, 2}
        for expected in [12.8, 13.6, 16.8, 21.6] {
            assert!(values.iter().any(|v| (v - expected).abs() < 1e-12));
        }

        let c2 = lambda1_catalog(2, Some(4.0 * PI * PI));
        let clifford = c2.iter().find(|c| c.name == "clifford-torus").unwrap();
        assert!((clifford.value - 1.0).abs() < REL);
        assert!(clifford.requires_volume);

        let c4 = lambda1_catalog(4, None);
        let quat = c4.iter().find(|c| c.name == "quaternion-projective").unwrap();
        assert_eq!(quat.value, 16.0);

        // no volume, n = 2: volume-dependent families omitted
        let c2b = lambda1_catalog(2, None);
        assert!(c2b.iter().all(|c| !c.requires_volume));

        // sorted ascending by value
        for c in [&c5, &c2, &c4] {
            assert!(c.windows(2).all(|w| w[0].value <= w[1].value));
        }
    }

    #[test]
    fn scaling_factor_dispatch() {
        let model = ManifoldModel::new(
            2,
            Some(1.0),
            Curvature::PointwiseScalar(vec![0.0, 2.0]),
        )
        .unwrap();
        assert!(ScalingFactor::global_for(&model).is_none());
        let f0 = ScalingFactor::at_point(&model, 0).unwrap();
        assert_eq!(f0.evaluate(0.3).unwrap(), 1.0);
        let f1 = ScalingFactor::at_point(&model, 1).unwrap();
        assert!(f1.evaluate(0.3).unwrap() > 1.0);
        assert!(ScalingFactor::at_point(&model, 2).is_err());

        let sphere = ManifoldModel::new(2, Some(4.0 * PI), Curvature::Surface { chi: 2, area: None })
            .unwrap();
        let f = ScalingFactor::global_for(&sphere).unwrap();
        assert_eq!(f, ScalingFactor::SurfaceHeuristic { chi: 2 });
        assert_eq!(f.to_string(), "surface-heuristic(chi=2)");
    }
}
