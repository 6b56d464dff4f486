//! Intrinsic validation of manifold learning through manifold density
//! functions.
//!
//! The theoretical manifold density function of an n-manifold compares the
//! volume of Euclidean balls to the manifold volume; empirical estimators
//! count sample neighbors within growing radii of a pairwise distance
//! matrix, corrected for curvature through scalar curvature, the Euler
//! characteristic (surfaces), or the first Laplacian eigenvalue
//! (hypersurfaces). The manifold score `1 - ||K - K_hat||_2` then grades
//! how closely a sample — or the output of a manifold learning model —
//! resembles a uniform sample of the declared manifold.
//!
//! Modules:
//!
//! * [`grid`], [`density`], [`distance`], [`points`], [`model`] — shared
//!   domain types and validation
//! * [`geometry`] — ball volumes, scaling factors, the lambda_1 catalog
//! * [`estimator`] — MDF estimators, manifold scores, parameter searches
//! * [`ripley`] — classical Ripley K baseline with boundary erosion
//! * [`geodesic`] — kNN-graph shortest-path distance reconstruction, PCA
//! * [`sampler`] — seeded samplers for the experiment families
//! * [`io`] — CSV formats
//!
//! Everything is deterministic: samplers are pure functions of their spec,
//! estimator sums run in fixed order, and parallel sections (shortest
//! paths, nearest neighbors) only map independent subproblems, so results
//! are bit-stable across thread counts.

pub mod density;
pub mod distance;
pub mod error;
pub mod estimator;
pub mod geodesic;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod model;
pub mod points;
pub mod ripley;
pub mod sampler;

pub use density::{l2_function_distance, DensityFunction};
pub use distance::DistanceMatrix;
pub use error::{MdfError, Result};
pub use estimator::{
    aggregated_mdf, fit_volume, local_mdf, manifold_score, search_dimension,
    search_euler_characteristic, search_lambda1, sort_rows, CurvatureFamily, ScoreReport,
    SortedDistanceMatrix,
};
pub use geodesic::{
    great_circle_matrix, knn_geodesic_matrix, knn_graph, pca_embed, shortest_path_matrix,
    NeighborGraph,
};
pub use geometry::{
    euclidean_ball_volume, hypersurface_aggregate_factor, lambda1_catalog, local_curvature_factor,
    sphere_surface_area, surface_aggregate_factor, theoretical_mdf, Lambda1Candidate,
    ScalingFactor,
};
pub use grid::RadiusGrid;
pub use model::{Curvature, ManifoldModel};
pub use points::PointSample;
pub use ripley::{
    erode_domain, proportion_normalized, ripley_aggregated, ripley_inhomogeneous, ripley_local,
    RectDomain,
};
pub use sampler::{
    derive_seed, flat_torus_distance, flat_torus_distance_matrix, lift_to_dimension,
    sample_flat_torus, sample_klein_bottle, sample_points, sample_sphere, Family, SamplerSpec,
    Variant,
};
