//! Geodesic distance reconstruction from ambient point clouds: k-nearest-
//! neighbor graphs, all-pairs shortest paths over them, and a PCA baseline
//! embedder. Embeddings produced by external tools enter through the same
//! point-sample CSV and are treated identically.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::distance::DistanceMatrix;
use crate::error::{MdfError, Result};
use crate::points::{euclidean, PointSample};

/// Undirected weighted neighbor graph. Adjacency lists are sorted by
/// neighbor index and symmetric: edge (i, j) is present iff (j, i) is,
/// with equal weight. Coincident points may produce zero-weight edges.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl NeighborGraph {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Smallest vertex index of every connected component.
    pub fn component_representatives(&self) -> Vec<usize> {
        let m = self.len();
        let mut seen = vec![false; m];
        let mut reps = Vec::new();
        let mut stack = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            reps.push(start);
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        reps
    }
}

/// Connects every point to its `k` nearest Euclidean neighbors (ties
/// broken by lower index) and keeps an edge if either endpoint selected
/// it.
pub fn knn_graph(points: &PointSample, k: usize) -> Result<NeighborGraph> {
    let m = points.len();
    if k == 0 || k >= m {
        return Err(MdfError::InvalidArgument(format!(
            "k must satisfy 1 <= k < m, got k = {k} with m = {m}"
        )));
    }
    // Nearest neighbors per point, in parallel; selection is deterministic
    // because the sort key (distance, index) is a total order.
    let selected: Vec<Vec<(usize, f64)>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(f64, usize)> = (0..m)
                .filter(|&j| j != i)
                .map(|j| (euclidean(points.point(i), points.point(j)), j))
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            dists.truncate(k);
            dists.into_iter().map(|(d, j)| (j, d)).collect()
        })
        .collect();

    // Union symmetrization.
    let mut adjacency: Vec<std::collections::BTreeMap<usize, f64>> =
        vec![std::collections::BTreeMap::new(); m];
    for (i, neigh) in selected.iter().enumerate() {
        for &(j, d) in neigh {
            adjacency[i].insert(j, d);
            adjacency[j].insert(i, d);
        }
    }
    Ok(NeighborGraph {
        adjacency: adjacency
            .into_iter()
            .map(|row| row.into_iter().collect())
            .collect(),
    })
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.node.cmp(&other.node))
    }
}

fn dijkstra(g: &NeighborGraph, source: usize) -> Vec<f64> {
    let m = g.len();
    let mut dist = vec![f64::INFINITY; m];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse(HeapEntry {
        dist: 0.0,
        node: source,
    }));
    while let Some(Reverse(entry)) = heap.pop() {
        if entry.dist > dist[entry.node] {
            continue;
        }
        for &(next, w) in g.neighbors(entry.node) {
            let cand = entry.dist + w;
            if cand < dist[next] {
                dist[next] = cand;
                heap.push(Reverse(HeapEntry {
                    dist: cand,
                    node: next,
                }));
            }
        }
    }
    dist
}

/// All-pairs shortest-path distances over the graph, as a validated
/// distance matrix. Errors if the graph is disconnected, naming one
/// vertex per component.
pub fn shortest_path_matrix(g: &NeighborGraph) -> Result<DistanceMatrix> {
    let reps = g.component_representatives();
    if reps.len() > 1 {
        return Err(MdfError::Disconnected(reps));
    }
    let m = g.len();
    let rows: Vec<Vec<f64>> = (0..m).into_par_iter().map(|s| dijkstra(g, s)).collect();
    // Per-source runs accumulate edge weights in opposite orders for the
    // two directions, so entries can disagree by rounding; validation
    // tolerates that and restores exact symmetry.
    DistanceMatrix::from_raw(&rows, false)
}

/// Convenience composition: kNN graph then shortest paths.
pub fn knn_geodesic_matrix(points: &PointSample, k: usize) -> Result<DistanceMatrix> {
    shortest_path_matrix(&knn_graph(points, k)?)
}

/// Exact geodesic (great-circle) distances for points on the unit sphere:
/// `d(a, b) = arccos(<a, b>)`. Unlike a neighbor graph this is defined for
/// every pair, so stratified samples with far-apart pieces stay scorable.
/// Errors if any point is off the unit sphere by more than 1e-9.
pub fn great_circle_matrix(points: &PointSample) -> Result<DistanceMatrix> {
    for (i, p) in points.iter().enumerate() {
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(MdfError::InvalidArgument(format!(
                "point {i} has norm {norm}, not on the unit sphere"
            )));
        }
    }
    DistanceMatrix::from_fn(points.len(), |i, j| {
        let dot: f64 = points
            .point(i)
            .iter()
            .zip(points.point(j))
            .map(|(a, b)| a * b)
            .sum();
        dot.clamp(-1.0, 1.0).acos()
    })
}

/// Jacobi eigendecomposition of a symmetric matrix (row-major, n x n).
/// Returns (eigenvalues, eigenvectors as columns).
fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < 1e-300 || off.sqrt() < 1e-15 * (0..n).map(|i| a[i * n + i].abs()).sum::<f64>().max(1e-30) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * aqj;
                    a[q * n + j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
    (eigenvalues, v)
}

/// Projects centered data onto its top `target_dim` principal directions
/// (covariance eigenvectors in descending eigenvalue order). Each
/// direction is oriented so its largest-magnitude coordinate is positive.
pub fn pca_embed(points: &PointSample, target_dim: usize) -> Result<PointSample> {
    let d = points.dim();
    let m = points.len();
    if target_dim == 0 || target_dim > d {
        return Err(MdfError::InvalidArgument(format!(
            "target dimension {target_dim} must be in 1..={d}"
        )));
    }

    let mut mean = vec![0.0; d];
    for p in points.iter() {
        for (mu, x) in mean.iter_mut().zip(p) {
            *mu += x;
        }
    }
    for mu in &mut mean {
        *mu /= m as f64;
    }

    let mut cov = vec![0.0; d * d];
    if m > 1 {
        for p in points.iter() {
            for i in 0..d {
                let ci = p[i] - mean[i];
                for j in i..d {
                    cov[i * d + j] += ci * (p[j] - mean[j]);
                }
            }
        }
        let denom = (m - 1) as f64;
        for i in 0..d {
            for j in i..d {
                cov[i * d + j] /= denom;
                cov[j * d + i] = cov[i * d + j];
            }
        }
    }

    let (eigenvalues, vectors) = symmetric_eigen(cov, d);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]).then(a.cmp(&b)));
    order.truncate(target_dim);

    // Sign convention: the largest-magnitude coordinate of each direction
    // is positive (first such coordinate on ties).
    let mut directions = vec![vec![0.0; d]; target_dim];
    for (t, &col) in order.iter().enumerate() {
        let column: Vec<f64> = (0..d).map(|i| vectors[i * d + col]).collect();
        let mut lead = 0;
        for (i, c) in column.iter().enumerate() {
            if c.abs() > column[lead].abs() {
                lead = i;
            }
        }
        let sign = if column[lead] < 0.0 { -1.0 } else { 1.0 };
        for (dst, &c) in directions[t].iter_mut().zip(&column) {
            *dst = sign * c;
        }
    }

    let mut data = Vec::with_capacity(m * target_dim);
    for p in points.iter() {
        for dir in &directions {
            let mut y = 0.0;
            for i in 0..d {
                y += dir[i] * (p[i] - mean[i]);
            }
            data.push(y);
        }
    }
    PointSample::new(
        data,
        target_dim,
        points.seed(),
        format!("{}+pca{target_dim}", points.sampler()),
    )
}
