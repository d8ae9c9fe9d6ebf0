//! Ordinal (nonmetric) multidimensional scaling by stress majorization.
//!
//! Each iteration alternates a monotone regression of the current distances
//! on the dissimilarity order with a Guttman transform of the configuration.
//! Disparities are rescaled so their sum of squares equals the number of
//! pairs; under that constraint both half-steps minimize the same raw stress,
//! so the stress sequence never increases.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dissimilarity, StructureError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdsOptions {
    pub dims: usize,
    pub max_iter: usize,
    /// Stop once an iteration lowers normalized stress by less than this.
    pub tolerance: f64,
    /// Extra random starts besides the classical-scaling start; the lowest
    /// stress wins.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for MdsOptions {
    fn default() -> Self {
        MdsOptions {
            dims: 2,
            max_iter: 500,
            tolerance: 1e-6,
            random_starts: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub labels: Vec<String>,
    /// One row per point.
    pub coords: Vec<Vec<f64>>,
    /// Stress-1: square root of raw stress over the disparity sum of squares.
    pub stress: f64,
    /// Stress-1 after every iteration, starting with the initial configuration.
    pub stress_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Configuration {
    pub fn coords_matrix(&self) -> DMatrix<f64> {
        let dims = self.coords.first().map_or(0, Vec::len);
        DMatrix::from_fn(self.coords.len(), dims, |i, j| self.coords[i][j])
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclid(&self.coords[i], &self.coords[j])
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Pool-adjacent-violators fit of a non-decreasing sequence (unit weights).
pub fn isotonic_fit(values: &[f64]) -> Vec<f64> {
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s2, c2) = blocks[blocks.len() - 1];
            let (s1, c1) = blocks[blocks.len() - 2];
            if s1 / c1 as f64 > s2 / c2 as f64 {
                blocks.pop();
                *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
            } else {
                break;
            }
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c))
        .collect()
}

/// Classical (Torgerson) scaling: top eigenvectors of the double-centered
/// squared dissimilarities.
pub fn classical_scaling(d: &DMatrix<f64>, dims: usize) -> DMatrix<f64> {
    let n = d.nrows();
    let d2 = d.map(|v| v * v);
    let row_means: Vec<f64> = (0..n).map(|i| d2.row(i).mean()).collect();
    let grand = d2.mean();
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (d2[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]));
    let mut x = DMatrix::zeros(n, dims);
    for (k, &idx) in order.iter().take(dims).enumerate() {
        let lambda = eig.eigenvalues[idx].max(0.0);
        let mut v = eig.eigenvectors.column(idx).into_owned();
        // fix the sign: largest-magnitude component positive
        let pivot = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
        if pivot < 0.0 {
            v.neg_mut();
        }
        x.set_column(k, &(v * lambda.sqrt()));
    }
    x
}

struct Pairs {
    idx: Vec<(usize, usize)>,
    delta: Vec<f64>,
}

fn pairs(d: &DMatrix<f64>) -> Pairs {
    let n = d.nrows();
    let mut idx = Vec::with_capacity(n * (n - 1) / 2);
    let mut delta = Vec::with_capacity(idx.capacity());
    for i in 0..n {
        for j in (i + 1)..n {
            idx.push((i, j));
            delta.push(d[(i, j)]);
        }
    }
    Pairs { idx, delta }
}

fn distances(x: &DMatrix<f64>, p: &Pairs) -> Vec<f64> {
    p.idx
        .iter()
        .map(|&(i, j)| (x.row(i) - x.row(j)).norm())
        .collect()
}

/// Disparities: monotone regression of `dist` on the dissimilarity order,
/// tied dissimilarities ordered by current distance, then rescaled so the sum
/// of squares equals the pair count.
fn disparities(p: &Pairs, dist: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| p.delta[a].total_cmp(&p.delta[b]).then(dist[a].total_cmp(&dist[b])));
    let sorted: Vec<f64> = order.iter().map(|&k| dist[k]).collect();
    let fitted = isotonic_fit(&sorted);
    let mut dhat = vec![0.0; dist.len()];
    for (&k, v) in order.iter().zip(fitted) {
        dhat[k] = v;
    }
    let ss: f64 = dhat.iter().map(|v| v * v).sum();
    let target = dist.len() as f64;
    if ss > 0.0 {
        let f = (target / ss).sqrt();
        dhat.iter_mut().for_each(|v| *v *= f);
    }
    dhat
}

fn raw_stress(dhat: &[f64], dist: &[f64]) -> f64 {
    dhat.iter().zip(dist).map(|(a, b)| (a - b).powi(2)).sum()
}

fn guttman(x: &DMatrix<f64>, p: &Pairs, dhat: &[f64], dist: &[f64]) -> DMatrix<f64> {
    let n = x.nrows();
    let mut b = DMatrix::zeros(n, n);
    for (k, &(i, j)) in p.idx.iter().enumerate() {
        if dist[k] > 0.0 {
            let v = -dhat[k] / dist[k];
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    for i in 0..n {
        let s: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)]).sum();
        b[(i, i)] = -s;
    }
    (b * x) / n as f64
}

fn smacof_from(mut x: DMatrix<f64>, p: &Pairs, opts: &MdsOptions) -> (DMatrix<f64>, Vec<f64>, usize, bool) {
    let m = p.delta.len() as f64;
    let mut dist = distances(&x, p);
    let mut dhat = disparities(p, &dist);
    // optimal uniform scale of the start against its disparities
    let dd: f64 = dist.iter().map(|v| v * v).sum();
    if dd > 0.0 {
        let s = dhat.iter().zip(&dist).map(|(a, b)| a * b).sum::<f64>() / dd;
        x *= s;
        dist.iter_mut().for_each(|v| *v *= s);
    }
    let mut sigma = raw_stress(&dhat, &dist) / m;
    let mut history = vec![sigma.sqrt()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        x = guttman(&x, p, &dhat, &dist);
        dist = distances(&x, p);
        dhat = disparities(p, &dist);
        let next = raw_stress(&dhat, &dist) / m;
        iterations += 1;
        history.push(next.sqrt());
        let improvement = sigma - next;
        sigma = next;
        if improvement < opts.tolerance {
            converged = true;
            break;
        }
    }
    if sigma <= opts.tolerance && !converged {
        converged = true;
    }
    (x, history, iterations, converged)
}

/// Fits an ordinal MDS configuration, started from classical scaling.
pub fn ordinal_mds(d: &Dissimilarity, opts: &MdsOptions) -> Result<Configuration, StructureError> {
    let n = d.labels.len();
    if n < 2 {
        return Err(StructureError::TooFewPoints(n));
    }
    if d.d.iter().all(|&v| v == 0.0) {
        return Err(StructureError::DegenerateDissimilarity);
    }
    let p = pairs(&d.d);
    let mut starts = vec![classical_scaling(&d.d, opts.dims)];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        starts.push(DMatrix::from_fn(n, opts.dims, |_, _| rng.random_range(-1.0..1.0)));
    }
    let mut best: Option<(DMatrix<f64>, Vec<f64>, usize, bool)> = None;
    for start in starts {
        if start.iter().all(|v| v.abs() < 1e-300) {
            continue;
        }
        let run = smacof_from(start, &p, opts);
        let better = best
            .as_ref()
            .is_none_or(|b| run.1.last().unwrap() < b.1.last().unwrap());
        if better {
            best = Some(run);
        }
    }
    let (x, history, iterations, converged) = best.ok_or(StructureError::DegenerateDissimilarity)?;
    Ok(Configuration {
        labels: d.labels.clone(),
        coords: (0..n).map(|i| x.row(i).iter().copied().collect()).collect(),
        stress: history.last().copied().unwrap_or(0.0).clamp(0.0, 1.0),
        stress_history: history,
        iterations,
        converged,
    })
}
