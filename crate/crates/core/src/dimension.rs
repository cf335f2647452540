//! Dimension of the span of the conditionals `{P(Y|x)}`.
//!
//! Each conditional is embedded in the RKHS of a Gaussian kernel through its
//! empirical mean embedding; the rank of the resulting Gram matrix estimates
//! the linear dimension. A binary hidden cause with `X ⊥ Y | Z` forces the
//! rank down to at most 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, SymMatrix};
use crate::parallel::{map_indexed, Execution};
use crate::samples::GroupedSamples;

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-2;
const MEDIAN_SUBSAMPLE: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
    pub kernel_bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEstimate {
    /// Descending, clipped below at zero.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub relative_threshold: f64,
    /// Smallest eigenvalue before clipping.
    pub min_raw_eigenvalue: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median pairwise distance of the pooled values (stride-subsampled to at most 2000 points).
pub fn median_heuristic_bandwidth(data: &GroupedSamples) -> Result<f64> {
    let pooled = data.pooled();
    let stride = pooled.len().div_ceil(MEDIAN_SUBSAMPLE).max(1);
    let sub: Vec<f64> = pooled.iter().step_by(stride).copied().collect();
    if sub.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: sub.len() });
    }
    let mut dists = Vec::with_capacity(sub.len() * (sub.len() - 1) / 2);
    for (i, a) in sub.iter().enumerate() {
        for b in &sub[i + 1..] {
            dists.push((a - b).abs());
        }
    }
    let m = median(&mut dists);
    if m > 0.0 {
        return Ok(m);
    }
    // Heavy ties: fall back to the non-zero distances.
    let mut nonzero: Vec<f64> = dists.into_iter().filter(|&d| d > 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::ZeroSpread);
    }
    Ok(median(&mut nonzero))
}

fn mean_kernel(a: &[f64], b: &[f64], inv_two_h2: f64) -> f64 {
    let mut total = 0.0;
    for &ya in a {
        let mut row = 0.0;
        for &yb in b {
            let d = ya - yb;
            row += (-d * d * inv_two_h2).exp();
        }
        total += row;
    }
    total / (a.len() as f64 * b.len() as f64)
}

/// Gram matrix of the empirical kernel mean embeddings,
/// `M[x][x'] = mean over i, j of k(y_i^x, y_j^x')`.
pub fn gram_matrix(data: &GroupedSamples, bandwidth: f64) -> Result<GramMatrix> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let groups: Vec<&[f64]> = data.groups().values().map(Vec::as_slice).collect();
    let k = groups.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    let values = map_indexed(Execution::Parallel, pairs.len(), |p| {
        let (i, j) = pairs[p];
        mean_kernel(groups[i], groups[j], inv_two_h2)
    });
    let mut entries = vec![vec![0.0; k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        entries[i][j] = v;
        entries[j][i] = v;
    }
    Ok(GramMatrix { labels: data.labels().map(str::to_string).collect(), entries, kernel_bandwidth: bandwidth })
}

/// Counts eigenvalues above `relative_threshold * λ_max`.
pub fn estimate_rank(gram: &GramMatrix, relative_threshold: f64) -> Result<RankEstimate> {
    if !(relative_threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("relative threshold must be positive, got {relative_threshold}")));
    }
    let m = SymMatrix::from_rows(&gram.entries);
    let asym = m.asymmetry();
    if asym > 1e-12 * m.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = symmetric_eigen(&m);
    let min_raw_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    let eigenvalues: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
    let lmax = eigenvalues.first().copied().unwrap_or(0.0);
    let rank = eigenvalues.iter().filter(|&&l| l > relative_threshold * lmax).count();
    Ok(RankEstimate { eigenvalues, rank, relative_threshold, min_raw_eigenvalue })
}

pub fn estimate_dimension_with(data: &GroupedSamples, relative_threshold: f64) -> Result<RankEstimate> {
    let h = median_heuristic_bandwidth(data)?;
    estimate_rank(&gram_matrix(data, h)?, relative_threshold)
}

/// Median-heuristic bandwidth, Gram matrix and rank with the default threshold.
pub fn estimate_dimension(data: &GroupedSamples) -> Result<RankEstimate> {
    estimate_dimension_with(data, DEFAULT_RANK_THRESHOLD)
}
