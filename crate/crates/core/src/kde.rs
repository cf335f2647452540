//! Gaussian kernel density estimates of each conditional `P(Y|x)` on a shared grid.
//!
//! The grid spans exactly `[y_min, y_max]` of the pooled observations, with
//! equally spaced points. Densities are evaluated in log space so that ratios
//! between curves stay meaningful far from the data, where the linear values
//! underflow.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::samples::GroupedSamples;

pub const DEFAULT_GRID_SIZE: usize = 201;

/// Estimated densities of every group on a common evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub grid: Vec<f64>,
    /// Density values aligned with `grid`, floored at `f64::MIN_POSITIVE`.
    pub curves: BTreeMap<String, Vec<f64>>,
    /// Natural log of the unfloored densities.
    pub log_curves: BTreeMap<String, Vec<f64>>,
    pub bandwidths: BTreeMap<String, f64>,
}

impl DensityGrid {
    pub fn curve(&self, label: &str) -> Result<&[f64]> {
        self.curves.get(label).map(Vec::as_slice).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn log_curve(&self, label: &str) -> Result<&[f64]> {
        self.log_curves.get(label).map(Vec::as_slice).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.curves.keys().map(String::as_str)
    }
}

/// Sample quantile with linear interpolation between order statistics.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Silverman's rule of thumb, `1.06 * min(std, IQR / 1.34) * n^(-1/5)`.
///
/// When the interquartile range vanishes but the standard deviation does not,
/// the standard deviation alone is used.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: n });
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    if !(std > 0.0) {
        return Err(Error::ZeroSpread);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { std.min(iqr / 1.34) } else { std };
    let h = 1.06 * spread * (n as f64).powf(-0.2);
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(Error::ZeroSpread)
    }
}

/// `grid_size` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, grid_size: usize) -> Vec<f64> {
    let step = (hi - lo) / (grid_size - 1) as f64;
    (0..grid_size).map(|i| if i + 1 == grid_size { hi } else { lo + step * i as f64 }).collect()
}

/// Log of the Gaussian-kernel density estimate of `samples` at each grid point.
pub fn log_kde(samples: &[f64], bandwidth: f64, grid: &[f64]) -> Vec<f64> {
    let norm = (samples.len() as f64 * bandwidth * (2.0 * PI).sqrt()).ln();
    grid.iter()
        .map(|&t| {
            let max_e = samples
                .iter()
                .map(|&y| {
                    let u = (t - y) / bandwidth;
                    -0.5 * u * u
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = samples
                .iter()
                .map(|&y| {
                    let u = (t - y) / bandwidth;
                    (-0.5 * u * u - max_e).exp()
                })
                .sum();
            max_e + sum.ln() - norm
        })
        .collect()
}

/// Estimates every `P(Y|x)` on a shared grid of `grid_size` points.
///
/// Each group gets its own Silverman bandwidth unless `bandwidth_override` is set.
pub fn estimate_densities(
    data: &GroupedSamples,
    grid_size: usize,
    bandwidth_override: Option<f64>,
) -> Result<DensityGrid> {
    if grid_size < 2 {
        return Err(Error::GridTooSmall(grid_size));
    }
    if let Some(h) = bandwidth_override {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")));
        }
    }
    let (lo, hi) = data.range();
    if !(hi > lo) {
        return Err(Error::ZeroSpread);
    }
    let grid = linspace(lo, hi, grid_size);
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "grid is not strictly increasing; data range too narrow for grid size".into(),
        ));
    }

    let groups: Vec<(&String, &Vec<f64>)> = data.groups().iter().collect();
    let bandwidths = groups
        .iter()
        .map(|(label, ys)| {
            let h = match bandwidth_override {
                Some(h) => h,
                None => silverman_bandwidth(ys)?,
            };
            Ok(((*label).clone(), h))
        })
        .collect::<Result<BTreeMap<String, f64>>>()?;

    let logs = map_indexed(Execution::Parallel, groups.len(), |i| {
        let (label, ys) = groups[i];
        log_kde(ys, bandwidths[label], &grid)
    });

    let mut curves = BTreeMap::new();
    let mut log_curves = BTreeMap::new();
    for ((label, _), log_curve) in groups.iter().zip(logs) {
        let curve = log_curve.iter().map(|l| l.exp().max(f64::MIN_POSITIVE)).collect();
        curves.insert((*label).clone(), curve);
        log_curves.insert((*label).clone(), log_curve);
    }
    Ok(DensityGrid { grid, curves, log_curves, bandwidths })
}

/// Trapezoid-rule integral of `values` over `grid`.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2).zip(values.windows(2)).map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1])).sum()
}
