//! Recovery of a hidden binary cause `Z` with `X ⊥ Y | Z`.
//!
//! All conditionals `P(Y|x)` then lie on one line through the simplex. The two
//! points where that line leaves the simplex are `P(Y|z=0)` and `P(Y|z=1)`
//! (when `P(Y|Z)` is pairwise pure), and each `P(Y|x)` is a convex mixture of
//! them with weight `p(z=1|x)`. The result is unique up to swapping `Z`; we
//! canonicalize so that `density_z0` has the smaller mean.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kde::{estimate_densities, trapezoid, DensityGrid, DEFAULT_GRID_SIZE};
use crate::samples::GroupedSamples;

/// Which end of the line `μA + (1-μ)B` to find.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Largest `μ >= 1` keeping the combination non-negative.
    Upper,
    /// Smallest `μ <= 0` keeping the combination non-negative.
    Lower,
}

/// Extreme `μ` for which `μ·a + (1-μ)·b >= 0` at every grid point.
///
/// Returns `±∞` when the constraint never binds in that direction, i.e. when
/// one curve dominates the other pointwise.
pub fn find_boundary_mu(a: &[f64], b: &[f64], boundary: Boundary) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    let max_diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if a.is_empty() || max_diff <= 1e-9 * scale {
        return Err(Error::DegenerateAnchor);
    }
    Ok(match boundary {
        Boundary::Upper => {
            a.iter().zip(b).filter(|(x, y)| y > x).map(|(x, y)| y / (y - x)).fold(f64::INFINITY, f64::min)
        }
        Boundary::Lower => {
            a.iter().zip(b).filter(|(x, y)| x > y).map(|(x, y)| -y / (x - y)).fold(f64::NEG_INFINITY, f64::max)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    pub grid_size: usize,
    /// Grid points where both anchor curves fall below this fraction of the
    /// larger curve maximum do not constrain `μ`.
    pub support_floor: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self { grid_size: DEFAULT_GRID_SIZE, support_floor: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub grid: Vec<f64>,
    pub density_z0: Vec<f64>,
    pub density_z1: Vec<f64>,
    pub mu0: f64,
    pub mu1: f64,
    /// `p(z=1|x)` per label.
    pub mixing: BTreeMap<String, f64>,
    pub anchor_pair: (String, String),
    /// Grid L2 distance of each `P(Y|x)` to its fitted mixture.
    pub residuals: BTreeMap<String, f64>,
}

impl ReconstructionResult {
    /// The equivalent result with `Z` inverted.
    pub fn inverted(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            density_z0: self.density_z1.clone(),
            density_z1: self.density_z0.clone(),
            mu0: 1.0 - self.mu1,
            mu1: 1.0 - self.mu0,
            mixing: self.mixing.iter().map(|(k, a)| (k.clone(), 1.0 - a)).collect(),
            anchor_pair: (self.anchor_pair.1.clone(), self.anchor_pair.0.clone()),
            residuals: self.residuals.clone(),
        }
    }

    /// Puts the boundary density with the smaller mean at `z = 0`.
    pub fn canonicalized(self) -> Self {
        if grid_mean(&self.grid, &self.density_z0) > grid_mean(&self.grid, &self.density_z1) {
            self.inverted()
        } else {
            self
        }
    }
}

fn grid_mean(grid: &[f64], density: &[f64]) -> f64 {
    let weighted: Vec<f64> = grid.iter().zip(density).map(|(y, d)| y * d).collect();
    trapezoid(grid, &weighted) / trapezoid(grid, density)
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn extrapolate(grid: &[f64], a: &[f64], b: &[f64], mu: f64) -> Result<Vec<f64>> {
    let raw: Vec<f64> = a.iter().zip(b).map(|(x, y)| (mu * x + (1.0 - mu) * y).max(0.0)).collect();
    let mass = trapezoid(grid, &raw);
    if !(mass > 0.0) {
        return Err(Error::NoBoundary);
    }
    Ok(raw.into_iter().map(|v| v / mass).collect())
}

/// Best `α ∈ [0,1]` with `curve ≈ α·d1 + (1-α)·d0` in grid L2.
fn project(curve: &[f64], d0: &[f64], d1: &[f64]) -> f64 {
    let (num, den) = curve.iter().zip(d0).zip(d1).fold((0.0, 0.0), |(n, d), ((c, z0), z1)| {
        let dir = z1 - z0;
        (n + (c - z0) * dir, d + dir * dir)
    });
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.5
    }
}

/// Reconstruction from already estimated curves.
pub fn reconstruct_from_curves(curves: &DensityGrid, support_floor: f64) -> Result<ReconstructionResult> {
    if !(0.0..1.0).contains(&support_floor) {
        return Err(Error::InvalidParameter(format!("support floor must be in [0, 1), got {support_floor}")));
    }
    let labels: Vec<&str> = curves.labels().collect();
    let grid = &curves.grid;
    let mut anchor: Option<(f64, &str, &str)> = None;
    for (i, &x1) in labels.iter().enumerate() {
        for &x2 in &labels[i + 1..] {
            let a = curves.curve(x1)?;
            let b = curves.curve(x2)?;
            let diff: Vec<f64> = a.iter().zip(b).map(|(p, q)| (p - q).abs()).collect();
            let dist = trapezoid(grid, &diff);
            if anchor.is_none_or(|(best, _, _)| dist > best) {
                anchor = Some((dist, x1, x2));
            }
        }
    }
    let (_, x1, x2) = anchor.ok_or(Error::TooFewGroups(labels.len()))?;
    let a = curves.curve(x1)?;
    let b = curves.curve(x2)?;

    let top = a.iter().chain(b).fold(0.0f64, |m, &v| m.max(v));
    let floor = support_floor * top;
    let (ma, mb): (Vec<f64>, Vec<f64>) =
        a.iter().zip(b).filter(|(p, q)| p.max(**q) >= floor).map(|(p, q)| (*p, *q)).unzip();
    if ma.is_empty() {
        return Err(Error::InvalidParameter("support floor excludes every grid point".into()));
    }
    let mu0 = find_boundary_mu(&ma, &mb, Boundary::Upper)?;
    let mu1 = find_boundary_mu(&ma, &mb, Boundary::Lower)?;
    if !mu0.is_finite() || !mu1.is_finite() {
        return Err(Error::NoBoundary);
    }
    let density_z0 = extrapolate(grid, a, b, mu0)?;
    let density_z1 = extrapolate(grid, a, b, mu1)?;

    let mut mixing = BTreeMap::new();
    let mut residuals = BTreeMap::new();
    for &label in &labels {
        let c = curves.curve(label)?;
        let alpha = project(c, &density_z0, &density_z1);
        let fit: Vec<f64> =
            density_z0.iter().zip(&density_z1).map(|(z0, z1)| alpha * z1 + (1.0 - alpha) * z0).collect();
        mixing.insert(label.to_string(), alpha);
        residuals.insert(label.to_string(), l2(c, &fit));
    }
    Ok(ReconstructionResult {
        grid: grid.clone(),
        density_z0,
        density_z1,
        mu0,
        mu1,
        mixing,
        anchor_pair: (x1.to_string(), x2.to_string()),
        residuals,
    }
    .canonicalized())
}

/// Estimates the densities and reconstructs `P(Y|z)` and `p(z=1|x)`.
pub fn reconstruct_binary_cause(data: &GroupedSamples, options: &ReconstructOptions) -> Result<ReconstructionResult> {
    let curves = estimate_densities(data, options.grid_size, None)?;
    reconstruct_from_curves(&curves, options.support_floor)
}
