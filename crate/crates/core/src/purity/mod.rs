//! Finite-sample purity ratio and exact purity oracles for finite `Y`.
//!
//! A conditional `P(Y|X)` is pairwise pure when no affine extension of the
//! segment between two conditionals stays inside the probability simplex.
//! For densities this is equivalent to `inf_y p(y|x)/p(y|x') = 0` for every
//! ordered pair. From samples we estimate the densities on the pooled data
//! range and look at the smallest density ratio on the grid.

mod combinatorics;
mod discrete;

pub use combinatorics::{antichain_bruteforce_m, sperner_m};
pub use discrete::{
    discrete_kwise_pure_bruteforce, discrete_pairwise_pure, kwise_bruteforce_margin, DiscreteConditional, KwiseSearch,
    SUPPORT_EPS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kde::{estimate_densities, DensityGrid};
use crate::samples::GroupedSamples;

pub const DEFAULT_PURITY_THRESHOLD: f64 = 0.1;

/// `min_y p̂(y|from) / p̂(y|to)` for one ordered pair of labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRatio {
    pub from: String,
    pub to: String,
    pub ratio: f64,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    /// Every ordered pair, in label order.
    pub pair_ratios: Vec<PairRatio>,
    /// Max over unordered pairs of the smaller of the two ordered ratios.
    pub purity_ratio: f64,
    /// Natural log of `purity_ratio`, kept separately since the ratio may underflow.
    pub log_purity_ratio: f64,
    pub threshold: f64,
    pub is_pure: bool,
    pub grid_size: usize,
}

impl PurityReport {
    pub fn ratio(&self, from: &str, to: &str) -> Option<f64> {
        self.pair_ratios.iter().find(|p| p.from == from && p.to == to).map(|p| p.ratio)
    }

    /// `-ln(purity_ratio)`; large values indicate purity.
    pub fn neg_log_purity(&self) -> f64 {
        -self.log_purity_ratio
    }
}

fn ratio_from_log(log_ratio: f64) -> f64 {
    log_ratio.exp().max(f64::MIN_POSITIVE)
}

/// Log of `min` over grid points of `curve(x) / curve(x')`.
pub fn pairwise_min_log_ratio(curves: &DensityGrid, x: &str, x_prime: &str) -> Result<f64> {
    let a = curves.log_curve(x)?;
    let b = curves.log_curve(x_prime)?;
    Ok(a.iter().zip(b).map(|(la, lb)| la - lb).fold(f64::INFINITY, f64::min))
}

/// Minimum over the grid of `curve(x) / curve(x')`, strictly positive.
pub fn pairwise_min_ratio(curves: &DensityGrid, x: &str, x_prime: &str) -> Result<f64> {
    pairwise_min_log_ratio(curves, x, x_prime).map(ratio_from_log)
}

/// Reduces already estimated curves to a purity report.
pub fn purity_report(curves: &DensityGrid, threshold: f64) -> Result<PurityReport> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {threshold}")));
    }
    let labels: Vec<&str> = curves.labels().collect();
    let mut pair_ratios = Vec::with_capacity(labels.len() * (labels.len() - 1));
    for &from in &labels {
        for &to in &labels {
            if from != to {
                let log_ratio = pairwise_min_log_ratio(curves, from, to)?;
                pair_ratios.push(PairRatio {
                    from: from.to_string(),
                    to: to.to_string(),
                    ratio: ratio_from_log(log_ratio),
                    log_ratio,
                });
            }
        }
    }
    let log_of = |from: &str, to: &str| {
        pair_ratios
            .iter()
            .find(|p| p.from == from && p.to == to)
            .map(|p| p.log_ratio)
            .expect("every ordered pair was computed")
    };
    let mut log_purity_ratio = f64::NEG_INFINITY;
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            log_purity_ratio = log_purity_ratio.max(log_of(a, b).min(log_of(b, a)));
        }
    }
    let purity_ratio = ratio_from_log(log_purity_ratio);
    Ok(PurityReport {
        pair_ratios,
        purity_ratio,
        log_purity_ratio,
        threshold,
        is_pure: purity_ratio < threshold,
        grid_size: curves.grid.len(),
    })
}

/// Estimates the densities and computes the purity ratio of `P(Y|X)`.
pub fn purity_ratio(data: &GroupedSamples, grid_size: usize, threshold: f64) -> Result<PurityReport> {
    let curves = estimate_densities(data, grid_size, None)?;
    purity_report(&curves, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kde::DEFAULT_GRID_SIZE;
    use crate::seed::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_groups(seed: u64, means: &[f64], n: usize) -> GroupedSamples {
        let mut rng = rng_from_seed(seed);
        let mut pairs = Vec::new();
        for (i, m) in means.iter().enumerate() {
            for _ in 0..n {
                let z: f64 = StandardNormal.sample(&mut rng);
                pairs.push((format!("g{i}"), m + z));
            }
        }
        GroupedSamples::from_pairs(pairs).unwrap()
    }

    #[test]
    fn identical_curves_give_ratio_one() {
        let ys = [0.2, 1.4, -0.5, 0.9];
        let data =
            GroupedSamples::from_pairs(ys.iter().map(|&y| ("a", y)).chain(ys.iter().map(|&y| ("b", y)))).unwrap();
        let curves = estimate_densities(&data, 41, None).unwrap();
        assert_eq!(pairwise_min_ratio(&curves, "a", "b").unwrap(), 1.0);
        let report = purity_report(&curves, 0.1).unwrap();
        assert_eq!(report.purity_ratio, 1.0);
        assert!(!report.is_pure);
    }

    #[test]
    fn separated_gaussians_have_small_ratio() {
        let data = normal_groups(3, &[0.0, 5.0], 1000);
        let curves = estimate_densities(&data, DEFAULT_GRID_SIZE, None).unwrap();
        let r = pairwise_min_ratio(&curves, "g0", "g1").unwrap();
        assert!(r > 0.0 && r < 0.1, "{r}");
    }

    #[test]
    fn uniforms_are_not_pure() {
        let mut rng = rng_from_seed(17);
        let pairs: Vec<(&str, f64)> =
            (0..2000).map(|i| (if i % 2 == 0 { "a" } else { "b" }, rng.random::<f64>())).collect();
        let data = GroupedSamples::from_pairs(pairs).unwrap();
        let curves = estimate_densities(&data, DEFAULT_GRID_SIZE, None).unwrap();
        let r = pairwise_min_ratio(&curves, "a", "b").unwrap();
        assert!(r > 0.3, "{r}");
    }

    #[test]
    fn unknown_label_is_an_error() {
        let data = normal_groups(1, &[0.0, 1.0], 20);
        let curves = estimate_densities(&data, 21, None).unwrap();
        assert_eq!(pairwise_min_ratio(&curves, "g0", "nope"), Err(Error::UnknownLabel("nope".into())));
    }

    #[test]
    fn report_reduction_and_decision() {
        let data = normal_groups(9, &[0.0, 1.5, 4.0], 300);
        let report = purity_ratio(&data, 101, 0.1).unwrap();
        assert_eq!(report.pair_ratios.len(), 6);
        assert!(report.pair_ratios.iter().all(|p| p.ratio > 0.0));
        let mut expected = f64::NEG_INFINITY;
        for (a, b) in [("g0", "g1"), ("g0", "g2"), ("g1", "g2")] {
            let m = report.ratio(a, b).unwrap().min(report.ratio(b, a).unwrap());
            expected = expected.max(m);
        }
        assert_eq!(report.purity_ratio, expected);
        assert_eq!(report.is_pure, report.purity_ratio < report.threshold);
    }

    #[test]
    fn reordering_labels_keeps_the_ratio() {
        let data = normal_groups(21, &[0.0, 2.0, 3.0], 200);
        let renamed = data
            .relabel(|l| match l {
                "g0" => "z".into(),
                "g1" => "a".into(),
                _ => "m".into(),
            })
            .unwrap();
        let a = purity_ratio(&data, 101, 0.1).unwrap();
        let b = purity_ratio(&renamed, 101, 0.1).unwrap();
        assert_eq!(a.purity_ratio, b.purity_ratio);
    }

    #[test]
    fn affine_maps_keep_the_ratio() {
        let data = normal_groups(4, &[0.0, 1.0], 400);
        let base = purity_ratio(&data, 101, 0.1).unwrap();
        let mapped = purity_ratio(&data.map_values(|y| 3.7 * y - 12.0).unwrap(), 101, 0.1).unwrap();
        assert!((base.purity_ratio - mapped.purity_ratio).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_threshold() {
        let data = normal_groups(4, &[0.0, 1.0], 20);
        assert!(matches!(purity_ratio(&data, 21, 0.0), Err(Error::InvalidParameter(_))));
    }
}
