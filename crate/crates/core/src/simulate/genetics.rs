use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Binary genotypes, one column per SNP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenotypeMatrix {
    pub n_samples: usize,
    pub linkage_flip_prob: f64,
    columns: Vec<Vec<u8>>,
}

impl GenotypeMatrix {
    pub fn n_snps(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, snp: usize) -> &[u8] {
        &self.columns[snp]
    }
}

/// Genotypes with linkage: column 0 is Bernoulli with a minor allele frequency
/// drawn from `maf_range`, and each later column copies its left neighbour,
/// flipping each entry with probability `flip_prob`.
pub fn gen_genotypes(
    n_samples: usize,
    n_snps: usize,
    flip_prob: f64,
    maf_range: (f64, f64),
    seed: u64,
) -> Result<GenotypeMatrix> {
    if n_samples == 0 || n_snps == 0 {
        return Err(Error::InvalidParameter("genotype matrix must be non-empty".into()));
    }
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(Error::InvalidParameter(format!("flip probability {flip_prob} outside [0, 1]")));
    }
    let (lo, hi) = maf_range;
    if !(0.0 < lo && lo < hi && hi <= 0.5) {
        return Err(Error::InvalidParameter(format!("invalid minor allele frequency range ({lo}, {hi})")));
    }
    let mut rng = rng_from_seed(seed);
    let maf: f64 = rng.random_range(lo..hi);
    let mut columns = Vec::with_capacity(n_snps);
    columns.push((0..n_samples).map(|_| u8::from(rng.random::<f64>() < maf)).collect::<Vec<u8>>());
    for s in 1..n_snps {
        let next: Vec<u8> =
            columns[s - 1].iter().map(|&g| if rng.random::<f64>() < flip_prob { 1 - g } else { g }).collect();
        columns.push(next);
    }
    Ok(GenotypeMatrix { n_samples, linkage_flip_prob: flip_prob, columns })
}

/// Flips each entry independently with probability `level`.
pub fn corrupt(column: &[u8], level: f64, seed: u64) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidParameter(format!("corruption level {level} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    Ok(column.iter().map(|&g| if rng.random::<f64>() < level { 1 - g } else { g }).collect())
}

/// `y = w1·x + w2·v + σ·ε` with standard normal `ε`.
pub fn gen_two_locus_phenotype(x: &[u8], v: &[u8], w1: f64, w2: f64, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if x.len() != v.len() {
        return Err(Error::LengthMismatch(x.len(), v.len()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise sigma must be positive, got {sigma}")));
    }
    let mut rng = rng_from_seed(seed);
    Ok(x.iter()
        .zip(v)
        .map(|(&a, &b)| {
            let e: f64 = StandardNormal.sample(&mut rng);
            w1 * a as f64 + w2 * b as f64 + sigma * e
        })
        .collect())
}

/// Squared Pearson correlation between a genotype column and a phenotype.
pub fn correlation_r2(x: &[u8], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("correlation input"));
    }
    let n = x.len() as f64;
    let mx = x.iter().map(|&v| v as f64).sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = a as f64 - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantInput("genotype"));
    }
    if syy == 0.0 {
        return Err(Error::ConstantInput("phenotype"));
    }
    Ok((sxy * sxy / (sxx * syy)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flip_gives_identical_columns() {
        let g = gen_genotypes(200, 5, 0.0, (0.1, 0.5), 1).unwrap();
        for s in 1..5 {
            assert_eq!(g.column(s), g.column(0));
        }
    }

    #[test]
    fn linkage_decays_with_distance() {
        let g = gen_genotypes(5000, 60, 0.05, (0.3, 0.5), 2).unwrap();
        let agree =
            |a: usize, b: usize| g.column(a).iter().zip(g.column(b)).filter(|(x, y)| x == y).count() as f64 / 5000.0;
        // Agreement after d steps is (1 + (1 - 2f)^d) / 2.
        assert!((agree(0, 1) - 0.95).abs() < 0.02);
        assert!((agree(0, 50) - 0.5).abs() < 0.05);
    }

    #[test]
    fn corruption_rate() {
        let col = vec![0u8; 10_000];
        assert_eq!(corrupt(&col, 0.0, 3).unwrap(), col);
        let flipped = corrupt(&col, 0.3, 3).unwrap().iter().filter(|&&g| g == 1).count();
        assert!((flipped as f64 / 10_000.0 - 0.3).abs() < 0.02);
        assert!(corrupt(&col, 1.5, 3).is_err());
    }

    #[test]
    fn r2_edge_cases() {
        let x = [0u8, 1, 0, 1, 1];
        let y: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        assert!((correlation_r2(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|&v| 3.0 - 2.0 * v as f64).collect();
        assert!((correlation_r2(&x, &neg).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(correlation_r2(&[1, 1, 1], &[0.0, 1.0, 2.0]), Err(Error::ConstantInput("genotype")));
        assert_eq!(correlation_r2(&[0, 1], &[2.0, 2.0]), Err(Error::ConstantInput("phenotype")));
    }

    #[test]
    fn phenotype_is_seeded() {
        let x = [0u8, 1, 1, 0];
        let v = [1u8, 1, 0, 0];
        let a = gen_two_locus_phenotype(&x, &v, 1.0, 2.0, 0.25, 9).unwrap();
        assert_eq!(a, gen_two_locus_phenotype(&x, &v, 1.0, 2.0, 0.25, 9).unwrap());
        assert!(gen_two_locus_phenotype(&x, &v[..3], 1.0, 2.0, 0.25, 9).is_err());
    }
}
