//! Seeded generators and experiment drivers.
//!
//! Every generator is a pure function of its seed. Sweeps derive one child
//! seed per run with [`crate::seed::derive_seed`], so parallel and sequential
//! execution give identical results.

mod anm;
mod experiments;
mod genetics;
mod roc;

pub use anm::{gen_confounded, gen_direct, gen_marginalized, ConfoundedTruth, MarginalizationConfig, Transition};
pub use experiments::{
    run_fig3, run_fig4, run_fig5, run_marginalization, Fig3Config, Fig3Result, Fig4Record, Fig4Result, Fig4Summary,
    GeneticsConfig, HistogramBin, MarginalizationReport, SweepResult,
};
pub use genetics::{correlation_r2, corrupt, gen_genotypes, gen_two_locus_phenotype, GenotypeMatrix};
pub use roc::roc_auc;

use rand::Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the additive noise `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Gaussian { sigma: f64 },
    TwoGaussianMixture { mean1: f64, sd1: f64, mean2: f64, sd2: f64, weight1: f64 },
    Cauchy { scale: f64 },
}

impl NoiseSpec {
    /// Symmetric bimodal mixture used for the synthetic purity experiments.
    pub const DEFAULT_MIXTURE: NoiseSpec =
        NoiseSpec::TwoGaussianMixture { mean1: -0.5, sd1: 0.25, mean2: 0.5, sd2: 0.25, weight1: 0.5 };

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseSpec::Gaussian { sigma } => sigma > 0.0 && sigma.is_finite(),
            NoiseSpec::TwoGaussianMixture { mean1, sd1, mean2, sd2, weight1 } => {
                sd1 > 0.0 && sd2 > 0.0 && mean1.is_finite() && mean2.is_finite() && weight1 > 0.0 && weight1 < 1.0
            }
            NoiseSpec::Cauchy { scale } => scale > 0.0 && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid noise specification {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseSpec::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            NoiseSpec::TwoGaussianMixture { mean1, sd1, mean2, sd2, weight1 } => {
                let u: f64 = rng.random();
                let z: f64 = StandardNormal.sample(rng);
                if u < weight1 {
                    mean1 + sd1 * z
                } else {
                    mean2 + sd2 * z
                }
            }
            NoiseSpec::Cauchy { scale } => Cauchy::new(0.0, scale).expect("validated scale").sample(rng),
        }
    }
}

/// Linear additive noise model `Y = w·X + E` with binary `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnmConfig {
    /// Standard deviation of the zero-mean Gaussian the weight is drawn from.
    pub weight_std: f64,
    /// Fixed weight instead of a random draw.
    pub weight_override: Option<f64>,
    pub noise: NoiseSpec,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for AnmConfig {
    fn default() -> Self {
        Self { weight_std: 1.0, weight_override: None, noise: NoiseSpec::DEFAULT_MIXTURE, n_samples: 1000, seed: 0 }
    }
}

impl AnmConfig {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.n_samples < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 samples, got {}", self.n_samples)));
        }
        if self.weight_override.is_none() && !(self.weight_std > 0.0 && self.weight_std.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight_std must be positive, got {}", self.weight_std)));
        }
        Ok(())
    }

    fn draw_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.weight_override {
            Some(w) => w,
            None => {
                let z: f64 = StandardNormal.sample(rng);
                self.weight_std * z
            }
        }
    }
}
