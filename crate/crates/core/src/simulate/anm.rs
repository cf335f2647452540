use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{AnmConfig, NoiseSpec};
use crate::error::{Error, Result};
use crate::samples::GroupedSamples;
use crate::seed::{rng_from_seed, SimRng};

const MAX_RETRIES: usize = 10;
const MIN_GROUP: usize = 2;

fn groups_ok(x: &[u8]) -> bool {
    let ones = x.iter().filter(|&&v| v != 0).count();
    ones >= MIN_GROUP && x.len() - ones >= MIN_GROUP
}

struct BinaryDraw {
    p: f64,
    w: f64,
    cause: Vec<u8>,
    x: Vec<u8>,
    y: Vec<f64>,
}

/// Draws `P(cause = 1) ~ U[0,1]`, the binary cause and the noise; `observe`
/// maps the cause to the observed `x`. Retries with a fresh probability while
/// an observed group has fewer than two members.
fn draw_binary_anm(
    config: &AnmConfig,
    rng: &mut SimRng,
    mut observe: impl FnMut(&[u8]) -> Vec<u8>,
) -> Result<BinaryDraw> {
    config.validate()?;
    let w = config.draw_weight(rng);
    for _ in 0..=MAX_RETRIES {
        let p: f64 = rng.random();
        let mut cause = Vec::with_capacity(config.n_samples);
        let mut y = Vec::with_capacity(config.n_samples);
        for _ in 0..config.n_samples {
            let c = u8::from(rng.random::<f64>() < p);
            let e = config.noise.sample(rng);
            cause.push(c);
            y.push(w * c as f64 + e);
        }
        let x = observe(&cause);
        if groups_ok(&x) {
            return Ok(BinaryDraw { p, w, cause, x, y });
        }
    }
    Err(Error::RetriesExhausted(MAX_RETRIES))
}

/// Direct setting `X → Y`: `x ~ Bernoulli(p)` with `p ~ U[0,1]`, `y = w·x + e`.
pub fn gen_direct(config: &AnmConfig) -> Result<GroupedSamples> {
    let mut rng = rng_from_seed(config.seed);
    let d = draw_binary_anm(config, &mut rng, |c| c.to_vec())?;
    GroupedSamples::from_binary(&d.x, &d.y)
}

/// Channel from the hidden `Z` to the observed `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transition {
    /// `P(X=0|Z=0)` and `P(X=0|Z=1)` drawn uniformly from (0, 1).
    Random,
    Fixed {
        p_x0_given_z0: f64,
        p_x0_given_z1: f64,
    },
}

impl Transition {
    pub const IDENTITY: Transition = Transition::Fixed { p_x0_given_z0: 1.0, p_x0_given_z1: 0.0 };
}

/// Hidden part of a confounded simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfoundedTruth {
    pub z: Vec<u8>,
    pub x: Vec<u8>,
    pub p_z1: f64,
    pub weight: f64,
    pub p_x0_given_z0: f64,
    pub p_x0_given_z1: f64,
    pub noise: NoiseSpec,
}

/// Confounded setting `X ← Z → Y`: `z` is drawn like `x` in [`gen_direct`],
/// `y = w·z + e`, and `x` passes `z` through a random binary channel.
///
/// The channel uses its own stream seeded by `transition_seed`, so the main
/// stream is the same as in [`gen_direct`] with the same config.
pub fn gen_confounded(
    config: &AnmConfig,
    transition: Transition,
    transition_seed: u64,
) -> Result<(GroupedSamples, ConfoundedTruth)> {
    let mut trng = rng_from_seed(transition_seed);
    let (a, b) = match transition {
        Transition::Random => (trng.random::<f64>(), trng.random::<f64>()),
        Transition::Fixed { p_x0_given_z0, p_x0_given_z1 } => {
            for p in [p_x0_given_z0, p_x0_given_z1] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!("transition probability {p} outside [0, 1]")));
                }
            }
            (p_x0_given_z0, p_x0_given_z1)
        }
    };
    let mut rng = rng_from_seed(config.seed);
    let d = draw_binary_anm(config, &mut rng, |z| {
        z.iter()
            .map(|&zi| {
                let p_x0 = if zi == 0 { a } else { b };
                u8::from(trng.random::<f64>() >= p_x0)
            })
            .collect()
    })?;
    let samples = GroupedSamples::from_binary(&d.x, &d.y)?;
    Ok((
        samples,
        ConfoundedTruth {
            z: d.cause,
            x: d.x,
            p_z1: d.p,
            weight: d.w,
            p_x0_given_z0: a,
            p_x0_given_z1: b,
            noise: config.noise,
        },
    ))
}

/// `Y = Σ_j w_j X_j + E` with binary `X_j`; only `X_1` is observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalizationConfig {
    pub n_vars: usize,
    pub n_samples: usize,
    pub weight_std: f64,
    pub noise_sigma: f64,
    pub grid_size: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for MarginalizationConfig {
    fn default() -> Self {
        Self { n_vars: 3, n_samples: 1000, weight_std: 1.0, noise_sigma: 0.25, grid_size: 201, threshold: 0.1, seed: 0 }
    }
}

/// Samples of `P(Y|X_1)` from the marginalized model, plus the weights used.
///
/// `P(X_j = 1 | x_1)` is drawn from `U(0.1, 0.9)` for each `j >= 2` and each
/// value of `x_1`, so `P(X_2..n | X_1)` is strictly positive.
pub fn gen_marginalized(config: &MarginalizationConfig) -> Result<(GroupedSamples, Vec<f64>)> {
    if config.n_vars < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 variables, got {}", config.n_vars)));
    }
    if config.n_samples < 4 || !(config.noise_sigma > 0.0) || !(config.weight_std > 0.0) {
        return Err(Error::InvalidParameter("invalid marginalization config".into()));
    }
    let mut rng = rng_from_seed(config.seed);
    let weights: Vec<f64> = (0..config.n_vars)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            config.weight_std * z
        })
        .collect();
    let cond: Vec<[f64; 2]> =
        (1..config.n_vars).map(|_| [rng.random_range(0.1..0.9), rng.random_range(0.1..0.9)]).collect();
    for _ in 0..=MAX_RETRIES {
        let p1: f64 = rng.random();
        let mut x1 = Vec::with_capacity(config.n_samples);
        let mut y = Vec::with_capacity(config.n_samples);
        for _ in 0..config.n_samples {
            let first = u8::from(rng.random::<f64>() < p1);
            let mut value = weights[0] * first as f64;
            for (j, q) in cond.iter().enumerate() {
                let xj = u8::from(rng.random::<f64>() < q[first as usize]);
                value += weights[j + 1] * xj as f64;
            }
            let e: f64 = StandardNormal.sample(&mut rng);
            x1.push(first);
            y.push(value + config.noise_sigma * e);
        }
        if groups_ok(&x1) {
            return Ok((GroupedSamples::from_binary(&x1, &y)?, weights));
        }
    }
    Err(Error::RetriesExhausted(MAX_RETRIES))
}
