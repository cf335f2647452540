use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::anm::{gen_confounded, gen_direct, gen_marginalized, MarginalizationConfig, Transition};
use super::genetics::{correlation_r2, corrupt, gen_genotypes, gen_two_locus_phenotype, GenotypeMatrix};
use super::roc::roc_auc;
use super::{AnmConfig, NoiseSpec};
use crate::error::{Error, Result};
use crate::kde::DEFAULT_GRID_SIZE;
use crate::parallel::{map_indexed, Execution};
use crate::purity::{purity_ratio, PurityReport, DEFAULT_PURITY_THRESHOLD};
use crate::samples::GroupedSamples;
use crate::seed::{derive_seed, rng_from_seed, SimRng};

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig3Config {
    pub runs: usize,
    pub n_samples: usize,
    pub weight_std: f64,
    pub noise: NoiseSpec,
    pub grid_size: usize,
    pub threshold: f64,
    pub bins: usize,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self {
            runs: 200,
            n_samples: 1000,
            weight_std: 1.0,
            noise: NoiseSpec::DEFAULT_MIXTURE,
            grid_size: DEFAULT_GRID_SIZE,
            threshold: DEFAULT_PURITY_THRESHOLD,
            bins: 20,
            seed: 0,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub direct: usize,
    pub confounded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Result {
    pub config: Fig3Config,
    /// Purity ratio of run `i` in the direct setting.
    pub direct: Vec<f64>,
    pub confounded: Vec<f64>,
    pub histogram: Vec<HistogramBin>,
    pub fraction_direct_below_threshold: f64,
    pub median_direct: f64,
    pub median_confounded: f64,
}

fn histogram(direct: &[f64], confounded: &[f64], bins: usize) -> Vec<HistogramBin> {
    let index = |r: f64| ((r * bins as f64).floor() as usize).min(bins - 1);
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lo: b as f64 / bins as f64,
            hi: (b + 1) as f64 / bins as f64,
            direct: 0,
            confounded: 0,
        })
        .collect();
    for &r in direct {
        out[index(r)].direct += 1;
    }
    for &r in confounded {
        out[index(r)].confounded += 1;
    }
    out
}

/// Purity ratios of the direct and the confounded setting over `runs` seeds.
///
/// Run `i` uses `derive_seed(seed, i)` for both settings, so the settings are
/// matched on `p`, `w` and the noise draws.
pub fn run_fig3(config: &Fig3Config) -> Result<Fig3Result> {
    if config.runs == 0 || config.bins == 0 {
        return Err(Error::InvalidParameter("runs and bins must be positive".into()));
    }
    let per_run = map_indexed(config.execution, config.runs, |i| -> Result<(f64, f64)> {
        let run_seed = derive_seed(config.seed, i as u64);
        let anm = AnmConfig {
            weight_std: config.weight_std,
            weight_override: None,
            noise: config.noise,
            n_samples: config.n_samples,
            seed: run_seed,
        };
        let direct = gen_direct(&anm)?;
        let (confounded, _) = gen_confounded(&anm, Transition::Random, derive_seed(run_seed, 1))?;
        let d = purity_ratio(&direct, config.grid_size, config.threshold)?.purity_ratio;
        let c = purity_ratio(&confounded, config.grid_size, config.threshold)?.purity_ratio;
        Ok((d, c))
    });
    let (direct, confounded): (Vec<f64>, Vec<f64>) =
        per_run.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let below = direct.iter().filter(|&&r| r < config.threshold).count();
    Ok(Fig3Result {
        config: *config,
        histogram: histogram(&direct, &confounded, config.bins),
        fraction_direct_below_threshold: below as f64 / config.runs as f64,
        median_direct: median(&direct).unwrap_or(f64::NAN),
        median_confounded: median(&confounded).unwrap_or(f64::NAN),
        direct,
        confounded,
    })
}

/// Shared settings of the SNP experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneticsConfig {
    pub n_samples: usize,
    pub n_snps: usize,
    pub linkage_flip_prob: f64,
    pub maf_range: (f64, f64),
    pub weight_std: f64,
    pub noise_sigma: f64,
    /// Minimum column distance between `X` and the second locus `V` (fig5).
    pub far_distance: usize,
    /// Corruption applied to the far column in causal fig5 pairs.
    pub causal_v_corruption: f64,
    pub pairs_per_class: usize,
    pub grid_size: usize,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for GeneticsConfig {
    fn default() -> Self {
        Self {
            n_samples: 1200,
            n_snps: 2000,
            linkage_flip_prob: 0.05,
            maf_range: (0.1, 0.5),
            weight_std: 1.0,
            noise_sigma: 0.25,
            far_distance: 1000,
            causal_v_corruption: 0.1,
            pairs_per_class: 200,
            grid_size: DEFAULT_GRID_SIZE,
            seed: 0,
            execution: Execution::Parallel,
        }
    }
}

impl GeneticsConfig {
    fn validate(&self) -> Result<()> {
        if self.pairs_per_class == 0 {
            return Err(Error::InvalidParameter("pairs_per_class must be positive".into()));
        }
        // Every column then has a partner at least `far_distance` away.
        if self.far_distance == 0 || 2 * self.far_distance > self.n_snps {
            return Err(Error::InvalidParameter(format!(
                "far_distance must be in [1, n_snps / 2], got {} with {} SNPs",
                self.far_distance, self.n_snps
            )));
        }
        if !(self.weight_std > 0.0) {
            return Err(Error::InvalidParameter(format!("weight_std must be positive, got {}", self.weight_std)));
        }
        Ok(())
    }

    fn genotypes(&self) -> Result<GenotypeMatrix> {
        gen_genotypes(
            self.n_samples,
            self.n_snps,
            self.linkage_flip_prob,
            self.maf_range,
            derive_seed(self.seed, u64::MAX),
        )
    }
}

const MAX_PICKS: usize = 1000;

fn usable(col: &[u8]) -> bool {
    let ones = col.iter().filter(|&&g| g != 0).count();
    ones >= 2 && col.len() - ones >= 2
}

/// Random SNP index whose column has both genotypes at least twice.
fn pick_snp(g: &GenotypeMatrix, rng: &mut SimRng) -> Result<usize> {
    for _ in 0..MAX_PICKS {
        let i = rng.random_range(0..g.n_snps());
        if usable(g.column(i)) {
            return Ok(i);
        }
    }
    Err(Error::RetriesExhausted(MAX_PICKS))
}

/// A column at least `far_distance` away from `i`, chosen uniformly.
fn pick_far(g: &GenotypeMatrix, rng: &mut SimRng, i: usize, far_distance: usize) -> usize {
    let candidates_left = if i >= far_distance { i - far_distance + 1 } else { 0 };
    let candidates_right = g.n_snps().saturating_sub(i + far_distance);
    let k = rng.random_range(0..candidates_left + candidates_right);
    if k < candidates_left {
        k
    } else {
        i + far_distance + (k - candidates_left)
    }
}

struct PairScore {
    snp: usize,
    r2: f64,
    report: PurityReport,
}

fn score(x: &[u8], y: &[f64], snp: usize, grid_size: usize) -> Result<PairScore> {
    let data = GroupedSamples::from_binary(x, y)?;
    let report = purity_ratio(&data, grid_size, DEFAULT_PURITY_THRESHOLD)?;
    Ok(PairScore { snp, r2: correlation_r2(x, y)?, report })
}

fn weight(rng: &mut SimRng, std: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    std * z
}

/// Causal pair: `Y = w·X + 2w·V + E`, with `V` a corrupted far column.
fn causal_pair(g: &GenotypeMatrix, cfg: &GeneticsConfig, seed: u64) -> Result<PairScore> {
    let mut rng = rng_from_seed(seed);
    let i = pick_snp(g, &mut rng)?;
    let far = pick_far(g, &mut rng, i, cfg.far_distance);
    let w = weight(&mut rng, cfg.weight_std);
    let x = g.column(i);
    let v = corrupt(g.column(far), cfg.causal_v_corruption, derive_seed(seed, 1))?;
    let y = gen_two_locus_phenotype(x, &v, w, 2.0 * w, cfg.noise_sigma, derive_seed(seed, 2))?;
    score(x, &y, i, cfg.grid_size)
}

/// Non-causal pair: `Y = 2w·Z + w·V + E` with `Z = X ⊕ C`, `P(C = 1) = level`.
fn noncausal_pair(g: &GenotypeMatrix, cfg: &GeneticsConfig, seed: u64, level: f64) -> Result<PairScore> {
    let mut rng = rng_from_seed(seed);
    let i = pick_snp(g, &mut rng)?;
    let far = pick_far(g, &mut rng, i, cfg.far_distance);
    let w = weight(&mut rng, cfg.weight_std);
    let x = g.column(i);
    let z = corrupt(x, level, derive_seed(seed, 1))?;
    let y = gen_two_locus_phenotype(&z, g.column(far), 2.0 * w, w, cfg.noise_sigma, derive_seed(seed, 2))?;
    score(x, &y, i, cfg.grid_size)
}

/// Single-locus pair `Y = w·S + E`. The scored `X` is `S` itself when
/// `causal`, otherwise a usable neighbour of `S`.
fn single_locus_pair(g: &GenotypeMatrix, cfg: &GeneticsConfig, seed: u64, causal: bool) -> Result<PairScore> {
    let mut rng = rng_from_seed(seed);
    let (s, x_snp) = if causal {
        let i = pick_snp(g, &mut rng)?;
        (i, i)
    } else {
        let mut found = None;
        for _ in 0..MAX_PICKS {
            let i = rng.random_range(0..g.n_snps());
            let right = rng.random::<bool>();
            let j = if right { i + 1 } else { i.wrapping_sub(1) };
            if j < g.n_snps() && usable(g.column(i)) && usable(g.column(j)) {
                found = Some((i, j));
                break;
            }
        }
        found.ok_or(Error::RetriesExhausted(MAX_PICKS))?
    };
    let w = weight(&mut rng, cfg.weight_std);
    let cause = g.column(s);
    let y = gen_two_locus_phenotype(cause, cause, w, 0.0, cfg.noise_sigma, derive_seed(seed, 2))?;
    score(g.column(x_snp), &y, x_snp, cfg.grid_size)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Record {
    pub pair: usize,
    pub causal: bool,
    pub snp: usize,
    pub r2: f64,
    pub purity_ratio: f64,
    pub neg_log_purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Summary {
    pub r2_cutoff: f64,
    pub causal_above_cutoff: usize,
    pub noncausal_above_cutoff: usize,
    pub median_neg_log_purity_causal: Option<f64>,
    pub median_neg_log_purity_noncausal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Result {
    pub config: GeneticsConfig,
    pub records: Vec<Fig4Record>,
    pub summary: Fig4Summary,
}

pub const FIG4_R2_CUTOFF: f64 = 0.5;

/// Scatter of `r²` against `-log purity ratio` for `Y = w·X + E` (causal)
/// and `Y = w·Z + E` with `X` the column next to `Z` (non-causal).
pub fn run_fig4(config: &GeneticsConfig) -> Result<Fig4Result> {
    config.validate()?;
    let g = config.genotypes()?;
    let n = config.pairs_per_class;
    let scores = map_indexed(config.execution, 2 * n, |k| {
        let seed = derive_seed(config.seed, k as u64);
        single_locus_pair(&g, config, seed, k < n)
    });
    let records: Vec<Fig4Record> = scores
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            s.map(|s| Fig4Record {
                pair: k % n,
                causal: k < n,
                snp: s.snp,
                r2: s.r2,
                purity_ratio: s.report.purity_ratio,
                neg_log_purity: s.report.neg_log_purity(),
            })
        })
        .collect::<Result<_>>()?;
    let strong = |causal: bool| -> Vec<f64> {
        records.iter().filter(|r| r.causal == causal && r.r2 > FIG4_R2_CUTOFF).map(|r| r.neg_log_purity).collect()
    };
    let (c, nc) = (strong(true), strong(false));
    Ok(Fig4Result {
        config: *config,
        summary: Fig4Summary {
            r2_cutoff: FIG4_R2_CUTOFF,
            causal_above_cutoff: c.len(),
            noncausal_above_cutoff: nc.len(),
            median_neg_log_purity_causal: median(&c),
            median_neg_log_purity_noncausal: median(&nc),
        },
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub corruption_levels: Vec<f64>,
    pub auc_purity: Vec<f64>,
    pub auc_correlation: Vec<f64>,
    pub runs_per_level: usize,
    pub seed: u64,
}

/// AUC of `-log purity ratio` and of `r²` for separating causal from
/// non-causal pairs, per corruption level of the hidden `Z = X ⊕ C`.
pub fn run_fig5(levels: &[f64], config: &GeneticsConfig) -> Result<SweepResult> {
    config.validate()?;
    if levels.is_empty() {
        return Err(Error::EmptyInput("corruption levels"));
    }
    if let Some(l) = levels.iter().find(|l| !(0.0..=0.5).contains(*l)) {
        return Err(Error::InvalidParameter(format!("corruption level {l} outside [0, 0.5]")));
    }
    let g = config.genotypes()?;
    let n = config.pairs_per_class;
    let total = levels.len() * 2 * n;
    let scores = map_indexed(config.execution, total, |t| {
        let (li, k) = (t / (2 * n), t % (2 * n));
        let seed = derive_seed(derive_seed(config.seed, li as u64), k as u64);
        let level = levels[li];
        let s = if k < n { causal_pair(&g, config, seed) } else { noncausal_pair(&g, config, seed, level) }?;
        Ok::<_, Error>((s.report.neg_log_purity(), s.r2))
    });
    let scores: Vec<(f64, f64)> = scores.into_iter().collect::<Result<_>>()?;
    let mut auc_purity = Vec::with_capacity(levels.len());
    let mut auc_correlation = Vec::with_capacity(levels.len());
    for block in scores.chunks(2 * n) {
        let (causal, noncausal) = block.split_at(n);
        let col = |s: &[(f64, f64)], f: fn(&(f64, f64)) -> f64| s.iter().map(f).collect::<Vec<f64>>();
        auc_purity.push(roc_auc(&col(causal, |s| s.0), &col(noncausal, |s| s.0))?);
        auc_correlation.push(roc_auc(&col(causal, |s| s.1), &col(noncausal, |s| s.1))?);
    }
    Ok(SweepResult {
        corruption_levels: levels.to_vec(),
        auc_purity,
        auc_correlation,
        runs_per_level: n,
        seed: config.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalizationReport {
    pub config: MarginalizationConfig,
    pub weights: Vec<f64>,
    pub report: PurityReport,
}

/// Purity of `P(Y|X_1)` after marginalizing `X_2..X_n` out of a linear model.
pub fn run_marginalization(config: &MarginalizationConfig) -> Result<MarginalizationReport> {
    let (data, weights) = gen_marginalized(config)?;
    let report = purity_ratio(&data, config.grid_size, config.threshold)?;
    Ok(MarginalizationReport { config: *config, weights, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_every_run() {
        let h = histogram(&[0.0, 0.05, 1.0, 0.5], &[0.99, 0.2], 10);
        assert_eq!(h.iter().map(|b| b.direct).sum::<usize>(), 4);
        assert_eq!(h.iter().map(|b| b.confounded).sum::<usize>(), 2);
        assert_eq!(h[0].direct, 2);
        assert_eq!(h[9].direct, 1);
        assert_eq!(h[5].direct, 1);
    }

    #[test]
    fn far_column_respects_distance() {
        let g = gen_genotypes(10, 50, 0.1, (0.1, 0.5), 0).unwrap();
        let mut rng = rng_from_seed(1);
        for i in [0, 10, 25, 49] {
            for _ in 0..50 {
                let j = pick_far(&g, &mut rng, i, 20);
                assert!(j < 50 && j.abs_diff(i) >= 20, "{i} {j}");
            }
        }
    }

    #[test]
    fn small_fig3_is_deterministic_across_execution() {
        let cfg = Fig3Config { runs: 6, n_samples: 200, seed: 11, ..Default::default() };
        let par = run_fig3(&cfg).unwrap();
        let seq = run_fig3(&Fig3Config { execution: Execution::Sequential, ..cfg }).unwrap();
        assert_eq!((&par.direct, &par.confounded, &par.histogram), (&seq.direct, &seq.confounded, &seq.histogram));
        assert_eq!(par.direct.len(), 6);
    }

    #[test]
    fn small_fig5_has_aligned_lists() {
        let cfg = GeneticsConfig {
            n_samples: 300,
            n_snps: 60,
            far_distance: 20,
            pairs_per_class: 8,
            seed: 3,
            ..Default::default()
        };
        let r = run_fig5(&[0.0, 0.5], &cfg).unwrap();
        assert_eq!(r.auc_purity.len(), 2);
        assert_eq!(r.auc_correlation.len(), 2);
        assert!(r.auc_purity.iter().chain(&r.auc_correlation).all(|a| (0.0..=1.0).contains(a)));
        assert!(run_fig5(&[0.7], &cfg).is_err());
    }
}
