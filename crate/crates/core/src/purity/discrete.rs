use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries above this are treated as part of the support.
pub const SUPPORT_EPS: f64 = 1e-12;
const ROW_SUM_TOL: f64 = 1e-12;

/// A row-stochastic table `p(y|x)`: one row per `x`, one column per `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteConditional {
    table: Vec<Vec<f64>>,
}

impl DiscreteConditional {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::InvalidConditional(format!("need >= 2 rows, got {}", table.len())));
        }
        let cols = table[0].len();
        if cols < 2 {
            return Err(Error::InvalidConditional(format!("need >= 2 columns, got {cols}")));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidConditional(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::InvalidConditional(format!("row {i} has a negative or non-finite entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidConditional(format!("row {i} sums to {sum}")));
            }
        }
        Ok(Self { table })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn num_rows(&self) -> usize {
        self.table.len()
    }

    pub fn num_cols(&self) -> usize {
        self.table[0].len()
    }

    pub fn support(&self, row: usize) -> Vec<bool> {
        self.table[row].iter().map(|&p| p > SUPPORT_EPS).collect()
    }

    /// Same conditional with the `y` columns reordered by `perm`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_cols() {
            return Err(Error::LengthMismatch(perm.len(), self.num_cols()));
        }
        Self::new(self.table.iter().map(|row| perm.iter().map(|&j| row[j]).collect()).collect())
    }
}

fn is_subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&ia, &ib)| !ia || ib)
}

/// Pairwise purity for finite `Y`: no row's support is contained in another's.
pub fn discrete_pairwise_pure(cond: &DiscreteConditional) -> bool {
    let supports: Vec<Vec<bool>> = (0..cond.num_rows()).map(|i| cond.support(i)).collect();
    for (i, si) in supports.iter().enumerate() {
        for (j, sj) in supports.iter().enumerate() {
            if i != j && is_subset(si, sj) {
                return false;
            }
        }
    }
    true
}

/// Parameters of the brute-force search over affine coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KwiseSearch {
    pub k: usize,
    /// Grid points per coordinate on `[-box_margin, 1 + box_margin]`.
    pub lambda_resolution: usize,
    pub box_margin: u32,
    /// Maximum of `C(rows, k) * resolution^(k-1)`.
    pub budget: u128,
}

impl KwiseSearch {
    pub fn new(k: usize, lambda_resolution: usize) -> Self {
        Self { k, lambda_resolution, box_margin: 5, budget: 50_000_000 }
    }

    fn lambda(&self, i: usize) -> f64 {
        // Exact for the integer points: numerator and denominator are integers.
        let steps = (self.lambda_resolution - 1) as f64;
        let l = self.box_margin as f64;
        (-l * steps + i as f64 * (1.0 + 2.0 * l)) / steps
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Best margin `max_λ min_y Σ_j λ_j p(y|x_j)` over all k-subsets of rows and
/// all grid coefficients with `Σλ = 1` and `λ ∉ [0,1]^k`.
///
/// A non-negative margin exhibits a valid affine extension, so the conditional
/// is not k-wise pure. The search is bounded, so a negative margin only means
/// that no extension was found inside the box.
pub fn kwise_bruteforce_margin(cond: &DiscreteConditional, search: &KwiseSearch) -> Result<f64> {
    search_margin(cond, search, false)
}

fn search_margin(cond: &DiscreteConditional, search: &KwiseSearch, stop_at_witness: bool) -> Result<f64> {
    let k = search.k;
    let rows = cond.num_rows();
    if k < 2 || k > rows {
        return Err(Error::InvalidParameter(format!("k must be in 2..={rows}, got {k}")));
    }
    if search.lambda_resolution < 10 {
        return Err(Error::InvalidParameter(format!(
            "lambda resolution must be >= 10, got {}",
            search.lambda_resolution
        )));
    }
    let per_subset = (search.lambda_resolution as u128).checked_pow((k - 1) as u32);
    let required = per_subset.and_then(|g| g.checked_mul(binomial(rows, k))).unwrap_or(u128::MAX);
    if required > search.budget {
        return Err(Error::BudgetExceeded { required, budget: search.budget });
    }

    let lo = -(search.box_margin as f64);
    let hi = 1.0 + search.box_margin as f64;
    let cols = cond.num_cols();
    let table = cond.rows();
    let mut best = f64::NEG_INFINITY;
    let mut subset: Vec<usize> = (0..k).collect();
    let mut idx = vec![0usize; k - 1];
    let mut lambda = vec![0.0; k];
    loop {
        idx.iter_mut().for_each(|i| *i = 0);
        'grid: loop {
            let mut partial = 0.0;
            for (j, &i) in idx.iter().enumerate() {
                lambda[j] = search.lambda(i);
                partial += lambda[j];
            }
            let last = 1.0 - partial;
            lambda[k - 1] = last;
            let inside_box = (lo..=hi).contains(&last);
            let in_unit_cube = lambda.iter().all(|&l| (0.0..=1.0).contains(&l));
            if inside_box && !in_unit_cube {
                let margin = (0..cols)
                    .map(|y| subset.iter().zip(&lambda).map(|(&r, &l)| l * table[r][y]).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                best = best.max(margin);
                if stop_at_witness && margin >= 0.0 {
                    return Ok(best);
                }
            }
            for d in (0..k - 1).rev() {
                idx[d] += 1;
                if idx[d] < search.lambda_resolution {
                    continue 'grid;
                }
                idx[d] = 0;
            }
            break;
        }
        if !next_combination(&mut subset, rows) {
            break;
        }
    }
    Ok(best)
}

/// Brute-force k-wise purity check: `false` iff a grid coefficient vector
/// outside `[0,1]^k` keeps the affine combination of some k rows non-negative.
pub fn discrete_kwise_pure_bruteforce(cond: &DiscreteConditional, k: usize, lambda_resolution: usize) -> Result<bool> {
    search_margin(cond, &KwiseSearch::new(k, lambda_resolution), true).map(|m| m < 0.0)
}
