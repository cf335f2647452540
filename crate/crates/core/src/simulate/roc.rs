use crate::error::{Error, Result};

/// Probability that a random positive scores above a random negative, ties
/// counting one half. Computed from midranks in `O(n log n)`.
pub fn roc_auc(positive: &[f64], negative: &[f64]) -> Result<f64> {
    if positive.is_empty() {
        return Err(Error::EmptyInput("positive scores"));
    }
    if negative.is_empty() {
        return Err(Error::EmptyInput("negative scores"));
    }
    if positive.iter().chain(negative).any(|v| v.is_nan()) {
        return Err(Error::NonFinite { label: "score".into() });
    }
    let mut all: Vec<(f64, bool)> =
        positive.iter().map(|&v| (v, true)).chain(negative.iter().map(|&v| (v, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // Ranks are 1-based; a tie block i..=j shares the mean rank.
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += mid * all[i..=j].iter().filter(|e| e.1).count() as f64;
        i = j + 1;
    }
    let n1 = positive.len() as f64;
    let n2 = negative.len() as f64;
    Ok((rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(pos: &[f64], neg: &[f64]) -> f64 {
        let mut s = 0.0;
        for p in pos {
            for n in neg {
                s += if p > n {
                    1.0
                } else if p == n {
                    0.5
                } else {
                    0.0
                };
            }
        }
        s / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn reference_values() {
        assert_eq!(roc_auc(&[3.0, 4.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(roc_auc(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.25);
        assert_eq!(roc_auc(&[1.0, 1.0], &[1.0]).unwrap(), 0.5);
    }

    #[test]
    fn matches_pair_count_with_ties() {
        let pos = [0.1, 0.5, 0.5, 2.0, -1.0, 0.5];
        let neg = [0.5, 0.0, 2.0, 2.0, -3.0];
        assert!((roc_auc(&pos, &neg).unwrap() - brute(&pos, &neg)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(roc_auc(&[], &[1.0]).is_err());
        assert!(roc_auc(&[f64::NAN], &[1.0]).is_err());
    }
}
