use crate::error::{Error, Result};

/// `m(k)`: the largest number of non-empty subsets of `{1..k}` none of which
/// contains another. By Sperner's theorem this is `C(k, floor(k/2))`.
pub fn sperner_m(k: u32) -> Result<u64> {
    if k == 0 || k > 62 {
        return Err(Error::Overflow(k));
    }
    let k = k as u128;
    let half = k / 2;
    let m = (0..half).fold(1u128, |acc, i| acc * (k - i) / (i + 1));
    Ok(m as u64)
}

/// Exhaustive maximum antichain among the non-empty subsets of `{1..k}`, `k <= 5`.
pub fn antichain_bruteforce_m(k: u32) -> Result<u64> {
    if k == 0 || k > 5 {
        return Err(Error::InvalidParameter(format!("brute force needs 1 <= k <= 5, got {k}")));
    }
    let subsets: Vec<u32> = (1u32..(1 << k)).collect();
    let comparable = |a: u32, b: u32| a & b == a || a & b == b;
    let mut best = 0;
    let mut chosen = Vec::new();
    extend(&subsets, 0, &mut chosen, &mut best, &comparable);
    Ok(best as u64)
}

fn extend(
    subsets: &[u32],
    next: usize,
    chosen: &mut Vec<u32>,
    best: &mut usize,
    comparable: &impl Fn(u32, u32) -> bool,
) {
    if chosen.len() > *best {
        *best = chosen.len();
    }
    if chosen.len() + (subsets.len() - next) <= *best {
        return;
    }
    for i in next..subsets.len() {
        let s = subsets[i];
        if chosen.iter().all(|&c| !comparable(c, s)) {
            chosen.push(s);
            extend(subsets, i + 1, chosen, best, comparable);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(sperner_m(1).unwrap(), 1);
        assert_eq!(sperner_m(2).unwrap(), 2);
        assert_eq!(sperner_m(4).unwrap(), 6);
        assert_eq!(sperner_m(62).unwrap(), 465_428_353_255_261_088);
    }

    #[test]
    fn brute_force_values() {
        assert_eq!(antichain_bruteforce_m(2).unwrap(), 2);
        assert_eq!(antichain_bruteforce_m(3).unwrap(), 3);
        assert_eq!(antichain_bruteforce_m(4).unwrap(), 6);
        assert_eq!(antichain_bruteforce_m(5).unwrap(), 10);
    }

    #[test]
    fn out_of_range() {
        assert_eq!(sperner_m(63), Err(Error::Overflow(63)));
        assert_eq!(sperner_m(0), Err(Error::Overflow(0)));
        assert!(antichain_bruteforce_m(6).is_err());
    }
}
