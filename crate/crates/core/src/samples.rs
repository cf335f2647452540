//! Observations of a continuous `Y` grouped by the value of a discrete `X`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observations `y` partitioned by the discrete label `x`.
///
/// Labels are opaque tokens kept in lexicographic order. Every group is
/// non-empty, every value is finite and there are at least two groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Vec<f64>>", into = "BTreeMap<String, Vec<f64>>")]
pub struct GroupedSamples {
    groups: BTreeMap<String, Vec<f64>>,
}

impl GroupedSamples {
    pub fn new(groups: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::TooFewGroups(groups.len()));
        }
        for (label, ys) in &groups {
            if ys.is_empty() {
                return Err(Error::EmptyGroup(label.clone()));
            }
            if ys.iter().any(|y| !y.is_finite()) {
                return Err(Error::NonFinite { label: label.clone() });
            }
        }
        Ok(Self { groups })
    }

    /// Builds the groups from `(x, y)` pairs, keeping the input order inside each group.
    pub fn from_pairs<L, I>(pairs: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (L, f64)>,
    {
        let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (x, y) in pairs {
            groups.entry(x.into()).or_default().push(y);
        }
        Self::new(groups)
    }

    /// Groups a binary `x` column (labels `"0"` and `"1"`) against `y`.
    pub fn from_binary(x: &[u8], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        Self::from_pairs(x.iter().zip(y).map(|(&xi, &yi)| (if xi == 0 { "0" } else { "1" }, yi)))
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.groups
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn get(&self, label: &str) -> Option<&[f64]> {
        self.groups.get(label).map(Vec::as_slice)
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn total_len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    /// All values concatenated in label order.
    pub fn pooled(&self) -> Vec<f64> {
        self.groups.values().flatten().copied().collect()
    }

    /// Minimum and maximum over all observed values.
    pub fn range(&self) -> (f64, f64) {
        self.groups.values().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)))
    }

    /// Applies `f` to every observation.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.groups.iter().map(|(k, ys)| (k.clone(), ys.iter().map(|&y| f(y)).collect())).collect())
    }

    /// Renames labels; `rename` must be injective.
    pub fn relabel(&self, rename: impl Fn(&str) -> String) -> Result<Self> {
        let groups: BTreeMap<String, Vec<f64>> = self.groups.iter().map(|(k, ys)| (rename(k), ys.clone())).collect();
        if groups.len() != self.groups.len() {
            return Err(Error::InvalidParameter("relabeling is not injective".into()));
        }
        Self::new(groups)
    }
}

impl TryFrom<BTreeMap<String, Vec<f64>>> for GroupedSamples {
    type Error = Error;

    fn try_from(groups: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        Self::new(groups)
    }
}

impl From<GroupedSamples> for BTreeMap<String, Vec<f64>> {
    fn from(s: GroupedSamples) -> Self {
        s.groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_group() {
        let err = GroupedSamples::from_pairs([("a", 1.0), ("a", 2.0)]).unwrap_err();
        assert_eq!(err, Error::TooFewGroups(1));
    }

    #[test]
    fn rejects_non_finite() {
        let err = GroupedSamples::from_pairs([("a", 1.0), ("b", f64::NAN)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn rejects_empty_group() {
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), vec![1.0]);
        m.insert("b".to_string(), vec![]);
        assert_eq!(GroupedSamples::new(m).unwrap_err(), Error::EmptyGroup("b".into()));
    }

    #[test]
    fn binary_grouping_and_range() {
        let s = GroupedSamples::from_binary(&[0, 1, 1, 0], &[1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(s.get("0").unwrap(), &[1.0, 0.5]);
        assert_eq!(s.get("1").unwrap(), &[-2.0, 3.0]);
        assert_eq!(s.range(), (-2.0, 3.0));
        assert_eq!(s.total_len(), 4);
    }
}
