//! Label distributions: normalized label tallies attached to a support count.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::Result;

/// A probability distribution over string labels together with the number of
/// observations it was tallied from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    /// Label -> probability. Probabilities are nonnegative and sum to 1.
    pub probs: BTreeMap<String, f64>,
    /// Number of observations that contributed to the tally.
    pub support: usize,
}

impl LabelDistribution {
    /// Builds a distribution by normalizing raw counts. Errors on an empty or
    /// all-zero tally.
    pub fn from_counts<S: Into<String>>(
        counts: impl IntoIterator<Item = (S, u64)>,
        support: usize,
    ) -> Result<Self> {
        let counts: BTreeMap<String, u64> = counts
            .into_iter()
            .map(|(label, n)| (label.into(), n))
            .collect();
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::invalid("cannot normalize an empty label tally"));
        }
        let probs = counts
            .into_iter()
            .filter(|&(_, n)| n > 0)
            .map(|(label, n)| (label, n as f64 / total as f64))
            .collect();
        Ok(LabelDistribution { probs, support })
    }

    /// Labels ordered by descending probability, ties broken lexically.
    pub fn labels_by_prob(&self) -> Vec<(&str, f64)> {
        let mut pairs: Vec<(&str, f64)> = self
            .probs
            .iter()
            .map(|(label, &p)| (label.as_str(), p))
            .collect();
        pairs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
        pairs
    }

    /// Number of labels carrying nonzero probability.
    pub fn cardinality(&self) -> usize {
        self.probs.len()
    }
}

/// Serializes one distribution as `key<TAB>label:prob ...<TAB>support`, with
/// pairs ordered by descending probability (ties lexical). Probabilities use
/// the shortest round-trip float form, so parsing the line back is lossless.
pub fn dist_to_line(key: &str, dist: &LabelDistribution) -> String {
    let pairs: Vec<String> = dist
        .labels_by_prob()
        .into_iter()
        .map(|(label, p)| format!("{label}:{p}"))
        .collect();
    format!("{key}\t{}\t{}", pairs.join(" "), dist.support)
}

/// Parses a line written by [`dist_to_line`].
pub fn parse_dist_line(line: &str, line_no: usize) -> Result<(String, LabelDistribution)> {
    let mut fields = line.split('\t');
    let (Some(key), Some(pairs), Some(support), None) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(Error::malformed(
            line_no,
            "expected 'key<TAB>label:prob ...<TAB>support'",
        ));
    };
    let support: usize = support
        .parse()
        .map_err(|_| Error::malformed(line_no, format!("invalid support {support:?}")))?;
    let mut probs = BTreeMap::new();
    for pair in pairs.split_whitespace() {
        let (label, prob) = pair
            .split_once(':')
            .ok_or_else(|| Error::malformed(line_no, format!("invalid pair {pair:?}")))?;
        let prob: f64 = prob
            .parse()
            .map_err(|_| Error::malformed(line_no, format!("invalid probability {prob:?}")))?;
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::malformed(
                line_no,
                format!("probability out of range: {prob}"),
            ));
        }
        probs.insert(label.to_string(), prob);
    }
    if probs.is_empty() {
        return Err(Error::malformed(line_no, "distribution has no labels"));
    }
    Ok((key.to_string(), LabelDistribution { probs, support }))
}

/// Serializes a keyed distribution table, one line per key in key order.
pub fn dists_to_text(dists: &BTreeMap<String, LabelDistribution>) -> String {
    let mut out = String::new();
    for (key, dist) in dists {
        out.push_str(&dist_to_line(key, dist));
        out.push('\n');
    }
    out
}

/// Parses a distribution file written by [`dists_to_text`].
pub fn parse_dists(text: &str) -> Result<BTreeMap<String, LabelDistribution>> {
    let mut dists = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, dist) = parse_dist_line(line, idx + 1)?;
        if dists.insert(key.clone(), dist).is_some() {
            return Err(Error::malformed(idx + 1, format!("duplicate key {key:?}")));
        }
    }
    Ok(dists)
}
