//! Color canonicalization and per-object color distributions.
//!
//! Raw color descriptions ("golden", "black and white", "teal") are reduced
//! to the 11 basic color terms. Non-basic terms map through a fixed alias
//! table; a handful of perceptually ambiguous terms map to two basic colors
//! at once (`teal` counts for green and blue). Tokens that map nowhere are
//! dropped and counted so callers can report coverage.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::dist::LabelDistribution;
use crate::error::Error;
use crate::Result;

/// The 11 basic colors, ordered canonically (matching
/// [`crate::task::COLOR_LABELS`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicColor {
    Red,
    Orange,
    Yellow,
    Brown,
    Green,
    Blue,
    Purple,
    Pink,
    White,
    Gray,
    Black,
}

impl BasicColor {
    pub const ALL: [BasicColor; 11] = [
        BasicColor::Red,
        BasicColor::Orange,
        BasicColor::Yellow,
        BasicColor::Brown,
        BasicColor::Green,
        BasicColor::Blue,
        BasicColor::Purple,
        BasicColor::Pink,
        BasicColor::White,
        BasicColor::Gray,
        BasicColor::Black,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BasicColor::Red => "red",
            BasicColor::Orange => "orange",
            BasicColor::Yellow => "yellow",
            BasicColor::Brown => "brown",
            BasicColor::Green => "green",
            BasicColor::Blue => "blue",
            BasicColor::Purple => "purple",
            BasicColor::Pink => "pink",
            BasicColor::White => "white",
            BasicColor::Gray => "gray",
            BasicColor::Black => "black",
        }
    }

    fn from_basic_str(s: &str) -> Option<BasicColor> {
        BasicColor::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl std::fmt::Display for BasicColor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Alias table mapping non-basic raw terms to basic colors. Terms appearing
/// under several colors ("teal", "beige", "peach") count once for each.
pub const RAW_COLOR_ALIASES: [(&str, &[BasicColor]); 18] = [
    ("gold", &[BasicColor::Yellow]),
    ("golden", &[BasicColor::Yellow]),
    ("blonde", &[BasicColor::Yellow]),
    ("beige", &[BasicColor::Yellow, BasicColor::Brown]),
    ("peach", &[BasicColor::Yellow, BasicColor::Pink]),
    ("cream", &[BasicColor::Yellow]),
    ("wooden", &[BasicColor::Brown]),
    ("tan", &[BasicColor::Brown]),
    ("bronze", &[BasicColor::Brown]),
    ("copper", &[BasicColor::Brown]),
    ("grey", &[BasicColor::Gray]),
    ("silver", &[BasicColor::Gray]),
    ("metal", &[BasicColor::Gray]),
    ("steel", &[BasicColor::Gray]),
    ("violet", &[BasicColor::Purple]),
    ("maroon", &[BasicColor::Red]),
    ("teal", &[BasicColor::Green, BasicColor::Blue]),
    ("turquoise", &[BasicColor::Blue]),
];

/// Reduces a raw color description to a set of basic colors.
///
/// The text is lowercased and split on whitespace, commas, slashes, and the
/// word "and"; each token maps to itself if basic, through the alias table
/// otherwise. Returns the mapped set plus the number of tokens that mapped
/// nowhere and were dropped.
pub fn canonicalize_color(raw: &str) -> (BTreeSet<BasicColor>, usize) {
    let mut colors = BTreeSet::new();
    let mut unmapped = 0usize;
    let lowered = raw.to_lowercase().replace([',', '/'], " ");
    for token in lowered.split_whitespace() {
        if token == "and" {
            continue;
        }
        let token = if token == "grey" { "gray" } else { token };
        if let Some(basic) = BasicColor::from_basic_str(token) {
            colors.insert(basic);
        } else if let Some((_, mapped)) = RAW_COLOR_ALIASES.iter().find(|(raw, _)| *raw == token) {
            colors.extend(mapped.iter().copied());
        } else {
            unmapped += 1;
        }
    }
    (colors, unmapped)
}

/// One raw color report for an object key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorObservation {
    pub object_key: String,
    pub raw_text: String,
}

/// Parses `object_key<TAB>raw_text` observation records.
pub fn parse_observations(text: &str) -> Result<Vec<ColorObservation>> {
    let mut obs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, raw) = line.split_once('\t').ok_or_else(|| {
            Error::malformed(idx + 1, "expected 'object_key<TAB>raw_text' observation")
        })?;
        if key.is_empty() {
            return Err(Error::malformed(idx + 1, "empty object key"));
        }
        obs.push(ColorObservation {
            object_key: key.to_string(),
            raw_text: raw.to_string(),
        });
    }
    Ok(obs)
}

/// Loads a color observation file.
pub fn load_observations(path: impl AsRef<Path>) -> Result<Vec<ColorObservation>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_observations(&text)
}

/// Aggregation output: distributions per object key, plus the objects that
/// had no mappable observation and the total count of dropped raw tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorAggregate {
    pub dists: BTreeMap<String, LabelDistribution>,
    pub dropped_objects: BTreeSet<String>,
    pub unmapped_tokens: usize,
}

/// Tallies canonicalized observations into per-object color distributions.
///
/// Each observation contributes every color it canonicalizes to, once.
/// Support counts the observations that contributed at least one color;
/// objects whose observations all canonicalize to nothing are omitted and
/// reported in `dropped_objects`.
pub fn aggregate_colors(observations: &[ColorObservation]) -> ColorAggregate {
    let mut counts: BTreeMap<String, (BTreeMap<BasicColor, u64>, usize)> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut unmapped_tokens = 0usize;

    for obs in observations {
        seen.insert(obs.object_key.clone());
        let (colors, unmapped) = canonicalize_color(&obs.raw_text);
        unmapped_tokens += unmapped;
        if colors.is_empty() {
            continue;
        }
        let entry = counts.entry(obs.object_key.clone()).or_default();
        for color in colors {
            *entry.0.entry(color).or_insert(0) += 1;
        }
        entry.1 += 1;
    }

    let mut dists = BTreeMap::new();
    for (key, (tally, support)) in counts {
        let dist = LabelDistribution::from_counts(
            tally.into_iter().map(|(c, n)| (c.as_str().to_string(), n)),
            support,
        )
        .expect("non-empty tally by construction");
        dists.insert(key, dist);
    }
    let dropped_objects = seen
        .into_iter()
        .filter(|key| !dists.contains_key(key))
        .collect();
    ColorAggregate {
        dists,
        dropped_objects,
        unmapped_tokens,
    }
}
