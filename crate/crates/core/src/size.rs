//! Relative object size extraction.
//!
//! A region's on-screen area shrinks with distance, so raw pixel areas are
//! not comparable across a scene. Each object therefore gets a *perceived
//! size* `area * mean_depth^gamma`; per scene, perceived sizes are clustered
//! with exact natural breaks ([`crate::jenks`]) and every cross-cluster pair
//! of distinctly named objects yields a `smaller` observation. Corpus-level
//! aggregation keeps majority directions with enough support, balances
//! `smaller`/`larger` complements, and derives transitive and subtype
//! evaluation sets from the aggregated records.
//!
//! Size relations use context-free object names; contextual subtypes enter
//! only through [`build_subtype_set`].

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::jenks::jenks_breaks;
use crate::scene::{region_area, region_mean_depth, DepthRaster, Scene};
use crate::subtype::CandidateMap;
use crate::Result;

/// Default cluster count per scene.
pub const DEFAULT_CLUSTERS: usize = 5;
/// Default depth exponent.
pub const DEFAULT_GAMMA: u32 = 1;
/// Default minimum observation count for an aggregated pair.
pub const DEFAULT_MIN_SUPPORT: u64 = 5;

/// Direction of a size relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeRelation {
    Smaller,
    Larger,
}

impl SizeRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            SizeRelation::Smaller => "smaller",
            SizeRelation::Larger => "larger",
        }
    }

    pub fn invert(self) -> SizeRelation {
        match self {
            SizeRelation::Smaller => SizeRelation::Larger,
            SizeRelation::Larger => SizeRelation::Smaller,
        }
    }
}

impl std::fmt::Display for SizeRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SizeRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smaller" => Ok(SizeRelation::Smaller),
            "larger" => Ok(SizeRelation::Larger),
            other => Err(Error::invalid(format!("unknown size relation {other:?}"))),
        }
    }
}

/// One object's perceived size and size cluster within a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeObservation {
    pub image_id: String,
    pub name: String,
    pub perceived_size: f64,
    /// Cluster index, 0 = smallest within the scene.
    pub cluster: usize,
}

/// A single directed observation: `smaller` is smaller than `larger`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SizePair {
    pub smaller: String,
    pub larger: String,
}

/// An aggregated, directed size relation with its vote tally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationRecord {
    pub subject: String,
    pub relation: SizeRelation,
    pub object: String,
    /// Directed vote counts as seen from `subject`.
    pub counts: BTreeMap<SizeRelation, u64>,
}

/// Depth-corrected size of a region: `area * mean_depth^gamma`.
///
/// `gamma` must be 1 or 2; a zero mean depth makes perceived size undefined.
pub fn perceived_size(region: &crate::scene::Region, depth: &DepthRaster, gamma: u32) -> Result<f64> {
    if !(gamma == 1 || gamma == 2) {
        return Err(Error::invalid(format!("gamma must be 1 or 2, got {gamma}")));
    }
    let mean = region_mean_depth(region, depth)?;
    if mean == 0.0 {
        return Err(Error::ZeroDepth);
    }
    Ok(region_area(region) * mean.powi(gamma as i32))
}

/// Computes perceived sizes for every object in a scene and clusters them.
/// Scenes with fewer objects than `clusters` use one cluster per object.
pub fn cluster_scene(
    scene: &Scene,
    depth: &DepthRaster,
    clusters: usize,
    gamma: u32,
) -> Result<Vec<SizeObservation>> {
    if depth.width != scene.width || depth.height != scene.height {
        return Err(Error::invalid(format!(
            "depth raster is {}x{} but scene {} is {}x{}",
            depth.width, depth.height, scene.image_id, scene.width, scene.height
        )));
    }
    if scene.objects.is_empty() {
        return Ok(Vec::new());
    }
    let sizes: Vec<f64> = scene
        .objects
        .iter()
        .map(|obj| perceived_size(&obj.region, depth, gamma))
        .collect::<Result<_>>()?;
    let k = clusters.min(sizes.len()).max(1);
    let labels = jenks_breaks(&sizes, k)?;
    Ok(scene
        .objects
        .iter()
        .zip(sizes)
        .zip(labels)
        .map(|((obj, perceived_size), cluster)| SizeObservation {
            image_id: scene.image_id.clone(),
            name: obj.name.clone(),
            perceived_size,
            cluster,
        })
        .collect())
}

/// Emits one `smaller` observation for every cross-cluster pair of
/// distinctly named objects in the scene.
pub fn scene_size_relations(
    scene: &Scene,
    depth: &DepthRaster,
    clusters: usize,
    gamma: u32,
) -> Result<Vec<SizePair>> {
    let observations = cluster_scene(scene, depth, clusters, gamma)?;
    let mut pairs = Vec::new();
    for a in &observations {
        for b in &observations {
            if a.cluster < b.cluster && a.name != b.name {
                pairs.push(SizePair {
                    smaller: a.name.clone(),
                    larger: b.name.clone(),
                });
            }
        }
    }
    Ok(pairs)
}

/// Canonically ordered name pair (lexically smaller name first).
fn canonical_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Aggregates directed observations into majority-labeled records.
///
/// Pairs observed fewer than `min_support` times in total are dropped, as are
/// pairs whose directions tie exactly. Each surviving unordered pair yields
/// one record whose subject is the lexically smaller name.
pub fn aggregate_size(pairs: &[SizePair], min_support: u64) -> Vec<RelationRecord> {
    // (canonical pair) -> (votes for "first smaller", votes for "first larger").
    let mut tallies: BTreeMap<(String, String), (u64, u64)> = BTreeMap::new();
    for pair in pairs {
        let key = canonical_pair(&pair.smaller, &pair.larger);
        let entry = tallies.entry(key.clone()).or_default();
        if pair.smaller == key.0 {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
    }

    let mut records = Vec::new();
    for ((subject, object), (smaller_votes, larger_votes)) in tallies {
        let total = smaller_votes + larger_votes;
        if total < min_support || smaller_votes == larger_votes {
            continue;
        }
        let relation = if smaller_votes > larger_votes {
            SizeRelation::Smaller
        } else {
            SizeRelation::Larger
        };
        let mut counts = BTreeMap::new();
        if smaller_votes > 0 {
            counts.insert(SizeRelation::Smaller, smaller_votes);
        }
        if larger_votes > 0 {
            counts.insert(SizeRelation::Larger, larger_votes);
        }
        records.push(RelationRecord {
            subject,
            relation,
            object,
            counts,
        });
    }
    records
}

/// The mirrored record: subject and object swapped, relation and counts
/// inverted.
pub fn complement(record: &RelationRecord) -> RelationRecord {
    RelationRecord {
        subject: record.object.clone(),
        relation: record.relation.invert(),
        object: record.subject.clone(),
        counts: record
            .counts
            .iter()
            .map(|(&rel, &n)| (rel.invert(), n))
            .collect(),
    }
}

/// Balances labels by appending each record's complement, so `smaller` and
/// `larger` records come out in equal numbers.
pub fn balance_complements(records: &[RelationRecord]) -> Vec<RelationRecord> {
    let mut out = Vec::with_capacity(records.len() * 2);
    for record in records {
        out.push(record.clone());
        out.push(complement(record));
    }
    out
}

/// Derives the one-step transitive evaluation set: `a smaller b` and
/// `b smaller c` imply `a smaller c`, kept only when the pair `{a, c}` is not
/// already covered by the standard records. Contradictory derivations (both
/// directions reachable) are dropped. Complements are included; the count on
/// each derived record is its number of distinct bridge objects.
pub fn build_transitive_set(standard: &[RelationRecord]) -> Vec<RelationRecord> {
    let mut edges: BTreeSet<(String, String)> = BTreeSet::new(); // (smaller, larger)
    let mut covered: BTreeSet<(String, String)> = BTreeSet::new();
    for record in standard {
        let (s, l) = match record.relation {
            SizeRelation::Smaller => (record.subject.clone(), record.object.clone()),
            SizeRelation::Larger => (record.object.clone(), record.subject.clone()),
        };
        covered.insert(canonical_pair(&s, &l));
        edges.insert((s, l));
    }

    // candidate (a, c) -> distinct bridges b with a < b and b < c.
    let mut candidates: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for (a, b) in &edges {
        for (b2, c) in &edges {
            if b == b2 && a != c && !covered.contains(&canonical_pair(a, c)) {
                candidates
                    .entry((a.clone(), c.clone()))
                    .or_default()
                    .insert(b.clone());
            }
        }
    }
    // Drop pairs derivable in both directions.
    let contradictory: BTreeSet<(String, String)> = candidates
        .keys()
        .filter(|(a, c)| candidates.contains_key(&(c.clone(), a.clone())))
        .cloned()
        .collect();

    let mut out = Vec::new();
    for ((a, c), bridges) in candidates {
        if contradictory.contains(&(a.clone(), c.clone())) {
            continue;
        }
        let record = RelationRecord {
            subject: a,
            relation: SizeRelation::Smaller,
            object: c,
            counts: BTreeMap::from([(SizeRelation::Smaller, bridges.len() as u64)]),
        };
        let mirrored = complement(&record);
        out.push(record);
        out.push(mirrored);
    }
    out
}

/// Derives the subtype evaluation set: each test record is restated with the
/// subject replaced by each of its contextual subtypes. Subjects without
/// candidates contribute nothing.
pub fn build_subtype_set(test: &[RelationRecord], candidates: &CandidateMap) -> Vec<RelationRecord> {
    let mut out = Vec::new();
    for record in test {
        let Some(subtypes) = candidates.candidates(&record.subject) else {
            continue;
        };
        for subtype in subtypes {
            if subtype == &record.object {
                continue;
            }
            out.push(RelationRecord {
                subject: subtype.clone(),
                ..record.clone()
            });
        }
    }
    out
}

/// Serializes one record as
/// `subject<TAB>relation<TAB>object<TAB>relation:count ...`.
pub fn record_to_line(record: &RelationRecord) -> String {
    let counts: Vec<String> = record
        .counts
        .iter()
        .map(|(rel, n)| format!("{rel}:{n}"))
        .collect();
    format!(
        "{}\t{}\t{}\t{}",
        record.subject,
        record.relation,
        record.object,
        counts.join(" ")
    )
}

/// Serializes relation records, one per line.
pub fn records_to_text(records: &[RelationRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&record_to_line(record));
        out.push('\n');
    }
    out
}

/// Parses a relation record file written by [`records_to_text`].
pub fn parse_records(text: &str) -> Result<Vec<RelationRecord>> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::malformed(
                line_no,
                "expected 'subject<TAB>relation<TAB>object<TAB>counts'",
            ));
        }
        let relation: SizeRelation = fields[1]
            .parse()
            .map_err(|_| Error::malformed(line_no, format!("invalid relation {:?}", fields[1])))?;
        let mut counts = BTreeMap::new();
        for pair in fields[3].split_whitespace() {
            let (rel, n) = pair
                .split_once(':')
                .ok_or_else(|| Error::malformed(line_no, format!("invalid count {pair:?}")))?;
            let rel: SizeRelation = rel
                .parse()
                .map_err(|_| Error::malformed(line_no, format!("invalid relation {rel:?}")))?;
            let n: u64 = n
                .parse()
                .map_err(|_| Error::malformed(line_no, format!("invalid count {n:?}")))?;
            counts.insert(rel, n);
        }
        records.push(RelationRecord {
            subject: fields[0].to_string(),
            relation,
            object: fields[2].to_string(),
            counts,
        });
    }
    Ok(records)
}
