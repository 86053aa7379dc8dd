//! Scene-conditioned spatial elevation extraction.
//!
//! Perspective makes image-plane heights incomparable for objects at very
//! different depths, so each scene is first split into overlapping depth
//! windows; elevation relations are only read off directly for object pairs
//! sharing a window. Pairs in disjoint windows are recovered transitively
//! through bridge objects that straddle both, with a small composition
//! algebra and majority voting. Relations aggregate per
//! `(scene type, subject, object)` into label distributions.
//!
//! The elevation rule works in image coordinates (y grows downward): `a` is
//! above `b` when `a`'s lowest point sits above `b`'s centroid.

use std::collections::{BTreeMap, BTreeSet};

use crate::dist::LabelDistribution;
use crate::error::Error;
use crate::scene::{
    region_centroid, region_lowest_point_y, region_mean_depth, DepthRaster, Region, Scene,
    SceneType,
};
use crate::Result;

/// Default number of depth windows per scene.
pub const DEFAULT_PARTITIONS: usize = 3;
/// Default fractional overlap between consecutive windows.
pub const DEFAULT_OVERLAP: f64 = 0.5;

/// Relative elevation of a subject with respect to an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpatialRelation {
    Above,
    Below,
    Similar,
}

impl SpatialRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            SpatialRelation::Above => "above",
            SpatialRelation::Below => "below",
            SpatialRelation::Similar => "similar",
        }
    }

    pub fn invert(self) -> SpatialRelation {
        match self {
            SpatialRelation::Above => SpatialRelation::Below,
            SpatialRelation::Below => SpatialRelation::Above,
            SpatialRelation::Similar => SpatialRelation::Similar,
        }
    }
}

impl std::fmt::Display for SpatialRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SpatialRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "above" => Ok(SpatialRelation::Above),
            "below" => Ok(SpatialRelation::Below),
            "similar" => Ok(SpatialRelation::Similar),
            other => Err(Error::invalid(format!(
                "unknown spatial relation {other:?}"
            ))),
        }
    }
}

/// One directed elevation observation within a scene.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialObservation {
    pub scene_type: SceneType,
    pub subject: String,
    pub object: String,
    pub relation: SpatialRelation,
}

/// Overlapping depth windows and each object's window memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthPartitioning {
    /// Inclusive `[start, end]` depth windows, ordered by start.
    pub windows: Vec<(f64, f64)>,
    /// instance_id -> indices of every window containing its mean depth.
    pub membership: BTreeMap<String, BTreeSet<usize>>,
}

impl DepthPartitioning {
    fn members(&self, instance_id: &str) -> Result<&BTreeSet<usize>> {
        self.membership.get(instance_id).ok_or_else(|| {
            Error::invalid(format!(
                "instance {instance_id:?} missing from depth partitioning"
            ))
        })
    }
}

/// Splits the depth range of `depths` (`instance_id -> mean depth` pairs)
/// into `n` equal-width windows where consecutive windows share `overlap`
/// of their width. Every object belongs to each window containing its depth,
/// so objects inside an overlap band belong to two windows.
///
/// A degenerate depth range (all depths equal) collapses to one window.
pub fn partition_by_depth(
    depths: &[(String, f64)],
    n: usize,
    overlap: f64,
) -> Result<DepthPartitioning> {
    if n == 0 {
        return Err(Error::invalid("partition count must be positive"));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::invalid(format!(
            "overlap fraction must be in [0, 1), got {overlap}"
        )));
    }
    if depths.iter().any(|(_, d)| !d.is_finite()) {
        return Err(Error::invalid("mean depths must be finite"));
    }
    if depths.is_empty() {
        return Ok(DepthPartitioning {
            windows: Vec::new(),
            membership: BTreeMap::new(),
        });
    }

    let d_min = depths.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    let d_max = depths
        .iter()
        .map(|&(_, d)| d)
        .fold(f64::NEG_INFINITY, f64::max);

    let windows: Vec<(f64, f64)> = if d_min == d_max || n == 1 {
        vec![(d_min, d_max)]
    } else {
        let range = d_max - d_min;
        let width = range / (1.0 + (n as f64 - 1.0) * (1.0 - overlap));
        let stride = width * (1.0 - overlap);
        (0..n)
            .map(|i| {
                let start = d_min + stride * i as f64;
                // Pin the final edge so the deepest object is never lost to
                // rounding.
                let end = if i == n - 1 { d_max } else { start + width };
                (start, end)
            })
            .collect()
    };

    let mut membership = BTreeMap::new();
    for (instance_id, depth) in depths {
        let mut windows_of: BTreeSet<usize> = windows
            .iter()
            .enumerate()
            .filter(|&(_, &(start, end))| *depth >= start && *depth <= end)
            .map(|(i, _)| i)
            .collect();
        // Guard against rounding at the shared minimum.
        if windows_of.is_empty() {
            windows_of.insert(0);
        }
        if membership.insert(instance_id.clone(), windows_of).is_some() {
            return Err(Error::invalid(format!(
                "duplicate instance {instance_id:?} in depth listing"
            )));
        }
    }
    Ok(DepthPartitioning {
        windows,
        membership,
    })
}

/// Convenience wrapper: mean object depths from the raster, then
/// [`partition_by_depth`].
pub fn scene_partitioning(
    scene: &Scene,
    depth: &DepthRaster,
    n: usize,
    overlap: f64,
) -> Result<DepthPartitioning> {
    if depth.width != scene.width || depth.height != scene.height {
        return Err(Error::invalid(format!(
            "depth raster is {}x{} but scene {} is {}x{}",
            depth.width, depth.height, scene.image_id, scene.width, scene.height
        )));
    }
    let depths: Vec<(String, f64)> = scene
        .objects
        .iter()
        .map(|obj| {
            region_mean_depth(&obj.region, depth).map(|d| (obj.instance_id.clone(), d))
        })
        .collect::<Result<_>>()?;
    partition_by_depth(&depths, n, overlap)
}

/// Relative elevation of `a` with respect to `b` in image coordinates.
///
/// `a` is above when its lowest point sits above `b`'s centroid; the mirrored
/// test yields below; when neither or both fire, the objects are at a similar
/// level. (Both firing at once is geometrically impossible for simple
/// regions, but the symmetric check keeps the rule order-independent.)
pub fn elevation_relation(a: &Region, b: &Region) -> Result<SpatialRelation> {
    let a_above = region_lowest_point_y(a) < region_centroid(b)?.1;
    let b_above = region_lowest_point_y(b) < region_centroid(a)?.1;
    Ok(match (a_above, b_above) {
        (true, false) => SpatialRelation::Above,
        (false, true) => SpatialRelation::Below,
        _ => SpatialRelation::Similar,
    })
}

/// Emits the elevation relation for every unordered pair of distinctly named
/// objects sharing at least one depth window, once per scene.
pub fn intra_partition_relations(
    scene: &Scene,
    partitioning: &DepthPartitioning,
) -> Result<Vec<SpatialObservation>> {
    let scene_type = scene.scene_type.ok_or_else(|| Error::MissingSceneType {
        image_id: scene.image_id.clone(),
    })?;
    let mut out = Vec::new();
    for (i, a) in scene.objects.iter().enumerate() {
        for b in scene.objects.iter().skip(i + 1) {
            if a.name == b.name {
                continue;
            }
            let shared = partitioning
                .members(&a.instance_id)?
                .intersection(partitioning.members(&b.instance_id)?)
                .next()
                .is_some();
            if !shared {
                continue;
            }
            out.push(SpatialObservation {
                scene_type,
                subject: a.name.clone(),
                object: b.name.clone(),
                relation: elevation_relation(&a.region, &b.region)?,
            });
        }
    }
    Ok(out)
}

/// Composes two elevation relations along a bridge object. Agreeing or
/// level-preserving steps compose; contradictory steps (`above` then
/// `below`) yield nothing.
pub fn compose(first: SpatialRelation, second: SpatialRelation) -> Option<SpatialRelation> {
    use SpatialRelation::*;
    match (first, second) {
        (Above, Above) | (Above, Similar) | (Similar, Above) => Some(Above),
        (Below, Below) | (Below, Similar) | (Similar, Below) => Some(Below),
        (Similar, Similar) => Some(Similar),
        (Above, Below) | (Below, Above) => None,
    }
}

/// Recovers relations for pairs in disjoint depth windows by composing
/// through bridge objects that share a window with each endpoint. Bridges
/// vote; the majority relation wins and ties fall back to `similar`. Pairs
/// with no bridge (or only contradictory compositions) emit nothing.
pub fn transitive_relations(
    scene: &Scene,
    partitioning: &DepthPartitioning,
) -> Result<Vec<SpatialObservation>> {
    let scene_type = scene.scene_type.ok_or_else(|| Error::MissingSceneType {
        image_id: scene.image_id.clone(),
    })?;
    let mut out = Vec::new();
    for (i, a) in scene.objects.iter().enumerate() {
        for (j, c) in scene.objects.iter().enumerate().skip(i + 1) {
            if a.name == c.name {
                continue;
            }
            let mem_a = partitioning.members(&a.instance_id)?;
            let mem_c = partitioning.members(&c.instance_id)?;
            if mem_a.intersection(mem_c).next().is_some() {
                continue; // covered by the intra-partition pass
            }
            let mut votes: BTreeMap<SpatialRelation, usize> = BTreeMap::new();
            for (k, bridge) in scene.objects.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let mem_b = partitioning.members(&bridge.instance_id)?;
                if mem_a.intersection(mem_b).next().is_none()
                    || mem_c.intersection(mem_b).next().is_none()
                {
                    continue;
                }
                let first = elevation_relation(&a.region, &bridge.region)?;
                let second = elevation_relation(&bridge.region, &c.region)?;
                if let Some(relation) = compose(first, second) {
                    *votes.entry(relation).or_insert(0) += 1;
                }
            }
            if votes.is_empty() {
                continue;
            }
            let best = votes.values().copied().max().unwrap();
            let winners: Vec<SpatialRelation> = votes
                .iter()
                .filter(|&(_, &n)| n == best)
                .map(|(&rel, _)| rel)
                .collect();
            let relation = if winners.len() == 1 {
                winners[0]
            } else {
                SpatialRelation::Similar
            };
            out.push(SpatialObservation {
                scene_type,
                subject: a.name.clone(),
                object: c.name.clone(),
                relation,
            });
        }
    }
    Ok(out)
}

/// Aggregation key: scene type plus the canonically ordered name pair.
pub type SpatialKey = (SceneType, String, String);

/// Tallies observations into per-key relation distributions. Keys order the
/// subject lexically first, inverting the relation as needed, so `(cup above
/// table)` and `(table below cup)` merge.
pub fn aggregate_spatial(
    observations: &[SpatialObservation],
) -> BTreeMap<SpatialKey, LabelDistribution> {
    let mut tallies: BTreeMap<SpatialKey, BTreeMap<SpatialRelation, u64>> = BTreeMap::new();
    for obs in observations {
        let (subject, object, relation) = if obs.subject <= obs.object {
            (obs.subject.clone(), obs.object.clone(), obs.relation)
        } else {
            (obs.object.clone(), obs.subject.clone(), obs.relation.invert())
        };
        *tallies
            .entry((obs.scene_type, subject, object))
            .or_default()
            .entry(relation)
            .or_insert(0) += 1;
    }
    tallies
        .into_iter()
        .map(|(key, tally)| {
            let support: u64 = tally.values().sum();
            let dist = LabelDistribution::from_counts(
                tally.into_iter().map(|(rel, n)| (rel.as_str().to_string(), n)),
                support as usize,
            )
            .expect("non-empty tally by construction");
            (key, dist)
        })
        .collect()
}

/// Serializes aggregated spatial distributions as
/// `scene_type<TAB>subject<TAB>object<TAB>relation:prob ...<TAB>support`.
pub fn spatial_dists_to_text(dists: &BTreeMap<SpatialKey, LabelDistribution>) -> String {
    let mut out = String::new();
    for ((scene_type, subject, object), dist) in dists {
        let pairs: Vec<String> = dist
            .labels_by_prob()
            .into_iter()
            .map(|(label, p)| format!("{label}:{p}"))
            .collect();
        out.push_str(&format!(
            "{scene_type}\t{subject}\t{object}\t{}\t{}\n",
            pairs.join(" "),
            dist.support
        ));
    }
    out
}

/// Parses a file written by [`spatial_dists_to_text`].
pub fn parse_spatial_dists(text: &str) -> Result<BTreeMap<SpatialKey, LabelDistribution>> {
    let mut dists = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::malformed(
                line_no,
                "expected 'scene_type<TAB>subject<TAB>object<TAB>pairs<TAB>support'",
            ));
        }
        let scene_type: SceneType = fields[0]
            .parse()
            .map_err(|_| Error::malformed(line_no, format!("unknown scene type {:?}", fields[0])))?;
        let support: usize = fields[4]
            .parse()
            .map_err(|_| Error::malformed(line_no, format!("invalid support {:?}", fields[4])))?;
        let mut probs = BTreeMap::new();
        for pair in fields[3].split_whitespace() {
            let (label, prob) = pair
                .split_once(':')
                .ok_or_else(|| Error::malformed(line_no, format!("invalid pair {pair:?}")))?;
            let prob: f64 = prob
                .parse()
                .map_err(|_| Error::malformed(line_no, format!("invalid probability {prob:?}")))?;
            probs.insert(label.to_string(), prob);
        }
        if probs.is_empty() {
            return Err(Error::malformed(line_no, "distribution has no labels"));
        }
        let key = (scene_type, fields[1].to_string(), fields[2].to_string());
        if dists
            .insert(key, LabelDistribution { probs, support })
            .is_some()
        {
            return Err(Error::malformed(line_no, "duplicate spatial key"));
        }
    }
    Ok(dists)
}
