//! Pipeline stages shared by the one-shot subcommands and `pipeline run`.
//!
//! Each stage consumes parsed inputs and returns both the artifact text and
//! the in-memory result, so `pipeline run` and the stage-by-stage subcommands
//! produce byte-identical files by construction. All file formats use
//! shortest round-trip float notation, so chaining stages through files loses
//! nothing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use visknow_core::color::{aggregate_colors, ColorAggregate, ColorObservation};
use visknow_core::dist::{dists_to_text, LabelDistribution};
use visknow_core::evalkit::{
    assign_splits, emit_prompts, prompts_to_text, EvalSample, PromptSetting,
};
use visknow_core::scene::{load_depth, DepthRaster, EmbeddingTable, Scene, SceneType};
use visknow_core::size::{
    aggregate_size, balance_complements, records_to_text, scene_size_relations, RelationRecord,
    SizePair,
};
use visknow_core::spatial::{
    aggregate_spatial, intra_partition_relations, scene_partitioning, spatial_dists_to_text,
    transitive_relations, SpatialKey, SpatialObservation,
};
use visknow_core::subtype::{annotate_scene, CandidateMap};
use visknow_core::task::Task;

use crate::util::depth_path;

/// A scene corpus plus the information needed to find its depth rasters.
pub struct Corpus {
    pub scenes_path: PathBuf,
    pub depth_dir: Option<PathBuf>,
    pub invert_depth: bool,
    pub scenes: Vec<Scene>,
}

impl Corpus {
    /// Loads and validates the scene file; rasters are loaded lazily.
    pub fn load(
        scenes_path: &Path,
        depth_dir: Option<&Path>,
        invert_depth: bool,
    ) -> Result<Corpus> {
        let scenes = visknow_core::scene::load_scenes(scenes_path)
            .with_context(|| format!("loading scenes from {}", scenes_path.display()))?;
        Ok(Corpus {
            scenes_path: scenes_path.to_path_buf(),
            depth_dir: depth_dir.map(Path::to_path_buf),
            invert_depth,
            scenes,
        })
    }

    /// Loads one scene's depth raster and checks it matches the scene size.
    pub fn depth_for(&self, scene: &Scene) -> Result<DepthRaster> {
        let path = depth_path(&self.scenes_path, self.depth_dir.as_deref(), &scene.depth_ref);
        let raster = load_depth(&path, self.invert_depth)?;
        if raster.width != scene.width || raster.height != scene.height {
            bail!(
                "depth raster {} is {}x{} but scene {} is {}x{}",
                path.display(),
                raster.width,
                raster.height,
                scene.image_id,
                scene.width,
                scene.height
            );
        }
        Ok(raster)
    }

    /// Replaces the scene list, keeping the depth resolution base.
    pub fn with_scenes(&self, scenes: Vec<Scene>) -> Corpus {
        Corpus {
            scenes_path: self.scenes_path.clone(),
            depth_dir: self.depth_dir.clone(),
            invert_depth: self.invert_depth,
            scenes,
        }
    }
}

/// Order-preserving per-scene map, parallel when `jobs != 1`.
///
/// `jobs == 0` uses one thread per core. Results come back in scene order
/// regardless of scheduling, so every downstream artifact is independent of
/// the thread count.
pub fn map_scenes<T, F>(scenes: &[Scene], jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Scene) -> Result<T> + Sync,
{
    if jobs == 1 {
        return scenes.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")?;
    pool.install(|| scenes.par_iter().map(|scene| f(scene)).collect())
}

/// Fills every object's subtype from the candidate map and embeddings.
///
/// Objects whose names have no candidates keep their own name and never
/// touch the embedding table, so an empty table is fine for bare corpora.
pub fn annotate_stage(
    corpus: &Corpus,
    candidates: &CandidateMap,
    embeddings: &EmbeddingTable,
    jobs: usize,
) -> Result<(String, Vec<Scene>)> {
    let annotated = map_scenes(&corpus.scenes, jobs, |scene| {
        annotate_scene(scene, candidates, embeddings)
            .with_context(|| format!("annotating scene {}", scene.image_id))
    })?;
    let mut text = String::new();
    for scene in &annotated {
        text.push_str(&visknow_core::scene::scene_to_json_line(scene));
        text.push('\n');
    }
    Ok((text, annotated))
}

/// Aggregates raw color observations into per-object distributions.
pub fn color_stage(observations: &[ColorObservation]) -> (String, ColorAggregate) {
    let aggregate = aggregate_colors(observations);
    let text = dists_to_text(&aggregate.dists);
    (text, aggregate)
}

/// Clusters perceived sizes per scene and aggregates balanced relations.
pub fn size_stage(
    corpus: &Corpus,
    clusters: usize,
    gamma: u32,
    min_support: u64,
    jobs: usize,
) -> Result<(String, Vec<RelationRecord>)> {
    let per_scene = map_scenes(&corpus.scenes, jobs, |scene| {
        let depth = corpus.depth_for(scene)?;
        scene_size_relations(scene, &depth, clusters, gamma)
            .with_context(|| format!("sizing scene {}", scene.image_id))
    })?;
    let pairs: Vec<SizePair> = per_scene.into_iter().flatten().collect();
    let records = balance_complements(&aggregate_size(&pairs, min_support));
    Ok((records_to_text(&records), records))
}

/// Extracts elevation relations within depth partitions, including
/// transitive bridging, and aggregates them per scene type.
///
/// Scenes without a scene type cannot contribute and are skipped.
pub fn spatial_stage(
    corpus: &Corpus,
    partitions: usize,
    overlap: f64,
    jobs: usize,
) -> Result<(String, BTreeMap<SpatialKey, LabelDistribution>)> {
    let typed: Vec<Scene> = corpus
        .scenes
        .iter()
        .filter(|s| s.scene_type.is_some())
        .cloned()
        .collect();
    let per_scene = map_scenes(&typed, jobs, |scene| {
        let depth = corpus.depth_for(scene)?;
        let partitioning = scene_partitioning(scene, &depth, partitions, overlap)
            .with_context(|| format!("partitioning scene {}", scene.image_id))?;
        let mut obs = intra_partition_relations(scene, &partitioning)?;
        obs.extend(transitive_relations(scene, &partitioning)?);
        Ok(obs)
    })?;
    let observations: Vec<SpatialObservation> = per_scene.into_iter().flatten().collect();
    let dists = aggregate_spatial(&observations);
    Ok((spatial_dists_to_text(&dists), dists))
}

/// Typical label sets for the two distribution-valued tasks.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct TypicalLabels {
    pub color: BTreeMap<String, LabelDistribution>,
    pub spatial: BTreeMap<SpatialKey, LabelDistribution>,
}

fn color_key(object: &str) -> String {
    format!("color:{object}")
}

fn spatial_key_text(key: &SpatialKey) -> String {
    format!("spatial:{}|{}|{}", key.0, key.1, key.2)
}

/// Applies the typical-label filter to both kinds of distributions and
/// renders the merged `key<TAB>labels<TAB>probs` artifact, color keys first.
pub fn typicalize_stage(
    color: &BTreeMap<String, LabelDistribution>,
    spatial: &BTreeMap<SpatialKey, LabelDistribution>,
) -> (String, TypicalLabels) {
    let typical = TypicalLabels {
        color: visknow_core::labels::typicalize_all(color),
        spatial: visknow_core::labels::typicalize_all(spatial),
    };
    let mut text = String::new();
    for (object, dist) in &typical.color {
        text.push_str(&typical_line(&color_key(object), dist));
    }
    for (key, dist) in &typical.spatial {
        text.push_str(&typical_line(&spatial_key_text(key), dist));
    }
    (text, typical)
}

fn typical_line(key: &str, dist: &LabelDistribution) -> String {
    let ranked = dist.labels_by_prob();
    let labels: Vec<&str> = ranked.iter().map(|(label, _)| *label).collect();
    let probs: Vec<String> = ranked.iter().map(|(_, p)| format!("{p}")).collect();
    format!("{key}\t{}\t{}\n", labels.join(","), probs.join(","))
}

/// Parses a typical-label artifact back into keyed distributions.
///
/// Support counts are not part of this format; parsed distributions carry
/// support 0 and are meant for sample building, not further aggregation.
pub fn parse_typical(text: &str) -> Result<TypicalLabels> {
    let mut typical = TypicalLabels::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            bail!("line {line_no}: expected 'key<TAB>labels<TAB>probs'");
        }
        let labels: Vec<&str> = fields[1].split(',').collect();
        let probs: Vec<f64> = fields[2]
            .split(',')
            .map(|t| {
                t.parse::<f64>()
                    .with_context(|| format!("line {line_no}: invalid probability {t:?}"))
            })
            .collect::<Result<_>>()?;
        if labels.len() != probs.len() || labels.is_empty() {
            bail!("line {line_no}: labels and probs must be non-empty and aligned");
        }
        let dist = LabelDistribution {
            probs: labels
                .iter()
                .map(|l| l.to_string())
                .zip(probs.iter().copied())
                .collect(),
            support: 0,
        };
        if let Some(object) = fields[0].strip_prefix("color:") {
            if typical.color.insert(object.to_string(), dist).is_some() {
                bail!("line {line_no}: duplicate key {:?}", fields[0]);
            }
        } else if let Some(rest) = fields[0].strip_prefix("spatial:") {
            let parts: Vec<&str> = rest.split('|').collect();
            if parts.len() != 3 {
                bail!("line {line_no}: spatial key needs 'scene|subject|object'");
            }
            let scene_type: SceneType = parts[0]
                .parse()
                .with_context(|| format!("line {line_no}"))?;
            let key = (scene_type, parts[1].to_string(), parts[2].to_string());
            if typical.spatial.insert(key, dist).is_some() {
                bail!("line {line_no}: duplicate key {:?}", fields[0]);
            }
        } else {
            bail!("line {line_no}: key {:?} has no task prefix", fields[0]);
        }
    }
    Ok(typical)
}

/// Builds every task's samples from typical labels plus size records.
pub fn build_samples(
    typical: &TypicalLabels,
    size_records: &[RelationRecord],
) -> Vec<(Task, Vec<EvalSample>)> {
    vec![
        (
            Task::Color,
            visknow_core::evalkit::color_samples(&typical.color),
        ),
        (Task::Size, visknow_core::evalkit::size_samples(size_records)),
        (
            Task::Spatial,
            visknow_core::evalkit::spatial_samples(&typical.spatial),
        ),
    ]
}

/// Renders `sample_id<TAB>split` lines for every sample of every task.
///
/// Splits are assigned per task over that task's key universe.
pub fn splits_artifact(
    tasks: &[(Task, Vec<EvalSample>)],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<String> {
    let mut out = String::new();
    for (_, samples) in tasks {
        let mut samples = samples.clone();
        assign_splits(&mut samples, ratios, seed)?;
        for sample in &samples {
            out.push_str(&format!("{}\t{}\n", sample.sample_id, sample.split.as_str()));
        }
    }
    Ok(out)
}

/// Fills prompt templates for the selected tasks after assigning splits.
///
/// `five_col` adds task and split columns (the pipeline artifact layout);
/// otherwise the three-column prompt exchange format is used. Gold labels
/// are comma-joined in sorted order either way.
pub fn prompts_artifact(
    tasks: &[(Task, Vec<EvalSample>)],
    setting: PromptSetting,
    ratios: (f64, f64, f64),
    seed: u64,
    five_col: bool,
) -> Result<String> {
    let mut out = String::new();
    for (task, samples) in tasks {
        let mut samples = samples.clone();
        assign_splits(&mut samples, ratios, seed)?;
        let records = emit_prompts(*task, setting, &samples)?;
        if five_col {
            for r in &records {
                let gold: Vec<&str> = r.gold.iter().map(String::as_str).collect();
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    r.sample_id,
                    r.task,
                    r.split.as_str(),
                    r.prompt,
                    gold.join(",")
                ));
            }
        } else {
            out.push_str(&prompts_to_text(&records));
        }
    }
    Ok(out)
}
