//! End-to-end pipeline execution with a content-hash manifest.
//!
//! The pipeline runs subtype annotation, then the three extraction stages,
//! then typicalization and prompt emission, writing six artifact files plus
//! `manifest.json`. The manifest records every artifact's SHA-256 and the
//! resolved parameter set (but nothing time- or machine-dependent), so two
//! runs over the same inputs produce byte-identical manifests. A failed run
//! leaves a `pipeline.failed` marker naming the error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use visknow_core::color::load_observations;
use visknow_core::evalkit::{PromptSetting, DEFAULT_RATIOS};
use visknow_core::scene::EmbeddingTable;
use visknow_core::size::{DEFAULT_CLUSTERS, DEFAULT_GAMMA, DEFAULT_MIN_SUPPORT};
use visknow_core::spatial::{DEFAULT_OVERLAP, DEFAULT_PARTITIONS};
use visknow_core::subtype::{collect_candidates, load_kb_edges, CandidateMap};

use crate::stages::{
    annotate_stage, build_samples, color_stage, prompts_artifact, size_stage, spatial_stage,
    typicalize_stage, Corpus,
};
use crate::util::{read_text, sha256_file, write_text};

/// Environment variable supplying the default output directory.
pub const OUT_ENV: &str = "VISKNOW_OUT";

/// Default split seed used when none is configured.
pub const DEFAULT_SEED: u64 = 7;

/// The artifact files a successful run writes, in stage order.
pub const ARTIFACTS: [&str; 6] = [
    "annotated_scenes.jsonl",
    "color_dists.tsv",
    "size_relations.tsv",
    "spatial_dists.tsv",
    "typical_labels.tsv",
    "prompts.tsv",
];

/// Name of the marker file left behind by an aborted run.
pub const FAILED_MARKER: &str = "pipeline.failed";

/// Optional values read from a TOML config file. Flags override these.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenes: Option<PathBuf>,
    pub colors: Option<PathBuf>,
    pub phrases: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub depth_dir: Option<PathBuf>,
    pub invert_depth: Option<bool>,
    pub out: Option<PathBuf>,
    pub clusters: Option<usize>,
    pub gamma: Option<u32>,
    pub min_support: Option<u64>,
    pub partitions: Option<usize>,
    pub overlap: Option<f64>,
    pub seed: Option<u64>,
    pub ratios: Option<[f64; 3]>,
    pub setting: Option<String>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = read_text(path)?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// The same knobs as supplied on the command line, all optional.
#[derive(Debug, Clone, Default)]
pub struct PipelineFlags {
    pub scenes: Option<PathBuf>,
    pub colors: Option<PathBuf>,
    pub phrases: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub depth_dir: Option<PathBuf>,
    pub invert_depth: bool,
    pub out: Option<PathBuf>,
    pub clusters: Option<usize>,
    pub gamma: Option<u32>,
    pub min_support: Option<u64>,
    pub partitions: Option<usize>,
    pub overlap: Option<f64>,
    pub seed: Option<u64>,
    pub ratios: Option<(f64, f64, f64)>,
    pub setting: Option<PromptSetting>,
    pub jobs: Option<usize>,
}

/// Fully resolved run configuration: flags win over the config file, which
/// wins over defaults. The output directory additionally falls back to the
/// `VISKNOW_OUT` environment variable, then to `out`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenes: PathBuf,
    pub colors: Option<PathBuf>,
    pub phrases: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
    pub depth_dir: Option<PathBuf>,
    pub invert_depth: bool,
    pub out: PathBuf,
    pub clusters: usize,
    pub gamma: u32,
    pub min_support: u64,
    pub partitions: usize,
    pub overlap: f64,
    pub seed: u64,
    pub ratios: (f64, f64, f64),
    pub setting: PromptSetting,
    pub jobs: usize,
}

/// Merges flags, config file, environment, and defaults into a [`RunConfig`].
pub fn resolve_config(
    flags: PipelineFlags,
    file: FileConfig,
    env_out: Option<String>,
) -> Result<RunConfig> {
    let scenes = flags
        .scenes
        .or(file.scenes)
        .context("no scene file configured; pass --scenes or set `scenes` in the config")?;
    let setting = match (flags.setting, file.setting) {
        (Some(s), _) => s,
        (None, Some(text)) => text
            .parse()
            .with_context(|| format!("config key `setting` = {text:?}"))?,
        (None, None) => PromptSetting::Qa,
    };
    let out = flags
        .out
        .or(file.out)
        .or(env_out.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(RunConfig {
        scenes,
        colors: flags.colors.or(file.colors),
        phrases: flags.phrases.or(file.phrases),
        kb: flags.kb.or(file.kb),
        embeddings: flags.embeddings.or(file.embeddings),
        candidates: flags.candidates.or(file.candidates),
        depth_dir: flags.depth_dir.or(file.depth_dir),
        invert_depth: flags.invert_depth || file.invert_depth.unwrap_or(false),
        out,
        clusters: flags.clusters.or(file.clusters).unwrap_or(DEFAULT_CLUSTERS),
        gamma: flags.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA),
        min_support: flags
            .min_support
            .or(file.min_support)
            .unwrap_or(DEFAULT_MIN_SUPPORT),
        partitions: flags
            .partitions
            .or(file.partitions)
            .unwrap_or(DEFAULT_PARTITIONS),
        overlap: flags.overlap.or(file.overlap).unwrap_or(DEFAULT_OVERLAP),
        seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        ratios: flags
            .ratios
            .or(file.ratios.map(|r| (r[0], r[1], r[2])))
            .unwrap_or(DEFAULT_RATIOS),
        setting,
        jobs: flags.jobs.or(file.jobs).unwrap_or(1),
    })
}

#[derive(Serialize)]
struct ManifestInputs {
    scenes: String,
    colors: Option<String>,
    phrases: Option<String>,
    kb: Option<String>,
    embeddings: Option<String>,
    candidates: Option<String>,
    depth_dir: Option<String>,
}

#[derive(Serialize)]
struct ManifestParameters {
    inputs: ManifestInputs,
    invert_depth: bool,
    clusters: usize,
    gamma: u32,
    min_support: u64,
    partitions: usize,
    overlap: f64,
    seed: u64,
    ratios: [f64; 3],
    setting: String,
}

#[derive(Serialize)]
struct Manifest {
    parameters: ManifestParameters,
    artifacts: BTreeMap<String, String>,
}

fn display_path(path: &Path) -> String {
    path.display().to_string()
}

/// Runs every stage and writes the manifest; on failure, leaves a
/// `pipeline.failed` marker in the output directory instead.
pub fn run_pipeline(config: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    let marker = config.out.join(FAILED_MARKER);
    if marker.exists() {
        fs::remove_file(&marker)
            .with_context(|| format!("removing stale marker {}", marker.display()))?;
    }
    match execute(config) {
        Ok(()) => Ok(config.out.join("manifest.json")),
        Err(err) => {
            let _ = fs::write(&marker, format!("{err:#}\n"));
            Err(err)
        }
    }
}

fn execute(config: &RunConfig) -> Result<()> {
    let corpus = Corpus::load(
        &config.scenes,
        config.depth_dir.as_deref(),
        config.invert_depth,
    )?;

    let candidates = load_candidate_map(config, &corpus)?;
    let embeddings = match &config.embeddings {
        Some(path) => EmbeddingTable::load(path)
            .with_context(|| format!("loading embeddings from {}", path.display()))?,
        None => EmbeddingTable::new(std::iter::empty())?,
    };
    let (annotated_text, annotated) =
        annotate_stage(&corpus, &candidates, &embeddings, config.jobs)?;
    write_text(&config.out.join(ARTIFACTS[0]), &annotated_text)?;
    let corpus = corpus.with_scenes(annotated);

    let observations = match &config.colors {
        Some(path) => load_observations(path)
            .with_context(|| format!("loading color observations from {}", path.display()))?,
        None => Vec::new(),
    };
    let (color_text, color_aggregate) = color_stage(&observations);
    write_text(&config.out.join(ARTIFACTS[1]), &color_text)?;

    let (size_text, size_records) = size_stage(
        &corpus,
        config.clusters,
        config.gamma,
        config.min_support,
        config.jobs,
    )?;
    write_text(&config.out.join(ARTIFACTS[2]), &size_text)?;

    let (spatial_text, spatial_dists) =
        spatial_stage(&corpus, config.partitions, config.overlap, config.jobs)?;
    write_text(&config.out.join(ARTIFACTS[3]), &spatial_text)?;

    let (typical_text, typical) = typicalize_stage(&color_aggregate.dists, &spatial_dists);
    write_text(&config.out.join(ARTIFACTS[4]), &typical_text)?;

    let tasks = build_samples(&typical, &size_records);
    let prompts_text =
        prompts_artifact(&tasks, config.setting, config.ratios, config.seed, true)?;
    write_text(&config.out.join(ARTIFACTS[5]), &prompts_text)?;

    let mut artifacts = BTreeMap::new();
    for name in ARTIFACTS {
        artifacts.insert(name.to_string(), sha256_file(&config.out.join(name))?);
    }
    let manifest = Manifest {
        parameters: ManifestParameters {
            inputs: ManifestInputs {
                scenes: display_path(&config.scenes),
                colors: config.colors.as_deref().map(display_path),
                phrases: config.phrases.as_deref().map(display_path),
                kb: config.kb.as_deref().map(display_path),
                embeddings: config.embeddings.as_deref().map(display_path),
                candidates: config.candidates.as_deref().map(display_path),
                depth_dir: config.depth_dir.as_deref().map(display_path),
            },
            invert_depth: config.invert_depth,
            clusters: config.clusters,
            gamma: config.gamma,
            min_support: config.min_support,
            partitions: config.partitions,
            overlap: config.overlap,
            seed: config.seed,
            ratios: [config.ratios.0, config.ratios.1, config.ratios.2],
            setting: config.setting.as_str().to_string(),
        },
        artifacts,
    };
    let manifest_text =
        serde_json::to_string_pretty(&manifest).context("serializing manifest")? + "\n";
    write_text(&config.out.join("manifest.json"), &manifest_text)?;
    Ok(())
}

/// Builds the subtype candidate map from whichever inputs are configured:
/// a prebuilt candidate file wins, otherwise phrases/KB edges are collected
/// against the corpus' object names, otherwise the map is empty.
fn load_candidate_map(config: &RunConfig, corpus: &Corpus) -> Result<CandidateMap> {
    if let Some(path) = &config.candidates {
        if config.phrases.is_some() || config.kb.is_some() {
            bail!("pass either --candidates or --phrases/--kb, not both");
        }
        return CandidateMap::load(path)
            .with_context(|| format!("loading candidates from {}", path.display()));
    }
    if config.phrases.is_none() && config.kb.is_none() {
        return Ok(CandidateMap::empty());
    }
    let phrases: Vec<String> = match &config.phrases {
        Some(path) => read_text(path)?.lines().map(str::to_string).collect(),
        None => Vec::new(),
    };
    let kb_edges = match &config.kb {
        Some(path) => load_kb_edges(path)
            .with_context(|| format!("loading KB edges from {}", path.display()))?,
        None => Vec::new(),
    };
    let names = corpus
        .scenes
        .iter()
        .flat_map(|s| s.objects.iter().map(|o| o.name.clone()))
        .collect();
    Ok(collect_candidates(&phrases, &kb_edges, &names).map)
}
