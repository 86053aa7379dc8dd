//! `visknow` command-line entry point.
//!
//! Exposes each pipeline stage as a subcommand plus `pipeline run` for the
//! whole chain. Exit codes: 0 on success, 1 on any runtime error, 2 on
//! usage errors (unknown flags, bad values).

mod pipeline;
mod stages;
mod synthgen;
mod util;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use visknow_core::color::parse_observations;
use visknow_core::evalkit::{load_golds, load_predictions, score, PromptSetting};
use visknow_core::scene::EmbeddingTable;
use visknow_core::size::{parse_records, DEFAULT_CLUSTERS, DEFAULT_GAMMA, DEFAULT_MIN_SUPPORT};
use visknow_core::spatial::{DEFAULT_OVERLAP, DEFAULT_PARTITIONS};
use visknow_core::subtype::{collect_candidates, load_kb_edges, CandidateMap};
use visknow_core::task::Task;

use pipeline::{resolve_config, run_pipeline, FileConfig, PipelineFlags, DEFAULT_SEED, OUT_ENV};
use stages::{
    annotate_stage, build_samples, color_stage, parse_typical, prompts_artifact, size_stage,
    spatial_stage, splits_artifact, typicalize_stage, Corpus, TypicalLabels,
};
use synthgen::{write_corpus, ProfileChoice};
use util::{parse_ratios, read_text, write_text};

#[derive(Parser)]
#[command(name = "visknow", version, about = "Derives visible physical knowledge from annotated scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check input files against the data model
    Ingest {
        #[command(subcommand)]
        command: IngestCommand,
    },
    /// Collect subtype candidates and annotate scenes with subtypes
    Subtype {
        #[command(subcommand)]
        command: SubtypeCommand,
    },
    /// Run one knowledge-extraction stage
    Extract {
        #[command(subcommand)]
        command: ExtractCommand,
    },
    /// Reduce label distributions to typical label sets
    Labels {
        #[command(subcommand)]
        command: LabelsCommand,
    },
    /// Assign train/dev/test splits
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
    /// Emit probing prompts
    Prompts {
        #[command(subcommand)]
        command: PromptsCommand,
    },
    /// Score prediction files
    Eval {
        #[command(subcommand)]
        command: EvalCommand,
    },
    /// Generate synthetic corpora with known ground truth
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
    /// Run the whole pipeline and write a manifest
    Pipeline {
        #[command(subcommand)]
        command: PipelineCommand,
    },
}

/// Flags shared by every command that reads a scene corpus with rasters.
#[derive(Args)]
struct CorpusArgs {
    /// Scene line-record file (JSON object per line)
    #[arg(long)]
    scenes: PathBuf,
    /// Directory holding depth rasters; defaults to the scene file's directory
    #[arg(long)]
    depth_dir: Option<PathBuf>,
    /// Treat raster values as disparity and flip them so larger = farther
    #[arg(long)]
    invert_depth: bool,
}

impl CorpusArgs {
    fn load(&self) -> Result<Corpus> {
        Corpus::load(&self.scenes, self.depth_dir.as_deref(), self.invert_depth)
    }
}

#[derive(Subcommand)]
enum IngestCommand {
    /// Validate scenes, rasters, and optional side inputs; print counts
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Also validate an embedding table file
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Also validate a raw color observation file
        #[arg(long)]
        observations: Option<PathBuf>,
        /// Also validate a knowledge-base edge file
        #[arg(long)]
        kb: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SubtypeCommand {
    /// Build the candidate map from noun phrases and KB edges
    Collect {
        /// Noun phrase list, one phrase per line
        #[arg(long)]
        phrases: Option<PathBuf>,
        /// KB edge file, one child<TAB>parent pair per line
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Scene file supplying the object-name universe
        #[arg(long)]
        scenes: PathBuf,
        /// Output candidate map file
        #[arg(long)]
        out: PathBuf,
    },
    /// Fill each object's subtype using candidates and embeddings
    Select {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Candidate map file from `subtype collect`
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Embedding table covering image, region, and candidate text keys
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Worker threads for per-scene work (0 = one per core)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output annotated scene file
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExtractCommand {
    /// Aggregate raw color observations into per-object distributions
    Color {
        /// Observation file: object_key<TAB>raw_text per line
        #[arg(long)]
        observations: PathBuf,
        /// Output distribution file
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive smaller/larger relations from depth-corrected region sizes
    Size {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Number of size clusters per scene
        #[arg(long, default_value_t = DEFAULT_CLUSTERS)]
        clusters: usize,
        /// Depth exponent in perceived size (1 or 2)
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: u32,
        /// Minimum observations per name pair
        #[arg(long, default_value_t = DEFAULT_MIN_SUPPORT)]
        min_support: u64,
        /// Worker threads for per-scene work (0 = one per core)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output relation record file
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive scene-conditioned elevation relations within depth partitions
    Spatial {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Number of overlapping depth windows per scene
        #[arg(long, default_value_t = DEFAULT_PARTITIONS)]
        partitions: usize,
        /// Fractional overlap between neighboring windows
        #[arg(long, default_value_t = DEFAULT_OVERLAP)]
        overlap: f64,
        /// Worker threads for per-scene work (0 = one per core)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output spatial distribution file
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum LabelsCommand {
    /// Apply the typical-label filter to extracted distributions
    Typicalize {
        /// Color distribution file from `extract color`
        #[arg(long)]
        color_dists: Option<PathBuf>,
        /// Spatial distribution file from `extract spatial`
        #[arg(long)]
        spatial_dists: Option<PathBuf>,
        /// Output typical-label file
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flags shared by the sample-building commands.
#[derive(Args)]
struct SampleArgs {
    /// Typical-label file from `labels typicalize`
    #[arg(long)]
    typical: Option<PathBuf>,
    /// Relation record file from `extract size`
    #[arg(long)]
    size_relations: Option<PathBuf>,
    /// Split shuffle seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Train,dev,test ratios
    #[arg(long, default_value = "0.2,0.1,0.7")]
    ratios: String,
}

impl SampleArgs {
    fn load(&self) -> Result<(Vec<(Task, Vec<visknow_core::evalkit::EvalSample>)>, (f64, f64, f64))>
    {
        if self.typical.is_none() && self.size_relations.is_none() {
            bail!("nothing to sample; pass --typical and/or --size-relations");
        }
        let typical = match &self.typical {
            Some(path) => parse_typical(&read_text(path)?)
                .with_context(|| format!("parsing typical labels from {}", path.display()))?,
            None => TypicalLabels::default(),
        };
        let size_records = match &self.size_relations {
            Some(path) => parse_records(&read_text(path)?)
                .with_context(|| format!("parsing size relations from {}", path.display()))?,
            None => Vec::new(),
        };
        Ok((build_samples(&typical, &size_records), parse_ratios(&self.ratios)?))
    }
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Write sample_id<TAB>split assignments for every sample
    Split {
        #[command(flatten)]
        samples: SampleArgs,
        /// Output split file
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PromptsCommand {
    /// Fill prompt templates for samples built from the artifacts
    Emit {
        #[command(flatten)]
        samples: SampleArgs,
        /// Task to emit, or all three
        #[arg(long, value_enum, default_value_t = TaskArg::All)]
        task: TaskArg,
        /// Prompt phrasing
        #[arg(long, value_enum, default_value_t = SettingArg::Qa)]
        setting: SettingArg,
        /// Add task and split columns (the pipeline artifact layout)
        #[arg(long)]
        five_col: bool,
        /// Output prompt file
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flags shared by the scoring commands.
#[derive(Args)]
struct ScoreArgs {
    /// Task whose label space applies
    #[arg(long, value_enum)]
    task: ScoredTaskArg,
    /// Gold file: prompt or split records whose last column is the gold set
    #[arg(long)]
    golds: PathBuf,
    /// Prediction file: sample_id<TAB>label:prob pairs
    #[arg(long)]
    preds: PathBuf,
    /// Probability threshold for macro-F1 class prediction
    /// (default: 1 / label-space size)
    #[arg(long)]
    f1_threshold: Option<f64>,
}

impl ScoreArgs {
    fn score(&self) -> Result<visknow_core::evalkit::MetricsReport> {
        let golds = load_golds(&self.golds)
            .with_context(|| format!("loading golds from {}", self.golds.display()))?;
        let preds = load_predictions(&self.preds)
            .with_context(|| format!("loading predictions from {}", self.preds.display()))?;
        Ok(score(self.task.into(), &golds, &preds, self.f1_threshold)?)
    }
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Score predictions: R-Acc, Conf, macro-F1, cardinality buckets
    Score {
        #[command(flatten)]
        args: ScoreArgs,
        /// Print machine-readable records instead of the table
        #[arg(long)]
        records: bool,
    },
    /// Print only the per-cardinality breakdown as records
    Breakdown {
        #[command(flatten)]
        args: ScoreArgs,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Write a seeded synthetic corpus (scenes, rasters, color observations)
    Generate {
        /// Seed of the first scene; scene i uses seed + i
        #[arg(long)]
        seed: u64,
        /// Number of scenes
        #[arg(long)]
        scenes: usize,
        /// Generation profile
        #[arg(long, value_enum, default_value_t = ProfileArg::Mixed)]
        profile: ProfileArg,
        /// Output directory (falls back to $VISKNOW_OUT, then `out`)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// Run annotation, extraction, typicalization, and prompt emission
    Run {
        /// Scene line-record file
        #[arg(long)]
        scenes: Option<PathBuf>,
        /// Raw color observation file
        #[arg(long)]
        colors: Option<PathBuf>,
        /// Noun phrase list for subtype candidates
        #[arg(long)]
        phrases: Option<PathBuf>,
        /// KB edge file for subtype candidates
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Embedding table file
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Prebuilt candidate map (alternative to --phrases/--kb)
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Directory holding depth rasters
        #[arg(long)]
        depth_dir: Option<PathBuf>,
        /// Treat raster values as disparity and flip them
        #[arg(long)]
        invert_depth: bool,
        /// Output directory (falls back to $VISKNOW_OUT, then `out`)
        #[arg(long)]
        out: Option<PathBuf>,
        /// TOML config file; explicit flags win over its values
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of size clusters per scene
        #[arg(long)]
        clusters: Option<usize>,
        /// Depth exponent in perceived size (1 or 2)
        #[arg(long)]
        gamma: Option<u32>,
        /// Minimum observations per name pair
        #[arg(long)]
        min_support: Option<u64>,
        /// Number of overlapping depth windows per scene
        #[arg(long)]
        partitions: Option<usize>,
        /// Fractional overlap between neighboring windows
        #[arg(long)]
        overlap: Option<f64>,
        /// Split shuffle seed
        #[arg(long)]
        seed: Option<u64>,
        /// Train,dev,test ratios
        #[arg(long)]
        ratios: Option<String>,
        /// Prompt phrasing for the prompts artifact
        #[arg(long, value_enum)]
        setting: Option<SettingArg>,
        /// Worker threads for per-scene work (0 = one per core)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Color,
    Size,
    Spatial,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScoredTaskArg {
    Color,
    Size,
    Spatial,
}

impl From<ScoredTaskArg> for Task {
    fn from(value: ScoredTaskArg) -> Task {
        match value {
            ScoredTaskArg::Color => Task::Color,
            ScoredTaskArg::Size => Task::Size,
            ScoredTaskArg::Spatial => Task::Spatial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SettingArg {
    Zs,
    Ft,
    Qa,
}

impl From<SettingArg> for PromptSetting {
    fn from(value: SettingArg) -> PromptSetting {
        match value {
            SettingArg::Zs => PromptSetting::ZeroShot,
            SettingArg::Ft => PromptSetting::Finetune,
            SettingArg::Qa => PromptSetting::Qa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Size,
    Spatial,
    Mixed,
}

impl From<ProfileArg> for ProfileChoice {
    fn from(value: ProfileArg) -> ProfileChoice {
        match value {
            ProfileArg::Size => ProfileChoice::Size,
            ProfileArg::Spatial => ProfileChoice::Spatial,
            ProfileArg::Mixed => ProfileChoice::Mixed,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { command } => run_ingest(command),
        Command::Subtype { command } => run_subtype(command),
        Command::Extract { command } => run_extract(command),
        Command::Labels { command } => run_labels(command),
        Command::Dataset { command } => run_dataset(command),
        Command::Prompts { command } => run_prompts(command),
        Command::Eval { command } => run_eval(command),
        Command::Synth { command } => run_synth(command),
        Command::Pipeline { command } => run_pipeline_command(command),
    }
}

fn run_ingest(command: IngestCommand) -> Result<()> {
    let IngestCommand::Validate {
        corpus,
        embeddings,
        observations,
        kb,
    } = command;
    let loaded = corpus.load()?;
    let objects: usize = loaded.scenes.iter().map(|s| s.objects.len()).sum();
    for scene in &loaded.scenes {
        loaded.depth_for(scene)?;
    }
    println!("scenes       {}", loaded.scenes.len());
    println!("objects      {objects}");
    println!("rasters      {}", loaded.scenes.len());
    if let Some(path) = embeddings {
        let table = EmbeddingTable::load(&path)
            .with_context(|| format!("loading embeddings from {}", path.display()))?;
        println!("embeddings   {} (dim {})", table.len(), table.dim);
    }
    if let Some(path) = observations {
        let obs = parse_observations(&read_text(&path)?)
            .with_context(|| format!("parsing observations from {}", path.display()))?;
        println!("observations {}", obs.len());
    }
    if let Some(path) = kb {
        let edges = load_kb_edges(&path)
            .with_context(|| format!("loading KB edges from {}", path.display()))?;
        println!("kb edges     {}", edges.len());
    }
    Ok(())
}

fn run_subtype(command: SubtypeCommand) -> Result<()> {
    match command {
        SubtypeCommand::Collect {
            phrases,
            kb,
            scenes,
            out,
        } => {
            if phrases.is_none() && kb.is_none() {
                bail!("nothing to collect; pass --phrases and/or --kb");
            }
            let phrase_list: Vec<String> = match &phrases {
                Some(path) => read_text(path)?.lines().map(str::to_string).collect(),
                None => Vec::new(),
            };
            let kb_edges = match &kb {
                Some(path) => load_kb_edges(path)
                    .with_context(|| format!("loading KB edges from {}", path.display()))?,
                None => Vec::new(),
            };
            let corpus = Corpus::load(&scenes, None, false)?;
            let names: BTreeSet<String> = corpus
                .scenes
                .iter()
                .flat_map(|s| s.objects.iter().map(|o| o.name.clone()))
                .collect();
            let collection = collect_candidates(&phrase_list, &kb_edges, &names);
            write_text(&out, &collection.map.to_text())?;
            if collection.skipped_phrases > 0 {
                eprintln!("skipped {} empty phrases", collection.skipped_phrases);
            }
            println!("names with candidates: {}", collection.map.iter().count());
            Ok(())
        }
        SubtypeCommand::Select {
            corpus,
            candidates,
            embeddings,
            jobs,
            out,
        } => {
            let loaded = corpus.load()?;
            let cmap = match &candidates {
                Some(path) => CandidateMap::load(path)
                    .with_context(|| format!("loading candidates from {}", path.display()))?,
                None => CandidateMap::empty(),
            };
            let table = match &embeddings {
                Some(path) => EmbeddingTable::load(path)
                    .with_context(|| format!("loading embeddings from {}", path.display()))?,
                None => EmbeddingTable::new(std::iter::empty())?,
            };
            let (text, annotated) = annotate_stage(&loaded, &cmap, &table, jobs)?;
            write_text(&out, &text)?;
            println!("annotated {} scenes", annotated.len());
            Ok(())
        }
    }
}

fn run_extract(command: ExtractCommand) -> Result<()> {
    match command {
        ExtractCommand::Color { observations, out } => {
            let obs = parse_observations(&read_text(&observations)?)
                .with_context(|| format!("parsing observations from {}", observations.display()))?;
            let (text, aggregate) = color_stage(&obs);
            write_text(&out, &text)?;
            if !aggregate.dropped_objects.is_empty() {
                eprintln!(
                    "dropped {} objects with no mappable color",
                    aggregate.dropped_objects.len()
                );
            }
            if aggregate.unmapped_tokens > 0 {
                eprintln!("ignored {} unmapped color tokens", aggregate.unmapped_tokens);
            }
            println!("objects with color distributions: {}", aggregate.dists.len());
            Ok(())
        }
        ExtractCommand::Size {
            corpus,
            clusters,
            gamma,
            min_support,
            jobs,
            out,
        } => {
            let loaded = corpus.load()?;
            let (text, records) = size_stage(&loaded, clusters, gamma, min_support, jobs)?;
            write_text(&out, &text)?;
            println!("size relations: {}", records.len());
            Ok(())
        }
        ExtractCommand::Spatial {
            corpus,
            partitions,
            overlap,
            jobs,
            out,
        } => {
            let loaded = corpus.load()?;
            let (text, dists) = spatial_stage(&loaded, partitions, overlap, jobs)?;
            write_text(&out, &text)?;
            println!("spatial pairs: {}", dists.len());
            Ok(())
        }
    }
}

fn run_labels(command: LabelsCommand) -> Result<()> {
    let LabelsCommand::Typicalize {
        color_dists,
        spatial_dists,
        out,
    } = command;
    if color_dists.is_none() && spatial_dists.is_none() {
        bail!("nothing to typicalize; pass --color-dists and/or --spatial-dists");
    }
    let color = match &color_dists {
        Some(path) => visknow_core::dist::parse_dists(&read_text(path)?)
            .with_context(|| format!("parsing color distributions from {}", path.display()))?,
        None => Default::default(),
    };
    let spatial = match &spatial_dists {
        Some(path) => visknow_core::spatial::parse_spatial_dists(&read_text(path)?)
            .with_context(|| format!("parsing spatial distributions from {}", path.display()))?,
        None => Default::default(),
    };
    let (text, typical) = typicalize_stage(&color, &spatial);
    write_text(&out, &text)?;
    println!(
        "typical label sets: {} color, {} spatial",
        typical.color.len(),
        typical.spatial.len()
    );
    Ok(())
}

fn run_dataset(command: DatasetCommand) -> Result<()> {
    let DatasetCommand::Split { samples, out } = command;
    let (tasks, ratios) = samples.load()?;
    let text = splits_artifact(&tasks, ratios, samples.seed)?;
    write_text(&out, &text)?;
    println!("assigned splits for {} samples", text.lines().count());
    Ok(())
}

fn run_prompts(command: PromptsCommand) -> Result<()> {
    let PromptsCommand::Emit {
        samples,
        task,
        setting,
        five_col,
        out,
    } = command;
    let (mut tasks, ratios) = samples.load()?;
    if let Some(only) = match task {
        TaskArg::Color => Some(Task::Color),
        TaskArg::Size => Some(Task::Size),
        TaskArg::Spatial => Some(Task::Spatial),
        TaskArg::All => None,
    } {
        tasks.retain(|(t, _)| *t == only);
    }
    let text = prompts_artifact(&tasks, setting.into(), ratios, samples.seed, five_col)?;
    write_text(&out, &text)?;
    println!("emitted {} prompts", text.lines().count());
    Ok(())
}

fn run_eval(command: EvalCommand) -> Result<()> {
    match command {
        EvalCommand::Score { args, records } => {
            let report = args.score()?;
            if records {
                print!("{}", visknow_core::evalkit::report_to_records(&report));
            } else {
                print!("{}", visknow_core::evalkit::report_to_text(&report));
            }
            Ok(())
        }
        EvalCommand::Breakdown { args } => {
            let report = args.score()?;
            for (card, bucket) in &report.per_cardinality {
                println!(
                    "cardinality\t{card}\t{}\t{}\t{}",
                    bucket.n_samples, bucket.r_acc, bucket.conf
                );
            }
            Ok(())
        }
    }
}

fn run_synth(command: SynthCommand) -> Result<()> {
    let SynthCommand::Generate {
        seed,
        scenes,
        profile,
        out_dir,
    } = command;
    let dir = out_dir
        .or_else(|| std::env::var(OUT_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let summary = write_corpus(&dir, seed, scenes, profile.into())?;
    println!(
        "wrote {} scenes ({} objects, {} color observations) to {}",
        summary.scenes,
        summary.objects,
        summary.observations,
        dir.display()
    );
    Ok(())
}

fn run_pipeline_command(command: PipelineCommand) -> Result<()> {
    let PipelineCommand::Run {
        scenes,
        colors,
        phrases,
        kb,
        embeddings,
        candidates,
        depth_dir,
        invert_depth,
        out,
        config,
        clusters,
        gamma,
        min_support,
        partitions,
        overlap,
        seed,
        ratios,
        setting,
        jobs,
    } = command;
    let flags = PipelineFlags {
        scenes,
        colors,
        phrases,
        kb,
        embeddings,
        candidates,
        depth_dir,
        invert_depth,
        out,
        clusters,
        gamma,
        min_support,
        partitions,
        overlap,
        seed,
        ratios: ratios.as_deref().map(parse_ratios).transpose()?,
        setting: setting.map(Into::into),
        jobs,
    };
    let file = match &config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let resolved = resolve_config(flags, file, std::env::var(OUT_ENV).ok())?;
    let manifest = run_pipeline(&resolved)?;
    println!("wrote manifest {}", manifest.display());
    Ok(())
}
