//! Writes synthetic corpora in the exact file formats the pipeline ingests.

use std::path::Path;

use anyhow::{Context, Result};

use visknow_core::scene::{scene_to_json_line, SceneType};
use visknow_core::synth::{color_observations, generate_scene, SynthConfig};

use crate::util::write_text;

/// Which generation profile each scene uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileChoice {
    /// Tiered object sizes; exercises the size pipeline.
    Size,
    /// Tiered elevations; exercises the spatial pipeline.
    Spatial,
    /// Alternate between the two profiles scene by scene.
    Mixed,
}

/// Counts reported after writing a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSummary {
    pub scenes: usize,
    pub objects: usize,
    pub observations: usize,
}

/// Generates `n_scenes` scenes from consecutive seeds and writes
/// `scenes.jsonl`, one `<image_id>.depth` raster per scene, and the raw
/// color observation file `colors.tsv` into `dir`.
///
/// Scene types rotate through the known set so spatial aggregation sees
/// every conditioning value.
pub fn write_corpus(
    dir: &Path,
    seed: u64,
    n_scenes: usize,
    profile: ProfileChoice,
) -> Result<CorpusSummary> {
    let mut scene_lines = String::new();
    let mut color_lines = String::new();
    let mut summary = CorpusSummary {
        scenes: n_scenes,
        objects: 0,
        observations: 0,
    };

    for i in 0..n_scenes {
        let scene_seed = seed
            .checked_add(i as u64)
            .context("seed range overflows u64")?;
        let scene_type = SceneType::ALL[i % SceneType::ALL.len()];
        let config = match profile {
            ProfileChoice::Size => SynthConfig::size_profile(scene_type),
            ProfileChoice::Spatial => SynthConfig::spatial_profile(scene_type),
            ProfileChoice::Mixed if i % 2 == 0 => SynthConfig::size_profile(scene_type),
            ProfileChoice::Mixed => SynthConfig::spatial_profile(scene_type),
        };
        let synth = generate_scene(scene_seed, &config)
            .with_context(|| format!("generating scene for seed {scene_seed}"))?;

        write_text(
            &dir.join(&synth.scene.depth_ref),
            &synth.depth.to_text(),
        )?;
        scene_lines.push_str(&scene_to_json_line(&synth.scene));
        scene_lines.push('\n');
        for obs in color_observations(&synth.truth) {
            color_lines.push_str(&format!("{}\t{}\n", obs.object_key, obs.raw_text));
            summary.observations += 1;
        }
        summary.objects += synth.scene.objects.len();
    }

    write_text(&dir.join("scenes.jsonl"), &scene_lines)?;
    write_text(&dir.join("colors.tsv"), &color_lines)?;
    Ok(summary)
}
