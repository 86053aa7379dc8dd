//! Small filesystem and parsing helpers shared by the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

/// Reads a whole text file, attaching the path to any error.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes a text file, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Lowercase hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Parses a `train,dev,test` ratio triple such as `0.2,0.1,0.7`.
pub fn parse_ratios(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("ratios must be three comma-separated numbers, got {text:?}");
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .with_context(|| format!("invalid ratio component {part:?}"))?;
    }
    Ok((values[0], values[1], values[2]))
}

/// Resolves a scene's `depth_ref` against an explicit depth directory when
/// given, otherwise against the directory containing the scene file.
pub fn depth_path(scenes_path: &Path, depth_dir: Option<&Path>, depth_ref: &str) -> PathBuf {
    match depth_dir {
        Some(dir) => dir.join(depth_ref),
        None => scenes_path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(|p| p.join(depth_ref))
            .unwrap_or_else(|| PathBuf::from(depth_ref)),
    }
}
