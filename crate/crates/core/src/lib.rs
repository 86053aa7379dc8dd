//! Extraction of visible physical knowledge from annotated scenes.
//!
//! Given scenes annotated with object regions, precomputed depth rasters, and
//! (optionally) precomputed image/text embeddings, this crate derives three
//! kinds of object knowledge:
//!
//! * **color** — distributions over basic color terms, tallied from raw
//!   color descriptions ([`color`]);
//! * **relative size** — `smaller`/`larger` relations between object names,
//!   obtained by clustering depth-corrected region sizes ([`size`]);
//! * **spatial elevation** — `above`/`below`/`similar` relations conditioned
//!   on scene type, computed within depth partitions to avoid perspective
//!   distortion ([`spatial`]).
//!
//! Downstream of extraction, [`labels`] reduces raw label distributions to
//! typical label sets, and [`evalkit`] turns them into train/dev/test probing
//! datasets with prompt templates and scoring. [`synth`] generates synthetic
//! scenes with exact ground truth so the whole pipeline can be verified
//! end to end.

pub mod color;
pub mod dist;
pub mod error;
pub mod evalkit;
pub mod jenks;
pub mod labels;
pub mod scene;
pub mod size;
pub mod spatial;
pub mod subtype;
pub mod synth;
pub mod task;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
