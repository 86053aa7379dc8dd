//! Scene data model, ingestion, and region/depth geometry.
//!
//! Scenes are stored one JSON object per line (UTF-8, LF). Each record carries
//! an image id, image dimensions, an optional scene type, the annotated
//! objects, and a reference to the scene's depth raster:
//!
//! ```text
//! {"image_id":"img1","width":640,"height":480,"scene_type":"kitchen",
//!  "objects":[{"instance_id":"o1","name":"sink",
//!              "region":{"kind":"box","coords":[10.0,20.0,110.0,80.0]}}],
//!  "depth_ref":"depth/img1.dr1"}
//! ```
//!
//! Depth rasters use a plain text format: a `DR1 <width> <height>` header
//! line followed by `width * height` whitespace-separated values in row-major
//! order, where larger values are farther from the camera.
//!
//! Embedding tables are line records of `key<TAB>v1 v2 ... vd`. Keys are
//! namespaced as `image:<image_id>`, `region:<image_id>/<instance_id>`, and
//! `text:<string>`; the tab separator keeps keys with spaces parseable.
//!
//! Image coordinates are y-down: larger y is lower in the image. All
//! geometry samples the depth raster at integer pixel centers `(i + 0.5,
//! j + 0.5)`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Scene categories used to condition spatial relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SceneType {
    #[serde(rename = "bedroom")]
    Bedroom,
    #[serde(rename = "bathroom")]
    Bathroom,
    #[serde(rename = "kitchen")]
    Kitchen,
    #[serde(rename = "living room")]
    LivingRoom,
    #[serde(rename = "office")]
    Office,
}

impl SceneType {
    /// All scene types, in a fixed order.
    pub const ALL: [SceneType; 5] = [
        SceneType::Bedroom,
        SceneType::Bathroom,
        SceneType::Kitchen,
        SceneType::LivingRoom,
        SceneType::Office,
    ];

    /// The lowercase display string (`"living room"` keeps its space).
    pub fn as_str(self) -> &'static str {
        match self {
            SceneType::Bedroom => "bedroom",
            SceneType::Bathroom => "bathroom",
            SceneType::Kitchen => "kitchen",
            SceneType::LivingRoom => "living room",
            SceneType::Office => "office",
        }
    }
}

impl std::fmt::Display for SceneType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SceneType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SceneType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scene type {s:?}")))
    }
}

/// An annotated image region: an axis-aligned box or a simple polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RegionRepr", into = "RegionRepr")]
pub enum Region {
    Box {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
    Polygon {
        vertices: Vec<(f64, f64)>,
    },
}

/// Wire representation: `{"kind":"box","coords":[x0,y0,x1,y1]}` or
/// `{"kind":"polygon","coords":[[x,y],...]}`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "coords", rename_all = "lowercase")]
enum RegionRepr {
    Box([f64; 4]),
    Polygon(Vec<[f64; 2]>),
}

impl From<RegionRepr> for Region {
    fn from(repr: RegionRepr) -> Self {
        match repr {
            RegionRepr::Box([x_min, y_min, x_max, y_max]) => Region::Box {
                x_min,
                y_min,
                x_max,
                y_max,
            },
            RegionRepr::Polygon(points) => Region::Polygon {
                vertices: points.into_iter().map(|[x, y]| (x, y)).collect(),
            },
        }
    }
}

impl From<Region> for RegionRepr {
    fn from(region: Region) -> Self {
        match region {
            Region::Box {
                x_min,
                y_min,
                x_max,
                y_max,
            } => RegionRepr::Box([x_min, y_min, x_max, y_max]),
            Region::Polygon { vertices } => {
                RegionRepr::Polygon(vertices.into_iter().map(|(x, y)| [x, y]).collect())
            }
        }
    }
}

impl Region {
    /// Axis-aligned bounding box `(x_min, y_min, x_max, y_max)`.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match self {
            Region::Box {
                x_min,
                y_min,
                x_max,
                y_max,
            } => (*x_min, *y_min, *x_max, *y_max),
            Region::Polygon { vertices } => {
                let mut bb = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
                for &(x, y) in vertices {
                    bb.0 = bb.0.min(x);
                    bb.1 = bb.1.min(y);
                    bb.2 = bb.2.max(x);
                    bb.3 = bb.3.max(y);
                }
                bb
            }
        }
    }

    /// Checks the region invariants against the owning image dimensions.
    fn validate(&self, width: u32, height: u32) -> std::result::Result<(), String> {
        let (w, h) = (width as f64, height as f64);
        match self {
            Region::Box {
                x_min,
                y_min,
                x_max,
                y_max,
            } => {
                let coords = [*x_min, *y_min, *x_max, *y_max];
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err("non-finite box coordinate".into());
                }
                if x_min >= x_max || y_min >= y_max {
                    return Err("degenerate box (x_min >= x_max or y_min >= y_max)".into());
                }
                if *x_min < 0.0 || *y_min < 0.0 || *x_max > w || *y_max > h {
                    return Err("box outside image bounds".into());
                }
            }
            Region::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(format!(
                        "polygon needs at least 3 vertices, got {}",
                        vertices.len()
                    ));
                }
                if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err("non-finite polygon vertex".into());
                }
                if vertices
                    .iter()
                    .any(|&(x, y)| x < 0.0 || y < 0.0 || x > w || y > h)
                {
                    return Err("polygon vertex outside image bounds".into());
                }
                if signed_area(vertices) == 0.0 {
                    return Err("zero-area polygon".into());
                }
            }
        }
        Ok(())
    }
}

/// One annotated object within a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub instance_id: String,
    /// Context-free object name (a lowercase noun).
    pub name: String,
    /// Contextual subtype filled in by subtype selection; absent on raw input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtype: Option<String>,
    pub region: Region,
}

impl ObjectInstance {
    /// The subtype if annotated, otherwise the context-free name.
    pub fn effective_name(&self) -> &str {
        self.subtype.as_deref().unwrap_or(&self.name)
    }
}

/// A single annotated image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub scene_type: Option<SceneType>,
    pub objects: Vec<ObjectInstance>,
    /// Path of the scene's depth raster, relative to the scene file.
    pub depth_ref: String,
}

impl Scene {
    /// Checks all record invariants; used by the loader.
    fn validate(&self) -> std::result::Result<(), String> {
        if self.image_id.is_empty() {
            return Err("empty image_id".into());
        }
        if self.width == 0 || self.height == 0 {
            return Err("image dimensions must be positive".into());
        }
        let mut seen = HashSet::new();
        for obj in &self.objects {
            if obj.instance_id.is_empty() {
                return Err("empty instance_id".into());
            }
            if !seen.insert(obj.instance_id.as_str()) {
                return Err(format!("duplicate instance_id {:?}", obj.instance_id));
            }
            if obj.name.is_empty() {
                return Err(format!("object {:?} has an empty name", obj.instance_id));
            }
            if let Some(subtype) = &obj.subtype {
                if !is_head_of(&obj.name, subtype) {
                    return Err(format!(
                        "subtype {:?} does not end in object name {:?}",
                        subtype, obj.name
                    ));
                }
            }
            obj.region
                .validate(self.width, self.height)
                .map_err(|msg| format!("object {:?}: {msg}", obj.instance_id))?;
        }
        Ok(())
    }

    /// Checks all record invariants on a programmatically built scene.
    pub fn check(&self) -> Result<()> {
        self.validate()
            .map_err(|msg| Error::invalid(format!("scene {}: {msg}", self.image_id)))
    }
}

/// True when `name` heads the phrase: the phrase equals `name` or ends with
/// `name` as a whitespace-token suffix (`"kitchen sink"` is headed by
/// `"sink"`, and `"swivel desk chair"` by `"desk chair"`).
pub fn is_head_of(name: &str, phrase: &str) -> bool {
    let name_tokens: Vec<&str> = name.split_whitespace().collect();
    let phrase_tokens: Vec<&str> = phrase.split_whitespace().collect();
    if name_tokens.is_empty() || phrase_tokens.len() < name_tokens.len() {
        return false;
    }
    phrase_tokens[phrase_tokens.len() - name_tokens.len()..] == name_tokens[..]
}

/// Parses a scene line-record file from its full text contents.
pub fn parse_scenes(text: &str) -> Result<Vec<Scene>> {
    let mut scenes = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let scene: Scene = serde_json::from_str(line)
            .map_err(|e| Error::malformed(line_no, format!("invalid scene record: {e}")))?;
        scene
            .validate()
            .map_err(|msg| Error::malformed(line_no, msg))?;
        if !seen_ids.insert(scene.image_id.clone()) {
            return Err(Error::malformed(
                line_no,
                format!("duplicate image_id {:?}", scene.image_id),
            ));
        }
        scenes.push(scene);
    }
    Ok(scenes)
}

/// Loads and validates a scene line-record file.
pub fn load_scenes(path: impl AsRef<Path>) -> Result<Vec<Scene>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenes(&text)
}

/// Serializes one scene as its canonical single-line JSON record.
pub fn scene_to_json_line(scene: &Scene) -> String {
    serde_json::to_string(scene).expect("scene serialization cannot fail")
}

/// Writes scenes in canonical line-record form (one JSON object per line, LF).
pub fn save_scenes(path: impl AsRef<Path>, scenes: &[Scene]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for scene in scenes {
        out.push_str(&scene_to_json_line(scene));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// A per-pixel depth map; larger values are farther from the camera.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthRaster {
    pub width: u32,
    pub height: u32,
    /// Row-major values, length `width * height`.
    pub values: Vec<f64>,
    /// Whether the source file stored inverse depth and was flipped on load.
    pub inverted: bool,
}

impl DepthRaster {
    /// Depth at pixel `(x, y)`.
    pub fn at(&self, x: u32, y: u32) -> f64 {
        self.values[(y * self.width + x) as usize]
    }

    /// Flips the depth convention: `v -> (v_max - v) + v_min`, preserving the
    /// value range while reversing rank order. Applying it twice restores the
    /// original values.
    pub fn invert(&self) -> DepthRaster {
        let v_min = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let v_max = self
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        DepthRaster {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|v| (v_max - v) + v_min).collect(),
            inverted: !self.inverted,
        }
    }

    /// Serializes to the `DR1` text format (header line, then one row of
    /// values per line).
    pub fn to_text(&self) -> String {
        let mut out = format!("DR1 {} {}\n", self.width, self.height);
        for row in self.values.chunks(self.width as usize) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a `DR1` depth raster from its full text contents. With
/// `invert = true` the stored values are treated as inverse depth and flipped
/// so that larger always means farther.
pub fn parse_depth(text: &str, invert: bool) -> Result<DepthRaster> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::malformed(1, "empty depth raster file"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "DR1" {
        return Err(Error::malformed(
            1,
            format!("expected 'DR1 <width> <height>' header, got {header:?}"),
        ));
    }
    let width: u32 = parts[1]
        .parse()
        .map_err(|_| Error::malformed(1, format!("invalid width {:?}", parts[1])))?;
    let height: u32 = parts[2]
        .parse()
        .map_err(|_| Error::malformed(1, format!("invalid height {:?}", parts[2])))?;
    if width == 0 || height == 0 {
        return Err(Error::malformed(1, "raster dimensions must be positive"));
    }

    let expected = width as usize * height as usize;
    let mut values = Vec::with_capacity(expected);
    for (idx, line) in lines.enumerate() {
        for token in line.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| Error::malformed(idx + 2, format!("invalid depth value {token:?}")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::malformed(
                    idx + 2,
                    format!("depth values must be finite and nonnegative, got {v}"),
                ));
            }
            values.push(v);
        }
    }
    if values.len() != expected {
        return Err(Error::malformed(
            1,
            format!(
                "expected {expected} depth values for {width}x{height}, got {}",
                values.len()
            ),
        ));
    }
    let raster = DepthRaster {
        width,
        height,
        values,
        inverted: false,
    };
    Ok(if invert { raster.invert() } else { raster })
}

/// Loads a `DR1` depth raster file.
pub fn load_depth(path: impl AsRef<Path>, invert: bool) -> Result<DepthRaster> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_depth(&text, invert)
}

/// Table of precomputed embeddings keyed by namespaced strings.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    pub dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Builds a table from `(key, vector)` pairs, checking that dimensions
    /// agree and every vector has nonzero norm.
    pub fn new(entries: impl IntoIterator<Item = (String, Vec<f64>)>) -> Result<Self> {
        let mut dim = 0;
        let mut vectors = HashMap::new();
        for (key, vec) in entries {
            if vec.is_empty() {
                return Err(Error::invalid(format!("embedding {key:?} is empty")));
            }
            if dim == 0 {
                dim = vec.len();
            } else if vec.len() != dim {
                return Err(Error::invalid(format!(
                    "embedding {key:?} has dimension {}, expected {dim}",
                    vec.len()
                )));
            }
            if norm(&vec) == 0.0 {
                return Err(Error::invalid(format!("embedding {key:?} has zero norm")));
            }
            vectors.insert(key, vec);
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    /// Parses the `key<TAB>v1 v2 ... vd` line format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (key, rest) = line.split_once('\t').ok_or_else(|| {
                Error::malformed(line_no, "expected 'key<TAB>values' embedding record")
            })?;
            let mut vec = Vec::new();
            for token in rest.split_whitespace() {
                let v: f64 = token.parse().map_err(|_| {
                    Error::malformed(line_no, format!("invalid embedding value {token:?}"))
                })?;
                vec.push(v);
            }
            entries.push((key.to_string(), vec));
        }
        EmbeddingTable::new(entries)
    }

    /// Loads an embedding table file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        EmbeddingTable::parse(&text)
    }

    /// Looks up a vector, erroring with the missing key's name.
    pub fn get(&self, key: &str) -> Result<&[f64]> {
        self.vectors
            .get(key)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingEmbedding { key: key.into() })
    }

    /// Cosine similarity between the vectors stored under two keys.
    pub fn cosine(&self, key_a: &str, key_b: &str) -> Result<f64> {
        let a = self.get(key_a)?;
        let b = self.get(key_b)?;
        Ok(cosine(a, b))
    }

    /// Number of stored vectors.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// True when the table holds no vectors.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Embedding key for a whole image.
pub fn image_key(image_id: &str) -> String {
    format!("image:{image_id}")
}

/// Embedding key for one object region crop.
pub fn region_key(image_id: &str, instance_id: &str) -> String {
    format!("region:{image_id}/{instance_id}")
}

/// Embedding key for a text string.
pub fn text_key(text: &str) -> String {
    format!("text:{text}")
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity `dot(a, b) / (|a| |b|)`. Callers guarantee nonzero
/// norms (enforced at table construction).
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot / (norm(a) * norm(b))
}

/// Shoelace signed area (positive for counter-clockwise vertex order in a
/// y-up frame; callers use the absolute value).
fn signed_area(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let (x0, y0) = vertices[i];
        let (x1, y1) = vertices[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    acc / 2.0
}

/// Area of a region in square pixels.
pub fn region_area(region: &Region) -> f64 {
    match region {
        Region::Box {
            x_min,
            y_min,
            x_max,
            y_max,
        } => (x_max - x_min) * (y_max - y_min),
        Region::Polygon { vertices } => signed_area(vertices).abs(),
    }
}

/// Area centroid of a region. Errors on a zero-area polygon.
pub fn region_centroid(region: &Region) -> Result<(f64, f64)> {
    match region {
        Region::Box {
            x_min,
            y_min,
            x_max,
            y_max,
        } => Ok(((x_min + x_max) / 2.0, (y_min + y_max) / 2.0)),
        Region::Polygon { vertices } => {
            let area = signed_area(vertices);
            if area == 0.0 {
                return Err(Error::ZeroAreaPolygon);
            }
            let n = vertices.len();
            let (mut cx, mut cy) = (0.0, 0.0);
            for i in 0..n {
                let (x0, y0) = vertices[i];
                let (x1, y1) = vertices[(i + 1) % n];
                let cross = x0 * y1 - x1 * y0;
                cx += (x0 + x1) * cross;
                cy += (y0 + y1) * cross;
            }
            Ok((cx / (6.0 * area), cy / (6.0 * area)))
        }
    }
}

/// The region's lowest image point (largest y; image coordinates are y-down).
pub fn region_lowest_point_y(region: &Region) -> f64 {
    match region {
        Region::Box { y_max, .. } => *y_max,
        Region::Polygon { vertices } => vertices
            .iter()
            .map(|&(_, y)| y)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Inclusive pixel-index span `[lo, hi]` whose centers fall inside the
/// coordinate interval `[min, max]`, or `None` when no center does.
fn pixel_span(min: f64, max: f64) -> Option<(u32, u32)> {
    let lo = (min - 0.5).ceil().max(0.0) as i64;
    let hi = (max - 0.5).floor() as i64;
    if hi < lo {
        None
    } else {
        Some((lo as u32, hi as u32))
    }
}

/// Even-odd rule point-in-polygon test.
fn point_in_polygon(px: f64, py: f64, vertices: &[(f64, f64)]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = vertices[i];
        let (xj, yj) = vertices[j];
        if (yi > py) != (yj > py) {
            let x_cross = xj + (py - yj) * (xi - xj) / (yi - yj);
            if px < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Iterates pixel coordinates whose centers the region covers, clipped to a
/// `width x height` grid. Boxes cover centers within their closed coordinate
/// interval; polygons use the even-odd rule.
pub(crate) fn covered_pixels(region: &Region, width: u32, height: u32) -> Vec<(u32, u32)> {
    let (bx0, by0, bx1, by1) = region.bbox();
    let Some((x_lo, x_hi)) = pixel_span(bx0.max(0.0), bx1.min(width as f64)) else {
        return Vec::new();
    };
    let Some((y_lo, y_hi)) = pixel_span(by0.max(0.0), by1.min(height as f64)) else {
        return Vec::new();
    };
    let mut pixels = Vec::new();
    for y in y_lo..=y_hi.min(height - 1) {
        for x in x_lo..=x_hi.min(width - 1) {
            let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
            let covered = match region {
                Region::Box { .. } => true, // bbox span is exact for boxes
                Region::Polygon { vertices } => point_in_polygon(cx, cy, vertices),
            };
            if covered {
                pixels.push((x, y));
            }
        }
    }
    pixels
}

/// Mean raster depth over the pixel centers the region covers.
///
/// Errors when the region extends past the raster or covers no pixel center.
pub fn region_mean_depth(region: &Region, depth: &DepthRaster) -> Result<f64> {
    let (x0, y0, x1, y1) = region.bbox();
    if x0 < 0.0 || y0 < 0.0 || x1 > depth.width as f64 || y1 > depth.height as f64 {
        return Err(Error::RegionOutOfBounds);
    }
    let pixels = covered_pixels(region, depth.width, depth.height);
    if pixels.is_empty() {
        return Err(Error::EmptyRegionSample);
    }
    let sum: f64 = pixels.iter().map(|&(x, y)| depth.at(x, y)).sum();
    Ok(sum / pixels.len() as f64)
}
