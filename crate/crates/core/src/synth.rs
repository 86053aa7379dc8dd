//! Synthetic scene generation with known ground truth.
//!
//! Builds small 3D scenes (named boxes with true sizes, elevations, and
//! depths), projects them through a pinhole camera into annotated 2D scenes
//! with matching depth rasters, and derives oracle relations from the world
//! coordinates. Because the truth is known exactly, these scenes verify the
//! extraction pipeline end to end: perceived-size clustering should recover
//! the true area ordering, and depth-partitioned elevation extraction should
//! recover the true elevation relations that naive image-plane comparison
//! distorts.
//!
//! Two sampling profiles are built in: a size profile (areas in well
//! separated tiers, wide depth spread) and a spatial profile (elevations in
//! well separated tiers, narrow depth spread so windows stay tight).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::color::{canonicalize_color, BasicColor, ColorObservation};
use crate::error::Error;
use crate::scene::{covered_pixels, DepthRaster, ObjectInstance, Region, Scene, SceneType};
use crate::size::SizeRelation;
use crate::spatial::{SpatialObservation, SpatialRelation};
use crate::Result;
use std::collections::BTreeSet;

/// Pinhole camera: world units on the left, pixels on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraConfig {
    /// Focal length in world units; objects must sit beyond it.
    pub focal: f64,
    /// Pixel pitch of the image plane: pixels per world unit.
    pub pixels_per_unit: f64,
    pub width: u32,
    pub height: u32,
}

impl Default for CameraConfig {
    fn default() -> Self {
        CameraConfig {
            focal: 2.0,
            pixels_per_unit: 128.0,
            width: 256,
            height: 256,
        }
    }
}

impl CameraConfig {
    /// Focal length expressed in pixels.
    pub fn focal_px(&self) -> f64 {
        self.focal * self.pixels_per_unit
    }

    /// Projects a world-space box (centred at `x`/`elevation`, facing the
    /// camera at `depth`) into image coordinates. World y grows upward,
    /// image y grows downward.
    pub fn project(&self, object: &SynthObject) -> Region {
        let f = self.focal_px();
        let cx = self.width as f64 / 2.0 + f * object.x / object.depth;
        let cy = self.height as f64 / 2.0 - f * object.elevation / object.depth;
        let half_w = f * object.true_width / object.depth / 2.0;
        let half_h = f * object.true_height / object.depth / 2.0;
        Region::Box {
            x_min: cx - half_w,
            y_min: cy - half_h,
            x_max: cx + half_w,
            y_max: cy + half_h,
        }
    }
}

/// One synthetic object in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthObject {
    pub name: String,
    /// Frontal extent in world units.
    pub true_width: f64,
    pub true_height: f64,
    /// Lateral offset of the centre from the optical axis.
    pub x: f64,
    /// Height of the centre above the world ground plane.
    pub elevation: f64,
    /// Distance from the camera along the optical axis.
    pub depth: f64,
    /// Raw color strings this object emits as observations.
    pub color_terms: Vec<String>,
}

impl SynthObject {
    pub fn frontal_area(&self) -> f64 {
        self.true_width * self.true_height
    }
}

/// World-coordinate ground truth for one generated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub scene_type: SceneType,
    pub objects: Vec<SynthObject>,
    /// Elevation gap below which objects count as level.
    pub margin: f64,
    /// Relative area slack below which objects count as same-sized.
    pub epsilon: f64,
}

/// A generated scene bundle: annotation, raster, and truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthScene {
    pub scene: Scene,
    pub depth: DepthRaster,
    pub truth: GroundTruth,
}

/// Sampling regime for object parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthProfile {
    /// Frontal areas in five tiers separated 4x; depths spread widely so
    /// projected areas are dominated by distance, not true size.
    Size,
    /// Elevations in three well separated tiers; depths kept within a narrow
    /// band so every depth window is tight.
    Spatial,
}

/// Generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub profile: SynthProfile,
    pub n_objects: usize,
    pub scene_type: SceneType,
    pub camera: CameraConfig,
    pub margin: f64,
    pub epsilon: f64,
    /// Placement attempts per object before giving up.
    pub max_retries: usize,
}

pub const DEFAULT_MARGIN: f64 = 0.1;
pub const DEFAULT_EPSILON: f64 = 0.05;

impl SynthConfig {
    pub fn size_profile(scene_type: SceneType) -> SynthConfig {
        SynthConfig {
            profile: SynthProfile::Size,
            n_objects: 8,
            scene_type,
            camera: CameraConfig::default(),
            margin: DEFAULT_MARGIN,
            epsilon: DEFAULT_EPSILON,
            max_retries: 1000,
        }
    }

    pub fn spatial_profile(scene_type: SceneType) -> SynthConfig {
        SynthConfig {
            profile: SynthProfile::Spatial,
            n_objects: 6,
            scene_type,
            camera: CameraConfig::default(),
            margin: DEFAULT_MARGIN,
            epsilon: DEFAULT_EPSILON,
            max_retries: 1000,
        }
    }
}

/// Side lengths of the five square size tiers; areas are 4x apart.
const SIZE_TIER_SIDES: [f64; 5] = [0.06, 0.12, 0.24, 0.48, 0.96];
/// Elevation tiers for the spatial profile, 0.9 world units apart.
const ELEVATION_TIERS: [f64; 3] = [0.6, 1.5, 2.4];

const OBJECT_NAMES: [&str; 8] = [
    "crate", "lamp", "stool", "vase", "chair", "shelf", "basket", "plant",
];

/// Raw color vocabulary sampled for observations; includes alias and
/// multi-word terms so the canonicalizer is exercised downstream.
const COLOR_TERMS: [&str; 10] = [
    "maroon",
    "navy blue",
    "golden",
    "grass green",
    "beige",
    "charcoal grey",
    "snow white",
    "peach",
    "teal",
    "violet",
];

fn boxes_apart(a: &Region, b: &Region) -> bool {
    let (ax0, ay0, ax1, ay1) = a.bbox();
    let (bx0, by0, bx1, by1) = b.bbox();
    // A one-pixel gap on some axis keeps covered pixel sets disjoint.
    ax1 + 1.0 <= bx0 || bx1 + 1.0 <= ax0 || ay1 + 1.0 <= by0 || by1 + 1.0 <= ay0
}

fn in_frame(region: &Region, camera: &CameraConfig) -> bool {
    let (x0, y0, x1, y1) = region.bbox();
    x0 >= 0.0 && y0 >= 0.0 && x1 <= camera.width as f64 && y1 <= camera.height as f64
}

fn sample_object(
    rng: &mut ChaCha8Rng,
    profile: SynthProfile,
    index: usize,
) -> (f64, f64, f64, f64, f64) {
    match profile {
        SynthProfile::Size => {
            let side = SIZE_TIER_SIDES[index % SIZE_TIER_SIDES.len()]
                * rng.gen_range(0.995..1.005);
            let depth = rng.gen_range(5.0..7.0);
            let x = rng.gen_range(-1.6..1.6);
            let elevation = rng.gen_range(-1.0..1.0);
            (side, side, x, elevation, depth)
        }
        SynthProfile::Spatial => {
            let width = rng.gen_range(0.5..0.9);
            let height = rng.gen_range(0.5..0.9);
            let depth = rng.gen_range(6.0..6.6);
            let x = rng.gen_range(-2.4..2.4);
            let elevation =
                ELEVATION_TIERS[index % ELEVATION_TIERS.len()] + rng.gen_range(-0.02..0.02);
            (width, height, x, elevation, depth)
        }
    }
}

/// Generates one scene: sampled world objects (resampled on frame overflow
/// or box overlap, up to the retry bound), pinhole-projected annotations,
/// and a depth raster painted with the nearest covering object
/// (background = deepest object + 1).
pub fn generate_scene(seed: u64, config: &SynthConfig) -> Result<SynthScene> {
    if config.n_objects < 2 {
        return Err(Error::invalid("need at least two objects"));
    }
    if config.n_objects > OBJECT_NAMES.len() {
        return Err(Error::invalid(format!(
            "at most {} objects per scene",
            OBJECT_NAMES.len()
        )));
    }
    if config.camera.focal <= 0.0 || config.camera.pixels_per_unit <= 0.0 {
        return Err(Error::invalid("camera parameters must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let image_id = format!("synth-{seed:010}");
    let mut objects: Vec<SynthObject> = Vec::new();
    let mut regions: Vec<Region> = Vec::new();

    for index in 0..config.n_objects {
        let mut placed = false;
        for _ in 0..config.max_retries {
            let (true_width, true_height, x, elevation, depth) =
                sample_object(&mut rng, config.profile, index);
            if depth <= config.camera.focal {
                continue;
            }
            let candidate = SynthObject {
                name: OBJECT_NAMES[index].to_string(),
                true_width,
                true_height,
                x,
                elevation,
                depth,
                color_terms: vec![COLOR_TERMS[rng.gen_range(0..COLOR_TERMS.len())].to_string()],
            };
            let region = config.camera.project(&candidate);
            if !in_frame(&region, &config.camera) {
                continue;
            }
            if regions.iter().any(|other| !boxes_apart(&region, other)) {
                continue;
            }
            objects.push(candidate);
            regions.push(region);
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::invalid(format!(
                "could not place object {index} within {} attempts",
                config.max_retries
            )));
        }
    }

    let background = objects
        .iter()
        .map(|o| o.depth)
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    let mut values = vec![background; (config.camera.width * config.camera.height) as usize];
    for (object, region) in objects.iter().zip(&regions) {
        for (px, py) in covered_pixels(region, config.camera.width, config.camera.height) {
            let idx = (py * config.camera.width + px) as usize;
            if object.depth < values[idx] {
                values[idx] = object.depth;
            }
        }
    }

    let scene = Scene {
        image_id: image_id.clone(),
        width: config.camera.width,
        height: config.camera.height,
        scene_type: Some(config.scene_type),
        objects: objects
            .iter()
            .zip(&regions)
            .enumerate()
            .map(|(i, (object, region))| ObjectInstance {
                instance_id: format!("{image_id}-o{i}"),
                name: object.name.clone(),
                subtype: None,
                region: region.clone(),
            })
            .collect(),
        depth_ref: format!("{image_id}.depth"),
    };
    scene.check()?;

    Ok(SynthScene {
        scene,
        depth: DepthRaster {
            width: config.camera.width,
            height: config.camera.height,
            values,
            inverted: false,
        },
        truth: GroundTruth {
            scene_type: config.scene_type,
            objects,
            margin: config.margin,
            epsilon: config.epsilon,
        },
    })
}

/// Oracle relations computed from world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRelations {
    /// Directed size relations for unordered pairs listed in object order;
    /// pairs within the epsilon slack are omitted.
    pub size: Vec<(String, SizeRelation, String)>,
    /// One elevation relation per unordered pair.
    pub spatial: Vec<SpatialObservation>,
}

/// Derives the true relations: `a` is smaller than `b` when its frontal
/// area falls short of `b`'s by more than the epsilon slack, and above `b`
/// when its elevation exceeds `b`'s by more than the margin.
pub fn oracle_relations(truth: &GroundTruth) -> OracleRelations {
    let mut size = Vec::new();
    let mut spatial = Vec::new();
    for (i, a) in truth.objects.iter().enumerate() {
        for b in truth.objects.iter().skip(i + 1) {
            if a.name == b.name {
                continue;
            }
            let (area_a, area_b) = (a.frontal_area(), b.frontal_area());
            if area_a < area_b * (1.0 - truth.epsilon) {
                size.push((a.name.clone(), SizeRelation::Smaller, b.name.clone()));
            } else if area_b < area_a * (1.0 - truth.epsilon) {
                size.push((a.name.clone(), SizeRelation::Larger, b.name.clone()));
            }

            let relation = if a.elevation - b.elevation > truth.margin {
                SpatialRelation::Above
            } else if b.elevation - a.elevation > truth.margin {
                SpatialRelation::Below
            } else {
                SpatialRelation::Similar
            };
            spatial.push(SpatialObservation {
                scene_type: truth.scene_type,
                subject: a.name.clone(),
                object: b.name.clone(),
                relation,
            });
        }
    }
    OracleRelations { size, spatial }
}

/// One raw color observation per object, keyed by object name.
pub fn color_observations(truth: &GroundTruth) -> Vec<ColorObservation> {
    truth
        .objects
        .iter()
        .flat_map(|object| {
            object.color_terms.iter().map(|term| ColorObservation {
                object_key: object.name.clone(),
                raw_text: term.clone(),
            })
        })
        .collect()
}

/// True canonical color sets per object name.
pub fn oracle_colors(truth: &GroundTruth) -> Vec<(String, BTreeSet<BasicColor>)> {
    truth
        .objects
        .iter()
        .map(|object| {
            let mut colors = BTreeSet::new();
            for term in &object.color_terms {
                colors.extend(canonicalize_color(term).0);
            }
            (object.name.clone(), colors)
        })
        .collect()
}

/// The depth-distortion regression fixture: four objects at the same true
/// elevation, laddered in depth so that consecutive objects share a depth
/// window (and read correctly as `similar`) while the wide pairs do not.
/// Naive image-plane comparison misreads the wide pairs as `above` because
/// perspective lifts nearer objects in the frame; the partitioned pipeline
/// recovers `similar` through bridge objects. All true pairwise relations
/// are `similar`.
pub fn distortion_fixture() -> SynthScene {
    let camera = CameraConfig::default();
    let names = ["bottle", "jar", "can", "mug"];
    // Depth range 1.8 puts window edges at 9.45 / 9.9 / 10.35; these depths
    // sit well inside membership bands {0}, {0,1}, {1,2}, {2}.
    let depths = [9.0, 9.54, 10.17, 10.8];
    let xs = [-1.5, -0.5, 0.5, 1.5];
    let objects: Vec<SynthObject> = (0..4)
        .map(|i| SynthObject {
            name: names[i].to_string(),
            true_width: 0.4,
            true_height: 0.4,
            x: xs[i],
            elevation: 2.0,
            depth: depths[i],
            color_terms: vec!["teal".to_string()],
        })
        .collect();
    let regions: Vec<Region> = objects.iter().map(|o| camera.project(o)).collect();
    let background = 10.8 + 1.0;
    let mut values = vec![background; (camera.width * camera.height) as usize];
    for (object, region) in objects.iter().zip(&regions) {
        for (px, py) in covered_pixels(region, camera.width, camera.height) {
            let idx = (py * camera.width + px) as usize;
            if object.depth < values[idx] {
                values[idx] = object.depth;
            }
        }
    }
    let image_id = "synth-distortion".to_string();
    let scene = Scene {
        image_id: image_id.clone(),
        width: camera.width,
        height: camera.height,
        scene_type: Some(SceneType::Kitchen),
        objects: objects
            .iter()
            .zip(&regions)
            .enumerate()
            .map(|(i, (object, region))| ObjectInstance {
                instance_id: format!("{image_id}-o{i}"),
                name: object.name.clone(),
                subtype: None,
                region: region.clone(),
            })
            .collect(),
        depth_ref: format!("{image_id}.depth"),
    };
    SynthScene {
        scene,
        depth: DepthRaster {
            width: camera.width,
            height: camera.height,
            values,
            inverted: false,
        },
        truth: GroundTruth {
            scene_type: SceneType::Kitchen,
            objects,
            margin: DEFAULT_MARGIN,
            epsilon: DEFAULT_EPSILON,
        },
    }
}
