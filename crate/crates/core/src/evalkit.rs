//! Probing-dataset assembly and scoring.
//!
//! Turns extracted knowledge into evaluation samples (with deterministic
//! train/dev/test splits and slot-filled prompts) and scores external
//! prediction files. Metrics are relaxed accuracy (is the most probable
//! label a gold label?), true confidence (how much probability mass lands
//! on gold labels?), and macro-averaged F1 under a threshold decision rule,
//! all reported as percentages, plus a per-cardinality breakdown.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::LabelDistribution;
use crate::error::Error;
use crate::scene::SceneType;
use crate::size::RelationRecord;
use crate::spatial::SpatialKey;
use crate::task::Task;
use crate::Result;

/// Dataset partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::invalid(format!("unknown split {other:?}"))),
        }
    }
}

/// Probe phrasing style: masked zero-shot, finetuning with a classifier
/// token, or multiple-choice question answering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptSetting {
    ZeroShot,
    Finetune,
    Qa,
}

impl PromptSetting {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptSetting::ZeroShot => "zs",
            PromptSetting::Finetune => "ft",
            PromptSetting::Qa => "qa",
        }
    }
}

impl std::str::FromStr for PromptSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zs" => Ok(PromptSetting::ZeroShot),
            "ft" => Ok(PromptSetting::Finetune),
            "qa" => Ok(PromptSetting::Qa),
            other => Err(Error::invalid(format!("unknown prompt setting {other:?}"))),
        }
    }
}

/// Template slots: a lone object, an object pair, or a scene-typed pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleSlots {
    Object {
        object: String,
    },
    Pair {
        first: String,
        second: String,
    },
    ScenePair {
        scene_type: SceneType,
        first: String,
        second: String,
    },
}

/// One probing instance: identifier, task, template slots, gold label set,
/// and split assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalSample {
    pub sample_id: String,
    pub task: Task,
    pub slots: SampleSlots,
    pub gold: BTreeSet<String>,
    pub split: Split,
}

impl EvalSample {
    /// Checks gold labels against the task label space; size golds must be
    /// singletons.
    pub fn validate(&self) -> Result<()> {
        if self.gold.is_empty() {
            return Err(Error::invalid(format!(
                "sample {} has an empty gold set",
                self.sample_id
            )));
        }
        for label in &self.gold {
            if !self.task.label_space().contains(&label.as_str()) {
                return Err(Error::invalid(format!(
                    "sample {}: label {label:?} is outside the {} label space",
                    self.sample_id, self.task
                )));
            }
        }
        if self.task == Task::Size && self.gold.len() != 1 {
            return Err(Error::invalid(format!(
                "sample {}: size golds must be singletons",
                self.sample_id
            )));
        }
        Ok(())
    }

    /// Split key: lone objects key by name; pairs key by the unordered name
    /// pair so a relation and its complement always land in the same split.
    pub fn split_key(&self) -> String {
        match &self.slots {
            SampleSlots::Object { object } => object.clone(),
            SampleSlots::Pair { first, second }
            | SampleSlots::ScenePair { first, second, .. } => {
                if first <= second {
                    format!("{first}|{second}")
                } else {
                    format!("{second}|{first}")
                }
            }
        }
    }
}

/// Default train/dev/test proportions.
pub const DEFAULT_RATIOS: (f64, f64, f64) = (0.2, 0.1, 0.7);

fn check_ratios(ratios: (f64, f64, f64)) -> Result<()> {
    let (a, b, c) = ratios;
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) {
        return Err(Error::invalid("split ratios must be non-negative"));
    }
    if (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "split ratios must sum to 1, got {}",
            a + b + c
        )));
    }
    Ok(())
}

/// Assigns each unique key to a split: keys are sorted, shuffled with a
/// seeded generator, and cut into contiguous train/dev/test slices at
/// cumulatively rounded boundaries (so counts are within one of exact
/// proportion).
pub fn split_keys(
    keys: impl IntoIterator<Item = String>,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<BTreeMap<String, Split>> {
    check_ratios(ratios)?;
    let unique: BTreeSet<String> = keys.into_iter().collect();
    let mut order: Vec<String> = unique.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n = order.len();
    let cut_train = (ratios.0 * n as f64).round() as usize;
    let cut_dev = ((ratios.0 + ratios.1) * n as f64).round() as usize;
    let cut_train = cut_train.min(n);
    let cut_dev = cut_dev.clamp(cut_train, n);

    Ok(order
        .into_iter()
        .enumerate()
        .map(|(i, key)| {
            let split = if i < cut_train {
                Split::Train
            } else if i < cut_dev {
                Split::Dev
            } else {
                Split::Test
            };
            (key, split)
        })
        .collect())
}

/// Splits samples in place by their [`EvalSample::split_key`].
pub fn assign_splits(
    samples: &mut [EvalSample],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<()> {
    let assignment = split_keys(samples.iter().map(|s| s.split_key()), ratios, seed)?;
    for sample in samples.iter_mut() {
        sample.split = assignment[&sample.split_key()];
    }
    Ok(())
}

/// One sample per object: gold set = its typical colors.
pub fn color_samples(typical: &BTreeMap<String, LabelDistribution>) -> Vec<EvalSample> {
    typical
        .iter()
        .map(|(object, dist)| EvalSample {
            sample_id: format!("color:{object}"),
            task: Task::Color,
            slots: SampleSlots::Object {
                object: object.clone(),
            },
            gold: dist.probs.keys().cloned().collect(),
            split: Split::Test,
        })
        .collect()
}

/// One sample per directed relation record: gold is the majority relation
/// as seen from the subject.
pub fn size_samples(records: &[RelationRecord]) -> Vec<EvalSample> {
    records
        .iter()
        .map(|record| EvalSample {
            sample_id: format!("size:{}|{}", record.subject, record.object),
            task: Task::Size,
            slots: SampleSlots::Pair {
                first: record.subject.clone(),
                second: record.object.clone(),
            },
            gold: BTreeSet::from([record.relation.as_str().to_string()]),
            split: Split::Test,
        })
        .collect()
}

/// One sample per scene-typed pair: gold set = its typical relations.
pub fn spatial_samples(
    typical: &BTreeMap<SpatialKey, LabelDistribution>,
) -> Vec<EvalSample> {
    typical
        .iter()
        .map(|((scene_type, subject, object), dist)| EvalSample {
            sample_id: format!("spatial:{scene_type}|{subject}|{object}"),
            task: Task::Spatial,
            slots: SampleSlots::ScenePair {
                scene_type: *scene_type,
                first: subject.clone(),
                second: object.clone(),
            },
            gold: dist.probs.keys().cloned().collect(),
            split: Split::Test,
        })
        .collect()
}

/// A slot-filled prompt ready for an external probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptRecord {
    pub sample_id: String,
    pub task: Task,
    pub split: Split,
    pub prompt: String,
    pub gold: BTreeSet<String>,
}

fn lettered_choices(task: Task) -> String {
    task.label_space()
        .iter()
        .enumerate()
        .map(|(i, label)| format!(" ({}) {label}", char::from(b'a' + i as u8)))
        .collect()
}

fn fill_template(task: Task, setting: PromptSetting, slots: &SampleSlots) -> Result<String> {
    use PromptSetting::*;
    let prompt = match (task, slots) {
        (Task::Color, SampleSlots::Object { object }) => match setting {
            ZeroShot => format!("{object} is of [MASK] color"),
            Finetune => format!("[CLS] color of {object}"),
            Qa => format!("What is the color of {object}?{}", lettered_choices(task)),
        },
        (Task::Size, SampleSlots::Pair { first, second }) => match setting {
            ZeroShot => format!("{first} is [MASK] than {second} in size"),
            Finetune => format!("[CLS] size of {first} in comparison to {second}"),
            Qa => format!(
                "what is the size of {first} in comparison to {second}?{}",
                lettered_choices(task)
            ),
        },
        (
            Task::Spatial,
            SampleSlots::ScenePair {
                scene_type,
                first,
                second,
            },
        ) => match setting {
            ZeroShot => format!("in a {scene_type}, the {first} is located [MASK] the {second}"),
            Finetune => format!(
                "[CLS] in a {scene_type}, the {first} is located in comparison to {second}"
            ),
            Qa => format!(
                "in a {scene_type}, where is {first} is located in comparison to {second}?{}",
                lettered_choices(task)
            ),
        },
        _ => {
            return Err(Error::invalid(format!(
                "sample slots do not fit the {task} task"
            )))
        }
    };
    Ok(prompt)
}

/// Fills the task/setting template for each sample. All samples must belong
/// to `task`. Under the zero-shot setting the spatial task is restricted to
/// samples whose gold set fits within `{above, below}` (single-token
/// masking cannot express `similar`); such samples are silently skipped.
pub fn emit_prompts(
    task: Task,
    setting: PromptSetting,
    samples: &[EvalSample],
) -> Result<Vec<PromptRecord>> {
    let mut out = Vec::new();
    for sample in samples {
        if sample.task != task {
            return Err(Error::invalid(format!(
                "sample {} belongs to task {}, not {task}",
                sample.sample_id, sample.task
            )));
        }
        sample.validate()?;
        if task == Task::Spatial && setting == PromptSetting::ZeroShot {
            let binary = sample
                .gold
                .iter()
                .all(|label| label == "above" || label == "below");
            if !binary {
                continue;
            }
        }
        out.push(PromptRecord {
            sample_id: sample.sample_id.clone(),
            task,
            split: sample.split,
            prompt: fill_template(task, setting, &sample.slots)?,
            gold: sample.gold.clone(),
        });
    }
    Ok(out)
}

/// Serializes prompt records as `sample_id<TAB>prompt<TAB>gold` with gold
/// labels comma-joined in sorted order.
pub fn prompts_to_text(records: &[PromptRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let gold: Vec<&str> = record.gold.iter().map(String::as_str).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            record.sample_id,
            record.prompt,
            gold.join(",")
        ));
    }
    out
}

/// Reads `(sample_id, gold set)` pairs from a tab-separated prompt file,
/// taking the first column as the identifier and the last as the gold
/// labels (so both the plain and the extended prompt layout parse).
pub fn parse_golds(text: &str) -> Result<Vec<(String, BTreeSet<String>)>> {
    let mut out: Vec<(String, BTreeSet<String>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            return Err(Error::malformed(line_no, "expected at least two columns"));
        }
        let sample_id = fields[0].to_string();
        if !seen.insert(sample_id.clone()) {
            return Err(Error::malformed(
                line_no,
                format!("duplicate sample id {sample_id:?}"),
            ));
        }
        let gold: BTreeSet<String> = fields[fields.len() - 1]
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if gold.is_empty() {
            return Err(Error::malformed(line_no, "empty gold set"));
        }
        out.push((sample_id, gold));
    }
    Ok(out)
}

/// Loads gold records from a file on disk.
pub fn load_golds(path: &Path) -> Result<Vec<(String, BTreeSet<String>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_golds(&text)
}

/// One external prediction: a probability distribution over task labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub probs: BTreeMap<String, f64>,
}

/// Parses `sample_id<TAB>label:prob ...` prediction lines.
pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRecord>> {
    let mut out: Vec<PredictionRecord> = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (sample_id, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(line_no, "expected 'sample_id<TAB>label:prob ...'"))?;
        if !seen.insert(sample_id.to_string()) {
            return Err(Error::malformed(
                line_no,
                format!("duplicate sample id {sample_id:?}"),
            ));
        }
        let mut probs = BTreeMap::new();
        for pair in rest.split_whitespace() {
            let (label, prob) = pair
                .split_once(':')
                .ok_or_else(|| Error::malformed(line_no, format!("invalid pair {pair:?}")))?;
            let prob: f64 = prob
                .parse()
                .map_err(|_| Error::malformed(line_no, format!("invalid probability {prob:?}")))?;
            if probs.insert(label.to_string(), prob).is_some() {
                return Err(Error::malformed(
                    line_no,
                    format!("duplicate label {label:?}"),
                ));
            }
        }
        if probs.is_empty() {
            return Err(Error::malformed(line_no, "prediction has no labels"));
        }
        out.push(PredictionRecord {
            sample_id: sample_id.to_string(),
            probs,
        });
    }
    Ok(out)
}

/// Loads predictions from a file on disk.
pub fn load_predictions(path: &Path) -> Result<Vec<PredictionRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text)
}

/// Per-gold-cardinality metric slice.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityBucket {
    pub n_samples: usize,
    pub r_acc: f64,
    pub conf: f64,
}

/// Scored metrics, all as percentages in `[0, 100]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub n_samples: usize,
    pub r_acc: f64,
    pub conf: f64,
    pub macro_f1: f64,
    pub per_cardinality: BTreeMap<usize, CardinalityBucket>,
}

fn validate_prediction(task: Task, pred: &PredictionRecord) -> Result<()> {
    let space = task.label_space();
    let mut sum = 0.0;
    for (label, &p) in &pred.probs {
        if !space.contains(&label.as_str()) {
            return Err(Error::invalid(format!(
                "prediction {}: label {label:?} is outside the {task} label space",
                pred.sample_id
            )));
        }
        if !p.is_finite() || p < 0.0 {
            return Err(Error::invalid(format!(
                "prediction {}: probability for {label:?} must be finite and non-negative",
                pred.sample_id
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "prediction {}: probabilities sum to {sum}, expected 1",
            pred.sample_id
        )));
    }
    Ok(())
}

/// Scores predictions against gold label sets.
///
/// - relaxed accuracy: a sample counts as correct when any most-probable
///   label (all of them, under ties) is in the gold set;
/// - confidence: mean probability mass the prediction puts on gold labels;
/// - macro-F1: unweighted mean of per-class binary F1 over the whole label
///   space, where a class is "predicted" when its probability reaches
///   `f1_threshold` (default: one over the label-space size); a class with
///   no predictions and no gold occurrences scores zero.
///
/// Every gold sample must have exactly one prediction and vice versa.
pub fn score(
    task: Task,
    golds: &[(String, BTreeSet<String>)],
    preds: &[PredictionRecord],
    f1_threshold: Option<f64>,
) -> Result<MetricsReport> {
    if golds.is_empty() {
        return Err(Error::invalid("no samples to score"));
    }
    let space = task.label_space();
    let threshold = match f1_threshold {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => {
            return Err(Error::invalid(format!(
                "f1 threshold must be finite and non-negative, got {t}"
            )))
        }
        None => 1.0 / space.len() as f64,
    };

    let mut by_id: BTreeMap<&str, &PredictionRecord> = BTreeMap::new();
    for pred in preds {
        if by_id.insert(pred.sample_id.as_str(), pred).is_some() {
            return Err(Error::invalid(format!(
                "duplicate prediction for sample {}",
                pred.sample_id
            )));
        }
    }

    let mut correct = 0usize;
    let mut conf_total = 0.0;
    // Per class: (true positives, false positives, false negatives).
    let mut per_class: BTreeMap<&str, (u64, u64, u64)> =
        space.iter().map(|&l| (l, (0, 0, 0))).collect();
    let mut buckets: BTreeMap<usize, (usize, usize, f64)> = BTreeMap::new();

    for (sample_id, gold) in golds {
        let pred = by_id.remove(sample_id.as_str()).ok_or_else(|| {
            Error::invalid(format!("missing prediction for sample {sample_id}"))
        })?;
        validate_prediction(task, pred)?;
        if gold.is_empty() {
            return Err(Error::invalid(format!("sample {sample_id}: empty gold set")));
        }
        for label in gold {
            if !space.contains(&label.as_str()) {
                return Err(Error::invalid(format!(
                    "sample {sample_id}: gold label {label:?} is outside the {task} label space"
                )));
            }
        }

        let top = pred
            .probs
            .values()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let hit = pred
            .probs
            .iter()
            .any(|(label, &p)| p == top && gold.contains(label));
        if hit {
            correct += 1;
        }

        let conf: f64 = gold
            .iter()
            .map(|label| pred.probs.get(label).copied().unwrap_or(0.0))
            .sum();
        conf_total += conf;

        for &label in space {
            let predicted = pred.probs.get(label).copied().unwrap_or(0.0) >= threshold;
            let in_gold = gold.contains(label);
            let entry = per_class.get_mut(label).unwrap();
            match (predicted, in_gold) {
                (true, true) => entry.0 += 1,
                (true, false) => entry.1 += 1,
                (false, true) => entry.2 += 1,
                (false, false) => {}
            }
        }

        let bucket = buckets.entry(gold.len()).or_insert((0, 0, 0.0));
        bucket.0 += 1;
        bucket.1 += usize::from(hit);
        bucket.2 += conf;
    }
    if let Some((extra, _)) = by_id.into_iter().next() {
        return Err(Error::invalid(format!(
            "prediction for unknown sample {extra}"
        )));
    }

    let n = golds.len();
    let f1_sum: f64 = per_class
        .values()
        .map(|&(tp, fp, fn_)| {
            let denom = 2 * tp + fp + fn_;
            if denom == 0 {
                0.0
            } else {
                2.0 * tp as f64 / denom as f64
            }
        })
        .sum();

    Ok(MetricsReport {
        n_samples: n,
        r_acc: 100.0 * correct as f64 / n as f64,
        conf: 100.0 * conf_total / n as f64,
        macro_f1: 100.0 * f1_sum / space.len() as f64,
        per_cardinality: buckets
            .into_iter()
            .map(|(card, (count, hits, conf))| {
                (
                    card,
                    CardinalityBucket {
                        n_samples: count,
                        r_acc: 100.0 * hits as f64 / count as f64,
                        conf: 100.0 * conf / count as f64,
                    },
                )
            })
            .collect(),
    })
}

/// Buckets samples by gold cardinality and reports relaxed accuracy and
/// confidence per bucket.
pub fn cardinality_breakdown(
    task: Task,
    golds: &[(String, BTreeSet<String>)],
    preds: &[PredictionRecord],
) -> Result<BTreeMap<usize, CardinalityBucket>> {
    Ok(score(task, golds, preds, None)?.per_cardinality)
}

/// Renders a human-readable metrics table.
pub fn report_to_text(report: &MetricsReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("samples   {}\n", report.n_samples));
    out.push_str(&format!("R-Acc     {:.2}\n", report.r_acc));
    out.push_str(&format!("Conf      {:.2}\n", report.conf));
    out.push_str(&format!("macro-F1  {:.2}\n", report.macro_f1));
    if !report.per_cardinality.is_empty() {
        out.push_str("|T|  samples  R-Acc   Conf\n");
        for (card, bucket) in &report.per_cardinality {
            out.push_str(&format!(
                "{:<4} {:<8} {:<7.2} {:.2}\n",
                card, bucket.n_samples, bucket.r_acc, bucket.conf
            ));
        }
    }
    out
}

/// Renders machine-readable metric lines (`name<TAB>value...`), full
/// precision.
pub fn report_to_records(report: &MetricsReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("n_samples\t{}\n", report.n_samples));
    out.push_str(&format!("r_acc\t{}\n", report.r_acc));
    out.push_str(&format!("conf\t{}\n", report.conf));
    out.push_str(&format!("macro_f1\t{}\n", report.macro_f1));
    for (card, bucket) in &report.per_cardinality {
        out.push_str(&format!(
            "cardinality\t{card}\t{}\t{}\t{}\n",
            bucket.n_samples, bucket.r_acc, bucket.conf
        ));
    }
    out
}
