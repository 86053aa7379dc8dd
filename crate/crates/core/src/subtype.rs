//! Contextual subtype selection.
//!
//! Annotators name objects with context-free nouns (`sink`), but a scene
//! often shows a specific subtype (`kitchen sink`). Selection runs in two
//! stages over precomputed embeddings:
//!
//! 1. keep the candidates that describe the image better than the bare
//!    object name does (`cos(text:c, image) > cos(text:o, image)`), always
//!    keeping the name itself as anchor;
//! 2. pick the candidate closest to the object's region crop
//!    (`argmax cos(region, text:c)`), breaking ties lexically.
//!
//! Candidate vocabularies come from head-word matching over a noun-phrase
//! list plus optional knowledge-base `is-a` edges.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::Error;
use crate::scene::{image_key, is_head_of, region_key, text_key, EmbeddingTable, Scene};
use crate::Result;

/// An `is-a` edge: `child` is a kind of `parent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbEdge {
    pub child: String,
    pub parent: String,
}

/// Parses `child<TAB>parent` edge records.
pub fn parse_kb_edges(text: &str) -> Result<Vec<KbEdge>> {
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (child, parent) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(idx + 1, "expected 'child<TAB>parent' edge"))?;
        edges.push(KbEdge {
            child: child.trim().to_lowercase(),
            parent: parent.trim().to_lowercase(),
        });
    }
    Ok(edges)
}

/// Loads a knowledge-base edge file.
pub fn load_kb_edges(path: impl AsRef<Path>) -> Result<Vec<KbEdge>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_kb_edges(&text)
}

/// Candidate subtypes per object name. Candidates are lowercase,
/// deduplicated, and never equal to the name itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateMap {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl CandidateMap {
    /// An empty map: every object falls back to its context-free name.
    pub fn empty() -> Self {
        CandidateMap::default()
    }

    /// Candidate set for an object name, if any were collected.
    pub fn candidates(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.map.get(name)
    }

    /// Adds one candidate, ignoring self-candidates.
    pub fn add(&mut self, name: &str, candidate: &str) {
        if candidate != name {
            self.map
                .entry(name.to_string())
                .or_default()
                .insert(candidate.to_string());
        }
    }

    /// Iterates `(name, candidates)` pairs in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.map.iter()
    }

    /// Serializes as `name<TAB>candidate,candidate,...` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, cands) in &self.map {
            out.push_str(name);
            out.push('\t');
            out.push_str(&cands.iter().cloned().collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the `name<TAB>candidates` line format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = CandidateMap::empty();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (name, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::malformed(idx + 1, "expected 'name<TAB>candidates'"))?;
            map.map.entry(name.to_string()).or_default();
            for cand in rest.split(',') {
                let cand = cand.trim();
                if !cand.is_empty() {
                    map.add(name, cand);
                }
            }
        }
        Ok(map)
    }

    /// Loads a candidate map file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CandidateMap::parse(&text)
    }
}

/// Result of candidate collection: the map plus how many noun phrases were
/// skipped as unparseable (empty after trimming).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateCollection {
    pub map: CandidateMap,
    pub skipped_phrases: usize,
}

/// Builds the candidate vocabulary for each object name.
///
/// A phrase is a candidate for a name when the name is its head: the phrase's
/// final whitespace tokens equal the name's tokens but the phrase is longer.
/// Knowledge-base children of a name are candidates regardless of wording.
pub fn collect_candidates(
    phrases: &[String],
    kb_edges: &[KbEdge],
    names: &BTreeSet<String>,
) -> CandidateCollection {
    let mut map = CandidateMap::empty();
    let mut skipped = 0usize;
    let names: BTreeSet<String> = names.iter().map(|n| n.trim().to_lowercase()).collect();

    for phrase in phrases {
        let phrase = phrase.trim().to_lowercase();
        if phrase.is_empty() {
            skipped += 1;
            continue;
        }
        // Normalize interior whitespace so token matching is well defined.
        let phrase = phrase.split_whitespace().collect::<Vec<_>>().join(" ");
        for name in &names {
            if phrase != *name && is_head_of(name, &phrase) {
                map.add(name, &phrase);
            }
        }
    }
    for edge in kb_edges {
        if names.contains(&edge.parent) && !edge.child.is_empty() {
            map.add(&edge.parent, &edge.child);
        }
    }
    CandidateCollection {
        map,
        skipped_phrases: skipped,
    }
}

/// Stage one: keeps candidates that fit the image better than the bare name,
/// plus the name itself as anchor. The comparison is strict, so candidates
/// tying the anchor's image similarity are dropped.
pub fn filter_candidates(
    name: &str,
    candidates: &BTreeSet<String>,
    embeddings: &EmbeddingTable,
    image_id: &str,
) -> Result<BTreeSet<String>> {
    let image = image_key(image_id);
    let anchor_sim = embeddings.cosine(&text_key(name), &image)?;
    let mut kept = BTreeSet::new();
    for cand in candidates {
        if embeddings.cosine(&text_key(cand), &image)? > anchor_sim {
            kept.insert(cand.clone());
        }
    }
    kept.insert(name.to_string());
    Ok(kept)
}

/// Stage two: picks the filtered candidate whose text embedding is closest to
/// the object's region crop. Ties go to the lexically smaller candidate.
pub fn select_subtype(
    filtered: &BTreeSet<String>,
    embeddings: &EmbeddingTable,
    image_id: &str,
    instance_id: &str,
) -> Result<String> {
    if filtered.is_empty() {
        return Err(Error::invalid("candidate set for selection is empty"));
    }
    let region = region_key(image_id, instance_id);
    let mut best: Option<(f64, &str)> = None;
    // BTreeSet iterates in ascending order, so keeping strictly-better
    // candidates resolves ties toward the lexically smaller one.
    for cand in filtered {
        let sim = embeddings.cosine(&region, &text_key(cand))?;
        if best.map_or(true, |(best_sim, _)| sim > best_sim) {
            best = Some((sim, cand));
        }
    }
    Ok(best.unwrap().1.to_string())
}

/// Annotates every object in a scene with its contextual subtype. Objects
/// without collected candidates keep their context-free name and need no
/// embeddings.
pub fn annotate_scene(
    scene: &Scene,
    candidates: &CandidateMap,
    embeddings: &EmbeddingTable,
) -> Result<Scene> {
    let mut annotated = scene.clone();
    for obj in &mut annotated.objects {
        let subtype = match candidates.candidates(&obj.name) {
            None => obj.name.clone(),
            Some(cands) if cands.is_empty() => obj.name.clone(),
            Some(cands) => {
                let filtered = filter_candidates(&obj.name, cands, embeddings, &scene.image_id)?;
                select_subtype(&filtered, embeddings, &scene.image_id, &obj.instance_id)?
            }
        };
        obj.subtype = Some(subtype);
    }
    Ok(annotated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{ObjectInstance, Region};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn names(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn set(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn head_matching_collects_suffix_phrases() {
        let out = collect_candidates(
            &["kitchen sink".into(), "sink".into()],
            &[],
            &names(&["sink"]),
        );
        assert_eq!(out.map.candidates("sink"), Some(&set(&["kitchen sink"])));
        assert_eq!(out.skipped_phrases, 0);
    }

    #[test]
    fn kb_edges_contribute_candidates_without_suffix_match() {
        let edges = parse_kb_edges("lavatory\tsink\nbath towel\ttowel\n").unwrap();
        let out = collect_candidates(&[], &edges, &names(&["sink", "towel"]));
        assert_eq!(out.map.candidates("sink"), Some(&set(&["lavatory"])));
        assert_eq!(out.map.candidates("towel"), Some(&set(&["bath towel"])));
    }

    #[test]
    fn blank_phrases_are_skipped_and_counted() {
        let out = collect_candidates(
            &["  ".into(), "".into(), "desk chair".into()],
            &[],
            &names(&["chair"]),
        );
        assert_eq!(out.skipped_phrases, 2);
        assert_eq!(out.map.candidates("chair"), Some(&set(&["desk chair"])));
    }

    #[test]
    fn multi_token_names_match_full_suffix() {
        let out = collect_candidates(
            &["swivel desk chair".into(), "desk chair".into(), "high chair".into()],
            &[],
            &names(&["desk chair", "chair"]),
        );
        assert_eq!(
            out.map.candidates("desk chair"),
            Some(&set(&["swivel desk chair"]))
        );
        // "chair" heads all three phrases.
        assert_eq!(
            out.map.candidates("chair"),
            Some(&set(&["desk chair", "high chair", "swivel desk chair"]))
        );
    }

    /// Independent oracle: string-level suffix check with a space guard.
    fn oracle_is_candidate(name: &str, phrase: &str) -> bool {
        phrase != name && phrase.ends_with(&format!(" {name}"))
    }

    #[test]
    fn collection_matches_string_suffix_oracle_on_random_phrases() {
        let adjectives = ["red", "small", "wooden", "office", "kitchen", "folding"];
        let nouns = ["chair", "desk chair", "sink", "lamp", "towel rack"];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut phrases = Vec::new();
            for _ in 0..rng.gen_range(1..12) {
                let mut phrase = String::new();
                for _ in 0..rng.gen_range(0..3) {
                    phrase.push_str(adjectives[rng.gen_range(0..adjectives.len())]);
                    phrase.push(' ');
                }
                phrase.push_str(nouns[rng.gen_range(0..nouns.len())]);
                phrases.push(phrase);
            }
            let name_set = names(&nouns);
            let out = collect_candidates(&phrases, &[], &name_set);
            for name in &name_set {
                let expected: BTreeSet<String> = phrases
                    .iter()
                    .filter(|p| oracle_is_candidate(name, p))
                    .cloned()
                    .collect();
                let actual = out.map.candidates(name).cloned().unwrap_or_default();
                assert_eq!(actual, expected, "name {name:?} phrases {phrases:?}");
            }
        }
    }

    fn table(entries: &[(&str, &[f64])]) -> EmbeddingTable {
        EmbeddingTable::new(
            entries
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn empty_candidate_set_filters_to_anchor() {
        let emb = table(&[("text:sink", &[1.0, 0.0]), ("image:img1", &[0.5, 0.5])]);
        let kept = filter_candidates("sink", &BTreeSet::new(), &emb, "img1").unwrap();
        assert_eq!(kept, set(&["sink"]));
    }

    #[test]
    fn filter_keeps_candidates_beating_the_anchor() {
        let emb = table(&[
            ("image:img1", &[0.0, 1.0]),
            ("text:sink", &[1.0, 0.0]),          // cos 0 with image
            ("text:kitchen sink", &[0.6, 0.8]),  // cos 0.8
            ("text:pedestal sink", &[1.0, 0.0]), // cos 0, not better
        ]);
        let kept = filter_candidates(
            "sink",
            &set(&["kitchen sink", "pedestal sink"]),
            &emb,
            "img1",
        )
        .unwrap();
        assert_eq!(kept, set(&["kitchen sink", "sink"]));
    }

    #[test]
    fn filter_is_strict_on_ties() {
        // Candidate embedding equals the anchor's, so similarities tie and
        // the candidate is dropped.
        let emb = table(&[
            ("image:img1", &[0.3, 0.7]),
            ("text:sink", &[1.0, 1.0]),
            ("text:mock sink", &[2.0, 2.0]),
        ]);
        let kept = filter_candidates("sink", &set(&["mock sink"]), &emb, "img1").unwrap();
        assert_eq!(kept, set(&["sink"]));
    }

    #[test]
    fn filter_errors_name_the_missing_key() {
        let emb = table(&[("image:img1", &[1.0, 0.0]), ("text:sink", &[1.0, 0.0])]);
        let err = filter_candidates("sink", &set(&["kitchen sink"]), &emb, "img1")
            .unwrap_err()
            .to_string();
        assert!(err.contains("text:kitchen sink"), "{err}");
    }

    #[test]
    fn select_picks_region_nearest_candidate() {
        let emb = table(&[
            ("region:img1/o1", &[0.9, 0.1]),
            ("text:sink", &[0.0, 1.0]),
            ("text:kitchen sink", &[1.0, 0.0]),
        ]);
        let chosen = select_subtype(&set(&["kitchen sink", "sink"]), &emb, "img1", "o1").unwrap();
        assert_eq!(chosen, "kitchen sink");
    }

    #[test]
    fn select_breaks_ties_lexically() {
        // 3-4-5 style vectors have exact integer norms, so every cosine here
        // is exactly 1.0 and the tie is genuine down to the last bit.
        let emb = table(&[
            ("region:img1/o1", &[3.0, 4.0]),
            ("text:bath towel", &[6.0, 8.0]),
            ("text:beach towel", &[3.0, 4.0]),
            ("text:towel", &[9.0, 12.0]),
        ]);
        // All three tie at cosine 1.
        let chosen = select_subtype(
            &set(&["towel", "bath towel", "beach towel"]),
            &emb,
            "img1",
            "o1",
        )
        .unwrap();
        assert_eq!(chosen, "bath towel");
    }

    #[test]
    fn select_on_singleton_returns_it() {
        let emb = table(&[("region:img1/o1", &[1.0, 0.0]), ("text:sink", &[0.5, 0.5])]);
        assert_eq!(
            select_subtype(&set(&["sink"]), &emb, "img1", "o1").unwrap(),
            "sink"
        );
    }

    fn scene_with(names: &[&str]) -> Scene {
        Scene {
            image_id: "img1".into(),
            width: 100,
            height: 100,
            scene_type: None,
            objects: names
                .iter()
                .enumerate()
                .map(|(i, name)| ObjectInstance {
                    instance_id: format!("o{}", i + 1),
                    name: name.to_string(),
                    subtype: None,
                    region: Region::Box {
                        x_min: 10.0 * i as f64,
                        y_min: 0.0,
                        x_max: 10.0 * i as f64 + 5.0,
                        y_max: 5.0,
                    },
                })
                .collect(),
            depth_ref: "img1.dr1".into(),
        }
    }

    #[test]
    fn annotate_falls_back_to_name_without_candidates() {
        let scene = scene_with(&["mirror"]);
        let annotated =
            annotate_scene(&scene, &CandidateMap::empty(), &table(&[("x", &[1.0])])).unwrap();
        assert_eq!(annotated.objects[0].subtype.as_deref(), Some("mirror"));
    }

    #[test]
    fn annotate_selects_subtypes_per_object() {
        let mut cands = CandidateMap::empty();
        cands.add("sink", "kitchen sink");
        let emb = table(&[
            ("image:img1", &[0.0, 1.0]),
            ("text:sink", &[1.0, 0.0]),
            ("text:kitchen sink", &[0.6, 0.8]),
            ("region:img1/o1", &[0.7, 0.7]),
        ]);
        let scene = scene_with(&["sink", "mirror"]);
        let annotated = annotate_scene(&scene, &cands, &emb).unwrap();
        assert_eq!(annotated.objects[0].subtype.as_deref(), Some("kitchen sink"));
        assert_eq!(annotated.objects[1].subtype.as_deref(), Some("mirror"));
    }

    #[test]
    fn candidate_map_text_round_trips() {
        let mut map = CandidateMap::empty();
        map.add("sink", "kitchen sink");
        map.add("sink", "pedestal sink");
        map.add("towel", "bath towel");
        let text = map.to_text();
        assert_eq!(CandidateMap::parse(&text).unwrap(), map);
    }

    proptest! {
        // The anchor name always survives filtering, whatever the embeddings.
        #[test]
        fn anchor_always_survives_filter(
            img in proptest::collection::vec(-1.0f64..1.0, 3),
            anchor in proptest::collection::vec(-1.0f64..1.0, 3),
            cand in proptest::collection::vec(-1.0f64..1.0, 3),
        ) {
            prop_assume!(img.iter().any(|&v| v != 0.0));
            prop_assume!(anchor.iter().any(|&v| v != 0.0));
            prop_assume!(cand.iter().any(|&v| v != 0.0));
            let emb = EmbeddingTable::new([
                ("image:i".to_string(), img),
                ("text:sink".to_string(), anchor),
                ("text:kitchen sink".to_string(), cand),
            ]).unwrap();
            let kept = filter_candidates("sink", &set(&["kitchen sink"]), &emb, "i").unwrap();
            prop_assert!(kept.contains("sink"));
        }

        // Rescaling any embedding by a positive scalar changes no decision.
        // Powers of two scale exactly in floating point, so even tied
        // similarities stay tied.
        #[test]
        fn decisions_are_scale_invariant(
            img in proptest::collection::vec(-1.0f64..1.0, 3),
            anchor in proptest::collection::vec(-1.0f64..1.0, 3),
            cand in proptest::collection::vec(-1.0f64..1.0, 3),
            region in proptest::collection::vec(-1.0f64..1.0, 3),
            exp in -2i32..4,
        ) {
            let scale = 2.0f64.powi(exp);
            prop_assume!(img.iter().any(|&v| v.abs() > 1e-6));
            prop_assume!(anchor.iter().any(|&v| v.abs() > 1e-6));
            prop_assume!(cand.iter().any(|&v| v.abs() > 1e-6));
            prop_assume!(region.iter().any(|&v| v.abs() > 1e-6));
            let base = EmbeddingTable::new([
                ("image:i".to_string(), img.clone()),
                ("text:sink".to_string(), anchor.clone()),
                ("text:kitchen sink".to_string(), cand.clone()),
                ("region:i/o1".to_string(), region.clone()),
            ]).unwrap();
            let scaled = EmbeddingTable::new([
                ("image:i".to_string(), img),
                ("text:sink".to_string(), anchor),
                ("text:kitchen sink".to_string(), cand.iter().map(|v| v * scale).collect()),
                ("region:i/o1".to_string(), region),
            ]).unwrap();
            let cands = set(&["kitchen sink"]);
            let kept_a = filter_candidates("sink", &cands, &base, "i").unwrap();
            let kept_b = filter_candidates("sink", &cands, &scaled, "i").unwrap();
            prop_assert_eq!(&kept_a, &kept_b);
            let sel_a = select_subtype(&kept_a, &base, "i", "o1").unwrap();
            let sel_b = select_subtype(&kept_b, &scaled, "i", "o1").unwrap();
            prop_assert_eq!(sel_a, sel_b);
        }
    }
}
