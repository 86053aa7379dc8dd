//! End-to-end tests driving the `visknow` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use visknow_core::scene::{save_scenes, ObjectInstance, Region, Scene, SceneType};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_visknow"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning visknow")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "visknow {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

/// Generates a small mixed synthetic corpus and returns its directory.
fn synth_corpus(dir: &Path, seed: u64, scenes: usize) -> PathBuf {
    let corpus = dir.join("corpus");
    run_ok(&[
        "synth",
        "generate",
        "--seed",
        &seed.to_string(),
        "--scenes",
        &scenes.to_string(),
        "--profile",
        "mixed",
        "--out-dir",
        corpus.to_str().unwrap(),
    ]);
    corpus
}

#[test]
fn help_exits_zero_on_every_subcommand() {
    let commands: &[&[&str]] = &[
        &[],
        &["ingest"],
        &["ingest", "validate"],
        &["subtype"],
        &["subtype", "collect"],
        &["subtype", "select"],
        &["extract"],
        &["extract", "color"],
        &["extract", "size"],
        &["extract", "spatial"],
        &["labels"],
        &["labels", "typicalize"],
        &["dataset"],
        &["dataset", "split"],
        &["prompts"],
        &["prompts", "emit"],
        &["eval"],
        &["eval", "score"],
        &["eval", "breakdown"],
        &["synth"],
        &["synth", "generate"],
        &["pipeline"],
        &["pipeline", "run"],
    ];
    for command in commands {
        let mut args: Vec<&str> = command.to_vec();
        args.push("--help");
        let out = run(&args);
        assert!(out.status.success(), "--help failed for {command:?}");
    }
}

#[test]
fn unknown_flags_exit_with_usage_code() {
    let out = run(&["eval", "score", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["definitely-not-a-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_score_matches_the_frozen_fixture() {
    let golds = fixture("metrics_golds.tsv");
    let preds = fixture("metrics_preds.tsv");
    let table = run_ok(&[
        "eval", "score", "--task", "color", "--golds", &golds, "--preds", &preds,
    ]);
    assert!(table.contains("samples   20"), "{table}");
    assert!(table.contains("R-Acc     75.00"), "{table}");
    assert!(table.contains("Conf      65.70"), "{table}");
    assert!(table.contains("macro-F1  73.85"), "{table}");

    let records = run_ok(&[
        "eval", "score", "--task", "color", "--golds", &golds, "--preds", &preds, "--records",
    ]);
    assert!(records.contains("r_acc\t75\n"), "{records}");

    let breakdown = run_ok(&[
        "eval",
        "breakdown",
        "--task",
        "color",
        "--golds",
        &golds,
        "--preds",
        &preds,
    ]);
    assert!(breakdown.contains("cardinality\t3\t2\t100\t87.5"), "{breakdown}");
}

#[test]
fn dataset_split_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 300, 6);
    let out = dir.path().join("run");
    run_ok(&[
        "pipeline",
        "run",
        "--scenes",
        &corpus.join("scenes.jsonl").display().to_string(),
        "--colors",
        &corpus.join("colors.tsv").display().to_string(),
        "--min-support",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);

    let splits_a = dir.path().join("splits_a.tsv");
    let splits_b = dir.path().join("splits_b.tsv");
    for path in [&splits_a, &splits_b] {
        run_ok(&[
            "dataset",
            "split",
            "--typical",
            &out.join("typical_labels.tsv").display().to_string(),
            "--size-relations",
            &out.join("size_relations.tsv").display().to_string(),
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    let text_a = read(&splits_a);
    assert_eq!(text_a, read(&splits_b));
    assert!(!text_a.is_empty());

    let other_seed = dir.path().join("splits_c.tsv");
    run_ok(&[
        "dataset",
        "split",
        "--typical",
        &out.join("typical_labels.tsv").display().to_string(),
        "--size-relations",
        &out.join("size_relations.tsv").display().to_string(),
        "--seed",
        "8",
        "--out",
        other_seed.to_str().unwrap(),
    ]);
    assert_ne!(text_a, read(&other_seed), "different seeds should reshuffle");
}

#[test]
fn missing_depth_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 500, 2);
    let scenes = corpus.join("scenes.jsonl");
    let victim = visknow_core::scene::load_scenes(&scenes).unwrap()[0]
        .depth_ref
        .clone();
    std::fs::remove_file(corpus.join(&victim)).unwrap();

    let out = run(&[
        "extract",
        "size",
        "--scenes",
        scenes.to_str().unwrap(),
        "--out",
        dir.path().join("size.tsv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&victim), "stderr does not name {victim}: {stderr}");
}

#[test]
fn stagewise_runs_equal_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 40, 8);
    let scenes = corpus.join("scenes.jsonl").display().to_string();
    let colors = corpus.join("colors.tsv").display().to_string();
    let depth_dir = corpus.display().to_string();

    let piped = dir.path().join("piped");
    run_ok(&[
        "pipeline",
        "run",
        "--scenes",
        &scenes,
        "--colors",
        &colors,
        "--gamma",
        "2",
        "--min-support",
        "2",
        "--seed",
        "11",
        "--out",
        piped.to_str().unwrap(),
    ]);

    let staged = dir.path().join("staged");
    let annotated = staged.join("annotated_scenes.jsonl").display().to_string();
    run_ok(&["subtype", "select", "--scenes", &scenes, "--out", &annotated]);
    run_ok(&[
        "extract",
        "color",
        "--observations",
        &colors,
        "--out",
        &staged.join("color_dists.tsv").display().to_string(),
    ]);
    run_ok(&[
        "extract",
        "size",
        "--scenes",
        &annotated,
        "--depth-dir",
        &depth_dir,
        "--gamma",
        "2",
        "--min-support",
        "2",
        "--out",
        &staged.join("size_relations.tsv").display().to_string(),
    ]);
    run_ok(&[
        "extract",
        "spatial",
        "--scenes",
        &annotated,
        "--depth-dir",
        &depth_dir,
        "--out",
        &staged.join("spatial_dists.tsv").display().to_string(),
    ]);
    run_ok(&[
        "labels",
        "typicalize",
        "--color-dists",
        &staged.join("color_dists.tsv").display().to_string(),
        "--spatial-dists",
        &staged.join("spatial_dists.tsv").display().to_string(),
        "--out",
        &staged.join("typical_labels.tsv").display().to_string(),
    ]);
    run_ok(&[
        "prompts",
        "emit",
        "--typical",
        &staged.join("typical_labels.tsv").display().to_string(),
        "--size-relations",
        &staged.join("size_relations.tsv").display().to_string(),
        "--seed",
        "11",
        "--five-col",
        "--out",
        &staged.join("prompts.tsv").display().to_string(),
    ]);

    for name in [
        "annotated_scenes.jsonl",
        "color_dists.tsv",
        "size_relations.tsv",
        "spatial_dists.tsv",
        "typical_labels.tsv",
        "prompts.tsv",
    ] {
        assert_eq!(
            read(&piped.join(name)),
            read(&staged.join(name)),
            "{name} differs between pipeline and stage-by-stage runs"
        );
    }
}

#[test]
fn config_file_supplies_values_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 700, 4);
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!(
            "scenes = {:?}\ncolors = {:?}\nmin_support = 2\nseed = 3\nout = {:?}\n",
            corpus.join("scenes.jsonl").display().to_string(),
            corpus.join("colors.tsv").display().to_string(),
            dir.path().join("from_config").display().to_string(),
        ),
    )
    .unwrap();

    run_ok(&["pipeline", "run", "--config", config.to_str().unwrap()]);
    let manifest = read(&dir.path().join("from_config/manifest.json"));
    assert!(manifest.contains("\"seed\": 3"), "{manifest}");

    let flag_out = dir.path().join("from_flag");
    run_ok(&[
        "pipeline",
        "run",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        flag_out.to_str().unwrap(),
    ]);
    let manifest = read(&flag_out.join("manifest.json"));
    assert!(manifest.contains("\"seed\": 9"), "flag should win: {manifest}");
}

#[test]
fn out_dir_env_var_is_the_default() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 900, 2);
    let env_out = dir.path().join("env_out");
    let out = bin()
        .args([
            "pipeline",
            "run",
            "--scenes",
            &corpus.join("scenes.jsonl").display().to_string(),
            "--min-support",
            "2",
        ])
        .env("VISKNOW_OUT", &env_out)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(env_out.join("manifest.json").exists());
}

#[test]
fn failed_pipeline_leaves_a_marker() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 40, 2);
    let scenes = visknow_core::scene::load_scenes(corpus.join("scenes.jsonl")).unwrap();
    std::fs::remove_file(corpus.join(&scenes[1].depth_ref)).unwrap();

    let out_dir = dir.path().join("broken");
    let out = run(&[
        "pipeline",
        "run",
        "--scenes",
        &corpus.join("scenes.jsonl").display().to_string(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let marker = read(&out_dir.join("pipeline.failed"));
    assert!(marker.contains(&scenes[1].depth_ref), "{marker}");

    // A later successful run clears the marker.
    let fixed = synth_corpus(&dir.path().join("fixed_root"), 40, 2);
    let out = run(&[
        "pipeline",
        "run",
        "--scenes",
        &fixed.join("scenes.jsonl").display().to_string(),
        "--min-support",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!out_dir.join("pipeline.failed").exists());
}

#[test]
fn subtype_collect_and_select_flow_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let scene = Scene {
        image_id: "img1".to_string(),
        width: 64,
        height: 64,
        scene_type: Some(SceneType::Kitchen),
        objects: vec![ObjectInstance {
            instance_id: "o1".to_string(),
            name: "sink".to_string(),
            subtype: None,
            region: Region::Box {
                x_min: 10.0,
                y_min: 10.0,
                x_max: 30.0,
                y_max: 30.0,
            },
        }],
        depth_ref: "img1.depth".to_string(),
    };
    let scenes_path = dir.path().join("scenes.jsonl");
    save_scenes(&scenes_path, &[scene]).unwrap();
    let raster = "DR1 64 64\n".to_string() + &"5.0 ".repeat(64 * 64);
    std::fs::write(dir.path().join("img1.depth"), raster).unwrap();
    std::fs::write(dir.path().join("phrases.txt"), "kitchen sink\nbath towel\n").unwrap();
    std::fs::write(dir.path().join("kb.tsv"), "basin\tsink\n").unwrap();
    // The image favors "kitchen sink" over the anchor; the region favors it
    // over "basin".
    std::fs::write(
        dir.path().join("emb.tsv"),
        "image:img1\t1 0\nregion:img1/o1\t1 0\ntext:sink\t0 1\ntext:kitchen sink\t1 0\ntext:basin\t0.5 0.5\n",
    )
    .unwrap();

    let candidates = dir.path().join("candidates.tsv");
    run_ok(&[
        "subtype",
        "collect",
        "--phrases",
        dir.path().join("phrases.txt").to_str().unwrap(),
        "--kb",
        dir.path().join("kb.tsv").to_str().unwrap(),
        "--scenes",
        scenes_path.to_str().unwrap(),
        "--out",
        candidates.to_str().unwrap(),
    ]);
    assert_eq!(read(&candidates), "sink\tbasin,kitchen sink\n");

    let annotated = dir.path().join("annotated.jsonl");
    run_ok(&[
        "subtype",
        "select",
        "--scenes",
        scenes_path.to_str().unwrap(),
        "--candidates",
        candidates.to_str().unwrap(),
        "--embeddings",
        dir.path().join("emb.tsv").to_str().unwrap(),
        "--out",
        annotated.to_str().unwrap(),
    ]);
    let scenes = visknow_core::scene::load_scenes(&annotated).unwrap();
    assert_eq!(scenes[0].objects[0].subtype.as_deref(), Some("kitchen sink"));
}

#[test]
fn ingest_validate_reports_counts_and_rejects_bad_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 60, 3);
    let stdout = run_ok(&[
        "ingest",
        "validate",
        "--scenes",
        &corpus.join("scenes.jsonl").display().to_string(),
        "--observations",
        &corpus.join("colors.tsv").display().to_string(),
    ]);
    assert!(stdout.contains("scenes       3"), "{stdout}");

    // Truncate one raster to a 1x1 grid: dimensions no longer match.
    let scenes = visknow_core::scene::load_scenes(corpus.join("scenes.jsonl")).unwrap();
    std::fs::write(corpus.join(&scenes[0].depth_ref), "DR1 1 1\n6.0\n").unwrap();
    let out = run(&[
        "ingest",
        "validate",
        "--scenes",
        &corpus.join("scenes.jsonl").display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&scenes[0].image_id), "{stderr}");
}

#[test]
fn pipeline_is_parallelism_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_corpus(dir.path(), 1200, 6);
    let scenes = corpus.join("scenes.jsonl").display().to_string();
    let colors = corpus.join("colors.tsv").display().to_string();

    let mut digests: BTreeMap<String, String> = BTreeMap::new();
    for jobs in ["1", "4"] {
        let out = dir.path().join(format!("jobs{jobs}"));
        run_ok(&[
            "pipeline",
            "run",
            "--scenes",
            &scenes,
            "--colors",
            &colors,
            "--min-support",
            "2",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        digests.insert(jobs.to_string(), read(&out.join("manifest.json")));
    }
    assert_eq!(digests["1"], digests["4"]);
}
