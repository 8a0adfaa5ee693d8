use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semhash_core::augment::Thesaurus;
use semhash_core::corpus::{load_dataset, Split};
use semhash_core::model::{ModelArtifact, Provenance};
use semhash_core::pipeline::{augment_training, train_pipeline, NoopObserver};
use semhash_core::ClassifierKind;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_semhash"));
    cmd.env_remove("SEMHASH_THESAURUS")
        .env_remove("SEMHASH_CORPUS_DIR");
    cmd
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn train_model(dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("model.shm");
    let corpus = fixtures().join("toy.json");
    let mut args = vec![
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--classifier",
        "passive_aggressive",
        "--seed",
        "0",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn featurize_shows_subtokens() {
    let o = run(&["featurize", "I have a flying disk"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.contains("normalized: -PRON- have a flying disk"),
        "{text}"
    );
    assert!(text.contains("#ha hav ave ve#"), "{text}");

    let o = run(&["featurize", ""]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("features: 0"));

    let o = run(&["featurize", "--json", "have"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["words"][0]["subtokens"],
        serde_json::json!(["#ha", "hav", "ave", "ve#"])
    );
}

#[test]
fn bench_single_cell() {
    let dir = fixtures();
    let o = run(&[
        "bench",
        "--corpus-dir",
        dir.to_str().unwrap(),
        "--datasets",
        "toy",
        "--classifiers",
        "ridge",
        "--runs",
        "1",
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cells = v["datasets"]["toy"]["cells"].as_object().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells["ridge"]["variance"], 0.0);
}

#[test]
fn bench_input_errors_exit_1() {
    let dir = fixtures();
    let o = run(&[
        "bench",
        "--corpus-dir",
        dir.to_str().unwrap(),
        "--datasets",
        "toy",
        "--classifiers",
        "forest",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("linear_svc"), "{}", stderr(&o));

    let o = run(&[
        "bench",
        "--corpus-dir",
        dir.to_str().unwrap(),
        "--datasets",
        "nope",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not found"));

    let o = run(&["bench", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_check_failure_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let mut corpus: Value =
        serde_json::from_str(&fs::read_to_string(fixtures().join("toy.json")).unwrap()).unwrap();
    for s in corpus["sentences"].as_array_mut().unwrap() {
        if s["training"] == false {
            s["intent"] = "Unseen Intent".into();
        }
    }
    fs::write(tmp.path().join("chatbot.json"), corpus.to_string()).unwrap();
    let report = tmp.path().join("report.json");
    let o = run(&[
        "bench",
        "--corpus-dir",
        tmp.path().to_str().unwrap(),
        "--datasets",
        "chatbot",
        "--classifiers",
        "ridge,nearest_centroid",
        "--runs",
        "2",
        "--check",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL [3]"));
    assert!(report.is_file());
    assert!(tmp.path().join("report.txt").is_file());
}

#[test]
fn train_then_predict() {
    let tmp = tempfile::tempdir().unwrap();
    let model = train_model(tmp.path(), &[]);
    let artifact = ModelArtifact::load(&model).unwrap();
    assert!(artifact.provenance.augmented);
    assert_eq!(artifact.provenance.thesaurus.as_deref(), Some("builtin"));

    let dataset = load_dataset(fixtures().join("toy.json"), "toy").unwrap();
    let test = dataset.split(Split::Test);
    let input: String = test.iter().map(|s| format!("{}\n", s.text)).collect();
    let o = run_with_stdin(&["predict", "--model", model.to_str().unwrap()], &input);
    assert!(o.status.success(), "{}", stderr(&o));
    let labels: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(labels.len(), test.len());
    for (label, sample) in labels.iter().zip(&test) {
        assert_eq!(label, artifact.predict(&sample.text).unwrap());
    }

    let o = run_with_stdin(
        &["predict", "--model", model.to_str().unwrap(), "--scores"],
        "next conection to the airprt\n",
    );
    assert!(o.status.success());
    let line = stdout(&o);
    let fields: Vec<&str> = line.trim_end().split('\t').collect();
    assert_eq!(fields.len(), 1 + artifact.class_names.len());
    assert!(artifact.class_names.iter().any(|c| c == fields[0]));

    let o = run_with_stdin(&["predict", "--model", model.to_str().unwrap()], "");
    assert!(o.status.success());
    assert!(o.stdout.is_empty());

    let file = tmp.path().join("input.txt");
    fs::write(&file, "delete my account\n").unwrap();
    let o = run(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        file.to_str().unwrap(),
    ]);
    assert_eq!(
        stdout(&o).trim(),
        artifact.predict("delete my account").unwrap()
    );
}

#[test]
fn train_flags_reach_provenance() {
    let tmp = tempfile::tempdir().unwrap();
    let model = train_model(tmp.path(), &["--no-augment"]);
    let artifact = ModelArtifact::load(&model).unwrap();
    assert!(!artifact.provenance.augmented);
    assert_eq!(artifact.provenance.thesaurus, None);

    let lexicon = tmp.path().join("my.tsv");
    fs::write(&lexicon, "delete\tv\tdrop,wipe\naccount\tn\tprofile\n").unwrap();
    let model = train_model(tmp.path(), &["--thesaurus", lexicon.to_str().unwrap()]);
    let artifact = ModelArtifact::load(&model).unwrap();
    assert_eq!(
        artifact.provenance.thesaurus.as_deref(),
        Some(lexicon.to_str().unwrap())
    );
}

#[test]
fn training_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = ModelArtifact::load(train_model(a.path(), &[])).unwrap();
    let mb = ModelArtifact::load(train_model(b.path(), &[])).unwrap();
    assert_eq!(ma.feature_space, mb.feature_space);
    assert_eq!(ma.classifier, mb.classifier);
}

#[test]
fn roundtrip_predictions_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = load_dataset(fixtures().join("toy.json"), "toy").unwrap();
    let words: Vec<&str> = dataset
        .samples
        .iter()
        .flat_map(|s| s.text.split_whitespace())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let sentences: Vec<String> = (0..100)
        .map(|_| {
            let n = rng.gen_range(1..8);
            (0..n)
                .map(|_| *words.choose(&mut rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();

    let train = dataset.split(Split::Train);
    for kind in ClassifierKind::ALL {
        let augmented =
            augment_training(&train, Some(Thesaurus::builtin()), 1, &NoopObserver).unwrap();
        let pipeline =
            train_pipeline(&augmented, &kind.default_params(), 1, &NoopObserver).unwrap();
        let before = ModelArtifact::new(
            pipeline,
            Provenance {
                corpus: "toy".into(),
                seed: 1,
                created_unix: 0,
                augmented: true,
                thesaurus: Some("builtin".into()),
                params: kind.default_params(),
            },
        );
        let path = tmp.path().join(format!("{kind}.shm"));
        before.save(&path).unwrap();
        let after = ModelArtifact::load(&path).unwrap();
        for s in &sentences {
            assert_eq!(
                before.scores(s).unwrap(),
                after.scores(s).unwrap(),
                "{kind}"
            );
            assert_eq!(before.predict(s).unwrap(), after.predict(s).unwrap());
        }
    }
}

#[test]
fn predict_rejects_other_versions() {
    let tmp = tempfile::tempdir().unwrap();
    let model = train_model(tmp.path(), &["--no-augment"]);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&model).unwrap()).unwrap();
    v["format_version"] = 7.into();
    fs::write(&model, v.to_string()).unwrap();
    let o = run_with_stdin(&["predict", "--model", model.to_str().unwrap()], "hello\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("version"));
}

#[test]
fn closed_stdout_is_not_an_error() {
    let mut child = bin()
        .args(["featurize", "--json", &"word ".repeat(20_000)])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!stderr(&o).contains("panicked"));
}
