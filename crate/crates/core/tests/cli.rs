use std::path::Path;
use std::process::Command;

use qsem::cli::run;

const SENTENCE: &str = "President Reagan ignorant of the arms scandal\n";

fn call(store: &Path, args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["qsem".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--store".into());
    argv.push(store.display().to_string());
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn built() -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("tiny.txt");
    std::fs::write(&corpus, SENTENCE).unwrap();
    let store = dir.path().join("store");
    let (code, _, err) = call(&store, &["build", "--corpus", corpus.to_str().unwrap(), "--l", "5"]);
    assert_eq!(code, 0, "{err}");
    (dir, store)
}

#[test]
fn vector_lists_top_associates() {
    let (_dir, store) = built();
    let (code, out, _) = call(&store, &["vector", "--word", "scandal", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "arms (5)\nthe (4)\n");
    let (_, tsv, _) = call(&store, &["vector", "--word", "scandal", "--k", "2", "--output", "tsv"]);
    assert_eq!(tsv, "arms\t5\nthe\t4\n");
}

#[test]
fn unknown_word_is_a_data_error() {
    let (_dir, store) = built();
    let (code, out, err) = call(&store, &["vector", "--word", "notaword"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("notaword"), "{err}");
    let (code, _, err) = call(&store, &["collapse", "--word", "reagan", "--context", "iran"]);
    assert_eq!(code, 2);
    assert!(err.contains("iran"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = call(dir.path(), &["frobnicate"]);
    assert_eq!(code, 1);
    assert!(out.is_empty() && !err.is_empty());
    let (code, _, _) = call(dir.path(), &["vector", "--word", "x", "--bogus"]);
    assert_eq!(code, 1);
    let (code, _, err) = call(&dir.path().join("empty"), &["vector", "--word", "x"]);
    assert_eq!(code, 1, "{err}");
    let (code, out, _) = call(dir.path(), &["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("collapse"));
}

#[test]
fn mixture_space_scales_window_counts() {
    let (dir, store) = built();
    let corpus = dir.path().join("tiny.txt");
    let (code, _, _) = call(
        &store,
        &["build", "--corpus", corpus.to_str().unwrap(), "--space", "mixture"],
    );
    assert_eq!(code, 0);
    let (_, out, _) = call(&store, &["vector", "--word", "scandal", "--k", "2"]);
    assert_eq!(out, "arms (30)\nthe (24)\n");
}

#[test]
fn eigen_collapse_compare_info() {
    let (_dir, store) = built();
    let (code, out, _) = call(
        &store,
        &["eigen", "--word", "reagan", "--states", "2", "--components", "3"],
    );
    assert_eq!(code, 0);
    assert!(out.starts_with("1: "), "{out}");
    let (_, tsv, _) = call(
        &store,
        &["eigen", "--word", "reagan", "--states", "2", "--output", "tsv"],
    );
    assert!(tsv.lines().all(|l| l.split('\t').count() == 3));

    for mode in ["operator", "projector", "column"] {
        let (code, out, err) = call(
            &store,
            &[
                "collapse",
                "--word",
                "reagan",
                "--context",
                "arms",
                "--mode",
                mode,
                "--k",
                "3",
            ],
        );
        assert_eq!(code, 0, "{mode}: {err}");
        assert_eq!(out.lines().count(), 4, "{out}");
    }
    let (_, out, _) = call(
        &store,
        &[
            "collapse",
            "--word",
            "reagan",
            "--context",
            "arms",
            "--mode",
            "column",
            "--output",
            "tsv",
        ],
    );
    assert!(out.lines().next().unwrap().contains('\t'));

    let (code, out, _) = call(
        &store,
        &["compare", "--word", "reagan", "--context", "arms,scandal", "--k", "2"],
    );
    assert_eq!(code, 0);
    assert!(out.contains("gains:") && out.contains("losses:"));

    let (code, out, _) = call(&store, &["info"]);
    assert_eq!(code, 0);
    assert_eq!(out, "kind: space\nvocabulary: 7\nprovenance: global\nentries: 20\n");
}

#[test]
fn outputs_are_repeatable() {
    let (_dir, store) = built();
    let args = [
        "collapse",
        "--word",
        "reagan",
        "--context",
        "the",
        "--mode",
        "projector",
        "--output",
        "tsv",
    ];
    let first = call(&store, &args);
    assert_eq!(first, call(&store, &args));
}

#[test]
fn space_writes_requested_archive() {
    let (dir, store) = built();
    let out_path = dir.path().join("arms.qsem");
    let (code, _, _) = call(
        &store,
        &["space", "--word", "arms", "--out", out_path.to_str().unwrap()],
    );
    assert_eq!(code, 0);
    let (_, info, _) = call(
        &store,
        &["info", "--archive", out_path.to_str().unwrap(), "--output", "tsv"],
    );
    assert_eq!(info, "space\t7\tcentered arms 5\t20\n");
}

#[test]
fn binary_exit_codes() {
    let (_dir, store) = built();
    let bin = env!("CARGO_BIN_EXE_qsem");
    let ok = Command::new(bin)
        .args(["vector", "--word", "scandal", "--k", "1", "--store"])
        .arg(&store)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "arms (5)\n");
    let bad = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let missing = Command::new(bin)
        .args(["vector", "--word", "notaword", "--store"])
        .arg(&store)
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
