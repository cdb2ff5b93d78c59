//! End-to-end checks of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_consisteval"));
    cmd.current_dir(env!("CARGO_MANIFEST_DIR"));
    cmd
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("score"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().args(["score", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("--frobnicate"));
}

#[test]
fn selfcheck_passes_for_any_thread_count() {
    for threads in ["1", "2", "5"] {
        let out = bin().args(["selfcheck", "--threads", threads]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "threads={threads}");
        assert!(stdout_str(&out).contains("PASS"));
    }
}

#[test]
fn score_on_fixture_files_reproduces_golden_bytes() {
    let golden = std::fs::read_to_string(fixture("golden_report.json")).unwrap();
    let out = bin()
        .args([
            "score",
            "--corpus",
            "fixtures/toy_corpus.jsonl",
            "--lex-st",
            "fixtures/toy_lex_st.tsv",
            "--lex-ts",
            "fixtures/toy_lex_ts.tsv",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    assert_eq!(stdout_str(&out), golden);
}

#[test]
fn score_is_identical_for_every_thread_count() {
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let out = bin()
            .args([
                "score",
                "--corpus",
                "fixtures/toy_corpus.jsonl",
                "--lex-st",
                "fixtures/toy_lex_st.tsv",
                "--lex-ts",
                "fixtures/toy_lex_ts.tsv",
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        outputs.push(stdout_str(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn rerunning_from_config_echo_reproduces_report() {
    let first = bin()
        .args([
            "score",
            "--corpus",
            "fixtures/toy_corpus.jsonl",
            "--metrics",
            "charcut,wer,combined",
            "--charcut-min-len",
            "4",
            "--charcut-case-sensitive",
            "--marker-pattern",
            r"\[[^\]]*\]",
            "--seed",
            "99",
        ])
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr_str(&first));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&first)).unwrap();
    let config = &report["config"];

    // Reconstruct the command line from nothing but the config block.
    let metrics: Vec<String> = config["metrics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m.as_str().unwrap().to_owned())
        .collect();
    let accuracy = &config["charcut_accuracy"];
    let mut args = vec![
        "score".to_owned(),
        "--corpus".to_owned(),
        config["corpus_path"].as_str().unwrap().to_owned(),
        "--metrics".to_owned(),
        metrics.join(","),
        "--charcut-min-len".to_owned(),
        accuracy["min_len"].to_string(),
        "--seed".to_owned(),
        config["seed"].to_string(),
    ];
    if accuracy["case_sensitive"].as_bool().unwrap() {
        args.push("--charcut-case-sensitive".to_owned());
    }
    if !accuracy["prefix_suffix"].as_bool().unwrap() {
        args.push("--no-prefix-suffix".to_owned());
    }
    if let Some(pattern) = config["marker_pattern"].as_str() {
        args.push("--marker-pattern".to_owned());
        args.push(pattern.to_owned());
    }
    let second = bin().args(&args).output().unwrap();
    assert_eq!(second.status.code(), Some(0), "stderr: {}", stderr_str(&second));
    assert_eq!(stdout_str(&first), stdout_str(&second));
}

#[test]
fn lex_without_lexicon_flags_names_them() {
    let out = bin()
        .args([
            "score",
            "--corpus",
            "fixtures/toy_corpus.jsonl",
            "--metrics",
            "lex",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("--lex-st") && err.contains("--lex-ts"), "got: {err}");
}

#[test]
fn unknown_metric_is_a_usage_error() {
    let out = bin()
        .args([
            "score",
            "--corpus",
            "fixtures/toy_corpus.jsonl",
            "--metrics",
            "wer,ter",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("ter"));
}

#[test]
fn metrics_needing_references_fail_cleanly_without_them() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("noref.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"id":"u1","hyp_transcript":"a b","hyp_translation":"x y"}"#,
            "\n",
            r#"{"id":"u2","hyp_transcript":"c","hyp_translation":"z"}"#,
            "\n",
        ),
    )
    .unwrap();
    let out = bin()
        .args([
            "score",
            "--corpus",
            corpus.to_str().unwrap(),
            "--metrics",
            "correlation",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("reference transcripts"));
    // Surface consistency needs no references and still works.
    let out = bin()
        .args([
            "score",
            "--corpus",
            corpus.to_str().unwrap(),
            "--metrics",
            "surface",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
}

#[test]
fn duplicate_corpus_id_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("dup.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"id":"u1","hyp_transcript":"a","hyp_translation":"x"}"#,
            "\n",
            r#"{"id":"u1","hyp_transcript":"b","hyp_translation":"y"}"#,
            "\n",
        ),
    )
    .unwrap();
    let out = bin()
        .args([
            "score",
            "--corpus",
            corpus.to_str().unwrap(),
            "--metrics",
            "surface",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("u1"));
}

#[test]
fn csv_summary_mirrors_report_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("summary.csv");
    let out = bin()
        .args([
            "score",
            "--corpus",
            "fixtures/toy_corpus.jsonl",
            "--metrics",
            "wer,bleu,surface",
            "--csv",
            csv_path.to_str().unwrap(),
            "--out",
            dir.path().join("report.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("wer_down,bleu_up,surface_up"));
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(values.len(), 3);
    for v in values {
        assert!(v.parse::<f64>().is_ok(), "not numeric: {v}");
    }
}

#[test]
fn train_lexicon_reproduces_fixture_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("lex.tsv");
    let out = bin()
        .args([
            "train-lexicon",
            "--src",
            "fixtures/toy_bitext.src",
            "--tgt",
            "fixtures/toy_bitext.tgt",
            "--iterations",
            "5",
            "--src-lang",
            "en",
            "--tgt-lang",
            "de",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let trained = std::fs::read_to_string(&out_path).unwrap();
    let bundled = std::fs::read_to_string(fixture("toy_lex_st.tsv")).unwrap();
    assert_eq!(trained, bundled);
}

#[test]
fn train_lexicon_rejects_mismatched_line_counts() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("s.txt");
    let tgt = dir.path().join("t.txt");
    std::fs::write(&src, "a b\nc d\n").unwrap();
    std::fs::write(&tgt, "x y\n").unwrap();
    let out = bin()
        .args([
            "train-lexicon",
            "--src",
            src.to_str().unwrap(),
            "--tgt",
            tgt.to_str().unwrap(),
            "--out",
            dir.path().join("lex.tsv").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("mismatch"));
}

#[test]
fn rescore_paired_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let nbest = dir.path().join("nbest.jsonl");
    std::fs::write(
        &nbest,
        concat!(
            r#"{"id":"u1","rank":0,"transcript":"the cat drinks bread","translation":"die katze trinkt wasser"}"#,
            "\n",
            r#"{"id":"u1","rank":1,"transcript":"the cat drinks water","translation":"die katze trinkt wasser"}"#,
            "\n",
            r#"{"id":"u2","rank":0,"transcript":"the dog eats bread","translation":"die hund isst brot"}"#,
            "\n",
        ),
    )
    .unwrap();
    let out_path = dir.path().join("selected.jsonl");
    let ranking_path = dir.path().join("ranking.jsonl");
    let out = bin()
        .args([
            "rescore",
            "--nbest",
            nbest.to_str().unwrap(),
            "--lex-st",
            "fixtures/toy_lex_st.tsv",
            "--lex-ts",
            "fixtures/toy_lex_ts.tsv",
            "--mode",
            "paired",
            "--out",
            out_path.to_str().unwrap(),
            "--dump-ranking",
            ranking_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let selected = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<serde_json::Value> = selected
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    // The consistent candidate wins for u1.
    assert_eq!(lines[0]["id"], "u1");
    assert_eq!(lines[0]["transcript"], "the cat drinks water");
    assert_eq!(lines[0]["origin"], serde_json::json!([1, 1]));
    let ranking = std::fs::read_to_string(&ranking_path).unwrap();
    assert_eq!(ranking.lines().count(), 3);
}

#[test]
fn rescore_cross_mode_builds_cross_product() {
    let dir = tempfile::tempdir().unwrap();
    let nbest = dir.path().join("nbest.jsonl");
    std::fs::write(
        &nbest,
        concat!(
            r#"{"id":"u1","rank":0,"transcript":"the cat drinks water"}"#,
            "\n",
            r#"{"id":"u1","rank":1,"transcript":"the cat drinks bread"}"#,
            "\n",
            r#"{"id":"u1","rank":0,"translation":"die katze trinkt wasser"}"#,
            "\n",
        ),
    )
    .unwrap();
    let out_path = dir.path().join("selected.jsonl");
    let ranking_path = dir.path().join("ranking.jsonl");
    let out = bin()
        .args([
            "rescore",
            "--nbest",
            nbest.to_str().unwrap(),
            "--lex-st",
            "fixtures/toy_lex_st.tsv",
            "--lex-ts",
            "fixtures/toy_lex_ts.tsv",
            "--mode",
            "cross",
            "--out",
            out_path.to_str().unwrap(),
            "--dump-ranking",
            ranking_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let ranking = std::fs::read_to_string(&ranking_path).unwrap();
    assert_eq!(ranking.lines().count(), 2, "2 transcripts x 1 translation");
    let selected: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&out_path).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(selected["transcript"], "the cat drinks water");
}

#[test]
fn emit_targets_writes_expected_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"id":"u1","hyp_transcript":"hello world","hyp_translation":"welt"}"#,
            "\n",
        ),
    )
    .unwrap();
    let vocab = dir.path().join("vocab.txt");
    std::fs::write(&vocab, "hello\nworld\nwelt\n").unwrap();
    let out_path = dir.path().join("targets.jsonl");
    let out = bin()
        .args([
            "emit-targets",
            "--corpus",
            corpus.to_str().unwrap(),
            "--side",
            "translation",
            "--epsilon",
            "0.1",
            "--vocab",
            vocab.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let record: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&out_path).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(record["side"], "translation");
    assert_eq!(record["epsilon"], 0.1);
    let rows = record["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let row: Vec<(String, f64)> = rows[0]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| {
            (
                pair[0].as_str().unwrap().to_owned(),
                pair[1].as_f64().unwrap(),
            )
        })
        .collect();
    let get = |token: &str| row.iter().find(|(t, _)| t == token).unwrap().1;
    assert!((get("welt") - 0.9).abs() < 1e-12);
    assert!((get("hello") - 0.05).abs() < 1e-15);
    assert!((get("world") - 0.05).abs() < 1e-15);
}

#[test]
fn emit_targets_names_oov_token() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        concat!(r#"{"id":"u1","hyp_transcript":"hello","hyp_translation":"zzz"}"#, "\n"),
    )
    .unwrap();
    let vocab = dir.path().join("vocab.txt");
    std::fs::write(&vocab, "hello\n").unwrap();
    let out = bin()
        .args([
            "emit-targets",
            "--corpus",
            corpus.to_str().unwrap(),
            "--side",
            "translation",
            "--vocab",
            vocab.to_str().unwrap(),
            "--out",
            dir.path().join("t.jsonl").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(err.contains("zzz") && err.contains("u1"), "got: {err}");
}

/// Scores the fixture corpus and a degraded variant into report files.
fn score_two_systems(dir: &Path) -> (PathBuf, PathBuf) {
    let report_a = dir.join("report_a.json");
    let out = bin()
        .args([
            "score",
            "--corpus",
            "fixtures/toy_corpus.jsonl",
            "--lex-st",
            "fixtures/toy_lex_st.tsv",
            "--lex-ts",
            "fixtures/toy_lex_ts.tsv",
            "--out",
            report_a.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));

    // System B: transcripts degraded by swapping two frequent words.
    let corpus = std::fs::read_to_string(fixture("toy_corpus.jsonl")).unwrap();
    let mut degraded = String::new();
    for line in corpus.lines() {
        let mut record: serde_json::Value = serde_json::from_str(line).unwrap();
        let hyp = record["hyp_transcript"].as_str().unwrap().to_owned();
        record["hyp_transcript"] =
            serde_json::Value::String(hyp.replace("the", "a").replace("The", "A"));
        degraded.push_str(&serde_json::to_string(&record).unwrap());
        degraded.push('\n');
    }
    let corpus_b = dir.join("corpus_b.jsonl");
    std::fs::write(&corpus_b, degraded).unwrap();
    let report_b = dir.join("report_b.json");
    let out = bin()
        .args([
            "score",
            "--corpus",
            corpus_b.to_str().unwrap(),
            "--lex-st",
            "fixtures/toy_lex_st.tsv",
            "--lex-ts",
            "fixtures/toy_lex_ts.tsv",
            "--out",
            report_b.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    (report_a, report_b)
}

#[test]
fn significance_compares_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (report_a, report_b) = score_two_systems(dir.path());
    let run = || {
        let out = bin()
            .args([
                "significance",
                "--report-a",
                report_a.to_str().unwrap(),
                "--report-b",
                report_b.to_str().unwrap(),
                "--metric",
                "wer",
                "--samples",
                "1000",
                "--seed",
                "13",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
        stdout_str(&out)
    };
    let first = run();
    let second = run();
    assert_eq!(first, second, "same seed must give identical output");
    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed["metric"], "wer");
    assert_eq!(parsed["samples"], 1000);
    assert_eq!(parsed["seed"], 13);
    // System A is strictly better on WER; it should win essentially always.
    let wins_a = parsed["wins_a"].as_u64().unwrap();
    let wins_b = parsed["wins_b"].as_u64().unwrap();
    let ties = parsed["ties"].as_u64().unwrap();
    assert_eq!(wins_a + wins_b + ties, 1000);
    assert!(wins_a > 990, "wins_a = {wins_a}");
    assert!(parsed["delta"].as_f64().unwrap() < 0.0);
    assert!(parsed["p_value"].as_f64().unwrap() < 0.05);
}

#[test]
fn significance_rejects_mismatched_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let (report_a, _) = score_two_systems(dir.path());
    // Report over a different corpus (different ids).
    let other = dir.path().join("other.jsonl");
    std::fs::write(
        &other,
        concat!(
            r#"{"id":"x1","hyp_transcript":"a","hyp_translation":"b","ref_transcript":"a","ref_translation":"b"}"#,
            "\n",
            r#"{"id":"x2","hyp_transcript":"c","hyp_translation":"d","ref_transcript":"c","ref_translation":"d"}"#,
            "\n",
        ),
    )
    .unwrap();
    let report_other = dir.path().join("report_other.json");
    let out = bin()
        .args([
            "score",
            "--corpus",
            other.to_str().unwrap(),
            "--metrics",
            "wer",
            "--out",
            report_other.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin()
        .args([
            "significance",
            "--report-a",
            report_a.to_str().unwrap(),
            "--report-b",
            report_other.to_str().unwrap(),
            "--metric",
            "wer",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("different"));
}

#[test]
fn significance_rejects_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let (report_a, report_b) = score_two_systems(dir.path());
    let out = bin()
        .args([
            "significance",
            "--report-a",
            report_a.to_str().unwrap(),
            "--report-b",
            report_b.to_str().unwrap(),
            "--metric",
            "correlation",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
