//! Bundled toy fixtures and the `selfcheck` golden test.
//!
//! The fixtures ship inside the binary, so a pristine install can verify
//! itself without touching the filesystem. The same files live under
//! `fixtures/` for use with the regular subcommands; `selfcheck` recomputes
//! the bundled golden report from the embedded corpus and lexicons and
//! compares byte-for-byte.

use consisteval_core::charcut::MatchConfig;
use consisteval_core::{Corpus, Lexicon};

use crate::score::{run_score, FileStamp, Metric, ScoreConfig, ALL_METRICS};
use crate::CliError;

pub const TOY_CORPUS: &str = include_str!("../fixtures/toy_corpus.jsonl");
pub const TOY_BITEXT_SRC: &str = include_str!("../fixtures/toy_bitext.src");
pub const TOY_BITEXT_TGT: &str = include_str!("../fixtures/toy_bitext.tgt");
pub const TOY_LEX_ST: &str = include_str!("../fixtures/toy_lex_st.tsv");
pub const TOY_LEX_TS: &str = include_str!("../fixtures/toy_lex_ts.tsv");
pub const GOLDEN_REPORT: &str = include_str!("../fixtures/golden_report.json");

pub const TOY_CORPUS_PATH: &str = "fixtures/toy_corpus.jsonl";
pub const TOY_LEX_ST_PATH: &str = "fixtures/toy_lex_st.tsv";
pub const TOY_LEX_TS_PATH: &str = "fixtures/toy_lex_ts.tsv";

pub fn sha256_hex(data: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(data);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// The exact configuration the golden report was generated with.
pub fn golden_config(threads: usize) -> ScoreConfig {
    ScoreConfig {
        corpus_path: TOY_CORPUS_PATH.to_owned(),
        metrics: ALL_METRICS.to_vec(),
        lex_st: Some(FileStamp {
            path: TOY_LEX_ST_PATH.to_owned(),
            sha256: sha256_hex(TOY_LEX_ST.as_bytes()),
        }),
        lex_ts: Some(FileStamp {
            path: TOY_LEX_TS_PATH.to_owned(),
            sha256: sha256_hex(TOY_LEX_TS.as_bytes()),
        }),
        charcut_accuracy: MatchConfig::accuracy(),
        marker_pattern: None,
        seed: 13,
        threads,
    }
}

/// Recomputes the golden report from embedded fixtures.
pub fn compute_golden_report(threads: usize) -> Result<String, CliError> {
    let corpus = Corpus::from_reader(TOY_CORPUS.as_bytes(), TOY_CORPUS_PATH)?;
    let lex_st = Lexicon::from_reader(TOY_LEX_ST.as_bytes(), TOY_LEX_ST_PATH)?;
    let lex_ts = Lexicon::from_reader(TOY_LEX_TS.as_bytes(), TOY_LEX_TS_PATH)?;
    let config = golden_config(threads);
    let artifacts = run_score(&corpus, Some((&lex_st, &lex_ts)), &config)?;
    Ok(artifacts.report_json)
}

/// Runs the bundled golden test. Returns `Ok(true)` on PASS.
pub fn selfcheck(threads: usize, out: &mut impl std::io::Write) -> Result<bool, CliError> {
    let report = compute_golden_report(threads)?;
    let metric_names: Vec<&str> = ALL_METRICS.iter().map(Metric::name).collect();
    if report == GOLDEN_REPORT {
        writeln!(
            out,
            "selfcheck PASS: report over {} metrics matches the bundled golden report ({} bytes)",
            metric_names.len(),
            report.len()
        )
        .map_err(|e| CliError::Data(e.to_string()))?;
        Ok(true)
    } else {
        let diff_line = first_diff_line(&report, GOLDEN_REPORT);
        writeln!(
            out,
            "selfcheck FAIL: recomputed report diverges from the bundled golden report at line {diff_line}"
        )
        .map_err(|e| CliError::Data(e.to_string()))?;
        Ok(false)
    }
}

fn first_diff_line(a: &str, b: &str) -> usize {
    for (i, (la, lb)) in a.lines().zip(b.lines()).enumerate() {
        if la != lb {
            return i + 1;
        }
    }
    a.lines().count().min(b.lines().count()) + 1
}
