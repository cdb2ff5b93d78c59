//! Reading metric reports back for significance testing.

use std::collections::BTreeMap;

use serde::Deserialize;

use consisteval_core::stats::{Aggregator, MetricDirection};

use crate::score::Metric;
use crate::CliError;

#[derive(Debug, Deserialize)]
pub struct ParsedReport {
    pub tool_version: String,
    #[serde(default)]
    pub config: serde_json::Value,
    pub corpus: ParsedCorpusInfo,
    #[serde(default)]
    pub corpus_metrics: BTreeMap<String, Option<f64>>,
    #[serde(default)]
    pub undefined_flags: BTreeMap<String, String>,
    pub per_utterance: Vec<ParsedUtterance>,
}

#[derive(Debug, Deserialize)]
pub struct ParsedCorpusInfo {
    pub size: usize,
    pub source_path: String,
}

#[derive(Debug, Deserialize)]
pub struct ParsedUtterance {
    pub id: String,
    pub wer: Option<ParsedWer>,
    pub bleu: Option<ParsedBleu>,
    pub charcut: Option<ParsedCharcut>,
    pub lex: Option<ParsedLex>,
    pub surface: Option<ParsedSurface>,
    pub combined: Option<ParsedCombined>,
}

#[derive(Debug, Deserialize)]
pub struct ParsedWer {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub ref_len: usize,
    pub wer: Option<f64>,
    pub wer_clipped: f64,
}

#[derive(Debug, Deserialize)]
pub struct ParsedBleu {
    pub matches: [usize; 4],
    pub totals: [usize; 4],
    pub hyp_len: usize,
    pub ref_len: usize,
}

#[derive(Debug, Deserialize)]
pub struct ParsedCharcut {
    pub insertions: usize,
    pub deletions: usize,
    pub shift: usize,
    pub cand_len: usize,
    pub ref_len: usize,
    pub raw: Option<f64>,
    pub clipped: f64,
}

#[derive(Debug, Deserialize)]
pub struct ParsedLex {
    pub t_to_s: f64,
    pub s_to_t: f64,
    pub translated_words: usize,
    pub transcribed_words: usize,
}

#[derive(Debug, Deserialize)]
pub struct ParsedSurface {
    pub deletions: usize,
    pub insertions: usize,
    pub shift: usize,
    pub len_total: usize,
}

#[derive(Debug, Deserialize)]
pub struct ParsedCombined {
    pub p_succ: f64,
}

pub fn parse_report(path: &str) -> Result<ParsedReport, CliError> {
    let data = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read report {path}: {e}")))?;
    serde_json::from_str(&data)
        .map_err(|e| CliError::Data(format!("cannot parse report {path}: {e}")))
}

/// Bootstrap setup for one metric: per-utterance sufficient statistics, the
/// corpus aggregation rule, and the metric polarity.
pub fn significance_inputs(
    report: &ParsedReport,
    report_label: &str,
    metric: Metric,
) -> Result<(Vec<Vec<f64>>, Aggregator, MetricDirection), CliError> {
    let missing = |section: &str| {
        CliError::Data(format!(
            "report {report_label} has no per-utterance '{section}' section; \
             re-run score with --metrics including '{section}'"
        ))
    };
    let mut rows = Vec::with_capacity(report.per_utterance.len());
    let (aggregator, direction) = match metric {
        Metric::Wer => {
            for utt in &report.per_utterance {
                let wer = utt.wer.as_ref().ok_or_else(|| missing("wer"))?;
                rows.push(vec![
                    (wer.substitutions + wer.insertions + wer.deletions) as f64,
                    wer.ref_len as f64,
                ]);
            }
            (Aggregator::RatioOfSums, MetricDirection::LowerIsBetter)
        }
        Metric::Bleu => {
            for utt in &report.per_utterance {
                let bleu = utt.bleu.as_ref().ok_or_else(|| missing("bleu"))?;
                let mut row = Vec::with_capacity(10);
                row.extend(bleu.matches.iter().map(|&m| m as f64));
                row.extend(bleu.totals.iter().map(|&t| t as f64));
                row.push(bleu.hyp_len as f64);
                row.push(bleu.ref_len as f64);
                rows.push(row);
            }
            (Aggregator::Bleu, MetricDirection::HigherIsBetter)
        }
        Metric::Charcut => {
            for utt in &report.per_utterance {
                let cc = utt.charcut.as_ref().ok_or_else(|| missing("charcut"))?;
                rows.push(vec![
                    (cc.insertions + cc.deletions + cc.shift) as f64,
                    (cc.cand_len + cc.ref_len) as f64,
                ]);
            }
            (Aggregator::RatioOfSums, MetricDirection::LowerIsBetter)
        }
        Metric::Lex => {
            for utt in &report.per_utterance {
                let lex = utt.lex.as_ref().ok_or_else(|| missing("lex"))?;
                rows.push(vec![
                    lex.t_to_s,
                    lex.translated_words as f64,
                    lex.s_to_t,
                    lex.transcribed_words as f64,
                ]);
            }
            (
                Aggregator::BidirectionalRatio,
                MetricDirection::LowerIsBetter,
            )
        }
        Metric::Surface => {
            for utt in &report.per_utterance {
                let surface = utt.surface.as_ref().ok_or_else(|| missing("surface"))?;
                rows.push(vec![
                    (surface.deletions + surface.insertions + surface.shift) as f64,
                    surface.len_total as f64,
                ]);
            }
            (
                Aggregator::OneMinusRatioOfSums,
                MetricDirection::HigherIsBetter,
            )
        }
        Metric::Combined => {
            for utt in &report.per_utterance {
                let combined = utt.combined.as_ref().ok_or_else(|| missing("combined"))?;
                rows.push(vec![combined.p_succ]);
            }
            (Aggregator::Mean, MetricDirection::HigherIsBetter)
        }
        Metric::Correlation => {
            return Err(CliError::Usage(
                "correlation is a corpus-level coefficient without a per-utterance \
                 decomposition; bootstrap significance is not supported for it"
                    .into(),
            ))
        }
    };
    Ok((rows, aggregator, direction))
}
