//! The `score` pipeline: computes the requested metrics over a corpus and
//! renders the deterministic report and CSV summary.

use consisteval_core::bleu::{corpus_bleu_detailed, BleuStats};
use consisteval_core::charcut::{corpus_charcut, CorpusCharCut, MatchConfig};
use consisteval_core::consistency::{
    combined_dialog, error_correlation, lexical_consistency, surface_consistency,
};
use consisteval_core::corpus::{Corpus, NormalizeOptions};
use consisteval_core::{
    CombinedReport, CorrelationReport, CorpusWer, LexicalConsistencyReport, Lexicon,
    SurfaceConsistencyReport,
};

use crate::json_out::JVal;
use crate::pmap::run_jobs;
use crate::CliError;

/// Corpus-level metrics known to `score`, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Wer,
    Bleu,
    Charcut,
    Lex,
    Surface,
    Correlation,
    Combined,
}

pub const ALL_METRICS: [Metric; 7] = [
    Metric::Wer,
    Metric::Bleu,
    Metric::Charcut,
    Metric::Lex,
    Metric::Surface,
    Metric::Correlation,
    Metric::Combined,
];

impl Metric {
    pub fn parse(name: &str) -> Result<Metric, CliError> {
        match name {
            "wer" => Ok(Metric::Wer),
            "bleu" => Ok(Metric::Bleu),
            "charcut" => Ok(Metric::Charcut),
            "lex" => Ok(Metric::Lex),
            "surface" => Ok(Metric::Surface),
            "correlation" => Ok(Metric::Correlation),
            "combined" => Ok(Metric::Combined),
            other => Err(CliError::Usage(format!(
                "unknown metric '{other}' (expected one of: wer, bleu, charcut, lex, surface, correlation, combined)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Wer => "wer",
            Metric::Bleu => "bleu",
            Metric::Charcut => "charcut",
            Metric::Lex => "lex",
            Metric::Surface => "surface",
            Metric::Correlation => "correlation",
            Metric::Combined => "combined",
        }
    }

    /// Report field name with the polarity suffix (down = lower is better).
    pub fn field_name(&self) -> &'static str {
        match self {
            Metric::Wer => "wer_down",
            Metric::Bleu => "bleu_up",
            Metric::Charcut => "charcut_down",
            Metric::Lex => "lex_down",
            Metric::Surface => "surface_up",
            Metric::Correlation => "correlation_up",
            Metric::Combined => "combined_up",
        }
    }

    fn needs_ref_transcript(&self) -> bool {
        matches!(self, Metric::Wer | Metric::Correlation | Metric::Combined)
    }

    fn needs_ref_translation(&self) -> bool {
        matches!(
            self,
            Metric::Bleu | Metric::Charcut | Metric::Correlation | Metric::Combined
        )
    }

    fn needs_lexicons(&self) -> bool {
        matches!(self, Metric::Lex)
    }
}

/// Provenance of a lexicon input.
#[derive(Debug, Clone)]
pub struct FileStamp {
    pub path: String,
    pub sha256: String,
}

/// Full effective configuration of one `score` run. Everything here is
/// echoed into the report; execution-only knobs (thread count) are excluded
/// so the bytes stay identical for any `--threads`.
#[derive(Debug, Clone)]
pub struct ScoreConfig {
    pub corpus_path: String,
    pub metrics: Vec<Metric>,
    pub lex_st: Option<FileStamp>,
    pub lex_ts: Option<FileStamp>,
    pub charcut_accuracy: MatchConfig,
    pub marker_pattern: Option<String>,
    pub seed: u64,
    pub threads: usize,
}

pub struct ScoreArtifacts {
    pub report_json: String,
    pub summary_csv: String,
}

enum Computed {
    Wer(CorpusWer),
    Bleu(f64, Vec<BleuStats>),
    Charcut(CorpusCharCut<f64>),
    Lex(LexicalConsistencyReport),
    Surface(SurfaceConsistencyReport),
    Correlation(CorrelationReport),
    Combined(CombinedReport),
}

/// Validates inputs, computes the requested metrics (at most `threads`
/// workers), and renders the report.
pub fn run_score(
    corpus: &Corpus,
    lexicons: Option<(&Lexicon, &Lexicon)>,
    config: &ScoreConfig,
) -> Result<ScoreArtifacts, CliError> {
    if config.metrics.is_empty() {
        return Err(CliError::Usage("no metrics requested".into()));
    }
    validate_references(corpus, &config.metrics)?;
    if config.metrics.iter().any(Metric::needs_lexicons) && lexicons.is_none() {
        return Err(CliError::Usage(
            "metric 'lex' requires --lex-st and --lex-ts".into(),
        ));
    }

    let norm_opts = normalize_options(config)?;
    let jobs: Vec<crate::pmap::Job<'_, Result<Computed, CliError>>> = config
        .metrics
        .iter()
        .map(|&metric| {
            let norm_opts = norm_opts.clone();
            let accuracy_config = config.charcut_accuracy;
            let job: crate::pmap::Job<'_, Result<Computed, CliError>> = match metric {
                Metric::Wer => Box::new(move || {
                    Ok(Computed::Wer(consisteval_core::wer::corpus_wer(
                        corpus, &norm_opts,
                    )?))
                }),
                Metric::Bleu => Box::new(move || {
                    let hyps: Vec<&str> = corpus
                        .utterances()
                        .iter()
                        .map(|u| u.hyp_translation.as_str())
                        .collect();
                    let refs: Vec<&str> = corpus
                        .utterances()
                        .iter()
                        .map(|u| u.ref_translation.as_deref().unwrap_or_default())
                        .collect();
                    let (score, stats) = corpus_bleu_detailed(&hyps, &refs)?;
                    Ok(Computed::Bleu(score, stats))
                }),
                Metric::Charcut => Box::new(move || {
                    Ok(Computed::Charcut(corpus_charcut(corpus, &accuracy_config)?))
                }),
                Metric::Lex => Box::new(move || {
                    let (lex_st, lex_ts) = lexicons.expect("validated above");
                    Ok(Computed::Lex(lexical_consistency(
                        corpus, lex_st, lex_ts, &norm_opts,
                    )?))
                }),
                Metric::Surface => {
                    Box::new(move || Ok(Computed::Surface(surface_consistency(corpus)?)))
                }
                Metric::Correlation => Box::new(move || {
                    Ok(Computed::Correlation(error_correlation(
                        corpus,
                        &accuracy_config,
                        &norm_opts,
                    )?))
                }),
                Metric::Combined => Box::new(move || {
                    Ok(Computed::Combined(combined_dialog(
                        corpus,
                        &accuracy_config,
                        &norm_opts,
                    )?))
                }),
            };
            job
        })
        .collect();

    let mut computed = Vec::with_capacity(config.metrics.len());
    for outcome in run_jobs(config.threads, jobs) {
        computed.push(outcome?);
    }

    let report = assemble_report(corpus, config, &computed);
    let csv = summary_csv(config, &computed);
    Ok(ScoreArtifacts {
        report_json: report.render(),
        summary_csv: csv,
    })
}

pub fn normalize_options(config: &ScoreConfig) -> Result<NormalizeOptions, CliError> {
    Ok(NormalizeOptions {
        marker_pattern: config
            .marker_pattern
            .as_deref()
            .map(regex::Regex::new)
            .transpose()
            .map_err(|e| CliError::Usage(format!("invalid --marker-pattern: {e}")))?,
    })
}

fn validate_references(corpus: &Corpus, metrics: &[Metric]) -> Result<(), CliError> {
    let need_transcript: Vec<&str> = metrics
        .iter()
        .filter(|m| m.needs_ref_transcript())
        .map(|m| m.name())
        .collect();
    let need_translation: Vec<&str> = metrics
        .iter()
        .filter(|m| m.needs_ref_translation())
        .map(|m| m.name())
        .collect();
    for utt in corpus.utterances() {
        if !need_transcript.is_empty() && utt.ref_transcript.is_none() {
            return Err(CliError::Data(format!(
                "metric(s) {} require reference transcripts, but utterance '{}' has none",
                need_transcript.join("/"),
                utt.id
            )));
        }
        if !need_translation.is_empty() && utt.ref_translation.is_none() {
            return Err(CliError::Data(format!(
                "metric(s) {} require reference translations, but utterance '{}' has none",
                need_translation.join("/"),
                utt.id
            )));
        }
    }
    Ok(())
}

fn match_config_json(config: &MatchConfig) -> JVal {
    JVal::Obj(vec![
        ("min_len", JVal::Count(config.min_len as u64)),
        ("case_sensitive", JVal::Bool(config.case_sensitive)),
        ("prefix_suffix", JVal::Bool(config.prefix_suffix)),
    ])
}

fn assemble_report(corpus: &Corpus, config: &ScoreConfig, computed: &[Computed]) -> JVal {
    let stamp_json = |stamp: &Option<FileStamp>| match stamp {
        Some(s) => JVal::Obj(vec![
            ("path", JVal::str(&s.path)),
            ("sha256", JVal::str(&s.sha256)),
        ]),
        None => JVal::Null,
    };
    let config_json = JVal::Obj(vec![
        ("command", JVal::str("score")),
        ("corpus_path", JVal::str(&config.corpus_path)),
        (
            "metrics",
            JVal::Arr(
                config
                    .metrics
                    .iter()
                    .map(|m| JVal::str(m.name()))
                    .collect(),
            ),
        ),
        ("lexicon_st", stamp_json(&config.lex_st)),
        ("lexicon_ts", stamp_json(&config.lex_ts)),
        (
            "charcut_accuracy",
            match_config_json(&config.charcut_accuracy),
        ),
        (
            "charcut_consistency",
            match_config_json(&MatchConfig::consistency()),
        ),
        (
            "marker_pattern",
            config
                .marker_pattern
                .as_ref()
                .map(JVal::str)
                .unwrap_or(JVal::Null),
        ),
        ("seed", JVal::Count(config.seed)),
    ]);

    let mut corpus_metrics: Vec<(&'static str, JVal)> = Vec::new();
    let mut undefined: Vec<(&'static str, JVal)> = Vec::new();
    for (metric, result) in config.metrics.iter().zip(computed) {
        match result {
            Computed::Wer(wer) => {
                corpus_metrics.push((metric.field_name(), JVal::Fixed6(wer.corpus_wer)))
            }
            Computed::Bleu(score, _) => {
                corpus_metrics.push((metric.field_name(), JVal::Fixed6(*score)))
            }
            Computed::Charcut(cc) => {
                corpus_metrics.push((metric.field_name(), JVal::Fixed6(cc.corpus_ratio)))
            }
            Computed::Lex(lex) => {
                corpus_metrics.push((metric.field_name(), JVal::Fixed6(lex.score)))
            }
            Computed::Surface(surface) => {
                corpus_metrics.push((metric.field_name(), JVal::Fixed6(surface.score)))
            }
            Computed::Correlation(correlation) => match correlation.tau {
                Some(tau) => corpus_metrics.push((metric.field_name(), JVal::Fixed6(tau))),
                None => undefined.push((
                    metric.field_name(),
                    JVal::str("zero variance in utterance-level errors"),
                )),
            },
            Computed::Combined(combined) => {
                corpus_metrics.push((metric.field_name(), JVal::Fixed6(combined.score)))
            }
        }
    }

    let per_utterance: Vec<JVal> = corpus
        .utterances()
        .iter()
        .enumerate()
        .map(|(idx, utt)| {
            let mut fields: Vec<(&'static str, JVal)> = vec![("id", JVal::str(&utt.id))];
            for result in computed {
                match result {
                    Computed::Wer(wer) => {
                        let e = &wer.per_utterance[idx];
                        fields.push((
                            "wer",
                            JVal::Obj(vec![
                                ("substitutions", JVal::Count(e.substitutions as u64)),
                                ("insertions", JVal::Count(e.insertions as u64)),
                                ("deletions", JVal::Count(e.deletions as u64)),
                                ("ref_len", JVal::Count(e.ref_len as u64)),
                                ("wer", JVal::Full(e.wer)),
                                ("wer_clipped", JVal::Full(e.wer_clipped)),
                            ]),
                        ));
                    }
                    Computed::Bleu(_, stats) => {
                        let s = &stats[idx];
                        fields.push((
                            "bleu",
                            JVal::Obj(vec![
                                (
                                    "matches",
                                    JVal::Arr(
                                        s.matches
                                            .iter()
                                            .map(|&m| JVal::Count(m as u64))
                                            .collect(),
                                    ),
                                ),
                                (
                                    "totals",
                                    JVal::Arr(
                                        s.totals.iter().map(|&t| JVal::Count(t as u64)).collect(),
                                    ),
                                ),
                                ("hyp_len", JVal::Count(s.hyp_len as u64)),
                                ("ref_len", JVal::Count(s.ref_len as u64)),
                            ]),
                        ));
                    }
                    Computed::Charcut(cc) => {
                        let c = &cc.per_utterance[idx];
                        fields.push((
                            "charcut",
                            JVal::Obj(vec![
                                ("insertions", JVal::Count(c.insertions as u64)),
                                ("deletions", JVal::Count(c.deletions as u64)),
                                ("shift", JVal::Count(c.shift as u64)),
                                ("cand_len", JVal::Count(c.cand_len as u64)),
                                ("ref_len", JVal::Count(c.ref_len as u64)),
                                ("raw", JVal::Full(c.score.raw)),
                                ("clipped", JVal::Full(c.score.clipped)),
                            ]),
                        ));
                    }
                    Computed::Lex(lex) => {
                        let p = &lex.per_utterance[idx];
                        fields.push((
                            "lex",
                            JVal::Obj(vec![
                                ("t_to_s", JVal::Full(p.t_to_s)),
                                ("s_to_t", JVal::Full(p.s_to_t)),
                                (
                                    "translated_words",
                                    JVal::Count(p.translated_words as u64),
                                ),
                                (
                                    "transcribed_words",
                                    JVal::Count(p.transcribed_words as u64),
                                ),
                            ]),
                        ));
                    }
                    Computed::Surface(surface) => {
                        let s = &surface.per_utterance[idx];
                        fields.push((
                            "surface",
                            JVal::Obj(vec![
                                ("deletions", JVal::Count(s.deletions as u64)),
                                ("insertions", JVal::Count(s.insertions as u64)),
                                ("shift", JVal::Count(s.shift as u64)),
                                ("len_total", JVal::Count(s.len_total as u64)),
                            ]),
                        ));
                    }
                    Computed::Correlation(correlation) => {
                        fields.push((
                            "correlation",
                            JVal::Obj(vec![
                                (
                                    "wer_clipped",
                                    JVal::Full(correlation.wer_clipped_values[idx]),
                                ),
                                (
                                    "charcut_clipped",
                                    JVal::Full(correlation.charcut_clipped_values[idx]),
                                ),
                            ]),
                        ));
                    }
                    Computed::Combined(combined) => {
                        fields.push((
                            "combined",
                            JVal::Obj(vec![(
                                "p_succ",
                                JVal::Full(combined.per_utterance[idx]),
                            )]),
                        ));
                    }
                }
            }
            JVal::Obj(fields)
        })
        .collect();

    JVal::Obj(vec![
        ("tool_version", JVal::str(env!("CARGO_PKG_VERSION"))),
        ("config", config_json),
        (
            "corpus",
            JVal::Obj(vec![
                ("size", JVal::Count(corpus.len() as u64)),
                ("source_path", JVal::str(corpus.source_path())),
            ]),
        ),
        ("corpus_metrics", JVal::Obj(corpus_metrics)),
        ("undefined_flags", JVal::Obj(undefined)),
        ("per_utterance", JVal::Arr(per_utterance)),
    ])
}

/// One-line wide CSV mirroring the corpus metric values.
fn summary_csv(config: &ScoreConfig, computed: &[Computed]) -> String {
    let mut header = Vec::new();
    let mut values = Vec::new();
    for (metric, result) in config.metrics.iter().zip(computed) {
        header.push(metric.field_name().to_owned());
        let value = match result {
            Computed::Wer(wer) => Some(wer.corpus_wer),
            Computed::Bleu(score, _) => Some(*score),
            Computed::Charcut(cc) => Some(cc.corpus_ratio),
            Computed::Lex(lex) => Some(lex.score),
            Computed::Surface(surface) => Some(surface.score),
            Computed::Correlation(correlation) => correlation.tau,
            Computed::Combined(combined) => Some(combined.score),
        };
        values.push(match value {
            Some(v) if v.is_finite() => format!("{v:.6}"),
            _ => "undefined".to_owned(),
        });
    }
    format!("{}\n{}\n", header.join(","), values.join(","))
}
