//! Consistency measures over (transcript, translation) pairs.
//!
//! Four measures are provided:
//!
//! * **lexical** — corpus-normalized sum of negative best-match word
//!   translation log-probabilities, averaged over both directions
//!   (lower is better);
//! * **surface** — one minus the corpus-level character mismatch ratio
//!   between transcript and translation (higher is better);
//! * **error correlation** — Kendall τ-b between utterance-level clipped WER
//!   and clipped CharCut against references (higher is better);
//! * **combined** — mean over utterances of
//!   `(1 − WERclipped)·(1 − CharCutclipped)`, the probability that both
//!   outputs are good enough for successful communication (higher is better).

use crate::charcut::{charcut_match, score_from_counts, MatchConfig, MatchResult};
use crate::corpus::{normalize_with, Corpus, NormMode, NormalizeOptions, TokenSeq};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::scalar::Scalar;
use crate::stats::kendall_tau_b;
use crate::wer::corpus_wer;

/// Per-utterance lexical penalties and token counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtterancePenalty<F> {
    /// −Σ over translated words of the best source log-probability.
    pub t_to_s: F,
    /// −Σ over transcribed words of the best target log-probability.
    pub s_to_t: F,
    /// Translated word count |t| after LEXICAL normalization.
    pub translated_words: usize,
    /// Transcribed word count |s| after LEXICAL normalization.
    pub transcribed_words: usize,
}

/// Corpus-level lexical consistency (lower is better).
#[derive(Debug, Clone, PartialEq)]
pub struct LexicalConsistencyReport<F> {
    pub per_utterance: Vec<UtterancePenalty<F>>,
    /// Total translated words n across the corpus.
    pub translated_words: usize,
    /// Total transcribed words m across the corpus.
    pub transcribed_words: usize,
    /// (Σ t_to_s) / n.
    pub direction_ts: F,
    /// (Σ s_to_t) / m.
    pub direction_st: F,
    /// ½(direction_ts + direction_st).
    pub score: F,
}

/// Per-utterance surface mismatch counts (character units).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceCounts {
    pub deletions: usize,
    pub insertions: usize,
    pub shift: usize,
    /// |s| + |t| for this utterance.
    pub len_total: usize,
}

/// Corpus-level surface-form consistency (higher is better).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConsistencyReport<F> {
    pub per_utterance: Vec<SurfaceCounts>,
    pub total_deletions: usize,
    pub total_insertions: usize,
    pub total_shift: usize,
    pub total_len: usize,
    /// 1 − (del+ins+shift)/total_len, counts aggregated before division.
    pub score: F,
}

/// Kendall τ-b between per-utterance transcript and translation errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport<F> {
    /// `None` when either error vector has zero variance (τ undefined).
    pub tau: Option<F>,
    pub n_items: usize,
    pub wer_clipped_values: Vec<F>,
    pub charcut_clipped_values: Vec<F>,
}

/// Mean utterance success probability for the dialog task.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedReport<F> {
    pub per_utterance: Vec<F>,
    pub score: F,
}

/// Penalty of one (transcript, translation) token pair under two directional
/// lexicons. Used by both the corpus metric and n-best rescoring.
pub fn utterance_penalty<F: Scalar>(
    transcript: &TokenSeq,
    translation: &TokenSeq,
    lex_st: &Lexicon<F>,
    lex_ts: &Lexicon<F>,
) -> UtterancePenalty<F> {
    let s_tokens = transcript.tokens();
    let t_tokens = translation.tokens();
    let mut t_to_s = F::zero();
    for t_word in t_tokens {
        // max over the empty set falls back to the floor.
        let best = s_tokens
            .iter()
            .map(|s_word| lex_st.logprob(s_word, t_word))
            .fold(None, |acc: Option<F>, lp| {
                Some(match acc {
                    Some(m) if m >= lp => m,
                    _ => lp,
                })
            })
            .unwrap_or_else(|| lex_st.floor_logprob());
        t_to_s += -best;
    }
    let mut s_to_t = F::zero();
    for s_word in s_tokens {
        let best = t_tokens
            .iter()
            .map(|t_word| lex_ts.logprob(t_word, s_word))
            .fold(None, |acc: Option<F>, lp| {
                Some(match acc {
                    Some(m) if m >= lp => m,
                    _ => lp,
                })
            })
            .unwrap_or_else(|| lex_ts.floor_logprob());
        s_to_t += -best;
    }
    UtterancePenalty {
        t_to_s,
        s_to_t,
        translated_words: t_tokens.len(),
        transcribed_words: s_tokens.len(),
    }
}

/// Lexical consistency of hypothesis pairs under two directional lexicons
/// (`lex_st`: p(translation word | transcript word), `lex_ts`: the reverse).
pub fn lexical_consistency<F: Scalar>(
    corpus: &Corpus,
    lex_st: &Lexicon<F>,
    lex_ts: &Lexicon<F>,
    opts: &NormalizeOptions,
) -> Result<LexicalConsistencyReport<F>> {
    let mut per_utterance = Vec::with_capacity(corpus.len());
    let mut sum_ts = F::zero();
    let mut sum_st = F::zero();
    let mut n = 0usize;
    let mut m = 0usize;
    for utt in corpus.utterances() {
        let transcript = normalize_with(&utt.hyp_transcript, NormMode::Lexical, opts);
        let translation = normalize_with(&utt.hyp_translation, NormMode::Lexical, opts);
        let penalty = utterance_penalty(&transcript, &translation, lex_st, lex_ts);
        sum_ts += penalty.t_to_s;
        sum_st += penalty.s_to_t;
        n += penalty.translated_words;
        m += penalty.transcribed_words;
        per_utterance.push(penalty);
    }
    if n == 0 {
        return Err(Error::NoCorpusTokens {
            side: "translated",
        });
    }
    if m == 0 {
        return Err(Error::NoCorpusTokens {
            side: "transcribed",
        });
    }
    let direction_ts = sum_ts / F::from_count(n);
    let direction_st = sum_st / F::from_count(m);
    Ok(LexicalConsistencyReport {
        per_utterance,
        translated_words: n,
        transcribed_words: m,
        direction_ts,
        direction_st,
        score: F::from_f64(0.5) * (direction_ts + direction_st),
    })
}

/// Surface-form consistency between hypothesis translations and transcripts:
/// case-sensitive substring matching (min length 5, no prefix/suffix
/// pre-matching), counts aggregated at corpus level.
pub fn surface_consistency<F: Scalar>(corpus: &Corpus) -> Result<SurfaceConsistencyReport<F>> {
    let config = MatchConfig::consistency();
    let mut per_utterance = Vec::with_capacity(corpus.len());
    let mut total = SurfaceCounts {
        deletions: 0,
        insertions: 0,
        shift: 0,
        len_total: 0,
    };
    for utt in corpus.utterances() {
        let translation = normalize_with(&utt.hyp_translation, NormMode::RawCased, &Default::default());
        let transcript = normalize_with(&utt.hyp_transcript, NormMode::RawCased, &Default::default());
        let result: MatchResult = charcut_match(&translation.text(), &transcript.text(), &config);
        let counts = SurfaceCounts {
            deletions: result.deletions,
            insertions: result.insertions,
            shift: result.shift_cost,
            len_total: result.cand_len + result.ref_len,
        };
        total.deletions += counts.deletions;
        total.insertions += counts.insertions;
        total.shift += counts.shift;
        total.len_total += counts.len_total;
        per_utterance.push(counts);
    }
    if total.len_total == 0 {
        return Err(Error::NoCorpusChars);
    }
    let mismatch = F::from_count(total.deletions + total.insertions + total.shift)
        / F::from_count(total.len_total);
    let score = (F::one() - mismatch).max(F::zero());
    Ok(SurfaceConsistencyReport {
        per_utterance,
        total_deletions: total.deletions,
        total_insertions: total.insertions,
        total_shift: total.shift,
        total_len: total.len_total,
        score,
    })
}

/// Kendall τ-b between utterance-level clipped WER (hypothesis vs reference
/// transcript) and clipped CharCut (hypothesis vs reference translation,
/// under `accuracy_config`).
pub fn error_correlation<F: Scalar>(
    corpus: &Corpus,
    accuracy_config: &MatchConfig,
    opts: &NormalizeOptions,
) -> Result<CorrelationReport<F>> {
    if corpus.len() < 2 {
        return Err(Error::TooFewItems {
            need: 2,
            got: corpus.len(),
        });
    }
    let (wer_values, charcut_values) = clipped_error_vectors(corpus, accuracy_config, opts)?;
    let tau = kendall_tau_b(&wer_values, &charcut_values)?;
    Ok(CorrelationReport {
        tau,
        n_items: corpus.len(),
        wer_clipped_values: wer_values,
        charcut_clipped_values: charcut_values,
    })
}

/// Mean over utterances of `(1 − WERclipped)·(1 − CharCutclipped)`.
pub fn combined_dialog<F: Scalar>(
    corpus: &Corpus,
    accuracy_config: &MatchConfig,
    opts: &NormalizeOptions,
) -> Result<CombinedReport<F>> {
    if corpus.is_empty() {
        return Err(Error::TooFewItems { need: 1, got: 0 });
    }
    let (wer_values, charcut_values) = clipped_error_vectors(corpus, accuracy_config, opts)?;
    let per_utterance: Vec<F> = wer_values
        .iter()
        .zip(&charcut_values)
        .map(|(&w, &c)| (F::one() - w) * (F::one() - c))
        .collect();
    let mut sum = F::zero();
    for &p in &per_utterance {
        sum += p;
    }
    let score = sum / F::from_count(per_utterance.len());
    Ok(CombinedReport {
        per_utterance,
        score,
    })
}

/// Clipped per-utterance WER and CharCut against references, in corpus order.
fn clipped_error_vectors<F: Scalar>(
    corpus: &Corpus,
    accuracy_config: &MatchConfig,
    opts: &NormalizeOptions,
) -> Result<(Vec<F>, Vec<F>)> {
    let wer = corpus_wer::<F>(corpus, opts)?;
    let wer_values: Vec<F> = wer.per_utterance.iter().map(|e| e.wer_clipped).collect();
    let mut charcut_values = Vec::with_capacity(corpus.len());
    for utt in corpus.utterances() {
        let reference = utt.ref_translation()?;
        let result = charcut_match(
            &normalize_with(&utt.hyp_translation, NormMode::RawCased, &Default::default()).text(),
            &normalize_with(reference, NormMode::RawCased, &Default::default()).text(),
            accuracy_config,
        );
        charcut_values.push(score_from_counts::<F>(&result).clipped);
    }
    Ok((wer_values, charcut_values))
}
