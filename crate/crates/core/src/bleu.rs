//! Corpus-level BLEU-4 with 13a-style tokenization and exponential smoothing.
//!
//! Scoring is case-insensitive: both sides are lowercased before
//! tokenization. N-gram counts are accumulated over the corpus, the geometric
//! mean of the four precisions is taken, and a brevity penalty applies when
//! the hypothesis side is shorter than the reference side. The k-th
//! consecutive zero-count order receives precision `1/2^k`.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ORDER: usize = 4;

/// Sufficient statistics for one hypothesis/reference pair. Summing these
/// over any subset of a corpus and applying [`bleu_from_stats`] yields that
/// subset's corpus BLEU, which is what the bootstrap resampler does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BleuStats {
    /// Clipped n-gram matches for orders 1..=4.
    pub matches: [usize; MAX_ORDER],
    /// Hypothesis n-gram totals for orders 1..=4.
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn accumulate(&mut self, other: &BleuStats) {
        for k in 0..MAX_ORDER {
            self.matches[k] += other.matches[k];
            self.totals[k] += other.totals[k];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }
}

fn tok_regexes() -> &'static [(Regex, &'static str); 5] {
    static RE: OnceLock<[(Regex, &'static str); 5]> = OnceLock::new();
    RE.get_or_init(|| {
        [
            // Punctuation except period, comma, dash, and digits.
            (
                Regex::new(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])").unwrap(),
                " $1 ",
            ),
            // Period/comma unless preceded by a digit.
            (Regex::new(r"([^0-9])([\.,])").unwrap(), "$1 $2 "),
            // Period/comma unless followed by a digit.
            (Regex::new(r"([\.,])([^0-9])").unwrap(), " $1 $2"),
            // Dash preceded by a digit.
            (Regex::new(r"([0-9])(-)").unwrap(), "$1 $2 "),
            (Regex::new(r"\s+").unwrap(), " "),
        ]
    })
}

/// mteval-13a style tokenization of one segment.
pub fn tokenize_13a(text: &str) -> Vec<String> {
    let mut s = text.replace("<skipped>", "");
    s = s.replace("-\n", "").replace('\n', " ");
    s = s
        .replace("&quot;", "\"")
        .replace("&amp;", "&")
        .replace("&lt;", "<")
        .replace("&gt;", ">");
    let mut s = format!(" {s} ");
    for (re, rep) in tok_regexes() {
        s = re.replace_all(&s, *rep).into_owned();
    }
    s.split_whitespace().map(str::to_owned).collect()
}

fn ngram_counts(tokens: &[String], order: usize) -> HashMap<&[String], usize> {
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if tokens.len() >= order {
        for window in tokens.windows(order) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Statistics for a single segment pair (lowercased, 13a-tokenized).
pub fn sentence_stats(hyp: &str, reference: &str) -> BleuStats {
    let hyp_tokens = tokenize_13a(&hyp.to_lowercase());
    let ref_tokens = tokenize_13a(&reference.to_lowercase());
    let mut stats = BleuStats {
        hyp_len: hyp_tokens.len(),
        ref_len: ref_tokens.len(),
        ..Default::default()
    };
    for order in 1..=MAX_ORDER {
        let hyp_counts = ngram_counts(&hyp_tokens, order);
        let ref_counts = ngram_counts(&ref_tokens, order);
        let total: usize = hyp_counts.values().sum();
        let matched: usize = hyp_counts
            .iter()
            .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
        stats.totals[order - 1] = total;
        stats.matches[order - 1] = matched;
    }
    stats
}

/// Corpus BLEU in [0, 100] from accumulated statistics.
///
/// Orders with no hypothesis n-grams at all are dropped from the geometric
/// mean (effective-order rule); orders with n-grams but zero matches receive
/// the exponential smoothing.
pub fn bleu_from_stats<F: Scalar>(stats: &BleuStats) -> F {
    let half = F::from_f64(0.5);
    let mut smooth = F::one();
    let mut log_precision_sum = F::zero();
    let mut effective_order = 0usize;
    for k in 0..MAX_ORDER {
        if stats.totals[k] == 0 {
            continue;
        }
        effective_order += 1;
        let precision = if stats.matches[k] == 0 {
            smooth = smooth * half;
            smooth
        } else {
            F::from_count(stats.matches[k]) / F::from_count(stats.totals[k])
        };
        log_precision_sum += precision.ln();
    }
    if effective_order == 0 {
        return F::zero();
    }
    let geo_mean = (log_precision_sum / F::from_count(effective_order)).exp();
    let bp = if stats.hyp_len == 0 {
        if stats.ref_len == 0 {
            F::one()
        } else {
            F::zero()
        }
    } else if stats.hyp_len >= stats.ref_len {
        F::one()
    } else {
        (F::one() - F::from_count(stats.ref_len) / F::from_count(stats.hyp_len)).exp()
    };
    F::from_f64(100.0) * bp * geo_mean
}

/// Corpus BLEU plus the per-segment statistics it was accumulated from.
pub fn corpus_bleu_detailed<F: Scalar>(
    hyps: &[impl AsRef<str>],
    refs: &[impl AsRef<str>],
) -> Result<(F, Vec<BleuStats>)> {
    if hyps.len() != refs.len() {
        return Err(Error::LengthMismatch {
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(Error::TooFewItems { need: 1, got: 0 });
    }
    let per_segment: Vec<BleuStats> = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| sentence_stats(h.as_ref(), r.as_ref()))
        .collect();
    let mut total = BleuStats::default();
    for stats in &per_segment {
        total.accumulate(stats);
    }
    Ok((bleu_from_stats(&total), per_segment))
}

/// Corpus BLEU in [0, 100].
pub fn corpus_bleu<F: Scalar>(hyps: &[impl AsRef<str>], refs: &[impl AsRef<str>]) -> Result<F> {
    corpus_bleu_detailed(hyps, refs).map(|(score, _)| score)
}
