//! Word error rate via Levenshtein alignment with unit costs.

use crate::corpus::{NormMode, TokenSeq};
use crate::error::Result;
use crate::scalar::Scalar;

/// Outcome of aligning a hypothesis against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditSummary<F> {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub ref_len: usize,
    /// (S+I+D)/ref_len; positive infinity when the reference is empty and the
    /// hypothesis is not.
    pub wer: F,
    /// min(wer, 1).
    pub wer_clipped: F,
}

impl<F: Scalar> EditSummary<F> {
    pub fn edits(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }
}

/// Computes WER between two [`NormMode::WerTranscript`] token sequences.
///
/// The alignment minimizes S+I+D. Ties between co-optimal alignments are
/// resolved substitution-first, then deletion, then insertion; the total edit
/// count is the same for every co-optimal path.
pub fn wer<F: Scalar>(hyp: &TokenSeq, reference: &TokenSeq) -> Result<EditSummary<F>> {
    hyp.expect_mode(NormMode::WerTranscript)?;
    reference.expect_mode(NormMode::WerTranscript)?;
    Ok(wer_tokens(hyp.tokens(), reference.tokens()))
}

pub(crate) fn wer_tokens<F: Scalar>(hyp: &[String], reference: &[String]) -> EditSummary<F> {
    let n = reference.len();
    let m = hyp.len();

    // dist[i][j]: edit distance between reference[..i] and hyp[..j].
    let mut dist = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in dist.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in dist[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = usize::from(reference[i - 1] != hyp[j - 1]);
            dist[i][j] = (dist[i - 1][j - 1] + sub_cost)
                .min(dist[i - 1][j] + 1)
                .min(dist[i][j - 1] + 1);
        }
    }

    let mut substitutions = 0;
    let mut insertions = 0;
    let mut deletions = 0;
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let sub_cost = usize::from(reference[i - 1] != hyp[j - 1]);
            if dist[i][j] == dist[i - 1][j - 1] + sub_cost {
                substitutions += sub_cost;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dist[i][j] == dist[i - 1][j] + 1 {
            deletions += 1;
            i -= 1;
        } else {
            insertions += 1;
            j -= 1;
        }
    }

    let edits = substitutions + insertions + deletions;
    let (wer, wer_clipped) = if n == 0 {
        if m == 0 {
            (F::zero(), F::zero())
        } else {
            (F::infinity(), F::one())
        }
    } else {
        let w = F::from_count(edits) / F::from_count(n);
        (w, w.min(F::one()))
    };
    EditSummary {
        substitutions,
        insertions,
        deletions,
        ref_len: n,
        wer,
        wer_clipped,
    }
}

/// Per-utterance summaries plus the corpus-level WER (total edits over total
/// reference length) for hypothesis transcripts against references.
#[derive(Debug, Clone)]
pub struct CorpusWer<F> {
    pub per_utterance: Vec<EditSummary<F>>,
    pub corpus_wer: F,
}

pub fn corpus_wer<F: Scalar>(
    corpus: &crate::corpus::Corpus,
    opts: &crate::corpus::NormalizeOptions,
) -> Result<CorpusWer<F>> {
    use crate::corpus::normalize_with;
    let mut per_utterance = Vec::with_capacity(corpus.len());
    let mut total_edits = 0usize;
    let mut total_ref = 0usize;
    for utt in corpus.utterances() {
        let hyp = normalize_with(&utt.hyp_transcript, NormMode::WerTranscript, opts);
        let reference = normalize_with(utt.ref_transcript()?, NormMode::WerTranscript, opts);
        let summary = wer::<F>(&hyp, &reference)?;
        total_edits += summary.edits();
        total_ref += summary.ref_len;
        per_utterance.push(summary);
    }
    let corpus_wer = if total_ref == 0 {
        if total_edits == 0 {
            F::zero()
        } else {
            F::infinity()
        }
    } else {
        F::from_count(total_edits) / F::from_count(total_ref)
    };
    Ok(CorpusWer {
        per_utterance,
        corpus_wer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::normalize;

    fn seq(words: &str) -> TokenSeq {
        normalize(words, NormMode::WerTranscript)
    }

    #[test]
    fn identity_has_zero_errors() {
        let s = seq("hello world");
        let e: EditSummary<f64> = wer(&s, &s).unwrap();
        assert_eq!((e.substitutions, e.insertions, e.deletions), (0, 0, 0));
        assert_eq!(e.wer, 0.0);
    }

    #[test]
    fn single_substitution() {
        let e: EditSummary<f64> = wer(&seq("a x c"), &seq("a b c")).unwrap();
        assert_eq!(e.substitutions, 1);
        assert_eq!(e.edits(), 1);
        assert!((e.wer - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn insertions_can_push_wer_past_one() {
        let e: EditSummary<f64> = wer(&seq("a b c d"), &seq("a")).unwrap();
        assert_eq!(e.insertions, 3);
        assert_eq!(e.wer, 3.0);
        assert_eq!(e.wer_clipped, 1.0);
    }

    #[test]
    fn empty_reference_nonempty_hypothesis() {
        let e: EditSummary<f64> = wer(&seq("a b"), &seq("")).unwrap();
        assert!(e.wer.is_infinite());
        assert_eq!(e.wer_clipped, 1.0);
    }

    #[test]
    fn both_empty_is_zero() {
        let e: EditSummary<f64> = wer(&seq(""), &seq("")).unwrap();
        assert_eq!(e.wer, 0.0);
        assert_eq!(e.wer_clipped, 0.0);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let raw = normalize("a b", NormMode::RawCased);
        assert!(wer::<f64>(&raw, &seq("a b")).is_err());
    }

    #[test]
    fn conservation_of_alignment_counts() {
        // hyp length = matches + substitutions + insertions,
        // ref length = matches + substitutions + deletions.
        let cases = [
            ("a b c d", "a c d e"),
            ("x", "a b c"),
            ("a a a", "a"),
            ("p q r s", ""),
        ];
        for (h, r) in cases {
            let hs = seq(h);
            let rs = seq(r);
            let e: EditSummary<f64> = wer(&hs, &rs).unwrap();
            let matches_h = hs.len() - e.substitutions - e.insertions;
            let matches_r = rs.len() - e.substitutions - e.deletions;
            assert_eq!(matches_h, matches_r, "case {h:?} vs {r:?}");
        }
    }
}
