//! Character-level substring matching and the CharCut-style error score.
//!
//! Two strings are decomposed into non-overlapping common substrings by
//! repeated longest-common-substring extraction; leftover characters count as
//! insertions (candidate side) and deletions (reference side), and matches
//! that break monotone order count as shifts. The score is
//! `(deletions + insertions + shifts) / (|cand| + |ref|)`.

use unicode_normalization::UnicodeNormalization;

use crate::scalar::Scalar;

/// Matcher configuration.
///
/// [`MatchConfig::accuracy`] is used when comparing a translation hypothesis
/// against a reference translation; [`MatchConfig::consistency`] when
/// comparing a translation against its own transcript (longer minimum match,
/// case-sensitive, no prefix/suffix pre-matching).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchConfig {
    /// Minimum match length for the greedy phase.
    pub min_len: usize,
    pub case_sensitive: bool,
    /// Match the longest common prefix and suffix first, regardless of
    /// `min_len`.
    pub prefix_suffix: bool,
}

impl MatchConfig {
    pub fn accuracy() -> MatchConfig {
        MatchConfig {
            min_len: 3,
            case_sensitive: false,
            prefix_suffix: true,
        }
    }

    pub fn consistency() -> MatchConfig {
        MatchConfig {
            min_len: 5,
            case_sensitive: true,
            prefix_suffix: false,
        }
    }
}

/// One committed substring match (character offsets, length in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub cand_start: usize,
    pub ref_start: usize,
    pub len: usize,
}

/// Decomposition of a candidate/reference pair into matches and leftovers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub matched: Vec<Match>,
    /// Total length of the maximum-weight monotone subset of `matched`.
    pub monotone_weight: usize,
    /// Total length of matches outside that subset.
    pub shift_cost: usize,
    /// Unmatched candidate characters.
    pub insertions: usize,
    /// Unmatched reference characters.
    pub deletions: usize,
    pub cand_len: usize,
    pub ref_len: usize,
}

impl MatchResult {
    pub fn mismatch_count(&self) -> usize {
        self.deletions + self.insertions + self.shift_cost
    }
}

/// CharCut-style error score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharCutScore<F> {
    /// (deletions + insertions + shifts) / (|cand| + |ref|); 0 for two empty
    /// strings.
    pub raw: F,
    /// min(raw, 1).
    pub clipped: F,
}

/// Decomposes `cand` against `reference` under `config`.
///
/// Greedy extraction takes the longest common substring over still-unmatched
/// positions each round, breaking ties by smaller sum of start positions,
/// then smaller minimum start position, then smaller candidate start, until
/// no common substring of at least `min_len` remains. With `prefix_suffix`
/// enabled the longest common prefix and suffix are matched beforehand.
pub fn charcut_match(cand: &str, reference: &str, config: &MatchConfig) -> MatchResult {
    let cand_chars: Vec<char> = cand.chars().collect();
    let ref_chars: Vec<char> = reference.chars().collect();
    let cand_cmp = fold_case(&cand_chars, config.case_sensitive);
    let ref_cmp = fold_case(&ref_chars, config.case_sensitive);

    let nc = cand_cmp.len();
    let nr = ref_cmp.len();
    let mut cand_used = vec![false; nc];
    let mut ref_used = vec![false; nr];
    let mut matched: Vec<Match> = Vec::new();

    if config.prefix_suffix {
        let mut prefix = 0;
        while prefix < nc && prefix < nr && cand_cmp[prefix] == ref_cmp[prefix] {
            prefix += 1;
        }
        if prefix > 0 {
            commit(
                Match {
                    cand_start: 0,
                    ref_start: 0,
                    len: prefix,
                },
                &mut matched,
                &mut cand_used,
                &mut ref_used,
            );
        }
        let mut suffix = 0;
        while suffix < nc - prefix
            && suffix < nr - prefix
            && cand_cmp[nc - 1 - suffix] == ref_cmp[nr - 1 - suffix]
        {
            suffix += 1;
        }
        if suffix > 0 {
            commit(
                Match {
                    cand_start: nc - suffix,
                    ref_start: nr - suffix,
                    len: suffix,
                },
                &mut matched,
                &mut cand_used,
                &mut ref_used,
            );
        }
    }

    while let Some(best) = longest_unmatched_match(
        &cand_cmp,
        &ref_cmp,
        &cand_used,
        &ref_used,
        config.min_len,
    ) {
        commit(best, &mut matched, &mut cand_used, &mut ref_used);
    }

    matched.sort_by_key(|m| (m.cand_start, m.ref_start));
    let total_matched: usize = matched.iter().map(|m| m.len).sum();
    let monotone_weight = monotone_subset_weight(&matched);
    MatchResult {
        shift_cost: total_matched - monotone_weight,
        monotone_weight,
        insertions: nc - total_matched,
        deletions: nr - total_matched,
        cand_len: nc,
        ref_len: nr,
        matched,
    }
}

/// Scores `hyp` against `reference`: NFC normalization, matching under
/// `config`, then the mismatch ratio.
pub fn charcut<F: Scalar>(hyp: &str, reference: &str, config: &MatchConfig) -> CharCutScore<F> {
    let hyp: String = hyp.nfc().collect();
    let reference: String = reference.nfc().collect();
    let result = charcut_match(&hyp, &reference, config);
    score_from_counts(&result)
}

pub fn score_from_counts<F: Scalar>(result: &MatchResult) -> CharCutScore<F> {
    let total = result.cand_len + result.ref_len;
    let raw = if total == 0 {
        F::zero()
    } else {
        F::from_count(result.mismatch_count()) / F::from_count(total)
    };
    CharCutScore {
        raw,
        clipped: raw.min(F::one()),
    }
}

/// Per-utterance match counts and score for translation accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtteranceCharCut<F> {
    pub insertions: usize,
    pub deletions: usize,
    pub shift: usize,
    pub cand_len: usize,
    pub ref_len: usize,
    pub score: CharCutScore<F>,
}

/// Per-utterance scores plus the corpus-level ratio (counts aggregated
/// before division) for hypothesis translations against references.
#[derive(Debug, Clone)]
pub struct CorpusCharCut<F> {
    pub per_utterance: Vec<UtteranceCharCut<F>>,
    pub corpus_ratio: F,
}

pub fn corpus_charcut<F: Scalar>(
    corpus: &crate::corpus::Corpus,
    config: &MatchConfig,
) -> crate::error::Result<CorpusCharCut<F>> {
    use crate::corpus::{normalize, NormMode};
    let mut per_utterance = Vec::with_capacity(corpus.len());
    let mut total_mismatch = 0usize;
    let mut total_len = 0usize;
    for utt in corpus.utterances() {
        let cand = normalize(&utt.hyp_translation, NormMode::RawCased);
        let reference = normalize(utt.ref_translation()?, NormMode::RawCased);
        let result = charcut_match(&cand.text(), &reference.text(), config);
        total_mismatch += result.mismatch_count();
        total_len += result.cand_len + result.ref_len;
        per_utterance.push(UtteranceCharCut {
            insertions: result.insertions,
            deletions: result.deletions,
            shift: result.shift_cost,
            cand_len: result.cand_len,
            ref_len: result.ref_len,
            score: score_from_counts(&result),
        });
    }
    let corpus_ratio = if total_len == 0 {
        F::zero()
    } else {
        F::from_count(total_mismatch) / F::from_count(total_len)
    };
    Ok(CorpusCharCut {
        per_utterance,
        corpus_ratio,
    })
}

fn fold_case(chars: &[char], case_sensitive: bool) -> Vec<char> {
    if case_sensitive {
        chars.to_vec()
    } else {
        // Length-preserving fold: first char of the lowercase expansion.
        chars
            .iter()
            .map(|c| c.to_lowercase().next().unwrap_or(*c))
            .collect()
    }
}

fn commit(m: Match, matched: &mut Vec<Match>, cand_used: &mut [bool], ref_used: &mut [bool]) {
    for flag in &mut cand_used[m.cand_start..m.cand_start + m.len] {
        *flag = true;
    }
    for flag in &mut ref_used[m.ref_start..m.ref_start + m.len] {
        *flag = true;
    }
    matched.push(m);
}

/// Finds the longest common substring over unmatched positions, applying the
/// deterministic tie-break. Returns `None` once nothing of length `min_len`
/// remains.
fn longest_unmatched_match(
    cand: &[char],
    reference: &[char],
    cand_used: &[bool],
    ref_used: &[bool],
    min_len: usize,
) -> Option<Match> {
    let nc = cand.len();
    let nr = reference.len();
    if nc == 0 || nr == 0 {
        return None;
    }
    let mut best: Option<Match> = None;
    let mut best_len = min_len.max(1);
    // run[j]: length of the common run ending at (i, j); rolled over i.
    let mut prev = vec![0usize; nr];
    let mut curr = vec![0usize; nr];
    for i in 0..nc {
        for j in 0..nr {
            let run = if cand[i] == reference[j] && !cand_used[i] && !ref_used[j] {
                if i > 0 && j > 0 {
                    prev[j - 1] + 1
                } else {
                    1
                }
            } else {
                0
            };
            curr[j] = run;
            if run < best_len {
                continue;
            }
            let candidate = Match {
                cand_start: i + 1 - run,
                ref_start: j + 1 - run,
                len: run,
            };
            let better = match &best {
                _ if run > best_len => true,
                None => true,
                Some(b) => prefer(candidate, *b),
            };
            if better {
                best_len = run;
                best = Some(candidate);
            }
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    best
}

/// Tie-break among equal-length matches: smaller sum of start positions,
/// then smaller minimum start position, then smaller candidate start.
fn prefer(a: Match, b: Match) -> bool {
    let key = |m: Match| {
        (
            m.cand_start + m.ref_start,
            m.cand_start.min(m.ref_start),
            m.cand_start,
        )
    };
    key(a) < key(b)
}

/// Maximum total length over subsets of matches strictly increasing in both
/// start coordinates. Matches must be sorted by candidate start.
fn monotone_subset_weight(matched: &[Match]) -> usize {
    let k = matched.len();
    let mut best = vec![0usize; k];
    let mut overall = 0;
    for i in 0..k {
        best[i] = matched[i].len;
        for j in 0..i {
            if matched[j].cand_start < matched[i].cand_start
                && matched[j].ref_start < matched[i].ref_start
            {
                best[i] = best[i].max(best[j] + matched[i].len);
            }
        }
        overall = overall.max(best[i]);
    }
    overall
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_one_match() {
        let r = charcut_match("Bill Gross", "Bill Gross", &MatchConfig::consistency());
        assert_eq!(r.matched, vec![Match { cand_start: 0, ref_start: 0, len: 10 }]);
        assert_eq!(r.insertions, 0);
        assert_eq!(r.deletions, 0);
        assert_eq!(r.shift_cost, 0);
    }

    #[test]
    fn disjoint_strings_have_no_matches() {
        let r = charcut_match("abcde", "vwxyz", &MatchConfig::consistency());
        assert!(r.matched.is_empty());
        assert_eq!(r.insertions, 5);
        assert_eq!(r.deletions, 5);
    }

    #[test]
    fn bill_gross_hand_oracle() {
        let r = charcut_match("Bill Gross ja", "Bill Gross ok", &MatchConfig::consistency());
        assert_eq!(r.matched, vec![Match { cand_start: 0, ref_start: 0, len: 11 }]);
        assert_eq!(r.insertions, 2);
        assert_eq!(r.deletions, 2);
        assert_eq!(r.shift_cost, 0);
        let score: CharCutScore<f64> = score_from_counts(&r);
        assert!((score.raw - 4.0 / 26.0).abs() < 1e-15);
    }

    #[test]
    fn case_sensitivity_matters_for_consistency_config() {
        let cs = charcut_match("BILL GROSS", "bill gross", &MatchConfig::consistency());
        assert!(cs.matched.is_empty());
        let ci = charcut_match(
            "BILL GROSS",
            "bill gross",
            &MatchConfig {
                case_sensitive: false,
                ..MatchConfig::consistency()
            },
        );
        assert_eq!(ci.matched.len(), 1);
    }

    #[test]
    fn min_len_gates_short_matches() {
        let r = charcut_match("okay", "okay", &MatchConfig::consistency());
        assert!(r.matched.is_empty(), "4 < min_len 5");
        let r = charcut_match("okays", "okays", &MatchConfig::consistency());
        assert_eq!(r.matched.len(), 1);
    }

    #[test]
    fn prefix_suffix_matches_ignore_min_len() {
        let cfg = MatchConfig::accuracy();
        let r = charcut_match("ab XX cd", "ab YY cd", &cfg);
        // Prefix "ab " (3) and suffix " cd" (3) match; middles do not.
        assert_eq!(r.matched.len(), 2);
        assert_eq!(r.insertions, 2);
        assert_eq!(r.deletions, 2);
        assert_eq!(r.shift_cost, 0);
    }

    #[test]
    fn shifted_match_counts_once() {
        // "world hello": both five-char words match but only one can be
        // monotone with the space context; hand check the totals instead.
        let cfg = MatchConfig {
            min_len: 5,
            case_sensitive: true,
            prefix_suffix: false,
        };
        let r = charcut_match("world hello", "hello world", &cfg);
        let total: usize = r.matched.iter().map(|m| m.len).sum();
        assert_eq!(total, r.monotone_weight + r.shift_cost);
        assert!(r.shift_cost >= 5);
        assert_eq!(r.insertions + total, 11);
        assert_eq!(r.deletions + total, 11);
    }

    #[test]
    fn character_conservation() {
        let cfg = MatchConfig::accuracy();
        let cases = [
            ("the quick brown fox", "the quick brown fox jumps"),
            ("abc", ""),
            ("", ""),
            ("aaaa aaaa", "aaaa"),
            ("Bill Gross ja", "ja Bill Gross"),
        ];
        for (c, r) in cases {
            let m = charcut_match(c, r, &cfg);
            let total: usize = m.matched.iter().map(|x| x.len).sum();
            assert_eq!(m.insertions + total, c.chars().count(), "case {c:?}/{r:?}");
            assert_eq!(m.deletions + total, r.chars().count(), "case {c:?}/{r:?}");
        }
    }

    #[test]
    fn positions_participate_at_most_once() {
        let cfg = MatchConfig {
            min_len: 2,
            case_sensitive: true,
            prefix_suffix: false,
        };
        let m = charcut_match("abab", "ababab", &cfg);
        let mut cand_seen = [false; 4];
        let mut ref_seen = [false; 6];
        for mat in &m.matched {
            for seen in &mut cand_seen[mat.cand_start..mat.cand_start + mat.len] {
                assert!(!*seen);
                *seen = true;
            }
            for seen in &mut ref_seen[mat.ref_start..mat.ref_start + mat.len] {
                assert!(!*seen);
                *seen = true;
            }
        }
    }

    #[test]
    fn empty_pair_scores_zero() {
        let s: CharCutScore<f64> = charcut("", "", &MatchConfig::accuracy());
        assert_eq!(s.raw, 0.0);
    }

    #[test]
    fn empty_hypothesis_scores_all_deletions() {
        let s: CharCutScore<f64> = charcut("", "abcdef", &MatchConfig::accuracy());
        assert_eq!(s.raw, 1.0);
        assert_eq!(s.clipped, 1.0);
    }

    #[test]
    fn swap_symmetry_of_raw_score() {
        let cfg = MatchConfig::consistency();
        let cases = [
            ("Bill Gross ja", "Bill Gross ok"),
            ("world hello there", "hello there world"),
            ("aaaa bbbb cccc", "cccc bbbb aaaa"),
        ];
        for (a, b) in cases {
            let ab: CharCutScore<f64> = charcut(a, b, &cfg);
            let ba: CharCutScore<f64> = charcut(b, a, &cfg);
            assert_eq!(ab.raw, ba.raw, "asymmetry for {a:?}/{b:?}");
        }
    }
}
