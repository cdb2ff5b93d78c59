//! Consistency-driven n-best rescoring.
//!
//! Given candidate (transcript, translation) pairs from external beam
//! search, selects the pair with the lowest length-normalized lexical
//! consistency penalty. Model scores never enter the objective; they only
//! break exact penalty ties.

use crate::consistency::utterance_penalty;
use crate::corpus::{normalize_with, NormMode, NormalizeOptions};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::nbest::NBestList;
use crate::scalar::Scalar;

/// How candidate pairs are formed from an n-best list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescoreMode {
    /// Each record already carries both texts.
    Paired,
    /// Transcript-side and translation-side candidates are combined as a
    /// full cross product.
    Cross,
}

/// One admissible (transcript, translation) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub transcript: String,
    pub translation: String,
    pub transcript_score: Option<f64>,
    pub translation_score: Option<f64>,
    pub joint_score: Option<f64>,
    /// (transcript rank, translation rank); equal for paired candidates.
    pub origin: (i64, i64),
}

/// A candidate together with its penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate<F> {
    pub pair: CandidatePair,
    /// ½(t_to_s/|t| + s_to_t/|s|) with lengths clamped to at least 1.
    pub penalty: F,
}

/// Rescoring outcome: the selected pair and the full ranking it won.
#[derive(Debug, Clone, PartialEq)]
pub struct RescoreResult<F> {
    pub id: String,
    pub selected: RankedCandidate<F>,
    /// Every admissible candidate exactly once, in scoring order.
    pub ranking: Vec<RankedCandidate<F>>,
    pub mode: RescoreMode,
}

/// Selects the candidate pair with the best (lowest) lexical consistency
/// penalty.
///
/// Ties are broken by higher joint model score when both candidates carry
/// one, then by (transcript rank, translation rank) lexicographic order.
pub fn rescore<F: Scalar>(
    nbest: &NBestList,
    lex_st: &Lexicon<F>,
    lex_ts: &Lexicon<F>,
    mode: RescoreMode,
    opts: &NormalizeOptions,
) -> Result<RescoreResult<F>> {
    let pairs = admissible_pairs(nbest, mode)?;
    let mut ranking = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let transcript = normalize_with(&pair.transcript, NormMode::Lexical, opts);
        let translation = normalize_with(&pair.translation, NormMode::Lexical, opts);
        let penalty = utterance_penalty(&transcript, &translation, lex_st, lex_ts);
        let t_len = F::from_count(penalty.translated_words.max(1));
        let s_len = F::from_count(penalty.transcribed_words.max(1));
        let normalized = F::from_f64(0.5) * (penalty.t_to_s / t_len + penalty.s_to_t / s_len);
        ranking.push(RankedCandidate {
            pair,
            penalty: normalized,
        });
    }
    let selected = ranking
        .iter()
        .min_by(|a, b| compare_candidates(a, b))
        .expect("ranking non-empty")
        .clone();
    Ok(RescoreResult {
        id: nbest.id.clone(),
        selected,
        ranking,
        mode,
    })
}

fn compare_candidates<F: Scalar>(
    a: &RankedCandidate<F>,
    b: &RankedCandidate<F>,
) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match a.penalty.partial_cmp(&b.penalty) {
        Some(Ordering::Equal) | None => {}
        Some(ord) => return ord,
    }
    if let (Some(ja), Some(jb)) = (a.pair.joint_score, b.pair.joint_score) {
        // Higher model score wins the tie.
        match jb.partial_cmp(&ja) {
            Some(Ordering::Equal) | None => {}
            Some(ord) => return ord,
        }
    }
    a.pair.origin.cmp(&b.pair.origin)
}

fn admissible_pairs(nbest: &NBestList, mode: RescoreMode) -> Result<Vec<CandidatePair>> {
    if nbest.entries.is_empty() {
        return Err(Error::EmptyNBest {
            id: nbest.id.clone(),
        });
    }
    match mode {
        RescoreMode::Paired => {
            let mut pairs = Vec::with_capacity(nbest.entries.len());
            for entry in &nbest.entries {
                let (transcript, translation) = match (&entry.transcript, &entry.translation) {
                    (Some(s), Some(t)) => (s.clone(), t.clone()),
                    _ => {
                        return Err(Error::OneSidedCandidate {
                            id: nbest.id.clone(),
                            rank: entry.rank,
                        })
                    }
                };
                pairs.push(CandidatePair {
                    transcript,
                    translation,
                    transcript_score: entry.transcript_score,
                    translation_score: entry.translation_score,
                    joint_score: entry.joint_score,
                    origin: (entry.rank, entry.rank),
                });
            }
            Ok(pairs)
        }
        RescoreMode::Cross => {
            let transcripts: Vec<(&str, i64, Option<f64>)> = nbest
                .entries
                .iter()
                .filter_map(|e| e.transcript.as_deref().map(|s| (s, e.rank, e.transcript_score)))
                .collect();
            let translations: Vec<(&str, i64, Option<f64>)> = nbest
                .entries
                .iter()
                .filter_map(|e| e.translation.as_deref().map(|t| (t, e.rank, e.translation_score)))
                .collect();
            if transcripts.is_empty() {
                return Err(Error::MissingSide {
                    id: nbest.id.clone(),
                    side: "transcript",
                });
            }
            if translations.is_empty() {
                return Err(Error::MissingSide {
                    id: nbest.id.clone(),
                    side: "translation",
                });
            }
            let mut pairs = Vec::with_capacity(transcripts.len() * translations.len());
            for &(s, s_rank, s_score) in &transcripts {
                for &(t, t_rank, t_score) in &translations {
                    let joint = match (s_score, t_score) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                    pairs.push(CandidatePair {
                        transcript: s.to_owned(),
                        translation: t.to_owned(),
                        transcript_score: s_score,
                        translation_score: t_score,
                        joint_score: joint,
                        origin: (s_rank, t_rank),
                    });
                }
            }
            Ok(pairs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nbest::NBestEntry;

    fn entry(rank: i64, transcript: Option<&str>, translation: Option<&str>) -> NBestEntry {
        NBestEntry {
            rank,
            transcript: transcript.map(str::to_owned),
            translation: translation.map(str::to_owned),
            transcript_score: None,
            translation_score: None,
            joint_score: None,
        }
    }

    fn lexicons() -> (Lexicon<f64>, Lexicon<f64>) {
        let lex_st = Lexicon::from_probs(
            ("s", "t"),
            &[
                ("a", "x", 0.9),
                ("a", "y", 0.1),
                ("b", "y", 0.8),
                ("b", "x", 0.2),
            ],
        )
        .unwrap();
        let lex_ts = Lexicon::from_probs(
            ("t", "s"),
            &[
                ("x", "a", 0.9),
                ("x", "b", 0.1),
                ("y", "b", 0.8),
                ("y", "a", 0.2),
            ],
        )
        .unwrap();
        (lex_st, lex_ts)
    }

    #[test]
    fn singleton_is_selected() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![entry(0, Some("a"), Some("x"))],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert_eq!(r.selected.pair.transcript, "a");
        assert_eq!(r.ranking.len(), 1);
    }

    #[test]
    fn oov_candidate_loses() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![
                entry(0, Some("a"), Some("x")),
                entry(1, Some("a"), Some("qqq")),
            ],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert_eq!(r.selected.pair.translation, "x");
        assert!(r.ranking[1].penalty > r.ranking[0].penalty);
    }

    #[test]
    fn cross_mode_matches_exhaustive_argmin() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![
                entry(0, Some("a"), None),
                entry(1, Some("b"), None),
                entry(0, None, Some("y")),
                entry(1, None, Some("x")),
            ],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Cross, &Default::default()).unwrap();
        assert_eq!(r.ranking.len(), 4);
        let best = r
            .ranking
            .iter()
            .min_by(|a, b| {
                a.penalty
                    .partial_cmp(&b.penalty)
                    .unwrap()
                    .then(a.pair.origin.cmp(&b.pair.origin))
            })
            .unwrap();
        assert_eq!(r.selected, *best);
        // (a, x) is the most probable pairing in both directions.
        assert_eq!(r.selected.pair.origin, (0, 1));
    }

    #[test]
    fn identical_candidates_tie_break_to_first_rank() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![
                entry(1, Some("a"), Some("x")),
                entry(2, Some("a"), Some("x")),
                entry(3, Some("a"), Some("x")),
            ],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert_eq!(r.selected.pair.origin, (1, 1));
    }

    #[test]
    fn joint_score_breaks_ties_before_rank() {
        let (st, ts) = lexicons();
        let mut e1 = entry(1, Some("a"), Some("x"));
        e1.joint_score = Some(-2.0);
        let mut e2 = entry(2, Some("a"), Some("x"));
        e2.joint_score = Some(-1.0);
        let list = NBestList {
            id: "u1".into(),
            entries: vec![e1, e2],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert_eq!(r.selected.pair.origin, (2, 2));
    }

    #[test]
    fn selected_text_always_comes_from_input() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![
                entry(0, Some("a b"), Some("x y")),
                entry(1, Some("b"), Some("y")),
            ],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert!(list.entries.iter().any(|e| {
            e.transcript.as_deref() == Some(r.selected.pair.transcript.as_str())
                && e.translation.as_deref() == Some(r.selected.pair.translation.as_str())
        }));
    }

    #[test]
    fn adding_a_candidate_only_changes_selection_to_it() {
        let (st, ts) = lexicons();
        let base = vec![entry(0, Some("a"), Some("y")), entry(1, Some("b"), Some("x"))];
        let list = NBestList {
            id: "u1".into(),
            entries: base.clone(),
        };
        let before = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        let mut extended = base;
        extended.push(entry(2, Some("a"), Some("x")));
        let list = NBestList {
            id: "u1".into(),
            entries: extended,
        };
        let after = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert!(
            after.selected.pair == before.selected.pair || after.selected.pair.origin == (2, 2)
        );
    }

    #[test]
    fn empty_candidate_set_is_rejected() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![],
        };
        assert!(matches!(
            rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()),
            Err(Error::EmptyNBest { .. })
        ));
    }

    #[test]
    fn cross_mode_requires_both_sides() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![entry(0, Some("a"), None)],
        };
        assert!(matches!(
            rescore(&list, &st, &ts, RescoreMode::Cross, &Default::default()),
            Err(Error::MissingSide { side: "translation", .. })
        ));
    }

    #[test]
    fn paired_mode_rejects_one_sided_entries() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![entry(0, Some("a"), None)],
        };
        assert!(matches!(
            rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()),
            Err(Error::OneSidedCandidate { .. })
        ));
    }

    #[test]
    fn empty_candidate_text_ranks_last_in_normal_cases() {
        let (st, ts) = lexicons();
        let list = NBestList {
            id: "u1".into(),
            entries: vec![entry(0, Some("a"), Some("x")), entry(1, Some(""), Some("x"))],
        };
        let r = rescore(&list, &st, &ts, RescoreMode::Paired, &Default::default()).unwrap();
        assert_eq!(r.selected.pair.origin, (0, 0));
    }
}
