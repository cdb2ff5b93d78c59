//! Cross-attachment label-smoothing targets.
//!
//! For each output position the reference token keeps mass `1 − ε` and `ε`
//! is spread uniformly over the token occurrences of the opposite side, so a
//! trainer can encourage transcripts to reuse translated tokens and vice
//! versa. Rows are sparse distributions keyed by token.

use std::collections::{BTreeMap, HashSet};

use crate::corpus::TokenSeq;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which output sequence the rows target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSide {
    Transcript,
    Translation,
}

impl TargetSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            TargetSide::Transcript => "transcript",
            TargetSide::Translation => "translation",
        }
    }
}

/// How the smoothing mass is spread over the opposite side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothingVariant {
    /// `ε/|s|` per token occurrence; duplicated tokens accumulate mass.
    #[default]
    Occurrences,
    /// `ε/|distinct(s)|` per distinct token.
    DistinctTypes,
}

/// Per-position sparse target distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedTargets<F> {
    pub side: TargetSide,
    pub epsilon: F,
    /// One row per output position; each row sums to 1 within 1e-12.
    pub rows: Vec<BTreeMap<String, F>>,
    /// Identifier of the vocabulary the tokens were checked against.
    pub vocab_ref: String,
}

/// Builds smoothing targets for one (transcript, translation) pair.
///
/// For `TargetSide::Translation`, row i places `1 − ε` on translation token i
/// plus `ε/|s|` per occurrence of each transcript token (duplicates
/// accumulate); symmetric for `TargetSide::Transcript`. All tokens of both
/// sequences must be in `vocab`.
pub fn smoothing_targets<F: Scalar>(
    s_tokens: &TokenSeq,
    t_tokens: &TokenSeq,
    side: TargetSide,
    epsilon: F,
    vocab: &HashSet<String>,
    vocab_ref: &str,
) -> Result<SmoothedTargets<F>> {
    smoothing_targets_with_variant(
        s_tokens,
        t_tokens,
        side,
        epsilon,
        vocab,
        vocab_ref,
        SmoothingVariant::Occurrences,
    )
}

/// [`smoothing_targets`] with an explicit spreading rule.
pub fn smoothing_targets_with_variant<F: Scalar>(
    s_tokens: &TokenSeq,
    t_tokens: &TokenSeq,
    side: TargetSide,
    epsilon: F,
    vocab: &HashSet<String>,
    vocab_ref: &str,
    variant: SmoothingVariant,
) -> Result<SmoothedTargets<F>> {
    if epsilon < F::zero() || epsilon > F::one() {
        return Err(Error::BadEpsilon(epsilon.to_f64().unwrap_or(f64::NAN)));
    }
    for token in s_tokens.tokens().iter().chain(t_tokens.tokens()) {
        if !vocab.contains(token) {
            return Err(Error::TokenNotInVocab(token.clone()));
        }
    }
    let (outputs, opposite) = match side {
        TargetSide::Transcript => (s_tokens.tokens(), t_tokens.tokens()),
        TargetSide::Translation => (t_tokens.tokens(), s_tokens.tokens()),
    };
    if epsilon > F::zero() && opposite.is_empty() {
        return Err(Error::EmptyOppositeSide);
    }
    let spread: Vec<&String> = match variant {
        SmoothingVariant::Occurrences => opposite.iter().collect(),
        SmoothingVariant::DistinctTypes => {
            let mut seen = HashSet::new();
            opposite.iter().filter(|w| seen.insert(w.as_str())).collect()
        }
    };
    let share = if spread.is_empty() {
        F::zero()
    } else {
        epsilon / F::from_count(spread.len())
    };
    let mut rows = Vec::with_capacity(outputs.len());
    for reference in outputs {
        let mut row: BTreeMap<String, F> = BTreeMap::new();
        row.insert(reference.clone(), F::one() - epsilon);
        if share > F::zero() {
            for w in &spread {
                *row.entry((*w).clone()).or_insert_with(F::zero) += share;
            }
        }
        rows.push(row);
    }
    Ok(SmoothedTargets {
        side,
        epsilon,
        rows,
        vocab_ref: vocab_ref.to_owned(),
    })
}
