//! Accuracy and consistency evaluation for paired speech
//! transcription/translation output.
//!
//! A system that both transcribes and translates speech should produce
//! outputs that agree with each other, not just outputs that are accurate in
//! isolation. This crate implements the accuracy side (WER, corpus BLEU, a
//! CharCut-style character overlap score) and four consistency measures over
//! (transcript, translation) pairs, plus the machinery around them: corpus
//! ingestion, IBM Model 1 lexicon estimation, n-best rescoring by lexical
//! consistency, label-smoothing target construction, and bootstrap
//! significance testing.
//!
//! The numeric kernels are generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); the aliases at the crate root fix `f64`, which is what
//! the command-line front end uses.

pub mod bleu;
pub mod charcut;
pub mod consistency;
pub mod corpus;
pub mod error;
pub mod lexicon;
pub mod nbest;
pub mod rescore;
pub mod scalar;
pub mod stats;
pub mod targets;
pub mod wer;

pub use crate::corpus::{
    normalize, normalize_with, Corpus, NormMode, NormalizeOptions, TokenSeq, Utterance,
};
pub use crate::error::{Error, Result};
pub use crate::nbest::{load_nbest, nbest_from_reader, NBestEntry, NBestList};
pub use crate::scalar::Scalar;

/// Default-precision aliases used by the CLI and most callers.
pub type Lexicon = crate::lexicon::Lexicon<f64>;
pub type TrainOutcome = crate::lexicon::TrainOutcome<f64>;
pub type EditSummary = crate::wer::EditSummary<f64>;
pub type CorpusWer = crate::wer::CorpusWer<f64>;
pub type CharCutScore = crate::charcut::CharCutScore<f64>;
pub type BleuStats = crate::bleu::BleuStats;
pub type LexicalConsistencyReport = crate::consistency::LexicalConsistencyReport<f64>;
pub type SurfaceConsistencyReport = crate::consistency::SurfaceConsistencyReport<f64>;
pub type CorrelationReport = crate::consistency::CorrelationReport<f64>;
pub type CombinedReport = crate::consistency::CombinedReport<f64>;
pub type RescoreResult = crate::rescore::RescoreResult<f64>;
pub type SmoothedTargets = crate::targets::SmoothedTargets<f64>;
pub type SignificanceResult = crate::stats::SignificanceResult<f64>;
