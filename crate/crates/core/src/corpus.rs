//! Corpus loading and text normalization.
//!
//! Evaluation corpora are JSONL files with one utterance per line:
//!
//! ```json
//! {"id": "u1", "hyp_transcript": "...", "hyp_translation": "...",
//!  "ref_transcript": "...", "ref_translation": "..."}
//! ```
//!
//! `hyp_*` fields are required (empty strings are legal), `ref_*` fields are
//! optional. Metrics that need an absent reference refuse to compute instead
//! of silently skipping utterances.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::error::{Error, Result};

/// Normalization pipeline applied to raw text before metric computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormMode {
    /// NFC, lowercase, non-speech markers removed, punctuation stripped,
    /// whitespace-split. Used for WER against transcript references.
    WerTranscript,
    /// Same pipeline as [`NormMode::WerTranscript`], applied to transcripts
    /// and translations alike for lexicon lookups and training.
    Lexical,
    /// NFC only; case and punctuation preserved. Used by the case-sensitive
    /// surface-form matcher.
    RawCased,
}

/// A normalized token sequence together with the pipeline that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    tokens: Vec<String>,
    mode: NormMode,
}

impl TokenSeq {
    /// Builds a sequence from pre-tokenized text (whitespace-separated).
    /// Tagged [`NormMode::RawCased`] since no pipeline beyond splitting ran.
    pub fn whitespace_split(text: &str) -> TokenSeq {
        TokenSeq {
            tokens: text.split_whitespace().map(str::to_owned).collect(),
            mode: NormMode::RawCased,
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces. For a `RawCased` sequence produced by
    /// [`normalize`] this is the NFC text itself.
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    pub(crate) fn expect_mode(&self, expected: NormMode) -> Result<()> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                expected,
                got: self.mode,
            })
        }
    }
}

/// Options for [`normalize_with`]. The default marker rule treats any
/// parenthesized span without a sentence-internal period as a non-speech
/// marker; a custom pattern replaces that rule entirely.
#[derive(Debug, Clone, Default)]
pub struct NormalizeOptions {
    pub marker_pattern: Option<Regex>,
}

/// Normalizes raw text under the default options.
pub fn normalize(text: &str, mode: NormMode) -> TokenSeq {
    normalize_with(text, mode, &NormalizeOptions::default())
}

/// Normalizes raw text into a [`TokenSeq`].
///
/// `WerTranscript` and `Lexical` run the full pipeline: NFC, lowercase,
/// marker removal, punctuation stripping (word-internal apostrophes are
/// kept), whitespace split. `RawCased` applies NFC only and yields the whole
/// string as a single token (or no token for empty input).
pub fn normalize_with(text: &str, mode: NormMode, opts: &NormalizeOptions) -> TokenSeq {
    let nfc: String = text.nfc().collect();
    match mode {
        NormMode::RawCased => TokenSeq {
            tokens: if nfc.is_empty() { vec![] } else { vec![nfc] },
            mode,
        },
        NormMode::WerTranscript | NormMode::Lexical => {
            let lowered = nfc.to_lowercase();
            let unmarked = match &opts.marker_pattern {
                Some(re) => re.replace_all(&lowered, "").into_owned(),
                None => strip_default_markers(&lowered),
            };
            let stripped = strip_punctuation(&unmarked);
            TokenSeq {
                tokens: stripped.split_whitespace().map(str::to_owned).collect(),
                mode,
            }
        }
    }
}

/// Removes parenthesized non-speech markers such as `(laughter)`.
///
/// A span `( ... )` is removed when its content holds no sentence-internal
/// period, i.e. no `.` before the last non-space character. Nested
/// parentheses are not interpreted; scanning resumes after each `)`.
fn strip_default_markers(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '(' {
            if let Some(close) = chars[i + 1..].iter().position(|&c| c == ')') {
                let content = &chars[i + 1..i + 1 + close];
                if !has_internal_period(content) {
                    i += close + 2; // drop "(content)"
                    continue;
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn has_internal_period(content: &[char]) -> bool {
    let last_non_space = match content.iter().rposition(|c| !c.is_whitespace()) {
        Some(p) => p,
        None => return false,
    };
    content[..last_non_space].contains(&'.')
}

/// Deletes Unicode punctuation (category P*), keeping apostrophes that sit
/// between two alphanumeric characters ("don't" stays intact).
fn strip_punctuation(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.general_category_group() != GeneralCategoryGroup::Punctuation {
            out.push(c);
            continue;
        }
        let internal_apostrophe = (c == '\'' || c == '\u{2019}')
            && i > 0
            && chars[i - 1].is_alphanumeric()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if internal_apostrophe {
            out.push(c);
        }
    }
    out
}

/// One test item: a hypothesis transcript/translation pair with optional
/// references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub hyp_transcript: String,
    pub hyp_translation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_transcript: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_translation: Option<String>,
}

impl Utterance {
    pub fn ref_transcript(&self) -> Result<&str> {
        self.ref_transcript
            .as_deref()
            .ok_or_else(|| Error::MissingReference {
                id: self.id.clone(),
                side: "transcript",
            })
    }

    pub fn ref_translation(&self) -> Result<&str> {
        self.ref_translation
            .as_deref()
            .ok_or_else(|| Error::MissingReference {
                id: self.id.clone(),
                side: "translation",
            })
    }
}

/// An ordered evaluation corpus. File order is preserved through every
/// computation; per-utterance vectors elsewhere in this crate index into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    utterances: Vec<Utterance>,
    source_path: String,
}

impl Corpus {
    /// Validates id uniqueness and builds a corpus from records in order.
    pub fn new(utterances: Vec<Utterance>, source_path: impl Into<String>) -> Result<Corpus> {
        let mut seen = std::collections::HashSet::new();
        for utt in &utterances {
            if utt.id.is_empty() {
                return Err(Error::EmptyId {
                    path: "<memory>".into(),
                    line: 0,
                });
            }
            if !seen.insert(utt.id.clone()) {
                return Err(Error::DuplicateId(utt.id.clone()));
            }
        }
        Ok(Corpus {
            utterances,
            source_path: source_path.into(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Corpus> {
        let path = path.as_ref();
        let file = File::open(path)?;
        Corpus::from_reader(file, &path.to_string_lossy())
    }

    /// Parses JSONL from any reader; `source_path` is recorded as provenance.
    pub fn from_reader(reader: impl Read, source_path: &str) -> Result<Corpus> {
        let mut utterances = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let utt: Utterance =
                serde_json::from_str(line).map_err(|e| Error::Parse {
                    path: source_path.to_owned(),
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
            if utt.id.is_empty() {
                return Err(Error::EmptyId {
                    path: source_path.to_owned(),
                    line: idx + 1,
                });
            }
            if !seen.insert(utt.id.clone()) {
                return Err(Error::DuplicateId(utt.id));
            }
            utterances.push(utt);
        }
        Ok(Corpus {
            utterances,
            source_path: source_path.to_owned(),
        })
    }

    /// Writes the corpus back out as JSONL (LF line endings).
    pub fn to_writer(&self, mut writer: impl Write) -> Result<()> {
        for utt in &self.utterances {
            serde_json::to_writer(&mut writer, utt)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writer.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }
}
