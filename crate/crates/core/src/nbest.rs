//! N-best candidate lists produced by external beam search.
//!
//! JSONL schema, one candidate per line:
//!
//! ```json
//! {"id": "u1", "rank": 0, "transcript": "...", "translation": "...",
//!  "transcript_score": -1.2, "translation_score": -0.7, "joint_score": -1.9}
//! ```
//!
//! Paired rescoring expects both texts per record; cross-product rescoring
//! also accepts one-sided records (transcript-only or translation-only).

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One candidate row from an n-best file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBestEntry {
    pub rank: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_score: Option<f64>,
}

/// All candidates for one utterance, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct NBestList {
    pub id: String,
    pub entries: Vec<NBestEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    id: String,
    rank: i64,
    #[serde(default)]
    transcript: Option<String>,
    #[serde(default)]
    translation: Option<String>,
    #[serde(default)]
    transcript_score: Option<f64>,
    #[serde(default)]
    translation_score: Option<f64>,
    #[serde(default)]
    joint_score: Option<f64>,
}

pub fn load_nbest(path: impl AsRef<Path>) -> Result<Vec<NBestList>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    nbest_from_reader(file, &path.to_string_lossy())
}

/// Parses n-best JSONL, grouping candidates by utterance id. Ids appear in
/// first-occurrence order; candidates keep file order within each list.
pub fn nbest_from_reader(reader: impl Read, source_path: &str) -> Result<Vec<NBestList>> {
    let mut lists: Vec<NBestList> = Vec::new();
    let mut index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawEntry = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: source_path.to_owned(),
            line: idx + 1,
            msg: e.to_string(),
        })?;
        if raw.id.is_empty() {
            return Err(Error::EmptyId {
                path: source_path.to_owned(),
                line: idx + 1,
            });
        }
        if raw.transcript.is_none() && raw.translation.is_none() {
            return Err(Error::EmptySidesNBest {
                id: raw.id,
                rank: raw.rank,
            });
        }
        let entry = NBestEntry {
            rank: raw.rank,
            transcript: raw.transcript,
            translation: raw.translation,
            transcript_score: raw.transcript_score,
            translation_score: raw.translation_score,
            joint_score: raw.joint_score,
        };
        match index.get(&raw.id) {
            Some(&pos) => lists[pos].entries.push(entry),
            None => {
                index.insert(raw.id.clone(), lists.len());
                lists.push(NBestList {
                    id: raw.id,
                    entries: vec![entry],
                });
            }
        }
    }
    Ok(lists)
}
