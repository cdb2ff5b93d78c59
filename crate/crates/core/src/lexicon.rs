//! Directional word-translation probability tables.
//!
//! Tables are estimated from parallel text with IBM Model 1 EM, optionally
//! weighted by a fixed reparameterized diagonal alignment prior. Lookups are
//! smoothed: any pair absent from the table scores the lowest log-probability
//! present in it.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::corpus::TokenSeq;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fixed sharpness of the optional diagonal alignment prior.
const DIAGONAL_LAMBDA: f64 = 4.0;

/// Probabilities below this are clamped before taking logs so every stored
/// entry stays finite.
const PROB_CLAMP: f64 = 1e-12;

/// Tolerance for the per-source normalization check on load.
const NORMALIZATION_TOL: f64 = 1e-6;

/// Parallel sentence pairs for lexicon estimation. Pairs with an empty side
/// are dropped at construction and counted in `skipped`.
#[derive(Debug, Clone)]
pub struct Bitext {
    pairs: Vec<(Vec<String>, Vec<String>)>,
    skipped: usize,
}

impl Bitext {
    pub fn new(pairs: impl IntoIterator<Item = (TokenSeq, TokenSeq)>) -> Bitext {
        let mut kept = Vec::new();
        let mut skipped = 0;
        for (src, tgt) in pairs {
            if src.is_empty() || tgt.is_empty() {
                skipped += 1;
            } else {
                kept.push((src.tokens().to_vec(), tgt.tokens().to_vec()));
            }
        }
        Bitext {
            pairs: kept,
            skipped,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

/// EM training configuration.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub iterations: usize,
    /// Weight alignment responsibilities by `exp(-λ·|i/m - j/n|)` with fixed
    /// λ = 4 (positions 1-based over real source tokens).
    pub diagonal_prior: bool,
    /// Add a NULL source position per sentence during training. NULL rows are
    /// dropped from the final table; metric-time lookups only ever see real
    /// source words.
    pub null_word: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            iterations: 5,
            diagonal_prior: false,
            null_word: true,
        }
    }
}

/// A trained lexicon plus per-iteration training diagnostics.
#[derive(Debug, Clone)]
pub struct TrainOutcome<F> {
    pub lexicon: Lexicon<F>,
    /// Corpus log-likelihood after each E-step (one entry per iteration).
    pub log_likelihoods: Vec<F>,
}

/// Directional word-translation log-probability table with floor smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon<F> {
    direction: (String, String),
    iterations: usize,
    /// source word -> target word -> log p(target | source)
    table: BTreeMap<String, BTreeMap<String, F>>,
    floor_logprob: F,
}

impl<F: Scalar> Lexicon<F> {
    /// Builds a lexicon from explicit probabilities, validating that each
    /// source row sums to 1 within 1e-6. Intended for tests and synthetic
    /// setups.
    pub fn from_probs(
        direction: (impl Into<String>, impl Into<String>),
        entries: &[(&str, &str, f64)],
    ) -> Result<Lexicon<F>> {
        let mut table: BTreeMap<String, BTreeMap<String, F>> = BTreeMap::new();
        for &(src, tgt, p) in entries {
            let logp = F::from_f64(p.max(PROB_CLAMP).ln());
            table
                .entry(src.to_owned())
                .or_default()
                .insert(tgt.to_owned(), logp);
        }
        let mut lex = Lexicon {
            direction: (direction.0.into(), direction.1.into()),
            iterations: 0,
            table,
            floor_logprob: F::zero(),
        };
        lex.floor_logprob = lex.min_entry()?;
        lex.check_normalization()?;
        Ok(lex)
    }

    /// Smoothed lookup: the table entry when present, otherwise the lowest
    /// log-probability found in the table (covers unseen pairings and
    /// out-of-vocabulary words on either side).
    pub fn logprob(&self, source_word: &str, target_word: &str) -> F {
        match self
            .table
            .get(source_word)
            .and_then(|row| row.get(target_word))
        {
            Some(&lp) => lp,
            None => self.floor_logprob,
        }
    }

    pub fn floor_logprob(&self) -> F {
        self.floor_logprob
    }

    pub fn direction(&self) -> (&str, &str) {
        (&self.direction.0, &self.direction.1)
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Number of (source, target) entries.
    pub fn len(&self) -> usize {
        self.table.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Entries in (source, target) order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, F)> {
        self.table.iter().flat_map(|(s, row)| {
            row.iter().map(move |(t, &lp)| (s.as_str(), t.as_str(), lp))
        })
    }

    fn min_entry(&self) -> Result<F> {
        self.table
            .values()
            .flat_map(BTreeMap::values)
            .copied()
            .fold(None, |acc: Option<F>, lp| {
                Some(match acc {
                    Some(m) if m <= lp => m,
                    _ => lp,
                })
            })
            .ok_or_else(|| Error::LexiconCorrupt {
                path: "<memory>".into(),
                msg: "empty table".into(),
            })
    }

    fn check_normalization(&self) -> Result<()> {
        for (s, row) in &self.table {
            let sum: f64 = row.values().map(|lp| lp.to_f64().unwrap().exp()).sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::LexiconNotNormalized {
                    source_word: s.clone(),
                    sum,
                    tol: NORMALIZATION_TOL,
                });
            }
        }
        Ok(())
    }

    /// Writes the TSV format: `#direction=`, `#floor=`, `#iterations=`
    /// headers followed by `source<TAB>target<TAB>log_prob` rows sorted by
    /// (source, target). Log-probabilities round-trip bit-exactly through
    /// their shortest decimal representation.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = File::create(path)?;
        self.to_writer(&mut file)
    }

    pub fn to_writer(&self, writer: &mut impl Write) -> Result<()> {
        writeln!(
            writer,
            "#direction={}-{}",
            self.direction.0, self.direction.1
        )?;
        writeln!(writer, "#floor={}", self.floor_logprob)?;
        writeln!(writer, "#iterations={}", self.iterations)?;
        for (s, t, lp) in self.entries() {
            writeln!(writer, "{s}\t{t}\t{lp}")?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon<F>> {
        let path = path.as_ref();
        let file = File::open(path)?;
        Lexicon::from_reader(file, &path.to_string_lossy())
    }

    /// Parses the TSV format, re-validating the floor and per-source
    /// normalization invariants.
    pub fn from_reader(reader: impl Read, source_path: &str) -> Result<Lexicon<F>> {
        let corrupt = |msg: String| Error::LexiconCorrupt {
            path: source_path.to_owned(),
            msg,
        };
        let mut direction = None;
        let mut floor: Option<F> = None;
        let mut iterations = None;
        let mut table: BTreeMap<String, BTreeMap<String, F>> = BTreeMap::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            if let Some(rest) = line.strip_prefix('#') {
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| corrupt(format!("line {lineno}: malformed header")))?;
                match key {
                    "direction" => {
                        let (src, tgt) = value.split_once('-').ok_or_else(|| {
                            corrupt(format!("line {lineno}: direction must be <src>-<tgt>"))
                        })?;
                        direction = Some((src.to_owned(), tgt.to_owned()));
                    }
                    "floor" => {
                        floor = Some(value.parse().map_err(|_| {
                            corrupt(format!("line {lineno}: invalid floor '{value}'"))
                        })?);
                    }
                    "iterations" => {
                        iterations = Some(value.parse().map_err(|_| {
                            corrupt(format!("line {lineno}: invalid iterations '{value}'"))
                        })?);
                    }
                    other => {
                        return Err(corrupt(format!("line {lineno}: unknown header '{other}'")))
                    }
                }
                continue;
            }
            let mut parts = line.split('\t');
            let (src, tgt, lp) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(t), Some(p), None) => (s, t, p),
                _ => {
                    return Err(corrupt(format!(
                        "line {lineno}: expected 3 tab-separated fields"
                    )))
                }
            };
            let lp: F = lp
                .parse()
                .map_err(|_| corrupt(format!("line {lineno}: invalid log-probability '{lp}'")))?;
            if lp > F::zero() || lp.is_nan() {
                return Err(corrupt(format!(
                    "line {lineno}: log-probability {lp} not in (-inf, 0]"
                )));
            }
            if table
                .entry(src.to_owned())
                .or_default()
                .insert(tgt.to_owned(), lp)
                .is_some()
            {
                return Err(corrupt(format!(
                    "line {lineno}: duplicate pair {src}/{tgt}"
                )));
            }
        }
        let direction = direction.ok_or_else(|| corrupt("missing #direction header".into()))?;
        let floor = floor.ok_or_else(|| corrupt("missing #floor header".into()))?;
        let iterations = iterations.ok_or_else(|| corrupt("missing #iterations header".into()))?;
        let lex = Lexicon {
            direction,
            iterations,
            table,
            floor_logprob: floor,
        };
        let recomputed = lex.min_entry().map_err(|_| corrupt("empty table".into()))?;
        if recomputed != floor {
            return Err(corrupt(format!(
                "floor {floor} does not match minimum table entry {recomputed}"
            )));
        }
        lex.check_normalization()?;
        Ok(lex)
    }
}

/// Trains a directional lexicon with IBM Model 1 EM. See [`train_detailed`]
/// for per-iteration diagnostics.
pub fn train<F: Scalar>(
    bitext: &Bitext,
    direction: (impl Into<String>, impl Into<String>),
    opts: &TrainOptions,
) -> Result<Lexicon<F>> {
    train_detailed(bitext, direction, opts).map(|out| out.lexicon)
}

/// IBM Model 1 EM over interned vocabulary ids.
///
/// The table is initialized uniformly over co-occurring pairs. Each E-step
/// distributes one unit of responsibility per target token over the source
/// tokens of its sentence (plus NULL when enabled; NULL carries prior weight
/// 1 like a perfectly aligned position). The M-step renormalizes expected
/// counts per source word. Iteration and accumulation order are fixed, so
/// identical inputs produce a bit-identical table.
pub fn train_detailed<F: Scalar>(
    bitext: &Bitext,
    direction: (impl Into<String>, impl Into<String>),
    opts: &TrainOptions,
) -> Result<TrainOutcome<F>> {
    if opts.iterations < 1 {
        return Err(Error::BadIterations);
    }
    if bitext.is_empty() {
        return Err(Error::EmptyBitext);
    }

    let mut src_ids: std::collections::HashMap<&str, usize> = Default::default();
    let mut src_words: Vec<&str> = Vec::new();
    let mut tgt_ids: std::collections::HashMap<&str, usize> = Default::default();
    let mut tgt_words: Vec<&str> = Vec::new();
    let mut sentences: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(bitext.len());
    for (src, tgt) in &bitext.pairs {
        let s: Vec<usize> = src
            .iter()
            .map(|w| intern(w, &mut src_ids, &mut src_words))
            .collect();
        let t: Vec<usize> = tgt
            .iter()
            .map(|w| intern(w, &mut tgt_ids, &mut tgt_words))
            .collect();
        sentences.push((s, t));
    }

    // Row index src -> co-occurring target probabilities. Index src_words.len()
    // is the NULL row when enabled.
    let null_row = src_words.len();
    let rows = if opts.null_word {
        src_words.len() + 1
    } else {
        src_words.len()
    };
    let mut probs: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); rows];
    for (s, t) in &sentences {
        for &tj in t {
            for &si in s {
                probs[si].insert(tj, F::zero());
            }
            if opts.null_word {
                probs[null_row].insert(tj, F::zero());
            }
        }
    }
    for row in &mut probs {
        let uniform = F::one() / F::from_count(row.len().max(1));
        for p in row.values_mut() {
            *p = uniform;
        }
    }

    let mut log_likelihoods = Vec::with_capacity(opts.iterations);
    for _ in 0..opts.iterations {
        let mut counts: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); rows];
        let mut ll = F::zero();
        for (s, t) in &sentences {
            let m = s.len();
            let n = t.len();
            for (j, &tj) in t.iter().enumerate() {
                let mut denom = F::zero();
                let mut weight_total = F::zero();
                for (i, &si) in s.iter().enumerate() {
                    let w = diagonal_weight::<F>(opts.diagonal_prior, i, m, j, n);
                    weight_total += w;
                    denom += w * probs[si][&tj];
                }
                if opts.null_word {
                    weight_total += F::one();
                    denom += probs[null_row][&tj];
                }
                ll += (denom / weight_total).ln();
                for (i, &si) in s.iter().enumerate() {
                    let w = diagonal_weight::<F>(opts.diagonal_prior, i, m, j, n);
                    let share = w * probs[si][&tj] / denom;
                    *counts[si].entry(tj).or_insert_with(F::zero) += share;
                }
                if opts.null_word {
                    let share = probs[null_row][&tj] / denom;
                    *counts[null_row].entry(tj).or_insert_with(F::zero) += share;
                }
            }
        }
        log_likelihoods.push(ll);
        for (row, count_row) in probs.iter_mut().zip(&counts) {
            let mut total = F::zero();
            for &c in count_row.values() {
                total += c;
            }
            for (tj, p) in row.iter_mut() {
                *p = count_row.get(tj).copied().unwrap_or_else(F::zero) / total;
            }
        }
    }

    let clamp = F::from_f64(PROB_CLAMP);
    let mut table: BTreeMap<String, BTreeMap<String, F>> = BTreeMap::new();
    for (si, row) in probs.iter().enumerate().take(src_words.len()) {
        let entry = table.entry(src_words[si].to_owned()).or_default();
        for (&tj, &p) in row {
            entry.insert(tgt_words[tj].to_owned(), p.max(clamp).ln());
        }
    }
    let mut lexicon = Lexicon {
        direction: (direction.0.into(), direction.1.into()),
        iterations: opts.iterations,
        table,
        floor_logprob: F::zero(),
    };
    lexicon.floor_logprob = lexicon.min_entry()?;
    Ok(TrainOutcome {
        lexicon,
        log_likelihoods,
    })
}

fn intern<'a>(
    word: &'a str,
    ids: &mut std::collections::HashMap<&'a str, usize>,
    words: &mut Vec<&'a str>,
) -> usize {
    match ids.get(word) {
        Some(&id) => id,
        None => {
            let id = words.len();
            ids.insert(word, id);
            words.push(word);
            id
        }
    }
}

fn diagonal_weight<F: Scalar>(enabled: bool, i: usize, m: usize, j: usize, n: usize) -> F {
    if !enabled {
        return F::one();
    }
    let pos_s = (i + 1) as f64 / m as f64;
    let pos_t = (j + 1) as f64 / n as f64;
    F::from_f64((-DIAGONAL_LAMBDA * (pos_s - pos_t).abs()).exp())
}
