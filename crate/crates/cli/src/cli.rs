//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error.

use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use consisteval_core::charcut::MatchConfig;
use consisteval_core::corpus::{normalize_with, NormMode, NormalizeOptions, TokenSeq};
use consisteval_core::lexicon::{train_detailed, Bitext, TrainOptions};
use consisteval_core::rescore::{rescore, RescoreMode};
use consisteval_core::stats::paired_bootstrap;
use consisteval_core::targets::{smoothing_targets_with_variant, SmoothingVariant, TargetSide};
use consisteval_core::{Corpus, Lexicon};

use crate::fixtures;
use crate::json_out::JVal;
use crate::report::{parse_report, significance_inputs};
use crate::score::{run_score, FileStamp, Metric, ScoreConfig, ALL_METRICS};
use crate::CliError;

#[derive(Parser)]
#[command(
    name = "consisteval",
    version,
    about = "Accuracy and consistency evaluation for paired speech transcription/translation output"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a directional word-translation lexicon from parallel text.
    TrainLexicon(TrainLexiconArgs),
    /// Score a corpus and write a metric report.
    Score(ScoreArgs),
    /// Select (transcript, translation) pairs from n-best lists by lexical
    /// consistency.
    Rescore(RescoreArgs),
    /// Emit label-smoothing target distributions for an external trainer.
    EmitTargets(EmitTargetsArgs),
    /// Compare two metric reports with paired bootstrap resampling.
    Significance(SignificanceArgs),
    /// Verify this installation against the bundled golden report.
    Selfcheck(SelfcheckArgs),
}

#[derive(clap::Args)]
struct TrainLexiconArgs {
    /// Source-side text, one sentence per line.
    #[arg(long)]
    src: PathBuf,
    /// Target-side text, one sentence per line.
    #[arg(long)]
    tgt: PathBuf,
    /// EM iterations.
    #[arg(long, default_value_t = 5)]
    iterations: usize,
    /// Weight alignments toward the diagonal (fixed strength).
    #[arg(long)]
    diagonal_prior: bool,
    /// Disable the NULL source token.
    #[arg(long)]
    no_null: bool,
    /// Normalize lines (lowercase, strip punctuation and markers) instead of
    /// treating them as pre-tokenized.
    #[arg(long)]
    normalize: bool,
    /// Override the non-speech marker rule with a regex (needs --normalize).
    #[arg(long)]
    marker_pattern: Option<String>,
    /// Language tag recorded for the source side.
    #[arg(long, default_value = "src")]
    src_lang: String,
    /// Language tag recorded for the target side.
    #[arg(long, default_value = "tgt")]
    tgt_lang: String,
    /// Output lexicon TSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ScoreArgs {
    /// Corpus JSONL.
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated metric list
    /// (wer,bleu,charcut,lex,surface,correlation,combined).
    #[arg(long, default_value = "wer,bleu,charcut,lex,surface,correlation,combined")]
    metrics: String,
    /// Lexicon for the transcript-to-translation direction (needed by lex).
    #[arg(long)]
    lex_st: Option<PathBuf>,
    /// Lexicon for the translation-to-transcript direction (needed by lex).
    #[arg(long)]
    lex_ts: Option<PathBuf>,
    /// Report output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a one-line CSV summary.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Minimum match length for the accuracy CharCut.
    #[arg(long, default_value_t = 3)]
    charcut_min_len: usize,
    /// Case-sensitive accuracy CharCut.
    #[arg(long)]
    charcut_case_sensitive: bool,
    /// Disable prefix/suffix pre-matching in the accuracy CharCut.
    #[arg(long)]
    no_prefix_suffix: bool,
    /// Override the non-speech marker rule with a regex.
    #[arg(long)]
    marker_pattern: Option<String>,
    /// RNG seed echoed into the report.
    #[arg(long, default_value_t = 13)]
    seed: u64,
    /// Worker thread cap; the report is identical for every value.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(clap::Args)]
struct RescoreArgs {
    /// N-best JSONL.
    #[arg(long)]
    nbest: PathBuf,
    #[arg(long)]
    lex_st: PathBuf,
    #[arg(long)]
    lex_ts: PathBuf,
    /// paired: records carry both texts; cross: one-sided records are
    /// combined as a full cross product.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Selected pairs, one JSON object per utterance.
    #[arg(long)]
    out: PathBuf,
    /// Also dump every candidate with its penalty.
    #[arg(long)]
    dump_ranking: Option<PathBuf>,
    /// Override the non-speech marker rule with a regex.
    #[arg(long)]
    marker_pattern: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paired,
    Cross,
}

#[derive(clap::Args)]
struct EmitTargetsArgs {
    /// Corpus JSONL; the transcript/translation fields hold the reference
    /// pair targets are built from.
    #[arg(long)]
    corpus: PathBuf,
    /// Which output sequence the rows target.
    #[arg(long, value_enum)]
    side: SideArg,
    /// Smoothing strength in [0,1].
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Vocabulary file, one token per line.
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Spread smoothing mass over distinct opposite-side tokens instead of
    /// token occurrences.
    #[arg(long)]
    distinct_types: bool,
    /// Normalize text instead of treating it as pre-tokenized.
    #[arg(long)]
    normalize: bool,
    /// Override the non-speech marker rule with a regex (needs --normalize).
    #[arg(long)]
    marker_pattern: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Transcript,
    Translation,
}

#[derive(clap::Args)]
struct SignificanceArgs {
    #[arg(long)]
    report_a: PathBuf,
    #[arg(long)]
    report_b: PathBuf,
    /// Metric to compare (wer, bleu, charcut, lex, surface, combined).
    #[arg(long)]
    metric: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 13)]
    seed: u64,
    /// Result JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SelfcheckArgs {
    /// Worker thread cap; the outcome is identical for every value.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::TrainLexicon(args) => cmd_train_lexicon(args),
        Command::Score(args) => cmd_score(args),
        Command::Rescore(args) => cmd_rescore(args),
        Command::EmitTargets(args) => cmd_emit_targets(args),
        Command::Significance(args) => cmd_significance(args),
        Command::Selfcheck(args) => cmd_selfcheck(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn marker_options(pattern: Option<&str>) -> Result<NormalizeOptions, CliError> {
    Ok(NormalizeOptions {
        marker_pattern: pattern
            .map(regex::Regex::new)
            .transpose()
            .map_err(|e| CliError::Usage(format!("invalid --marker-pattern: {e}")))?,
    })
}

fn read_lines(path: &PathBuf) -> Result<Vec<String>, CliError> {
    let data = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(data
        .lines()
        .map(|line| line.strip_suffix('\r').unwrap_or(line).to_owned())
        .collect())
}

fn tokenize_line(line: &str, normalize: bool, opts: &NormalizeOptions) -> TokenSeq {
    if normalize {
        normalize_with(line, NormMode::Lexical, opts)
    } else {
        TokenSeq::whitespace_split(line)
    }
}

fn write_output(path: &PathBuf, data: &str) -> Result<(), CliError> {
    std::fs::write(path, data)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn cmd_train_lexicon(args: TrainLexiconArgs) -> Result<i32, CliError> {
    for (flag, tag) in [("--src-lang", &args.src_lang), ("--tgt-lang", &args.tgt_lang)] {
        if tag.is_empty() || tag.contains('-') {
            return Err(CliError::Usage(format!(
                "{flag} must be a non-empty tag without '-', got '{tag}'"
            )));
        }
    }
    if args.marker_pattern.is_some() && !args.normalize {
        return Err(CliError::Usage(
            "--marker-pattern requires --normalize".into(),
        ));
    }
    let opts = marker_options(args.marker_pattern.as_deref())?;
    let src_lines = read_lines(&args.src)?;
    let tgt_lines = read_lines(&args.tgt)?;
    if src_lines.len() != tgt_lines.len() {
        return Err(CliError::Data(format!(
            "line count mismatch: {} has {} lines, {} has {}",
            args.src.display(),
            src_lines.len(),
            args.tgt.display(),
            tgt_lines.len()
        )));
    }
    let bitext = Bitext::new(src_lines.iter().zip(&tgt_lines).map(|(s, t)| {
        (
            tokenize_line(s, args.normalize, &opts),
            tokenize_line(t, args.normalize, &opts),
        )
    }));
    let outcome = train_detailed::<f64>(
        &bitext,
        (args.src_lang.as_str(), args.tgt_lang.as_str()),
        &TrainOptions {
            iterations: args.iterations,
            diagonal_prior: args.diagonal_prior,
            null_word: !args.no_null,
        },
    )?;
    outcome.lexicon.save(&args.out)?;
    eprintln!(
        "trained {}-{} lexicon on {} pairs ({} skipped): {} entries, floor {}, final log-likelihood {}",
        args.src_lang,
        args.tgt_lang,
        bitext.len(),
        bitext.skipped(),
        outcome.lexicon.len(),
        outcome.lexicon.floor_logprob(),
        outcome.log_likelihoods.last().copied().unwrap_or(f64::NAN),
    );
    Ok(0)
}

fn parse_metrics(list: &str) -> Result<Vec<Metric>, CliError> {
    let mut metrics = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let metric = Metric::parse(name)?;
        if !metrics.contains(&metric) {
            metrics.push(metric);
        }
    }
    if metrics.is_empty() {
        return Err(CliError::Usage("--metrics selected no metrics".into()));
    }
    // Canonical report order regardless of the order given.
    Ok(ALL_METRICS
        .into_iter()
        .filter(|m| metrics.contains(m))
        .collect())
}

fn stamp_file(path: &PathBuf) -> Result<FileStamp, CliError> {
    let data = std::fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(FileStamp {
        path: path.to_string_lossy().into_owned(),
        sha256: fixtures::sha256_hex(&data),
    })
}

fn cmd_score(args: ScoreArgs) -> Result<i32, CliError> {
    let metrics = parse_metrics(&args.metrics)?;
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    if args.charcut_min_len == 0 {
        return Err(CliError::Usage("--charcut-min-len must be at least 1".into()));
    }
    if metrics.contains(&Metric::Lex) && (args.lex_st.is_none() || args.lex_ts.is_none()) {
        return Err(CliError::Usage(
            "metric 'lex' requires --lex-st and --lex-ts".into(),
        ));
    }
    let corpus = Corpus::load(&args.corpus)?;
    let lexicon_pair = match (&args.lex_st, &args.lex_ts) {
        (Some(st), Some(ts)) => Some((Lexicon::load(st)?, Lexicon::load(ts)?)),
        _ => None,
    };
    let config = ScoreConfig {
        corpus_path: args.corpus.to_string_lossy().into_owned(),
        metrics,
        lex_st: args.lex_st.as_ref().map(stamp_file).transpose()?,
        lex_ts: args.lex_ts.as_ref().map(stamp_file).transpose()?,
        charcut_accuracy: MatchConfig {
            min_len: args.charcut_min_len,
            case_sensitive: args.charcut_case_sensitive,
            prefix_suffix: !args.no_prefix_suffix,
        },
        marker_pattern: args.marker_pattern.clone(),
        seed: args.seed,
        threads: args.threads,
    };
    let artifacts = run_score(
        &corpus,
        lexicon_pair.as_ref().map(|(st, ts)| (st, ts)),
        &config,
    )?;
    match &args.out {
        Some(path) => write_output(path, &artifacts.report_json)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(artifacts.report_json.as_bytes())
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    if let Some(path) = &args.csv {
        write_output(path, &artifacts.summary_csv)?;
    }
    Ok(0)
}

fn cmd_rescore(args: RescoreArgs) -> Result<i32, CliError> {
    let opts = marker_options(args.marker_pattern.as_deref())?;
    let lists = consisteval_core::load_nbest(&args.nbest)?;
    let lex_st = Lexicon::load(&args.lex_st)?;
    let lex_ts = Lexicon::load(&args.lex_ts)?;
    let mode = match args.mode {
        ModeArg::Paired => RescoreMode::Paired,
        ModeArg::Cross => RescoreMode::Cross,
    };
    let mut selected_out = String::new();
    let mut ranking_out = String::new();
    for list in &lists {
        let result = rescore(list, &lex_st, &lex_ts, mode, &opts)?;
        let line = serde_json::json!({
            "id": result.id,
            "transcript": result.selected.pair.transcript,
            "translation": result.selected.pair.translation,
            "penalty": result.selected.penalty,
            "origin": [result.selected.pair.origin.0, result.selected.pair.origin.1],
        });
        selected_out.push_str(&serde_json::to_string(&line).expect("json"));
        selected_out.push('\n');
        if args.dump_ranking.is_some() {
            for (index, candidate) in result.ranking.iter().enumerate() {
                let line = serde_json::json!({
                    "id": result.id,
                    "index": index,
                    "transcript": candidate.pair.transcript,
                    "translation": candidate.pair.translation,
                    "penalty": candidate.penalty,
                    "origin": [candidate.pair.origin.0, candidate.pair.origin.1],
                    "selected": *candidate == result.selected,
                });
                ranking_out.push_str(&serde_json::to_string(&line).expect("json"));
                ranking_out.push('\n');
            }
        }
    }
    write_output(&args.out, &selected_out)?;
    if let Some(path) = &args.dump_ranking {
        write_output(path, &ranking_out)?;
    }
    eprintln!("rescored {} utterances ({} mode)", lists.len(), match mode {
        RescoreMode::Paired => "paired",
        RescoreMode::Cross => "cross",
    });
    Ok(0)
}

fn cmd_emit_targets(args: EmitTargetsArgs) -> Result<i32, CliError> {
    if !(0.0..=1.0).contains(&args.epsilon) {
        return Err(CliError::Usage(format!(
            "--epsilon must lie in [0,1], got {}",
            args.epsilon
        )));
    }
    if args.marker_pattern.is_some() && !args.normalize {
        return Err(CliError::Usage(
            "--marker-pattern requires --normalize".into(),
        ));
    }
    let opts = marker_options(args.marker_pattern.as_deref())?;
    let corpus = Corpus::load(&args.corpus)?;
    let vocab_lines = read_lines(&args.vocab)?;
    let vocab: HashSet<String> = vocab_lines
        .into_iter()
        .filter(|line| !line.is_empty())
        .collect();
    let vocab_ref = args.vocab.to_string_lossy().into_owned();
    let side = match args.side {
        SideArg::Transcript => TargetSide::Transcript,
        SideArg::Translation => TargetSide::Translation,
    };
    let variant = if args.distinct_types {
        SmoothingVariant::DistinctTypes
    } else {
        SmoothingVariant::Occurrences
    };
    let mut out = String::new();
    for utt in corpus.utterances() {
        let s_tokens = tokenize_line(&utt.hyp_transcript, args.normalize, &opts);
        let t_tokens = tokenize_line(&utt.hyp_translation, args.normalize, &opts);
        let targets = smoothing_targets_with_variant::<f64>(
            &s_tokens,
            &t_tokens,
            side,
            args.epsilon,
            &vocab,
            &vocab_ref,
            variant,
        )
        .map_err(|e| CliError::Data(format!("utterance '{}': {e}", utt.id)))?;
        let rows: Vec<Vec<(String, f64)>> = targets
            .rows
            .iter()
            .map(|row| row.iter().map(|(token, &p)| (token.clone(), p)).collect())
            .collect();
        let line = serde_json::json!({
            "id": utt.id,
            "side": targets.side.as_str(),
            "epsilon": targets.epsilon,
            "rows": rows,
        });
        out.push_str(&serde_json::to_string(&line).expect("json"));
        out.push('\n');
    }
    write_output(&args.out, &out)?;
    Ok(0)
}

fn cmd_significance(args: SignificanceArgs) -> Result<i32, CliError> {
    let metric = Metric::parse(&args.metric)?;
    let report_a = parse_report(&args.report_a.to_string_lossy())?;
    let report_b = parse_report(&args.report_b.to_string_lossy())?;
    if report_a.per_utterance.len() != report_b.per_utterance.len() {
        return Err(CliError::Data(format!(
            "reports cover different corpus sizes: {} vs {}",
            report_a.per_utterance.len(),
            report_b.per_utterance.len()
        )));
    }
    for (a, b) in report_a.per_utterance.iter().zip(&report_b.per_utterance) {
        if a.id != b.id {
            return Err(CliError::Data(format!(
                "reports cover different corpora: utterance '{}' vs '{}'",
                a.id, b.id
            )));
        }
    }
    let (rows_a, aggregator, direction) = significance_inputs(&report_a, "A", metric)?;
    let (rows_b, _, _) = significance_inputs(&report_b, "B", metric)?;
    let result = paired_bootstrap(
        metric.name(),
        &rows_a,
        &rows_b,
        aggregator,
        direction,
        args.samples,
        args.seed,
    )?;
    let json = JVal::Obj(vec![
        ("metric", JVal::str(result.metric_name.as_str())),
        ("aggregator", JVal::str(aggregator.tag())),
        (
            "direction",
            JVal::str(match direction {
                consisteval_core::stats::MetricDirection::LowerIsBetter => "lower_is_better",
                consisteval_core::stats::MetricDirection::HigherIsBetter => "higher_is_better",
            }),
        ),
        ("delta", JVal::Full(result.delta)),
        ("p_value", JVal::Full(result.p_value)),
        ("p_convention", JVal::str(result.p_convention)),
        ("samples", JVal::Count(result.samples as u64)),
        ("seed", JVal::Count(result.seed)),
        ("wins_a", JVal::Count(result.wins_a as u64)),
        ("wins_b", JVal::Count(result.wins_b as u64)),
        ("ties", JVal::Count(result.ties as u64)),
    ]);
    match &args.out {
        Some(path) => write_output(path, &json.render())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(json.render().as_bytes())
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    Ok(0)
}

fn cmd_selfcheck(args: SelfcheckArgs) -> Result<i32, CliError> {
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mut stdout = std::io::stdout().lock();
    let pass = fixtures::selfcheck(args.threads, &mut stdout)?;
    Ok(if pass { 0 } else { 2 })
}
