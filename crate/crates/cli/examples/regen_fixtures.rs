//! Regenerates the bundled fixtures under `fixtures/`.
//!
//! The toy corpus and bitext are authored here; the lexicons are trained
//! from the bitext and the golden report is recomputed from scratch. Run
//! after changing anything that affects report bytes, then rebuild so the
//! embedded copies pick up the new contents:
//!
//! ```text
//! cargo run -p consisteval --example regen_fixtures
//! ```

use std::path::PathBuf;

use consisteval::score::{run_score, FileStamp, ScoreConfig, ALL_METRICS};
use consisteval_core::charcut::MatchConfig;
use consisteval_core::corpus::TokenSeq;
use consisteval_core::lexicon::{train, Bitext, TrainOptions};
use consisteval_core::{Corpus, Lexicon, Utterance};

/// (id, ref_transcript, ref_translation, hyp_transcript, hyp_translation)
const CORPUS: [(&str, &str, &str, &str, &str); 20] = [
    (
        "u01",
        "The cat drinks water.",
        "Die katze trinkt wasser.",
        "The cat drinks water.",
        "Die katze trinkt wasser.",
    ),
    (
        "u02",
        "The child reads the book.",
        "Die kind liest die buch.",
        "The child reads the book.",
        "Die kind liest die buch.",
    ),
    (
        "u03",
        "Anna Maria sees the sun.",
        "Anna Maria sieht die sonne.",
        "Anna Maria sees the sun.",
        "Anna Maria sieht die sonne.",
    ),
    (
        "u04",
        "The old man speaks slowly.",
        "Die alt mann spricht langsam.",
        "The old man speaks slowly.",
        "Die alt mann spricht langsam.",
    ),
    (
        "u05",
        "The dog sits in the garden.",
        "Die hund sitzt im die garten.",
        "The dog sits in the garden.",
        "Die hund sitzt im die garten.",
    ),
    (
        "u06",
        "Bill Gross has a new house.",
        "Bill Gross hat ein neu haus.",
        "Bill Gross has a new house.",
        "Bill Gross hat ein neu haus.",
    ),
    (
        "u07",
        "The woman eats bread in the morning.",
        "Die frau isst brot im die morgen.",
        "The woman drinks bread in the morning.",
        "Die frau trinkt brot im die morgen.",
    ),
    (
        "u08",
        "The small cat sees the moon.",
        "Die klein katze sieht die mond.",
        "The small dog sees the moon.",
        "Die klein hund sieht die mond.",
    ),
    (
        "u09",
        "The friend reads a good book today.",
        "Die freund liest ein gut buch heute.",
        "The friend reads a new book today.",
        "Die freund liest ein neu buch heute.",
    ),
    (
        "u10",
        "The man drinks water in the evening.",
        "Die mann trinkt wasser im die abend.",
        "The woman drinks bread in the evening.",
        "Die frau trinkt brot im die abend.",
    ),
    (
        "u11",
        "The big house has light.",
        "Die gross haus hat licht.",
        "The big garden has light.",
        "Die gross garten hat licht.",
    ),
    (
        "u12",
        "The child speaks quickly.",
        "Die kind spricht schnell.",
        "(Laughter) The child speaks slowly.",
        "Die kind spricht langsam.",
    ),
    (
        "u13",
        "The cat eats the apple.",
        "Die katze isst die apfel.",
        "The cat eats the apple.",
        "Die katze trinkt die apfel.",
    ),
    (
        "u14",
        "The dog sees the street.",
        "Die hund sieht die strasse.",
        "The dog sees the bread.",
        "Die hund sieht die strasse.",
    ),
    (
        "u15",
        "The new friend is here today.",
        "Die neu freund ist hier heute.",
        "The old friend is here today.",
        "Die neu freund ist hier abend.",
    ),
    (
        "u16",
        "Anna Maria has a small dog.",
        "Anna Maria hat ein klein hund.",
        "Anna Maria has a small dog.",
        "Anna Marie hat ein klein katze.",
    ),
    (
        "u17",
        "The night is good and the day is new.",
        "Die nacht ist gut und die tag ist neu.",
        "The light is good in the day in new.",
        "Die licht ist gut und die tag ist neu.",
    ),
    (
        "u18",
        "The good woman reads the book in the garden in the evening.",
        "Die gut frau liest die buch im die garten im die abend.",
        "The good woman reads the book in the garden in the evening.",
        "Die gut frau liest die buch im die garten im die abend.",
    ),
    (
        "u19",
        "The sun has light in the morning.",
        "Die sonne hat licht im die morgen.",
        "The moon has water in the night.",
        "Die mond hat wasser im die nacht.",
    ),
    (
        "u20",
        "Bill Gross speaks in the street, and the friend reads.",
        "Bill Gross spricht im die strasse, und die freund liest.",
        "bill gross speaks in the street and the friend drinks.",
        "Bill Gross spricht im die strasse und die freund trinkt.",
    ),
];

const BITEXT: [(&str, &str); 40] = [
    ("the cat drinks water", "die katze trinkt wasser"),
    ("the dog eats bread", "die hund isst brot"),
    ("the child reads the book", "die kind liest die buch"),
    ("the man sees the moon", "die mann sieht die mond"),
    ("the woman speaks quickly", "die frau spricht schnell"),
    ("the old friend is here", "die alt freund ist hier"),
    ("the new house has light", "die neu haus hat licht"),
    (
        "the small cat sits in the garden",
        "die klein katze sitzt im die garten",
    ),
    (
        "the big dog sits in the street",
        "die gross hund sitzt im die strasse",
    ),
    (
        "the sun has light in the morning",
        "die sonne hat licht im die morgen",
    ),
    (
        "the moon is good in the night",
        "die mond ist gut im die nacht",
    ),
    ("the day is new", "die tag ist neu"),
    ("anna maria sees the sun", "anna maria sieht die sonne"),
    ("bill gross has a new house", "bill gross hat ein neu haus"),
    (
        "the child drinks water in the evening",
        "die kind trinkt wasser im die abend",
    ),
    ("the woman eats the apple", "die frau isst die apfel"),
    ("the man reads a good book", "die mann liest ein gut buch"),
    ("the friend speaks slowly", "die freund spricht langsam"),
    ("the cat sees the dog", "die katze sieht die hund"),
    ("the water is good", "die wasser ist gut"),
    ("the bread is old", "die brot ist alt"),
    ("the book is new and good", "die buch ist neu und gut"),
    (
        "the garden has a small cat",
        "die garten hat ein klein katze",
    ),
    ("the street is big", "die strasse ist gross"),
    ("the morning is here", "die morgen ist hier"),
    ("the evening is good", "die abend ist gut"),
    (
        "anna maria speaks quickly today",
        "anna maria spricht schnell heute",
    ),
    (
        "bill gross reads the book today",
        "bill gross liest die buch heute",
    ),
    ("the night has a moon", "die nacht hat ein mond"),
    ("the child is small", "die kind ist klein"),
    (
        "the man is old and the woman is new",
        "die mann ist alt und die frau ist neu",
    ),
    (
        "the dog drinks water quickly",
        "die hund trinkt wasser schnell",
    ),
    ("the cat eats bread slowly", "die katze isst brot langsam"),
    (
        "the friend has a good house",
        "die freund hat ein gut haus",
    ),
    (
        "the sun is big and the moon is small",
        "die sonne ist gross und die mond ist klein",
    ),
    ("a good day has light", "ein gut tag hat licht"),
    ("the apple is good", "die apfel ist gut"),
    (
        "the light is new in the morning",
        "die licht ist neu im die morgen",
    ),
    ("the friend is here today", "die freund ist hier heute"),
    (
        "anna maria has a dog and bill gross has a cat",
        "anna maria hat ein hund und bill gross hat ein katze",
    ),
];

fn main() {
    let fixtures_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    // Corpus JSONL.
    let mut corpus_jsonl = String::new();
    let utterances: Vec<Utterance> = CORPUS
        .iter()
        .map(|&(id, ref_s, ref_t, hyp_s, hyp_t)| Utterance {
            id: id.to_owned(),
            hyp_transcript: hyp_s.to_owned(),
            hyp_translation: hyp_t.to_owned(),
            ref_transcript: Some(ref_s.to_owned()),
            ref_translation: Some(ref_t.to_owned()),
        })
        .collect();
    for utt in &utterances {
        corpus_jsonl.push_str(&serde_json::to_string(utt).unwrap());
        corpus_jsonl.push('\n');
    }
    std::fs::write(fixtures_dir.join("toy_corpus.jsonl"), &corpus_jsonl).unwrap();

    // Bitext line files.
    let src: String = BITEXT.iter().map(|(s, _)| format!("{s}\n")).collect();
    let tgt: String = BITEXT.iter().map(|(_, t)| format!("{t}\n")).collect();
    std::fs::write(fixtures_dir.join("toy_bitext.src"), &src).unwrap();
    std::fs::write(fixtures_dir.join("toy_bitext.tgt"), &tgt).unwrap();

    // Lexicons, one per direction.
    let opts = TrainOptions::default();
    let forward = Bitext::new(BITEXT.iter().map(|(s, t)| {
        (
            TokenSeq::whitespace_split(s),
            TokenSeq::whitespace_split(t),
        )
    }));
    let backward = Bitext::new(BITEXT.iter().map(|(s, t)| {
        (
            TokenSeq::whitespace_split(t),
            TokenSeq::whitespace_split(s),
        )
    }));
    let lex_st: Lexicon = train(&forward, ("en", "de"), &opts).unwrap();
    let lex_ts: Lexicon = train(&backward, ("de", "en"), &opts).unwrap();
    let mut lex_st_bytes = Vec::new();
    lex_st.to_writer(&mut lex_st_bytes).unwrap();
    let mut lex_ts_bytes = Vec::new();
    lex_ts.to_writer(&mut lex_ts_bytes).unwrap();
    std::fs::write(fixtures_dir.join("toy_lex_st.tsv"), &lex_st_bytes).unwrap();
    std::fs::write(fixtures_dir.join("toy_lex_ts.tsv"), &lex_ts_bytes).unwrap();

    // Golden report, computed from the fresh data just written.
    let corpus = Corpus::from_reader(corpus_jsonl.as_bytes(), "fixtures/toy_corpus.jsonl").unwrap();
    let config = ScoreConfig {
        corpus_path: "fixtures/toy_corpus.jsonl".to_owned(),
        metrics: ALL_METRICS.to_vec(),
        lex_st: Some(FileStamp {
            path: "fixtures/toy_lex_st.tsv".to_owned(),
            sha256: consisteval::fixtures::sha256_hex(&lex_st_bytes),
        }),
        lex_ts: Some(FileStamp {
            path: "fixtures/toy_lex_ts.tsv".to_owned(),
            sha256: consisteval::fixtures::sha256_hex(&lex_ts_bytes),
        }),
        charcut_accuracy: MatchConfig::accuracy(),
        marker_pattern: None,
        seed: 13,
        threads: 1,
    };
    let artifacts = run_score(&corpus, Some((&lex_st, &lex_ts)), &config).unwrap();
    std::fs::write(fixtures_dir.join("golden_report.json"), &artifacts.report_json).unwrap();

    println!(
        "wrote fixtures: corpus ({} utterances), bitext ({} pairs), lexicons ({} / {} entries), golden report ({} bytes)",
        utterances.len(),
        BITEXT.len(),
        lex_st.len(),
        lex_ts.len(),
        artifacts.report_json.len()
    );
    print!("{}", artifacts.summary_csv);
}
