//! Corpus ingestion: parse raw Q&A data, detect yes/no questions, derive one
//! yes/no label per question, and split by product.
//!
//! The raw input is UTF-8 JSONL, one object per question, with the fields
//! `question_id`, `asin_id`, `question_text`, `answer_text`, `bullet_points`,
//! `product_description`, `brand_name`, `item_name`, plus the optional
//! `is_yes-no_question` and `yes-no_answer`. The normalized output is JSONL
//! of records and product docs behind a `schema_version` meta line.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A product's identity plus the textual content encoders see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDoc {
    pub product_id: String,
    pub title: String,
    pub bullet_points: Vec<String>,
    pub category: String,
}

impl ProductDoc {
    /// Product text as the encoders consume it: the title and the bullet
    /// points, joined by "; ".
    pub fn rendered_text(&self) -> String {
        let mut text = self.title.clone();
        for bullet in &self.bullet_points {
            if !text.is_empty() {
                text.push_str("; ");
            }
            text.push_str(bullet);
        }
        text
    }
}

/// One free-text answer to a question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawAnswer {
    pub text: String,
    pub is_verified_seller: bool,
}

/// The label carried by a corpus record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    /// Only prediction targets and unlabeled corpus entries carry this.
    Unknown,
}

/// Polarity of a single free-text answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Yes,
    No,
    Maybe,
}

/// Outcome of aggregating a question's answers into one label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateLabel {
    Yes,
    No,
    /// Tie or nothing left after dropping `maybe` answers.
    Dropped,
}

/// One (question, product, answer) triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub record_id: String,
    pub question: String,
    pub product_id: String,
    pub answer: Answer,
    /// True when the question passed [`detect_yes_no_question`].
    pub yes_no_question: bool,
}

/// A record as parsed from one raw line, before labeling.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub record_id: String,
    pub question: String,
    pub product_id: String,
    pub answers: Vec<RawAnswer>,
    /// The optional precomputed `yes-no_answer` field; bypasses the polarity
    /// classifier when present.
    pub answer_hint: Option<Polarity>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ParseStats {
    pub lines: usize,
    pub parsed: usize,
    pub malformed: usize,
}

/// Classifies one answer text as yes/no/maybe. Pluggable so a learned
/// classifier can replace the built-in rule.
pub trait PolarityClassifier: Sync {
    fn classify(&self, answer_text: &str) -> Polarity;
}

/// Default rule: a leading "yes"-like token means yes, a leading "no"-like or
/// negation token means no, anything else is maybe.
#[derive(Debug, Clone, Copy, Default)]
pub struct RulePolarityClassifier;

impl PolarityClassifier for RulePolarityClassifier {
    fn classify(&self, answer_text: &str) -> Polarity {
        classify_answer_polarity(answer_text)
    }
}

/// Raw JSONL line. `answer_text` accepts a single string, a list of strings,
/// or a list of `{text, verified_seller}` objects.
#[derive(Deserialize)]
struct InputLine {
    #[serde(default)]
    question_id: Option<String>,
    asin_id: String,
    question_text: String,
    #[serde(default)]
    answer_text: AnswerField,
    #[serde(default)]
    bullet_points: Vec<String>,
    #[serde(default)]
    #[allow(dead_code)]
    product_description: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    brand_name: Option<String>,
    #[serde(default)]
    item_name: Option<String>,
    #[serde(default)]
    category: Option<String>,
    #[serde(rename = "is_yes-no_question", default)]
    #[allow(dead_code)]
    is_yes_no_question: Option<bool>,
    #[serde(rename = "yes-no_answer", default)]
    yes_no_answer: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum AnswerField {
    #[default]
    Missing,
    One(String),
    Many(Vec<AnswerEntry>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnswerEntry {
    Text(String),
    Tagged {
        text: String,
        #[serde(default)]
        verified_seller: bool,
    },
}

impl AnswerField {
    fn into_answers(self) -> Vec<RawAnswer> {
        match self {
            AnswerField::Missing => Vec::new(),
            AnswerField::One(text) => vec![RawAnswer {
                text,
                is_verified_seller: false,
            }],
            AnswerField::Many(entries) => entries
                .into_iter()
                .map(|e| match e {
                    AnswerEntry::Text(text) => RawAnswer {
                        text,
                        is_verified_seller: false,
                    },
                    AnswerEntry::Tagged {
                        text,
                        verified_seller,
                    } => RawAnswer {
                        text,
                        is_verified_seller: verified_seller,
                    },
                })
                .collect(),
        }
    }
}

/// Parse line-delimited raw records. Malformed lines are counted and
/// skipped with a warning; products are deduplicated by id, first line wins.
pub fn parse_records(
    reader: impl BufRead,
) -> Result<(Vec<RawRecord>, Vec<ProductDoc>, ParseStats)> {
    let mut stats = ParseStats::default();
    let mut records = Vec::new();
    let mut products: Vec<ProductDoc> = Vec::new();
    let mut product_index: HashMap<String, usize> = HashMap::new();

    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.lines += 1;
        let parsed: InputLine = match serde_json::from_str(&line) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("skipping malformed line {}: {e}", line_no + 1);
                stats.malformed += 1;
                continue;
            }
        };
        if parsed.question_text.trim().is_empty() || parsed.asin_id.is_empty() {
            log::warn!("skipping line {}: empty question or product id", line_no + 1);
            stats.malformed += 1;
            continue;
        }

        if !product_index.contains_key(&parsed.asin_id) {
            product_index.insert(parsed.asin_id.clone(), products.len());
            products.push(ProductDoc {
                product_id: parsed.asin_id.clone(),
                title: parsed.item_name.clone().unwrap_or_default(),
                bullet_points: parsed.bullet_points.clone(),
                category: parsed.category.clone().unwrap_or_default(),
            });
        }

        let record_id = parsed
            .question_id
            .clone()
            .unwrap_or_else(|| format!("q{:07}", line_no + 1));
        let answer_hint = parsed.yes_no_answer.as_deref().and_then(|s| {
            match s.to_lowercase().as_str() {
                "yes" => Some(Polarity::Yes),
                "no" => Some(Polarity::No),
                "maybe" => Some(Polarity::Maybe),
                _ => None,
            }
        });
        records.push(RawRecord {
            record_id,
            question: parsed.question_text,
            product_id: parsed.asin_id,
            answers: parsed.answer_text.into_answers(),
            answer_hint,
        });
        stats.parsed += 1;
    }
    Ok((records, products, stats))
}

const BE_VERBS: [&str; 7] = ["am", "is", "are", "been", "being", "was", "were"];
const MODAL_VERBS: [&str; 8] = [
    "can", "could", "shall", "should", "will", "would", "may", "might",
];
const AUX_VERBS: [&str; 6] = ["do", "did", "does", "have", "had", "has"];

/// True iff the first token is a be/modal/auxiliary verb and the text ends
/// with a question mark (trailing whitespace ignored).
pub fn detect_yes_no_question(text: &str) -> bool {
    if !text.trim_end().ends_with('?') {
        return false;
    }
    let first = match crate::textenc::tokenize(text).into_iter().next() {
        Some(t) => t,
        None => return false,
    };
    let first = first.as_str();
    BE_VERBS.contains(&first) || MODAL_VERBS.contains(&first) || AUX_VERBS.contains(&first)
}

/// Built-in polarity rule over the leading token of the answer.
pub fn classify_answer_polarity(text: &str) -> Polarity {
    let first = match crate::textenc::tokenize(text).into_iter().next() {
        Some(t) => t,
        None => return Polarity::Maybe,
    };
    match first.as_str() {
        "yes" | "yeah" | "yep" => Polarity::Yes,
        "no" | "nope" | "not" | "never" => Polarity::No,
        _ => Polarity::Maybe,
    }
}

/// Collapse a question's answers into one label.
///
/// `maybe` answers are dropped first. A verified-seller answer, if any
/// remains, decides the label (the earliest one on conflict). Otherwise the
/// majority decides, and an exact tie — or nothing left — drops the question.
pub fn aggregate_answers(answers: &[(Polarity, bool)]) -> AggregateLabel {
    let decided: Vec<&(Polarity, bool)> = answers
        .iter()
        .filter(|(p, _)| *p != Polarity::Maybe)
        .collect();
    if let Some((polarity, _)) = decided.iter().find(|(_, verified)| *verified) {
        return match polarity {
            Polarity::Yes => AggregateLabel::Yes,
            Polarity::No => AggregateLabel::No,
            Polarity::Maybe => unreachable!(),
        };
    }
    let yes = decided.iter().filter(|(p, _)| *p == Polarity::Yes).count();
    let no = decided.len() - yes;
    match yes.cmp(&no) {
        std::cmp::Ordering::Greater => AggregateLabel::Yes,
        std::cmp::Ordering::Less => AggregateLabel::No,
        std::cmp::Ordering::Equal => AggregateLabel::Dropped,
    }
}

/// True when `answers` contains verified-seller answers with conflicting
/// non-maybe polarities.
pub fn verified_conflict(answers: &[(Polarity, bool)]) -> bool {
    let verified: Vec<Polarity> = answers
        .iter()
        .filter(|(p, v)| *v && *p != Polarity::Maybe)
        .map(|(p, _)| *p)
        .collect();
    verified.windows(2).any(|w| w[0] != w[1])
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestStats {
    pub parse: ParseStats,
    pub yes_no_questions: usize,
    pub labeled_yes: usize,
    pub labeled_no: usize,
    pub dropped: usize,
    pub verified_conflicts: usize,
}

/// An immutable ingested corpus: products plus records, lookup by id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corpus {
    pub category: String,
    pub products: Vec<ProductDoc>,
    pub records: Vec<Record>,
    #[serde(skip)]
    product_index: HashMap<String, usize>,
    #[serde(skip)]
    record_index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(category: String, products: Vec<ProductDoc>, records: Vec<Record>) -> Self {
        let mut corpus = Corpus {
            category,
            products,
            records,
            product_index: HashMap::new(),
            record_index: HashMap::new(),
        };
        corpus.rebuild_indexes();
        corpus
    }

    fn rebuild_indexes(&mut self) {
        self.product_index = self
            .products
            .iter()
            .enumerate()
            .map(|(i, p)| (p.product_id.clone(), i))
            .collect();
        self.record_index = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.record_id.clone(), i))
            .collect();
    }

    pub fn product(&self, product_id: &str) -> Option<&ProductDoc> {
        self.product_index.get(product_id).map(|i| &self.products[*i])
    }

    pub fn record(&self, record_id: &str) -> Option<&Record> {
        self.record_index.get(record_id).map(|i| &self.records[*i])
    }

    /// Rendered product text for a record, empty if the product is missing.
    pub fn product_text(&self, product_id: &str) -> String {
        self.product(product_id)
            .map(|p| p.rendered_text())
            .unwrap_or_default()
    }

    /// Records usable for answer prediction: yes/no questions with a label.
    pub fn labeled_records(&self) -> impl Iterator<Item = &Record> {
        self.records
            .iter()
            .filter(|r| r.yes_no_question && r.answer != Answer::Unknown)
    }
}

/// Label raw records and assemble a [`Corpus`].
///
/// Questions that fail yes/no detection, or whose answers aggregate to a
/// tie, are retained with answer `Unknown`: they still feed question-pair
/// mining but are excluded from answer-prediction datasets.
pub fn build_corpus(
    raw: Vec<RawRecord>,
    products: Vec<ProductDoc>,
    classifier: &dyn PolarityClassifier,
    category: String,
    parse_stats: ParseStats,
) -> (Corpus, IngestStats) {
    let mut stats = IngestStats {
        parse: parse_stats,
        ..Default::default()
    };
    let mut records = Vec::with_capacity(raw.len());
    for r in raw {
        let yes_no = detect_yes_no_question(&r.question);
        if yes_no {
            stats.yes_no_questions += 1;
        }
        let answer = if yes_no {
            // The precomputed label, when present, bypasses classification.
            let polarities: Vec<(Polarity, bool)> = match r.answer_hint {
                Some(p) => vec![(p, false)],
                None => r
                    .answers
                    .iter()
                    .map(|a| (classifier.classify(&a.text), a.is_verified_seller))
                    .collect(),
            };
            if verified_conflict(&polarities) {
                stats.verified_conflicts += 1;
            }
            match aggregate_answers(&polarities) {
                AggregateLabel::Yes => {
                    stats.labeled_yes += 1;
                    Answer::Yes
                }
                AggregateLabel::No => {
                    stats.labeled_no += 1;
                    Answer::No
                }
                AggregateLabel::Dropped => {
                    stats.dropped += 1;
                    Answer::Unknown
                }
            }
        } else {
            Answer::Unknown
        };
        records.push(Record {
            record_id: r.record_id,
            question: r.question,
            product_id: r.product_id,
            answer,
            yes_no_question: yes_no,
        });
    }
    (Corpus::new(category, products, records), stats)
}

// ---------------------------------------------------------------------------
// Normalized corpus file

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum CorpusLine {
    Meta {
        schema_version: u32,
        category: String,
    },
    Product(ProductDoc),
    Record(Record),
}

/// Write the normalized corpus as JSONL: a meta line with the schema
/// version, then products, then records. Byte-identical for equal inputs.
pub fn write_corpus(corpus: &Corpus, mut w: impl Write) -> Result<()> {
    let meta = CorpusLine::Meta {
        schema_version: SCHEMA_VERSION,
        category: corpus.category.clone(),
    };
    serde_json::to_writer(&mut w, &meta)?;
    w.write_all(b"\n")?;
    for p in &corpus.products {
        serde_json::to_writer(&mut w, &CorpusLine::Product(p.clone()))?;
        w.write_all(b"\n")?;
    }
    for r in &corpus.records {
        serde_json::to_writer(&mut w, &CorpusLine::Record(r.clone()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Read a normalized corpus written by [`write_corpus`].
pub fn read_corpus(reader: impl BufRead) -> Result<Corpus> {
    let mut category = String::new();
    let mut saw_meta = false;
    let mut products = Vec::new();
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusLine>(&line)? {
            CorpusLine::Meta {
                schema_version,
                category: c,
            } => {
                if schema_version != SCHEMA_VERSION {
                    return Err(Error::BadFile {
                        path: "<corpus>".into(),
                        reason: format!(
                            "unsupported schema_version {schema_version}, expected {SCHEMA_VERSION}"
                        ),
                    });
                }
                category = c;
                saw_meta = true;
            }
            CorpusLine::Product(p) => products.push(p),
            CorpusLine::Record(r) => records.push(r),
        }
    }
    if !saw_meta {
        return Err(Error::BadFile {
            path: "<corpus>".into(),
            reason: "missing meta line with schema_version".into(),
        });
    }
    Ok(Corpus::new(category, products, records))
}

// ---------------------------------------------------------------------------
// Product-disjoint splits

/// Which split a product landed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitId {
    Train,
    Dev,
    Test,
}

/// Product-disjoint train/dev/test record sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSet {
    pub train: Vec<Record>,
    pub dev: Vec<Record>,
    pub test: Vec<Record>,
    pub seed: u64,
}

impl SplitSet {
    pub fn split_records(&self, id: SplitId) -> &[Record] {
        match id {
            SplitId::Train => &self.train,
            SplitId::Dev => &self.dev,
            SplitId::Test => &self.test,
        }
    }
}

/// Partition records into product-disjoint splits.
///
/// Products are sorted by id, shuffled with a seeded PRNG, and cut at the
/// cumulative ratios over the product count; every record follows its
/// product.
pub fn split_by_product(
    records: &[Record],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<SplitSet> {
    let sum = ratios.0 + ratios.1 + ratios.2;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios must sum to 1, got {sum}")));
    }
    if ratios.0 < 0.0 || ratios.1 < 0.0 || ratios.2 < 0.0 {
        return Err(Error::Config("split ratios must be non-negative".into()));
    }
    let mut product_ids: Vec<&str> = records.iter().map(|r| r.product_id.as_str()).collect();
    product_ids.sort_unstable();
    product_ids.dedup();
    if product_ids.len() < 3 {
        return Err(Error::Data(format!(
            "need at least 3 distinct products to split, got {}",
            product_ids.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    product_ids.shuffle(&mut rng);

    let n = product_ids.len() as f64;
    let cut1 = (n * ratios.0).floor() as usize;
    let cut2 = (n * (ratios.0 + ratios.1)).floor() as usize;
    let mut assignment: HashMap<&str, SplitId> = HashMap::new();
    for (i, pid) in product_ids.iter().enumerate() {
        let split = if i < cut1 {
            SplitId::Train
        } else if i < cut2 {
            SplitId::Dev
        } else {
            SplitId::Test
        };
        assignment.insert(pid, split);
    }

    let mut set = SplitSet {
        train: Vec::new(),
        dev: Vec::new(),
        test: Vec::new(),
        seed,
    };
    for r in records {
        match assignment[r.product_id.as_str()] {
            SplitId::Train => set.train.push(r.clone()),
            SplitId::Dev => set.dev.push(r.clone()),
            SplitId::Test => set.test.push(r.clone()),
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use std::io::Cursor;

    fn record(id: &str, product: &str) -> Record {
        Record {
            record_id: id.into(),
            question: format!("does item {id} work?"),
            product_id: product.into(),
            answer: Answer::Yes,
            yes_no_question: true,
        }
    }

    #[test]
    fn parse_maps_fields_and_dedups_products() {
        let data = concat!(
            r#"{"question_id":"q1","asin_id":"B01","question_text":"Is it loud?","item_name":"Fan X","answer_text":["Yes it is"]}"#,
            "\n",
            r#"{"question_id":"q2","asin_id":"B01","question_text":"Does it tilt?","item_name":"Fan X"}"#,
            "\n",
        );
        let (records, products, stats) = parse_records(Cursor::new(data)).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(products.len(), 1);
        assert_eq!(records[0].question, "Is it loud?");
        assert_eq!(records[0].product_id, "B01");
        assert_eq!(products[0].title, "Fan X");
        assert_eq!(stats.parsed, 2);
        assert_eq!(stats.malformed, 0);
    }

    #[test]
    fn parse_empty_stream_yields_empty_lists() {
        let (records, products, stats) = parse_records(Cursor::new("")).unwrap();
        assert!(records.is_empty());
        assert!(products.is_empty());
        assert_eq!(stats.lines, 0);
    }

    #[test]
    fn parse_counts_and_skips_malformed_lines() {
        let data = concat!(
            "not json at all\n",
            r#"{"asin_id":"B09","question_text":"Can it stream?"}"#,
            "\n",
            r#"{"asin_id":"","question_text":"Is it red?"}"#,
            "\n",
        );
        let (records, _, stats) = parse_records(Cursor::new(data)).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(stats.malformed, 2);
        // Synthesized id for a line without question_id.
        assert!(records[0].record_id.starts_with('q'));
    }

    #[test]
    fn detect_yes_no_examples() {
        assert!(detect_yes_no_question("Does this require WiFi?"));
        assert!(!detect_yes_no_question("What material is the neck strap made of?"));
        assert!(!detect_yes_no_question("can i wash this"));
        assert!(detect_yes_no_question("can i wash this?  "));
        assert!(detect_yes_no_question("Will these jeans shrink after a wash?"));
        assert!(!detect_yes_no_question("?"));
        assert!(!detect_yes_no_question(""));
    }

    #[test]
    fn polarity_rule_examples() {
        assert_eq!(classify_answer_polarity("No shrinkage"), Polarity::No);
        assert_eq!(classify_answer_polarity("Yes, it fits."), Polarity::Yes);
        assert_eq!(
            classify_answer_polarity("It depends on the model"),
            Polarity::Maybe
        );
        assert_eq!(classify_answer_polarity("Never worked for me"), Polarity::No);
        assert_eq!(classify_answer_polarity(""), Polarity::Maybe);
    }

    #[test]
    fn aggregate_majority_verified_and_tie() {
        use Polarity::*;
        assert_eq!(
            aggregate_answers(&[(Yes, false), (Yes, false), (No, false)]),
            AggregateLabel::Yes
        );
        assert_eq!(
            aggregate_answers(&[(No, true), (Yes, false), (Yes, false)]),
            AggregateLabel::No
        );
        assert_eq!(
            aggregate_answers(&[(Yes, false), (No, false)]),
            AggregateLabel::Dropped
        );
        assert_eq!(aggregate_answers(&[]), AggregateLabel::Dropped);
        assert_eq!(
            aggregate_answers(&[(Maybe, false), (Maybe, true)]),
            AggregateLabel::Dropped
        );
        // First verified answer wins a verified-vs-verified conflict.
        assert_eq!(
            aggregate_answers(&[(No, true), (Yes, true)]),
            AggregateLabel::No
        );
        assert!(verified_conflict(&[(No, true), (Yes, true)]));
        assert!(!verified_conflict(&[(No, true), (Yes, false)]));
    }

    #[test]
    fn aggregate_is_order_invariant_for_unverified() {
        use Polarity::*;
        let mut answers = vec![(Yes, false), (No, false), (Yes, false), (Maybe, false)];
        let forward = aggregate_answers(&answers);
        answers.reverse();
        assert_eq!(aggregate_answers(&answers), forward);
    }

    #[test]
    fn split_follows_products_and_ratios() {
        let mut records = Vec::new();
        for p in 0..10 {
            for q in 0..3 {
                records.push(record(&format!("r{p}_{q}"), &format!("P{p:02}")));
            }
        }
        let set = split_by_product(&records, (0.8, 0.1, 0.1), 7).unwrap();
        let products =
            |rs: &[Record]| rs.iter().map(|r| r.product_id.clone()).collect::<HashSet<_>>();
        let (tr, de, te) = (products(&set.train), products(&set.dev), products(&set.test));
        assert_eq!(tr.len(), 8);
        assert_eq!(de.len(), 1);
        assert_eq!(te.len(), 1);
        assert!(tr.is_disjoint(&de) && tr.is_disjoint(&te) && de.is_disjoint(&te));
        // All records of one product live in one split.
        assert_eq!(set.train.len() + set.dev.len() + set.test.len(), 30);

        let again = split_by_product(&records, (0.8, 0.1, 0.1), 7).unwrap();
        assert_eq!(set.train, again.train);
        assert_eq!(set.dev, again.dev);
        assert_eq!(set.test, again.test);

        let other = split_by_product(&records, (0.8, 0.1, 0.1), 8).unwrap();
        let same = set.train == other.train && set.dev == other.dev && set.test == other.test;
        assert!(!same, "a different seed should reshuffle products");
    }

    #[test]
    fn split_rejects_too_few_products_and_bad_ratios() {
        let records = vec![record("a", "P1"), record("b", "P2")];
        assert!(split_by_product(&records, (0.8, 0.1, 0.1), 1).is_err());
        let records3 = vec![record("a", "P1"), record("b", "P2"), record("c", "P3")];
        assert!(split_by_product(&records3, (0.8, 0.3, 0.1), 1).is_err());
    }

    #[test]
    fn corpus_file_roundtrip_is_byte_identical() {
        let corpus = Corpus::new(
            "fans".into(),
            vec![ProductDoc {
                product_id: "B01".into(),
                title: "Fan X".into(),
                bullet_points: vec!["quiet motor".into(), "3 speeds".into()],
                category: "fans".into(),
            }],
            vec![record("r1", "B01")],
        );
        let mut first = Vec::new();
        write_corpus(&corpus, &mut first).unwrap();
        let reread = read_corpus(Cursor::new(&first)).unwrap();
        let mut second = Vec::new();
        write_corpus(&reread, &mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(reread.category, "fans");
        assert_eq!(
            reread.product("B01").unwrap().rendered_text(),
            "Fan X; quiet motor; 3 speeds"
        );
    }

    #[test]
    fn ingest_labels_and_retains_unlabeled_questions() {
        let data = concat!(
            r#"{"question_id":"q1","asin_id":"B01","question_text":"Is it loud?","item_name":"Fan X","answer_text":["Yes, very","no","Yes."]}"#,
            "\n",
            r#"{"question_id":"q2","asin_id":"B01","question_text":"What color is it?","item_name":"Fan X","answer_text":["Blue"]}"#,
            "\n",
            r#"{"question_id":"q3","asin_id":"B02","question_text":"Does it tilt?","item_name":"Fan Y","answer_text":[{"text":"No.","verified_seller":true},"yes"]}"#,
            "\n",
            r#"{"question_id":"q4","asin_id":"B02","question_text":"Is it tall?","item_name":"Fan Y","answer_text":["yes","no"]}"#,
            "\n",
        );
        let (raw, products, pstats) = parse_records(Cursor::new(data)).unwrap();
        let (corpus, stats) = build_corpus(
            raw,
            products,
            &RulePolarityClassifier,
            "fans".into(),
            pstats,
        );
        assert_eq!(corpus.records.len(), 4);
        assert_eq!(corpus.record("q1").unwrap().answer, Answer::Yes);
        assert_eq!(corpus.record("q2").unwrap().answer, Answer::Unknown);
        assert!(!corpus.record("q2").unwrap().yes_no_question);
        assert_eq!(corpus.record("q3").unwrap().answer, Answer::No);
        assert_eq!(corpus.record("q4").unwrap().answer, Answer::Unknown);
        assert_eq!(stats.yes_no_questions, 3);
        assert_eq!(stats.labeled_yes, 1);
        assert_eq!(stats.labeled_no, 1);
        assert_eq!(stats.dropped, 1);
        assert_eq!(corpus.labeled_records().count(), 2);
    }

    #[test]
    fn answer_hint_bypasses_classifier() {
        let data = concat!(
            r#"{"question_id":"q1","asin_id":"B01","question_text":"Is it loud?","answer_text":["definitely"],"yes-no_answer":"yes"}"#,
            "\n",
        );
        let (raw, products, pstats) = parse_records(Cursor::new(data)).unwrap();
        let (corpus, _) = build_corpus(
            raw,
            products,
            &RulePolarityClassifier,
            String::new(),
            pstats,
        );
        // "definitely" classifies as maybe; the hint forces yes.
        assert_eq!(corpus.record("q1").unwrap().answer, Answer::Yes);
    }
}
