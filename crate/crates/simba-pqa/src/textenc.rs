//! Text encoders: hashed n-gram embeddings and an external-service client.
//!
//! Every pipeline stage that touches text goes through the same abstraction:
//! a text (or a text pair) becomes a fixed-dimension real vector. The
//! self-contained encoder hashes word uni/bi-grams and character 3–5-grams
//! into `d` buckets with a sign hash, weights them by `1 + ln(tf)`, and
//! L2-normalizes, so cosine similarity reduces to a dot product. An external
//! embedding service can be swapped in behind the same vector contract.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-dimension real vector produced by an encoder.
///
/// `normalized` is false only for the all-zero vector (no features extracted)
/// and for concatenated pair vectors, which are feature blocks rather than
/// unit embeddings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f32>,
    pub normalized: bool,
}

impl EmbeddingVector {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Euclidean norm, accumulated in f64.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| *v as f64 * *v as f64)
            .sum::<f64>()
            .sqrt()
    }
}

/// Cosine similarity with f64 accumulation. Zero vectors have cosine 0 with
/// everything, including themselves.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (x, y) in a.iter().zip(b.iter()) {
        let (x, y) = (*x as f64, *y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Which encoder implementation backs an [`EncoderSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderKind {
    HashedNgram,
    ExternalService,
}

/// Everything needed to reproduce an encoder bit-for-bit.
///
/// Two encoders built from equal specs produce equal vectors for equal text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub kind: EncoderKind,
    /// Output dimension; the pair encoding is three times this.
    pub dimension: usize,
    pub hash_seed: u64,
    /// Highest word n-gram order (1 = unigrams only, 2 adds bigrams).
    pub word_ngram_max: usize,
    pub char_ngram_min: usize,
    pub char_ngram_max: usize,
    /// Weight features by `1 + ln(tf)` instead of raw term frequency.
    pub sublinear_tf: bool,
}

impl Default for EncoderSpec {
    fn default() -> Self {
        EncoderSpec {
            kind: EncoderKind::HashedNgram,
            dimension: 512,
            hash_seed: 0x5eed,
            word_ngram_max: 2,
            char_ngram_min: 3,
            char_ngram_max: 5,
            sublinear_tf: true,
        }
    }
}

impl EncoderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 8 {
            return Err(Error::Config(format!(
                "encoder dimension must be at least 8, got {}",
                self.dimension
            )));
        }
        if self.word_ngram_max == 0 {
            return Err(Error::Config("word_ngram_max must be at least 1".into()));
        }
        if self.char_ngram_min > self.char_ngram_max {
            return Err(Error::Config(format!(
                "char n-gram range is empty: {}..={}",
                self.char_ngram_min, self.char_ngram_max
            )));
        }
        Ok(())
    }
}

/// Lowercase a text and split it on non-alphanumeric characters, dropping
/// empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Seeded FNV-1a. Stable across platforms, unlike the std hasher.
fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// splitmix64 finalizer; used to derive the sign hash from the bucket hash.
fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The self-contained embedder: signed feature hashing over word and
/// character n-grams.
#[derive(Debug, Clone)]
pub struct HashedNgramEncoder {
    spec: EncoderSpec,
}

impl HashedNgramEncoder {
    pub fn new(spec: EncoderSpec) -> Result<Self> {
        spec.validate()?;
        Ok(HashedNgramEncoder { spec })
    }

    pub fn spec(&self) -> &EncoderSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    /// Hash every extracted feature of `text` into a term-frequency table.
    /// Keys are full 64-bit feature hashes; bucket and sign are derived from
    /// the key when the vector is accumulated.
    fn feature_counts(&self, text: &str) -> HashMap<u64, u32> {
        let tokens = tokenize(text);
        let mut counts: HashMap<u64, u32> = HashMap::new();
        let mut bump = |tag: u8, bytes: &[u8]| {
            // The tag byte namespaces word vs char features of equal bytes.
            let mut h = fnv1a(self.spec.hash_seed, &[tag]);
            for b in bytes {
                h ^= *b as u64;
                h = h.wrapping_mul(FNV_PRIME);
            }
            *counts.entry(h).or_insert(0) += 1;
        };

        for order in 1..=self.spec.word_ngram_max {
            if tokens.len() < order {
                break;
            }
            for window in tokens.windows(order) {
                let joined = window.join(" ");
                bump(order as u8, joined.as_bytes());
            }
        }

        let joined = tokens.join(" ");
        let chars: Vec<char> = joined.chars().collect();
        for n in self.spec.char_ngram_min..=self.spec.char_ngram_max {
            if chars.len() < n {
                break;
            }
            for window in chars.windows(n) {
                let gram: String = window.iter().collect();
                bump(0x80 | n as u8, gram.as_bytes());
            }
        }
        counts
    }

    /// Embed a text into a deterministic, L2-normalized vector.
    ///
    /// A text with no extractable features yields the zero vector with
    /// `normalized == false`.
    pub fn embed(&self, text: &str) -> EmbeddingVector {
        let d = self.spec.dimension;
        let mut acc = vec![0.0f64; d];
        for (key, tf) in self.feature_counts(text) {
            let weight = if self.spec.sublinear_tf {
                1.0 + (tf as f64).ln()
            } else {
                tf as f64
            };
            let bucket = (key % d as u64) as usize;
            let sign = if splitmix(key) & 1 == 0 { 1.0 } else { -1.0 };
            acc[bucket] += sign * weight;
        }
        let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return EmbeddingVector {
                values: vec![0.0; d],
                normalized: false,
            };
        }
        let values = acc.iter().map(|v| (v / norm) as f32).collect();
        EmbeddingVector {
            values,
            normalized: true,
        }
    }

    /// Encode a text pair as `[embed(a) ; embed(b) ; embed(a) ⊙ embed(b)]`.
    ///
    /// The elementwise-product block captures bucket-level overlap between
    /// the two texts; it is the bag-of-features stand-in for letting the two
    /// texts attend each other.
    pub fn embed_pair(&self, a: &str, b: &str) -> EmbeddingVector {
        let ea = self.embed(a);
        let eb = self.embed(b);
        pair_from_embeddings(&ea, &eb)
    }
}

/// Assemble the 3d pair vector from two already-computed embeddings.
pub fn pair_from_embeddings(ea: &EmbeddingVector, eb: &EmbeddingVector) -> EmbeddingVector {
    let d = ea.values.len();
    debug_assert_eq!(d, eb.values.len());
    let mut values = Vec::with_capacity(3 * d);
    values.extend_from_slice(&ea.values);
    values.extend_from_slice(&eb.values);
    for i in 0..d {
        values.push(ea.values[i] * eb.values[i]);
    }
    EmbeddingVector {
        values,
        normalized: false,
    }
}

/// Configuration for [`ExternalEmbeddingClient`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub endpoint: String,
    pub batch_size: usize,
    /// Attempts per batch before giving up.
    pub max_attempts: usize,
    /// First retry delay; doubles on each retry.
    pub backoff_ms: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            endpoint: String::new(),
            batch_size: 256,
            max_attempts: 3,
            backoff_ms: 100,
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f32>>,
}

/// Blocking client for an external embedding service speaking
/// `{"texts": [...]}` → `{"vectors": [[...], ...]}` JSON over HTTP.
pub struct ExternalEmbeddingClient {
    config: ServiceConfig,
    dimension: usize,
    http: reqwest::blocking::Client,
}

impl ExternalEmbeddingClient {
    pub fn new(config: ServiceConfig, dimension: usize) -> Result<Self> {
        if config.endpoint.is_empty() {
            return Err(Error::Config("embedding service endpoint is empty".into()));
        }
        if config.batch_size == 0 {
            return Err(Error::Config("embedding batch_size must be positive".into()));
        }
        let http = reqwest::blocking::Client::builder()
            .build()
            .map_err(|e| Error::Config(format!("http client: {e}")))?;
        Ok(ExternalEmbeddingClient {
            config,
            dimension,
            http,
        })
    }

    /// Fetch embeddings for `texts`, preserving order.
    ///
    /// Requests go out in batches of `batch_size`; each batch retries up to
    /// `max_attempts` times with exponential backoff. Vectors are
    /// L2-normalized client-side. A response vector of the wrong dimension or
    /// a persistent transport failure is an error carrying the batch index.
    pub fn fetch_embeddings(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        let mut out = Vec::with_capacity(texts.len());
        for (batch_index, batch) in texts.chunks(self.config.batch_size).enumerate() {
            let raw = self.fetch_batch(batch, batch_index)?;
            if raw.len() != batch.len() {
                return Err(Error::Service {
                    batch_index,
                    attempts: 1,
                    reason: format!("expected {} vectors, got {}", batch.len(), raw.len()),
                });
            }
            for values in raw {
                if values.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        got: values.len(),
                        context: format!("embedding service batch {batch_index}"),
                    });
                }
                out.push(normalize_client_side(values));
            }
        }
        Ok(out)
    }

    fn fetch_batch(&self, batch: &[String], batch_index: usize) -> Result<Vec<Vec<f32>>> {
        let mut delay = std::time::Duration::from_millis(self.config.backoff_ms);
        let mut last_error = String::new();
        for attempt in 1..=self.config.max_attempts {
            if attempt > 1 {
                std::thread::sleep(delay);
                delay *= 2;
            }
            let response = self
                .http
                .post(&self.config.endpoint)
                .json(&EmbedRequest { texts: batch })
                .send();
            match response.and_then(|r| r.error_for_status()) {
                Ok(resp) => match resp.json::<EmbedResponse>() {
                    Ok(body) => return Ok(body.vectors),
                    Err(e) => last_error = format!("bad response body: {e}"),
                },
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(Error::Service {
            batch_index,
            attempts: self.config.max_attempts,
            reason: last_error,
        })
    }
}

fn normalize_client_side(values: Vec<f32>) -> EmbeddingVector {
    let norm = values.iter().map(|v| *v as f64 * *v as f64).sum::<f64>().sqrt();
    if norm == 0.0 {
        return EmbeddingVector {
            values,
            normalized: false,
        };
    }
    EmbeddingVector {
        values: values.iter().map(|v| (*v as f64 / norm) as f32).collect(),
        normalized: true,
    }
}

/// An encoder of either kind behind one embedding interface.
pub enum Embedder {
    Hashed(HashedNgramEncoder),
    External(ExternalEmbeddingClient),
}

impl Embedder {
    pub fn dimension(&self) -> usize {
        match self {
            Embedder::Hashed(e) => e.dimension(),
            Embedder::External(c) => c.dimension,
        }
    }

    pub fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        match self {
            Embedder::Hashed(e) => Ok(texts.iter().map(|t| e.embed(t)).collect()),
            Embedder::External(c) => c.fetch_embeddings(texts),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encoder() -> HashedNgramEncoder {
        HashedNgramEncoder::new(EncoderSpec::default()).unwrap()
    }

    #[test]
    fn tokenize_splits_on_non_alphanumeric() {
        assert_eq!(tokenize("Is it waterproof?"), vec!["is", "it", "waterproof"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("Fitbit-Flyer 2"), vec!["fitbit", "flyer", "2"]);
    }

    #[test]
    fn embed_is_deterministic_and_normalized() {
        let e = encoder();
        let a = e.embed("does this fan run quietly");
        let b = e.embed("does this fan run quietly");
        assert_eq!(a, b);
        assert!(a.normalized);
        assert!((a.norm() - 1.0).abs() < 1e-6);
        assert!((cosine(&a.values, &b.values) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn embed_empty_text_is_flagged_unnormalized() {
        let e = encoder();
        let v = e.embed("");
        assert!(v.is_zero());
        assert!(!v.normalized);
        assert_eq!(v.dimension(), 512);
    }

    #[test]
    fn paraphrase_scores_above_unrelated_question() {
        // Expected ordering computed with this encoder and frozen as a test.
        let e = encoder();
        let target = e.embed("does it shrink when washed");
        let paraphrase = e.embed("do these shrink after a wash");
        let unrelated = e.embed("does it have bluetooth");
        let close = cosine(&target.values, &paraphrase.values);
        let far = cosine(&target.values, &unrelated.values);
        assert!(
            close > far,
            "paraphrase cosine {close} should beat unrelated cosine {far}"
        );
    }

    #[test]
    fn hash_seed_changes_vectors_equal_seeds_reproduce() {
        let base = encoder();
        let same = HashedNgramEncoder::new(EncoderSpec::default()).unwrap();
        let mut other_spec = EncoderSpec::default();
        other_spec.hash_seed = 999;
        let other = HashedNgramEncoder::new(other_spec).unwrap();
        let t = "will these jeans shrink after a wash";
        assert_eq!(base.embed(t), same.embed(t));
        assert_ne!(base.embed(t), other.embed(t));
    }

    #[test]
    fn embed_pair_layout_matches_construction() {
        let e = encoder();
        let (a, b) = ("is it loud", "how loud is the fan");
        let ea = e.embed(a);
        let eb = e.embed(b);
        let pair = e.embed_pair(a, b);
        let d = e.dimension();
        assert_eq!(pair.dimension(), 3 * d);
        assert_eq!(&pair.values[..d], &ea.values[..]);
        assert_eq!(&pair.values[d..2 * d], &eb.values[..]);
        for i in 0..d {
            assert_eq!(pair.values[2 * d + i], ea.values[i] * eb.values[i]);
        }
    }

    #[test]
    fn embed_pair_with_empty_first_text_zeroes_first_and_interaction_blocks() {
        let e = encoder();
        let pair = e.embed_pair("", "is it loud");
        let d = e.dimension();
        assert!(pair.values[..d].iter().all(|v| *v == 0.0));
        assert!(pair.values[2 * d..].iter().all(|v| *v == 0.0));
        assert!(pair.values[d..2 * d].iter().any(|v| *v != 0.0));
    }

    #[test]
    fn embed_pair_of_text_with_itself_squares_the_interaction_block() {
        let e = encoder();
        let t = "does the strap adjust";
        let et = e.embed(t);
        let pair = e.embed_pair(t, t);
        let d = e.dimension();
        for i in 0..d {
            assert_eq!(pair.values[2 * d + i], et.values[i] * et.values[i]);
        }
    }

    #[test]
    fn spec_validation_rejects_tiny_dimensions() {
        let mut spec = EncoderSpec::default();
        spec.dimension = 4;
        assert!(HashedNgramEncoder::new(spec).is_err());
    }
}
