//! Similarity-based answer prediction for product questions.
//!
//! Given an unanswered yes/no question about a product, this crate predicts
//! the answer from a corpus of already-resolved questions on other products:
//!
//! 1. **Sibling retrieval** — the K nearest resolved questions by embedding
//!    cosine similarity ([`annindex`]).
//! 2. **Twin filtering** — siblings whose question-similarity score exceeds a
//!    threshold γ are assumed to share the question's intent ([`q2q`]).
//! 3. **Contextual product similarity** — a small MLP scores the probability
//!    ψ that a twin's product would give the same answer as the target
//!    product ([`cps`]).
//! 4. **Mixture of experts** — each twin votes with weight max(ψ², w_min) and
//!    the sign of the weighted sum decides the answer ([`predict`]).
//!
//! The crate also ships corpus ingestion and labeling ([`corpus`]), a
//! self-contained hashed n-gram text encoder plus an HTTP client for external
//! embedding services ([`textenc`]), question-pair mining ([`q2q`]), an
//! evaluation harness ([`eval`]), a synthetic corpus generator with exact
//! ground truth ([`datagen`]), and a pipeline driver used by the `simba`
//! binary ([`pipeline`]).
//!
//! The narrative guide lives in `book/`; its code snippets compile and run as
//! doctests of this crate.

pub mod annindex;
pub mod corpus;
pub mod cps;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod predict;
pub mod q2q;
pub mod textenc;

mod booktests;

pub use error::{Error, Result};
