//! Character-level neural lemmatization.
//!
//! A token's form and tags are encoded as a symbol sequence and rewritten
//! into its lemma by an attentional encoder-decoder. The crate also holds
//! the surrounding tooling: CoNLL-U I/O, ambiguity statistics, data
//! augmentation, a lemma cache, a look-up baseline and evaluation.

pub mod ambiguity;
pub mod augment;
pub mod baseline;
pub mod cache;
pub mod cli;
pub mod codec;
pub mod config;
pub mod conllu;
pub mod error;
pub mod eval;
pub mod inference;
pub mod lexicon;
pub mod model;
pub mod nn;
pub mod pipeline;
pub mod synthetic;

pub use error::{Error, Result};
