//! # namecat
//!
//! Language identification for short strings and person names using
//! character n-gram rank profiles and the out-of-place distance.
//!
//! The pipeline is:
//!
//! 1. [`normalize`](normalize::normalize) raw text (lowercase, collapse
//!    non-letters, optionally fold Latin diacritics),
//! 2. [`extract_ngrams`](profile::extract_ngrams) over padded tokens,
//! 3. [`build_profile`](profile::build_profile): keep the most frequent
//!    n-grams in rank order,
//! 4. [`classify`](classify::classify): pick the model profile with the
//!    smallest [`out_of_place`](classify::out_of_place) distance.
//!
//! ```
//! use namecat::{build_profile, classify, extract_ngrams, normalize};
//! use namecat::{AliasMap, ModelSet, NgramRange, NormalizationConfig};
//!
//! let norm = NormalizationConfig::default();
//! let train = |label: &str, text: &str| {
//!     let counts = extract_ngrams(&normalize(text, &norm), NgramRange::default());
//!     build_profile(&counts, label, 400).unwrap()
//! };
//! let models = ModelSet::new(
//!     vec![
//!         train("polish", "Krzysztof Szczęsny Wojciech Przybylski"),
//!         train("italian", "Giuseppe Rossi Gianluca Bianchi"),
//!     ],
//!     AliasMap::new(),
//! )
//! .unwrap();
//! assert_eq!(classify("Brzęczyszczykiewicz", &models, &norm).unwrap().best, "polish");
//! ```
//!
//! Corpus preparation lives in [`corpus`], evaluation in [`eval`], and the
//! command-line front end in [`cli`].

pub mod classify;
pub mod cli;
pub mod corpus;
mod error;
pub mod eval;
pub mod normalize;
pub mod profile;

pub use classify::{
    classify, classify_batch, classify_normalized, out_of_place, AliasMap, Classification, ModelSet,
};
pub use corpus::{
    derive_last_names, fragment, ingest, stats, CorpusStats, GroupingRules, LabeledName, Variant,
};
pub use error::{Error, Result};
pub use eval::{
    cross_validate, evaluate_fixed, fscore, make_folds, EvalConfig, EvalReport, FoldSpec,
};
pub use normalize::{default_fold_table, normalize, FoldTable, NormalizationConfig};
pub use profile::{
    build_profile, extract_ngrams, fold_merge_degraded, fold_merge_recount, load_profile,
    save_profile, NgramCounts, NgramRange, RankedProfile,
};
