//! Stratified k-fold cross-validation and fixed train/test evaluation.
//!
//! Predictions from every fold are pooled into one confusion matrix, and
//! per-language precision, recall and F are computed from that matrix.
//! Macro averages are unweighted means over languages with nonzero support.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{classify_profile, AliasMap, ModelSet};
use crate::corpus::LabeledName;
use crate::error::{Error, Result};
use crate::normalize::{default_fold_table, normalize_with, FoldTable, NormalizationConfig};
use crate::profile::{
    build_profile, extract_ngrams, NgramCounts, NgramRange, RankedProfile, DEFAULT_MAX_LEN,
};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_SEED: u64 = 1;

/// Column label for queries that normalized to nothing.
pub const UNCLASSIFIED: &str = "(none)";

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn fscore(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// A proportion as an integer percentage, rounded half-up.
pub fn percent(x: f64) -> u32 {
    // the epsilon keeps values like 0.665 from rounding down through
    // binary representation error
    (x * 100.0 + 0.5 + 1e-9).floor() as u32
}

/// Profiling settings shared by training and querying.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub norm: NormalizationConfig,
    pub fold_table: FoldTable,
    pub range: NgramRange,
    pub max_len: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            norm: NormalizationConfig::default(),
            fold_table: default_fold_table(),
            range: NgramRange::default(),
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

impl EvalConfig {
    pub fn normalize(&self, text: &str) -> String {
        normalize_with(text, &self.norm, &self.fold_table)
    }

    pub fn counts(&self, text: &str) -> NgramCounts {
        extract_ngrams(&self.normalize(text), self.range)
    }
}

/// Trains one profile on the given names, treated as one text stream.
pub fn train_profile<'a, I>(names: I, label: &str, config: &EvalConfig) -> Result<RankedProfile>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts = NgramCounts::new(config.range);
    for name in names {
        counts.merge(&config.counts(name));
    }
    build_profile(&counts, label, config.max_len)
}

/// Trains one profile per language present in `dataset`.
pub fn train_models(
    dataset: &[LabeledName],
    config: &EvalConfig,
    aliases: AliasMap,
) -> Result<ModelSet> {
    let mut by_lang: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for n in dataset {
        by_lang.entry(&n.language).or_default().push(&n.name);
    }
    let profiles = by_lang
        .into_iter()
        .map(|(lang, names)| train_profile(names, lang, config))
        .collect::<Result<Vec<_>>>()?;
    ModelSet::new(profiles, aliases)
}

/// Deterministic assignment of examples to folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSpec {
    pub k: usize,
    pub seed: u64,
    /// Fold index of every example, in dataset order.
    pub assignment: Vec<usize>,
}

impl FoldSpec {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for f in &self.assignment {
            sizes[*f] += 1;
        }
        sizes
    }

    /// Indices of the examples held out in fold `f`.
    pub fn test_indices(&self, f: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == f)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Shuffles each language's examples with a seeded generator, then deals
/// them round-robin onto folds. Languages are visited in label order and
/// the dealing position carries over from one language to the next, which
/// also keeps overall fold sizes within one of each other.
pub fn make_folds(dataset: &[LabeledName], k: usize, seed: u64) -> Result<FoldSpec> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 2, got {k}"
        )));
    }
    let mut by_lang: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in dataset.iter().enumerate() {
        by_lang.entry(&n.language).or_default().push(i);
    }
    if let Some((lang, idx)) = by_lang.iter().find(|(_, v)| v.len() < k) {
        return Err(Error::TooFewExamples {
            language: lang.to_string(),
            count: idx.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; dataset.len()];
    let mut cursor = 0;
    for indices in by_lang.values_mut() {
        indices.shuffle(&mut rng);
        for (j, &i) in indices.iter().enumerate() {
            assignment[i] = (cursor + j) % k;
        }
        cursor = (cursor + indices.len()) % k;
    }
    Ok(FoldSpec {
        k,
        seed,
        assignment,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageScore {
    pub language: String,
    pub support: u64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

/// Per-language scores, macro averages and the pooled confusion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<LanguageScore>,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub macro_f1: f64,
    /// Predicted labels heading the confusion columns; the matrix carries
    /// one extra trailing column for unclassified queries.
    pub predicted: Vec<String>,
    /// One row per entry of `rows`, in the same order.
    pub confusion: Vec<Vec<u64>>,
    /// Test labels the models cannot predict, with their example counts.
    pub unclassifiable: Vec<(String, u64)>,
}

/// One scored test item: canonical true label, canonical prediction.
type Outcome = (String, Option<String>);

impl EvalReport {
    fn from_outcomes(
        outcomes: &[Outcome],
        predictable: &[String],
        unclassifiable: BTreeMap<String, u64>,
    ) -> Self {
        let truths: BTreeSet<&str> = outcomes.iter().map(|(t, _)| t.as_str()).collect();
        let mut predicted: BTreeSet<&str> = predictable.iter().map(String::as_str).collect();
        predicted.extend(outcomes.iter().filter_map(|(_, p)| p.as_deref()));
        let predicted: Vec<String> = predicted.into_iter().map(str::to_string).collect();
        let col = |label: &str| predicted.binary_search_by(|p| p.as_str().cmp(label)).ok();

        let labels: Vec<&str> = truths.into_iter().collect();
        let width = predicted.len() + 1;
        let mut confusion = vec![vec![0u64; width]; labels.len()];
        for (truth, pred) in outcomes {
            let row = labels
                .binary_search(&truth.as_str())
                .expect("truth label indexed");
            let c = pred.as_deref().and_then(col).unwrap_or(predicted.len());
            confusion[row][c] += 1;
        }

        let mut col_sums = vec![0u64; width];
        for row in &confusion {
            for (c, v) in row.iter().enumerate() {
                col_sums[c] += v;
            }
        }

        let rows: Vec<LanguageScore> = labels
            .iter()
            .enumerate()
            .map(|(r, label)| {
                let support: u64 = confusion[r].iter().sum();
                let (tp, predicted_as) = match col(label) {
                    Some(c) => (confusion[r][c], col_sums[c]),
                    None => (0, 0),
                };
                let recall = if support > 0 {
                    tp as f64 / support as f64
                } else {
                    0.0
                };
                let precision = if predicted_as > 0 {
                    tp as f64 / predicted_as as f64
                } else {
                    0.0
                };
                LanguageScore {
                    language: label.to_string(),
                    support,
                    recall,
                    precision,
                    f1: fscore(precision, recall),
                }
            })
            .collect();

        let n = rows.len().max(1) as f64;
        let mean = |f: fn(&LanguageScore) -> f64| rows.iter().map(f).sum::<f64>() / n;
        Self {
            macro_recall: mean(|r| r.recall),
            macro_precision: mean(|r| r.precision),
            macro_f1: mean(|r| r.f1),
            rows,
            predicted,
            confusion,
            unclassifiable: unclassifiable.into_iter().collect(),
        }
    }

    /// Number of scored examples (unclassifiable labels excluded).
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        self.rows
            .iter()
            .zip(&self.confusion)
            .filter_map(|(row, counts)| {
                self.predicted
                    .binary_search(&row.language)
                    .ok()
                    .map(|c| counts[c])
            })
            .sum()
    }

    /// Micro accuracy: the confusion trace over the total.
    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.correct() as f64 / total as f64
        }
    }

    pub fn row(&self, language: &str) -> Option<&LanguageScore> {
        self.rows.iter().find(|r| r.language == language)
    }

    fn column_headers(&self) -> impl Iterator<Item = &str> {
        self.predicted
            .iter()
            .map(String::as_str)
            .chain([UNCLASSIFIED])
    }

    /// Aligned plain-text rendering with integer percentages.
    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.language.len())
            .chain(["Language".len(), "Average".len()])
            .max()
            .unwrap_or(8);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>6}  {:>6}  {:>6}",
            "Language", "Support", "Recall", "Prec.", "F"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>7}  {:>5}%  {:>5}%  {:>5}%",
                r.language,
                r.support,
                percent(r.recall),
                percent(r.precision),
                percent(r.f1)
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>5}%  {:>5}%  {:>5}%",
            "Average",
            self.total(),
            percent(self.macro_recall),
            percent(self.macro_precision),
            percent(self.macro_f1)
        );
        let _ = writeln!(
            out,
            "Accuracy: {}% ({} of {})",
            percent(self.accuracy()),
            self.correct(),
            self.total()
        );
        for (label, count) in &self.unclassifiable {
            let _ = writeln!(out, "Unclassifiable: {label} ({count})");
        }

        let _ = writeln!(out, "\nConfusion (rows: true, columns: predicted)");
        let cw = self
            .column_headers()
            .map(str::len)
            .max()
            .unwrap_or(4)
            .max(4);
        let _ = write!(out, "{:<width$}", "");
        for h in self.column_headers() {
            let _ = write!(out, "  {h:>cw$}");
        }
        out.push('\n');
        for (r, counts) in self.rows.iter().zip(&self.confusion) {
            let _ = write!(out, "{:<width$}", r.language);
            for v in counts {
                let _ = write!(out, "  {v:>cw$}");
            }
            out.push('\n');
        }
        out
    }

    /// Machine-readable rendering: a score table, then a `confusion`
    /// section, then (when present) an `unclassifiable` section.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("language,support,recall,precision,f1\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.4},{:.4},{:.4}",
                r.language, r.support, r.recall, r.precision, r.f1
            );
        }
        let _ = writeln!(
            out,
            "macro,{},{:.4},{:.4},{:.4}",
            self.total(),
            self.macro_recall,
            self.macro_precision,
            self.macro_f1
        );
        out.push_str("\nconfusion\ntrue\\predicted");
        for h in self.column_headers() {
            out.push(',');
            out.push_str(h);
        }
        out.push('\n');
        for (r, counts) in self.rows.iter().zip(&self.confusion) {
            out.push_str(&r.language);
            for v in counts {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        if !self.unclassifiable.is_empty() {
            out.push_str("\nunclassifiable\nlanguage,count\n");
            for (label, count) in &self.unclassifiable {
                let _ = writeln!(out, "{label},{count}");
            }
        }
        out
    }
}

/// Builds folds and cross-validates.
pub fn cross_validate(
    dataset: &[LabeledName],
    k: usize,
    seed: u64,
    config: &EvalConfig,
) -> Result<EvalReport> {
    let folds = make_folds(dataset, k, seed)?;
    cross_validate_with_folds(dataset, &folds, config)
}

/// For every fold, trains one profile per language on the other folds and
/// classifies the held-out examples.
pub fn cross_validate_with_folds(
    dataset: &[LabeledName],
    folds: &FoldSpec,
    config: &EvalConfig,
) -> Result<EvalReport> {
    if folds.assignment.len() != dataset.len() {
        return Err(Error::InvalidArgument(format!(
            "fold assignment covers {} examples, dataset has {}",
            folds.assignment.len(),
            dataset.len()
        )));
    }
    let languages: Vec<&str> = dataset
        .iter()
        .map(|n| n.language.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let lang_index = |l: &str| languages.binary_search(&l).expect("language indexed");

    let example_counts: Vec<NgramCounts> =
        dataset.par_iter().map(|n| config.counts(&n.name)).collect();

    // per language: counts of every fold, and the grand total
    let mut per_fold = vec![vec![NgramCounts::new(config.range); folds.k]; languages.len()];
    for ((n, counts), &f) in dataset.iter().zip(&example_counts).zip(&folds.assignment) {
        per_fold[lang_index(&n.language)][f].merge(counts);
    }
    let totals: Vec<NgramCounts> = per_fold
        .iter()
        .map(|fs| {
            let mut t = NgramCounts::new(config.range);
            fs.iter().for_each(|c| t.merge(c));
            t
        })
        .collect();

    let fold_outcomes = (0..folds.k)
        .into_par_iter()
        .map(|f| -> Result<Vec<(usize, Outcome)>> {
            let profiles = languages
                .iter()
                .enumerate()
                .map(|(li, lang)| {
                    let mut train = totals[li].clone();
                    train.subtract(&per_fold[li][f]);
                    if train.is_empty() {
                        return Err(Error::EmptyTraining(format!("fold {f}, language `{lang}`")));
                    }
                    build_profile(&train, lang, config.max_len)
                })
                .collect::<Result<Vec<_>>>()?;
            let models = ModelSet::new(profiles, AliasMap::new())?;
            Ok(folds
                .test_indices(f)
                .into_iter()
                .map(|i| {
                    let pred = predict(&example_counts[i], &models);
                    (i, (dataset[i].language.clone(), pred))
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut outcomes: Vec<(usize, Outcome)> = fold_outcomes.into_iter().flatten().collect();
    outcomes.sort_by_key(|(i, _)| *i);
    let outcomes: Vec<Outcome> = outcomes.into_iter().map(|(_, o)| o).collect();
    let predictable: Vec<String> = languages.iter().map(|l| l.to_string()).collect();
    Ok(EvalReport::from_outcomes(
        &outcomes,
        &predictable,
        BTreeMap::new(),
    ))
}

fn predict(counts: &NgramCounts, models: &ModelSet) -> Option<String> {
    if counts.is_empty() {
        return None;
    }
    let query = build_profile(counts, "query", models.max_len()).ok()?;
    Some(classify_profile(&query, models).best)
}

/// Scores a fixed model set on a test set. Predictions and true labels are
/// both resolved through the model set's aliases, so any member of a true
/// label's alias group counts as correct. Test labels the models cannot
/// produce are reported as unclassifiable instead of being scored.
pub fn evaluate_models(models: &ModelSet, test: &[LabeledName], config: &EvalConfig) -> EvalReport {
    let predictable = models.canonical_labels();
    let scored: Vec<Result<Outcome, String>> = test
        .par_iter()
        .map(|n| {
            let truth = models.canonical(&n.language).to_string();
            if predictable.binary_search(&truth).is_err() {
                return Err(truth);
            }
            let counts = extract_ngrams(&config.normalize(&n.name), models.range());
            Ok((truth, predict(&counts, models)))
        })
        .collect();

    let mut outcomes = Vec::with_capacity(scored.len());
    let mut unclassifiable: BTreeMap<String, u64> = BTreeMap::new();
    for s in scored {
        match s {
            Ok(o) => outcomes.push(o),
            Err(label) => *unclassifiable.entry(label).or_insert(0) += 1,
        }
    }
    EvalReport::from_outcomes(&outcomes, &predictable, unclassifiable)
}

/// Trains on `train` and scores on `test` in a single pass.
pub fn evaluate_fixed(
    train: &[LabeledName],
    test: &[LabeledName],
    config: &EvalConfig,
    aliases: AliasMap,
) -> Result<EvalReport> {
    let models = train_models(train, config, aliases)?;
    Ok(evaluate_models(&models, test, config))
}
