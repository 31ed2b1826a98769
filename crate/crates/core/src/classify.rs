//! Out-of-place distance and nearest-profile classification.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normalize::{normalize, NormalizationConfig};
use crate::profile::{build_profile, extract_ngrams, load_profile, NgramRange, RankedProfile};

/// File extension of profiles inside a model directory.
pub const PROFILE_EXT: &str = "prof";

/// Sum of rank displacements of every query n-gram inside `cat`; n-grams
/// missing from `cat` cost `cat.max_len()` each.
pub fn out_of_place(doc: &RankedProfile, cat: &RankedProfile) -> u64 {
    let penalty = cat.max_len() as u64;
    doc.ngrams()
        .enumerate()
        .map(|(rank, gram)| match cat.rank_of(gram) {
            Some(at) => rank.abs_diff(at) as u64,
            None => penalty,
        })
        .sum()
}

/// Label aliases: every alias resolves to exactly one canonical label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasMap {
    map: BTreeMap<String, String>,
}

impl AliasMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Maps every member of `group` to `canonical`.
    pub fn group<I, S>(canonical: &str, members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Self::new();
        for m in members {
            out.insert(m, canonical);
        }
        out
    }

    pub fn insert(&mut self, alias: impl Into<String>, canonical: impl Into<String>) {
        let alias = alias.into();
        let canonical = canonical.into();
        if alias != canonical {
            self.map.insert(alias, canonical);
        }
    }

    pub fn canonical<'a>(&'a self, label: &'a str) -> &'a str {
        self.map.get(label).map(String::as_str).unwrap_or(label)
    }

    pub fn same_group(&self, a: &str, b: &str) -> bool {
        self.canonical(a) == self.canonical(b)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(a, c)| (a.as_str(), c.as_str()))
    }

    fn validate(&self) -> Result<()> {
        for (alias, target) in &self.map {
            if self.map.contains_key(target) {
                return Err(Error::AliasChain {
                    alias: alias.clone(),
                    target: target.clone(),
                });
            }
        }
        Ok(())
    }

    /// Parses `alias=canonical` lines; `#` starts a comment line.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut out = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (alias, canonical) = line
                .split_once('=')
                .map(|(a, c)| (a.trim(), c.trim()))
                .filter(|(a, c)| !a.is_empty() && !c.is_empty())
                .ok_or_else(|| Error::parse(origin, idx + 1, "expected `alias=canonical`"))?;
            out.insert(alias, canonical);
        }
        out.validate()
            .map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// An immutable collection of language profiles sharing one n-gram range.
#[derive(Debug, Clone)]
pub struct ModelSet {
    profiles: Vec<RankedProfile>,
    aliases: AliasMap,
    range: NgramRange,
    max_len: usize,
}

impl ModelSet {
    pub fn new(mut profiles: Vec<RankedProfile>, aliases: AliasMap) -> Result<Self> {
        let first = profiles.first().ok_or(Error::NoModels)?;
        let range = first.range();
        profiles.sort_by(|a, b| a.label().cmp(b.label()));
        for pair in profiles.windows(2) {
            if pair[0].label() == pair[1].label() {
                return Err(Error::DuplicateLabel(pair[0].label().to_string()));
            }
        }
        for p in &profiles {
            if p.range() != range {
                return Err(Error::MismatchedRange {
                    label: p.label().to_string(),
                    expected: (range.min(), range.max()),
                    found: (p.range().min(), p.range().max()),
                });
            }
        }
        aliases.validate()?;
        let max_len = profiles
            .iter()
            .map(RankedProfile::max_len)
            .max()
            .unwrap_or(1);
        Ok(Self {
            profiles,
            aliases,
            range,
            max_len,
        })
    }

    /// Loads every `*.prof` file of `dir`, in file-name order.
    pub fn load_dir(dir: &Path, aliases: AliasMap) -> Result<Self> {
        let mut paths = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().is_some_and(|e| e == PROFILE_EXT) {
                paths.push(path);
            }
        }
        paths.sort();
        let profiles = paths
            .iter()
            .map(|p| load_profile(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(profiles, aliases)
    }

    pub fn profiles(&self) -> &[RankedProfile] {
        &self.profiles
    }

    pub fn aliases(&self) -> &AliasMap {
        &self.aliases
    }

    pub fn range(&self) -> NgramRange {
        self.range
    }

    /// Truncation length used for query profiles.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn get(&self, label: &str) -> Option<&RankedProfile> {
        self.profiles
            .binary_search_by(|p| p.label().cmp(label))
            .ok()
            .map(|i| &self.profiles[i])
    }

    pub fn canonical<'a>(&'a self, label: &'a str) -> &'a str {
        self.aliases.canonical(label)
    }

    /// Canonical labels the set can predict, sorted and deduplicated.
    pub fn canonical_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .profiles
            .iter()
            .map(|p| self.canonical(p.label()).to_string())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Builds a query profile from normalized text with this set's range
    /// and truncation length.
    pub fn query_profile(&self, normalized: &str) -> Result<RankedProfile> {
        let counts = extract_ngrams(normalized, self.range);
        if counts.is_empty() {
            return Err(Error::EmptyQuery);
        }
        build_profile(&counts, "query", self.max_len)
    }
}

/// Ranked distances from one query to every canonical label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// `(canonical label, distance)`, distance ascending then label ascending.
    pub ranking: Vec<(String, u64)>,
    pub best: String,
    /// Number of other labels sharing the best distance.
    pub ties: usize,
}

impl Classification {
    pub fn best_distance(&self) -> u64 {
        self.ranking[0].1
    }
}

/// Classifies an already built query profile.
pub fn classify_profile(query: &RankedProfile, models: &ModelSet) -> Classification {
    let mut by_label: BTreeMap<&str, u64> = BTreeMap::new();
    for model in &models.profiles {
        let d = out_of_place(query, model);
        by_label
            .entry(models.canonical(model.label()))
            .and_modify(|best| *best = (*best).min(d))
            .or_insert(d);
    }
    let mut ranking: Vec<(String, u64)> = by_label
        .into_iter()
        .map(|(label, d)| (label.to_string(), d))
        .collect();
    ranking.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let best = ranking[0].0.clone();
    let ties = ranking[1..]
        .iter()
        .take_while(|(_, d)| *d == ranking[0].1)
        .count();
    Classification {
        ranking,
        best,
        ties,
    }
}

/// Classifies text that has already been normalized.
pub fn classify_normalized(normalized: &str, models: &ModelSet) -> Result<Classification> {
    let query = models.query_profile(normalized)?;
    Ok(classify_profile(&query, models))
}

/// Normalizes `text`, profiles it and picks the nearest model.
pub fn classify(
    text: &str,
    models: &ModelSet,
    norm: &NormalizationConfig,
) -> Result<Classification> {
    classify_normalized(&normalize(text, norm), models)
}

/// Element-wise [`classify`]; a failing item does not abort the others.
pub fn classify_batch<S: AsRef<str> + Sync>(
    texts: &[S],
    models: &ModelSet,
    norm: &NormalizationConfig,
) -> Vec<Result<Classification>> {
    texts
        .par_iter()
        .map(|t| classify(t.as_ref(), models, norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(label: &str, grams: &[&str], max_len: usize) -> RankedProfile {
        let entries = grams
            .iter()
            .enumerate()
            .map(|(i, g)| (g.to_string(), (grams.len() - i) as u64))
            .collect();
        RankedProfile::from_parts(label, entries, max_len, NgramRange::default(), false).unwrap()
    }

    fn trained(label: &str, text: &str) -> RankedProfile {
        let counts = extract_ngrams(
            &normalize(text, &NormalizationConfig::default()),
            NgramRange::default(),
        );
        build_profile(&counts, label, 400).unwrap()
    }

    #[test]
    fn self_distance_is_zero() {
        let p = prof("x", &["a", "b", "c"], 400);
        assert_eq!(out_of_place(&p, &p), 0);
    }

    #[test]
    fn swapped_pair() {
        assert_eq!(
            out_of_place(&prof("d", &["a", "b"], 400), &prof("c", &["b", "a"], 400)),
            2
        );
    }

    #[test]
    fn missing_grams_cost_max_len() {
        assert_eq!(
            out_of_place(&prof("d", &["x", "y"], 400), &prof("c", &["a", "b"], 400)),
            800
        );
    }

    #[test]
    fn penalty_uses_category_max_len_not_length() {
        assert_eq!(
            out_of_place(&prof("d", &["x"], 400), &prof("c", &["a"], 7)),
            7
        );
    }

    #[test]
    fn empty_doc_is_zero() {
        let empty =
            RankedProfile::from_parts("d", vec![], 400, NgramRange::default(), false).unwrap();
        assert_eq!(out_of_place(&empty, &prof("c", &["a"], 400)), 0);
    }

    #[test]
    fn training_text_classifies_as_itself() {
        let latin = "the quick brown fox jumps over the lazy dog";
        let models = ModelSet::new(
            vec![trained("english", latin), trained("greek", "")],
            AliasMap::new(),
        )
        .unwrap();
        let c = classify(latin, &models, &NormalizationConfig::default()).unwrap();
        assert_eq!(c.best, "english");
    }

    #[test]
    fn identical_models_tie_to_smaller_label() {
        let p = trained("zulu", "abc abd");
        let q = p.clone().with_label("alpha").unwrap();
        let models = ModelSet::new(vec![p, q], AliasMap::new()).unwrap();
        let c = classify("abc", &models, &NormalizationConfig::default()).unwrap();
        assert_eq!(c.best, "alpha");
        assert_eq!(c.ties, 1);
        assert_eq!(c.ranking[0].1, c.ranking[1].1);
    }

    #[test]
    fn empty_query_is_an_error() {
        let models = ModelSet::new(vec![trained("x", "abc")], AliasMap::new()).unwrap();
        assert!(matches!(
            classify(" 42 ", &models, &NormalizationConfig::default()),
            Err(Error::EmptyQuery)
        ));
    }

    #[test]
    fn aliases_take_group_minimum() {
        let models = ModelSet::new(
            vec![
                trained("serbian", "jovanovic petrovic"),
                trained("croatian", "horvat kovacic"),
                trained("english", "smith johnson"),
            ],
            AliasMap::group("serbocroatian", ["serbian", "croatian", "bosnian"]),
        )
        .unwrap();
        let c = classify("kovacic", &models, &NormalizationConfig::default()).unwrap();
        assert_eq!(c.best, "serbocroatian");
        assert_eq!(c.ranking.len(), 2);
        assert_eq!(models.canonical_labels(), ["english", "serbocroatian"]);
    }

    #[test]
    fn model_set_validation() {
        assert!(matches!(
            ModelSet::new(vec![], AliasMap::new()),
            Err(Error::NoModels)
        ));
        let dup = vec![prof("a", &["x"], 10), prof("a", &["y"], 10)];
        assert!(matches!(
            ModelSet::new(dup, AliasMap::new()),
            Err(Error::DuplicateLabel(_))
        ));
        let other =
            RankedProfile::from_parts("b", vec![], 10, NgramRange::new(1, 3).unwrap(), false)
                .unwrap();
        assert!(matches!(
            ModelSet::new(vec![prof("a", &["x"], 10), other], AliasMap::new()),
            Err(Error::MismatchedRange { .. })
        ));
        let mut chain = AliasMap::new();
        chain.insert("a", "b");
        chain.insert("b", "c");
        assert!(matches!(
            ModelSet::new(vec![prof("a", &["x"], 10)], chain),
            Err(Error::AliasChain { .. })
        ));
    }

    #[test]
    fn alias_file_format() {
        let a = AliasMap::parse(
            "# tc\nserbian=serbocroatian\n croatian = serbocroatian\n",
            "f",
        )
        .unwrap();
        assert_eq!(a.canonical("croatian"), "serbocroatian");
        assert_eq!(a.canonical("polish"), "polish");
        assert!(a.same_group("serbian", "croatian"));
        assert!(matches!(
            AliasMap::parse("oops\n", "f"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(AliasMap::parse("a=b\nb=c\n", "f").is_err());
    }

    #[test]
    fn batch_isolates_failures() {
        let models = ModelSet::new(
            vec![trained("x", "abc"), trained("y", "xyz")],
            AliasMap::new(),
        )
        .unwrap();
        let norm = NormalizationConfig::default();
        assert!(classify_batch::<&str>(&[], &models, &norm).is_empty());
        let out = classify_batch(&["abc", "", "xyz"], &models, &norm);
        assert_eq!(out[0].as_ref().unwrap().best, "x");
        assert!(matches!(out[1], Err(Error::EmptyQuery)));
        assert_eq!(out[2].as_ref().unwrap().best, "y");
        assert_eq!(
            out[0].as_ref().unwrap(),
            &classify("abc", &models, &norm).unwrap()
        );
    }

    #[test]
    fn load_dir_reads_profiles() {
        let dir = tempfile::tempdir().unwrap();
        for (label, text) in [("a", "abc"), ("b", "bcd")] {
            let c = extract_ngrams(text, NgramRange::default());
            let p = build_profile(&c, label, 400).unwrap();
            crate::profile::save_profile(&p, &dir.path().join(format!("{label}.prof"))).unwrap();
        }
        std::fs::write(dir.path().join("README"), "ignored").unwrap();
        let m = ModelSet::load_dir(dir.path(), AliasMap::new()).unwrap();
        assert_eq!(m.profiles().len(), 2);
        assert!(m.get("b").is_some());
        let empty = tempfile::tempdir().unwrap();
        assert!(matches!(
            ModelSet::load_dir(empty.path(), AliasMap::new()),
            Err(Error::NoModels)
        ));
        assert!(matches!(
            ModelSet::load_dir(&dir.path().join("nope"), AliasMap::new()),
            Err(Error::Io { .. })
        ));
    }
}
