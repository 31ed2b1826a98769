//! Corpus construction: nationality grouping, sparse-language cutoff,
//! last-name derivation, statistics and fixed-length text fragments.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::normalize::{normalize, NormalizationConfig};

pub const DEFAULT_MIN_EXAMPLES: usize = 556;

/// Which part of a person's name an example holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Full,
    Last,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::Last => "last",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(Variant::Full),
            "last" => Ok(Variant::Last),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledName {
    pub name: String,
    pub language: String,
    pub variant: Variant,
}

impl LabeledName {
    pub fn new(name: impl Into<String>, language: impl Into<String>, variant: Variant) -> Self {
        Self {
            name: name.into(),
            language: language.into(),
            variant,
        }
    }
}

/// The built-in grouping of nationalities into the thirteen corpus
/// languages. Greece is left unmapped on purpose: its original orthography
/// gives the answer away in one character.
pub const DEFAULT_RULES: &str = "\
# nationality=language, drop=<nationality>, min_examples=<n>
Germany=german
Austria=german
England=english
Scotland=english
Wales=english
Northern Ireland=english
Ireland=english
United Kingdom=english
Serbia=serbocroatian
Croatia=serbocroatian
Bosnia-Herzegovina=serbocroatian
Bosnia and Herzegovina=serbocroatian
Bosnia=serbocroatian
Italy=italian
France=french
Poland=polish
Spain=spanish
Denmark=danish
Netherlands=dutch
Sweden=swedish
Czech Republic=czechoslovak
Slovakia=czechoslovak
Norway=norwegian
Portugal=portuguese
Brazil=portuguese
drop=Belgium
drop=Switzerland
min_examples=556
";

/// How raw nationalities become languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingRules {
    languages: HashMap<String, String>,
    drop: HashSet<String>,
    pub min_examples: usize,
}

fn nationality_key(s: &str) -> String {
    s.trim().to_lowercase()
}

impl Default for GroupingRules {
    fn default() -> Self {
        Self::parse(DEFAULT_RULES, "default rules").expect("built-in rules parse")
    }
}

impl GroupingRules {
    pub fn empty() -> Self {
        Self {
            languages: HashMap::new(),
            drop: HashSet::new(),
            min_examples: DEFAULT_MIN_EXAMPLES,
        }
    }

    pub fn map(&mut self, nationality: &str, language: &str) -> &mut Self {
        self.languages
            .insert(nationality_key(nationality), language.trim().to_string());
        self
    }

    pub fn drop_nationality(&mut self, nationality: &str) -> &mut Self {
        self.drop.insert(nationality_key(nationality));
        self
    }

    pub fn with_min_examples(mut self, min: usize) -> Self {
        self.min_examples = min;
        self
    }

    pub fn language_of(&self, nationality: &str) -> Option<&str> {
        self.languages
            .get(&nationality_key(nationality))
            .map(String::as_str)
    }

    pub fn is_dropped(&self, nationality: &str) -> bool {
        self.drop.contains(&nationality_key(nationality))
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut rules = Self::empty();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::parse(origin, idx + 1, m.to_string());
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                .ok_or_else(|| bad("expected `nationality=language`"))?;
            match key {
                "drop" => {
                    rules.drop_nationality(value);
                }
                "min_examples" => {
                    rules.min_examples = value
                        .parse()
                        .map_err(|_| bad("min_examples must be a non-negative integer"))?;
                }
                _ => {
                    if value.chars().any(char::is_whitespace) {
                        return Err(bad("language labels cannot contain whitespace"));
                    }
                    rules.map(key, value);
                }
            }
        }
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// What ingestion skipped, and why.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub malformed: usize,
    pub dropped: usize,
    pub unmapped: usize,
    /// Languages removed by the `min_examples` cutoff, with their counts.
    pub below_threshold: Vec<(String, usize)>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub names: Vec<LabeledName>,
    pub stats: CorpusStats,
    pub report: IngestReport,
}

/// Reads `name<TAB>nationality` lines and applies the grouping rules.
///
/// Lines without exactly two fields, or whose name normalizes to nothing,
/// are counted as malformed and skipped. Blank lines are ignored.
pub fn ingest<R: BufRead>(reader: R, rules: &GroupingRules) -> Result<Ingested> {
    let mut report = IngestReport::default();
    let mut kept: Vec<LabeledName> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse("input", idx + 1, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (name, nationality) = match (fields.next(), fields.next(), fields.next()) {
            (Some(n), Some(nat), None) => (n.trim(), nat.trim()),
            _ => {
                report.malformed += 1;
                continue;
            }
        };
        if nationality.is_empty() || normalize(name, &NormalizationConfig::preserving()).is_empty()
        {
            report.malformed += 1;
            continue;
        }
        if rules.is_dropped(nationality) {
            report.dropped += 1;
            continue;
        }
        match rules.language_of(nationality) {
            Some(lang) => kept.push(LabeledName::new(name, lang, Variant::Full)),
            None => report.unmapped += 1,
        }
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in &kept {
        *counts.entry(n.language.as_str()).or_insert(0) += 1;
    }
    let sparse: HashSet<String> = counts
        .iter()
        .filter(|(_, c)| **c < rules.min_examples)
        .map(|(l, _)| l.to_string())
        .collect();
    report.below_threshold = counts
        .iter()
        .filter(|(l, _)| sparse.contains(**l))
        .map(|(l, c)| (l.to_string(), *c))
        .collect();
    kept.retain(|n| !sparse.contains(&n.language));

    if kept.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let stats = stats(&kept);
    Ok(Ingested {
        names: kept,
        stats,
        report,
    })
}

fn last_token(name: &str) -> &str {
    let norm = NormalizationConfig::preserving();
    name.split_whitespace()
        .rev()
        .find(|t| !normalize(t, &norm).is_empty())
        .unwrap_or(name)
}

/// Keeps the last whitespace-separated token of every name and removes
/// duplicate surnames within each language. Duplicates are compared on
/// the lowercased, unfolded normal form; the first occurrence wins.
pub fn derive_last_names(names: &[LabeledName]) -> Vec<LabeledName> {
    let norm = NormalizationConfig::preserving();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut out = Vec::new();
    for n in names {
        let last = last_token(&n.name);
        if seen.insert((normalize(last, &norm), n.language.clone())) {
            out.push(LabeledName::new(last, n.language.clone(), Variant::Last));
        }
    }
    out
}

/// Substrings of exactly `length` characters taken every `stride`
/// characters; a shorter tail is discarded.
pub fn fragment(text: &str, length: usize, stride: usize) -> Result<Vec<String>> {
    if length == 0 || stride == 0 {
        return Err(Error::InvalidArgument(
            "fragment length and stride must be positive".into(),
        ));
    }
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    while start + length <= chars.len() {
        out.push(chars[start..start + length].iter().collect());
        start += stride;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageStats {
    pub language: String,
    pub count: usize,
    pub mean_len: f64,
}

/// Per-language example counts and mean normalized lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    /// Sorted by count descending, then language.
    pub languages: Vec<LanguageStats>,
    pub total: usize,
    pub mean_len: f64,
}

/// Lengths are measured in characters of the unfolded normal form,
/// internal spaces included.
pub fn stats(names: &[LabeledName]) -> CorpusStats {
    let norm = NormalizationConfig::preserving();
    let mut acc: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut total_chars = 0usize;
    for n in names {
        let len = normalize(&n.name, &norm).chars().count();
        let slot = acc.entry(n.language.as_str()).or_insert((0, 0));
        slot.0 += 1;
        slot.1 += len;
        total_chars += len;
    }
    let mut languages: Vec<LanguageStats> = acc
        .into_iter()
        .map(|(l, (count, chars))| LanguageStats {
            language: l.to_string(),
            count,
            mean_len: chars as f64 / count as f64,
        })
        .collect();
    languages.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.language.cmp(&b.language))
    });
    let total = names.len();
    CorpusStats {
        languages,
        total,
        mean_len: if total == 0 {
            0.0
        } else {
            total_chars as f64 / total as f64
        },
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .languages
            .iter()
            .map(|l| l.language.len())
            .chain(["Language".len()])
            .max()
            .unwrap_or(8);
        writeln!(
            f,
            "{:<width$}  {:>6}  {:>9}",
            "Language", "Names", "Avg. Len."
        )?;
        for l in &self.languages {
            writeln!(
                f,
                "{:<width$}  {:>6}  {:>9.1}",
                l.language, l.count, l.mean_len
            )?;
        }
        writeln!(
            f,
            "{:<width$}  {:>6}  {:>9.1}",
            "Total", self.total, self.mean_len
        )
    }
}

/// Serializes examples as `name<TAB>language<TAB>variant` lines.
pub fn write_dataset(names: &[LabeledName]) -> String {
    let mut out = String::new();
    for n in names {
        out.push_str(&n.name);
        out.push('\t');
        out.push_str(&n.language);
        out.push('\t');
        out.push_str(&n.variant.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_dataset(text: &str, origin: &str) -> Result<Vec<LabeledName>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| Error::parse(origin, idx + 1, m);
        let fields: Vec<&str> = line.split('\t').collect();
        let [name, language, variant] = fields[..] else {
            return Err(bad("expected `name<TAB>language<TAB>variant`".into()));
        };
        if name.trim().is_empty() || language.trim().is_empty() {
            return Err(bad("empty name or language".into()));
        }
        let variant = variant.trim().parse().map_err(bad)?;
        out.push(LabeledName::new(name.trim(), language.trim(), variant));
    }
    Ok(out)
}

pub fn read_dataset(path: &Path) -> Result<Vec<LabeledName>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, &path.display().to_string())
}
