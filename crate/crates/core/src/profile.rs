//! Character n-gram counting and rank profiles.
//!
//! A token is padded with one leading [`PAD`] and `n - 1` trailing pads
//! before its n-grams are taken, so word boundaries become ordinary
//! n-grams (`_ab`, `b__`). Unigrams are taken over the bare token.
//!
//! A [`RankedProfile`] is the language model: the `max_len` most frequent
//! n-grams, ordered by count descending and then by n-gram ascending.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::normalize::FoldTable;

/// Word-boundary pad symbol.
pub const PAD: char = '_';
pub const DEFAULT_MAX_LEN: usize = 400;
pub const DEFAULT_N_MIN: usize = 1;
pub const DEFAULT_N_MAX: usize = 5;
/// Largest supported n-gram order.
pub const N_LIMIT: usize = 5;

const HEADER_PREFIX: &str = "#namecat profile v1";

/// Inclusive range of n-gram orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NgramRange {
    min: usize,
    max: usize,
}

impl NgramRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min < 1 || min > max || max > N_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "n-gram range {min}..={max} must satisfy 1 <= min <= max <= {N_LIMIT}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> usize {
        self.min
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.min..=self.max).contains(&n)
    }
}

impl Default for NgramRange {
    fn default() -> Self {
        Self {
            min: DEFAULT_N_MIN,
            max: DEFAULT_N_MAX,
        }
    }
}

/// Raw n-gram occurrence counts, before ranking and truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramCounts {
    counts: HashMap<String, u64>,
    range: NgramRange,
}

impl NgramCounts {
    pub fn new(range: NgramRange) -> Self {
        Self {
            counts: HashMap::new(),
            range,
        }
    }

    /// Builds counts from explicit pairs; every count must be positive and
    /// every key length must fall within `range`.
    pub fn from_pairs<I, S>(range: NgramRange, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut out = Self::new(range);
        for (gram, count) in pairs {
            let gram = gram.into();
            let len = gram.chars().count();
            if !range.contains(len) {
                return Err(Error::InvalidArgument(format!(
                    "n-gram `{gram}` has length {len}, outside {}..={}",
                    range.min, range.max
                )));
            }
            if count == 0 {
                return Err(Error::InvalidArgument(format!(
                    "n-gram `{gram}` has zero count"
                )));
            }
            *out.counts.entry(gram).or_insert(0) += count;
        }
        Ok(out)
    }

    pub fn range(&self) -> NgramRange {
        self.range
    }

    pub fn get(&self, gram: &str) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Adds every count of `other` into `self`.
    pub fn merge(&mut self, other: &NgramCounts) {
        for (gram, count) in &other.counts {
            *self.counts.entry(gram.clone()).or_insert(0) += count;
        }
    }

    /// Removes the counts of `other`, which must be a sub-multiset of `self`.
    pub fn subtract(&mut self, other: &NgramCounts) {
        for (gram, count) in &other.counts {
            if let Entry::Occupied(mut slot) = self.counts.entry(gram.clone()) {
                let left = slot.get().saturating_sub(*count);
                if left == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = left;
                }
            }
        }
    }

    /// Multiplies every count by `factor` (which must be positive).
    pub fn scaled(&self, factor: u64) -> NgramCounts {
        assert!(factor > 0, "scale factor must be positive");
        NgramCounts {
            counts: self
                .counts
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
            range: self.range,
        }
    }

    fn add_token(&mut self, token: &[char]) {
        let mut buf = String::new();
        for n in self.range.min..=self.range.max {
            if n == 1 {
                for c in token {
                    buf.clear();
                    buf.push(*c);
                    self.bump(&buf);
                }
                continue;
            }
            let padded: Vec<char> = std::iter::once(PAD)
                .chain(token.iter().copied())
                .chain(std::iter::repeat_n(PAD, n - 1))
                .collect();
            for window in padded.windows(n) {
                buf.clear();
                buf.extend(window);
                self.bump(&buf);
            }
        }
    }

    fn bump(&mut self, gram: &str) {
        match self.counts.get_mut(gram) {
            Some(c) => *c += 1,
            None => {
                self.counts.insert(gram.to_owned(), 1);
            }
        }
    }
}

/// Counts the padded n-grams of every whitespace-separated token of an
/// already normalized text.
pub fn extract_ngrams(text: &str, range: NgramRange) -> NgramCounts {
    let mut counts = NgramCounts::new(range);
    let mut token = Vec::new();
    for word in text.split_whitespace() {
        token.clear();
        token.extend(word.chars());
        counts.add_token(&token);
    }
    counts
}

/// A ranked, truncated n-gram list: one language model.
#[derive(Debug, Clone)]
pub struct RankedProfile {
    label: String,
    entries: Vec<(String, u64)>,
    max_len: usize,
    range: NgramRange,
    folded: bool,
    index: HashMap<String, usize>,
}

impl PartialEq for RankedProfile {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.entries == other.entries
            && self.max_len == other.max_len
            && self.range == other.range
            && self.folded == other.folded
    }
}

impl Eq for RankedProfile {}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == '=') {
        return Err(Error::InvalidArgument(format!(
            "label `{label}` must be nonempty without whitespace or `=`"
        )));
    }
    Ok(())
}

impl RankedProfile {
    /// Assembles a profile from entries already in rank order.
    pub fn from_parts(
        label: impl Into<String>,
        entries: Vec<(String, u64)>,
        max_len: usize,
        range: NgramRange,
        folded: bool,
    ) -> Result<Self> {
        let label = label.into();
        validate_label(&label)?;
        if max_len == 0 {
            return Err(Error::InvalidArgument("max_len must be at least 1".into()));
        }
        if entries.len() > max_len {
            return Err(Error::InvalidArgument(format!(
                "{} entries exceed max_len {max_len}",
                entries.len()
            )));
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (rank, (gram, _)) in entries.iter().enumerate() {
            if index.insert(gram.clone(), rank).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate n-gram `{gram}`")));
            }
        }
        Ok(Self {
            label,
            entries,
            max_len,
            range,
            folded,
            index,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn range(&self) -> NgramRange {
        self.range
    }

    pub fn folded(&self) -> bool {
        self.folded
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(n-gram, count)` pairs in rank order.
    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn ngrams(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(g, _)| g.as_str())
    }

    pub fn rank_of(&self, gram: &str) -> Option<usize> {
        self.index.get(gram).copied()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        validate_label(&label)?;
        self.label = label;
        Ok(self)
    }

    /// Serializes to the line-oriented profile format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{HEADER_PREFIX} label={} nmin={} nmax={} maxlen={} folded={}",
            self.label,
            self.range.min,
            self.range.max,
            self.max_len,
            u8::from(self.folded)
        );
        for (gram, count) in &self.entries {
            let _ = writeln!(out, "{}\t{count}", gram.replace(' ', "_"));
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_text().as_bytes())
    }

    /// Parses the profile format. `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = match lines.next() {
            Some((_, h)) => h.trim_end_matches('\r'),
            None => return Err(Error::parse(origin, 1, "missing profile header")),
        };
        let meta = parse_header(header).map_err(|m| Error::parse(origin, 1, m))?;

        let mut entries: Vec<(String, u64)> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (idx, raw) in lines {
            let lineno = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let (gram, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "expected `<ngram><TAB><count>`"))?;
            if gram.is_empty() || gram.chars().any(char::is_whitespace) {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("invalid n-gram `{gram}`"),
                ));
            }
            let count: u64 = count
                .trim()
                .parse()
                .ok()
                .filter(|c| *c > 0)
                .ok_or_else(|| Error::parse(origin, lineno, format!("invalid count `{count}`")))?;
            if index.insert(gram.to_string(), entries.len()).is_some() {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("duplicate n-gram `{gram}`"),
                ));
            }
            if entries.len() == meta.max_len {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("more than maxlen={} entries", meta.max_len),
                ));
            }
            entries.push((gram.to_string(), count));
        }
        Ok(Self {
            label: meta.label,
            entries,
            max_len: meta.max_len,
            range: meta.range,
            folded: meta.folded,
            index,
        })
    }
}

struct Header {
    label: String,
    range: NgramRange,
    max_len: usize,
    folded: bool,
}

fn parse_header(line: &str) -> std::result::Result<Header, String> {
    let rest = line
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| format!("expected header starting with `{HEADER_PREFIX}`"))?;
    let mut label = None;
    let mut nmin = None;
    let mut nmax = None;
    let mut max_len = None;
    let mut folded = None;
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| format!("malformed header field `{field}`"))?;
        let num = || {
            value
                .parse::<usize>()
                .map_err(|_| format!("header field `{key}` is not an integer"))
        };
        match key {
            "label" => label = Some(value.to_string()),
            "nmin" => nmin = Some(num()?),
            "nmax" => nmax = Some(num()?),
            "maxlen" => max_len = Some(num()?),
            "folded" => {
                folded = Some(match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(format!("folded must be 0 or 1, got `{value}`")),
                })
            }
            _ => return Err(format!("unknown header field `{key}`")),
        }
    }
    let missing = |name: &str| format!("header is missing `{name}`");
    let label = label.ok_or_else(|| missing("label"))?;
    validate_label(&label).map_err(|e| e.to_string())?;
    let range = NgramRange::new(
        nmin.ok_or_else(|| missing("nmin"))?,
        nmax.ok_or_else(|| missing("nmax"))?,
    )
    .map_err(|e| e.to_string())?;
    let max_len = max_len.ok_or_else(|| missing("maxlen"))?;
    if max_len == 0 {
        return Err("maxlen must be at least 1".into());
    }
    Ok(Header {
        label,
        range,
        max_len,
        folded: folded.ok_or_else(|| missing("folded"))?,
    })
}

fn rank_counts(counts: HashMap<String, u64>, max_len: usize) -> Vec<(String, u64)> {
    let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(max_len);
    entries
}

/// Ranks counts (count descending, n-gram ascending) and keeps the top
/// `max_len`. The profile is marked unfolded.
pub fn build_profile(counts: &NgramCounts, label: &str, max_len: usize) -> Result<RankedProfile> {
    let entries = rank_counts(counts.counts.clone(), max_len.max(1));
    RankedProfile::from_parts(label, entries, max_len, counts.range, false)
}

/// Folds every raw n-gram through `table`, sums colliding counts and ranks
/// the merged counts. Multi-character folds may lengthen a key past the
/// range maximum; such keys are kept as they are.
pub fn fold_merge_recount(
    raw: &NgramCounts,
    table: &FoldTable,
    label: &str,
    max_len: usize,
) -> Result<RankedProfile> {
    let mut merged: HashMap<String, u64> = HashMap::with_capacity(raw.len());
    for (gram, count) in raw.iter() {
        *merged.entry(table.fold_str(gram)).or_insert(0) += count;
    }
    let entries = rank_counts(merged, max_len.max(1));
    RankedProfile::from_parts(label, entries, max_len, raw.range, true)
}

/// Folds an already truncated profile in place. Colliding entries keep the
/// better (lower) rank and add up their counts; everything below the
/// original truncation line stays lost.
pub fn fold_merge_degraded(profile: &RankedProfile, table: &FoldTable) -> RankedProfile {
    let mut entries: Vec<(String, u64)> = Vec::with_capacity(profile.len());
    let mut index: HashMap<String, usize> = HashMap::with_capacity(profile.len());
    for (gram, count) in &profile.entries {
        let folded = table.fold_str(gram);
        match index.get(&folded) {
            Some(&at) => entries[at].1 += count,
            None => {
                index.insert(folded.clone(), entries.len());
                entries.push((folded, *count));
            }
        }
    }
    RankedProfile {
        label: profile.label.clone(),
        entries,
        max_len: profile.max_len,
        range: profile.range,
        folded: true,
        index,
    }
}

pub fn save_profile(profile: &RankedProfile, path: &Path) -> Result<()> {
    std::fs::write(path, profile.to_text()).map_err(|e| Error::io(path, e))
}

pub fn load_profile(path: &Path) -> Result<RankedProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RankedProfile::parse(&text, &path.display().to_string())
}
