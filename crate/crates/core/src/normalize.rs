//! Text canonicalization: lowercasing, non-letter collapsing and Latin
//! diacritic folding.
//!
//! The normalized form is the only input the n-gram profiler accepts. It
//! consists of letters separated by single spaces, with no leading or
//! trailing space.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// What to do with characters outside the Unicode letter class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonLetterPolicy {
    /// Replace with a space, then collapse runs of spaces to one.
    #[default]
    CollapseToSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationConfig {
    pub fold_diacritics: bool,
    pub lowercase: bool,
    pub nonletter_policy: NonLetterPolicy,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            fold_diacritics: true,
            lowercase: true,
            nonletter_policy: NonLetterPolicy::CollapseToSpace,
        }
    }
}

impl NormalizationConfig {
    pub fn folded() -> Self {
        Self::default()
    }

    pub fn preserving() -> Self {
        Self {
            fold_diacritics: false,
            ..Self::default()
        }
    }
}

/// Mapping from diacritic letters to plain lowercase Latin replacements.
///
/// Keys are single characters that are not themselves plain `a-z`; values
/// are nonempty strings over `a-z` (multi-character targets such as
/// `ß -> ss` are allowed).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FoldTable {
    mapping: BTreeMap<char, String>,
}

const DEFAULT_FOLDS: &[(char, &str)] = &[
    ('à', "a"),
    ('á', "a"),
    ('â', "a"),
    ('ã', "a"),
    ('ä', "a"),
    ('å', "a"),
    ('ą', "a"),
    ('æ', "ae"),
    ('ç', "c"),
    ('ć', "c"),
    ('č', "c"),
    ('ď', "d"),
    ('đ', "d"),
    ('ð', "d"),
    ('è', "e"),
    ('é', "e"),
    ('ê', "e"),
    ('ë', "e"),
    ('ę', "e"),
    ('ě', "e"),
    ('ì', "i"),
    ('í', "i"),
    ('î', "i"),
    ('ï', "i"),
    ('ı', "i"),
    ('ĺ', "l"),
    ('ľ', "l"),
    ('ł', "l"),
    ('ñ', "n"),
    ('ń', "n"),
    ('ň', "n"),
    ('ò', "o"),
    ('ó', "o"),
    ('ô', "o"),
    ('õ', "o"),
    ('ö', "o"),
    ('ø', "o"),
    ('ő', "o"),
    ('œ', "oe"),
    ('ŕ', "r"),
    ('ř', "r"),
    ('ß', "ss"),
    ('ś', "s"),
    ('š', "s"),
    ('ş', "s"),
    ('ť', "t"),
    ('ţ', "t"),
    ('þ', "th"),
    ('ù', "u"),
    ('ú', "u"),
    ('û', "u"),
    ('ü', "u"),
    ('ů', "u"),
    ('ű', "u"),
    ('ý', "y"),
    ('ÿ', "y"),
    ('ź', "z"),
    ('ż', "z"),
    ('ž', "z"),
];

/// Fold table covering the diacritic letters of the thirteen corpus
/// languages, plus a few neighbours (Hungarian, Icelandic, Romanian).
pub fn default_fold_table() -> FoldTable {
    FoldTable {
        mapping: DEFAULT_FOLDS
            .iter()
            .map(|&(k, v)| (k, v.to_string()))
            .collect(),
    }
}

fn is_plain_latin(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase())
}

impl FoldTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a mapping, rejecting plain-letter keys and non `a-z` targets.
    pub fn insert(&mut self, source: char, target: &str) -> Result<()> {
        if source.is_ascii_lowercase() {
            return Err(Error::InvalidArgument(format!(
                "fold source `{source}` is already a plain letter"
            )));
        }
        if !is_plain_latin(target) {
            return Err(Error::InvalidArgument(format!(
                "fold target `{target}` for `{source}` must be nonempty a-z"
            )));
        }
        self.mapping.insert(source, target.to_string());
        Ok(())
    }

    pub fn get(&self, c: char) -> Option<&str> {
        self.mapping.get(&c).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, &str)> {
        self.mapping.iter().map(|(k, v)| (*k, v.as_str()))
    }

    /// True when every target is a single character.
    pub fn is_one_to_one(&self) -> bool {
        self.mapping.values().all(|v| v.chars().count() == 1)
    }

    /// Folds `s` character-wise through the table only. Characters without
    /// an entry are copied unchanged.
    pub fn fold_str(&self, s: &str) -> String {
        let mut out = String::with_capacity(s.len());
        for c in s.chars() {
            match self.get(c) {
                Some(t) => out.push_str(t),
                None => out.push(c),
            }
        }
        out
    }

    /// Parses the `source<TAB>target` text format. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut table = FoldTable::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (source, target) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, lineno, "expected `source<TAB>target`"))?;
            let mut chars = source.chars();
            let key = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::parse(
                        origin,
                        lineno,
                        format!("fold source `{source}` must be a single character"),
                    ))
                }
            };
            table
                .insert(key, target.trim())
                .map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Resolves a lowercase letter to plain Latin: table first, then
    /// canonical decomposition with combining marks stripped.
    fn fold_letter(&self, c: char, out: &mut String) -> bool {
        if c.is_ascii_lowercase() {
            out.push(c);
            return true;
        }
        if let Some(t) = self.get(c) {
            out.push_str(t);
            return true;
        }
        let base: String = std::iter::once(c)
            .nfd()
            .filter(|m| !is_combining_mark(*m))
            .collect();
        if is_plain_latin(&base) {
            out.push_str(&base);
            true
        } else {
            false
        }
    }
}

impl fmt::Display for FoldTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.mapping {
            writeln!(f, "{k}\t{v}")?;
        }
        Ok(())
    }
}

fn shared_default_table() -> &'static FoldTable {
    static TABLE: OnceLock<FoldTable> = OnceLock::new();
    TABLE.get_or_init(default_fold_table)
}

/// Normalizes with the default fold table.
pub fn normalize(text: &str, config: &NormalizationConfig) -> String {
    normalize_with(text, config, shared_default_table())
}

/// Normalizes `text`, folding diacritics through `table` when the config
/// asks for it. Letters that cannot be folded to plain Latin are treated
/// as non-letters in folding mode.
pub fn normalize_with(text: &str, config: &NormalizationConfig, table: &FoldTable) -> String {
    let cased: String = if config.lowercase {
        text.nfc().flat_map(char::to_lowercase).nfc().collect()
    } else {
        text.nfc().collect()
    };

    let mut out = String::with_capacity(cased.len());
    // a separator is only emitted once another letter follows it
    let mut pending_space = false;

    let mut scratch = String::new();
    for c in cased.chars() {
        if !c.is_alphabetic() {
            pending_space = !out.is_empty();
            continue;
        }
        scratch.clear();
        let ok = if !config.fold_diacritics {
            scratch.push(c);
            true
        } else if c.is_uppercase() {
            // only reachable with lowercase = false
            let mut lower = String::new();
            let folded = c.to_lowercase().all(|l| table.fold_letter(l, &mut lower));
            scratch.push_str(&lower.to_uppercase());
            folded
        } else {
            table.fold_letter(c, &mut scratch)
        };
        if !ok {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.push_str(&scratch);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fold(s: &str) -> String {
        normalize(s, &NormalizationConfig::folded())
    }

    fn keep(s: &str) -> String {
        normalize(s, &NormalizationConfig::preserving())
    }

    #[test]
    fn folds_norwegian_pa() {
        assert_eq!(fold("på"), "pa");
        assert_eq!(keep("på"), "på");
    }

    #[test]
    fn plain_lowercase_is_identity() {
        assert_eq!(fold("abc"), "abc");
        assert_eq!(keep("abc"), "abc");
    }

    #[test]
    fn mixed_name_with_punctuation() {
        assert_eq!(fold("Müller-Šťastný  III"), "muller stastny iii");
        assert_eq!(keep("Müller-Šťastný  III"), "müller šťastný iii");
    }

    #[test]
    fn empty_and_blank() {
        assert_eq!(fold(""), "");
        assert_eq!(fold("  -- 42 "), "");
    }

    #[test]
    fn digits_and_apostrophes_become_spaces() {
        assert_eq!(fold("O'Brien 2nd"), "o brien nd");
    }

    #[test]
    fn decomposed_input_is_composed_first() {
        assert_eq!(keep("Rene\u{301}"), "rené");
        assert_eq!(fold("Rene\u{301}"), "rene");
    }

    #[test]
    fn multi_char_folds() {
        assert_eq!(fold("Straße"), "strasse");
        assert_eq!(fold("Æsir Łódź"), "aesir lodz");
    }

    #[test]
    fn unfoldable_letters_drop_in_fold_mode() {
        assert_eq!(fold("Μαύρος Smith"), "smith");
        assert_eq!(keep("Μαύρος"), "μαύρος");
    }

    #[test]
    fn no_lowercase_keeps_case() {
        let cfg = NormalizationConfig {
            lowercase: false,
            ..NormalizationConfig::folded()
        };
        assert_eq!(normalize("Ørsted Šimon", &cfg), "Orsted Simon");
    }

    #[test]
    fn default_table_entries() {
        let t = default_fold_table();
        assert_eq!(t.get('ř'), Some("r"));
        assert_eq!(t.get('å'), Some("a"));
        assert_eq!(t.get('a'), None);
        assert_eq!(t.get('æ'), Some("ae"));
        assert_eq!(t.get('ß'), Some("ss"));
        for c in "åäöüøæßçéèêëáàâíìîïóòôõúùûñýčšžřłąęćśźżňťďůě".chars()
        {
            assert!(t.get(c).is_some(), "missing {c}");
        }
        for (k, v) in t.iter() {
            assert!(!k.is_ascii_lowercase());
            assert!(is_plain_latin(v), "{k} -> {v}");
        }
    }

    #[test]
    fn table_file_round_trip() {
        let t = default_fold_table();
        let text = format!("# comment\n\n{t}");
        assert_eq!(FoldTable::parse(&text, "t").unwrap(), t);
    }

    #[test]
    fn table_file_errors() {
        let err = FoldTable::parse("å\ta\nab\tx\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = FoldTable::parse("å\tA\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = FoldTable::parse("å\t\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = FoldTable::parse("a\tb\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(FoldTable::parse("å a\n", "f").is_err());
    }

    #[test]
    fn custom_table_overrides_default() {
        let mut t = FoldTable::new();
        t.insert('ø', "oe").unwrap();
        let cfg = NormalizationConfig::folded();
        assert_eq!(normalize_with("Søren", &cfg, &t), "soeren");
    }
}
