//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors.

use std::ffi::OsString;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{classify_normalized, AliasMap, ModelSet, PROFILE_EXT};
use crate::corpus::{
    self, derive_last_names, fragment, ingest, GroupingRules, LabeledName, Variant,
};
use crate::error::{Error, Result};
use crate::eval::{self, EvalConfig, EvalReport, DEFAULT_K, DEFAULT_SEED};
use crate::normalize::{default_fold_table, FoldTable, NormalizationConfig};
use crate::profile::{
    fold_merge_degraded, fold_merge_recount, load_profile, save_profile, NgramCounts, NgramRange,
    RankedProfile, DEFAULT_MAX_LEN, DEFAULT_N_MAX, DEFAULT_N_MIN,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "namecat",
    version,
    about = "Character n-gram language identification for names and short strings"
)]
pub struct RunConfig {
    #[command(flatten)]
    pub shared: SharedFlags,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SharedFlags {
    /// Number of n-grams kept per profile
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: usize,

    /// Smallest n-gram order
    #[arg(long, global = true, default_value_t = DEFAULT_N_MIN)]
    pub n_min: usize,

    /// Largest n-gram order
    #[arg(long, global = true, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,

    /// Fold Latin diacritics to plain letters before profiling
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    pub fold_diacritics: bool,

    /// Fold table file (`source<TAB>target` lines) replacing the built-in table
    #[arg(long, global = true)]
    pub fold_table: Option<PathBuf>,

    /// Alias map file (`alias=canonical` lines)
    #[arg(long, global = true)]
    pub aliases: Option<PathBuf>,

    /// Seed for fold shuffling
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FoldMode {
    /// Fold the retained entries of a truncated profile
    Degraded,
    /// Fold the counts, merge collisions and re-rank
    Recount,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build full-name and last-name datasets from a `name<TAB>nationality` dump
    Prepare {
        #[arg(long = "in")]
        input: PathBuf,
        /// Full-name dataset output
        #[arg(long)]
        out: PathBuf,
        /// Last-name dataset output
        #[arg(long)]
        last_out: Option<PathBuf>,
        /// Grouping rules file; the built-in thirteen-language grouping otherwise
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Minimum examples per language [default: 556, or the rules file's value]
        #[arg(long)]
        min_examples: Option<usize>,
    },
    /// Train language profiles from a dataset or plain text
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        /// Train only this language (required with --plain); writes a single file
        #[arg(long)]
        lang: Option<String>,
        /// Treat the input as plain text rather than a `name<TAB>language<TAB>variant` dataset
        #[arg(long)]
        plain: bool,
        /// Output file (with --lang) or directory (one `<lang>.prof` per language)
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify texts against a directory of profiles
    Classify {
        #[arg(long)]
        models: PathBuf,
        /// Text to classify (repeatable)
        #[arg(long)]
        text: Vec<String>,
        /// File with one text per line
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Fold the diacritics of an existing profile
    FoldModel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FoldMode::Degraded)]
        mode: FoldMode,
        /// Output file; standard output otherwise
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cut normalized text into fixed-length fragments
    Fragment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        length: usize,
        /// Step between fragment starts [default: the fragment length]
        #[arg(long)]
        stride: Option<usize>,
        /// Language label attached to every fragment
        #[arg(long)]
        lang: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratified k-fold cross-validation of a dataset
    EvalCv {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        /// Also write the delimited report here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Train on one dataset (or load a model directory) and test on another
    EvalFixed {
        #[arg(long)]
        test: PathBuf,
        #[arg(long, conflicts_with = "models", required_unless_present = "models")]
        train: Option<PathBuf>,
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Per-language counts and mean lengths of a dataset
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Data(other),
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&config, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

impl SharedFlags {
    fn eval_config(&self) -> Result<EvalConfig> {
        if self.max_len == 0 {
            return Err(Error::InvalidArgument(
                "--max-len must be at least 1".into(),
            ));
        }
        let fold_table = match &self.fold_table {
            Some(p) => FoldTable::load(p)?,
            None => default_fold_table(),
        };
        Ok(EvalConfig {
            norm: NormalizationConfig {
                fold_diacritics: self.fold_diacritics,
                ..NormalizationConfig::default()
            },
            fold_table,
            range: NgramRange::new(self.n_min, self.n_max)?,
            max_len: self.max_len,
        })
    }

    fn alias_map(&self) -> Result<AliasMap> {
        match &self.aliases {
            Some(p) => AliasMap::load(p),
            None => Ok(AliasMap::new()),
        }
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let shared = &config.shared;
    let settings = shared.eval_config()?;
    let w = |r: std::io::Result<()>| r.map_err(|e| Failure::Data(Error::io("<stdout>", e)));

    match &config.command {
        Command::Prepare {
            input,
            out: full_out,
            last_out,
            rules,
            min_examples,
        } => {
            let mut rules = match rules {
                Some(p) => GroupingRules::load(p)?,
                None => GroupingRules::default(),
            };
            if let Some(m) = min_examples {
                rules.min_examples = *m;
            }
            let file = std::fs::File::open(input).map_err(io_err(input))?;
            let ingested = ingest(BufReader::new(file), &rules)?;
            let r = &ingested.report;
            w(writeln!(
                err,
                "skipped: {} malformed, {} drop-listed, {} unmapped",
                r.malformed, r.dropped, r.unmapped
            ))?;
            for (lang, count) in &r.below_threshold {
                w(writeln!(
                    err,
                    "removed {lang}: {count} < {}",
                    rules.min_examples
                ))?;
            }
            write_output(Some(full_out), &corpus::write_dataset(&ingested.names), out)?;
            w(write!(out, "{}", ingested.stats))?;
            if let Some(p) = last_out {
                let last = derive_last_names(&ingested.names);
                write_output(Some(p), &corpus::write_dataset(&last), out)?;
                w(write!(out, "\nLast names\n{}", corpus::stats(&last)))?;
            }
        }

        Command::Train {
            input,
            lang,
            plain,
            out: dest,
        } => {
            if *plain {
                let lang = lang
                    .as_deref()
                    .ok_or_else(|| Failure::Usage("--plain requires --lang".into()))?;
                let text = std::fs::read_to_string(input).map_err(io_err(input))?;
                let profile = eval::train_profile(text.lines(), lang, &settings)?;
                save_profile(&profile, dest)?;
                return Ok(());
            }
            let dataset = corpus::read_dataset(input)?;
            if let Some(lang) = lang {
                let names = dataset
                    .iter()
                    .filter(|n| &n.language == lang)
                    .map(|n| n.name.as_str());
                let profile = eval::train_profile(names, lang, &settings)?;
                if profile.is_empty() {
                    return Err(Failure::Data(Error::EmptyTraining(format!(
                        "language `{lang}`"
                    ))));
                }
                save_profile(&profile, dest)?;
            } else {
                std::fs::create_dir_all(dest).map_err(io_err(dest))?;
                let models = eval::train_models(&dataset, &settings, AliasMap::new())?;
                for p in models.profiles() {
                    save_profile(p, &dest.join(format!("{}.{PROFILE_EXT}", p.label())))?;
                }
            }
        }

        Command::Classify {
            models,
            text,
            input,
        } => {
            let models = ModelSet::load_dir(models, shared.alias_map()?)?;
            let mut queries: Vec<String> = text.clone();
            if let Some(p) = input {
                let body = std::fs::read_to_string(p).map_err(io_err(p))?;
                queries.extend(
                    body.lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(str::to_string),
                );
            }
            if queries.is_empty() {
                return Err(Failure::Usage(
                    "nothing to classify: pass --text or --in".into(),
                ));
            }
            let single = queries.len() == 1;
            for q in &queries {
                let normalized = settings.normalize(q);
                match classify_normalized(&normalized, &models) {
                    Ok(c) if single => {
                        w(writeln!(out, "best={} ties={}", c.best, c.ties))?;
                        for (label, d) in &c.ranking {
                            w(writeln!(out, "{label}\t{d}"))?;
                        }
                    }
                    Ok(c) => w(writeln!(out, "{q}\t{}\t{}", c.best, c.best_distance()))?,
                    Err(Error::EmptyQuery) if single => {
                        return Err(Failure::Data(Error::EmptyQuery))
                    }
                    Err(Error::EmptyQuery) => w(writeln!(out, "{q}\t!empty-query"))?,
                    Err(e) => return Err(e.into()),
                }
            }
        }

        Command::FoldModel {
            input,
            mode,
            out: dest,
        } => {
            let profile = load_profile(input)?;
            let folded = fold_profile(&profile, *mode, &settings.fold_table, shared.max_len)?;
            write_output(dest.as_deref(), &folded.to_text(), out)?;
        }

        Command::Fragment {
            input,
            length,
            stride,
            lang,
            out: dest,
        } => {
            let text = std::fs::read_to_string(input).map_err(io_err(input))?;
            let pieces = fragment(
                &settings.normalize(&text),
                *length,
                stride.unwrap_or(*length),
            )?;
            let rows: Vec<LabeledName> = pieces
                .into_iter()
                .map(|p| LabeledName::new(p, lang.clone(), Variant::Full))
                .collect();
            write_output(dest.as_deref(), &corpus::write_dataset(&rows), out)?;
        }

        Command::EvalCv { input, k, csv } => {
            let dataset = corpus::read_dataset(input)?;
            let report = eval::cross_validate(&dataset, *k, shared.seed, &settings)?;
            emit_report(&report, csv.as_deref(), out)?;
        }

        Command::EvalFixed {
            test,
            train,
            models,
            csv,
        } => {
            let test = corpus::read_dataset(test)?;
            let aliases = shared.alias_map()?;
            let report = match (train, models) {
                (Some(t), _) => {
                    eval::evaluate_fixed(&corpus::read_dataset(t)?, &test, &settings, aliases)?
                }
                (None, Some(dir)) => {
                    eval::evaluate_models(&ModelSet::load_dir(dir, aliases)?, &test, &settings)
                }
                (None, None) => unreachable!("clap requires --train or --models"),
            };
            emit_report(&report, csv.as_deref(), out)?;
        }

        Command::Stats { input } => {
            let dataset = corpus::read_dataset(input)?;
            w(write!(out, "{}", corpus::stats(&dataset)))?;
        }
    }
    Ok(())
}

fn fold_profile(
    profile: &RankedProfile,
    mode: FoldMode,
    table: &FoldTable,
    max_len: usize,
) -> Result<RankedProfile> {
    match mode {
        FoldMode::Degraded => Ok(fold_merge_degraded(profile, table)),
        FoldMode::Recount => {
            // the stored counts stand in for the raw counts
            let raw = NgramCounts::from_pairs(
                widest_range(profile),
                profile.entries().iter().map(|(g, c)| (g.clone(), *c)),
            )?;
            let merged = fold_merge_recount(&raw, table, profile.label(), max_len)?;
            RankedProfile::from_parts(
                profile.label(),
                merged.entries().to_vec(),
                max_len,
                profile.range(),
                true,
            )
        }
    }
}

// keys of an already folded profile may exceed its nominal range
fn widest_range(profile: &RankedProfile) -> NgramRange {
    let longest = profile
        .ngrams()
        .map(|g| g.chars().count())
        .max()
        .unwrap_or(1);
    let max = longest
        .max(profile.range().max())
        .min(crate::profile::N_LIMIT);
    NgramRange::new(1, max).unwrap_or(profile.range())
}

fn emit_report(report: &EvalReport, csv: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    write_output(None, &report.to_text(), out)?;
    if let Some(p) = csv {
        write_output(Some(p), &report.to_csv(), out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("namecat").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_args(&["stats", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--bogus"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["eval-cv", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("--k"));
    }

    #[test]
    fn missing_model_dir_is_data_error() {
        let (code, _, err) =
            run_args(&["classify", "--models", "/nonexistent/models", "--text", "x"]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("/nonexistent/models"));
    }

    #[test]
    fn bad_range_is_usage_error() {
        let (code, _, _) = run_args(&["--n-min", "3", "--n-max", "2", "stats", "--in", "x"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn defaults_match_published_settings() {
        let c = RunConfig::try_parse_from(["namecat", "eval-cv", "--in", "x"]).unwrap();
        assert_eq!(c.shared.max_len, 400);
        assert_eq!((c.shared.n_min, c.shared.n_max), (1, 5));
        assert_eq!(c.shared.seed, 1);
        assert!(c.shared.fold_diacritics);
        match c.command {
            Command::EvalCv { k, .. } => assert_eq!(k, 10),
            _ => unreachable!(),
        }
        let p =
            RunConfig::try_parse_from(["namecat", "prepare", "--in", "x", "--out", "y"]).unwrap();
        assert!(matches!(
            p.command,
            Command::Prepare {
                min_examples: None,
                ..
            }
        ));
        assert_eq!(GroupingRules::default().min_examples, 556);
    }
}
