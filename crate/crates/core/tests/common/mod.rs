#![allow(dead_code)]

use std::path::PathBuf;

pub const LANGUAGES: [&str; 13] = [
    "czechoslovak",
    "danish",
    "dutch",
    "english",
    "french",
    "german",
    "italian",
    "norwegian",
    "polish",
    "portuguese",
    "serbocroatian",
    "spanish",
    "swedish",
];

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
}

pub fn data(name: &str) -> PathBuf {
    data_dir().join(name)
}

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
pub fn cli<S: AsRef<str>>(args: &[S]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv =
        std::iter::once("namecat".to_string()).chain(args.iter().map(|a| a.as_ref().to_string()));
    let code = namecat::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

/// Like [`cli`] but panics with diagnostics on a nonzero exit.
pub fn cli_ok<S: AsRef<str>>(args: &[S]) -> String {
    let (code, out, err) = cli(args);
    assert_eq!(
        code,
        0,
        "namecat {:?} failed:\n{err}",
        args.iter().map(|a| a.as_ref()).collect::<Vec<_>>()
    );
    out
}
