//! C ABI for namecat.
//!
//! Every fallible function returns a [`NamecatStatus`] and writes its result
//! through an out-pointer. On failure a message is available from
//! [`namecat_last_error`] on the same thread. Strings returned to the caller
//! must be released with [`namecat_string_free`]; handles with their own
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use namecat::{AliasMap, Error, ModelSet, NormalizationConfig, RankedProfile};

/// Result codes shared by all fallible functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamecatStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    EmptyQuery = 5,
    InvalidInput = 6,
    Panic = 7,
}

/// A loaded model directory plus the normalization used for queries.
pub struct NamecatModels {
    models: ModelSet,
    norm: NormalizationConfig,
}

/// A single rank profile.
pub struct NamecatProfile {
    profile: RankedProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(NamecatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io { .. } => NamecatStatus::Io,
            Error::Parse { .. } => NamecatStatus::Parse,
            Error::EmptyQuery => NamecatStatus::EmptyQuery,
            _ => NamecatStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `body` behind a panic guard and records any failure message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> NamecatStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => NamecatStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            NamecatStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(NamecatStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            NamecatStatus::InvalidUtf8,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

fn to_c_string(s: &str) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(NamecatStatus::InvalidInput, "string contains NUL".into()))
}

fn norm_config(fold_diacritics: bool) -> NormalizationConfig {
    if fold_diacritics {
        NormalizationConfig::folded()
    } else {
        NormalizationConfig::preserving()
    }
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next namecat call on the same thread.
#[no_mangle]
pub extern "C" fn namecat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn namecat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads every `*.prof` file in `dir`. `aliases_path` may be null.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn namecat_models_load(
    dir: *const c_char,
    aliases_path: *const c_char,
    fold_diacritics: bool,
    out: *mut *mut NamecatModels,
) -> NamecatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dir = str_arg(dir, "dir")?;
        let aliases = if aliases_path.is_null() {
            AliasMap::new()
        } else {
            AliasMap::load(Path::new(str_arg(aliases_path, "aliases_path")?))?
        };
        let models = ModelSet::load_dir(Path::new(dir), aliases)?;
        let handle = Box::new(NamecatModels {
            models,
            norm: norm_config(fold_diacritics),
        });
        *out = Box::into_raw(handle);
        Ok(())
    })
}

/// # Safety
/// `models` must be null or a live handle from [`namecat_models_load`].
#[no_mangle]
pub unsafe extern "C" fn namecat_models_free(models: *mut NamecatModels) {
    if !models.is_null() {
        drop(Box::from_raw(models));
    }
}

/// Number of loaded profiles; 0 for null.
///
/// # Safety
/// `models` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn namecat_models_count(models: *const NamecatModels) -> usize {
    models.as_ref().map_or(0, |m| m.models.profiles().len())
}

/// Classifies `text`. Writes the best canonical label (free with
/// [`namecat_string_free`]) and its distance; `out_ties` may be null.
///
/// # Safety
/// `models` must be a live handle, `text` NUL-terminated, and the
/// non-null out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn namecat_classify(
    models: *const NamecatModels,
    text: *const c_char,
    out_label: *mut *mut c_char,
    out_distance: *mut u64,
    out_ties: *mut usize,
) -> NamecatStatus {
    guard(|| {
        let m = models.as_ref().ok_or_else(|| null("models"))?;
        if out_label.is_null() {
            return Err(null("out_label"));
        }
        if out_distance.is_null() {
            return Err(null("out_distance"));
        }
        let text = str_arg(text, "text")?;
        let c = namecat::classify(text, &m.models, &m.norm)?;
        *out_label = to_c_string(&c.best)?;
        *out_distance = c.best_distance();
        if !out_ties.is_null() {
            *out_ties = c.ties;
        }
        Ok(())
    })
}

/// Normalizes `text` with the default fold table.
///
/// # Safety
/// `text` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn namecat_normalize(
    text: *const c_char,
    fold_diacritics: bool,
    out: *mut *mut c_char,
) -> NamecatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        *out = to_c_string(&namecat::normalize(text, &norm_config(fold_diacritics)))?;
        Ok(())
    })
}

/// Balanced F-score of precision and recall; 0 when both are 0.
#[no_mangle]
pub extern "C" fn namecat_fscore(precision: f64, recall: f64) -> f64 {
    namecat::fscore(precision, recall)
}

/// Loads one profile file.
///
/// # Safety
/// `path` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn namecat_profile_load(
    path: *const c_char,
    out: *mut *mut NamecatProfile,
) -> NamecatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let profile = namecat::load_profile(Path::new(path))?;
        *out = Box::into_raw(Box::new(NamecatProfile { profile }));
        Ok(())
    })
}

/// # Safety
/// `profile` must be null or a live handle from [`namecat_profile_load`].
#[no_mangle]
pub unsafe extern "C" fn namecat_profile_free(profile: *mut NamecatProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Number of ranked entries; 0 for null.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn namecat_profile_len(profile: *const NamecatProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.profile.len())
}

/// Out-of-place distance of `doc` against the category profile `cat`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn namecat_out_of_place(
    doc: *const NamecatProfile,
    cat: *const NamecatProfile,
    out: *mut u64,
) -> NamecatStatus {
    guard(|| {
        let doc = doc.as_ref().ok_or_else(|| null("doc"))?;
        let cat = cat.as_ref().ok_or_else(|| null("cat"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = namecat::out_of_place(&doc.profile, &cat.profile);
        Ok(())
    })
}
