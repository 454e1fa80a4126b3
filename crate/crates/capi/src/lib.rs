//! C ABI over the analysis primitives: readability scoring, language
//! identification, fingerprint similarity, URL selection and keyphrase
//! extraction. Every entry point returns a [`PcStatus`]; results travel
//! through out-pointers. Strings returned to the caller are owned by
//! this library and must be released with [`pc_string_free`].
//!
//! Handles are opaque. A handle created by a `_new` function stays valid
//! until the matching `_free`; passing it anywhere after that is
//! undefined behavior, as it is for any C library.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use policorpus::dedup::{self, DedupRecord};
use policorpus::keymine;
use policorpus::langid::{self, LanguageProfile};
use policorpus::readability;
use policorpus::stopwords::Stopwords;
use policorpus::urlfilter;

/// Result of every ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    PcOk = 0,
    /// A required pointer argument was null.
    PcNullArgument = 1,
    /// An input string was not valid UTF-8.
    PcInvalidUtf8 = 2,
    /// The operation itself reported an error.
    PcModelError = 3,
    /// The library caught an internal panic instead of unwinding into C.
    PcPanic = 4,
}

/// Readability scores for one text, mirroring the library's four
/// formulas. `smog_short_sample` flags texts under thirty sentences,
/// where the SMOG estimate is known to be rough.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PcReadability {
    pub fres: f64,
    pub fkg: f64,
    pub smog: f64,
    pub cli: f64,
    pub smog_short_sample: bool,
}

/// Language detector over trained profiles.
pub struct PcLanguageId {
    profiles: Vec<LanguageProfile>,
}

/// Growable document collection for near-duplicate analysis.
#[derive(Default)]
pub struct PcDedupIndex {
    records: Vec<DedupRecord>,
}

fn guard(body: impl FnOnce() -> PcStatus) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => PcStatus::PcPanic,
    }
}

/// Borrows a C string as UTF-8, reporting the failure mode through the
/// status that `f` never sees.
unsafe fn with_str(ptr: *const c_char, f: impl FnOnce(&str) -> PcStatus) -> PcStatus {
    if ptr.is_null() {
        return PcStatus::PcNullArgument;
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => f(s),
        Err(_) => PcStatus::PcInvalidUtf8,
    }
}

fn export_string(s: String, out: *mut *mut c_char) -> PcStatus {
    // Interior NUL cannot round-trip through a C string; surface it as a
    // model error rather than truncating silently.
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            PcStatus::PcOk
        }
        Err(_) => PcStatus::PcModelError,
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Scores `text` with all four readability formulas.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_readability_score(text: *const c_char, out: *mut PcReadability) -> PcStatus {
    if out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        with_str(text, |text| {
            let scores = readability::score(&readability::text_stats(text));
            *out = PcReadability {
                fres: scores.fres,
                fkg: scores.fkg,
                smog: scores.smog,
                cli: scores.cli,
                smog_short_sample: scores.smog_short_sample,
            };
            PcStatus::PcOk
        })
    })
}

/// 64-bit similarity fingerprint of `text` over `shingle_k`-word
/// shingles. `shingle_k` of zero falls back to the default of 3.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_simhash64(text: *const c_char, shingle_k: u32, out: *mut u64) -> PcStatus {
    if out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        with_str(text, |text| {
            let k = if shingle_k == 0 { 3 } else { shingle_k as usize };
            *out = dedup::simhash(&dedup::shingle(text, k));
            PcStatus::PcOk
        })
    })
}

/// Hamming distance between two fingerprints. Total, so no status.
#[no_mangle]
pub extern "C" fn pc_hamming64(a: u64, b: u64) -> u32 {
    dedup::hamming(a, b)
}

/// Whether the crawl URL filter would select `url`.
///
/// # Safety
/// `url` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_url_selected(url: *const c_char, out: *mut bool) -> PcStatus {
    if out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        with_str(url, |url| {
            *out = urlfilter::select_url(url);
            PcStatus::PcOk
        })
    })
}

/// Creates a detector over the bundled language profiles.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_language_id_new(out: *mut *mut PcLanguageId) -> PcStatus {
    if out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        let handle = PcLanguageId {
            profiles: langid::bundled_profiles().to_vec(),
        };
        *out = Box::into_raw(Box::new(handle));
        PcStatus::PcOk
    })
}

/// # Safety
/// `handle` must come from [`pc_language_id_new`] and not already be
/// freed. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn pc_language_id_free(handle: *mut PcLanguageId) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Detects the language of `text`. `language_out` receives an owned
/// string (release with [`pc_string_free`]); `confidence_out` receives
/// the posterior of the winning language and may be null when the caller
/// does not care.
///
/// # Safety
/// `handle` must be a live detector; `text` a valid NUL-terminated
/// string; `language_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_language_id_detect(
    handle: *const PcLanguageId,
    text: *const c_char,
    language_out: *mut *mut c_char,
    confidence_out: *mut f64,
) -> PcStatus {
    if handle.is_null() || language_out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        with_str(text, |text| {
            let (language, confidence) = langid::detect(text, &(*handle).profiles);
            if !confidence_out.is_null() {
                *confidence_out = confidence;
            }
            export_string(language, language_out)
        })
    })
}

/// Creates an empty near-duplicate index.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_dedup_index_new(out: *mut *mut PcDedupIndex) -> PcStatus {
    if out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        *out = Box::into_raw(Box::new(PcDedupIndex::default()));
        PcStatus::PcOk
    })
}

/// # Safety
/// `handle` must come from [`pc_dedup_index_new`] and not already be
/// freed. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn pc_dedup_index_free(handle: *mut PcDedupIndex) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Adds one document. Near-duplicate comparison only ever happens inside
/// a domain, so the caller picks the grouping key.
///
/// # Safety
/// `handle` must be a live index; `id`, `domain` and `text` valid
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn pc_dedup_index_add(
    handle: *mut PcDedupIndex,
    id: *const c_char,
    domain: *const c_char,
    text: *const c_char,
) -> PcStatus {
    if handle.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        with_str(id, |id| {
            with_str(domain, |domain| {
                with_str(text, |text| {
                    (*handle).records.push(DedupRecord::from_text(id, domain, text));
                    PcStatus::PcOk
                })
            })
        })
    })
}

/// Runs near-duplicate detection at `threshold_bits` and returns a JSON
/// report through `json_out` (release with [`pc_string_free`]). The
/// report object has `kept` and `dropped` id arrays plus a `pairs` array
/// of `{id_a, id_b, domain, hamming, jaccard}` objects.
///
/// # Safety
/// `handle` must be a live index and `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_dedup_index_report(
    handle: *const PcDedupIndex,
    threshold_bits: u32,
    json_out: *mut *mut c_char,
) -> PcStatus {
    if handle.is_null() || json_out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        let outcome = dedup::near_dedup(&(*handle).records, threshold_bits);
        let report = serde_json::json!({
            "kept": outcome.kept,
            "dropped": outcome.dropped,
            "pairs": outcome.pairs,
        });
        export_string(report.to_string(), json_out)
    })
}

/// Extracts RAKE keyphrases from `text` and returns at most `top_k` of
/// them (zero means all), highest score first, as a JSON array of
/// `{phrase, score}` objects through `json_out` (release with
/// [`pc_string_free`]).
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `json_out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_rake_keyphrases(
    text: *const c_char,
    top_k: usize,
    json_out: *mut *mut c_char,
) -> PcStatus {
    if json_out.is_null() {
        return PcStatus::PcNullArgument;
    }
    guard(|| {
        with_str(text, |text| {
            let mut phrases = keymine::rake(text, Stopwords::bundled());
            if top_k > 0 {
                phrases.truncate(top_k);
            }
            let rows: Vec<serde_json::Value> = phrases
                .iter()
                .map(|p| serde_json::json!({"phrase": p.phrase, "score": p.score}))
                .collect();
            export_string(serde_json::Value::Array(rows).to_string(), json_out)
        })
    })
}
