//! C ABI over `mub6`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released by the matching `*_free`. Every fallible call
//! returns a [`Mub6Status`]; on failure a message is available from
//! [`mub6_last_error`] until the next failing call on the same thread.
//! Strings returned through `char **` must be released with
//! [`mub6_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mub6::equivalence::{haagerup_fingerprint, standard_form};
use mub6::families::{make_family_pair, ParamSet};
use mub6::io;
use mub6::search::{find_extension_basis, ExtensionResult, SearchConfig};
use mub6::{CMatrix, Complex64, Error, FamilyId, FamilyParams, MuPair, Tolerance};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mub6Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParameterRange = 3,
    NotMutuallyUnbiased = 4,
    NotHadamard = 5,
    InvalidMove = 6,
    Parse = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Family selector values for [`mub6_pair_new`] and [`mub6_reduce`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mub6Family {
    P0 = 0,
    P1 = 1,
    P2 = 2,
    P3 = 3,
}

/// Angles in radians. Fields a family does not use are ignored.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct Mub6Params {
    pub xi: f64,
    pub eta: f64,
    pub zeta: f64,
    pub chi: f64,
    pub sigma: f64,
    pub tau: f64,
}

/// Member selector values for [`mub6_pair_member`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mub6Member {
    First = 0,
    Second = 1,
}

/// Opaque pair of mutually unbiased bases.
pub struct Mub6Pair {
    inner: MuPair,
}

/// Opaque result of an extension search.
pub struct Mub6Search {
    inner: ExtensionResult,
    seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> Mub6Status {
    match e {
        Error::ParameterRange { .. } | Error::MissingParameter(_) => Mub6Status::ParameterRange,
        Error::NotMutuallyUnbiased(_) => Mub6Status::NotMutuallyUnbiased,
        Error::NotHadamard => Mub6Status::NotHadamard,
        Error::InvalidMove { .. } => Mub6Status::InvalidMove,
        Error::Parse { .. } | Error::Json(_) => Mub6Status::Parse,
        Error::Io(_) => Mub6Status::Io,
        _ => Mub6Status::InvalidArgument,
    }
}

enum Fail {
    Status(Mub6Status, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(Mub6Status::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Mub6Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Mub6Status::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            Mub6Status::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(Mub6Status::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| Fail::Status(Mub6Status::InvalidArgument, "interior NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn family_of(raw: u32) -> Result<Mub6Family, Fail> {
    Ok(match raw {
        0 => Mub6Family::P0,
        1 => Mub6Family::P1,
        2 => Mub6Family::P2,
        3 => Mub6Family::P3,
        _ => return Err(Fail::Status(Mub6Status::InvalidArgument, format!("unknown family {raw}"))),
    })
}

fn family_params(family: Mub6Family, p: &Mub6Params) -> Result<FamilyParams, Error> {
    let (id, set) = match family {
        Mub6Family::P0 => (FamilyId::P0, ParamSet::default()),
        Mub6Family::P2 => (FamilyId::P2, ParamSet::default()),
        Mub6Family::P1 => (
            FamilyId::P1,
            ParamSet {
                xi: Some(p.xi),
                eta: Some(p.eta),
                ..ParamSet::default()
            },
        ),
        Mub6Family::P3 => (
            FamilyId::P3,
            ParamSet {
                zeta: Some(p.zeta),
                chi: Some(p.chi),
                sigma: Some(p.sigma),
                tau: Some(p.tau),
                ..ParamSet::default()
            },
        ),
    };
    FamilyParams::from_parts(id, &set)
}

fn copy_matrix(m: &CMatrix, out: *mut f64, len: usize) -> Result<(), Fail> {
    let need = 2 * m.nrows() * m.ncols();
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < need {
        return Err(Fail::Status(
            Mub6Status::BufferTooSmall,
            format!("buffer holds {len} doubles, need {need}"),
        ));
    }
    let buf = unsafe { std::slice::from_raw_parts_mut(out, need) };
    for (k, z) in m.entries().iter().enumerate() {
        buf[2 * k] = z.re;
        buf[2 * k + 1] = z.im;
    }
    Ok(())
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mub6_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mub6_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a family member. `family` is a [`Mub6Family`] value.
///
/// # Safety
/// `params` may be null for P0 and P2; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_new(
    family: u32,
    params: *const Mub6Params,
    out: *mut *mut Mub6Pair,
) -> Mub6Status {
    guard(|| {
        let family = family_of(family)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = if params.is_null() {
            match family {
                Mub6Family::P0 | Mub6Family::P2 => Mub6Params::default(),
                _ => return Err(null("params")),
            }
        } else {
            *params
        };
        let pair = make_family_pair(family_params(family, &p)?, &Tolerance::default())?;
        *out = Box::into_raw(Box::new(Mub6Pair { inner: pair }));
        Ok(())
    })
}

/// Parses a pair JSON document and checks unbiasedness.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_from_json(json: *const c_char, out: *mut *mut Mub6Pair) -> Mub6Status {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let pair = io::pair_from_json(text, &Tolerance::default())?;
        *out = Box::into_raw(Box::new(Mub6Pair { inner: pair }));
        Ok(())
    })
}

/// # Safety
/// `pair` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_free(pair: *mut Mub6Pair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Dimension of the pair, or 0 for a null handle.
///
/// # Safety
/// `pair` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_dim(pair: *const Mub6Pair) -> usize {
    pair.as_ref().map_or(0, |p| p.inner.dim())
}

/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_to_json(pair: *const Mub6Pair, out: *mut *mut c_char) -> Mub6Status {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        put_string(out, io::pair_to_json(&pair.inner))
    })
}

/// Copies one member, row-major, as interleaved `re, im` doubles
/// (`2 d^2` values).
///
/// # Safety
/// `pair` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_member(
    pair: *const Mub6Pair,
    member: u32,
    out: *mut f64,
    len: usize,
) -> Mub6Status {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        let m = match member {
            x if x == Mub6Member::First as u32 => pair.inner.first.matrix(),
            x if x == Mub6Member::Second as u32 => pair.inner.second.matrix(),
            _ => return Err(Fail::Status(Mub6Status::InvalidArgument, format!("unknown member {member}"))),
        };
        copy_matrix(m, out, len)
    })
}

/// Largest deviation of `|<a|b>|^2` from `1/d`; `is_mu` is set against the
/// default tolerance.
///
/// # Safety
/// `pair` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_pair_verify(
    pair: *const Mub6Pair,
    worst_deviation: *mut f64,
    is_mu: *mut bool,
) -> Mub6Status {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        if worst_deviation.is_null() || is_mu.is_null() {
            return Err(null("output pointer"));
        }
        let report = pair.inner.report(&Tolerance::default());
        *worst_deviation = report.worst_deviation;
        *is_mu = report.is_mu;
        Ok(())
    })
}

/// Standard form `{I, H}` of a family member. `script_json` may be null;
/// otherwise it receives the reduction script.
///
/// # Safety
/// `params` as for [`mub6_pair_new`]; `out` writable; `script_json` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_reduce(
    family: u32,
    params: *const Mub6Params,
    out: *mut *mut Mub6Pair,
    script_json: *mut *mut c_char,
) -> Mub6Status {
    guard(|| {
        let family = family_of(family)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params.as_ref().copied().unwrap_or_default();
        if params.is_null() && matches!(family, Mub6Family::P1 | Mub6Family::P3) {
            return Err(null("params"));
        }
        let (pair, script) = standard_form(family_params(family, &p)?, &Tolerance::default())?;
        if !script_json.is_null() {
            put_string(script_json, io::script_to_json(&script))?;
        }
        *out = Box::into_raw(Box::new(Mub6Pair { inner: pair }));
        Ok(())
    })
}

/// Haagerup fingerprint of a `dim x dim` Hadamard matrix given as
/// interleaved `re, im` doubles, as JSON.
///
/// # Safety
/// `entries` must hold `2 dim^2` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_fingerprint_json(
    entries: *const f64,
    dim: usize,
    out: *mut *mut c_char,
) -> Mub6Status {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        if dim == 0 || dim > 64 {
            return Err(Fail::Status(Mub6Status::InvalidArgument, format!("dimension {dim}")));
        }
        let raw = std::slice::from_raw_parts(entries, 2 * dim * dim);
        let data: Vec<Complex64> = raw.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let m = CMatrix::new(dim, dim, data)?;
        let fp = haagerup_fingerprint(&m, &Tolerance::default())?;
        put_string(out, io::fingerprint_to_json(&fp))
    })
}

/// Searches for vectors unbiased to both members and for a third basis.
///
/// # Safety
/// `pair` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_search(
    pair: *const Mub6Pair,
    restarts: usize,
    seed: u64,
    out: *mut *mut Mub6Search,
) -> Mub6Status {
    guard(|| {
        let pair = pair.as_ref().ok_or_else(|| null("pair"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SearchConfig::default().with_restarts(restarts).with_seed(seed);
        let result = find_extension_basis(&pair.inner, &cfg, &Tolerance::default())?;
        *out = Box::into_raw(Box::new(Mub6Search { inner: result, seed }));
        Ok(())
    })
}

/// # Safety
/// `search` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mub6_search_free(search: *mut Mub6Search) {
    if !search.is_null() {
        drop(Box::from_raw(search));
    }
}

/// Number of distinct vectors found, or 0 for a null handle.
///
/// # Safety
/// `search` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mub6_search_count(search: *const Mub6Search) -> usize {
    search.as_ref().map_or(0, |s| s.inner.set.len())
}

/// Size of the largest set of mutually orthogonal vectors found.
///
/// # Safety
/// `search` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mub6_search_max_clique(search: *const Mub6Search) -> usize {
    search.as_ref().map_or(0, |s| s.inner.max_clique)
}

/// Whether a full extension basis was found.
///
/// # Safety
/// `search` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mub6_search_has_basis(search: *const Mub6Search) -> bool {
    search.as_ref().is_some_and(|s| s.inner.basis.is_some())
}

/// Copies vector `index` as interleaved `re, im` doubles (`2 d` values).
///
/// # Safety
/// `search` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mub6_search_vector(
    search: *const Mub6Search,
    index: usize,
    out: *mut f64,
    len: usize,
) -> Mub6Status {
    guard(|| {
        let s = search.as_ref().ok_or_else(|| null("search"))?;
        let cluster = s.inner.set.clusters.get(index).ok_or_else(|| {
            Fail::Status(
                Mub6Status::InvalidArgument,
                format!("index {index} out of range ({} vectors)", s.inner.set.len()),
            )
        })?;
        let v = cluster.vector.components();
        let column = CMatrix::new(1, v.len(), v.to_vec())?;
        copy_matrix(&column, out, len)
    })
}

/// Full search result as JSON.
///
/// # Safety
/// `search` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mub6_search_to_json(search: *const Mub6Search, out: *mut *mut c_char) -> Mub6Status {
    guard(|| {
        let s = search.as_ref().ok_or_else(|| null("search"))?;
        put_string(out, io::search_to_json(&s.inner, s.seed))
    })
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn mub6_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
