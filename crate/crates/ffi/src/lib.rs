//! C interface to `polaris`.
//!
//! Every fallible function returns a [`PolarisStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`polaris_last_error`]. Handles are opaque and must be released
//! with their matching `_free` function; strings returned by the library are
//! released with [`polaris_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polaris::apartments::{apartment, verify_theorem, Apartment, Theorem, Verdict, VerifyRequest};
use polaris::io::{to_json, CertificateFile, Header, SubspaceSetFile};
use polaris::polar::{FormKind, PointId, PolarSpace};
use polaris::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PolarisStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    /// A verifier ran to completion and rejected its input.
    Rejected = 3,
    Unsupported = 4,
    Internal = 5,
}

/// Form selector for [`polaris_space_new`].
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PolarisKind {
    Symplectic = 0,
    Hyperbolic = 1,
    Parabolic = 2,
}

/// A finite classical polar space.
pub struct PolarisSpace {
    inner: PolarSpace,
}

/// A standard apartment together with the space it lives in.
pub struct PolarisApartment {
    space: PolarSpace,
    inner: Apartment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(PolarisStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Unsupported(_) | Error::InvalidModulus(_) => PolarisStatus::Unsupported,
            Error::Inconsistent(_) => PolarisStatus::Internal,
            _ => PolarisStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PolarisStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(PolarisStatus::InvalidArgument, msg.into())
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PolarisStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PolarisStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            PolarisStatus::Internal
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn space_ref<'a>(p: *const PolarisSpace) -> Result<&'a PolarSpace, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("space"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(PolarisStatus::Internal, "string contains a NUL byte".into()))
}

fn point_id(space: &PolarSpace, id: usize) -> Result<PointId, Fail> {
    space
        .point_ids()
        .nth(id)
        .ok_or_else(|| invalid(format!("point id {id} out of range")))
}

/// Builds the polar space of the given kind, rank `n` and prime `p`.
///
/// # Safety
/// `out_space` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_new(kind: PolarisKind, n: usize, p: u32, out_space: *mut *mut PolarisSpace) -> PolarisStatus {
    guard(|| {
        let slot = out(out_space, "out_space")?;
        *slot = ptr::null_mut();
        let kind = match kind {
            PolarisKind::Symplectic => FormKind::Symplectic,
            PolarisKind::Hyperbolic => FormKind::Hyperbolic,
            PolarisKind::Parabolic => FormKind::Parabolic,
        };
        let inner = PolarSpace::build(kind, n, p)?;
        *slot = Box::into_raw(Box::new(PolarisSpace { inner }));
        Ok(())
    })
}

/// # Safety
/// `space` must be null or a handle from [`polaris_space_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_free(space: *mut PolarisSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// # Safety
/// `space` must be a live handle and `out_rank` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_rank(space: *const PolarisSpace, out_rank: *mut usize) -> PolarisStatus {
    guard(|| {
        *out(out_rank, "out_rank")? = space_ref(space)?.rank();
        Ok(())
    })
}

/// Dimension of the underlying vector space.
///
/// # Safety
/// `space` must be a live handle and `out_dim` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_ambient_dim(space: *const PolarisSpace, out_dim: *mut usize) -> PolarisStatus {
    guard(|| {
        *out(out_dim, "out_dim")? = space_ref(space)?.ambient_dim();
        Ok(())
    })
}

/// # Safety
/// `space` must be a live handle and `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_point_count(space: *const PolarisSpace, out_count: *mut usize) -> PolarisStatus {
    guard(|| {
        *out(out_count, "out_count")? = space_ref(space)?.point_count();
        Ok(())
    })
}

/// Number of singular subspaces of projective dimension `k`.
///
/// # Safety
/// `space` must be a live handle and `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_count_singular(space: *const PolarisSpace, k: usize, out_count: *mut usize) -> PolarisStatus {
    guard(|| {
        let slot = out(out_count, "out_count")?;
        *slot = space_ref(space)?.enumerate_singular(k)?.len();
        Ok(())
    })
}

/// Whether points `a` and `b` (registry ids, `0..point_count`) are
/// collinear. Equal ids are an invalid argument.
///
/// # Safety
/// `space` must be a live handle and `out_collinear` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_space_collinear(space: *const PolarisSpace, a: usize, b: usize, out_collinear: *mut bool) -> PolarisStatus {
    guard(|| {
        let slot = out(out_collinear, "out_collinear")?;
        let s = space_ref(space)?;
        *slot = s.collinear(point_id(s, a)?, point_id(s, b)?)?;
        Ok(())
    })
}

/// The apartment of the standard frame at level `k`.
///
/// # Safety
/// `space` must be a live handle and `out_apartment` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_apartment_new(
    space: *const PolarisSpace,
    k: usize,
    out_apartment: *mut *mut PolarisApartment,
) -> PolarisStatus {
    guard(|| {
        let slot = out(out_apartment, "out_apartment")?;
        *slot = ptr::null_mut();
        let s = space_ref(space)?;
        let inner = apartment(s, &s.standard_frame(), k)?;
        *slot = Box::into_raw(Box::new(PolarisApartment { space: s.clone(), inner }));
        Ok(())
    })
}

/// # Safety
/// `apartment` must be null or a handle from [`polaris_apartment_new`].
#[no_mangle]
pub unsafe extern "C" fn polaris_apartment_free(apartment: *mut PolarisApartment) {
    if !apartment.is_null() {
        drop(Box::from_raw(apartment));
    }
}

/// # Safety
/// `apartment` must be a live handle and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn polaris_apartment_len(apartment: *const PolarisApartment, out_len: *mut usize) -> PolarisStatus {
    guard(|| {
        let a = apartment.as_ref().ok_or_else(|| null("apartment"))?;
        *out(out_len, "out_len")? = a.inner.len();
        Ok(())
    })
}

/// The apartment as a JSON subspace-set document, the same shape the
/// command line writes and [`polaris_verify_json`] reads.
///
/// # Safety
/// `apartment` must be a live handle and `out_json` writable. The string
/// must be released with [`polaris_string_free`].
#[no_mangle]
pub unsafe extern "C" fn polaris_apartment_to_json(apartment: *const PolarisApartment, out_json: *mut *mut c_char) -> PolarisStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let a = apartment.as_ref().ok_or_else(|| null("apartment"))?;
        let file = SubspaceSetFile::from_apartment(Header::new("polaris-ffi", 0), &a.space, &a.inner);
        *slot = c_string(to_json(&file).map_err(|e| Fail(PolarisStatus::Internal, e.to_string()))?)?;
        Ok(())
    })
}

/// Runs a theorem verifier on a JSON subspace-set document. `theorem` is a
/// name such as `"thm4.4"`.
///
/// Returns `Ok` and a certificate document on acceptance, `Rejected` with
/// the failing clause in [`polaris_last_error`] otherwise.
///
/// # Safety
/// `input` and `theorem` must be NUL-terminated strings; `out_certificate`
/// must be writable. The certificate must be released with
/// [`polaris_string_free`].
#[no_mangle]
pub unsafe extern "C" fn polaris_verify_json(
    input: *const c_char,
    theorem: *const c_char,
    out_certificate: *mut *mut c_char,
) -> PolarisStatus {
    guard(|| {
        let slot = out(out_certificate, "out_certificate")?;
        *slot = ptr::null_mut();
        let thm: Theorem = str_arg(theorem, "theorem")?.parse()?;
        let file: SubspaceSetFile =
            serde_json::from_str(str_arg(input, "input")?).map_err(|e| invalid(format!("input: {e}")))?;
        let space = file.space.build()?;
        let members = file.parse_members(&space)?;
        let map = file.labelled_map(&space)?;
        let (l, m) = if thm == Theorem::Thm41 {
            (0, file.l)
        } else {
            (file.l.ok_or_else(|| invalid("input has no l"))?, file.m)
        };
        let m = m.ok_or_else(|| invalid("input has no m"))?;
        let req = VerifyRequest {
            theorem: thm,
            l,
            m,
            members,
            map,
        };
        match verify_theorem(&space, &req)? {
            Verdict::Accept(cert) => {
                let doc = CertificateFile::new(Header::new("polaris-ffi", 0), thm, &space, &cert);
                *slot = c_string(to_json(&doc).map_err(|e| Fail(PolarisStatus::Internal, e.to_string()))?)?;
                Ok(())
            }
            Verdict::Reject(r) => Err(Fail(PolarisStatus::Rejected, format!("{}: {}", r.clause, r.detail))),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polaris_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn polaris_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// The message for the last failed call on this thread, or null. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn polaris_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
