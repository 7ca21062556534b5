//! C ABI over `convexval`.
//!
//! Objects cross the boundary as opaque handles ([`CvInput`], [`CvTransform`])
//! or as JSON strings in the same formats the command line reads and writes.
//! Every fallible call returns a [`CvStatus`]; on failure the message is kept
//! per thread and read with [`cv_last_error`].
//!
//! Ownership: handles come back through out-pointers and are released with
//! the matching `*_free`; strings returned by the library are released with
//! [`cv_string_free`]. Passing NULL to any free function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::Value as Json;

use convexval::duality::{dualize, TransformHandle};
use convexval::function::LogConcaveFn;
use convexval::harness::input::parse_json;
use convexval::harness::suites::{run_suite, SuiteConfig};
use convexval::harness::{Evaluator, Input};
use convexval::real::Prec;
use convexval::transforms::{laplace_logconcave, laplace_polytope, legendre_f, legendre_s, polar};
use convexval::value::Value;
use convexval::{Error, Vector};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CvStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON or an unreadable value.
    Parse = 3,
    /// Well-formed but unacceptable input (wrong class, dimension, parameter).
    Input = 4,
    /// The operation is outside the supported domain.
    Domain = 5,
    /// A verification suite ran and recorded a failing law; the report is
    /// still written.
    CheckFailed = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Opaque function or polytope.
pub struct CvInput(Input);

/// Opaque transform handle.
pub struct CvTransform(TransformHandle);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', "\\0")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CvStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::Io(_) => CvStatus::Parse,
        Error::Domain(_) | Error::Unsupported(_) => CvStatus::Domain,
        Error::Input(_) | Error::Parameter(_) | Error::DimensionMismatch { .. } => CvStatus::Input,
    }
}

struct Fail(CvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<CvStatus, Fail>) -> CvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            CvStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CvStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(CvStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(CvStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn out_arg<'a, T>(p: *mut *mut T, what: &str) -> Result<&'a mut *mut T, Fail> {
    let out = p.as_mut().ok_or_else(|| Fail(CvStatus::NullPointer, format!("{what} is NULL")))?;
    *out = ptr::null_mut();
    Ok(out)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON text has no interior nul").into_raw()
}

fn prec_of(bits: u32) -> Prec {
    if bits == 0 {
        Prec::default()
    } else {
        Prec(bits.max(16))
    }
}

/// Points as a JSON array of coordinate arrays; coordinates are rational
/// strings or integers.
fn parse_points(text: &str, n: usize) -> Result<Vec<Vector>, Fail> {
    let v = parse_json(text)?;
    let pts: Vec<Vector> = serde_json::from_value(v).map_err(|e| Fail(CvStatus::Parse, format!("points: {e}")))?;
    if let Some((i, x)) = pts.iter().enumerate().find(|(_, x)| x.dim() != n) {
        return Err(Fail(CvStatus::Input, format!("point {i} has {} coordinates, expected {n}", x.dim())));
    }
    Ok(pts)
}

fn values_json(points: &[Vector], values: Vec<Value>, prec: Prec) -> String {
    let rows: Vec<Json> = points
        .iter()
        .zip(values)
        .map(|(x, v)| {
            let mut o = serde_json::to_value(v.to_json(prec)).expect("serializable");
            o.as_object_mut().expect("object").insert("x".into(), serde_json::to_value(x).expect("serializable"));
            o
        })
        .collect();
    Json::Array(rows).to_string()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a polytope, class-S, class-F or log-concave function from JSON.
///
/// # Safety
/// `json` must be NULL or a nul-terminated string; `out` must be NULL or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cv_input_from_json(json: *const c_char, out: *mut *mut CvInput) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let input = Input::parse_str(str_arg(json, "json")?)?;
        let n = input.dim();
        if !(1..=4).contains(&n) {
            return Err(Fail(CvStatus::Input, format!("dimension {n} outside 1..=4")));
        }
        *out = Box::into_raw(Box::new(CvInput(input)));
        Ok(CvStatus::Ok)
    })
}

/// Serializes an input; the string is released with [`cv_string_free`].
///
/// # Safety
/// `input` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_input_to_json(input: *const CvInput, out: *mut *mut c_char) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(ref_arg(input, "input")?.0.to_json().to_string());
        Ok(CvStatus::Ok)
    })
}

/// Ambient dimension of an input, or 0 for NULL.
///
/// # Safety
/// `input` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cv_input_dim(input: *const CvInput) -> usize {
    input.as_ref().map_or(0, |i| i.0.dim())
}

/// # Safety
/// `input` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cv_input_free(input: *mut CvInput) {
    if !input.is_null() {
        drop(Box::from_raw(input));
    }
}

/// Legendre transform: S to F, F to S.
///
/// # Safety
/// `input` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_legendre(input: *const CvInput, out: *mut *mut CvInput) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = match &ref_arg(input, "input")?.0 {
            Input::S(u) => Input::F(legendre_s(u)),
            Input::F(u) => Input::S(legendre_f(u)),
            other => return Err(Fail(CvStatus::Input, format!("legendre expects S or F input, got {}", other.class()))),
        };
        *out = Box::into_raw(Box::new(CvInput(r)));
        Ok(CvStatus::Ok)
    })
}

/// Polar of a log-concave function.
///
/// # Safety
/// `input` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_polar(input: *const CvInput, out: *mut *mut CvInput) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = match &ref_arg(input, "input")?.0 {
            Input::Lc(f) => polar(f)?,
            other => return Err(Fail(CvStatus::Input, format!("polar expects a log-concave input, got {}", other.class()))),
        };
        *out = Box::into_raw(Box::new(CvInput(Input::Lc(r))));
        Ok(CvStatus::Ok)
    })
}

/// Infimal convolution of two class-S functions.
///
/// # Safety
/// `a`, `b` must be NULL or live handles; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_infconv(a: *const CvInput, b: *const CvInput, out: *mut *mut CvInput) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = match (&ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0) {
            (Input::S(u), Input::S(v)) => u.inf_conv(v)?,
            _ => return Err(Fail(CvStatus::Input, "infconv expects two class-S inputs".into())),
        };
        *out = Box::into_raw(Box::new(CvInput(Input::S(r))));
        Ok(CvStatus::Ok)
    })
}

/// Laplace transform of a polytope (indicator) or of `e^{-u}`, evaluated at
/// each point of `points_json`. Writes a JSON array of
/// `{"x", "value", "err_bound", "exact"}` objects. `precision_bits` of 0
/// selects the default.
///
/// # Safety
/// `input` must be NULL or a live handle; `points_json` NULL or
/// nul-terminated; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_laplace(
    input: *const CvInput,
    points_json: *const c_char,
    precision_bits: u32,
    out: *mut *mut c_char,
) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let src = &ref_arg(input, "input")?.0;
        let prec = prec_of(precision_bits);
        let points = parse_points(str_arg(points_json, "points_json")?, src.dim())?;
        let values = points
            .iter()
            .map(|x| {
                Ok(Value::Approx(match src {
                    Input::Polytope(p) => laplace_polytope(p, x, prec)?,
                    Input::Lc(f) => laplace_logconcave(f, x, prec)?,
                    Input::S(u) => laplace_logconcave(&LogConcaveFn::from_s(u.clone()), x, prec)?,
                    Input::F(_) => return Err(Error::Input("laplace of e^{-u} needs u of class S".into())),
                }))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        *out = into_c_string(values_json(&points, values, prec));
        Ok(CvStatus::Ok)
    })
}

/// Parses `{"transform": id, "params": {...}, "dualized": bool}`.
///
/// # Safety
/// `json` must be NULL or nul-terminated; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_transform_from_json(json: *const c_char, out: *mut *mut CvTransform) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let h = TransformHandle::from_json(&parse_json(str_arg(json, "json")?)?)?;
        *out = Box::into_raw(Box::new(CvTransform(h)));
        Ok(CvStatus::Ok)
    })
}

/// # Safety
/// `h` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_transform_to_json(h: *const CvTransform, out: *mut *mut c_char) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(ref_arg(h, "transform")?.0.to_json().to_string());
        Ok(CvStatus::Ok)
    })
}

/// The dual transform, as a new handle.
///
/// # Safety
/// `h` must be NULL or a live handle; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_transform_dualize(h: *const CvTransform, out: *mut *mut CvTransform) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = dualize(&ref_arg(h, "transform")?.0)?;
        *out = Box::into_raw(Box::new(CvTransform(d)));
        Ok(CvStatus::Ok)
    })
}

/// Evaluates a transform of `input` at each point; output as in
/// [`cv_laplace`].
///
/// # Safety
/// Pointers must be NULL or valid as for [`cv_laplace`].
#[no_mangle]
pub unsafe extern "C" fn cv_transform_eval(
    h: *const CvTransform,
    input: *const CvInput,
    points_json: *const c_char,
    precision_bits: u32,
    out: *mut *mut c_char,
) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let h = &ref_arg(h, "transform")?.0;
        let u = h.prepare(ref_arg(input, "input")?.0.clone());
        let prec = prec_of(precision_bits);
        let points = parse_points(str_arg(points_json, "points_json")?, u.dim())?;
        let values = points.iter().map(|x| h.eval(&u, x, prec)).collect::<Result<Vec<_>, Error>>()?;
        *out = into_c_string(values_json(&points, values, prec));
        Ok(CvStatus::Ok)
    })
}

/// # Safety
/// `h` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cv_transform_free(h: *mut CvTransform) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Runs a verification suite and writes its report JSON to `out`.
/// `count` of 0 keeps the suite's default fixture count. Returns
/// [`CvStatus::CheckFailed`] (with the report written) when a law fails.
///
/// # Safety
/// `suite` must be NULL or nul-terminated; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cv_verify(
    suite: *const c_char,
    dim: u32,
    seed: u64,
    count: usize,
    out: *mut *mut c_char,
) -> CvStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(suite, "suite")?;
        let mut cfg = SuiteConfig::new(dim as usize, seed);
        cfg.count = (count > 0).then_some(count);
        let r = run_suite(name, &cfg)?;
        *out = into_c_string(r.to_json_string());
        if r.pass {
            Ok(CvStatus::Ok)
        } else {
            let law = r.laws.iter().find(|l| !l.ok()).map_or("?", |l| l.name.as_str());
            set_error(format!("check failed: {law}"));
            Ok(CvStatus::CheckFailed)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take(s: *mut c_char) -> String {
        let r = CStr::from_ptr(s).to_str().unwrap().to_string();
        cv_string_free(s);
        r
    }

    unsafe fn last() -> String {
        CStr::from_ptr(cv_last_error()).to_str().unwrap().to_string()
    }

    #[test]
    fn null_arguments_are_reported() {
        unsafe {
            let mut h = ptr::null_mut();
            assert_eq!(cv_input_from_json(ptr::null(), &mut h), CvStatus::NullPointer);
            assert!(h.is_null());
            assert!(last().contains("json"));
            assert_eq!(cv_legendre(ptr::null(), ptr::null_mut()), CvStatus::NullPointer);
            cv_input_free(ptr::null_mut());
            cv_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn parse_errors_carry_a_location() {
        unsafe {
            let mut h = ptr::null_mut();
            assert_eq!(cv_input_from_json(c("{\"S\": [").as_ptr(), &mut h), CvStatus::Parse);
            assert!(last().contains("line 1"), "{}", last());
        }
    }

    #[test]
    fn cube_laplace_at_origin_is_one() {
        unsafe {
            let mut p = ptr::null_mut();
            let cube = r#"{"polytope":{"dim":2,"vertices":[["0","0"],["1","0"],["0","1"],["1","1"]]}}"#;
            assert_eq!(cv_input_from_json(c(cube).as_ptr(), &mut p), CvStatus::Ok, "{}", last());
            assert_eq!(cv_input_dim(p), 2);
            let mut s = ptr::null_mut();
            assert_eq!(cv_laplace(p, c(r#"[["0","0"]]"#).as_ptr(), 0, &mut s), CvStatus::Ok, "{}", last());
            let v: Json = serde_json::from_str(&take(s)).unwrap();
            let value: f64 = v[0]["value"].as_str().unwrap().parse().unwrap();
            let err: f64 = v[0]["err_bound"].as_str().unwrap().parse().unwrap();
            assert!((value - 1.0).abs() <= err.max(1e-30));
            assert_eq!(cv_laplace(p, c(r#"[["0"]]"#).as_ptr(), 0, &mut s), CvStatus::Input);
            cv_input_free(p);
        }
    }
}
