use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use convexval_ffi::*;
use serde_json::Value as Json;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let r = CStr::from_ptr(s).to_str().unwrap().to_owned();
    cv_string_free(s);
    r
}

unsafe fn last() -> String {
    let p = cv_last_error();
    if p.is_null() {
        String::new()
    } else {
        CStr::from_ptr(p).to_string_lossy().into_owned()
    }
}

const S_FN: &str = r#"{"S":{"points":[{"x":["0"],"t":"0"},{"x":["1"],"t":"1"},{"x":["-1"],"t":"2"}]}}"#;

#[test]
fn legendre_round_trips_through_handles() {
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(cv_input_from_json(c(S_FN).as_ptr(), &mut u), CvStatus::Ok, "{}", last());
        let mut f = ptr::null_mut();
        assert_eq!(cv_legendre(u, &mut f), CvStatus::Ok, "{}", last());
        let mut back = ptr::null_mut();
        assert_eq!(cv_legendre(f, &mut back), CvStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cv_input_to_json(u, &mut a), CvStatus::Ok);
        assert_eq!(cv_input_to_json(back, &mut b), CvStatus::Ok);
        assert_eq!(take(a), take(b));
        // F has no polar
        let mut bad = ptr::null_mut();
        assert_eq!(cv_polar(f, &mut bad), CvStatus::Input);
        assert!(bad.is_null());
        for h in [u, f, back] {
            cv_input_free(h);
        }
    }
}

#[test]
fn dualized_handle_evaluates_through_the_conjugate() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(cv_transform_from_json(c(r#"{"transform":"legendre"}"#).as_ptr(), &mut h), CvStatus::Ok, "{}", last());
        let mut d = ptr::null_mut();
        assert_eq!(cv_transform_dualize(h, &mut d), CvStatus::Ok, "{}", last());
        let mut s = ptr::null_mut();
        assert_eq!(cv_transform_to_json(d, &mut s), CvStatus::Ok);
        let j: Json = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(j["dualized"], true);

        // dualized Legendre is the identity on F; here f = max(0, y - 1, -y - 2)
        let mut s_fn = ptr::null_mut();
        assert_eq!(cv_input_from_json(c(S_FN).as_ptr(), &mut s_fn), CvStatus::Ok);
        let mut u = ptr::null_mut();
        assert_eq!(cv_legendre(s_fn, &mut u), CvStatus::Ok);
        cv_input_free(s_fn);
        let mut out = ptr::null_mut();
        let pts = c(r#"[["0"],["2"],["-7/2"],["1/2"]]"#);
        assert_eq!(cv_transform_eval(d, u, pts.as_ptr(), 0, &mut out), CvStatus::Ok, "{}", last());
        let v: Json = serde_json::from_str(&take(out)).unwrap();
        let exact: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["exact"].as_str().unwrap()).collect();
        assert_eq!(exact, ["0", "1", "3/2", "0"]);
        cv_input_free(u);
        cv_transform_free(h);
        cv_transform_free(d);
    }
}

#[test]
fn verify_reports_pass_and_input_errors() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(cv_verify(c("weird-counterexample").as_ptr(), 2, 7, 3, &mut out), CvStatus::Ok, "{}", last());
        let r: Json = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(r["pass"], true);
        assert_eq!(cv_verify(c("no-such-suite").as_ptr(), 2, 7, 3, &mut out), CvStatus::Input);
        assert!(out.is_null());
        assert!(last().contains("no-such-suite"), "{}", last());
    }
}

fn target_dir() -> PathBuf {
    // tests/…/deps/capi-hash → profile dir
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include").join("convexval.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["cv_last_error", "cv_string_free", "cv_input_from_json", "cv_laplace", "cv_transform_eval", "cv_verify"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let lib = target_dir().join("libconvexval_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping C link check: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "convexval.h"
int main(void) {
    CvInput *p = NULL;
    const char *cube = "{\"polytope\":{\"dim\":1,\"vertices\":[[\"0\"],[\"1\"]]}}";
    if (cv_input_from_json(cube, &p) != CV_STATUS_OK) return 10;
    char *out = NULL;
    if (cv_laplace(p, "[[\"0\"]]", 0, &out) != CV_STATUS_OK) return 11;
    int ok = strstr(out, "\"value\":\"1.0000") != NULL;
    cv_string_free(out);
    cv_input_free(p);
    if (cv_input_from_json("{", &p) != CV_STATUS_PARSE || cv_last_error() == NULL) return 12;
    return ok ? 0 : 13;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&bin).status().unwrap();
    assert_eq!(run.code(), Some(0));
}
