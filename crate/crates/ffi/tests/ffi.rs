use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use classmem_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn model(text: &CStr) -> *mut ClmModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { clm_model_parse(text.as_ptr(), &mut m) }, ClmStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(clm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn fig2_accepts_its_witness() {
    let m = model(&fixture("fig2.cma"));
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { clm_word_parse(fixture("fig2-witness.word").as_ptr(), &mut w) }, ClmStatus::Ok);
    let mut yes = false;
    assert_eq!(unsafe { clm_run(m, w, &mut yes) }, ClmStatus::Ok);
    assert!(yes);
    assert_eq!(unsafe { CStr::from_ptr(clm_model_tag(m)) }.to_str().unwrap(), "cma");
    unsafe {
        clm_word_free(w);
        clm_model_free(m);
    }
}

#[test]
fn emptiness_verdicts() {
    let weak = model(&fixture("fig2-weak.cma"));
    let strong = model(&fixture("fig2.cma"));
    let mut v = ClmVerdict::Unknown;
    assert_eq!(unsafe { clm_empty(weak, 0, &mut v) }, ClmStatus::Ok);
    assert_eq!(v, ClmVerdict::NonEmpty);
    // strong machines need a bound, and then never answer empty
    assert_eq!(unsafe { clm_empty(strong, 0, &mut v) }, ClmStatus::Incompatible);
    assert!(last_error().contains("bound"));
    assert_eq!(unsafe { clm_empty(strong, 4, &mut v) }, ClmStatus::Ok);
    assert_eq!(v, ClmVerdict::Unknown);
    assert_eq!(unsafe { clm_empty(strong, 10, &mut v) }, ClmStatus::Ok);
    assert_eq!(v, ClmVerdict::NonEmpty);
    unsafe {
        clm_model_free(weak);
        clm_model_free(strong);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    let bad = CString::new("model: cma\nstates: q r\nalphabet: a\ninitial: q\nlocally_accepting: q\nglobally_accepting: r\n").unwrap();
    assert_eq!(unsafe { clm_model_parse(bad.as_ptr(), &mut m) }, ClmStatus::Parse);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { clm_model_parse(ptr::null(), &mut m) }, ClmStatus::NullArgument);
    let net = model(&fixture("fig1.net"));
    let mut yes = false;
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { clm_word_parse(fixture("fig2-witness.word").as_ptr(), &mut w) }, ClmStatus::Ok);
    assert_eq!(unsafe { clm_run(net, w, &mut yes) }, ClmStatus::Incompatible);
    unsafe {
        clm_word_free(w);
        clm_model_free(net);
        clm_model_free(ptr::null_mut());
    }
}

#[test]
fn printing_round_trips() {
    let m = model(&fixture("level2.ndcma"));
    let text = unsafe { clm_model_print(m) };
    let again = model(unsafe { CStr::from_ptr(text) });
    let text2 = unsafe { clm_model_print(again) };
    assert_eq!(unsafe { CStr::from_ptr(text) }, unsafe { CStr::from_ptr(text2) });
    unsafe {
        clm_string_free(text);
        clm_string_free(text2);
        clm_model_free(m);
        clm_model_free(again);
    }
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn header_links_from_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // test binaries live in target/<profile>/deps; the library sits one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    assert!(lib_dir.join("libclassmem_ffi.a").exists(), "static library missing in {}", lib_dir.display());
    let out = std::env::temp_dir().join(format!("clm-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(lib_dir.join("libclassmem_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler");
    assert!(status.success());
    let run = Command::new(&out).arg(dir.join("../core/fixtures/fig2-weak.cma")).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "wcma nonempty\n");
}
