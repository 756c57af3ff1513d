use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use kglushkov_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { kg_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(kg_last_error()) }.to_str().unwrap().to_string()
}

fn parse(semiring: &str, src: &str) -> Result<*mut KgExpr, KgStatus> {
    let (s, t) = (CString::new(semiring).unwrap(), CString::new(src).unwrap());
    let mut e = ptr::null_mut();
    match unsafe { kg_expr_parse(s.as_ptr(), t.as_ptr(), &mut e) } {
        KgStatus::Ok => Ok(e),
        st => Err(st),
    }
}

#[test]
fn build_evaluate_recover() {
    let e = parse("tropical", "((<2>x<5> + <6>eps).(<0>y<2> + <1>eps) + <2>z) + <3>eps").unwrap();
    let mut class = KgExprClass::default();
    assert_eq!(unsafe { kg_expr_classify(e, &mut class) }, KgStatus::Ok);
    assert!(class.proper && class.snf);

    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kg_wfa_build(e, &mut m) }, KgStatus::Ok);
    assert_eq!(unsafe { kg_wfa_state_count(m) }, 4);

    let mut out = ptr::null_mut();
    let word = CString::new("xy").unwrap();
    assert_eq!(unsafe { kg_wfa_coefficient(m, word.as_ptr(), &mut out) }, KgStatus::Ok);
    assert_eq!(take(out), "9");

    let mut reason = KgRejectReason::NotHammock;
    assert_eq!(unsafe { kg_wfa_recover(m, 6, &mut out, &mut reason) }, KgStatus::Ok);
    assert_eq!(reason, KgRejectReason::None);
    assert_eq!(take(out), "((<2>x<5> + <6>eps).(y<2> + <1>eps) + <2>z) + <3>eps");
    assert_eq!(last_error(), "");

    unsafe {
        kg_wfa_free(m);
        kg_expr_free(e);
    }
}

#[test]
fn json_round_trip_and_rejection() {
    let e = parse("naturals", "(<2>a + b)*.<3>c").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kg_wfa_build(e, &mut m) }, KgStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kg_wfa_to_json(m, &mut out) }, KgStatus::Ok);
    let json = take(out);

    // drop the loop on a: the orbit is no longer stable
    let mut doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let ts = doc["transitions"].as_array_mut().unwrap();
    ts.retain(|t| !(t["from"] == 1 && t["to"] == 1));
    let broken = CString::new(doc.to_string()).unwrap();
    let mut m2 = ptr::null_mut();
    assert_eq!(unsafe { kg_wfa_from_json(broken.as_ptr(), &mut m2) }, KgStatus::Ok);
    let mut reason = KgRejectReason::None;
    assert_eq!(unsafe { kg_wfa_recover(m2, 6, &mut out, &mut reason) }, KgStatus::Rejected);
    assert!(out.is_null());
    assert_eq!(reason, KgRejectReason::OrbitBoundaryIrregular);
    assert!(!last_error().is_empty());

    let again = CString::new(json.clone()).unwrap();
    let mut m3 = ptr::null_mut();
    assert_eq!(unsafe { kg_wfa_from_json(again.as_ptr(), &mut m3) }, KgStatus::Ok);
    assert_eq!(unsafe { kg_wfa_to_json(m3, &mut out) }, KgStatus::Ok);
    assert_eq!(take(out), json);

    unsafe {
        kg_wfa_free(m);
        kg_wfa_free(m2);
        kg_wfa_free(m3);
        kg_expr_free(e);
    }
}

#[test]
fn error_codes() {
    assert_eq!(parse("reals", "a").unwrap_err(), KgStatus::UnknownSemiring);
    assert_eq!(parse("naturals", "(a").unwrap_err(), KgStatus::ParseError);
    assert!(!last_error().is_empty());

    let e = parse("naturals", "(eps)*").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kg_wfa_build(e, &mut m) }, KgStatus::NotProper);
    assert!(m.is_null());
    unsafe { kg_expr_free(e) };

    let bad = CString::new("{\"semiring\": \"naturals\"}").unwrap();
    assert_eq!(unsafe { kg_wfa_from_json(bad.as_ptr(), &mut m) }, KgStatus::SchemaError);

    let invalid = [0xffu8, 0];
    let mut e = ptr::null_mut();
    let s = CString::new("boolean").unwrap();
    let st = unsafe { kg_expr_parse(s.as_ptr(), invalid.as_ptr() as *const c_char, &mut e) };
    assert_eq!(st, KgStatus::InvalidUtf8);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kg_expr_render(ptr::null(), &mut out) }, KgStatus::NullArgument);
    unsafe {
        kg_expr_free(ptr::null_mut());
        kg_wfa_free(ptr::null_mut());
        kg_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/kglushkov.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["kg_expr_parse", "kg_wfa_build", "kg_wfa_recover", "kg_last_error", "KG_STATUS_REJECTED"] {
        assert!(text.contains(f), "{f} missing from the header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"kglushkov.h\"\nint main(void) { KgExpr *e = 0; return kg_expr_parse(\"boolean\", \"a\", &e) == KG_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    for lang in ["c", "c++"] {
        let st = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(header.parent().unwrap())
            .arg(&src)
            .status()
            .expect("a C compiler");
        assert!(st.success(), "header does not compile as {lang}");
    }
}
