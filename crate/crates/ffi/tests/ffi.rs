use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use od_ffi::*;

fn parse(text: &str, flavor: OdFlavor) -> Result<*mut OdTerm, OdStatus> {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { od_term_parse(c.as_ptr(), flavor, &mut out) } {
        OdStatus::Ok => Ok(out),
        s => Err(s),
    }
}

fn take_string(s: *mut c_char) -> String {
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { od_string_free(s) };
    owned
}

fn render(t: *const OdTerm) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { od_term_render(t, &mut s) }, OdStatus::Ok);
    take_string(s)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(od_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn parse_render_normalize() {
    let t = parse("0 + phi(0,0)", OdFlavor::P3).unwrap();
    assert_eq!(render(t), "0 + phi(0,0)");
    let mut n = ptr::null_mut();
    assert_eq!(unsafe { od_term_normalize(t, &mut n) }, OdStatus::Ok);
    assert_eq!(render(n), "phi(0,0)");
    unsafe {
        od_term_free(n);
        od_term_free(t);
    }
}

#[test]
fn compare_and_flavor_mismatch() {
    let a = parse("d(pi;0)", OdFlavor::M).unwrap();
    let b = parse("d(pi;pi)", OdFlavor::M).unwrap();
    let c = parse("pi", OdFlavor::P3).unwrap();
    let mut o = 7;
    assert_eq!(unsafe { od_term_compare(a, b, &mut o) }, OdStatus::Ok);
    assert_eq!(o, -1);
    assert_eq!(unsafe { od_term_compare(b, a, &mut o) }, OdStatus::Ok);
    assert_eq!(o, 1);
    assert_eq!(
        unsafe { od_term_compare(a, c, &mut o) },
        OdStatus::FlavorMismatch
    );
    assert!(last_error().contains("flavors"));
    unsafe {
        od_term_free(a);
        od_term_free(b);
        od_term_free(c);
    }
}

#[test]
fn error_codes() {
    assert_eq!(parse("phi(0", OdFlavor::M), Err(OdStatus::Parse));
    assert!(last_error().contains("column"));
    assert_eq!(parse("d(pi;0)", OdFlavor::P3), Err(OdStatus::Arity));
    assert_eq!(
        parse("adm(phi(0,0))", OdFlavor::M),
        Err(OdStatus::NotRegular)
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { od_term_parse(ptr::null(), OdFlavor::M, &mut out) },
        OdStatus::NullPointer
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { od_term_parse(bad.as_ptr().cast(), OdFlavor::M, &mut out) },
        OdStatus::InvalidUtf8
    );
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { od_term_render(ptr::null(), &mut s) },
        OdStatus::NullPointer
    );
    unsafe {
        od_term_free(ptr::null_mut());
        od_string_free(ptr::null_mut());
    }
}

#[test]
fn violations_kset_and_subst() {
    let bad = parse("d(d(pi;0;pi);0;pi)", OdFlavor::P3).unwrap();
    let mut n = 0usize;
    assert_eq!(unsafe { od_term_violations(bad, &mut n) }, OdStatus::Ok);
    assert_eq!(n, 1);

    let pi = parse("pi", OdFlavor::M).unwrap();
    let alpha = parse("d(pi;0) + d(pi;pi)", OdFlavor::M).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { od_kset(pi, alpha, &mut s) }, OdStatus::Ok);
    assert_eq!(take_string(s), "d(pi;pi)");
    let one = parse("phi(0,0)", OdFlavor::M).unwrap();
    assert_eq!(unsafe { od_kset(one, alpha, &mut s) }, OdStatus::NotRegular);

    let target = parse("d(pi;0)", OdFlavor::M).unwrap();
    let xi = parse("d(adm(pi);pi)", OdFlavor::M).unwrap();
    let mut img = ptr::null_mut();
    assert_eq!(
        unsafe { od_subst_apply(target, xi, &mut img) },
        OdStatus::Ok
    );
    assert_eq!(render(img), "d(adm(d(pi;0));d(pi;0))");
    let outside = parse("d(pi;pi)", OdFlavor::M).unwrap();
    let mut img2 = ptr::null_mut();
    assert_eq!(
        unsafe { od_subst_apply(target, outside, &mut img2) },
        OdStatus::Domain
    );
    for t in [bad, pi, alpha, one, target, xi, img, outside] {
        unsafe { od_term_free(t) };
    }
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header_dir().join("od.h")).unwrap();
    for name in [
        "od_term_parse",
        "od_term_free",
        "od_term_render",
        "od_term_compare",
        "od_kset",
        "od_subst_apply",
        "od_last_error",
        "OD_STATUS_FLAVOR_MISMATCH",
        "typedef struct OdTerm OdTerm",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
    if have_cc() {
        let st = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-"])
            .arg("-I")
            .arg(header_dir())
            .stdin(std::process::Stdio::piped())
            .spawn()
            .and_then(|mut child| {
                use std::io::Write;
                child
                    .stdin
                    .take()
                    .unwrap()
                    .write_all(b"#include \"od.h\"\n")?;
                child.wait()
            })
            .unwrap();
        assert!(st.success());
    }
}

/// Links the C smoke program against the static library when both a C
/// compiler and the archive are available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let archive = profile_dir.join("libod_ffi.a");
    if !have_cc() || !archive.exists() {
        eprintln!("skipping: no C compiler or no {}", archive.display());
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("od-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let bin = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg("-I")
        .arg(header_dir())
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
    let _ = std::fs::remove_dir_all(out_dir);
}
