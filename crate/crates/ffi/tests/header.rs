use std::path::PathBuf;
use std::process::Command;

const USAGE: &str = r#"
#include "rcatenoid.h"

double height(void) {
    RcFamily *fam = NULL;
    RcValue v;
    if (rc_family_new(4, 1, &fam) != RC_STATUS_OK) return -1.0;
    RcStatus s = rc_half_height(fam, 1.0, &v);
    rc_family_free(fam);
    return s == RC_STATUS_OK ? v.value : -1.0;
}
"#;

fn check_with(compiler: &str, lang: &str) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("usage.c");
    std::fs::write(&src, USAGE).unwrap();
    let out = Command::new(compiler)
        .args(["-x", lang, "-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .output()
        .unwrap_or_else(|e| panic!("{compiler} not runnable: {e}"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn header_compiles_as_c() {
    check_with("cc", "c");
}

#[test]
fn header_compiles_as_cpp() {
    check_with("c++", "c++");
}
