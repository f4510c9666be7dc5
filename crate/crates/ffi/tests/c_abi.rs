use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use stacky_fan_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sf_last_error()) }
        .to_string_lossy()
        .into_owned()
}

const MEDIAL: &str = r#"{"r":2,"n":2,"points":[[0,0,2],[0,1,1],[0,2,0],[1,0,1],[1,1,0],[2,0,0]],
"cells":[[0,1,3],[1,2,4],[1,3,4],[3,4,5]]}"#;

#[test]
fn json_round_trip_and_predicates() {
    let json = CString::new(MEDIAL).unwrap();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(
            sf_triangulation_from_json(json.as_ptr(), &mut t),
            SfStatus::Ok
        );
        let mut cells = 0;
        assert_eq!(sf_triangulation_num_cells(t, &mut cells), SfStatus::Ok);
        assert_eq!(cells, 4);
        let (mut r, mut n) = (0, 0);
        assert_eq!(sf_triangulation_shape(t, &mut r, &mut n), SfStatus::Ok);
        assert_eq!((r, n), (2, 2));
        let (mut uni, mut inv) = (false, false);
        assert_eq!(sf_triangulation_is_unimodular(t, &mut uni), SfStatus::Ok);
        assert_eq!(sf_triangulation_is_invariant(t, &mut inv), SfStatus::Ok);
        assert!(uni && inv);
        let mut s = ptr::null_mut();
        assert_eq!(sf_triangulation_to_json(t, &mut s), SfStatus::Ok);
        let back = CStr::from_ptr(s).to_str().unwrap().to_owned();
        sf_string_free(s);
        let a: serde_json::Value = serde_json::from_str(&back).unwrap();
        let b: serde_json::Value = serde_json::from_str(MEDIAL).unwrap();
        assert_eq!(a, b);
        sf_triangulation_free(t);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new(r#"{"r":2,"n":2,"#).unwrap();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(
            sf_triangulation_from_json(bad.as_ptr(), &mut t),
            SfStatus::InvalidInput
        );
        assert!(last_error().contains("line 1"));
        assert!(t.is_null());
        assert_eq!(
            sf_triangulation_from_json(ptr::null(), &mut t),
            SfStatus::InvalidArgument
        );
        let mut cells = 0;
        assert_eq!(
            sf_triangulation_num_cells(ptr::null(), &mut cells),
            SfStatus::InvalidArgument
        );
        let mut list = ptr::null_mut();
        assert_eq!(sf_enumerate(2, 9, 35, &mut list), SfStatus::BoundExceeded);
        assert_eq!(sf_enumerate(4, 1, 35, &mut list), SfStatus::Unsupported);
        assert!(!last_error().is_empty());
        assert_eq!(sf_enumerate(1, 1, 35, &mut list), SfStatus::Ok);
        assert!(last_error().is_empty());
        sf_list_free(list);
        sf_triangulation_free(ptr::null_mut());
        sf_string_free(ptr::null_mut());
    }
}

#[test]
fn enumeration_and_refinement() {
    unsafe {
        let mut list = ptr::null_mut();
        assert_eq!(sf_enumerate(2, 2, 35, &mut list), SfStatus::Ok);
        let mut len = 0;
        assert_eq!(sf_list_len(list, &mut len), SfStatus::Ok);
        assert_eq!(len, 4);
        let mut m = 0;
        let mut sym = ptr::null_mut();
        assert_eq!(
            sf_symmetric_refinement(2, 2, 8, &mut m, &mut sym),
            SfStatus::Ok
        );
        assert_eq!(m, 6);
        for i in 0..len {
            let mut t = ptr::null_mut();
            assert_eq!(sf_list_get(list, i, &mut t), SfStatus::Ok);
            let mut yes = false;
            assert_eq!(sf_refines(sym, t, &mut yes), SfStatus::Ok);
            assert!(yes);
            assert_eq!(sf_refines(t, sym, &mut yes), SfStatus::Ok);
            assert!(!yes);
            sf_triangulation_free(t);
        }
        let mut t = ptr::null_mut();
        assert_eq!(sf_list_get(list, 4, &mut t), SfStatus::InvalidArgument);
        sf_triangulation_free(sym);
        sf_list_free(list);
    }
}

#[test]
fn buffers() {
    let a: [i64; 4] = [2, 4, 6, 8];
    let mut out = [0i64; 2];
    let mut written = 0;
    unsafe {
        assert_eq!(
            sf_snf_divisors(a.as_ptr(), 2, 2, out.as_mut_ptr(), 2, &mut written),
            SfStatus::Ok
        );
        assert_eq!((written, out), (2, [2, 4]));
        assert_eq!(
            sf_snf_divisors(a.as_ptr(), 2, 2, out.as_mut_ptr(), 1, &mut written),
            SfStatus::BufferTooSmall
        );
        assert_eq!(written, 2);
        let mut levels = [0u64; 4];
        assert_eq!(
            sf_tower_levels(1, 4, levels.as_mut_ptr(), 4, &mut written),
            SfStatus::Ok
        );
        assert_eq!(levels, [1, 2, 6, 24]);
        assert_eq!(
            sf_tower_levels(3, 2, levels.as_mut_ptr(), 4, &mut written),
            SfStatus::BoundExceeded
        );
        assert_eq!((written, levels[0]), (1, 1));
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sf_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compile a C client against the generated header and the static library.
#[test]
fn c_client_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/stacky_fan.h");
    assert!(header.exists());
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, skipping link check");
        return;
    };
    let target = manifest.join("../../target/debug");
    let lib = target.join("libstacky_fan_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built, skipping link check");
        return;
    }
    let dir = std::env::temp_dir().join(format!("sf_c_client_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("client.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "stacky_fan.h"
int main(void) {
    SfTriangulationList *list = NULL;
    size_t len = 0;
    if (sf_enumerate(2, 2, 35, &list) != SF_STATUS_OK) return 1;
    if (sf_list_len(list, &len) != SF_STATUS_OK) return 2;
    sf_list_free(list);
    if (sf_enumerate(2, 9, 35, &list) != SF_STATUS_BOUND_EXCEEDED) return 3;
    printf("%zu %s\n", len, sf_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("client");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("4 "), "{text}");
    let _ = std::fs::remove_dir_all(&dir);
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
