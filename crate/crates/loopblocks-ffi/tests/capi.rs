use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use loopblocks_ffi::*;

fn take_string(p: *mut std::ffi::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { lb_string_free(p) };
    s
}

fn group(name: &str) -> *mut LbGroup {
    let name = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lb_group_new(name.as_ptr(), &mut g) }, LbStatus::Ok);
    g
}

#[test]
fn d6_torus_blocks_through_handles() {
    let g = group("D6");
    assert_eq!(unsafe { lb_group_order(g) }, 6);
    assert_eq!(unsafe { lb_group_num_classes(g) }, 3);
    let cut = CString::new("orient:gx=0,gy=0,n=2,s=++").unwrap();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { lb_blocks_new(g, cut.as_ptr(), &mut b) }, LbStatus::Ok);
    let mut shapes = Vec::new();
    for i in 0..unsafe { lb_blocks_len(b) } {
        let mut s = LbBlockShape::default();
        assert_eq!(unsafe { lb_blocks_shape(b, i, &mut s) }, LbStatus::Ok);
        shapes.push((s.copies, s.rows, s.cols));
    }
    shapes.sort();
    assert_eq!(shapes, vec![(1, 6, 6), (4, 3, 3), (9, 2, 2)]);
    let mut dof = 0;
    assert_eq!(unsafe { lb_blocks_total_dof(b, &mut dof) }, LbStatus::Ok);
    assert_eq!(dof, 108);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lb_blocks_json(b, &mut json) }, LbStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["total_dof"], 108);
    let mut s = LbBlockShape::default();
    assert_eq!(unsafe { lb_blocks_shape(b, 99, &mut s) }, LbStatus::OutOfRange);
    unsafe {
        lb_blocks_free(b);
        lb_group_free(g);
    }
}

#[test]
fn degeneracies() {
    let g = group("S3");
    for (surface, want) in [("torus", 8u64), ("sphere", 1), ("klein", 6)] {
        let s = CString::new(surface).unwrap();
        let mut n = 0;
        assert_eq!(unsafe { lb_gsd(g, s.as_ptr(), &mut n) }, LbStatus::Ok);
        assert_eq!(n, want, "{surface}");
    }
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { lb_group_character_table_json(g, &mut json) }, LbStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["order"], 6);
    unsafe { lb_group_free(g) };
}

#[test]
fn errors_carry_status_and_message() {
    let bad = CString::new("Q9").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { lb_group_new(bad.as_ptr(), &mut g) }, LbStatus::InvalidGroup);
    assert!(g.is_null());
    assert!(take_string(lb_last_error()).contains("dicyclic"));

    assert_eq!(unsafe { lb_group_new(ptr::null(), &mut g) }, LbStatus::NullPointer);
    let ok = CString::new("Z2").unwrap();
    assert_eq!(unsafe { lb_group_new(ok.as_ptr(), ptr::null_mut()) }, LbStatus::NullPointer);

    let g = group("Z2");
    let cut = CString::new("lens:q=4,p=2").unwrap();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { lb_blocks_new(g, cut.as_ptr(), &mut b) }, LbStatus::InvalidCut);
    unsafe {
        lb_group_free(g);
        lb_group_free(ptr::null_mut());
        lb_blocks_free(ptr::null_mut());
        lb_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { lb_group_order(ptr::null()) }, 0);
}

#[test]
fn tee_of_vacuum() {
    let t = lb_tee_minimal(6, 2, 1, 1);
    assert!((t - 2.0 * 6f64.ln()).abs() < 1e-12);
}

/// Compiles a small C program against the generated header and the static library.
#[test]
fn c_program_links_against_header() {
    let Ok(cc) = which_cc() else { return };
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("lb_smoke");
    let deps = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("..").join("debug");
    let lib = deps.join("libloopblocks_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let status = Command::new(cc)
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "dof 108 gsd 8");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}
