use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mub6_ffi::*;

fn last_error() -> String {
    let p = mub6_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_pair(family: Mub6Family, params: Option<Mub6Params>) -> (Mub6Status, *mut Mub6Pair) {
    let mut out = ptr::null_mut();
    let p = params.as_ref().map_or(ptr::null(), |p| p as *const _);
    let status = unsafe { mub6_pair_new(family as u32, p, &mut out) };
    (status, out)
}

#[test]
fn construct_verify_and_copy_members() {
    let (status, pair) = new_pair(Mub6Family::P0, None);
    assert_eq!(status, Mub6Status::Ok);
    unsafe {
        assert_eq!(mub6_pair_dim(pair), 6);
        let (mut worst, mut is_mu) = (1.0, false);
        assert_eq!(mub6_pair_verify(pair, &mut worst, &mut is_mu), Mub6Status::Ok);
        assert!(is_mu && worst < 1e-10);

        let mut buf = vec![0.0; 72];
        assert_eq!(mub6_pair_member(pair, Mub6Member::Second as u32, buf.as_mut_ptr(), 72), Mub6Status::Ok);
        let s = 1.0 / 6f64.sqrt();
        assert!((buf[0] - s).abs() < 1e-15 && buf[1].abs() < 1e-15);

        let mut small = vec![0.0; 10];
        assert_eq!(
            mub6_pair_member(pair, Mub6Member::First as u32, small.as_mut_ptr(), 10),
            Mub6Status::BufferTooSmall
        );
        assert_eq!(mub6_pair_member(pair, 7, buf.as_mut_ptr(), 72), Mub6Status::InvalidArgument);
        mub6_pair_free(pair);
    }
}

#[test]
fn json_round_trip_through_handles() {
    let params = Mub6Params { zeta: 0.5, chi: 1.5, sigma: 1.0, tau: 2.0, ..Default::default() };
    let (status, pair) = new_pair(Mub6Family::P3, Some(params));
    assert_eq!(status, Mub6Status::Ok);
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(mub6_pair_to_json(pair, &mut json), Mub6Status::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(mub6_pair_from_json(json, &mut back), Mub6Status::Ok);
        let mut a = vec![0.0; 72];
        let mut b = vec![0.0; 72];
        mub6_pair_member(pair, 1, a.as_mut_ptr(), 72);
        mub6_pair_member(back, 1, b.as_mut_ptr(), 72);
        assert_eq!(a, b);
        mub6_string_free(json);
        mub6_pair_free(pair);
        mub6_pair_free(back);
    }
}

#[test]
fn error_codes_and_messages() {
    let (status, pair) = new_pair(Mub6Family::P1, Some(Mub6Params { xi: 9.0, eta: 1.0, ..Default::default() }));
    assert_eq!(status, Mub6Status::ParameterRange);
    assert!(pair.is_null());
    assert!(last_error().contains("xi"));

    assert_eq!(new_pair(Mub6Family::P3, None).0, Mub6Status::NullPointer);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(mub6_pair_new(42, ptr::null(), &mut out), Mub6Status::InvalidArgument);
        assert_eq!(mub6_pair_new(0, ptr::null(), ptr::null_mut()), Mub6Status::NullPointer);

        let garbage = CString::new("{nope").unwrap();
        assert_eq!(mub6_pair_from_json(garbage.as_ptr(), &mut out), Mub6Status::Parse);
        let id = "2 2\n1+0j 0+0j\n0+0j 1+0j\n";
        let biased = CString::new(serde_json::json!({"first": id, "second": id}).to_string()).unwrap();
        assert_eq!(mub6_pair_from_json(biased.as_ptr(), &mut out), Mub6Status::NotMutuallyUnbiased);
        assert_eq!(mub6_pair_from_json(ptr::null(), &mut out), Mub6Status::NullPointer);

        let identity = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut s = ptr::null_mut();
        assert_eq!(mub6_fingerprint_json(identity.as_ptr(), 2, &mut s), Mub6Status::NotHadamard);

        assert_eq!(mub6_pair_dim(ptr::null()), 0);
        mub6_pair_free(ptr::null_mut());
        mub6_string_free(ptr::null_mut());
    }
}

#[test]
fn reduce_and_fingerprint() {
    unsafe {
        let mut pair = ptr::null_mut();
        let mut script = ptr::null_mut();
        assert_eq!(mub6_reduce(Mub6Family::P2 as u32, ptr::null(), &mut pair, &mut script), Mub6Status::Ok);
        let text = CStr::from_ptr(script).to_str().unwrap();
        assert!(text.contains("left-unitary"));
        let mut h = vec![0.0; 72];
        assert_eq!(mub6_pair_member(pair, 1, h.as_mut_ptr(), 72), Mub6Status::Ok);
        let mut fp = ptr::null_mut();
        assert_eq!(mub6_fingerprint_json(h.as_ptr(), 6, &mut fp), Mub6Status::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(fp).to_str().unwrap()).unwrap();
        assert_eq!(doc["size"], 1296);
        mub6_string_free(fp);
        mub6_string_free(script);
        mub6_pair_free(pair);
    }
}

#[test]
fn search_handle() {
    let (_, pair) = new_pair(Mub6Family::P0, None);
    unsafe {
        let mut search = ptr::null_mut();
        assert_eq!(mub6_search(pair, 2000, 3, &mut search), Mub6Status::Ok);
        assert_eq!(mub6_search_count(search), 48);
        assert_eq!(mub6_search_max_clique(search), 6);
        assert!(mub6_search_has_basis(search));
        let mut v = vec![0.0; 12];
        assert_eq!(mub6_search_vector(search, 0, v.as_mut_ptr(), 12), Mub6Status::Ok);
        let norm: f64 = v.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(mub6_search_vector(search, 48, v.as_mut_ptr(), 12), Mub6Status::InvalidArgument);
        let mut json = ptr::null_mut();
        assert_eq!(mub6_search_to_json(search, &mut json), Mub6Status::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(doc["master_seed"], 3);
        mub6_string_free(json);
        mub6_search_free(search);
        mub6_pair_free(pair);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(mub6_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/mub6.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["mub6_pair_new", "mub6_search", "MUB6_STATUS_OK", "typedef struct Mub6Pair Mub6Pair"] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the header and the static
/// library. Skipped when no C compiler is available.
#[test]
fn c_smoke_program() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // tests run from target/<profile>/deps
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libmub6_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("mub6_smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
