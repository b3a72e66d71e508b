use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use partial_enforce_ffi::*;

fn policy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/policies")
}

fn load(name: &str) -> *mut PePolicy {
    let path = CString::new(policy_dir().join(name).to_str().unwrap()).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pe_policy_load(path.as_ptr(), &mut p) }, PE_OK);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let mut buf = [0 as libc::c_char; 256];
    assert_eq!(unsafe { pe_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut()) }, PE_OK);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

fn enforceable(p: *const PePolicy, eq: u32, stationary: bool) -> (i32, String) {
    let b = PeBounds {
        max_finite_len: 7,
        max_stem_len: 3,
        max_loop_len: 3,
    };
    let mut v = 99;
    let mut w = [0 as libc::c_char; 64];
    let rc = unsafe { pe_is_enforceable(p, eq, stationary, &b, &mut v, w.as_mut_ptr(), w.len()) };
    assert_eq!(rc, PE_OK);
    (v, unsafe { CStr::from_ptr(w.as_ptr()) }.to_str().unwrap().to_string())
}

#[test]
fn classify_through_handles() {
    let p = load("pnaa.pol");
    let mut v = 99;
    unsafe {
        assert_eq!(pe_property_class(p, PE_PROPERTY_SAFETY, &mut v), PE_OK);
        assert_eq!(v, PE_TRUE);
        assert_eq!(pe_property_class(p, PE_PROPERTY_LIVENESS, &mut v), PE_OK);
        assert_eq!(v, PE_FALSE);
        assert_eq!(pe_policy_is_reasonable(p, &mut v), PE_OK);
        assert_eq!(v, 1);
    }
    assert_eq!(enforceable(p, PE_EQ_SYNTACTIC, false).0, PE_TRUE);
    assert_eq!(enforceable(p, PE_EQ_INSERT, false).0, PE_UNDECIDED);
    unsafe { pe_policy_free(p) };

    let e = load("eps_aa.pol");
    assert_eq!(unsafe { pe_policy_set_uniform(e, PE_CLASS_D) }, PE_OK);
    assert_eq!(enforceable(e, PE_EQ_SYNTACTIC, false), (PE_FALSE, "a".to_string()));
    unsafe { pe_policy_free(e) };

    // the possible set travels with the loaded policy
    let s = load("eps_aa_possible.pol");
    assert_eq!(enforceable(s, PE_EQ_SYNTACTIC, false).0, PE_TRUE);
    unsafe { pe_policy_free(s) };
}

#[test]
fn session_round_trip() {
    let p = load("ends_b.pol");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(pe_session_new(p, PE_STRATEGY_EDIT, PE_EQ_SYNTACTIC, false, &mut s), PE_OK);
        // the session owns a copy
        pe_policy_free(p);
        let mut log = [0 as libc::c_char; 64];
        let mut need = 0;
        let a = CString::new("a").unwrap();
        assert_eq!(pe_session_step(s, a.as_ptr(), log.as_mut_ptr(), log.len(), &mut need), PE_OK);
        assert_eq!(CStr::from_ptr(log.as_ptr()).to_str().unwrap(), "HOLD a\n");
        assert_eq!(need, 8);
        let b = CString::new("b").unwrap();
        // too small: the step still happens
        assert_eq!(pe_session_step(s, b.as_ptr(), log.as_mut_ptr(), 3, &mut need), PE_ERR_BUFFER);
        assert_eq!(need, "EMIT a\nEMIT b\n".len() + 1);
        let mut out = [0 as libc::c_char; 16];
        assert_eq!(pe_session_output(s, out.as_mut_ptr(), out.len(), ptr::null_mut()), PE_OK);
        assert_eq!(CStr::from_ptr(out.as_ptr()).to_str().unwrap(), "a b");
        let mut r = PeResult::default();
        assert_eq!(pe_session_finish(s, &mut r), PE_OK);
        assert!(r.ok && r.sound && r.transparent && !r.aborted);
        pe_session_free(s);
    }
}

#[test]
fn error_codes() {
    let mut p = ptr::null_mut();
    let bad = CString::new("alphabet a\nstates q\n").unwrap();
    unsafe {
        assert_eq!(pe_policy_parse(bad.as_ptr(), &mut p), PE_ERR_PARSE);
        assert!(p.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(pe_policy_parse(ptr::null(), &mut p), PE_ERR_NULL);
        let missing = CString::new("/no/such/file.pol").unwrap();
        assert_eq!(pe_policy_load(missing.as_ptr(), &mut p), PE_ERR_PARSE);
        let invalid_utf8 = [0xffu8 as libc::c_char, 0];
        assert_eq!(pe_policy_parse(invalid_utf8.as_ptr(), &mut p), PE_ERR_UTF8);
    }
    let pol = load("pnaa.pol");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(pe_session_new(pol, PE_STRATEGY_INSERT, PE_EQ_SYNTACTIC, false, &mut s), PE_ERR_INCOMPATIBLE);
        assert!(s.is_null());
        assert_eq!(pe_session_new(pol, 42, PE_EQ_SYNTACTIC, false, &mut s), PE_ERR_ARGUMENT);
        assert_eq!(pe_policy_set_uniform(pol, 9), PE_ERR_ARGUMENT);
        let mut v = 0;
        assert_eq!(pe_property_class(pol, 7, &mut v), PE_ERR_ARGUMENT);
        assert_eq!(pe_property_class(ptr::null(), PE_PROPERTY_SAFETY, &mut v), PE_ERR_NULL);
        let zero = PeBounds {
            max_finite_len: 3,
            max_stem_len: 1,
            max_loop_len: 0,
        };
        assert_eq!(
            pe_is_enforceable(pol, PE_EQ_SYNTACTIC, false, &zero, &mut v, ptr::null_mut(), 0),
            PE_ERR_ARGUMENT
        );
        // a success clears the message
        assert_eq!(pe_policy_is_reasonable(pol, &mut v), PE_OK);
        assert_eq!(last_error(), "");

        let begins = load("begins_a.pol");
        assert_eq!(pe_session_new(begins, PE_STRATEGY_EDIT, PE_EQ_SYNTACTIC, false, &mut s), PE_ERR_NOT_REASONABLE);
        pe_policy_free(begins);

        assert_eq!(pe_policy_set_uniform(pol, PE_CLASS_O), PE_OK);
        assert_eq!(pe_session_new(pol, PE_STRATEGY_EDIT, PE_EQ_SYNTACTIC, false, &mut s), PE_OK);
        let a = CString::new("a").unwrap();
        assert_eq!(pe_session_step(s, a.as_ptr(), ptr::null_mut(), 0, ptr::null_mut()), PE_OK);
        assert_eq!(pe_session_step(s, a.as_ptr(), ptr::null_mut(), 0, ptr::null_mut()), PE_ERR_COMPLIANCE);
        let mut r = PeResult::default();
        assert_eq!(pe_session_finish(s, &mut r), PE_OK);
        assert!(!r.ok);
        pe_session_free(s);
        pe_policy_free(pol);
        pe_policy_free(ptr::null_mut());
        pe_session_free(ptr::null_mut());
    }
}

/// Compiles the C smoke test against the generated header and the static
/// library. Skipped when no C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpartial_enforce_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no cc or no static library at {}", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("pe_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&out)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
