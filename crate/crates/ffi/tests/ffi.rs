use std::ffi::{CStr, CString};
use std::ptr;

use poroelastic_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pe_last_error()) }.to_string_lossy().into_owned()
}

fn catalog(name: &str) -> *mut PeParams {
    let name = CString::new(name).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pe_params_catalog(name.as_ptr(), &mut p) }, PeStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn classify_catalog_sets() {
    let expected = [
        ("p_exp", PeRegime::Exponential),
        ("p_case1", PeRegime::NonExpCase1),
        ("p_case2", PeRegime::NonExpCase2),
        ("p_case3", PeRegime::NonExpCase3),
    ];
    for (name, regime) in expected {
        let p = catalog(name);
        let mut out = PeStability { regime: PeRegime::Exponential, chi0: f64::NAN, chi1: f64::NAN };
        assert_eq!(unsafe { pe_classify(p, 1e-9, &mut out) }, PeStatus::Ok);
        assert_eq!(out.regime, regime, "{name}");
        unsafe { pe_params_free(p) };
    }
}

#[test]
fn unknown_catalog_name_sets_error() {
    let name = CString::new("p_case9").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pe_params_catalog(name.as_ptr(), &mut p) }, PeStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().contains("p_case9"));
}

#[test]
fn null_pointers_rejected() {
    let mut out = PeStability { regime: PeRegime::Exponential, chi0: 0.0, chi1: 0.0 };
    assert_eq!(unsafe { pe_classify(ptr::null(), 1e-9, &mut out) }, PeStatus::NullPointer);
    assert!(!last_error().is_empty());
    let p = catalog("p_exp");
    assert_eq!(unsafe { pe_classify(p, 1e-9, ptr::null_mut()) }, PeStatus::NullPointer);
    assert_eq!(unsafe { pe_params_catalog(ptr::null(), ptr::null_mut()) }, PeStatus::NullPointer);
    unsafe {
        pe_params_free(p);
        pe_params_free(ptr::null_mut());
        pe_scan_free(ptr::null_mut());
        pe_probe_free(ptr::null_mut());
    }
}

#[test]
fn get_set_and_validate() {
    let p = catalog("p_exp");
    let tau1 = CString::new("tau1").unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { pe_params_get(p, tau1.as_ptr(), &mut v) }, PeStatus::Ok);
    assert_eq!(v, 1.0);
    let mut ok = false;
    assert_eq!(unsafe { pe_validate(p, &mut ok) }, PeStatus::Ok);
    assert!(ok);
    assert_eq!(unsafe { pe_params_set(p, tau1.as_ptr(), -1.0) }, PeStatus::Ok);
    assert_eq!(unsafe { pe_validate(p, &mut ok) }, PeStatus::Ok);
    assert!(!ok);
    assert!(last_error().contains("damping"));
    let mut scan = ptr::null_mut();
    assert_eq!(unsafe { pe_scan(p, 10, &mut scan) }, PeStatus::ValidationFailed);
    let bogus = CString::new("tau5").unwrap();
    assert_eq!(unsafe { pe_params_set(p, bogus.as_ptr(), 1.0) }, PeStatus::InvalidArgument);
    assert_eq!(unsafe { pe_params_set(p, tau1.as_ptr(), f64::NAN) }, PeStatus::InvalidArgument);
    unsafe { pe_params_free(p) };
}

#[test]
fn scan_handle() {
    let p = catalog("p_exp");
    let mut scan = ptr::null_mut();
    assert_eq!(unsafe { pe_scan(p, 50, &mut scan) }, PeStatus::Ok);
    assert_eq!(unsafe { pe_scan_len(scan) }, 50);
    let mut rec = PeScanRecord { n: 0, k: 0.0, abscissa: 0.0, abscissa_freq: 0.0 };
    assert_eq!(unsafe { pe_scan_record(scan, 0, &mut rec) }, PeStatus::Ok);
    assert_eq!(rec.n, 1);
    assert!(rec.abscissa < 0.0);
    assert_eq!(unsafe { pe_scan_record(scan, 50, &mut rec) }, PeStatus::InvalidArgument);
    let mut verdict = PeVerdict::Indeterminate;
    let mut sup = 0.0;
    assert_eq!(unsafe { pe_scan_verdict(scan, &mut verdict, &mut sup) }, PeStatus::Ok);
    assert_eq!(verdict, PeVerdict::UniformlyNegative);
    assert!(sup < 0.0);
    unsafe {
        pe_scan_free(scan);
        pe_params_free(p);
    }
}

#[test]
fn probe_handle() {
    let p = catalog("p_case3");
    let list = [8usize, 16, 32, 64, 128, 256];
    let mut probe = ptr::null_mut();
    assert_eq!(unsafe { pe_probe(p, list.as_ptr(), list.len(), 1e-9, &mut probe) }, PeStatus::Ok);
    let (mut tail, mut full) = (0.0, 0.0);
    assert_eq!(unsafe { pe_probe_exponent(probe, &mut tail, &mut full) }, PeStatus::Ok);
    assert!((tail - 2.0).abs() < 0.1);
    assert!((full - 2.0).abs() < 0.1);
    unsafe { pe_probe_free(probe) };
    let bad = [16usize, 8];
    let mut probe = ptr::null_mut();
    assert_eq!(unsafe { pe_probe(p, bad.as_ptr(), bad.len(), 1e-9, &mut probe) }, PeStatus::InvalidArgument);
    unsafe { pe_params_free(p) };
}

#[test]
fn mode_spectrum_and_boundary() {
    let p = catalog("p_case1");
    let (mut re3, mut im3) = ([0.0; 6], [0.0; 6]);
    assert_eq!(unsafe { pe_mode_spectrum(p, 3, re3.as_mut_ptr(), im3.as_mut_ptr()) }, PeStatus::Ok);
    assert!(re3.iter().all(|r| *r < 0.0));
    assert_eq!(unsafe { pe_params_set_boundary(p, PeBoundary::A2) }, PeStatus::Ok);
    let (mut re2, mut im2) = ([0.0; 6], [0.0; 6]);
    assert_eq!(unsafe { pe_mode_spectrum(p, 3, re2.as_mut_ptr(), im2.as_mut_ptr()) }, PeStatus::Ok);
    let sum = |v: &[f64; 6]| v.iter().sum::<f64>();
    assert!((sum(&re3) - sum(&re2)).abs() < 1e-10);
    assert_eq!(unsafe { pe_mode_spectrum(p, 0, re2.as_mut_ptr(), im2.as_mut_ptr()) }, PeStatus::InvalidArgument);
    unsafe { pe_params_free(p) };
}

#[test]
fn config_text_and_decay_fit() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../catalog/p_case1.cfg")).unwrap();
    let text = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pe_params_from_config(text.as_ptr(), &mut p) }, PeStatus::Ok);
    let mut fit = PeDecayFit { t0: 0.0, t1: 0.0, xi: 0.0, amplitude: 0.0, r_squared: 0.0 };
    assert_eq!(unsafe { pe_decay_fit(p, 8, 0.01, 5.0, 0.6, &mut fit) }, PeStatus::Ok);
    assert!(fit.xi > 0.0);
    assert!((fit.t0 - 2.0).abs() < 1e-9);
    assert_eq!(unsafe { pe_decay_fit(p, 8, 0.01, 5.0, 1.5, &mut fit) }, PeStatus::InvalidArgument);
    assert_eq!(unsafe { pe_decay_fit(p, 0, 0.01, 5.0, 0.6, &mut fit) }, PeStatus::InvalidArgument);
    unsafe { pe_params_free(p) };

    let broken = CString::new("[material]\ntau5 = 1\n").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { pe_params_from_config(broken.as_ptr(), &mut q) }, PeStatus::ParseError);
    assert!(last_error().contains("tau5"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/poroelastic.h")).unwrap();
    for f in [
        "pe_last_error",
        "pe_version",
        "pe_params_catalog",
        "pe_params_from_config",
        "pe_params_free",
        "pe_params_get",
        "pe_params_set",
        "pe_params_set_boundary",
        "pe_validate",
        "pe_classify",
        "pe_mode_spectrum",
        "pe_scan",
        "pe_scan_len",
        "pe_scan_record",
        "pe_scan_verdict",
        "pe_scan_free",
        "pe_probe",
        "pe_probe_exponent",
        "pe_probe_free",
        "pe_decay_fit",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct PeParams PeParams;"));
    let version = unsafe { CStr::from_ptr(pe_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
