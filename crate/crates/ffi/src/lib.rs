//! C interface to the `poroelastic` crate.
//!
//! Objects cross the boundary as opaque handles. Constructors such as
//! `pe_params_catalog` hand out a handle that the caller releases with the
//! matching `pe_*_free`. Every fallible
//! call returns a [`PeStatus`]; on failure a description is available from
//! [`pe_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use poroelastic::catalog;
use poroelastic::cli_io;
use poroelastic::modal::{self, ModeIndex, ScanVerdict, SpectrumScan};
use poroelastic::params::{self, BoundaryKind, MaterialParams};
use poroelastic::resolvent::{self, ProbeResult};
use poroelastic::simulate::{self, Evolver, InitialSpec, Integrator};
use poroelastic::stability::{self, Regime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ValidationFailed = 4,
    NumericalFailure = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeBoundary {
    A2 = 2,
    A3 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeRegime {
    Exponential = 0,
    NonExpCase1 = 1,
    NonExpCase2 = 2,
    NonExpCase3 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeVerdict {
    UniformlyNegative = 0,
    ApproachingAxis = 1,
    Indeterminate = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeStability {
    pub regime: PeRegime,
    pub chi0: f64,
    pub chi1: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeScanRecord {
    pub n: usize,
    pub k: f64,
    pub abscissa: f64,
    pub abscissa_freq: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeDecayFit {
    pub t0: f64,
    pub t1: f64,
    pub xi: f64,
    pub amplitude: f64,
    pub r_squared: f64,
}

/// Material parameters with a boundary condition.
pub struct PeParams {
    params: MaterialParams,
    bc: BoundaryKind,
}

/// Result of a spectral-abscissa scan.
pub struct PeScan(SpectrumScan);

/// Result of a resolvent probe.
pub struct PeProbe(ProbeResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("interior nul removed"));
}

fn fail(status: PeStatus, msg: impl Into<String>) -> PeStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> PeStatus) -> PeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PeStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, PeStatus> {
    if p.is_null() {
        return Err(fail(PeStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PeStatus::InvalidArgument, "string argument is not UTF-8"))
}

macro_rules! deref {
    ($p:expr) => {
        match $p.as_ref() {
            Some(v) => v,
            None => return fail(PeStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

macro_rules! deref_mut {
    ($p:expr) => {
        match $p.as_mut() {
            Some(v) => v,
            None => return fail(PeStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

fn regime(r: Regime) -> PeRegime {
    match r {
        Regime::Exponential => PeRegime::Exponential,
        Regime::NonExpCase1 => PeRegime::NonExpCase1,
        Regime::NonExpCase2 => PeRegime::NonExpCase2,
        Regime::NonExpCase3 => PeRegime::NonExpCase3,
    }
}

fn boundary(b: PeBoundary) -> BoundaryKind {
    match b {
        PeBoundary::A2 => BoundaryKind::MixedA2,
        PeBoundary::A3 => BoundaryKind::MixedA3,
    }
}

fn check_valid(p: &PeParams) -> Result<(), PeStatus> {
    let report = params::validate_all(&p.params, p.bc);
    if report.all_ok() {
        Ok(())
    } else {
        Err(fail(PeStatus::ValidationFailed, report.messages.join("; ")))
    }
}

/// Message describing the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next `pe_` call on the same thread.
#[no_mangle]
pub extern "C" fn pe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn pe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates parameters from a catalog name (`p_exp`, `p_case1`, `p_case2`, `p_case3`) under A3.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pe_params_catalog(name: *const c_char, out: *mut *mut PeParams) -> PeStatus {
    guard(|| {
        let out = deref_mut!(out);
        let name = match str_arg(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        match catalog::all().into_iter().find(|(n, _)| *n == name) {
            Some((_, p)) => {
                *out = Box::into_raw(Box::new(PeParams { params: p, bc: BoundaryKind::MixedA3 }));
                PeStatus::Ok
            }
            None => fail(PeStatus::InvalidArgument, format!("unknown catalog set `{name}`")),
        }
    })
}

/// Creates parameters from configuration text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pe_params_from_config(text: *const c_char, out: *mut *mut PeParams) -> PeStatus {
    guard(|| {
        let out = deref_mut!(out);
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli_io::parse_config(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(PeParams { params: cfg.params, bc: cfg.bc }));
                PeStatus::Ok
            }
            Err(e) => fail(PeStatus::ParseError, e.to_string()),
        }
    })
}

/// Releases parameters; null is ignored.
///
/// # Safety
/// `p` must come from a `pe_params_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pe_params_free(p: *mut PeParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Reads a field by name, e.g. `"tau1"`.
///
/// # Safety
/// Pointers must be valid; `name` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn pe_params_get(p: *const PeParams, name: *const c_char, out: *mut f64) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        let name = match str_arg(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        match p.params.get(name) {
            Some(v) => {
                *out = v;
                PeStatus::Ok
            }
            None => fail(PeStatus::InvalidArgument, format!("unknown field `{name}`")),
        }
    })
}

/// Sets a field by name.
///
/// # Safety
/// Pointers must be valid; `name` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn pe_params_set(p: *mut PeParams, name: *const c_char, value: f64) -> PeStatus {
    guard(|| {
        let p = deref_mut!(p);
        let name = match str_arg(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        if !value.is_finite() {
            return fail(PeStatus::InvalidArgument, "value must be finite");
        }
        if p.params.set(name, value) {
            PeStatus::Ok
        } else {
            fail(PeStatus::InvalidArgument, format!("unknown field `{name}`"))
        }
    })
}

/// # Safety
/// `p` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn pe_params_set_boundary(p: *mut PeParams, bc: PeBoundary) -> PeStatus {
    guard(|| {
        deref_mut!(p).bc = boundary(bc);
        PeStatus::Ok
    })
}

/// Runs every admissibility check; `*ok` is set even when the checks fail.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_validate(p: *const PeParams, ok: *mut bool) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        let ok = deref_mut!(ok);
        let report = params::validate_all(&p.params, p.bc);
        *ok = report.all_ok();
        if !*ok {
            set_error(report.messages.join("; "));
        }
        PeStatus::Ok
    })
}

/// Stability numbers and regime with relative zero tolerance `tol`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_classify(p: *const PeParams, tol: f64, out: *mut PeStability) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        if !(tol > 0.0 && tol.is_finite()) {
            return fail(PeStatus::InvalidArgument, "tolerance must be positive and finite");
        }
        let c = stability::classify(&p.params, tol);
        *out = PeStability { regime: regime(c.class), chi0: c.chi0, chi1: c.chi1 };
        PeStatus::Ok
    })
}

/// Eigenvalues of mode `n` into `re[0..6]`, `im[0..6]`.
///
/// # Safety
/// `re` and `im` must each point to 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pe_mode_spectrum(p: *const PeParams, n: usize, re: *mut f64, im: *mut f64) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        if re.is_null() || im.is_null() {
            return fail(PeStatus::NullPointer, "null output buffer");
        }
        let idx = match ModeIndex::new(n) {
            Ok(i) => i,
            Err(e) => return fail(PeStatus::InvalidArgument, e.to_string()),
        };
        match modal::mode_spectrum(&p.params, p.bc, idx) {
            Ok(eigs) => {
                for (i, z) in eigs.iter().enumerate() {
                    *re.add(i) = z.re;
                    *im.add(i) = z.im;
                }
                PeStatus::Ok
            }
            Err(e) => fail(PeStatus::NumericalFailure, e.to_string()),
        }
    })
}

/// Spectral abscissa of modes `1..=n_max`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_scan(p: *const PeParams, n_max: usize, out: *mut *mut PeScan) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        if n_max == 0 {
            return fail(PeStatus::InvalidArgument, "n_max must be at least 1");
        }
        if let Err(s) = check_valid(p) {
            return s;
        }
        match modal::abscissa_scan(&p.params, p.bc, n_max) {
            Ok(scan) => {
                *out = Box::into_raw(Box::new(PeScan(scan)));
                PeStatus::Ok
            }
            Err(e) => fail(PeStatus::NumericalFailure, e.to_string()),
        }
    })
}

/// Number of records in a scan; 0 for null.
///
/// # Safety
/// `s` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn pe_scan_len(s: *const PeScan) -> usize {
    s.as_ref().map_or(0, |s| s.0.records.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_scan_record(s: *const PeScan, i: usize, out: *mut PeScanRecord) -> PeStatus {
    guard(|| {
        let s = deref!(s);
        let out = deref_mut!(out);
        match s.0.records.get(i) {
            Some(r) => {
                *out = PeScanRecord { n: r.n, k: r.k, abscissa: r.abscissa, abscissa_freq: r.abscissa_freq };
                PeStatus::Ok
            }
            None => fail(PeStatus::InvalidArgument, format!("record {i} out of range")),
        }
    })
}

/// Verdict and supremum of a scan.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_scan_verdict(s: *const PeScan, verdict: *mut PeVerdict, sup: *mut f64) -> PeStatus {
    guard(|| {
        let s = deref!(s);
        *deref_mut!(verdict) = match s.0.verdict {
            ScanVerdict::UniformlyNegative => PeVerdict::UniformlyNegative,
            ScanVerdict::ApproachingAxis => PeVerdict::ApproachingAxis,
            ScanVerdict::Indeterminate => PeVerdict::Indeterminate,
        };
        *deref_mut!(sup) = s.0.sup;
        PeStatus::Ok
    })
}

/// # Safety
/// `s` must come from [`pe_scan`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pe_scan_free(s: *mut PeScan) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Resolvent growth probe over the strictly increasing modes `n_list[0..len]`.
///
/// # Safety
/// `n_list` must point to `len` readable values; other pointers valid.
#[no_mangle]
pub unsafe extern "C" fn pe_probe(
    p: *const PeParams,
    n_list: *const usize,
    len: usize,
    tol: f64,
    out: *mut *mut PeProbe,
) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        if n_list.is_null() {
            return fail(PeStatus::NullPointer, "null mode list");
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return fail(PeStatus::InvalidArgument, "tolerance must be positive and finite");
        }
        if let Err(s) = check_valid(p) {
            return s;
        }
        let list = std::slice::from_raw_parts(n_list, len);
        match resolvent::probe_sequence(&p.params, list, tol) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(PeProbe(r)));
                PeStatus::Ok
            }
            Err(e @ resolvent::ResolventError::SingularSystem { .. }) => fail(PeStatus::NumericalFailure, e.to_string()),
            Err(e) => fail(PeStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Fitted growth exponents: tail fit and fit over every point.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_probe_exponent(r: *const PeProbe, tail: *mut f64, full: *mut f64) -> PeStatus {
    guard(|| {
        let r = deref!(r);
        *deref_mut!(tail) = r.0.tail_fit.exponent;
        *deref_mut!(full) = r.0.full_fit.exponent;
        PeStatus::Ok
    })
}

/// # Safety
/// `r` must come from [`pe_probe`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pe_probe_free(r: *mut PeProbe) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Evolves broadband initial data with the exact integrator and fits the
/// energy decay over the last `window` fraction of `[0, t_end]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pe_decay_fit(
    p: *const PeParams,
    modes: usize,
    dt: f64,
    t_end: f64,
    window: f64,
    out: *mut PeDecayFit,
) -> PeStatus {
    guard(|| {
        let p = deref!(p);
        let out = deref_mut!(out);
        if !(window > 0.0 && window <= 1.0) || !(t_end > 0.0 && t_end.is_finite()) {
            return fail(PeStatus::InvalidArgument, "need 0 < window <= 1 and finite t_end > 0");
        }
        if let Err(s) = check_valid(p) {
            return s;
        }
        let run = || -> Result<simulate::DecayFit, simulate::SimError> {
            let s0 = InitialSpec::Broadband.build(p.bc, modes)?;
            let mut ev = Evolver::new(&p.params, p.bc, modes, dt, Integrator::Exact)?;
            let mut trace = simulate::EnergyTrace::new();
            ev.run(&s0, (t_end / dt).round() as usize, |s| trace.record(&p.params, p.bc, s))?;
            simulate::fit_decay(&trace, window)
        };
        match run() {
            Ok(f) => {
                *out = PeDecayFit { t0: f.t0, t1: f.t1, xi: f.xi, amplitude: f.amplitude, r_squared: f.r_squared };
                PeStatus::Ok
            }
            Err(e @ (simulate::SimError::NoModes | simulate::SimError::InvalidStep(_))) => {
                fail(PeStatus::InvalidArgument, e.to_string())
            }
            Err(e) => fail(PeStatus::NumericalFailure, e.to_string()),
        }
    })
}
