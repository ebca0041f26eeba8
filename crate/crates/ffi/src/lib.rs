//! C ABI for `bellsim`.
//!
//! Every function returns a [`BellsimStatus`] and writes its results through
//! out-pointers. States and trial runs are opaque heap handles created by a
//! `*_new`/constructor call and released with the matching `*_free`. On a
//! non-OK status a message is available from
//! [`bellsim_last_error_message`] on the calling thread.
//!
//! Angles cross the boundary in radians. Signs are `+1` / `-1`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bellsim::measurement::{
    coincidence_estimate, model_total_variation, replica_agreement, run_trials, CountRecord,
    CountTable, MeasurementModel, RunConfig, TrialRun,
};
use bellsim::pair::{
    bell_quantity, joint_expectation, joint_probabilities, singlet, tensor, BellAxes, TwoQubitState,
};
use bellsim::photon::{visibility, visibility_bound, SlitAmplitudes};
use bellsim::spin::{Axis, QubitState, Sign};
use bellsim::{Complex, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    UndefinedEstimate = 4,
    InconsistentCounts = 5,
    IndexOutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellsimModel {
    Local = 0,
    Collapse = 1,
}

impl From<BellsimModel> for MeasurementModel {
    fn from(m: BellsimModel) -> Self {
        match m {
            BellsimModel::Local => MeasurementModel::LocalIndependent,
            BellsimModel::Collapse => MeasurementModel::NonlocalCollapse,
        }
    }
}

/// Measurement axis: polar angle in [0, pi], azimuth in radians.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellsimAxis {
    pub polar: f64,
    pub azimuth: f64,
}

/// Count table in the same layout as the JSON count file.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BellsimCounts {
    pub n_trials: u64,
    pub n_a_plus: u64,
    pub n_a_minus: u64,
    pub n_b_plus: u64,
    pub n_b_minus: u64,
    pub c_pp: u64,
    pub c_pm: u64,
    pub c_mp: u64,
    pub c_mm: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BellsimEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Opaque two-qubit state.
pub struct BellsimState(TwoQubitState);

/// Opaque trial run with its per-trial records.
pub struct BellsimRun(TrialRun);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(BellsimStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotNormalized(_) | Error::ZeroVector => BellsimStatus::NotNormalized,
            Error::UndefinedEstimate { .. } => BellsimStatus::UndefinedEstimate,
            Error::InconsistentCounts(_) => BellsimStatus::InconsistentCounts,
            _ => BellsimStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(BellsimStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BellsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BellsimStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BellsimStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

fn axis(a: &BellsimAxis) -> Result<Axis, Failure> {
    Ok(Axis::new(a.polar, a.azimuth)?)
}

fn sign(s: i8, name: &str) -> Result<Sign, Failure> {
    match s {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        _ => Err(Failure(
            BellsimStatus::InvalidArgument,
            format!("`{name}` must be +1 or -1, got {s}"),
        )),
    }
}

fn table(c: &BellsimCounts) -> Result<CountTable, Failure> {
    Ok(CountTable::from_record(&CountRecord {
        n_trials: c.n_trials,
        n_a_plus: c.n_a_plus,
        n_a_minus: c.n_a_minus,
        n_b_plus: c.n_b_plus,
        n_b_minus: c.n_b_minus,
        c_pp: c.c_pp,
        c_pm: c.c_pm,
        c_mp: c.c_mp,
        c_mm: c.c_mm,
    })?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bellsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bellsim_status_message(status: BellsimStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BellsimStatus::Ok => c"ok",
        BellsimStatus::NullPointer => c"null pointer argument",
        BellsimStatus::InvalidArgument => c"invalid argument",
        BellsimStatus::NotNormalized => c"state is not normalized",
        BellsimStatus::UndefinedEstimate => c"estimate undefined: a detector recorded no counts",
        BellsimStatus::InconsistentCounts => c"count table is inconsistent",
        BellsimStatus::IndexOutOfRange => c"index out of range",
        BellsimStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message for the last failing call on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bellsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds an axis from degrees, validating and canonicalizing it.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellsim_axis_from_degrees(
    polar_deg: f64,
    azimuth_deg: f64,
    out: *mut BellsimAxis,
) -> BellsimStatus {
    guard(|| {
        let a = Axis::from_degrees(polar_deg, azimuth_deg)?;
        write(
            out,
            "out",
            BellsimAxis {
                polar: a.polar(),
                azimuth: a.azimuth(),
            },
        )
    })
}

fn boxed_state(out: *mut *mut BellsimState, state: TwoQubitState) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { out.write(Box::into_raw(Box::new(BellsimState(state)))) };
    Ok(())
}

/// Creates the singlet state.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellsim_state_singlet(out: *mut *mut BellsimState) -> BellsimStatus {
    guard(|| boxed_state(out, singlet()))
}

/// Creates the product state `|sign_a z>|sign_b z>`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellsim_state_product_z(
    sign_a: i8,
    sign_b: i8,
    out: *mut *mut BellsimState,
) -> BellsimStatus {
    guard(|| {
        let pick = |s: Sign| match s {
            Sign::Plus => QubitState::plus_z(),
            Sign::Minus => QubitState::minus_z(),
        };
        let a = pick(sign(sign_a, "sign_a")?);
        let b = pick(sign(sign_b, "sign_b")?);
        boxed_state(out, tensor(&a, &b))
    })
}

/// Creates a state from four amplitudes in the order ++, +-, -+, --.
/// The amplitudes must be normalized to within 1e-12.
///
/// # Safety
/// `re` and `im` must each point to four readable doubles; `out` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellsim_state_from_amplitudes(
    re: *const f64,
    im: *const f64,
    out: *mut *mut BellsimState,
) -> BellsimStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        if im.is_null() {
            return Err(null("im"));
        }
        let re = std::slice::from_raw_parts(re, 4);
        let im = std::slice::from_raw_parts(im, 4);
        let amps = std::array::from_fn(|k| Complex::new(re[k], im[k]));
        boxed_state(out, TwoQubitState::new(amps)?)
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle from a `bellsim_state_*` constructor
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bellsim_state_free(state: *mut BellsimState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Joint outcome probabilities in the order ++, +-, -+, --.
///
/// # Safety
/// Pointers must be null or valid; `out` must have room for four doubles.
#[no_mangle]
pub unsafe extern "C" fn bellsim_joint_probabilities(
    state: *const BellsimState,
    axis_a: *const BellsimAxis,
    axis_b: *const BellsimAxis,
    out: *mut f64,
) -> BellsimStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let a = axis(deref(axis_a, "axis_a")?)?;
        let b = axis(deref(axis_b, "axis_b")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = joint_probabilities(s, a, b).probs();
        std::ptr::copy_nonoverlapping(p.as_ptr(), out, 4);
        Ok(())
    })
}

/// Expectation of the product of the two spin outcomes.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_joint_expectation(
    state: *const BellsimState,
    axis_a: *const BellsimAxis,
    axis_b: *const BellsimAxis,
    out: *mut f64,
) -> BellsimStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let a = axis(deref(axis_a, "axis_a")?)?;
        let b = axis(deref(axis_b, "axis_b")?)?;
        write(out, "out", joint_expectation(s, a, b))
    })
}

/// `|E12 - E13| - E23` for three axes.
///
/// # Safety
/// `axes` must point to three readable axes; other pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_bell_quantity(
    state: *const BellsimState,
    axes: *const BellsimAxis,
    out: *mut f64,
) -> BellsimStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        if axes.is_null() {
            return Err(null("axes"));
        }
        let raw = std::slice::from_raw_parts(axes, 3);
        let b = BellAxes::new(axis(&raw[0])?, axis(&raw[1])?, axis(&raw[2])?);
        write(out, "out", bell_quantity(s, &b))
    })
}

/// Total variation distance between the two models' joint distributions.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_model_total_variation(
    state: *const BellsimState,
    axis_a: *const BellsimAxis,
    axis_b: *const BellsimAxis,
    out: *mut f64,
) -> BellsimStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let a = axis(deref(axis_a, "axis_a")?)?;
        let b = axis(deref(axis_b, "axis_b")?)?;
        write(out, "out", model_total_variation(s, a, b))
    })
}

/// Runs `n_trials` seeded trials. The result matches the CLI `simulate`
/// command for the same seed, model, state and axes.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_run_new(
    state: *const BellsimState,
    seed: u64,
    n_trials: u64,
    model: BellsimModel,
    axis_a: *const BellsimAxis,
    axis_b: *const BellsimAxis,
    out: *mut *mut BellsimRun,
) -> BellsimStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let a = axis(deref(axis_a, "axis_a")?)?;
        let b = axis(deref(axis_b, "axis_b")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = RunConfig::new(seed, n_trials, model.into(), a, b)?;
        let run = run_trials(&cfg, s)?;
        out.write(Box::into_raw(Box::new(BellsimRun(run))));
        Ok(())
    })
}

/// Count table of a run.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_run_counts(
    run: *const BellsimRun,
    out: *mut BellsimCounts,
) -> BellsimStatus {
    guard(|| {
        let r = deref(run, "run")?.0.table.to_record();
        write(
            out,
            "out",
            BellsimCounts {
                n_trials: r.n_trials,
                n_a_plus: r.n_a_plus,
                n_a_minus: r.n_a_minus,
                n_b_plus: r.n_b_plus,
                n_b_minus: r.n_b_minus,
                c_pp: r.c_pp,
                c_pm: r.c_pm,
                c_mp: r.c_mp,
                c_mm: r.c_mm,
            },
        )
    })
}

/// Number of trials in a run; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bellsim_run_trial_count(run: *const BellsimRun) -> u64 {
    run.as_ref().map_or(0, |r| r.0.records.len() as u64)
}

/// Outcome signs of trial `index`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_run_trial(
    run: *const BellsimRun,
    index: u64,
    out_sign_a: *mut i8,
    out_sign_b: *mut i8,
) -> BellsimStatus {
    guard(|| {
        let r = &deref(run, "run")?.0;
        let rec = usize::try_from(index)
            .ok()
            .and_then(|i| r.records.get(i))
            .ok_or_else(|| {
                Failure(
                    BellsimStatus::IndexOutOfRange,
                    format!("trial {index} out of range for {} trials", r.records.len()),
                )
            })?;
        write(out_sign_a, "out_sign_a", rec.outcome.a.as_i8())?;
        write(out_sign_b, "out_sign_b", rec.outcome.b.as_i8())
    })
}

/// Releases a run. Null is ignored.
///
/// # Safety
/// `run` must be null or a handle from [`bellsim_run_new`] that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn bellsim_run_free(run: *mut BellsimRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// `C(s_a, s_b) / sqrt(N_a(s_a) N_b(s_b))` with its standard error.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_coincidence_estimate(
    counts: *const BellsimCounts,
    sign_a: i8,
    sign_b: i8,
    out: *mut BellsimEstimate,
) -> BellsimStatus {
    guard(|| {
        let t = table(deref(counts, "counts")?)?;
        let e = coincidence_estimate(&t, sign(sign_a, "sign_a")?, sign(sign_b, "sign_b")?)?;
        write(
            out,
            "out",
            BellsimEstimate {
                value: e.value,
                std_error: e.std_error,
            },
        )
    })
}

/// Replica local expectation with its standard error; `out_agrees` (may be
/// null) receives 1 when it matches minus the direct correlation mean.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn bellsim_replica_expectation(
    counts: *const BellsimCounts,
    out: *mut BellsimEstimate,
    out_agrees: *mut i32,
) -> BellsimStatus {
    guard(|| {
        let t = table(deref(counts, "counts")?)?;
        let check = replica_agreement(&t)?;
        write(
            out,
            "out",
            BellsimEstimate {
                value: check.replica.value,
                std_error: check.replica.std_error,
            },
        )?;
        if !out_agrees.is_null() {
            out_agrees.write(check.agrees as i32);
        }
        Ok(())
    })
}

/// Fringe visibility of a signal photon with slit amplitudes `u` and `l`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellsim_visibility(
    u_re: f64,
    u_im: f64,
    l_re: f64,
    l_im: f64,
    out: *mut f64,
) -> BellsimStatus {
    guard(|| {
        let amps = SlitAmplitudes::new(Complex::new(u_re, u_im), Complex::new(l_re, l_im))?;
        write(out, "out", visibility(&amps)?)
    })
}

/// Upper bound on visibility for which-path information `d` in [0, 1].
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bellsim_visibility_bound(d: f64, out: *mut f64) -> BellsimStatus {
    guard(|| write(out, "out", visibility_bound(d)?))
}
