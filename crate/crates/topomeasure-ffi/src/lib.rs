//! C ABI over `topomeasure`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `tm_*_free`. Every fallible call returns a [`Status`]; on a
//! nonzero status `tm_last_error` describes the failure on this thread.
//! Strings are NUL-terminated UTF-8. Values cross the boundary as
//! [`ValueOut`], a reduced fraction or an infinity flag.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use topomeasure::cli::load_space;
use topomeasure::extend::{validate_tm, TopMeasure};
use topomeasure::partition;
use topomeasure::report::Budget;
use topomeasure::solid::Model;
use topomeasure::space::FiniteSpace;
use topomeasure::ssf::{self, SolidSetFunction};
use topomeasure::value::Value;

/// Return code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Evaluation = 4,
    Panic = 5,
}

/// Outcome of a validation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass = 0,
    Fail = 1,
    Unknown = 2,
}

/// An exact value. When `infinite` is nonzero the fraction is 0/1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueOut {
    pub infinite: i32,
    pub num: i64,
    pub den: i64,
}

/// A finite space with its solid-set catalog.
pub struct Space {
    model: Arc<Model>,
}

/// A solid-set function on a space.
pub struct Ssf {
    lambda: Arc<SolidSetFunction>,
}

/// A set function on open and closed regions.
pub struct Measure {
    mu: TopMeasure,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (Status, String)>) -> Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            Status::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            Status::Panic
        }
    }
}

fn parse_err(e: impl ToString) -> (Status, String) {
    (Status::Parse, e.to_string())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (Status, String)> {
    if s.is_null() {
        return Err((Status::NullArgument, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (Status::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (Status, String)> {
    p.as_ref()
        .ok_or_else(|| (Status::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (Status, String)> {
    if out.is_null() {
        return Err((Status::NullArgument, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

fn verdict(label: &str) -> Verdict {
    match label {
        "pass" => Verdict::Pass,
        "fail" => Verdict::Fail,
        _ => Verdict::Unknown,
    }
}

fn value_out(v: Value) -> ValueOut {
    match v.finite() {
        Some(r) => ValueOut {
            infinite: 0,
            num: *r.numer(),
            den: *r.denom(),
        },
        None => ValueOut {
            infinite: 1,
            num: 0,
            den: 1,
        },
    }
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn tm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a space from a builtin name such as `disk(2)` or a descriptor file path.
///
/// # Safety
/// `spec` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tm_space_load(spec: *const c_char, out: *mut *mut Space) -> Status {
    guard(|| {
        let space = load_space(text(spec)?).map_err(parse_err)?;
        let h = Box::new(Space {
            model: Model::new(space),
        });
        put(out, Box::into_raw(h))
    })
}

/// Parses a space description document.
///
/// # Safety
/// `descriptor` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tm_space_from_descriptor(
    descriptor: *const c_char,
    out: *mut *mut Space,
) -> Status {
    guard(|| {
        let space = FiniteSpace::from_descriptor(text(descriptor)?).map_err(parse_err)?;
        let h = Box::new(Space {
            model: Model::new(space),
        });
        put(out, Box::into_raw(h))
    })
}

/// Number of cells, not counting the point at infinity.
///
/// # Safety
/// `space` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tm_space_cell_count(space: *const Space) -> usize {
    space.as_ref().map_or(0, |s| s.model.space().points().len())
}

/// Nonzero when the space is compact.
///
/// # Safety
/// `space` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tm_space_is_compact(space: *const Space) -> i32 {
    space
        .as_ref()
        .map_or(0, |s| s.model.space().is_compact_space() as i32)
}

/// Genus of a compact space, or of its one-point compactification.
///
/// # Safety
/// Pointers must be valid; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_space_genus(
    space: *const Space,
    budget: u64,
    genus: *mut usize,
    exact: *mut i32,
) -> Status {
    guard(|| {
        let sp = handle(space)?.model.space();
        let g = if sp.is_compact_space() {
            partition::genus(sp, partition::DEFAULT_FAMILY_BOUND, Budget(budget))
        } else {
            partition::hatx_genus(sp, Budget(budget))
        };
        put(genus, g.genus)?;
        put(exact, g.exact as i32)
    })
}

/// # Safety
/// `space` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tm_space_free(space: *mut Space) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Parses a solid-set function descriptor such as `measure w=@uniform`.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_ssf_parse(
    space: *const Space,
    descriptor: *const c_char,
    out: *mut *mut Ssf,
) -> Status {
    guard(|| {
        let model = Arc::clone(&handle(space)?.model);
        let l = ssf::parse_descriptor(model, text(descriptor)?).map_err(parse_err)?;
        put(
            out,
            Box::into_raw(Box::new(Ssf {
                lambda: Arc::new(l),
            })),
        )
    })
}

/// Checks the solid-set function axioms.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_ssf_validate(
    ssf: *const Ssf,
    budget: u64,
    out: *mut Verdict,
) -> Status {
    guard(|| {
        let r = ssf::validate_ssf(&handle(ssf)?.lambda, Budget(budget));
        put(out, verdict(r.overall()))
    })
}

/// # Safety
/// `ssf` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tm_ssf_free(ssf: *mut Ssf) {
    if !ssf.is_null() {
        drop(Box::from_raw(ssf));
    }
}

/// Extends a solid-set function to open and closed regions.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_measure_extend(ssf: *const Ssf, out: *mut *mut Measure) -> Status {
    guard(|| {
        let mu = TopMeasure::extend(Arc::clone(&handle(ssf)?.lambda));
        put(out, Box::into_raw(Box::new(Measure { mu })))
    })
}

/// A measure with the same value on every nonempty open or closed region.
///
/// # Safety
/// Pointers must be valid; `value` is a literal such as `1`, `3/2` or `inf`.
#[no_mangle]
pub unsafe extern "C" fn tm_measure_constant(
    space: *const Space,
    value: *const c_char,
    out: *mut *mut Measure,
) -> Status {
    guard(|| {
        let model = Arc::clone(&handle(space)?.model);
        let v: Value = text(value)?.parse().map_err(parse_err)?;
        let mu = TopMeasure::constant(model, v);
        put(out, Box::into_raw(Box::new(Measure { mu })))
    })
}

/// Evaluates on an open or closed region given as a region literal.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_measure_eval(
    measure: *const Measure,
    region: *const c_char,
    out: *mut ValueOut,
) -> Status {
    guard(|| {
        let mu = &handle(measure)?.mu;
        let r = mu.space().parse_region(text(region)?).map_err(parse_err)?;
        let v = mu
            .value(r)
            .map_err(|e| (Status::Evaluation, e.to_string()))?;
        put(out, value_out(v))
    })
}

/// Checks the topological measure axioms.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_measure_validate(
    measure: *const Measure,
    budget: u64,
    out: *mut Verdict,
) -> Status {
    guard(|| {
        let r = validate_tm(&handle(measure)?.mu, Budget(budget))
            .map_err(|e| (Status::Evaluation, e.to_string()))?;
        put(out, verdict(r.overall()))
    })
}

/// # Safety
/// `measure` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tm_measure_free(measure: *mut Measure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(tm_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn round_trip_through_handles() {
        unsafe {
            let mut space = ptr::null_mut();
            assert_eq!(tm_space_load(c"sphere(3)".as_ptr(), &mut space), Status::Ok);
            assert_eq!(tm_space_cell_count(space), 20);
            assert_eq!(tm_space_is_compact(space), 1);

            let mut l = ptr::null_mut();
            let d = c"point-majority points=q0,q1,q2";
            assert_eq!(tm_ssf_parse(space, d.as_ptr(), &mut l), Status::Ok);
            let mut v = Verdict::Unknown;
            assert_eq!(tm_ssf_validate(l, Budget::DEFAULT.0, &mut v), Status::Ok);
            assert_eq!(v, Verdict::Pass);

            let mut mu = ptr::null_mut();
            assert_eq!(tm_measure_extend(l, &mut mu), Status::Ok);
            let mut out = ValueOut {
                infinite: 9,
                num: 9,
                den: 9,
            };
            assert_eq!(tm_measure_eval(mu, c"@all".as_ptr(), &mut out), Status::Ok);
            assert_eq!(
                out,
                ValueOut {
                    infinite: 0,
                    num: 1,
                    den: 1
                }
            );

            tm_measure_free(mu);
            tm_ssf_free(l);
            tm_space_free(space);
        }
    }

    #[test]
    fn constant_measure_fails_validation() {
        unsafe {
            let mut space = ptr::null_mut();
            assert_eq!(
                tm_space_load(c"interval(2)".as_ptr(), &mut space),
                Status::Ok
            );
            let mut mu = ptr::null_mut();
            assert_eq!(
                tm_measure_constant(space, c"1".as_ptr(), &mut mu),
                Status::Ok
            );
            let mut v = Verdict::Pass;
            assert_eq!(
                tm_measure_validate(mu, Budget::DEFAULT.0, &mut v),
                Status::Ok
            );
            assert_eq!(v, Verdict::Fail);
            tm_measure_free(mu);
            tm_space_free(space);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut space = ptr::null_mut();
            assert_eq!(tm_space_load(ptr::null(), &mut space), Status::NullArgument);
            assert_eq!(
                tm_space_load(c"torus(2)".as_ptr(), &mut space),
                Status::Parse
            );
            assert!(!last_error().is_empty());
            assert!(space.is_null());

            assert_eq!(
                tm_space_load(c"interval(2)".as_ptr(), &mut space),
                Status::Ok
            );
            assert!(last_error().is_empty());
            let mut l = ptr::null_mut();
            assert_eq!(
                tm_ssf_parse(space, c"bogus".as_ptr(), &mut l),
                Status::Parse
            );
            let mut mu = ptr::null_mut();
            assert_eq!(
                tm_measure_constant(space, c"-1".as_ptr(), &mut mu),
                Status::Parse
            );
            tm_space_free(space);
            tm_space_free(ptr::null_mut());
        }
    }

    #[test]
    fn infinite_values_cross_as_flag() {
        assert_eq!(
            value_out(Value::Infinite),
            ValueOut {
                infinite: 1,
                num: 0,
                den: 1
            }
        );
        assert_eq!(
            value_out(Value::ratio(6, 4)),
            ValueOut {
                infinite: 0,
                num: 3,
                den: 2
            }
        );
    }

    #[test]
    fn header_declares_entry_points() {
        let h = include_str!("../include/topomeasure.h");
        for name in [
            "tm_space_load",
            "tm_measure_eval",
            "TmValueOut",
            "TM_STATUS_OK",
        ] {
            assert!(h.contains(name), "{name} missing from header");
        }
    }
}
