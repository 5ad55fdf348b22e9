//! C ABI over `ecic`.
//!
//! Every fallible call returns an [`EcicStatus`] and writes results through
//! out-pointers, which are left untouched on failure. The message for the
//! most recent failure on the calling thread is available from
//! [`ecic_last_error_message`]. Handles and strings returned by this library
//! must be released with the matching `*_free` function.
//!
//! Receivers and messages are 0-based here, unlike the JSON documents.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use ecic::bounds::bounds_report;
use ecic::construct_search::optimal_length_search;
use ecic::decoder::{build_receiver_decoder, decode};
use ecic::field_linalg::{FMatrix, FVector, Field};
use ecic::index_codes::{
    builtin_matrix, correction_radius, instance_params, verify_ecic, CorrectionRadius, LinearIndexCode,
};
use ecic::instance::{builtin_instance, parse_instance, IcsiInstance};
use ecic::Budgets;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or inconsistent input.
    InvalidInput = 3,
    /// A search or enumeration limit was reached; the answer is unknown.
    BudgetExceeded = 4,
    /// An internal consistency check failed.
    Internal = 5,
    Panic = 6,
}

/// An ICSI instance.
pub struct EcicInstance(IcsiInstance);

/// An encoding matrix over a finite field.
pub struct EcicMatrix(FMatrix);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EcicParams {
    pub alpha: usize,
    pub kappa: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcicRadiusKind {
    /// No receivers, so every radius works.
    Unbounded = 0,
    /// Some receiver cannot decode even without errors.
    NotEvenIc = 1,
    Radius = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EcicRadius {
    pub kind: EcicRadiusKind,
    /// Meaningful only for `Radius`.
    pub value: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EcicSearchResult {
    pub complete: bool,
    /// The optimal length; valid when `complete`.
    pub optimal_length: usize,
    pub has_infeasible_below: bool,
    /// Largest length proven infeasible; valid when `has_infeasible_below`.
    pub infeasible_below: usize,
    /// Smallest length known to admit a code.
    pub feasible_at: usize,
    pub nodes: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EcicDecodeResult {
    pub recovered: u8,
    pub estimate_weight: usize,
    /// False when the error estimate is heavier than the requested cap.
    pub within_cap: bool,
}

struct Failure {
    status: EcicStatus,
    message: String,
}

impl Failure {
    fn new(status: EcicStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<ecic::Error> for Failure {
    fn from(e: ecic::Error) -> Self {
        let status = match &e {
            e if e.is_budget() => EcicStatus::BudgetExceeded,
            ecic::Error::InternalContradiction(_) => EcicStatus::Internal,
            _ => EcicStatus::InvalidInput,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, records its failure message and turns panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EcicStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EcicStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(fail.message);
            fail.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {what}"));
            EcicStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(EcicStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(EcicStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    let s = deref(p, what)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::new(EcicStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn bytes<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    deref(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(EcicStatus::Internal, "string contains NUL"))
}

fn field(q: u32) -> Result<Field, Failure> {
    Ok(Field::new(q)?)
}

unsafe fn code(inst: *const EcicInstance, matrix: *const EcicMatrix) -> Result<LinearIndexCode, Failure> {
    let inst = deref(inst, "instance")?;
    let matrix = deref(matrix, "matrix")?;
    Ok(LinearIndexCode::new(inst.0.clone(), matrix.0.clone())?)
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ecic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from its JSON document (1-based indices).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_instance_from_json(
    json: *const c_char,
    out_instance: *mut *mut EcicInstance,
) -> EcicStatus {
    guard(|| {
        let inst = parse_instance(text(json, "json")?)?;
        *out(out_instance, "out_instance")? = Box::into_raw(Box::new(EcicInstance(inst)));
        Ok(())
    })
}

/// A named instance: `pentagon`, `example1`, `odd-cycle-complement:<l>` or
/// `no-side-info:<n>`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_instance_builtin(
    name: *const c_char,
    out_instance: *mut *mut EcicInstance,
) -> EcicStatus {
    guard(|| {
        let inst = builtin_instance(text(name, "name")?)?;
        *out(out_instance, "out_instance")? = Box::into_raw(Box::new(EcicInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle from this library that is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecic_instance_free(inst: *mut EcicInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ecic_instance_messages(inst: *const EcicInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.messages())
}

/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ecic_instance_receivers(inst: *const EcicInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.receivers())
}

/// Parses a matrix in the text format: a `q rows cols` header, then one row
/// of space-separated elements per line.
///
/// # Safety
/// `matrix_text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_matrix_from_text(
    matrix_text: *const c_char,
    out_matrix: *mut *mut EcicMatrix,
) -> EcicStatus {
    guard(|| {
        let m = FMatrix::from_text(text(matrix_text, "matrix_text")?)?;
        *out(out_matrix, "out_matrix")? = Box::into_raw(Box::new(EcicMatrix(m)));
        Ok(())
    })
}

/// A named binary matrix: `example1` or `pentagon`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_matrix_builtin(name: *const c_char, out_matrix: *mut *mut EcicMatrix) -> EcicStatus {
    guard(|| {
        let m = builtin_matrix(text(name, "name")?)?;
        *out(out_matrix, "out_matrix")? = Box::into_raw(Box::new(EcicMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or a handle from this library that is not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecic_matrix_free(matrix: *mut EcicMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// The matrix in the text format; free with [`ecic_string_free`].
///
/// # Safety
/// `matrix` must be a live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_matrix_to_text(matrix: *const EcicMatrix, out_text: *mut *mut c_char) -> EcicStatus {
    guard(|| {
        let s = into_c_string(deref(matrix, "matrix")?.0.to_text())?;
        *out(out_text, "out_text")? = s;
        Ok(())
    })
}

/// α(H) and κ_q(H).
///
/// # Safety
/// `inst` must be a live handle; `out_params` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_params(inst: *const EcicInstance, q: u32, out_params: *mut EcicParams) -> EcicStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let b = Budgets::default();
        let p = instance_params(&inst.0, &field(q)?, b.alpha_cap, b.assignments)?;
        *out(out_params, "out_params")? = EcicParams {
            alpha: p.alpha.alpha,
            kappa: p.kappa.kappa,
        };
        Ok(())
    })
}

/// Whether the matrix is a (δ, H)-ECIC for the instance.
///
/// # Safety
/// `inst` and `matrix` must be live handles; `out_valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_verify(
    inst: *const EcicInstance,
    matrix: *const EcicMatrix,
    delta: usize,
    out_valid: *mut bool,
) -> EcicStatus {
    guard(|| {
        let c = code(inst, matrix)?;
        let v = verify_ecic(&c, delta, Budgets::default().enumeration)?;
        *out(out_valid, "out_valid")? = v.valid;
        Ok(())
    })
}

/// The largest δ for which the matrix is a (δ, H)-ECIC.
///
/// # Safety
/// `inst` and `matrix` must be live handles; `out_radius` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_radius(
    inst: *const EcicInstance,
    matrix: *const EcicMatrix,
    out_radius: *mut EcicRadius,
) -> EcicStatus {
    guard(|| {
        let c = code(inst, matrix)?;
        let r = match correction_radius(&c, Budgets::default().enumeration)? {
            CorrectionRadius::Unbounded => EcicRadius {
                kind: EcicRadiusKind::Unbounded,
                value: 0,
            },
            CorrectionRadius::NotEvenIc => EcicRadius {
                kind: EcicRadiusKind::NotEvenIc,
                value: 0,
            },
            CorrectionRadius::Radius(d) => EcicRadius {
                kind: EcicRadiusKind::Radius,
                value: d,
            },
        };
        *out(out_radius, "out_radius")? = r;
        Ok(())
    })
}

/// The bounds report as a JSON object; free with [`ecic_string_free`].
/// Quantities that exceeded a budget are null and listed under `unknown`.
///
/// # Safety
/// `inst` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_bounds_json(
    inst: *const EcicInstance,
    q: u32,
    delta: usize,
    out_json: *mut *mut c_char,
) -> EcicStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let rep = bounds_report(&inst.0, &field(q)?, delta, &Budgets::default());
        let s = serde_json::to_string(&rep).map_err(|e| Failure::new(EcicStatus::Internal, e.to_string()))?;
        *out(out_json, "out_json")? = into_c_string(s)?;
        Ok(())
    })
}

/// Exhaustive search for the optimal (δ, H)-ECIC length. `node_budget` of 0
/// means the default. Running out of nodes is not a failure: the result is
/// then a bracket with `complete` false. `out_witness` may be null; otherwise
/// it receives the shortest code found, or null if there is none.
///
/// # Safety
/// `inst` must be a live handle; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_search(
    inst: *const EcicInstance,
    q: u32,
    delta: usize,
    node_budget: u64,
    jobs: usize,
    out_result: *mut EcicSearchResult,
    out_witness: *mut *mut EcicMatrix,
) -> EcicStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let mut budgets = Budgets {
            jobs: jobs.max(1),
            ..Budgets::default()
        };
        if node_budget > 0 {
            budgets.nodes = node_budget;
        }
        let s = optimal_length_search(&inst.0, &field(q)?, delta, &budgets)?;
        let result = out(out_result, "out_result")?;
        *result = EcicSearchResult {
            complete: s.complete(),
            optimal_length: s.optimal_length.unwrap_or(0),
            has_infeasible_below: s.infeasible_below.is_some(),
            infeasible_below: s.infeasible_below.unwrap_or(0),
            feasible_at: s.feasible_at,
            nodes: s.stats.nodes,
        };
        if let Some(w) = out_witness.as_mut() {
            *w = s.witness.map_or(ptr::null_mut(), |c| {
                Box::into_raw(Box::new(EcicMatrix(c.matrix().clone())))
            });
        }
        Ok(())
    })
}

/// `x · L` into `out_codeword`, which must hold `cols` elements.
///
/// # Safety
/// `x` must point to `x_len` elements and `out_codeword` to
/// `out_len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn ecic_encode(
    matrix: *const EcicMatrix,
    x: *const u8,
    x_len: usize,
    out_codeword: *mut u8,
    out_len: usize,
) -> EcicStatus {
    guard(|| {
        let m = &deref(matrix, "matrix")?.0;
        if out_len != m.cols() {
            return Err(ecic::Error::LengthMismatch {
                expected: m.cols(),
                got: out_len,
            }
            .into());
        }
        let x = FVector::new(m.field(), bytes(x, x_len, "x")?.to_vec())?;
        let y = m.vec_mul(&x)?;
        deref(out_codeword, "out_codeword")?;
        std::slice::from_raw_parts_mut(out_codeword, out_len).copy_from_slice(y.entries());
        Ok(())
    })
}

/// Syndrome-decodes receiver `receiver`'s demanded symbol from the received
/// word `y`. `side` holds the receiver's side information in increasing
/// message order. `weight_cap` only sets `within_cap`; the estimate is always
/// an exact coset leader.
///
/// # Safety
/// `inst` and `matrix` must be live handles; `y` must point to `y_len`
/// elements, `side` to `side_len` elements; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecic_decode(
    inst: *const EcicInstance,
    matrix: *const EcicMatrix,
    receiver: usize,
    y: *const u8,
    y_len: usize,
    side: *const u8,
    side_len: usize,
    weight_cap: usize,
    out_result: *mut EcicDecodeResult,
) -> EcicStatus {
    guard(|| {
        let c = code(inst, matrix)?;
        let dec = build_receiver_decoder(&c, receiver)?;
        let y = FVector::new(c.field(), bytes(y, y_len, "y")?.to_vec())?;
        let o = decode(&dec, &y, bytes(side, side_len, "side")?, weight_cap)?;
        *out(out_result, "out_result")? = EcicDecodeResult {
            recovered: o.recovered,
            estimate_weight: o.estimate_weight,
            within_cap: o.within_cap,
        };
        Ok(())
    })
}
