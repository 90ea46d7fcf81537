//! C interface to `biproj_apn`.
//!
//! Objects cross the boundary as opaque handles created by a `*_new`
//! function and released with the matching `*_free`. Every fallible call
//! returns a `BapStatus`; on failure `bap_last_error` yields a message for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use biproj_apn::apn::{apn_naive_verdict, apn_projective, to_truth_table};
use biproj_apn::biproj::rootless_count;
use biproj_apn::equivalence::restricted::{search_equivalence, RestrictedOutcome};
use biproj_apn::walsh::{extended_walsh_spectrum, is_classical};
use biproj_apn::{BiprojectivePair, Error, FamilyParams, FieldCtx, FieldElement, ProductElement};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DivisionByZero = 3,
    ConditionViolated = 4,
    TooLarge = 5,
    Unsupported = 6,
    SearchFailed = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A finite field GF(2^m).
pub struct BapField {
    ctx: Arc<FieldCtx>,
}

/// A biprojective pair over a field.
pub struct BapPair {
    pair: BiprojectivePair,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: BapStatus, msg: impl Into<String>) -> BapStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn from_error(err: Error) -> BapStatus {
    let status = match &err {
        Error::DivisionByZero => BapStatus::DivisionByZero,
        Error::ConditionViolated { .. } | Error::PreconditionViolated(_) => BapStatus::ConditionViolated,
        Error::TooLarge(_) => BapStatus::TooLarge,
        Error::UnsupportedM(_) => BapStatus::Unsupported,
        Error::SearchFailed(_) => BapStatus::SearchFailed,
        _ => BapStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), BapStatus>) -> BapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BapStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(BapStatus::Panic, "internal panic"),
    }
}

fn ok<T>(r: biproj_apn::Result<T>) -> Result<T, BapStatus> {
    r.map_err(from_error)
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, BapStatus> {
    p.as_ref().ok_or_else(|| fail(BapStatus::NullPointer, "null handle"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, BapStatus> {
    p.as_mut().ok_or_else(|| fail(BapStatus::NullPointer, "null output pointer"))
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `cap`). Returns the full message length.
///
/// # Safety
/// `buf` must be valid for `cap` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn bap_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates GF(2^m). `poly` is the defining polynomial as a bit mask, or 0
/// for the default one.
///
/// # Safety
/// `field` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bap_field_new(m: u32, poly: u64, field: *mut *mut BapField) -> BapStatus {
    guard(|| {
        let slot = out(field)?;
        let ctx = ok(if poly == 0 { FieldCtx::new(m) } else { FieldCtx::with_poly(m, poly) })?;
        *slot = Box::into_raw(Box::new(BapField { ctx }));
        Ok(())
    })
}

/// # Safety
/// `field` must come from `bap_field_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn bap_field_free(field: *mut BapField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Extension degree of the field, 0 for a null handle.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bap_field_degree(field: *const BapField) -> u32 {
    field.as_ref().map_or(0, |f| f.ctx.m())
}

/// Defining polynomial of the field as a bit mask.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bap_field_poly(field: *const BapField) -> u64 {
    field.as_ref().map_or(0, |f| f.ctx.poly())
}

/// # Safety
/// `field` must be a live handle, `result` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_field_mul(field: *const BapField, a: u32, b: u32, result: *mut u32) -> BapStatus {
    guard(|| {
        let ctx = &borrow(field)?.ctx;
        let (a, b) = (ok(ctx.element(a))?, ok(ctx.element(b))?);
        *out(result)? = ctx.mul(a, b).bits();
        Ok(())
    })
}

/// # Safety
/// `field` must be a live handle, `result` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_field_inv(field: *const BapField, a: u32, result: *mut u32) -> BapStatus {
    guard(|| {
        let ctx = &borrow(field)?.ctx;
        *out(result)? = ok(ctx.inv(ok(ctx.element(a))?))?.bits();
        Ok(())
    })
}

/// Builds the pair [(c0)_{2^k}, (c1)_{2^l}] from two 4-coefficient arrays.
///
/// # Safety
/// `c0`, `c1` must point at 4 values each; `pair` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bap_pair_new(
    field: *const BapField,
    k: u32,
    l: u32,
    c0: *const u32,
    c1: *const u32,
    pair: *mut *mut BapPair,
) -> BapStatus {
    guard(|| {
        let ctx = &borrow(field)?.ctx;
        let coeffs = |p: *const u32| -> Result<[FieldElement; 4], BapStatus> {
            let s = std::slice::from_raw_parts(borrow(p)?, 4);
            Ok([ok(ctx.element(s[0]))?, ok(ctx.element(s[1]))?, ok(ctx.element(s[2]))?, ok(ctx.element(s[3]))?])
        };
        let built = ok(BiprojectivePair::new(ctx.clone(), k, l, coeffs(c0)?, coeffs(c1)?))?;
        *out(pair)? = Box::into_raw(Box::new(BapPair { pair: built }));
        Ok(())
    })
}

/// Builds a catalog instance from text such as `gold:k=1` or
/// `f4:k=1,B=0x5,a=0x1`; side conditions are validated.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `pair` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bap_pair_from_spec(field: *const BapField, spec: *const c_char, pair: *mut *mut BapPair) -> BapStatus {
    guard(|| {
        let ctx = &borrow(field)?.ctx;
        let text = CStr::from_ptr(borrow(spec)?).to_str().map_err(|_| fail(BapStatus::InvalidArgument, "spec is not UTF-8"))?;
        let inst = ok(biproj_apn::make_family(ctx, ok(FamilyParams::parse(text))?))?;
        *out(pair)? = Box::into_raw(Box::new(BapPair { pair: inst.pair }));
        Ok(())
    })
}

/// # Safety
/// `pair` must come from a `bap_pair_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn bap_pair_free(pair: *mut BapPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Evaluates the pair at (x, y).
///
/// # Safety
/// `pair` must be a live handle; `fx`, `fy` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_pair_eval(pair: *const BapPair, x: u32, y: u32, fx: *mut u32, fy: *mut u32) -> BapStatus {
    guard(|| {
        let p = &borrow(pair)?.pair;
        let v = p.evaluate(ProductElement::new(ok(p.ctx.element(x))?, ok(p.ctx.element(y))?));
        *out(fx)? = v.x.bits();
        *out(fy)? = v.y.bits();
        Ok(())
    })
}

/// APN test through the full differential table.
///
/// # Safety
/// `pair` must be a live handle; `is_apn` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_apn_naive(pair: *const BapPair, is_apn: *mut bool) -> BapStatus {
    guard(|| {
        let table = ok(to_truth_table(&borrow(pair)?.pair))?;
        *out(is_apn)? = apn_naive_verdict(&table);
        Ok(())
    })
}

/// APN test through the projective kernel criterion.
///
/// # Safety
/// `pair` must be a live handle; `is_apn` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_apn_projective(pair: *const BapPair, is_apn: *mut bool) -> BapStatus {
    guard(|| {
        *out(is_apn)? = apn_projective(&borrow(pair)?.pair);
        Ok(())
    })
}

/// Extended Walsh spectrum as parallel arrays of |W| values and their
/// multiplicities, ascending in |W|. `len` receives the number of entries;
/// BufferTooSmall is returned when it exceeds `cap`.
///
/// # Safety
/// `values` and `counts` must be valid for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn bap_walsh_spectrum(
    pair: *const BapPair,
    values: *mut u64,
    counts: *mut u64,
    cap: usize,
    len: *mut usize,
    classical: *mut bool,
) -> BapStatus {
    guard(|| {
        let table = ok(to_truth_table(&borrow(pair)?.pair))?;
        let spec = ok(extended_walsh_spectrum(&table))?;
        *out(len)? = spec.values.len();
        if !classical.is_null() {
            *classical = is_classical(&spec);
        }
        if spec.values.len() > cap {
            return Err(fail(BapStatus::BufferTooSmall, format!("need {} entries", spec.values.len())));
        }
        if cap > 0 && (values.is_null() || counts.is_null()) {
            return Err(fail(BapStatus::NullPointer, "null output array"));
        }
        for (i, (&v, &c)) in spec.values.iter().enumerate() {
            *values.add(i) = v;
            *counts.add(i) = c;
        }
        Ok(())
    })
}

/// Searches for a restricted equivalence between two pairs over the same
/// field. `equivalent` is set to whether a witness was found.
///
/// # Safety
/// Both handles must be live; `equivalent` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_equivalent(first: *const BapPair, second: *const BapPair, equivalent: *mut bool) -> BapStatus {
    guard(|| {
        let res = ok(search_equivalence(&borrow(first)?.pair, &borrow(second)?.pair))?;
        *out(equivalent)? = matches!(res, RestrictedOutcome::Equivalent(_));
        Ok(())
    })
}

/// Number of (p1, p2, p3, p4) with p1 != 0 whose form of exponent 2^k has
/// no projective root.
///
/// # Safety
/// `field` must be a live handle; `count` valid.
#[no_mangle]
pub unsafe extern "C" fn bap_rootless_count(field: *const BapField, k: u32, count: *mut u64) -> BapStatus {
    guard(|| {
        let ctx = &borrow(field)?.ctx;
        if k == 0 || k >= ctx.m() {
            return Err(fail(BapStatus::InvalidArgument, format!("k = {k} out of range")));
        }
        *out(count)? = rootless_count(ctx, k);
        Ok(())
    })
}
