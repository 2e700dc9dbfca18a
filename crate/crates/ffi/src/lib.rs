//! C ABI over `towerdigits`.
//!
//! Towers are opaque `TdTower` handles created with [`td_tower_new`] and
//! released with [`td_tower_free`]. Every fallible call returns a
//! [`TdStatus`]; on failure [`td_last_error`] describes what went wrong on the
//! calling thread. Residues are written as zero-padded decimal strings into
//! caller-owned buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use towerdigits::conjecture::{predict, predict_small_x, CaseTag, Variant};
use towerdigits::tower::{format_residue, min_stable_height, stable_residue, tet_mod, TowerBase, TowerSpec};
use towerdigits::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStatus {
    Ok = 0,
    NullPointer = 1,
    /// Base is a multiple of 10.
    ExcludedBase = 2,
    InvalidArgument = 3,
    DigitsOutOfRange = 4,
    /// The output buffer cannot hold the digits plus the terminating NUL.
    BufferTooSmall = 5,
    NotApplicable = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdCaseTag {
    Mod10_19 = 0,
    Mod10_37 = 1,
    Mod10_5 = 2,
    Even = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdVariant {
    AsWritten = 0,
    ExampleConsistent = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TdPrediction {
    pub u: u64,
    pub case_tag: TdCaseTag,
    pub clamped: bool,
    /// Set for `q = 1`, whose row the source leaves blank.
    pub convention: bool,
}

/// Opaque tower base `q^(2^x * 5^y * a)`.
pub struct TdTower {
    base: TowerBase,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> TdStatus {
    match e {
        Error::ExcludedBase(_) => TdStatus::ExcludedBase,
        Error::DigitsOutOfRange { .. } => TdStatus::DigitsOutOfRange,
        _ => TdStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), TdStatus>) -> TdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TdStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            TdStatus::Panic
        }
    }
}

fn fail(e: Error) -> TdStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn null(what: &str) -> TdStatus {
    set_error(format!("{what} is null"));
    TdStatus::NullPointer
}

/// Copies `s` plus a NUL into `buf`. `written`, when non-null, receives the
/// digit count, or the required buffer size on `BufferTooSmall`.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, written: *mut usize) -> Result<(), TdStatus> {
    let needed = s.len() + 1;
    if buf.is_null() || len < needed {
        if !written.is_null() {
            *written = needed;
        }
        set_error(format!("buffer holds {len} bytes, {needed} needed"));
        return Err(TdStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(s.as_ptr().cast::<c_char>(), buf, s.len());
    *buf.add(s.len()) = 0;
    if !written.is_null() {
        *written = s.len();
    }
    Ok(())
}

/// Creates a tower handle. Release it with `td_tower_free`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn td_tower_new(q: u64, x: u32, y: u32, a: u64, out: *mut *mut TdTower) -> TdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let base = TowerBase::new(q, x, y, a).map_err(fail)?;
        *out = Box::into_raw(Box::new(TdTower { base }));
        Ok(())
    })
}

/// # Safety
/// `tower` must come from `td_tower_new` and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn td_tower_free(tower: *mut TdTower) {
    if !tower.is_null() {
        drop(Box::from_raw(tower));
    }
}

/// Last `n` digits of the height-`height` tower.
///
/// # Safety
/// `tower` must be a live handle; `buf` must point to `len` writable bytes;
/// `written` may be null.
#[no_mangle]
pub unsafe extern "C" fn td_tower_residue(
    tower: *const TdTower,
    height: u64,
    n: u32,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> TdStatus {
    guard(|| {
        let t = tower.as_ref().ok_or_else(|| null("tower"))?;
        let r = tet_mod(&TowerSpec { base: t.base, height }, n).map_err(fail)?;
        write_str(&format_residue(&r, n), buf, len, written)
    })
}

/// Last `n` digits of the infinitely tall tower.
///
/// # Safety
/// Same contract as `td_tower_residue`.
#[no_mangle]
pub unsafe extern "C" fn td_tower_stable_residue(
    tower: *const TdTower,
    n: u32,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> TdStatus {
    guard(|| {
        let t = tower.as_ref().ok_or_else(|| null("tower"))?;
        let r = stable_residue(&t.base, n).map_err(fail)?;
        write_str(&format_residue(&r, n), buf, len, written)
    })
}

/// Smallest height from which the last `n` digits never change.
///
/// # Safety
/// `tower` must be a live handle and `out_u` writable.
#[no_mangle]
pub unsafe extern "C" fn td_tower_min_height(tower: *const TdTower, n: u32, out_u: *mut u64) -> TdStatus {
    guard(|| {
        let t = tower.as_ref().ok_or_else(|| null("tower"))?;
        if out_u.is_null() {
            return Err(null("out_u"));
        }
        *out_u = min_stable_height(&t.base, n).map_err(fail)?.u_min;
        Ok(())
    })
}

/// Conjectured minimum height. `x < 2` uses the tabulated rows and needs
/// `y = 0`; inputs no formula covers give `NotApplicable`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn td_predict(
    q: u64,
    x: u32,
    y: u32,
    n: u32,
    variant: TdVariant,
    out: *mut TdPrediction,
) -> TdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let variant = match variant {
            TdVariant::AsWritten => Variant::AsWritten,
            TdVariant::ExampleConsistent => Variant::ExampleConsistent,
        };
        let p = if x >= 2 {
            predict(q, x, y, n, variant)
        } else if y == 0 {
            predict_small_x(q, x, n)
        } else {
            set_error(format!("no formula covers x = {x} with y = {y}"));
            return Err(TdStatus::NotApplicable);
        }
        .map_err(fail)?;
        if !p.applicable {
            set_error(format!("no formula or table row covers q = {q}, x = {x}"));
            return Err(TdStatus::NotApplicable);
        }
        *out = TdPrediction {
            u: p.u,
            case_tag: match p.case_tag {
                CaseTag::Mod10_19 => TdCaseTag::Mod10_19,
                CaseTag::Mod10_37 => TdCaseTag::Mod10_37,
                CaseTag::Mod10_5 => TdCaseTag::Mod10_5,
                CaseTag::Even => TdCaseTag::Even,
            },
            clamped: p.clamped,
            convention: p.convention,
        };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn td_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
