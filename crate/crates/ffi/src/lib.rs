//! C ABI over `fairdiv`.
//!
//! Instances and allocations cross the boundary as opaque handles created by
//! `fairdiv_*_new` / `fairdiv_allocate` and released with the matching
//! `*_free`. Every fallible call returns a [`FairdivStatus`]; on failure a
//! message for the calling thread is available from [`fairdiv_last_error`].
//! Panics never unwind into C: they are caught and reported as
//! `FAIRDIV_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use fairdiv::mms::{complete_leftovers, mms_exact};
use fairdiv::{
    allocate_leximin, allocate_maxsum, allocate_mms34, allocate_propm, check_propm, utilities,
    Allocation, Instance,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairdivStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OutOfRange = 3,
    /// The exact MMS oracle refuses instances this large.
    TooLarge = 4,
    Solver = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairdivAlgorithm {
    Maxsum = 0,
    Leximin = 1,
    Propm = 2,
    /// 3/4-MMS allocation before leftover completion.
    Mms34 = 3,
}

/// Opaque valuation matrix.
pub struct FairdivInstance(Instance);

/// Opaque allocation.
pub struct FairdivAllocation(Allocation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: FairdivStatus, msg: impl Into<String>) -> FairdivStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FairdivStatus) -> FairdivStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(FairdivStatus::Panic, msg)
        }
    }
}

/// Message describing the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fairdiv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fairdiv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build an instance from a row-major `n_agents x n_items` matrix.
///
/// # Safety
/// `values` must point to `n_agents * n_items` doubles (it may be NULL when
/// that product is 0) and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_instance_new(
    n_agents: usize,
    n_items: usize,
    values: *const f64,
    out: *mut *mut FairdivInstance,
) -> FairdivStatus {
    guard(|| {
        if out.is_null() {
            return fail(FairdivStatus::NullPointer, "out is NULL");
        }
        let Some(len) = n_agents.checked_mul(n_items) else {
            return fail(FairdivStatus::InvalidInput, "matrix size overflows");
        };
        if values.is_null() && len > 0 {
            return fail(FairdivStatus::NullPointer, "values is NULL");
        }
        let flat = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(values, len)
        };
        let rows = (0..n_agents)
            .map(|i| flat[i * n_items..(i + 1) * n_items].to_vec())
            .collect();
        match Instance::from_matrix("ffi", rows) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(FairdivInstance(inst)));
                FairdivStatus::Ok
            }
            Err(e) => fail(FairdivStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must be NULL or a handle from [`fairdiv_instance_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_instance_free(inst: *mut FairdivInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_instance_n_agents(inst: *const FairdivInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n_agents())
}

/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_instance_n_items(inst: *const FairdivInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n_items())
}

/// Run `algorithm` on `inst`.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_allocate(
    inst: *const FairdivInstance,
    algorithm: FairdivAlgorithm,
    out: *mut *mut FairdivAllocation,
) -> FairdivStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(FairdivStatus::NullPointer, "inst or out is NULL");
        };
        let alloc = match algorithm {
            FairdivAlgorithm::Maxsum => allocate_maxsum(&inst.0),
            FairdivAlgorithm::Leximin => match allocate_leximin(&inst.0) {
                Ok(a) => a,
                Err(e) => return fail(FairdivStatus::Solver, e.to_string()),
            },
            FairdivAlgorithm::Propm => allocate_propm(&inst.0),
            FairdivAlgorithm::Mms34 => allocate_mms34(&inst.0).0,
        };
        *out = Box::into_raw(Box::new(FairdivAllocation(alloc)));
        FairdivStatus::Ok
    })
}

/// Hand out the items `partial` left unallocated, starting from the last agent.
///
/// # Safety
/// `inst` and `partial` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_complete_leftovers(
    inst: *const FairdivInstance,
    partial: *const FairdivAllocation,
    out: *mut *mut FairdivAllocation,
) -> FairdivStatus {
    guard(|| {
        let (Some(inst), Some(partial), false) = (inst.as_ref(), partial.as_ref(), out.is_null())
        else {
            return fail(FairdivStatus::NullPointer, "inst, partial or out is NULL");
        };
        match complete_leftovers(&inst.0, &partial.0) {
            Ok(a) => {
                *out = Box::into_raw(Box::new(FairdivAllocation(a)));
                FairdivStatus::Ok
            }
            Err(e) => fail(FairdivStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `alloc` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_allocation_free(alloc: *mut FairdivAllocation) {
    if !alloc.is_null() {
        drop(Box::from_raw(alloc));
    }
}

/// Fraction of `item` held by `agent`.
///
/// # Safety
/// `alloc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_allocation_share(
    alloc: *const FairdivAllocation,
    agent: usize,
    item: usize,
    out: *mut f64,
) -> FairdivStatus {
    guard(|| {
        let (Some(alloc), false) = (alloc.as_ref(), out.is_null()) else {
            return fail(FairdivStatus::NullPointer, "alloc or out is NULL");
        };
        if agent >= alloc.0.n_agents() || item >= alloc.0.n_items() {
            return fail(
                FairdivStatus::OutOfRange,
                format!(
                    "({agent},{item}) outside {}x{}",
                    alloc.0.n_agents(),
                    alloc.0.n_items()
                ),
            );
        }
        *out = alloc.0.share(agent, item);
        FairdivStatus::Ok
    })
}

/// Owner of `item`, or -1 when it is unallocated or split.
///
/// # Safety
/// `alloc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_allocation_owner(
    alloc: *const FairdivAllocation,
    item: usize,
    out: *mut i64,
) -> FairdivStatus {
    guard(|| {
        let (Some(alloc), false) = (alloc.as_ref(), out.is_null()) else {
            return fail(FairdivStatus::NullPointer, "alloc or out is NULL");
        };
        if item >= alloc.0.n_items() {
            return fail(
                FairdivStatus::OutOfRange,
                format!("item {item} out of range"),
            );
        }
        *out = alloc.0.owner(item).map_or(-1, |a| a as i64);
        FairdivStatus::Ok
    })
}

/// Write each agent's utility into `out[0..len]`; `len` must equal the number
/// of agents.
///
/// # Safety
/// Both handles must be live and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_utilities(
    inst: *const FairdivInstance,
    alloc: *const FairdivAllocation,
    out: *mut f64,
    len: usize,
) -> FairdivStatus {
    guard(|| {
        let (Some(inst), Some(alloc), false) = (inst.as_ref(), alloc.as_ref(), out.is_null())
        else {
            return fail(FairdivStatus::NullPointer, "inst, alloc or out is NULL");
        };
        if len != inst.0.n_agents() {
            return fail(
                FairdivStatus::OutOfRange,
                format!("len {len} != {} agents", inst.0.n_agents()),
            );
        }
        match utilities(&inst.0, &alloc.0) {
            Ok(u) => {
                std::slice::from_raw_parts_mut(out, len).copy_from_slice(u.values());
                FairdivStatus::Ok
            }
            Err(e) => fail(FairdivStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Exact maximin share of `agent`.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_mms_exact(
    inst: *const FairdivInstance,
    agent: usize,
    out: *mut f64,
) -> FairdivStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), out.is_null()) else {
            return fail(FairdivStatus::NullPointer, "inst or out is NULL");
        };
        match mms_exact(&inst.0, agent) {
            Ok(v) => {
                *out = v.value;
                FairdivStatus::Ok
            }
            Err(e @ fairdiv::MmsError::TooLarge { .. }) => {
                fail(FairdivStatus::TooLarge, e.to_string())
            }
            Err(e @ fairdiv::MmsError::InvalidAgent { .. }) => {
                fail(FairdivStatus::OutOfRange, e.to_string())
            }
            Err(e) => fail(FairdivStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Whether `alloc` is PROPm for `inst`; it must be complete and integral.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fairdiv_check_propm(
    inst: *const FairdivInstance,
    alloc: *const FairdivAllocation,
    out: *mut bool,
) -> FairdivStatus {
    guard(|| {
        let (Some(inst), Some(alloc), false) = (inst.as_ref(), alloc.as_ref(), out.is_null())
        else {
            return fail(FairdivStatus::NullPointer, "inst, alloc or out is NULL");
        };
        match check_propm(&inst.0, &alloc.0) {
            Ok(cert) => {
                *out = cert.is_valid();
                FairdivStatus::Ok
            }
            Err(e) => fail(FairdivStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Convenience for C callers printing statuses.
#[no_mangle]
pub extern "C" fn fairdiv_status_name(status: FairdivStatus) -> *const c_char {
    let s: &CStr = match status {
        FairdivStatus::Ok => c"ok",
        FairdivStatus::NullPointer => c"null pointer",
        FairdivStatus::InvalidInput => c"invalid input",
        FairdivStatus::OutOfRange => c"out of range",
        FairdivStatus::TooLarge => c"too large",
        FairdivStatus::Solver => c"solver failure",
        FairdivStatus::Panic => c"panic",
    };
    s.as_ptr()
}
