//! C interface. Every fallible call returns an `LbStatus`; the message of the
//! last failure on the calling thread is available from `lb_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use loopblocks::blocks::{blocks, BlockStructure};
use loopblocks::caps::Caps;
use loopblocks::double::QuantumDouble;
use loopblocks::gauge::{gsd, tee_minimal};
use loopblocks::group::parse_group;
use loopblocks::topology::{parse_cut, validate, SurfaceKind};
use loopblocks::{CharacterTable, FiniteGroup, LoopError};
use num_bigint::BigUint;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidGroup = 3,
    InvalidCut = 4,
    InvalidInput = 5,
    CapExceeded = 6,
    Numerical = 7,
    Consistency = 8,
    OutOfRange = 9,
    Panic = 10,
}

impl From<&LoopError> for LbStatus {
    fn from(e: &LoopError) -> Self {
        match e {
            LoopError::InvalidGroup(_) => LbStatus::InvalidGroup,
            LoopError::InvalidCut(_) | LoopError::InvalidPresentation(_) => LbStatus::InvalidCut,
            LoopError::CapExceeded { .. } => LbStatus::CapExceeded,
            LoopError::Numerical(_) => LbStatus::Numerical,
            LoopError::Consistency(_) => LbStatus::Consistency,
            _ => LbStatus::InvalidInput,
        }
    }
}

/// Topological shape of one block: `copies` blocks of size `rows × cols`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LbBlockShape {
    pub copies: u64,
    pub rows: u64,
    pub cols: u64,
}

/// Opaque handle to a finite group and its character table.
pub struct LbGroup {
    group: FiniteGroup,
    table: CharacterTable,
    double: Option<QuantumDouble>,
}

/// Opaque handle to a computed block structure.
pub struct LbBlocks {
    inner: BlockStructure,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LbStatus, msg: impl Into<String>) -> LbStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), LbStatus>) -> LbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(LbStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: loopblocks::Result<T>) -> Result<T, LbStatus> {
    r.map_err(|e| fail(LbStatus::from(&e), e.to_string()))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LbStatus> {
    if s.is_null() {
        return Err(fail(LbStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(LbStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), LbStatus> {
    if p.is_null() {
        Err(fail(LbStatus::NullPointer, format!("null {what}")))
    } else {
        Ok(())
    }
}

fn to_u64(v: BigUint, what: &str) -> Result<u64, LbStatus> {
    u64::try_from(v).map_err(|_| fail(LbStatus::OutOfRange, format!("{what} does not fit in 64 bits")))
}

/// Message for the last failure on this thread, or NULL. Free with `lb_string_free`.
#[no_mangle]
pub extern "C" fn lb_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a group from a name such as "D6", "Q8" or "Z2xA4".
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lb_group_new(name: *const c_char, out: *mut *mut LbGroup) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let name = read_str(name)?;
        let group = lift(parse_group(name))?;
        let table = lift(CharacterTable::new(&group))?;
        *out = Box::into_raw(Box::new(LbGroup {
            group,
            table,
            double: None,
        }));
        Ok(())
    })
}

/// # Safety
/// `g` must come from `lb_group_new` and not have been freed, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn lb_group_free(g: *mut LbGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Group order, or 0 for NULL.
///
/// # Safety
/// `g` must be a live group handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lb_group_order(g: *const LbGroup) -> usize {
    g.as_ref().map_or(0, |g| g.group.order())
}

/// Number of conjugacy classes (equal to the number of irreps), or 0 for NULL.
///
/// # Safety
/// `g` must be a live group handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lb_group_num_classes(g: *const LbGroup) -> usize {
    g.as_ref().map_or(0, |g| g.group.num_classes())
}

/// Character table as JSON. Free the result with `lb_string_free`.
///
/// # Safety
/// `g` must be a live group handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lb_group_character_table_json(g: *const LbGroup, out: *mut *mut c_char) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let g = g.as_ref().ok_or_else(|| fail(LbStatus::NullPointer, "null group"))?;
        let text = serde_json::to_string(&g.table.to_json(&g.group)).map_err(|e| fail(LbStatus::InvalidInput, e.to_string()))?;
        *out = CString::new(text).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// Ground-state degeneracy on "sphere", "torus", "rp2", "klein", "genus:<g>" or "crosscap:<k>".
///
/// # Safety
/// `g` must be a live group handle; `surface` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lb_gsd(g: *mut LbGroup, surface: *const c_char, out: *mut u64) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let g = g.as_mut().ok_or_else(|| fail(LbStatus::NullPointer, "null group"))?;
        let kind = lift(SurfaceKind::parse(read_str(surface)?))?;
        if g.double.is_none() {
            g.double = Some(lift(QuantumDouble::new(&g.group))?);
        }
        let n = lift(gsd(g.double.as_ref().unwrap(), kind))?;
        *out = u64::try_from(n).map_err(|_| fail(LbStatus::OutOfRange, "degeneracy does not fit in 64 bits"))?;
        Ok(())
    })
}

/// Computes the block structure for a cut such as "orient:gx=0,gy=0,n=2,s=+-".
///
/// # Safety
/// `g` must be a live group handle; `cut` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lb_blocks_new(g: *const LbGroup, cut: *const c_char, out: *mut *mut LbBlocks) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let g = g.as_ref().ok_or_else(|| fail(LbStatus::NullPointer, "null group"))?;
        let spec = lift(parse_cut(read_str(cut)?))?;
        let vc = lift(validate(spec, None))?;
        let inner = lift(blocks(&g.group, &g.table, &vc, &Caps::from_env()))?;
        *out = Box::into_raw(Box::new(LbBlocks { inner }));
        Ok(())
    })
}

/// # Safety
/// `b` must come from `lb_blocks_new` and not have been freed, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn lb_blocks_free(b: *mut LbBlocks) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of block labels, or 0 for NULL.
///
/// # Safety
/// `b` must be a live block handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn lb_blocks_len(b: *const LbBlocks) -> usize {
    b.as_ref().map_or(0, |b| b.inner.blocks.len())
}

/// Topological shape of block `index`, evaluated at the group order.
///
/// # Safety
/// `b` must be a live block handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lb_blocks_shape(b: *const LbBlocks, index: usize, out: *mut LbBlockShape) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let b = b.as_ref().ok_or_else(|| fail(LbStatus::NullPointer, "null blocks"))?;
        let blk = b
            .inner
            .blocks
            .get(index)
            .ok_or_else(|| fail(LbStatus::OutOfRange, format!("block {index} of {}", b.inner.blocks.len())))?;
        let n = b.inner.group_order;
        *out = LbBlockShape {
            copies: blk.mult.coeff,
            rows: to_u64(blk.rows.value(n), "rows")?,
            cols: to_u64(blk.cols.value(n), "cols")?,
        };
        Ok(())
    })
}

/// Sum of rows·cols·copies over the topological blocks.
///
/// # Safety
/// `b` must be a live block handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lb_blocks_total_dof(b: *const LbBlocks, out: *mut u64) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let b = b.as_ref().ok_or_else(|| fail(LbStatus::NullPointer, "null blocks"))?;
        *out = u64::try_from(b.inner.total_dof).map_err(|_| fail(LbStatus::OutOfRange, "dof does not fit in 64 bits"))?;
        Ok(())
    })
}

/// Block structure as JSON. Free the result with `lb_string_free`.
///
/// # Safety
/// `b` must be a live block handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lb_blocks_json(b: *const LbBlocks, out: *mut *mut c_char) -> LbStatus {
    guard(|| {
        non_null(out, "output pointer")?;
        let b = b.as_ref().ok_or_else(|| fail(LbStatus::NullPointer, "null blocks"))?;
        let text = serde_json::to_string(&b.inner).map_err(|e| fail(LbStatus::InvalidInput, e.to_string()))?;
        *out = CString::new(text).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// Minimal-state entanglement entropy `n ln|G| - ln(orbit_size · dim)`.
#[no_mangle]
pub extern "C" fn lb_tee_minimal(group_order: usize, boundary_points: usize, orbit_size: u64, dim: u64) -> f64 {
    tee_minimal(group_order, boundary_points, orbit_size, dim)
}
