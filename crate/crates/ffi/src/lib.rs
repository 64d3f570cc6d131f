//! C ABI over `pa_seed`.
//!
//! Every function returns a [`PaStatus`]; results go through out-pointers.
//! Objects are opaque handles released with their `_free` function, and
//! strings returned by the library are released with [`pa_string_free`].
//! After a non-OK status, [`pa_last_error`] describes the failure on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pa_seed::moments::exact_expectation;
use pa_seed::observables::count_F;
use pa_seed::rng::master_rng;
use pa_seed::seedtest::{distinguish, is_blind, tv_lower_bound};
use pa_seed::trees::{DecoratedTree, Tree};
use pa_seed::{AlphaParam, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    Precondition = 4,
    Parse = 5,
    Panic = 6,
}

/// Opaque unrooted tree.
pub struct PaTree(Tree);

/// Opaque decorated pattern tree.
pub struct PaDecoratedTree(DecoratedTree);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PaStatus {
    match e {
        Error::Parse(_) => PaStatus::Parse,
        Error::InvalidInput(_) => PaStatus::InvalidArgument,
        Error::CapExceeded { .. } => PaStatus::CapExceeded,
        Error::Precondition(_) => PaStatus::Precondition,
    }
}

struct Fail(PaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null() -> Fail {
    Fail(PaStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PaStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

fn alpha(num: u64, den: u64) -> Result<AlphaParam, Fail> {
    Ok(AlphaParam::new(num, den)?)
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(std::ptr::null_mut(), CString::into_raw)
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(PaStatus::Parse, "string is not valid UTF-8".into()))
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a tree on `n` vertices from `n - 1` edges stored as consecutive
/// pairs in `edges`.
///
/// # Safety
/// `edges` must point to `2 * (n - 1)` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_tree_from_edges(n: usize, edges: *const usize, out: *mut *mut PaTree) -> PaStatus {
    guard(|| {
        let pairs: Vec<(usize, usize)> = if n > 1 {
            if edges.is_null() {
                return Err(null());
            }
            std::slice::from_raw_parts(edges, 2 * (n - 1)).chunks(2).map(|c| (c[0], c[1])).collect()
        } else {
            Vec::new()
        };
        let tree = Tree::from_edges(n, &pairs)?;
        put(out, Box::into_raw(Box::new(PaTree(tree))))
    })
}

/// Parses the plain-text tree format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_tree_parse(text: *const c_char, out: *mut *mut PaTree) -> PaStatus {
    guard(|| {
        let tree = Tree::parse(str_arg(text)?)?;
        put(out, Box::into_raw(Box::new(PaTree(tree))))
    })
}

/// # Safety
/// `tree` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pa_tree_free(tree: *mut PaTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_tree_vertex_count(tree: *const PaTree, out: *mut usize) -> PaStatus {
    guard(|| put(out, deref(tree)?.0.vertex_count()))
}

/// Writes the tree's text form; release it with [`pa_string_free`].
///
/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_tree_to_text(tree: *const PaTree, out: *mut *mut c_char) -> PaStatus {
    guard(|| put(out, c_string(deref(tree)?.0.to_text())))
}

/// Grows an α-PA tree with `α = alpha_num / alpha_den` from `seed` to
/// `n` vertices.
///
/// # Safety
/// `seed` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_grow_abstract(
    seed: *const PaTree,
    alpha_num: u64,
    alpha_den: u64,
    n: usize,
    rng_seed: u64,
    out: *mut *mut PaTree,
) -> PaStatus {
    guard(|| {
        let mut rng = master_rng(rng_seed);
        let tree = pa_seed::growth::grow_abstract(&deref(seed)?.0, alpha(alpha_num, alpha_den)?, n, &mut rng)?;
        put(out, Box::into_raw(Box::new(PaTree(tree))))
    })
}

/// Decorates a copy of `tree` with `ell[0..len]`.
///
/// # Safety
/// `tree` must be a live handle, `ell` must point to `len` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_decorated_new(
    tree: *const PaTree,
    ell: *const u32,
    len: usize,
    out: *mut *mut PaDecoratedTree,
) -> PaStatus {
    guard(|| {
        let tree = deref(tree)?.0.clone();
        let ell = if len == 0 {
            Vec::new()
        } else {
            if ell.is_null() {
                return Err(null());
            }
            std::slice::from_raw_parts(ell, len).to_vec()
        };
        let d = DecoratedTree::new(tree, ell)?;
        put(out, Box::into_raw(Box::new(PaDecoratedTree(d))))
    })
}

/// # Safety
/// `tau` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pa_decorated_free(tau: *mut PaDecoratedTree) {
    if !tau.is_null() {
        drop(Box::from_raw(tau));
    }
}

/// `F_τ(tree)` as a decimal string.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_count_f(tau: *const PaDecoratedTree, tree: *const PaTree, out: *mut *mut c_char) -> PaStatus {
    guard(|| put(out, c_string(count_F(&deref(tau)?.0, &deref(tree)?.0).to_string())))
}

/// Exact `E[F_τ(T_n)]` grown from `seed`, as a reduced fraction of decimal
/// strings.
///
/// # Safety
/// Handles must be live; `out_num` and `out_den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_exact_expectation(
    tau: *const PaDecoratedTree,
    seed: *const PaTree,
    alpha_num: u64,
    alpha_den: u64,
    n: usize,
    out_num: *mut *mut c_char,
    out_den: *mut *mut c_char,
) -> PaStatus {
    guard(|| {
        if out_num.is_null() || out_den.is_null() {
            return Err(null());
        }
        let v = exact_expectation(&deref(tau)?.0, &deref(seed)?.0, alpha(alpha_num, alpha_den)?, n)?;
        put(out_num, c_string(v.numer().to_string()))?;
        put(out_den, c_string(v.denom().to_string()))
    })
}

/// Total-variation lower bound from two means and second moments.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_tv_lower_bound(mean1: f64, mean2: f64, m2_1: f64, m2_2: f64, out: *mut f64) -> PaStatus {
    guard(|| put(out, tv_lower_bound(mean1, mean2, m2_1, m2_2)?))
}

/// Whether `tau` is blind for two equal-size seeds.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_is_blind(
    tau: *const PaTree,
    seed1: *const PaTree,
    seed2: *const PaTree,
    out: *mut bool,
) -> PaStatus {
    guard(|| put(out, is_blind(&deref(tau)?.0, &deref(seed1)?.0, &deref(seed2)?.0)?.is_blind))
}

/// Runs the distinguishing pipeline and returns its JSON report.
///
/// # Safety
/// Handles must be live, `n_list` must point to `n_len` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_distinguish_json(
    seed1: *const PaTree,
    seed2: *const PaTree,
    alpha_num: u64,
    alpha_den: u64,
    n_list: *const usize,
    n_len: usize,
    replicates: usize,
    rng_seed: u64,
    out: *mut *mut c_char,
) -> PaStatus {
    guard(|| {
        if n_list.is_null() && n_len > 0 {
            return Err(null());
        }
        let ns = if n_len == 0 { &[][..] } else { std::slice::from_raw_parts(n_list, n_len) };
        let report = distinguish(&deref(seed1)?.0, &deref(seed2)?.0, alpha(alpha_num, alpha_den)?, ns, replicates, rng_seed)?;
        put(out, c_string(report.to_json()))
    })
}
