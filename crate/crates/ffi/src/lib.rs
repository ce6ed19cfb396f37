//! C ABI over `benign-gwp`. Graphs are opaque handles; every call returns a
//! [`BgwpStatus`] and writes results through out-pointers. On failure the
//! message is available from [`bgwp_last_error`] on the same thread.
//!
//! Strings passed in are NUL-terminated UTF-8. Strings handed out are owned
//! by the caller and released with [`bgwp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use benign_gwp::brute::{brute_member_capped, DEFAULT_DEPTH_CAP};
use benign_gwp::gog::{CycleTypeWord, GraphOfGroups};
use benign_gwp::raag::{compile, SimpleGraph};
use benign_gwp::saturation::{decide, Verdict};
use benign_gwp::spec::GraphFile;

/// Result code of every `bgwp_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgwpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed or invalid spec, word, query or graph.
    InvalidInput = 3,
    /// A bug tripwire fired inside the library.
    Internal = 4,
    /// The library panicked; the handle may not be reused.
    Panic = 5,
}

/// Validated graph of groups.
pub struct BgwpGraph {
    inner: GraphOfGroups,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(BgwpStatus, String);

impl Fail {
    fn invalid(msg: impl ToString) -> Self {
        Fail(BgwpStatus::InvalidInput, msg.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BgwpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BgwpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside benign-gwp");
            BgwpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(BgwpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(BgwpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn graph<'a>(g: *const BgwpGraph) -> Result<&'a GraphOfGroups, Fail> {
    if g.is_null() {
        return Err(Fail(BgwpStatus::NullPointer, "graph is null".into()));
    }
    Ok(&(*g).inner)
}

fn out_ptr<T>(p: *mut T) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(BgwpStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn query(
    g: &GraphOfGroups,
    subgroup: *const *const c_char,
    subgroup_len: usize,
    element: *const c_char,
) -> Result<(Vec<CycleTypeWord>, CycleTypeWord), Fail> {
    if subgroup_len > 0 && subgroup.is_null() {
        return Err(Fail(BgwpStatus::NullPointer, "subgroup is null".into()));
    }
    let mut ks = Vec::with_capacity(subgroup_len);
    for i in 0..subgroup_len {
        let w = text(*subgroup.add(i), "subgroup word")?;
        ks.push(g.parse_cycle(w).map_err(|e| Fail::invalid(format!("word \"{w}\": {e}")))?);
    }
    let w = text(element, "element")?;
    let elem = g.parse_cycle(w).map_err(|e| Fail::invalid(format!("word \"{w}\": {e}")))?;
    Ok((ks, elem))
}

fn hand_out(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

/// Parses and validates a JSON spec. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bgwp_graph_from_json(json: *const c_char, out: *mut *mut BgwpGraph) -> BgwpStatus {
    guard(|| {
        out_ptr(out)?;
        *out = ptr::null_mut();
        let inner = GraphOfGroups::from_json(text(json, "json")?).map_err(Fail::invalid)?;
        *out = Box::into_raw(Box::new(BgwpGraph { inner }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `g` must come from [`bgwp_graph_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bgwp_graph_free(g: *mut BgwpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Decides whether `element` lies in the subgroup generated by
/// `subgroup[0..subgroup_len]`; writes 1 (member) or 0 to `*out_member`.
///
/// # Safety
/// Pointers must be valid; `subgroup` must hold `subgroup_len` strings.
#[no_mangle]
pub unsafe extern "C" fn bgwp_decide(
    g: *const BgwpGraph,
    subgroup: *const *const c_char,
    subgroup_len: usize,
    element: *const c_char,
    out_member: *mut i32,
) -> BgwpStatus {
    guard(|| {
        out_ptr(out_member)?;
        let g = graph(g)?;
        let (ks, elem) = query(g, subgroup, subgroup_len, element)?;
        let verdict = decide(g, &ks, &elem).map_err(|e| {
            let status = if e.is_internal() { BgwpStatus::Internal } else { BgwpStatus::InvalidInput };
            Fail(status, e.to_string())
        })?;
        *out_member = i32::from(verdict == Verdict::Member);
        Ok(())
    })
}

/// Word problem: writes 1 to `*out_trivial` iff `word` is the identity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bgwp_is_trivial(g: *const BgwpGraph, word: *const c_char, out_trivial: *mut i32) -> BgwpStatus {
    guard(|| {
        out_ptr(out_trivial)?;
        let g = graph(g)?;
        let w = g.parse_cycle(text(word, "word")?).map_err(Fail::invalid)?;
        *out_trivial = i32::from(g.is_trivial(&w).map_err(Fail::invalid)?);
        Ok(())
    })
}

/// Brute-force search up to `depth` factors. `*out_report` receives
/// `WITNESS "..."` or `NOT-FOUND-UP-TO(depth)`.
///
/// # Safety
/// Pointers must be valid; `subgroup` must hold `subgroup_len` strings.
#[no_mangle]
pub unsafe extern "C" fn bgwp_brute_member(
    g: *const BgwpGraph,
    subgroup: *const *const c_char,
    subgroup_len: usize,
    element: *const c_char,
    depth: usize,
    out_report: *mut *mut c_char,
) -> BgwpStatus {
    guard(|| {
        out_ptr(out_report)?;
        *out_report = ptr::null_mut();
        let g = graph(g)?;
        let (ks, elem) = query(g, subgroup, subgroup_len, element)?;
        let r = brute_member_capped(g, &ks, &elem, depth, DEFAULT_DEPTH_CAP).map_err(Fail::invalid)?;
        *out_report = hand_out(r.render(g, &ks));
        Ok(())
    })
}

/// Compiles a chordal defining graph (JSON) into a spec (JSON) with its
/// translation table.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bgwp_compile_raag(graph_json: *const c_char, out_spec_json: *mut *mut c_char) -> BgwpStatus {
    guard(|| {
        out_ptr(out_spec_json)?;
        *out_spec_json = ptr::null_mut();
        let file = GraphFile::from_json(text(graph_json, "graph_json")?)
            .map_err(|e| Fail::invalid(format!("malformed graph: {e}")))?;
        let compiled = SimpleGraph::from_file(&file).and_then(|g| compile(&g)).map_err(Fail::invalid)?;
        *out_spec_json = hand_out(compiled.spec.to_json_pretty());
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bgwp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread ("" after a success).
/// Valid until the next `bgwp_*` call on the same thread.
#[no_mangle]
pub extern "C" fn bgwp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
