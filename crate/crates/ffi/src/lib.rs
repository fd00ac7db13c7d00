//! C interface to the `nebulae` library.
//!
//! Tournaments cross the boundary as opaque `NebulaeTournament` handles that
//! must be released with [`nebulae_tournament_free`]. Every fallible call
//! returns a [`NebulaeStatus`]; after a failure, [`nebulae_last_error`]
//! describes it. Results are written through out-pointers.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nebulae::stars::{find_ordering, find_ordering_with_limit, OrderingKind};
use nebulae::{Error, Tournament};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NebulaeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    BudgetExceeded = 4,
    Invariant = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NebulaeOrderingKind {
    Nebula = 0,
    Left = 1,
    Right = 2,
    Central = 3,
    Galaxy = 4,
}

impl From<NebulaeOrderingKind> for OrderingKind {
    fn from(k: NebulaeOrderingKind) -> Self {
        match k {
            NebulaeOrderingKind::Nebula => OrderingKind::Nebula,
            NebulaeOrderingKind::Left => OrderingKind::Left,
            NebulaeOrderingKind::Right => OrderingKind::Right,
            NebulaeOrderingKind::Central => OrderingKind::Central,
            NebulaeOrderingKind::Galaxy => OrderingKind::Galaxy,
        }
    }
}

/// Opaque tournament handle.
pub struct NebulaeTournament(Tournament);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NebulaeStatus {
    match e {
        Error::Parse { .. } => NebulaeStatus::Parse,
        Error::BudgetExceeded { .. } => NebulaeStatus::BudgetExceeded,
        Error::Invariant(_) => NebulaeStatus::Invariant,
        Error::InvalidInput(_) | Error::VertexOutOfRange { .. } => NebulaeStatus::InvalidInput,
    }
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (NebulaeStatus, String)>) -> NebulaeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NebulaeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NebulaeStatus::Panic
        }
    }
}

fn lib(e: Error) -> (NebulaeStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NebulaeStatus, String) {
    (NebulaeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a>(
    t: *const NebulaeTournament,
    what: &str,
) -> Result<&'a Tournament, (NebulaeStatus, String)> {
    t.as_ref().map(|h| &h.0).ok_or_else(|| null(what))
}

fn boxed(t: Tournament) -> *mut NebulaeTournament {
    Box::into_raw(Box::new(NebulaeTournament(t)))
}

/// Message describing the last failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nebulae_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a tournament file (`tournament matrix n` or `tournament backward n`).
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_parse(
    text: *const c_char,
    out: *mut *mut NebulaeTournament,
) -> NebulaeStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (NebulaeStatus::InvalidInput, "text is not UTF-8".to_string()))?;
        let f = nebulae::io::parse(s).map_err(lib)?;
        *out = boxed(f.tournament);
        Ok(())
    })
}

/// Builds a tournament from an `n * n` row-major matrix where entry
/// `u * n + v` is 1 when `u` beats `v`.
///
/// # Safety
/// `matrix` must point to `n * n` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_from_matrix(
    n: usize,
    matrix: *const u8,
    out: *mut *mut NebulaeTournament,
) -> NebulaeStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if matrix.is_null() && n > 0 {
            return Err(null("matrix"));
        }
        let cells = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(matrix, n * n)
        };
        let rows: Vec<Vec<bool>> = cells
            .chunks(n.max(1))
            .map(|r| r.iter().map(|&x| x != 0).collect())
            .collect();
        *out = boxed(Tournament::from_matrix(&rows).map_err(lib)?);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `t` must be null or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_free(t: *mut NebulaeTournament) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_order(t: *const NebulaeTournament) -> usize {
    t.as_ref().map_or(0, |h| h.0.order())
}

/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_beats(
    t: *const NebulaeTournament,
    u: usize,
    v: usize,
    out: *mut bool,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let n = t.order();
        if u >= n || v >= n || u == v {
            return Err((
                NebulaeStatus::InvalidInput,
                format!("need distinct vertices below {n}"),
            ));
        }
        *out = t.beats(u, v);
        Ok(())
    })
}

/// Reverses every edge into a new handle.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_complement(
    t: *const NebulaeTournament,
    out: *mut *mut NebulaeTournament,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = boxed(t.complement());
        Ok(())
    })
}

/// Matrix-format text of a tournament; release with [`nebulae_string_free`].
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_tournament_to_text(
    t: *const NebulaeTournament,
    out: *mut *mut c_char,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = CString::new(nebulae::io::write_matrix(t))
            .expect("no nul bytes")
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nebulae_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Size of a largest transitive subtournament (exact, within budget).
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_transitive_number(
    t: *const NebulaeTournament,
    out: *mut usize,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = nebulae::transitive_number(t).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_is_prime(
    t: *const NebulaeTournament,
    out: *mut bool,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = nebulae::is_prime(t);
        Ok(())
    })
}

/// Searches for an ordering of the given kind among tournaments of at most
/// `max_n` vertices (0 uses the configured budget). When one exists, `found`
/// is set and the ordering is written to `ordering`, which must hold
/// `order(t)` entries; `ordering` may be null if the ordering is not wanted.
///
/// # Safety
/// `t` must be a live handle, `found` valid, and `ordering` null or
/// writable for `order(t)` entries.
#[no_mangle]
pub unsafe extern "C" fn nebulae_find_ordering(
    t: *const NebulaeTournament,
    kind: NebulaeOrderingKind,
    max_n: usize,
    found: *mut bool,
    ordering: *mut usize,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let found = found.as_mut().ok_or_else(|| null("found"))?;
        let o = if max_n == 0 {
            find_ordering(t, kind.into())
        } else {
            find_ordering_with_limit(t, kind.into(), max_n)
        }
        .map_err(lib)?;
        *found = o.is_some();
        if let (Some(o), false) = (o, ordering.is_null()) {
            std::slice::from_raw_parts_mut(ordering, t.order()).copy_from_slice(o.as_slice());
        }
        Ok(())
    })
}

/// Looks for a copy of `pattern` in `host`. When one exists, `found` is set
/// and the image of pattern vertex `i` is written to `map[i]`, which must
/// hold `order(pattern)` entries or be null.
///
/// # Safety
/// Both handles must be live, `found` valid, and `map` null or writable for
/// `order(pattern)` entries.
#[no_mangle]
pub unsafe extern "C" fn nebulae_contains(
    host: *const NebulaeTournament,
    pattern: *const NebulaeTournament,
    found: *mut bool,
    map: *mut usize,
) -> NebulaeStatus {
    guard(|| {
        let t = handle(host, "host")?;
        let h = handle(pattern, "pattern")?;
        let found = found.as_mut().ok_or_else(|| null("found"))?;
        let e = nebulae::containment::contains(t, h);
        *found = e.is_some();
        if let (Some(e), false) = (e, map.is_null()) {
            std::slice::from_raw_parts_mut(map, h.order()).copy_from_slice(&e.map);
        }
        Ok(())
    })
}

/// Runs the example checklist of `nebulae verify-paper-examples`; `passed`
/// is set when every check holds.
///
/// # Safety
/// `passed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nebulae_verify_examples(passed: *mut bool) -> NebulaeStatus {
    guard(|| {
        let passed = passed.as_mut().ok_or_else(|| null("passed"))?;
        let run = nebulae::cli::execute(["nebulae", "verify-paper-examples"]);
        *passed = run.code == 0;
        if !*passed {
            set_error(run.stderr);
        }
        Ok(())
    })
}
