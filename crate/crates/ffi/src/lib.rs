//! C interface. Policies and enforcer sessions are opaque handles; every
//! call returns `PE_OK` or a negative error code, with the message
//! available from `pe_last_error`.
//!
//! Strings are UTF-8 and NUL-terminated. Functions that produce text write
//! into a caller buffer and report the size needed, terminator included.

use std::cell::RefCell;
use std::ffi::CStr;
use std::mem::ManuallyDrop;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use libc::{c_char, size_t};
use partial_enforce::classifier::{
    is_enforceable_eq, is_enforceable_eq_nonuniform, is_enforceable_insert,
    is_enforceable_suppress, is_liveness, is_renewal, is_safety, Bounds, EquivalenceKind, Verdict,
};
use partial_enforce::enforcer::{EnforcerSession, Strategy};
use partial_enforce::policy::{load_policy, parse_policy, Class, Policy};
use partial_enforce::trace::Action;
use partial_enforce::Error;

pub const PE_OK: i32 = 0;
pub const PE_ERR_NULL: i32 = -1;
pub const PE_ERR_UTF8: i32 = -2;
pub const PE_ERR_PARSE: i32 = -3;
pub const PE_ERR_ARGUMENT: i32 = -4;
pub const PE_ERR_INCOMPATIBLE: i32 = -5;
pub const PE_ERR_NOT_REASONABLE: i32 = -6;
pub const PE_ERR_COMPLIANCE: i32 = -7;
pub const PE_ERR_BUDGET: i32 = -8;
pub const PE_ERR_BUFFER: i32 = -9;
pub const PE_ERR_PANIC: i32 = -10;

pub const PE_CLASS_O: u32 = 0;
pub const PE_CLASS_I: u32 = 1;
pub const PE_CLASS_D: u32 = 2;
pub const PE_CLASS_C: u32 = 3;

pub const PE_EQ_SYNTACTIC: u32 = 0;
pub const PE_EQ_INSERT: u32 = 1;
pub const PE_EQ_SUPPRESS: u32 = 2;

pub const PE_STRATEGY_EDIT: u32 = 0;
pub const PE_STRATEGY_TRUNCATE: u32 = 1;
pub const PE_STRATEGY_INSERT: u32 = 2;
pub const PE_STRATEGY_SUPPRESS: u32 = 3;

pub const PE_PROPERTY_SAFETY: u32 = 0;
pub const PE_PROPERTY_LIVENESS: u32 = 1;
pub const PE_PROPERTY_RENEWAL: u32 = 2;

/// Verdict values.
pub const PE_FALSE: i32 = 0;
pub const PE_TRUE: i32 = 1;
pub const PE_UNDECIDED: i32 = -1;

/// A parsed policy.
pub struct PePolicy {
    policy: Policy,
}

/// A running enforcer. Keeps its own copy of the policy.
pub struct PeSession {
    inner: ManuallyDrop<EnforcerSession<'static>>,
    policy: *mut Policy,
}

impl PeSession {
    fn open(policy: &Policy, strategy: Strategy, eq: EquivalenceKind, stationary: bool) -> Result<Self, Error> {
        let owned: *mut Policy = Box::into_raw(Box::new(policy.clone()));
        // SAFETY: `owned` lives until Drop, after the session is gone
        let borrowed: &'static Policy = unsafe { &*owned };
        match EnforcerSession::with_mode(borrowed, strategy, eq, stationary) {
            Ok(s) => Ok(PeSession {
                inner: ManuallyDrop::new(s),
                policy: owned,
            }),
            Err(e) => {
                drop(unsafe { Box::from_raw(owned) });
                Err(e)
            }
        }
    }
}

impl Drop for PeSession {
    fn drop(&mut self) {
        unsafe {
            ManuallyDrop::drop(&mut self.inner);
            drop(Box::from_raw(self.policy));
        }
    }
}

/// Enumeration bounds: finite length, lasso stem, lasso loop.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PeBounds {
    pub max_finite_len: size_t,
    pub max_stem_len: size_t,
    pub max_loop_len: size_t,
}

/// Outcome of a finished session.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PeResult {
    pub sound: bool,
    pub transparent: bool,
    pub compliant: bool,
    pub aborted: bool,
    pub premature: bool,
    pub ok: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Incompatible { .. } => PE_ERR_INCOMPATIBLE,
        Error::NotReasonable => PE_ERR_NOT_REASONABLE,
        Error::Compliance(_) => PE_ERR_COMPLIANCE,
        Error::Budget(_) => PE_ERR_BUDGET,
        Error::Usage(_) => PE_ERR_ARGUMENT,
        _ => PE_ERR_PARSE,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn fail<T>(code: i32, msg: &str) -> Result<T, Fail> {
    Err(Fail(code, msg.to_string()))
}

/// Runs `f`, turning errors and panics into codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PE_OK
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            PE_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return fail(PE_ERR_NULL, &format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(PE_ERR_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(PE_ERR_NULL, format!("{what} is null")))
}

/// Copies `s` into `buf` when it fits. `needed` may be null.
unsafe fn write_str(s: &str, buf: *mut c_char, len: size_t, needed: *mut size_t) -> Result<(), Fail> {
    let n = s.len() + 1;
    if let Some(needed) = needed.as_mut() {
        *needed = n;
    }
    if buf.is_null() || len < n {
        return fail(PE_ERR_BUFFER, &format!("buffer too small: {n} bytes needed"));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

fn class_of(c: u32) -> Result<Class, Fail> {
    match c {
        PE_CLASS_O => Ok(Class::O),
        PE_CLASS_I => Ok(Class::I),
        PE_CLASS_D => Ok(Class::D),
        PE_CLASS_C => Ok(Class::C),
        _ => fail(PE_ERR_ARGUMENT, "unknown class"),
    }
}

fn eq_of(e: u32) -> Result<EquivalenceKind, Fail> {
    match e {
        PE_EQ_SYNTACTIC => Ok(EquivalenceKind::Syntactic),
        PE_EQ_INSERT => Ok(EquivalenceKind::SubwordInsert),
        PE_EQ_SUPPRESS => Ok(EquivalenceKind::SubwordSuppress),
        _ => fail(PE_ERR_ARGUMENT, "unknown equivalence"),
    }
}

fn strategy_of(s: u32) -> Result<Strategy, Fail> {
    match s {
        PE_STRATEGY_EDIT => Ok(Strategy::Edit),
        PE_STRATEGY_TRUNCATE => Ok(Strategy::Truncate),
        PE_STRATEGY_INSERT => Ok(Strategy::Insert),
        PE_STRATEGY_SUPPRESS => Ok(Strategy::Suppress),
        _ => fail(PE_ERR_ARGUMENT, "unknown strategy"),
    }
}

fn verdict_code(v: &Verdict) -> i32 {
    match v.get() {
        Some(true) => PE_TRUE,
        Some(false) => PE_FALSE,
        None => PE_UNDECIDED,
    }
}

/// Copies the calling thread's last error message. Empty after a
/// successful call.
///
/// # Safety
/// `buf` must hold `len` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn pe_last_error(buf: *mut c_char, len: size_t, needed: *mut size_t) -> i32 {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match write_str(&msg, buf, len, needed) {
        Ok(()) => PE_OK,
        Err(Fail(code, _)) => code,
    }
}

/// Parses policy text. `possible` lines are resolved against the working
/// directory.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pe_policy_parse(text: *const c_char, out: *mut *mut PePolicy) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let policy = parse_policy(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(PePolicy { policy }));
        Ok(())
    })
}

/// Loads a policy file; `possible` lines are resolved relative to it.
///
/// # Safety
/// As pe_policy_parse.
#[no_mangle]
pub unsafe extern "C" fn pe_policy_load(path: *const c_char, out: *mut *mut PePolicy) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let policy = load_policy(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(PePolicy { policy }));
        Ok(())
    })
}

/// # Safety
/// `policy` must come from this library and not be used afterwards. Null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn pe_policy_free(policy: *mut PePolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Puts every action in class `cls`.
///
/// # Safety
/// `policy` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pe_policy_set_uniform(policy: *mut PePolicy, cls: u32) -> i32 {
    guard(|| {
        let h = out_arg(policy, "policy")?;
        h.policy = h.policy.with_uniform(class_of(cls)?);
        Ok(())
    })
}

/// Whether the empty execution is valid: 1 or 0 in `out`.
///
/// # Safety
/// `policy` must be a live handle, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pe_policy_is_reasonable(policy: *const PePolicy, out: *mut i32) -> i32 {
    guard(|| {
        let h = policy.as_ref().ok_or_else(|| Fail(PE_ERR_NULL, "policy is null".into()))?;
        *out_arg(out, "out")? = h.policy.is_reasonable() as i32;
        Ok(())
    })
}

/// Property class test (`PE_PROPERTY_*`); verdict in `out`.
///
/// # Safety
/// `policy` must be a live handle, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pe_property_class(policy: *const PePolicy, kind: u32, out: *mut i32) -> i32 {
    guard(|| {
        let h = policy.as_ref().ok_or_else(|| Fail(PE_ERR_NULL, "policy is null".into()))?;
        let p = &h.policy.property;
        let v = match kind {
            PE_PROPERTY_SAFETY => is_safety(p),
            PE_PROPERTY_LIVENESS => is_liveness(p),
            PE_PROPERTY_RENEWAL => is_renewal(p),
            _ => return fail(PE_ERR_ARGUMENT, "unknown property class"),
        };
        *out_arg(out, "out")? = verdict_code(&v);
        Ok(())
    })
}

/// Enforceability under equivalence `eq`. `stationary` only matters for
/// insertion. `bounds` may be null for the defaults. On `PE_FALSE` with a
/// witness, the witness trace literal goes to `witness` when it is not
/// null; otherwise an empty string is written.
///
/// # Safety
/// `policy` must be a live handle, `verdict` valid, `witness` null or
/// `witness_len` bytes long.
#[no_mangle]
pub unsafe extern "C" fn pe_is_enforceable(
    policy: *const PePolicy,
    eq: u32,
    stationary: bool,
    bounds: *const PeBounds,
    verdict: *mut i32,
    witness: *mut c_char,
    witness_len: size_t,
) -> i32 {
    guard(|| {
        let h = policy.as_ref().ok_or_else(|| Fail(PE_ERR_NULL, "policy is null".into()))?;
        let verdict = out_arg(verdict, "verdict")?;
        let b = match bounds.as_ref() {
            Some(b) if b.max_loop_len == 0 => return fail(PE_ERR_ARGUMENT, "loop bound must be positive"),
            Some(b) => Bounds::new(b.max_finite_len, b.max_stem_len, b.max_loop_len),
            None => Bounds::default(),
        };
        let p = &h.policy;
        let v = match eq_of(eq)? {
            EquivalenceKind::Syntactic => match &p.possible {
                Some(s) => is_enforceable_eq_nonuniform(p, &s.model, &b),
                None => is_enforceable_eq(p, &b),
            },
            EquivalenceKind::SubwordInsert => is_enforceable_insert(p, stationary, &b),
            EquivalenceKind::SubwordSuppress => is_enforceable_suppress(p, &b),
        };
        *verdict = verdict_code(&v);
        if !witness.is_null() {
            let w = v.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
            write_str(&w, witness, witness_len, ptr::null_mut())?;
        }
        Ok(())
    })
}

/// Opens an enforcer session on a copy of the policy.
///
/// # Safety
/// `policy` must be a live handle, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pe_session_new(
    policy: *const PePolicy,
    strategy: u32,
    eq: u32,
    stationary: bool,
    out: *mut *mut PeSession,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let h = policy.as_ref().ok_or_else(|| Fail(PE_ERR_NULL, "policy is null".into()))?;
        let session = PeSession::open(&h.policy, strategy_of(strategy)?, eq_of(eq)?, stationary)?;
        *out = Box::into_raw(Box::new(session));
        Ok(())
    })
}

/// # Safety
/// As pe_policy_free.
#[no_mangle]
pub unsafe extern "C" fn pe_session_free(session: *mut PeSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Feeds one action. The events it caused, one edit-log line each, go to
/// `log` when it is not null. The step happens even when the log does not
/// fit; `PE_ERR_BUFFER` then reports the size needed.
///
/// # Safety
/// `session` must be a live handle, `action` a NUL-terminated string,
/// `log` null or `log_len` bytes long, `needed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn pe_session_step(
    session: *mut PeSession,
    action: *const c_char,
    log: *mut c_char,
    log_len: size_t,
    needed: *mut size_t,
) -> i32 {
    guard(|| {
        let s = out_arg(session, "session")?;
        let a = Action::new(str_arg(action, "action")?)?;
        let events = s.inner.step(&a)?;
        if !log.is_null() || !needed.is_null() {
            let text: String = events.iter().map(|e| format!("{e}\n")).collect();
            write_str(&text, log, log_len, needed)?;
        }
        Ok(())
    })
}

/// The output released so far, as a trace literal.
///
/// # Safety
/// `session` must be a live handle, `buf` null or `len` bytes long.
#[no_mangle]
pub unsafe extern "C" fn pe_session_output(
    session: *const PeSession,
    buf: *mut c_char,
    len: size_t,
    needed: *mut size_t,
) -> i32 {
    guard(|| {
        let s = session.as_ref().ok_or_else(|| Fail(PE_ERR_NULL, "session is null".into()))?;
        write_str(&s.inner.output().to_string(), buf, len, needed)
    })
}

/// Ends the input and evaluates the run. The session stays usable.
///
/// # Safety
/// `session` must be a live handle, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pe_session_finish(session: *const PeSession, out: *mut PeResult) -> i32 {
    guard(|| {
        let s = session.as_ref().ok_or_else(|| Fail(PE_ERR_NULL, "session is null".into()))?;
        let out = out_arg(out, "out")?;
        let r = (*s.inner).clone().finish();
        *out = PeResult {
            sound: r.sound,
            transparent: r.transparent,
            compliant: r.compliant,
            aborted: r.aborted,
            premature: r.premature,
            ok: r.ok(),
        };
        Ok(())
    })
}
