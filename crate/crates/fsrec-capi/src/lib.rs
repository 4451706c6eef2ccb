//! C ABI for the reconciliation engine.
//!
//! Snapshots and command sequences are opaque handles created by the parse
//! and pipeline functions and released with the matching `_free` call.
//! Every fallible call returns a status code; on failure
//! [`fsrec_last_error_message`] yields a human-readable description for the
//! calling thread. Strings returned through out-parameters are UTF-8,
//! NUL-terminated, and released with [`fsrec_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;

use fsrec::command::Command;
use fsrec::detect::{detect, normalize_log};
use fsrec::filesystem::Filesystem;
use fsrec::format::{conflict_report, parse_fs, parse_seq, serialize_fs, serialize_seq};
use fsrec::reconcile::{reconcile, ReconcileError};
use fsrec::refluence::{refluent, RefluenceError};
use fsrec::rewrite::{SimpleSequence, Simplified};
use fsrec::ApplyOutcome;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsrecStatus {
    Ok = 0,
    /// Malformed snapshot or sequence text.
    ParseError = 1,
    /// The sequence input is not simple or breaks every filesystem.
    BreakingSequence = 2,
    /// The sequence does not apply to the snapshot.
    ApplyBroken = 3,
    /// The two sequences admit no common filesystem.
    NotRefluent = 4,
    /// A required pointer argument was null or otherwise unusable.
    InvalidArgument = 5,
}

/// Opaque snapshot handle.
pub struct FsrecSnapshot(Filesystem);

/// Opaque command-sequence handle.
pub struct FsrecSequence(Vec<Command>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn fail(status: FsrecStatus, message: impl ToString) -> FsrecStatus {
    set_error(message.to_string());
    status
}

/// The last error message recorded on this thread.
///
/// # Safety
/// The returned pointer stays valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub unsafe extern "C" fn fsrec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, FsrecStatus> {
    if text.is_null() {
        return Err(fail(FsrecStatus::InvalidArgument, "null text pointer"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(FsrecStatus::InvalidArgument, format!("text is not UTF-8: {e}")))
}

unsafe fn hand_out<T>(out: *mut *mut T, value: T) -> FsrecStatus {
    if out.is_null() {
        return fail(FsrecStatus::InvalidArgument, "null output pointer");
    }
    *out = Box::into_raw(Box::new(value));
    FsrecStatus::Ok
}

unsafe fn hand_out_string(out: *mut *mut c_char, value: String) -> FsrecStatus {
    if out.is_null() {
        return fail(FsrecStatus::InvalidArgument, "null output pointer");
    }
    match CString::new(value) {
        Ok(c) => {
            *out = c.into_raw();
            FsrecStatus::Ok
        }
        Err(e) => fail(FsrecStatus::InvalidArgument, e),
    }
}

unsafe fn borrow<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, FsrecStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(FsrecStatus::InvalidArgument, format!("null {what} handle")))
}

/// Parses snapshot text into a handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fsrec_snapshot_parse(
    text: *const c_char,
    out: *mut *mut FsrecSnapshot,
) -> FsrecStatus {
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_fs(text) {
        Ok(fs) => hand_out(out, FsrecSnapshot(fs)),
        Err(e) => fail(FsrecStatus::ParseError, e),
    }
}

/// Serializes a snapshot back to its file format.
///
/// # Safety
/// `snapshot` must be a live handle and `out` writable; release the string
/// with [`fsrec_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fsrec_snapshot_to_string(
    snapshot: *const FsrecSnapshot,
    out: *mut *mut c_char,
) -> FsrecStatus {
    let snapshot = match borrow(snapshot, "snapshot") {
        Ok(s) => s,
        Err(status) => return status,
    };
    hand_out_string(out, serialize_fs(&snapshot.0))
}

/// Number of stored entries in a snapshot; zero for a null handle.
///
/// # Safety
/// `snapshot` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsrec_snapshot_entry_count(snapshot: *const FsrecSnapshot) -> usize {
    snapshot.as_ref().map_or(0, |s| s.0.entry_count())
}

/// Releases a snapshot handle; null is ignored.
///
/// # Safety
/// `snapshot` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fsrec_snapshot_free(snapshot: *mut FsrecSnapshot) {
    if !snapshot.is_null() {
        drop(Box::from_raw(snapshot));
    }
}

/// Parses sequence text into a handle. The sequence may be an arbitrary
/// log; normalization and the pairwise operations validate further.
///
/// # Safety
/// As for [`fsrec_snapshot_parse`].
#[no_mangle]
pub unsafe extern "C" fn fsrec_sequence_parse(
    text: *const c_char,
    out: *mut *mut FsrecSequence,
) -> FsrecStatus {
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_seq(text) {
        Ok(commands) => hand_out(out, FsrecSequence(commands)),
        Err(e) => fail(FsrecStatus::ParseError, e),
    }
}

/// Serializes a sequence back to its file format.
///
/// # Safety
/// As for [`fsrec_snapshot_to_string`].
#[no_mangle]
pub unsafe extern "C" fn fsrec_sequence_to_string(
    sequence: *const FsrecSequence,
    out: *mut *mut c_char,
) -> FsrecStatus {
    let sequence = match borrow(sequence, "sequence") {
        Ok(s) => s,
        Err(status) => return status,
    };
    hand_out_string(out, serialize_seq(&sequence.0))
}

/// Number of commands in a sequence; zero for a null handle.
///
/// # Safety
/// `sequence` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsrec_sequence_len(sequence: *const FsrecSequence) -> usize {
    sequence.as_ref().map_or(0, |s| s.0.len())
}

/// Releases a sequence handle; null is ignored.
///
/// # Safety
/// `sequence` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fsrec_sequence_free(sequence: *mut FsrecSequence) {
    if !sequence.is_null() {
        drop(Box::from_raw(sequence));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `text` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fsrec_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Computes the canonical sequence turning `base` into `replica`.
///
/// # Safety
/// `base` and `replica` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fsrec_detect(
    base: *const FsrecSnapshot,
    replica: *const FsrecSnapshot,
    out: *mut *mut FsrecSequence,
) -> FsrecStatus {
    let (base, replica) = match (borrow(base, "base"), borrow(replica, "replica")) {
        (Ok(b), Ok(r)) => (b, r),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let sequence = detect(&base.0, &replica.0);
    hand_out(out, FsrecSequence(sequence.into_commands()))
}

/// Applies a sequence to a snapshot.
///
/// # Safety
/// `snapshot` and `sequence` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fsrec_apply(
    snapshot: *const FsrecSnapshot,
    sequence: *const FsrecSequence,
    out: *mut *mut FsrecSnapshot,
) -> FsrecStatus {
    let (snapshot, sequence) = match (borrow(snapshot, "snapshot"), borrow(sequence, "sequence"))
    {
        (Ok(s), Ok(q)) => (s, q),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    match fsrec::apply_sequence(&sequence.0, &snapshot.0) {
        ApplyOutcome::Applied(fs) => hand_out(out, FsrecSnapshot(fs)),
        ApplyOutcome::Broken => fail(
            FsrecStatus::ApplyBroken,
            "sequence breaks the snapshot",
        ),
    }
}

/// Normalizes an operation log into a canonical simple sequence.
///
/// # Safety
/// `sequence` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fsrec_normalize(
    sequence: *const FsrecSequence,
    out: *mut *mut FsrecSequence,
) -> FsrecStatus {
    let sequence = match borrow(sequence, "sequence") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match normalize_log(&sequence.0) {
        Simplified::Sequence { sequence, .. } => {
            hand_out(out, FsrecSequence(sequence.into_commands()))
        }
        Simplified::Break => fail(
            FsrecStatus::BreakingSequence,
            "sequence breaks every filesystem",
        ),
    }
}

fn as_simple(commands: &[Command]) -> Result<SimpleSequence, FsrecStatus> {
    let sequence = SimpleSequence::new(commands.to_vec())
        .map_err(|e| fail(FsrecStatus::BreakingSequence, e))?;
    if sequence.is_breaking() {
        return Err(fail(
            FsrecStatus::BreakingSequence,
            "sequence breaks every filesystem",
        ));
    }
    Ok(sequence)
}

/// Decides whether two simple sequences apply to a common filesystem.
/// Writes 1 or 0 to `out_refluent`; when refluent and `out_witness` is
/// non-null, also hands out a witness snapshot.
///
/// # Safety
/// `a` and `b` must be live handles; `out_refluent` must be writable;
/// `out_witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn fsrec_refluent(
    a: *const FsrecSequence,
    b: *const FsrecSequence,
    out_refluent: *mut i32,
    out_witness: *mut *mut FsrecSnapshot,
) -> FsrecStatus {
    let (a, b) = match (borrow(a, "sequence"), borrow(b, "sequence")) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    if out_refluent.is_null() {
        return fail(FsrecStatus::InvalidArgument, "null output pointer");
    }
    let (a, b) = match (as_simple(&a.0), as_simple(&b.0)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    match refluent(&a, &b) {
        Ok(Some(witness)) => {
            *out_refluent = 1;
            if out_witness.is_null() {
                FsrecStatus::Ok
            } else {
                hand_out(out_witness, FsrecSnapshot(witness))
            }
        }
        Ok(None) => {
            *out_refluent = 0;
            FsrecStatus::Ok
        }
        Err(RefluenceError::BreakingInput) => fail(
            FsrecStatus::BreakingSequence,
            "sequence breaks every filesystem",
        ),
        Err(e) => fail(FsrecStatus::InvalidArgument, e),
    }
}

/// Reconciles two diverged update sequences: hands out the commands from
/// `b` to replay on replica A, the commands from `a` to replay on replica
/// B, the conflict report text, and the number of conflicts.
///
/// # Safety
/// `a` and `b` must be live handles; each out-pointer may be null when the
/// caller does not need that output.
#[no_mangle]
pub unsafe extern "C" fn fsrec_reconcile(
    a: *const FsrecSequence,
    b: *const FsrecSequence,
    out_to_a: *mut *mut FsrecSequence,
    out_to_b: *mut *mut FsrecSequence,
    out_report: *mut *mut c_char,
    out_conflicts: *mut usize,
) -> FsrecStatus {
    let (a, b) = match (borrow(a, "sequence"), borrow(b, "sequence")) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let (a, b) = match (as_simple(&a.0), as_simple(&b.0)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let result = match reconcile(&a, &b) {
        Ok(result) => result,
        Err(ReconcileError::NotRefluent) => {
            return fail(FsrecStatus::NotRefluent, "sequences are not refluent")
        }
        Err(e) => return fail(FsrecStatus::BreakingSequence, e),
    };
    if !out_to_a.is_null() {
        let status = hand_out(
            out_to_a,
            FsrecSequence(result.apply_after_alpha.commands().to_vec()),
        );
        if status != FsrecStatus::Ok {
            return status;
        }
    }
    if !out_to_b.is_null() {
        let status = hand_out(
            out_to_b,
            FsrecSequence(result.apply_after_beta.commands().to_vec()),
        );
        if status != FsrecStatus::Ok {
            return status;
        }
    }
    if !out_report.is_null() {
        let status = hand_out_string(out_report, conflict_report(&result.conflicts));
        if status != FsrecStatus::Ok {
            return status;
        }
    }
    if !out_conflicts.is_null() {
        *out_conflicts = result.conflicts.len();
    }
    FsrecStatus::Ok
}
