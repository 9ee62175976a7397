//! Per-thread multiply-add counter.
//!
//! Every kernel in [`crate::linalg`] records the multiply-adds it performs on
//! the calling thread. Readings are deterministic and machine independent,
//! which is what complexity checks compare instead of wall-clock time.

use std::cell::Cell;

thread_local! {
    static MULTIPLY_ADDS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub(crate) fn record(n: usize) {
    MULTIPLY_ADDS.with(|c| c.set(c.get().wrapping_add(n as u64)));
}

/// Multiply-adds recorded on this thread so far.
pub fn multiply_adds() -> u64 {
    MULTIPLY_ADDS.with(Cell::get)
}

/// Runs `f` and returns its result with the multiply-adds it recorded.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = multiply_adds();
    let out = f();
    (out, multiply_adds().wrapping_sub(before))
}

/// Runs `f` without charging its work to the counter.
pub(crate) fn uncounted<R>(f: impl FnOnce() -> R) -> R {
    let before = multiply_adds();
    let out = f();
    MULTIPLY_ADDS.with(|c| c.set(before));
    out
}
