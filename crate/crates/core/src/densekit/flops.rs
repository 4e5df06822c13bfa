//! Thread-local tally of model flop counts.
//!
//! Kernels add their textbook operation count (not the executed count). The
//! tally is per thread, so concurrent callers never observe each other.

use std::cell::Cell;

thread_local! {
    static FLOPS: Cell<u64> = const { Cell::new(0) };
}

/// Adds `n` to the calling thread's tally.
pub fn record(n: u64) {
    FLOPS.with(|c| c.set(c.get().saturating_add(n)));
}

/// Current tally for the calling thread.
pub fn count() -> u64 {
    FLOPS.with(Cell::get)
}

/// Resets the tally and returns the previous value.
pub fn reset() -> u64 {
    FLOPS.with(|c| c.replace(0))
}

/// Runs `f` and returns its result together with the flops it recorded.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = count();
    let out = f();
    (out, count() - before)
}
