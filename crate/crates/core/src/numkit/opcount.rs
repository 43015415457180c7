//! Per-thread arithmetic operation counter.
//!
//! Kernels add the number of floating point multiply/add operations they
//! perform. Counting is per thread so seed-parallel workers don't interfere.

use std::cell::Cell;

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn add(n: usize) {
    OPS.with(|c| c.set(c.get().wrapping_add(n as u64)));
}

pub fn reset() {
    OPS.with(|c| c.set(0));
}

pub fn get() -> u64 {
    OPS.with(|c| c.get())
}

/// Runs `f` and returns its result together with the ops it performed.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = get();
    let out = f();
    (out, get().wrapping_sub(before))
}
