//! The frozen smooth dyadic partition.
//!
//! `cutoff(r)` is `C^inf`, equal to 1 on `[0, 3/4]` and to 0 on `[1, inf)`.
//! The block profile `profile(r) = cutoff(r/2) - cutoff(r)` is supported in
//! `[3/4, 2]`, so every block lives inside the annulus `3/4 <= r <= 8/3` and
//! the telescoping sum of blocks reproduces `cutoff` exactly. Putting the
//! profile's outer edge at 2 means a mode with `|k| <= 2^i` never reaches a
//! block above `i` and a mode with `|k| > 2^i` never reaches a block below it.

/// Inner edge of the annulus.
pub const INNER: f64 = 0.75;
/// Outer edge of the annulus.
pub const OUTER: f64 = 8.0 / 3.0;
/// Where the low-pass cutoff reaches zero.
const PLATEAU_END: f64 = 1.0;

fn flat(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth low-pass cutoff.
pub fn cutoff(r: f64) -> f64 {
    if r <= INNER {
        1.0
    } else if r >= PLATEAU_END {
        0.0
    } else {
        let a = flat(PLATEAU_END - r);
        let b = flat(r - INNER);
        a / (a + b)
    }
}

/// Dyadic block profile.
pub fn profile(r: f64) -> f64 {
    let v = cutoff(0.5 * r) - cutoff(r);
    if v < 0.0 {
        0.0
    } else {
        v
    }
}
