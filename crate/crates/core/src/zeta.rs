//! Riemann zeta on the real ray `s > 1`.
//!
//! Direct partial sums plus an Euler-Maclaurin tail correction through the
//! B6 term. With 2000 explicit terms the absolute error stays below 1e-12
//! down to exponents barely above 1, which covers every power-law query the
//! crate makes.

const CUTOFF: usize = 2000;

/// Evaluate `zeta(s)` for `s > 1`.
///
/// Panics if `s <= 1` (the series diverges there and no caller needs the
/// analytic continuation).
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta: exponent must exceed 1, got {s}");
    // Sum smallest terms first to limit rounding.
    let mut sum = 0.0;
    for k in (1..CUTOFF).rev() {
        sum += (k as f64).powf(-s);
    }
    let n = CUTOFF as f64;
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
    sum + tail
}
