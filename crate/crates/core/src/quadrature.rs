//! Quadrature rules.
//!
//! Time-domain functionals use composite Simpson on the uniform trajectory
//! grid. Frequency-domain integrals over the whole real line use adaptive
//! Simpson after a tangent substitution that flattens the pulse Lorentzian.

use std::ops::{Add, Mul};

/// Composite Simpson over uniformly spaced samples.
///
/// `n` must be odd (an even number of intervals). Values are pulled lazily
/// through `f(k)` so callers can integrate derived quantities without
/// materializing them.
pub fn simpson<T, F>(n: usize, h: f64, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(usize) -> T,
{
    assert!(n >= 3 && n % 2 == 1, "simpson needs an even number of intervals");
    let mut odd = T::default();
    let mut even = T::default();
    for k in 1..n - 1 {
        if k % 2 == 1 {
            odd = odd + f(k);
        } else {
            even = even + f(k);
        }
    }
    (f(0) + f(n - 1) + odd * 4.0 + even * 2.0) * (h / 3.0)
}

/// Composite trapezoid over uniformly spaced samples.
pub fn trapezoid<F: Fn(usize) -> f64>(n: usize, h: f64, f: F) -> f64 {
    assert!(n >= 2);
    let inner: f64 = (1..n - 1).map(&f).sum();
    h * (0.5 * (f(0) + f(n - 1)) + inner)
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
///
/// The interval is first cut into `panels` pieces so narrow features are not
/// skipped by the initial five-point estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * w;
            let hi = if i + 1 == panels { b } else { lo + w };
            let fa = f(lo);
            let fb = f(hi);
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            refine(&f, lo, hi, fa, fm, fb, whole, panel_tol, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
