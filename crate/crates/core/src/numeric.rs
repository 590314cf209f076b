//! Scalar search primitives shared by the solvers.

/// Leftmost switch point of a monotone predicate.
///
/// `pred` must be false at `lo` and true at `hi`, and must switch from false
/// to true exactly once in between (monotone).  Returns a point within `tol`
/// of the switch, from the true side.
pub(crate) fn bisect_leftmost(pred: impl Fn(f64) -> bool, lo: f64, hi: f64, tol: f64) -> f64 {
    debug_assert!(lo < hi);
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Root of `f` inside a bracket with opposite (or vanishing) signs at the
/// ends.  Infinite values are fine; only the sign is used.  Returns the
/// midpoint of the final bracket.
pub(crate) fn bisect_sign_change(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    debug_assert!(fa * f(b) <= 0.0 || fa.is_infinite() || f(b).is_infinite());
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fa > 0.0) == (fm > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]`.
///
/// Intended as a refinement step after a grid scan, so it assumes the
/// bracket contains a single local maximum (ties/plateaus are resolved
/// arbitrarily).  Returns the best point found and its value, including the
/// bracket endpoints as candidates.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_GOLDEN * (hi - lo);
    let mut x2 = lo + INV_GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid));
    for (x, fx) in [(a, f(a)), (b, f(b)), (x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}
