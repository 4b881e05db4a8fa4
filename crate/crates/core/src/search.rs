//! Scalar search routines shared by the solvers.

/// Relative gap below which two objective values count as tied.
pub(crate) const TIE_REL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// `candidate` beats `incumbent` by more than the tie tolerance.
#[inline]
pub(crate) fn strictly_better(candidate: f64, incumbent: f64) -> bool {
    if !candidate.is_finite() {
        return false;
    }
    if !incumbent.is_finite() {
        return true;
    }
    candidate < incumbent - TIE_REL * incumbent.abs().max(1.0)
}

/// Golden-section minimization on `[a, b]` down to bracket width `tol`.
///
/// The endpoints are evaluated as well and win ties, left first, so a
/// minimum pinned to the boundary is returned exactly.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    if !(b > a) {
        return (a, f(a));
    }
    let fa = f(a);
    let fb = f(b);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let (xm, fm) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let mut best = (a, fa);
    if strictly_better(fm, best.1) {
        best = (xm, fm);
    }
    if strictly_better(fb, best.1) {
        best = (b, fb);
    }
    best
}

/// Uniform grid of `points` samples on `[lo, hi]`, then golden-section
/// refinement inside the bracket around the best grid point.
///
/// Ties resolve to the smallest abscissa.
pub(crate) fn grid_golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> (f64, f64) {
    if !(hi > lo) || points < 2 {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let at = |i: usize| if i + 1 == points { hi } else { lo + step * i as f64 };
    let mut best_i = 0;
    let mut best_v = f(lo);
    for i in 1..points {
        let v = f(at(i));
        if strictly_better(v, best_v) {
            best_i = i;
            best_v = v;
        }
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(points - 1));
    let (x, v) = golden_min(&mut f, a, b, tol);
    if strictly_better(v, best_v) {
        (x, v)
    } else {
        (at(best_i), best_v)
    }
}

/// Finds `x` in `[lo, hi]` with `f(x) = target` for nonincreasing `f`,
/// assuming `f(lo) >= target >= f(hi)`.
pub(crate) fn bisect_nonincreasing<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    tol: f64,
) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `x >= 0` with `f(x) <= target` for a nonincreasing `f` that
/// decays as `x` grows. Returns `+inf` when `target` is out of reach
/// before `x = 4096`.
pub(crate) fn invert_nonincreasing<F: FnMut(f64) -> f64>(mut f: F, target: f64, tol: f64) -> f64 {
    if f(0.0) <= target {
        return 0.0;
    }
    let mut hi = 1.0;
    while f(hi) > target {
        hi *= 2.0;
        if hi > 4096.0 {
            return f64::INFINITY;
        }
    }
    bisect_nonincreasing(&mut f, 0.0, hi, target, tol) + 0.5 * tol
}
