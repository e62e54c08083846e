//! One-dimensional search primitives.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a convex `f` on `[a, b]` down to a
/// bracket of width `tol`. Returns the best abscissa seen and its value.
///
/// Ties resolve toward the left, so on a flat stretch some point of it is
/// returned rather than its midpoint.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Distance from `x0` in direction `dir` (±1) to the edge of the interval on
/// which `inside` holds, assuming `inside(x0)` and that the set is an
/// interval. Found by doubling from `resolution`, then bisection to
/// `resolution`; capped at `limit`.
pub fn interval_extent<P: FnMut(f64) -> bool>(mut inside: P, x0: f64, dir: f64, resolution: f64, limit: f64) -> f64 {
    let mut good = 0.0;
    let mut step = resolution;
    let bad = loop {
        if step >= limit {
            if inside(x0 + dir * limit) {
                return limit;
            }
            break limit;
        }
        if inside(x0 + dir * step) {
            good = step;
            step *= 2.0;
        } else {
            break step;
        }
    };
    let mut bad = bad;
    while bad - good > resolution {
        let mid = 0.5 * (good + bad);
        if mid <= good || mid >= bad {
            break;
        }
        if inside(x0 + dir * mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}
