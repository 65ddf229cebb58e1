//! One-dimensional minimization helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimizer of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol * max(1, |x|)` or after
/// 200 iterations. Assumes `f` is unimodal on the bracket; otherwise returns
/// some local minimizer inside it.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= rel_tol * 1f64.max(c.abs()) {
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
        c
    } else {
        d
    }
}
