//! Bracketed scalar root finding: Brent's method with a bisection fallback,
//! after the classic zbrent routine in Numerical Recipes.

/// Find a root of `f` inside `[a, b]`, given `fa = f(a)` and `fb = f(b)` with
/// opposite signs. Returns the final abscissa and its residual.
///
/// Iterates until the residual magnitude drops to `ftol`, the bracket
/// collapses to machine precision, or `max_iter` is exhausted; the caller is
/// responsible for checking the returned residual against its tolerance.
pub(crate) fn brent<F>(
    mut f: F,
    a0: f64,
    b0: f64,
    fa0: f64,
    fb0: f64,
    ftol: f64,
    max_iter: usize,
) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(fa0 * fb0 <= 0.0, "bracket must straddle a sign change");

    let (mut a, mut b) = (a0, b0);
    let (mut fa, mut fb) = (fa0, fb0);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            // b and c are on the same side; pull c back to the other end.
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * f64::MIN_POSITIVE;
        let xm = 0.5 * (c - b);
        if fb == 0.0 || fb.abs() <= ftol || xm.abs() <= tol1 {
            return (b, fb);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation (secant when a == c).
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }

        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += if xm > 0.0 { tol1 } else { -tol1 };
        }
        fb = f(b);
    }

    (b, fb)
}
