//! Small scalar numerics: golden-section search, bracketed root finding and
//! quadrature.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizes a unimodal `f` on `[lo, hi]` to an interval width `tol`.
/// Returns `(x, f(x))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
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
    let candidates = [(x1, f1), (x2, f2), (lo, f(lo)), (hi, f(hi))];
    candidates.into_iter().fold((f64::NAN, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b })
}

/// Root of `f` in `[lo, hi]` with `f(lo)` and `f(hi)` of opposite sign.
/// `f` returns `(value, derivative)`; Newton steps falling outside the
/// current bracket are replaced by bisection.
pub fn safeguarded_newton<F: FnMut(f64) -> (f64, f64)>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let (flo, _) = f(lo);
    let rising = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == rising {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= rel_tol * x.abs().max(f64::MIN_POSITIVE) || hi - lo <= rel_tol * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + inner + f(b)) * h / 3.0
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-10);
        // A flat minimum pins x only to about sqrt(machine epsilon).
        assert!((x - 1.3).abs() < 1e-7 && (fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn newton_finds_cube_root() {
        let r = safeguarded_newton(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-14);
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
        let d = safeguarded_newton(|x| (1.0 / x - 0.25, -1.0 / (x * x)), 0.1, 100.0, 1e-14);
        assert!((d - 4.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_agrees() {
        let exact = 1.0 - 1f64.cos();
        assert!((adaptive_simpson(f64::sin, 0.0, 1.0, 1e-12) - exact).abs() < 1e-11);
        assert!((simpson(f64::sin, 0.0, 1.0, 200) - exact).abs() < 1e-9);
        assert_eq!(adaptive_simpson(f64::sin, 2.0, 2.0, 1e-9), 0.0);
    }
}
