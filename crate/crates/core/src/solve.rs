//! Bracketed scalar root finding.

/// Finds a root of `f` inside the bracket `[a, b]` by secant steps
/// safeguarded with bisection.
///
/// `fa` and `fb` are `f(a)` and `f(b)` and must have opposite signs (an
/// endpoint that is already a root is returned directly). A secant proposal
/// is accepted only while it stays strictly inside the current bracket and
/// keeps making progress; otherwise the step falls back to bisection, so
/// convergence is never worse than bisection. Returns the abscissa once
/// `|f| <= f_tol`, or `None` if `max_iter` iterations cannot get there.
pub fn bracketed_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    f_tol: f64,
    max_iter: usize,
) -> Option<f64> {
    debug_assert!(f_tol > 0.0);
    if fa.abs() <= f_tol {
        return Some(a);
    }
    if fb.abs() <= f_tol {
        return Some(b);
    }
    if fa.is_sign_positive() == fb.is_sign_positive() {
        return None;
    }
    // Which endpoint the last accepted step replaced; two replacements of
    // the same side in a row degrade secant to one-sided regula falsi, so
    // the next step bisects instead.
    let mut last_side: i8 = 0;
    for _ in 0..max_iter {
        let secant = b - fb * (b - a) / (fb - fa);
        let lo = a.min(b);
        let hi = a.max(b);
        let x = if secant.is_finite() && secant > lo && secant < hi && last_side == 0 {
            secant
        } else {
            0.5 * (a + b)
        };
        let fx = f(x);
        if fx.abs() <= f_tol {
            return Some(x);
        }
        if fx.is_sign_positive() == fa.is_sign_positive() {
            a = x;
            fa = fx;
            last_side = if last_side == -1 { 0 } else { -1 };
        } else {
            b = x;
            fb = fx;
            last_side = if last_side == 1 { 0 } else { 1 };
        }
        if (b - a).abs() <= f64::EPSILON * (a.abs() + b.abs() + 1.0) {
            // Bracket exhausted at floating-point resolution.
            let best = if fa.abs() < fb.abs() { a } else { b };
            return if f(best).abs() <= f_tol { Some(best) } else { None };
        }
    }
    None
}
