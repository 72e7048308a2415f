//! Independent quadrature oracle for the spectral checks: adaptive Simpson
//! refinement, with principal values handled by splitting a symmetric
//! window around the pole. Deliberately shares nothing with the midpoint
//! subtraction scheme in the library.

/// Adaptive Simpson integration to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(f, a, fa, m, fm, flm);
        let right = simpson(f, m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(f, a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}

/// P∫_a^b g(ω)/(ω−x) dω for a < x < b: regular pieces outside a symmetric
/// window around the pole plus the subtracted integrand inside it (the
/// symmetric principal value of 1/(ω−x) is zero there).
pub fn principal_value(g: &dyn Fn(f64) -> f64, a: f64, b: f64, x: f64, tol: f64) -> f64 {
    assert!(a < x && x < b, "pole must lie inside the interval");
    let delta = 0.5 * (x - a).min(b - x);
    let gx = g(x);
    let h = 1e-7 * delta;
    let inner = |w: f64| {
        if (w - x).abs() < h {
            (g(x + h) - g(x - h)) / (2.0 * h)
        } else {
            (g(w) - gx) / (w - x)
        }
    };
    let outer = |w: f64| g(w) / (w - x);
    adaptive_simpson(&outer, a, x - delta, tol)
        + adaptive_simpson(&outer, x + delta, b, tol)
        + adaptive_simpson(&inner, x - delta, x + delta, tol)
}

/// Reduced principal-value integral of the sharp-cutoff self-energy,
/// P∫_μ^Λ √(ω²−μ²)/(ω−x) dω / 4π², multiplied by λ₀² gives Re Σ.
pub fn re_sigma_sharp_oracle(e: f64, mu: f64, m_n: f64, cutoff: f64, lambda0: f64) -> f64 {
    let x = e - m_n;
    let g = move |w: f64| (w * w - mu * mu).max(0.0).sqrt();
    let tol = 1e-12;
    let reduced = if x <= mu || x >= cutoff {
        adaptive_simpson(&|w| g(w) / (w - x), mu, cutoff, tol)
    } else {
        principal_value(&g, mu, cutoff, x, tol)
    };
    lambda0 * lambda0 * reduced / (4.0 * std::f64::consts::PI.powi(2))
}
