//! Internal quadrature: adaptive Simpson with Richardson correction, and a
//! dyadic-panel scheme for integrals over [start, ∞) that must detect
//! divergence instead of looping.

/// Maximum bisection depth. Smooth integrands converge far shallower; the cap
/// bounds the worst-case tree when evaluation noise keeps the error estimate
/// above tolerance.
const MAX_DEPTH: u32 = 25;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
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
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// ∫_a^b f, absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adapt(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// ∫_start^∞ f over doubling panels [start·2^k, start·2^(k+1)].
///
/// Returns None when panel contributions stop decaying geometrically
/// (divergent or log-divergent integrand). Requires f ≥ 0 and start > 0.
/// Golden-section maximization of a unimodal f on [lo, hi].
/// Returns (argmax, max) once the bracket shrinks below xtol.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
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
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

pub(crate) fn panels_to_infinity<F: Fn(f64) -> f64>(f: F, start: f64, rel_tol: f64) -> Option<f64> {
    let mut acc = 0.0f64;
    let mut lo = start;
    let mut prev_panel = f64::INFINITY;
    let mut stagnant = 0u32;
    for _ in 0..200 {
        let hi = lo * 2.0;
        let panel = adaptive_simpson(&f, lo, hi, rel_tol * 0.015625 * (acc.abs() + 1e-300));
        if panel >= 0.995 * prev_panel && panel > 0.0 {
            stagnant += 1;
            if stagnant >= 3 {
                return None;
            }
        } else {
            stagnant = 0;
        }
        acc += panel;
        if panel <= rel_tol * acc.abs() || (acc == 0.0 && panel == 0.0) {
            // Geometric remainder estimate from the last observed decay rate.
            if prev_panel.is_finite() && prev_panel > 0.0 && panel > 0.0 {
                let ratio = panel / prev_panel;
                if ratio < 1.0 {
                    acc += panel * ratio / (1.0 - ratio);
                }
            }
            return Some(acc);
        }
        prev_panel = panel;
        lo = hi;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_polynomial_and_exponential() {
        assert_relative_eq!(adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-12), 9.0, max_relative = 1e-12);
        assert_relative_eq!(
            adaptive_simpson(|x| (-x).exp(), 0.0, 30.0, 1e-13),
            1.0 - (-30.0f64).exp(),
            max_relative = 1e-11
        );
    }

    #[test]
    fn simpson_gaussian_mass() {
        let v = adaptive_simpson(|x| (-0.5 * x * x).exp(), -10.0, 10.0, 1e-13);
        assert_relative_eq!(v, (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn panels_converge_on_power_tail() {
        // ∫_1^∞ x^(-2.5) dx = 1/1.5
        let v = panels_to_infinity(|x| x.powf(-2.5), 1.0, 1e-11).unwrap();
        assert_relative_eq!(v, 1.0 / 1.5, max_relative = 1e-9);
    }

    #[test]
    fn panels_detect_divergence() {
        assert!(panels_to_infinity(|x| 1.0 / x, 1.0, 1e-10).is_none());
        assert!(panels_to_infinity(|x| x.powf(-0.5), 1.0, 1e-10).is_none());
    }
}
