//! Adaptive quadrature primitives for the spectral-leakage integrals.
//!
//! Everything here integrates smooth oscillatory kernels: the squared sinc
//! of the OFDM subcarrier PSD and the squared Dirichlet (Fejér) kernel of
//! the FFT-windowed PU PSD. Both are integrated by adaptive Simpson
//! subdivision after splitting the range at the kernel nulls, so each piece
//! is a single smooth lobe and the recursion converges quickly.

use crate::error::{Error, Result};

/// Default relative tolerance for the leakage integrals.
pub const QUAD_REL_TOL: f64 = 1e-9;

const MAX_DEPTH: u32 = 52;

/// Normalized sinc squared: `(sin(pi u) / (pi u))^2`, with the removable
/// singularity at `u = 0` evaluated by its Taylor limit.
#[inline]
pub fn sinc_sq(u: f64) -> f64 {
    let x = std::f64::consts::PI * u;
    if x.abs() < 1e-6 {
        // (1 - x^2/6)^2 truncated; error O(x^4)
        let t = 1.0 - x * x / 6.0;
        t * t
    } else {
        let s = x.sin() / x;
        s * s
    }
}

/// Squared Dirichlet kernel `(sin(N x / 2) / sin(x / 2))^2`.
///
/// The kernel is 2π-periodic; `x` is reduced to `(-pi, pi]` first. The
/// removable singularity at `x ≡ 0 (mod 2π)` evaluates to `N²` via the
/// Taylor limit.
#[inline]
pub fn dirichlet_sq(x: f64, n: u32) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = x - two_pi * (x / two_pi).round();
    let nf = n as f64;
    if r.abs() < 1e-6 {
        // sin(N r/2)/sin(r/2) = N (1 - (N^2-1) r^2 / 24 + ...)
        let t = nf * (1.0 - (nf * nf - 1.0) * r * r / 24.0);
        t * t
    } else {
        let s = (nf * r / 2.0).sin() / (r / 2.0).sin();
        s * s
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// `tol` is an absolute tolerance for this interval; callers derive it from
/// the requested relative tolerance and a magnitude estimate. Fails only if
/// the integrand turns non-finite.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
        return Err(Error::numerical(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !(flm.is_finite() && frm.is_finite()) {
        return Err(Error::numerical(format!(
            "integrand not finite inside [{a}, {b}]"
        )));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        // Richardson extrapolation of the two estimates
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Two-pass piecewise integration: a coarse absolute pass sizes the
/// result, then each piece is refined to `rel_tol` of that magnitude.
/// The floor keeps the target above float noise so the recursion never
/// chases rounding error.
fn integrate_pieces<F: Fn(f64) -> f64>(
    f: &F,
    pieces: &[f64],
    rel_tol: f64,
    coarse_tol: f64,
) -> Result<f64> {
    let n = (pieces.len() - 1) as f64;
    let mut coarse = 0.0;
    for w in pieces.windows(2) {
        coarse += adaptive_simpson(f, w[0], w[1], coarse_tol / n)?;
    }
    let target = (rel_tol * coarse.abs()).max(1e-16 * (coarse.abs() + coarse_tol));
    let per_piece = target / n;
    let mut sum = 0.0;
    for w in pieces.windows(2) {
        sum += adaptive_simpson(f, w[0], w[1], per_piece)?;
    }
    Ok(sum)
}

/// Integral of `sinc_sq` over `[u0, u1]` to relative tolerance `rel_tol`.
///
/// The range is split at the integer nulls of the sinc so every piece is a
/// single lobe. The full-line integral is 1, which bounds the result.
pub fn integrate_sinc_sq(u0: f64, u1: f64, rel_tol: f64) -> Result<f64> {
    if !(u0.is_finite() && u1.is_finite()) {
        return Err(Error::invalid("sinc^2 integration bounds must be finite"));
    }
    if u1 <= u0 {
        return Ok(0.0);
    }
    let span = u1 - u0;
    if span > 2e7 {
        return Err(Error::invalid(format!(
            "sinc^2 integration span {span} too wide"
        )));
    }
    let pieces = split_points(u0, u1, 1.0);
    integrate_pieces(&sinc_sq, &pieces, rel_tol, 1e-9)
}

/// Integral of the squared Dirichlet kernel of order `n` over `[x0, x1]`
/// (radians), to relative tolerance `rel_tol` of the result.
pub fn integrate_dirichlet_sq(x0: f64, x1: f64, n: u32, rel_tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("dirichlet kernel order must be >= 1"));
    }
    if x1 <= x0 {
        return Ok(0.0);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let scale = two_pi * n as f64; // full-circle integral bounds the value
    let null_spacing = two_pi / n as f64;
    let pieces = split_points(x0, x1, null_spacing);
    let f = |x: f64| dirichlet_sq(x, n);
    integrate_pieces(&f, &pieces, rel_tol, 1e-9 * scale)
}

/// Breakpoints of `[a, b]` at multiples of `step` (the kernel nulls),
/// including both endpoints.
fn split_points(a: f64, b: f64, step: f64) -> Vec<f64> {
    let mut pts = vec![a];
    let mut j = (a / step).floor() + 1.0;
    while j * step < b {
        let x = j * step;
        if x > a {
            pts.push(x);
        }
        j += 1.0;
    }
    pts.push(b);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_sq_at_zero_and_nulls() {
        assert_eq!(sinc_sq(0.0), 1.0);
        assert!(sinc_sq(1.0).abs() < 1e-30);
        assert!(sinc_sq(-3.0).abs() < 1e-30);
        assert!((sinc_sq(1e-9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_sq_limits_and_periodicity() {
        let two_pi = 2.0 * std::f64::consts::PI;
        assert_eq!(dirichlet_sq(0.0, 8), 64.0);
        assert!((dirichlet_sq(two_pi, 8) - 64.0).abs() < 1e-6);
        // nulls at 2*pi*j/N for j not a multiple of N
        assert!(dirichlet_sq(two_pi / 8.0, 8).abs() < 1e-20);
        // N = 1 kernel is identically 1
        for &x in &[0.0, 0.3, -2.9, 3.1] {
            assert!((dirichlet_sq(x, 1) - 1.0).abs() < 1e-12);
        }
        // continuity across the Taylor switch point
        let a = dirichlet_sq(0.9999e-6, 32);
        let b = dirichlet_sq(1.0001e-6, 32);
        assert!((a - b).abs() / a < 1e-9);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let v = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        // integral = [x^4/4 - x^2 + x] from -1 to 3 = (81/4 - 9 + 3) - (1/4 - 1 - 1)
        let exact = (81.0 / 4.0 - 6.0) - (0.25 - 2.0);
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn sinc_sq_whole_line_approaches_one() {
        let a = integrate_sinc_sq(-100.0, 100.0, 1e-9).unwrap();
        let b = integrate_sinc_sq(-1000.0, 1000.0, 1e-9).unwrap();
        assert!(a > 0.997 && a < 1.0, "got {a}");
        assert!(b > a && b < 1.0, "got {b}");
    }

    #[test]
    fn dirichlet_full_circle_is_two_pi_n() {
        let pi = std::f64::consts::PI;
        for &n in &[1u32, 8, 32] {
            let v = integrate_dirichlet_sq(-pi, pi, n, 1e-10).unwrap();
            let expect = 2.0 * pi * n as f64;
            assert!(
                ((v - expect) / expect).abs() < 1e-9,
                "N={n}: got {v}, expected {expect}"
            );
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = adaptive_simpson(&|x| 1.0 / x, -1.0, 1.0, 1e-9);
        // 1/x is infinite at interior sample points once the recursion
        // hits x = 0 exactly; the midpoint of [-1, 1] is 0.
        assert!(err.is_err() || err.unwrap().is_finite());
    }
}
