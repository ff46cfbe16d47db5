//! Gauss–Legendre rules, adaptive bisection, and log-radial integration
//! toward singular points of the coefficient fields.

use crate::domain::Point;
use crate::extreal::ExtReal;
use std::sync::OnceLock;

const ORDER: usize = 8;
/// Log-radial integration stops at `r = e^{-Y_MAX}` and extrapolates the tail.
pub const Y_MAX: f64 = 600.0;
const REL_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 40;

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// One Gauss panel of `f` over `[a, b]`; `None` when the integrand is infinite at a node.
fn panel(f: &impl Fn(f64) -> ExtReal, a: f64, b: f64) -> Option<f64> {
    let (x, w) = rule();
    let (m, r) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(m + r * xi).to_finite()?;
    }
    Some(s * r)
}

/// Panel evaluations allowed per adaptive integral.
const BUDGET: usize = 20_000;

fn adapt(f: &impl Fn(f64) -> ExtReal, a: f64, b: f64, whole: f64, tol: f64, depth: u32, left: &mut usize) -> Option<f64> {
    let m = (a + b) / 2.0;
    let l = panel(f, a, m)?;
    let r = panel(f, m, b)?;
    *left = left.saturating_sub(2);
    let both = l + r;
    // below ~1e-12 relative width the abscissae themselves are noisy
    let floor = (b - a) <= 1e-12 * m.abs();
    if depth >= MAX_DEPTH || floor || *left == 0 || (both - whole).abs() <= tol {
        return Some(both);
    }
    Some(adapt(f, a, m, l, 0.5 * tol, depth + 1, left)? + adapt(f, m, b, r, 0.5 * tol, depth + 1, left)?)
}

/// Adaptive Gauss–Legendre integral of a nonnegative extended-real integrand.
///
/// The tolerance is relative to a two-panel first estimate and is split
/// between halves on refinement.
pub fn integrate(f: impl Fn(f64) -> ExtReal, a: f64, b: f64) -> ExtReal {
    integrate_with_floor(&f, a, b, 0.0)
}

/// As [`integrate`], with an absolute error floor `abs_tol`.
fn integrate_with_floor(f: &impl Fn(f64) -> ExtReal, a: f64, b: f64, abs_tol: f64) -> ExtReal {
    if !(b > a) {
        return ExtReal::ZERO;
    }
    let k = 2;
    let h = (b - a) / k as f64;
    let mut total = 0.0;
    let mut pieces = Vec::with_capacity(k);
    for i in 0..k {
        let (x0, x1) = (a + i as f64 * h, if i + 1 == k { b } else { a + (i + 1) as f64 * h });
        match panel(f, x0, x1) {
            Some(v) => {
                total += v;
                pieces.push((x0, x1, v));
            }
            None => return ExtReal::INFINITY,
        }
    }
    let tol = (REL_TOL * total.abs()).max(abs_tol).max(1e-300) / k as f64;
    let mut left = BUDGET;
    let mut sum = 0.0;
    for (x0, x1, v) in pieces {
        match adapt(f, x0, x1, v, tol, 0, &mut left) {
            Some(v) => sum += v,
            None => return ExtReal::INFINITY,
        }
    }
    ExtReal::new(sum)
}

/// Adaptive integral of a real integrand.
pub fn integrate_real(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let g = |x: f64| f(x);
    let (x, w) = rule();
    let p = |a: f64, b: f64| {
        let (m, r) = ((a + b) / 2.0, (b - a) / 2.0);
        x.iter().zip(w).map(|(xi, wi)| wi * g(m + r * xi)).sum::<f64>() * r
    };
    fn rec(p: &impl Fn(f64, f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = (a + b) / 2.0;
        let (l, r) = (p(a, m), p(m, b));
        let err = (l + r - whole).abs();
        if depth >= MAX_DEPTH || (b - a) <= 1e-12 * m.abs() || err <= tol.max(REL_TOL * (l + r).abs()) || err < 1e-300 {
            return l + r;
        }
        rec(p, a, m, l, 0.5 * tol, depth + 1) + rec(p, m, b, r, 0.5 * tol, depth + 1)
    }
    let whole = p(a, b);
    rec(&p, a, b, whole, REL_TOL * whole.abs(), 0)
}

/// `∫₀^L f(r) dr` with `r = e^{-y}`, for integrands that may blow up as `r → 0⁺`.
///
/// Integrates adaptive unit panels in `y` up to [`Y_MAX`] and extrapolates the remainder
/// geometrically; a tail that stops decaying makes the integral infinite.
pub fn integrate_radial(f: impl Fn(f64) -> ExtReal, len: f64) -> ExtReal {
    if !(len > 0.0) {
        return ExtReal::ZERO;
    }
    let g = |y: f64| {
        let r = (-y).exp();
        f(r).scale(r)
    };
    let y0 = -len.ln();
    // coarse pass fixes the range and the scale of the whole integral
    let coarse = |y: f64| -> Option<f64> { Some(panel(&g, y, y + 0.5)? + panel(&g, y + 0.5, y + 1.0)?) };
    let mut rough = Vec::new();
    let mut total = 0.0;
    let mut y = y0;
    while y < Y_MAX.max(y0 + 1.0) {
        let Some(v) = coarse(y) else { return ExtReal::INFINITY };
        total += v;
        let decaying = rough.last().is_some_and(|&p: &f64| p > 0.0 && v / p < 0.9);
        rough.push(v);
        if decaying && v <= 1e-17 * total {
            break;
        }
        y += 1.0;
    }
    let floor = 1e-13 * total;
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    let mut ratio = 0.0;
    for k in 0..rough.len() {
        let a = y0 + k as f64;
        let Some(v) = integrate_with_floor(&g, a, a + 1.0, floor).to_finite() else { return ExtReal::INFINITY };
        sum += v;
        if let Some(p) = prev {
            ratio = if p > 0.0 { v / p } else if v > 0.0 { f64::INFINITY } else { 0.0 };
        }
        prev = Some(v);
    }
    let last = prev.unwrap_or(0.0);
    let finished = rough.len() >= 2 && y < Y_MAX.max(y0 + 1.0);
    if finished || last <= 1e-300 || last <= 1e-17 * sum {
        return ExtReal::new(sum);
    }
    if ratio >= 1.0 - 1e-9 {
        return ExtReal::INFINITY;
    }
    ExtReal::new(sum + last * ratio / (1.0 - ratio))
}

/// `∫_{r0}^{r1} f(r) dr`; ranges spanning many decades are integrated in `y = −ln r`.
pub fn integrate_radial_range(f: impl Fn(f64) -> ExtReal, r0: f64, r1: f64) -> ExtReal {
    if !(r1 > r0) {
        return ExtReal::ZERO;
    }
    if r0 <= 0.0 {
        return integrate_radial(f, r1);
    }
    if r1 < 8.0 * r0 {
        return integrate(f, r0, r1);
    }
    integrate(
        |y| {
            let r = (-y).exp();
            f(r).scale(r)
        },
        -r1.ln(),
        -r0.ln(),
    )
}

/// `∫_a^b f` where `f` receives the point (as an exact offset from the nearest
/// singular end) and the distance from `a`. Either end may be singular.
pub fn integrate_piece(f: impl Fn(Point, f64) -> ExtReal, a: f64, b: f64, sing_a: bool, sing_b: bool) -> ExtReal {
    if !(b > a) {
        return ExtReal::ZERO;
    }
    let len = b - a;
    match (sing_a, sing_b) {
        (false, false) => integrate(|x| f(Point::at(x), x - a), a, b),
        (true, false) => integrate_radial(|r| f(Point::offset(a, r), r), len),
        (false, true) => integrate_radial(|r| f(Point::offset(b, -r), len - r), len),
        (true, true) => {
            let h = len / 2.0;
            integrate_radial(|r| f(Point::offset(a, r), r), h) + integrate_radial(|r| f(Point::offset(b, -r), len - r), h)
        }
    }
}

/// [`integrate_piece`] over `[a, b]` split at the singular points inside it;
/// endpoints that are singular points get the radial treatment. The distance
/// passed to `f` is measured from `a`.
pub fn integrate_split(f: impl Fn(Point, f64) -> ExtReal, a: f64, b: f64, sing: &[f64]) -> ExtReal {
    integrate_split_radial(f, a, b, sing, sing)
}

/// [`integrate_split`] cutting at `sing` but integrating radially only
/// toward endpoints listed in `radial`.
pub fn integrate_split_radial(f: impl Fn(Point, f64) -> ExtReal, a: f64, b: f64, sing: &[f64], radial: &[f64]) -> ExtReal {
    let mut cuts = vec![a];
    cuts.extend(sing.iter().copied().filter(|s| *s > a && *s < b));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(b);
    let is_sing = |x: f64| radial.contains(&x);
    let mut total = ExtReal::ZERO;
    for w in cuts.windows(2) {
        let base = w[0] - a;
        total += integrate_piece(|p, d| f(p, base + d), w[0], w[1], is_sing(w[0]), is_sing(w[1]));
        if total.is_infinite() {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = integrate(|x| ExtReal::new((x - 0.3).abs()), 0.0, 1.0).value();
        assert!((v - (0.045 + 0.245)).abs() < 1e-10);
        assert!(integrate(|x| if x > 0.5 { ExtReal::INFINITY } else { ExtReal::ZERO }, 0.0, 1.0).is_infinite());
    }

    #[test]
    fn radial_integrable_and_divergent() {
        // ∫₀¹ r^{-1/2} dr = 2
        let v = integrate_radial(|r| ExtReal::new(r.powf(-0.5)), 1.0).value();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        // ∫₀¹ r^{-0.99} dr = 100: needs the geometric tail
        let v = integrate_radial(|r| ExtReal::new(r.powf(-0.99)), 1.0).value();
        assert!((v - 100.0).abs() < 1e-6, "{v}");
        assert!(integrate_radial(|r| ExtReal::new(1.0 / r), 1.0).is_infinite());
        assert!(integrate_radial(|r| ExtReal::new(r.powf(-1.2)), 0.5).is_infinite());
    }

    #[test]
    fn pieces_with_singular_ends() {
        let f = |p: Point, _d: f64| ExtReal::new(p.x_minus(0.0).abs().powf(-0.5));
        let v = integrate_piece(f, 0.0, 1.0, true, false).value();
        assert!((v - 2.0).abs() < 1e-9);
        let g = |p: Point, _d: f64| ExtReal::new(p.x_minus(1.0).abs().powf(-0.5));
        let v = integrate_piece(g, 0.0, 1.0, false, true).value();
        assert!((v - 2.0).abs() < 1e-9);
        let d = integrate_piece(|_p, d| ExtReal::new(d), 2.0, 3.0, true, true).value();
        assert!((d - 0.5).abs() < 1e-9, "{d}");
    }
}
