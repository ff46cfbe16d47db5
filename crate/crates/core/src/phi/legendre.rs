//! Numerical Legendre transform and recession probe for arbitrary convex profiles.

use crate::extreal::ExtReal;

pub const GRID_POINTS: usize = 2048;
pub const T_MIN: f64 = 1e-6;
pub const T_MAX: f64 = 1e6;
const TAIL_TOL: f64 = 1e-6;
const T_LIMIT: f64 = 1e300;

/// `{0} ∪` a geometric grid of [`GRID_POINTS`] points on `[T_MIN, T_MAX]`.
pub fn t_grid() -> Vec<f64> {
    let mut g = Vec::with_capacity(GRID_POINTS + 1);
    g.push(0.0);
    let ratio = (T_MAX / T_MIN).ln() / (GRID_POINTS - 1) as f64;
    for k in 0..GRID_POINTS {
        g.push(T_MIN * (ratio * k as f64).exp());
    }
    g
}

/// Maximizes a unimodal function on `[a, b]`; returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `sup_{t ≥ 0} (st − φ(t))` for convex `φ` with `φ(0) = 0`.
pub fn legendre_transform(phi: impl Fn(f64) -> ExtReal, s: f64) -> ExtReal {
    if s <= 0.0 {
        return ExtReal::ZERO;
    }
    let grid = t_grid();
    let g = |t: f64| match phi(t).to_finite() {
        Some(v) => s * t - v,
        None => f64::NEG_INFINITY,
    };
    let (mut best_k, mut best) = (0, 0.0);
    for (k, &t) in grid.iter().enumerate() {
        let v = g(t);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    if best_k == grid.len() - 1 {
        // st − φ(t) is concave: past T_MAX, walk out until it turns down
        let mut t = T_MAX;
        loop {
            t *= 4.0;
            if t > T_LIMIT {
                return ExtReal::INFINITY;
            }
            let v = g(t);
            if v <= best {
                let (_, refined) = golden_max(g, t / 16.0, t, 200);
                return ExtReal::new(best.max(refined));
            }
            best = v;
        }
    }
    let lo = grid[best_k.saturating_sub(1)];
    let hi = grid[(best_k + 1).min(grid.len() - 1)];
    let (_, refined) = golden_max(g, lo, hi, 200);
    ExtReal::new(best.max(refined))
}

/// Generic recession probe: `φ(2ᵏ)/2ᵏ` for `k = 10..=40`.
pub fn recession_probe(phi: impl Fn(f64) -> ExtReal) -> ExtReal {
    let mut prev: Option<f64> = None;
    let mut last_ratio = 1.0;
    let mut last = 0.0;
    for k in 10..=40 {
        let t = (k as f64).exp2();
        let q = match phi(t).to_finite() {
            Some(v) => v / t,
            None => return ExtReal::INFINITY,
        };
        if let Some(p) = prev {
            last_ratio = if p > 0.0 { q / p } else if q > 0.0 { f64::INFINITY } else { 1.0 };
        }
        prev = Some(q);
        last = q;
    }
    if last > 1e9 || last_ratio > 1.0 + TAIL_TOL {
        ExtReal::INFINITY
    } else {
        ExtReal::new(last)
    }
}

/// `φ**(t)` by transforming the conjugate numerically over the same grid.
pub fn biconjugate(conj: impl Fn(f64) -> ExtReal, t: f64) -> ExtReal {
    legendre_transform(conj, t)
}
