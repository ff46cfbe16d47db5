use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::phi::PhiFunction;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Damped Newton: tridiagonal solve in 1D, conjugate gradients in 2D.
    #[default]
    Newton,
    GradientDescent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub method: Method,
    pub max_iters: usize,
    /// Stop when the energy drops by less than `tol` (relative) over `window` iterations.
    pub tol: f64,
    pub window: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { method: Method::Newton, max_iters: 100_000, tol: 1e-9, window: 50 }
    }
}

#[derive(Clone, Debug)]
pub struct EnergySpec {
    pub phi: PhiFunction,
    pub domain: Domain,
    pub p: f64,
    pub f: Vec<f64>,
    /// Smoothing of `|·|`; `None` selects `1e-6 · range(f) / h`.
    pub eps_abs: Option<f64>,
    pub options: SolverOptions,
}

impl EnergySpec {
    pub fn new(phi: PhiFunction, domain: Domain, p: f64, f: Vec<f64>) -> Result<Self> {
        if f.len() != domain.cells() {
            return Err(Error::Shape { expected: domain.cells(), got: f.len() });
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Input(format!("p must be ≥ 1, got {p}")));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("data must be finite".into()));
        }
        Ok(EnergySpec { phi, domain, p, f, eps_abs: None, options: SolverOptions::default() })
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_abs = Some(eps);
        self
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps_abs.unwrap_or_else(|| {
            let (lo, hi) = self.f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let h = match &self.domain {
                Domain::Interval(iv) => iv.h(),
                Domain::Rect(r) => r.x.h().min(r.y.h()),
            };
            1e-6 * (hi - lo) / h
        })
    }
}

/// Per-cell pieces of the discretized energy.
struct Grid {
    centers: Vec<Point>,
    cm: f64,
    /// `(nx, ny, hx, hy)`; `ny = 1` in 1D.
    shape: (usize, usize, f64, f64),
}

impl Grid {
    fn new(d: &Domain) -> Self {
        let shape = match d {
            Domain::Interval(iv) => (iv.n, 1, iv.h(), 1.0),
            Domain::Rect(r) => (r.x.n, r.y.n, r.x.h(), r.y.h()),
        };
        Grid { centers: d.centers(), cm: d.cell_measure(), shape }
    }

    fn two_d(&self) -> bool {
        self.shape.1 > 1
    }

    /// Forward differences `(g_x, g_y)` per cell, zero on the last row/column.
    fn grad(&self, u: &[f64]) -> Vec<(f64, f64)> {
        let (nx, ny, hx, hy) = self.shape;
        let mut g = vec![(0.0, 0.0); nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if i + 1 < nx {
                    g[k].0 = (u[k + 1] - u[k]) / hx;
                }
                if j + 1 < ny {
                    g[k].1 = (u[k + nx] - u[k]) / hy;
                }
            }
        }
        g
    }

    /// Adjoint of [`Grid::grad`].
    fn grad_t(&self, q: &[(f64, f64)], out: &mut [f64]) {
        let (nx, ny, hx, hy) = self.shape;
        out.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if i + 1 < nx {
                    out[k + 1] += q[k].0 / hx;
                    out[k] -= q[k].0 / hx;
                }
                if j + 1 < ny {
                    out[k + nx] += q[k].1 / hy;
                    out[k] -= q[k].1 / hy;
                }
            }
        }
    }
}

/// `ψ(t) = φ(x, t)^p` and its first two derivatives in `t`.
fn psi(phi: &PhiFunction, x: &Point, p: f64, t: f64) -> (f64, f64, f64) {
    let v = phi.value(x, t).value();
    if v == 0.0 {
        let d1 = phi.left_derivative(x, t).value();
        return (0.0, if p == 1.0 { d1 } else { 0.0 }, f64::INFINITY);
    }
    let d1 = phi.left_derivative(x, t).value();
    let d2 = phi.second_derivative(x, t);
    let lv = v.ln();
    // exp(p log φ) with the 0 case handled above
    let vp = (p * lv).exp();
    let vp1 = ((p - 1.0) * lv).exp();
    let vp2 = ((p - 2.0) * lv).exp();
    (vp, p * vp1 * d1, p * (p - 1.0) * vp2 * d1 * d1 + p * vp1 * d2)
}

fn smooth_abs(g: (f64, f64), eps: f64) -> (f64, f64) {
    let r = (g.0 * g.0 + g.1 * g.1 + eps * eps).sqrt();
    (r - eps, r)
}

/// `F_p(u)` with forward differences, midpoint quadrature and the smoothed magnitude.
pub fn energy_fp(spec: &EnergySpec, u: &[f64]) -> Result<f64> {
    if u.len() != spec.f.len() {
        return Err(Error::Shape { expected: spec.f.len(), got: u.len() });
    }
    let grid = Grid::new(&spec.domain);
    Ok(energy_on(spec, &grid, spec.eps(), u))
}

fn energy_on(spec: &EnergySpec, grid: &Grid, eps: f64, u: &[f64]) -> f64 {
    let g = grid.grad(u);
    let reg: Vec<f64> = g
        .par_iter()
        .zip(&grid.centers)
        .map(|(gk, x)| {
            let (s, _) = smooth_abs(*gk, eps);
            if s == 0.0 {
                0.0
            } else {
                psi(&spec.phi, x, spec.p, s).0
            }
        })
        .collect();
    let fid: f64 = u.iter().zip(&spec.f).map(|(a, b)| (a - b) * (a - b)).sum();
    (reg.iter().sum::<f64>() + fid) * grid.cm
}

/// Gradient of the energy plus the per-cell curvature of the regularizer
/// with respect to `(g_x, g_y)` as a symmetric 2×2 block `(xx, xy, yy)`.
fn derivatives(spec: &EnergySpec, grid: &Grid, eps: f64, u: &[f64]) -> (Vec<f64>, Vec<(f64, f64, f64)>) {
    let g = grid.grad(u);
    let h2 = grid.shape.2.min(grid.shape.3).powi(2);
    // cap on the curvature so the linear systems stay well posed near g = 0
    let cap = 1e10 * h2;
    let parts: Vec<((f64, f64), (f64, f64, f64))> = g
        .par_iter()
        .zip(&grid.centers)
        .map(|(gk, x)| {
            let (s, r) = smooth_abs(*gk, eps);
            let (_, d1, d2) = psi(&spec.phi, x, spec.p, s);
            if r == 0.0 {
                return ((0.0, 0.0), (cap, 0.0, cap));
            }
            let (nx, ny) = (gk.0 / r, gk.1 / r);
            let q = (d1 * nx, d1 * ny);
            let d2 = if d2.is_finite() { d2 } else { cap };
            let t = d1 / r;
            let mut hxx = d2 * nx * nx + t * (1.0 - nx * nx);
            let hxy = d2 * nx * ny - t * nx * ny;
            let mut hyy = d2 * ny * ny + t * (1.0 - ny * ny);
            hxx = hxx.min(cap);
            hyy = hyy.min(cap);
            (q, (hxx, hxy.clamp(-cap, cap), hyy))
        })
        .collect();
    let q: Vec<(f64, f64)> = parts.iter().map(|p| p.0).collect();
    let mut grad = vec![0.0; u.len()];
    grid.grad_t(&q, &mut grad);
    for (k, gk) in grad.iter_mut().enumerate() {
        *gk = (*gk + 2.0 * (u[k] - spec.f[k])) * grid.cm;
    }
    (grad, parts.into_iter().map(|p| p.1).collect())
}

/// Solves `(2·I + Dᵀ W D) d = −grad/cm` for the Newton direction.
fn newton_direction(grid: &Grid, grad: &[f64], w: &[(f64, f64, f64)]) -> Vec<f64> {
    let n = grad.len();
    let rhs: Vec<f64> = grad.iter().map(|g| -g / grid.cm).collect();
    if !grid.two_d() {
        let h = grid.shape.2;
        let mut diag = vec![2.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            let k = w[i].0 / (h * h);
            diag[i] += k;
            diag[i + 1] += k;
            off[i] = -k;
        }
        return thomas(&diag, &off, &rhs);
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        let dv = grid.grad(v);
        let wq: Vec<(f64, f64)> = dv.iter().zip(w).map(|(d, c)| (c.0 * d.0 + c.1 * d.1, c.1 * d.0 + c.2 * d.1)).collect();
        grid.grad_t(&wq, out);
        for (o, vi) in out.iter_mut().zip(v) {
            *o += 2.0 * vi;
        }
    };
    let (nx, ny, hx, hy) = grid.shape;
    let mut pre = vec![2.0; n];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if i + 1 < nx {
                pre[k] += w[k].0 / (hx * hx);
                pre[k + 1] += w[k].0 / (hx * hx);
            }
            if j + 1 < ny {
                pre[k] += w[k].2 / (hy * hy);
                pre[k + nx] += w[k].2 / (hy * hy);
            }
        }
    }
    conjugate_gradient(apply, &rhs, &pre, 400, 1e-10)
}

fn thomas(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut b = diag[0];
    c[0] = if n > 1 { off[0] / b } else { 0.0 };
    d[0] = rhs[0] / b;
    for i in 1..n {
        b = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / b;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / b;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Jacobi-preconditioned conjugate gradients.
fn conjugate_gradient(apply: impl Fn(&[f64], &mut [f64]), b: &[f64], pre: &[f64], iters: usize, tol: f64) -> Vec<f64> {
    let n = b.len();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(pre).map(|(a, p)| a / p).collect();
    let mut dir = z.clone();
    let mut rz = dot(&r, &z);
    let b2 = dot(b, b).sqrt();
    let mut ad = vec![0.0; n];
    for _ in 0..iters {
        if dot(&r, &r).sqrt() <= tol * b2 {
            break;
        }
        apply(&dir, &mut ad);
        let den = dot(&dir, &ad);
        if !(den > 0.0) {
            break;
        }
        let alpha = rz / den;
        for i in 0..n {
            x[i] += alpha * dir[i];
            r[i] -= alpha * ad[i];
        }
        z = r.iter().zip(pre).map(|(a, p)| a / p).collect();
        let rz2 = dot(&r, &z);
        let beta = rz2 / rz;
        rz = rz2;
        for i in 0..n {
            dir[i] = z[i] + beta * dir[i];
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub u: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    /// Iteration cap reached before the stopping rule fired.
    pub capped: bool,
    /// Energy after each accepted iterate, starting with the initial guess.
    pub trace: Vec<f64>,
}

/// Minimizes `F_p` starting from `f`.
pub fn minimize_fp(spec: &EnergySpec) -> Result<Minimizer> {
    minimize_fp_from(spec, &spec.f)
}

/// Descent with Armijo backtracking from `u0`; accepted iterates never
/// increase the energy.
pub fn minimize_fp_from(spec: &EnergySpec, u0: &[f64]) -> Result<Minimizer> {
    if u0.len() != spec.f.len() {
        return Err(Error::Shape { expected: spec.f.len(), got: u0.len() });
    }
    if !(spec.p > 1.0) {
        return Err(Error::Input(format!("minimization needs p > 1, got {}", spec.p)));
    }
    let grid = Grid::new(&spec.domain);
    let eps = spec.eps();
    let opt = spec.options;
    let mut u = u0.to_vec();
    let mut e = energy_on(spec, &grid, eps, &u);
    let mut trace = vec![e];
    let mut gd_step = 1.0 / grid.cm;
    let mut iterations = 0;
    let mut capped = true;
    while iterations < opt.max_iters {
        iterations += 1;
        let (grad, w) = derivatives(spec, &grid, eps, &u);
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2 == 0.0 {
            capped = false;
            break;
        }
        let mut dirs = Vec::with_capacity(2);
        if opt.method == Method::Newton {
            dirs.push((newton_direction(&grid, &grad, &w), 1.0));
        }
        dirs.push((grad.iter().map(|g| -g).collect::<Vec<_>>(), gd_step));
        let mut accepted = None;
        for (d, t0) in dirs {
            let slope: f64 = grad.iter().zip(&d).map(|(g, di)| g * di).sum();
            if !(slope < 0.0) {
                continue;
            }
            let mut t = t0;
            for _ in 0..60 {
                let cand: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                let ec = energy_on(spec, &grid, eps, &cand);
                if ec <= e + 1e-4 * t * slope {
                    accepted = Some((cand, ec, t, t0));
                    break;
                }
                t *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
        }
        let Some((cand, ec, t, t0)) = accepted else {
            // no decrease at working precision
            capped = false;
            break;
        };
        if t0 == gd_step {
            gd_step = if t == t0 { 2.0 * t } else { t };
        }
        u = cand;
        e = ec;
        trace.push(e);
        let k = trace.len() - 1;
        if k >= opt.window {
            let old = trace[k - opt.window];
            if old - e <= opt.tol * e.abs().max(f64::MIN_POSITIVE) {
                capped = false;
                break;
            }
        }
    }
    let energy = energy_on(spec, &grid, eps, &u);
    Ok(Minimizer { u, energy, iterations, capped, trace })
}
