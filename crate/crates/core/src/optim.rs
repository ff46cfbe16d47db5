//! One-dimensional and low-dimensional derivative-free maximizers.

pub use crate::phi::legendre::golden_max;

/// Maximizes a concave function starting from `x0`: expands a bracket with
/// geometric steps (`−∞` values count as descent), then golden-section.
pub fn concave_max(f: impl Fn(f64) -> f64, x0: f64, step0: f64, iters: usize) -> (f64, f64) {
    let f0 = f(x0);
    let mut step = step0.max(1e-12);
    let (fr, fl) = (f(x0 + step), f(x0 - step));
    let dir = if fr > f0 && fr >= fl {
        1.0
    } else if fl > f0 {
        -1.0
    } else {
        // maximum inside [x0 − step, x0 + step]
        let (x, v) = golden_max(&f, x0 - step, x0 + step, iters);
        return if v > f0 { (x, v) } else { (x0, f0) };
    };
    let (mut a, mut b, mut fb) = (x0, x0 + dir * step, if dir > 0.0 { fr } else { fl });
    for _ in 0..200 {
        step *= 2.0;
        let c = b + dir * step;
        let fc = f(c);
        if !(fc > fb) {
            let (lo, hi) = if dir > 0.0 { (a, c) } else { (c, a) };
            let (x, v) = golden_max(&f, lo, hi, iters);
            return if v >= fb { (x, v) } else { (b, fb) };
        }
        a = b;
        b = c;
        fb = fc;
    }
    (b, fb)
}

/// Nelder–Mead maximization on `ℝᵈ` for a fixed number of steps.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], scale: &[f64], steps: usize) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += scale[i];
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| b.1.total_cmp(&a.1));
    for _ in 0..steps {
        sort(&mut simplex);
        let centroid: Vec<f64> = (0..d).map(|i| simplex[..d].iter().map(|p| p.0[i]).sum::<f64>() / d as f64).collect();
        let worst = simplex[d].clone();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|i| centroid[i] + t * (worst.0[i] - centroid[i])).collect() };
        let refl = along(-1.0);
        let fr = f(&refl);
        if fr > simplex[0].1 {
            let exp = along(-2.0);
            let fe = f(&exp);
            simplex[d] = if fe > fr { (exp, fe) } else { (refl, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (refl, fr);
        } else {
            let con = if fr > worst.1 { along(-0.5) } else { along(0.5) };
            let fc = f(&con);
            if fc > worst.1.max(fr) {
                simplex[d] = (con, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = (0..d).map(|i| best[i] + 0.5 * (p.0[i] - best[i])).collect();
                    let fv = f(&v);
                    *p = (v, fv);
                }
            }
        }
    }
    sort(&mut simplex);
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concave_bracketing() {
        let (x, v) = concave_max(|x| -(x - 7.3) * (x - 7.3), 0.0, 0.1, 100);
        assert!((x - 7.3).abs() < 1e-6 && v > -1e-10);
        // constrained to |x| ≤ 1 by −∞
        let (x, _) = concave_max(|x| if x.abs() > 1.0 { f64::NEG_INFINITY } else { x }, 0.2, 0.1, 100);
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn simplex_search() {
        let (x, v) = nelder_mead(|p| -(p[0] - 1.0).powi(2) - 3.0 * (p[1] + 2.0).powi(2), &[0.0, 0.0], &[0.5, 0.5], 200);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4 && v > -1e-7);
    }
}
