use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RofResult {
    pub u: Vec<f64>,
    pub iterations: usize,
    /// Primal-dual gap at exit.
    pub gap: f64,
}

/// Discrete ROF `min Σ|u_{i+1} − u_i| + h Σ (u_i − f_i)²` by accelerated
/// projected gradient on the dual, stopped at relative gap `tol`.
pub fn rof_reference(f: &[f64], h: f64, tol: f64) -> RofResult {
    let n = f.len();
    if n < 2 {
        return RofResult { u: f.to_vec(), iterations: 0, gap: 0.0 };
    }
    let tau = 1.0 / (2.0 * h);
    let dt = |p: &[f64]| -> Vec<f64> {
        // Dᵀp for (Du)_i = u_{i+1} − u_i
        let mut out = vec![0.0; n];
        for (i, pi) in p.iter().enumerate() {
            out[i] -= pi;
            out[i + 1] += pi;
        }
        out
    };
    let primal = |u: &[f64]| -> f64 {
        let tv: f64 = u.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        tv + h * u.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    };
    let dual = |q: &[f64]| -> f64 {
        let fq: f64 = f.iter().zip(q).map(|(a, b)| a * b).sum();
        fq - 0.5 * tau * q.iter().map(|v| v * v).sum::<f64>()
    };
    let u_of = |q: &[f64]| -> Vec<f64> { f.iter().zip(q).map(|(a, b)| a - tau * b).collect() };
    let step = 1.0 / (4.0 * tau);
    let mut p = vec![0.0; n - 1];
    let mut y = p.clone();
    let mut t: f64 = 1.0;
    let mut prev_obj = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut it = 0;
    while it < 5_000_000 {
        it += 1;
        let q = dt(&y);
        let u = u_of(&q);
        // gradient of ½τ‖Dᵀp‖² − ⟨f, Dᵀp⟩ is −D u
        let mut pn: Vec<f64> = (0..n - 1).map(|i| (y[i] + step * (u[i + 1] - u[i])).clamp(-1.0, 1.0)).collect();
        let qn = dt(&pn);
        let obj = -dual(&qn);
        if obj > prev_obj {
            // adaptive restart
            t = 1.0;
            y.clone_from(&p);
            prev_obj = f64::INFINITY;
            continue;
        }
        prev_obj = obj;
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / tn;
        y = pn.iter().zip(&p).map(|(a, b)| a + beta * (a - b)).collect();
        std::mem::swap(&mut p, &mut pn);
        t = tn;
        if it % 16 == 0 {
            let un = u_of(&qn);
            let pv = primal(&un);
            gap = pv - dual(&qn);
            if gap <= tol * pv.abs().max(1.0) {
                break;
            }
        }
    }
    let u = u_of(&dt(&p));
    let gap = if gap.is_finite() { primal(&u) - dual(&dt(&p)) } else { gap };
    RofResult { u, iterations: it, gap }
}
