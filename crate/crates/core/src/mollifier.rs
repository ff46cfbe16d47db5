//! The standard mollifier `η(z) = C exp(−1/(1 − z²))` on `(−1, 1)` and its
//! first two antiderivatives, tabulated once with Hermite interpolation.

use crate::quadrature::integrate_real;
use std::sync::OnceLock;

const NODES: usize = 4096;

fn bare(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - z * z)).exp()
    }
}

struct Tables {
    norm: f64,
    /// `H(z_k) = ∫_{-1}^{z_k} η`
    h: Vec<f64>,
    /// `G(z_k) = ∫_{-1}^{z_k} H`
    g: Vec<f64>,
}

fn node(k: usize) -> f64 {
    -1.0 + 2.0 * k as f64 / NODES as f64
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let norm = 1.0 / integrate_real(bare, -1.0, 1.0);
        let mut h = vec![0.0; NODES + 1];
        for k in 1..=NODES {
            h[k] = h[k - 1] + norm * integrate_real(bare, node(k - 1), node(k));
        }
        let scale = h[NODES];
        h.iter_mut().for_each(|v| *v /= scale);
        let step = 2.0 / NODES as f64;
        let mut g = vec![0.0; NODES + 1];
        for k in 1..=NODES {
            // Hermite-exact integral of H over one cell: (h0 + h1)/2·Δ + (η0 − η1)Δ²/12
            let (e0, e1) = (norm * bare(node(k - 1)), norm * bare(node(k)));
            g[k] = g[k - 1] + (h[k - 1] + h[k]) * step / 2.0 + (e0 - e1) * step * step / 12.0;
        }
        Tables { norm, h, g }
    })
}

/// Cubic Hermite interpolation on the node table.
fn hermite(vals: &[f64], ders: impl Fn(f64) -> f64, z: f64) -> f64 {
    let step = 2.0 / NODES as f64;
    let u = (z + 1.0) / step;
    let k = (u.floor() as usize).min(NODES - 1);
    let s = u - k as f64;
    let (z0, z1) = (node(k), node(k + 1));
    let (h00, h10, h01, h11) = (
        2.0 * s * s * s - 3.0 * s * s + 1.0,
        s * s * s - 2.0 * s * s + s,
        -2.0 * s * s * s + 3.0 * s * s,
        s * s * s - s * s,
    );
    h00 * vals[k] + h10 * step * ders(z0) + h01 * vals[k + 1] + h11 * step * ders(z1)
}

/// `η(z)`, normalized to unit mass.
pub fn eta(z: f64) -> f64 {
    tables().norm * bare(z)
}

/// `η_δ(x) = η(x/δ)/δ`.
pub fn eta_delta(x: f64, delta: f64) -> f64 {
    eta(x / delta) / delta
}

/// `H(z) = ∫_{-∞}^z η`.
pub fn cdf(z: f64) -> f64 {
    if z <= -1.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        hermite(&tables().h, eta, z)
    }
}

/// `G(z) = ∫_{-∞}^z H`; equals `z` for `z ≥ 1` by symmetry of `η`.
pub fn cdf2(z: f64) -> f64 {
    if z <= -1.0 {
        0.0
    } else if z >= 1.0 {
        z
    } else {
        hermite(&tables().g, cdf, z)
    }
}

/// `∫_a^b η_δ(x − y) dy`.
pub fn mass(x: f64, a: f64, b: f64, delta: f64) -> f64 {
    cdf((x - a) / delta) - cdf((x - b) / delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_symmetry() {
        assert!((integrate_real(eta, -1.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((eta(0.0) - 2.252_283_6 * (-1f64).exp()).abs() < 1e-6);
        for z in [-0.9, -0.3, 0.0, 0.41, 0.77] {
            assert!((cdf(z) + cdf(-z) - 1.0).abs() < 1e-12);
            let direct = integrate_real(eta, -1.0, z);
            assert!((cdf(z) - direct).abs() < 1e-12, "{z}");
        }
        assert!((cdf2(1.0 - 1e-12) - 1.0).abs() < 1e-10);
        let z = 0.2;
        let direct = integrate_real(cdf, -1.0, z);
        assert!((cdf2(z) - direct).abs() < 1e-10);
    }
}
