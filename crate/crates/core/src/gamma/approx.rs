use crate::bv::{modular_exact, BVFunction};
use crate::domain::Point;
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::mollifier::{eta_delta, mass};
use crate::phi::PhiFunction;
use crate::quadrature::integrate_split;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxStep {
    pub delta_requested: f64,
    pub delta: f64,
    /// `ρ_φ(|∇u_δ|)`.
    pub modular: ExtReal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxTrace {
    pub steps: Vec<ApproxStep>,
    /// Closed-form modular of `u`.
    pub exact: ExtReal,
}

/// `ρ_φ(|∇(u ∗ η_δ)|)` for each `δ`. The gradient of the mollified function is
/// `(∇ᵃu ∗ η_δ) + Σ sᵢ η_δ(· − xᵢ)`, with `∇ᵃu` extended by zero outside the
/// interval. Widths wider than half the distance from an atom to the boundary
/// are reduced to it.
pub fn smooth_approximation(phi: &PhiFunction, u: &BVFunction, deltas: &[f64]) -> Result<ApproxTrace> {
    let iv = *u.domain().as_interval()?;
    let exact = modular_exact(phi, u).total;
    let g = u.gradient();
    let atoms = u.atoms();
    let mut sing = phi.singular_points();
    sing.extend(atoms.iter().map(|a| a.x));
    sing.sort_by(f64::total_cmp);
    sing.dedup();
    let room = atoms.iter().map(|a| (a.x - iv.lo).min(iv.hi - a.x)).fold(f64::INFINITY, f64::min);
    let mut steps = Vec::new();
    for &requested in deltas {
        let mut delta = requested;
        let mut note = None;
        if 2.0 * delta > room {
            delta = 0.5 * room;
            note = Some(format!("width reduced to {delta:e} to keep atoms 2δ from the boundary"));
        }
        let h = iv.h();
        let slope = |p: &Point| -> f64 {
            let x = p.x_value();
            let lo = (((x - delta - iv.lo) / h).floor().max(0.0) as usize).min(iv.n);
            let hi = ((((x + delta - iv.lo) / h).ceil().max(0.0)) as usize).min(iv.n);
            let mut v = 0.0;
            for j in lo..hi {
                if g[j] != 0.0 {
                    v += g[j] * mass(x, iv.node(j), iv.node(j + 1), delta);
                }
            }
            for a in atoms {
                let d = p.x_minus(a.x);
                if d.abs() < delta {
                    v += a.jump * eta_delta(d, delta);
                }
            }
            v
        };
        let mut cuts: Vec<f64> = Vec::with_capacity(3 * iv.n + 4 * atoms.len());
        for k in 0..=iv.n {
            let x = iv.node(k);
            cuts.extend([x - delta, x, x + delta]);
        }
        for a in atoms {
            cuts.extend([a.x - delta, a.x + delta]);
        }
        cuts.extend(sing.iter().copied());
        cuts.retain(|c| *c >= iv.lo && *c <= iv.hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = ExtReal::ZERO;
        for w in cuts.windows(2) {
            total += integrate_split(|p, _| phi.value(&p, slope(&p).abs()), w[0], w[1], &sing);
            if total.is_infinite() {
                break;
            }
        }
        steps.push(ApproxStep { delta_requested: requested, delta, modular: total, note });
    }
    Ok(ApproxTrace { steps, exact })
}
