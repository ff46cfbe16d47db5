use super::energy::{minimize_fp_from, EnergySpec, SolverOptions};
use crate::bv::{modular_fidelity, Atom, BVFunction, ModularReport};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::phi::PhiFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Flag raised when the atomized limit has infinite dual modular.
pub const NOT_IN_BV_PHI: &str = "limit not in BV^phi";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    /// Schedule `p_k = 1 + 2^{-k}`, `k = 1..=kmax`, at most 12.
    pub kmax: usize,
    /// Jump threshold override.
    pub theta: Option<f64>,
    pub eps_abs: Option<f64>,
    pub solver: SolverOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { kmax: 8, theta: None, eps_abs: None, solver: SolverOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub k: usize,
    pub p: f64,
    pub energy: f64,
    pub iterations: usize,
    pub capped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaProbe {
    pub theta: f64,
    pub atoms: usize,
    pub target: ExtReal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schedule: Vec<f64>,
    pub energies: Vec<f64>,
    pub steps: Vec<SweepStep>,
    /// Last minimizer.
    pub limit: Vec<f64>,
    pub theta: f64,
    pub jump_atoms: Vec<Atom>,
    /// Number of jump edges (2D).
    pub jump_edges: usize,
    /// `ρ^f` of the atomized limit.
    pub limit_modular: ModularReport,
    /// `E_K − ρ^f`, absent when `ρ^f = ∞`.
    pub gap: Option<f64>,
    pub relative_gap: Option<f64>,
    /// The same target at `θ/2` and `2θ`.
    pub sensitivity: Vec<ThetaProbe>,
    pub flags: Vec<String>,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn differences(domain: &Domain, u: &[f64]) -> Vec<f64> {
    match domain {
        Domain::Interval(_) => u.windows(2).map(|w| (w[1] - w[0]).abs()).collect(),
        Domain::Rect(r) => {
            let mut d = Vec::new();
            for j in 0..r.y.n {
                for i in 0..r.x.n {
                    let k = r.index(i, j);
                    if i + 1 < r.x.n {
                        d.push((u[r.index(i + 1, j)] - u[k]).abs());
                    }
                    if j + 1 < r.y.n {
                        d.push((u[r.index(i, j + 1)] - u[k]).abs());
                    }
                }
            }
            d
        }
    }
}

/// `max(5 · median |Δu|, 0.1 · range(u))`. The range floor keeps smooth
/// regions from being atomized when most differences vanish.
pub fn jump_threshold(domain: &Domain, u: &[f64]) -> f64 {
    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let range = if u.is_empty() { 0.0 } else { hi - lo };
    (5.0 * median(differences(domain, u))).max(0.1 * range)
}

fn atomized(domain: &Domain, u: &[f64], theta: f64) -> Result<BVFunction> {
    match domain {
        Domain::Interval(_) => BVFunction::atomize(*domain, u.to_vec(), theta),
        Domain::Rect(_) => BVFunction::atomize_image(*domain, u.to_vec(), theta),
    }
}

/// Minimizes `F_{p_k}` along `p_k = 1 + 2^{-k}` with warm starts, atomizes the
/// last minimizer and compares `E_K` with `ρ^f` of the result.
pub fn gamma_sweep(phi: &PhiFunction, domain: &Domain, f: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    if opts.kmax == 0 || opts.kmax > 12 {
        return Err(Error::Input(format!("kmax must be in 1..=12, got {}", opts.kmax)));
    }
    if let Domain::Rect(r) = domain {
        if r.x.n > 128 || r.y.n > 128 {
            return Err(Error::Input("2D sweeps are limited to 128×128".into()));
        }
    }
    let mut u = f.to_vec();
    let mut steps = Vec::new();
    let mut flags = Vec::new();
    for k in 1..=opts.kmax {
        let p = 1.0 + 0.5f64.powi(k as i32);
        let mut spec = EnergySpec::new(phi.clone(), *domain, p, f.to_vec())?.with_options(opts.solver);
        spec.eps_abs = opts.eps_abs;
        let m = minimize_fp_from(&spec, &u)?;
        if m.capped {
            flags.push(format!("iteration cap reached at k = {k}"));
        }
        steps.push(SweepStep { k, p, energy: m.energy, iterations: m.iterations, capped: m.capped });
        u = m.u;
    }
    let theta = opts.theta.unwrap_or_else(|| jump_threshold(domain, &u));
    let target = |th: f64| -> Result<(BVFunction, ModularReport)> {
        let v = atomized(domain, &u, th)?;
        let r = modular_fidelity(phi, &v, f)?;
        Ok((v, r))
    };
    let (v, limit_modular) = target(theta)?;
    let mut sensitivity = Vec::new();
    for th in [0.5 * theta, 2.0 * theta] {
        let (w, r) = target(th)?;
        sensitivity.push(ThetaProbe { theta: th, atoms: w.atoms().len() + w.edges().len(), target: r.total });
    }
    let last = steps.last().map_or(0.0, |s| s.energy);
    let (gap, relative_gap) = match limit_modular.total.to_finite() {
        Some(rho) => {
            let g = last - rho;
            let rel = if rho > 0.0 { g.abs() / rho } else if g == 0.0 { 0.0 } else { f64::INFINITY };
            (Some(g), Some(rel))
        }
        None => {
            flags.push(NOT_IN_BV_PHI.to_string());
            (None, None)
        }
    };
    Ok(SweepResult {
        schedule: steps.iter().map(|s| s.p).collect(),
        energies: steps.iter().map(|s| s.energy).collect(),
        steps,
        limit: u,
        theta,
        jump_atoms: v.atoms().to_vec(),
        jump_edges: v.edges().len(),
        limit_modular,
        gap,
        relative_gap,
        sensitivity,
        flags,
    })
}

/// `height · χ_{x ≥ at}` sampled at cell centers plus Gaussian noise.
pub fn noisy_step(domain: &Domain, at: f64, height: f64, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    let iv = domain.as_interval()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::Input(e.to_string()))?;
    Ok(iv.centers().into_iter().map(|x| if x >= at { height } else { 0.0 } + noise.sample(&mut rng)).collect())
}
