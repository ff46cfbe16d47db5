//! Direct evaluation of the dual modular `ρ_{V,φ}` and the dual norm `V_φ`
//! by supremum over discrete test fields.
//!
//! Every returned value is attained by an explicit admissible field, so it is
//! a certified lower bound of the supremum. Duality is one-dimensional.

mod problem;
mod testfield;

pub use testfield::{Bump, TestField};

use crate::bv::{modular_exact, BVFunction};
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::extreal::{signed, ExtReal};
use crate::optim::{concave_max, golden_max, nelder_mead};
use crate::phi::PhiFunction;
use crate::quadrature::integrate_split_radial;
use problem::{Cell, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchFamily {
    Nodal,
    Bump,
    #[default]
    Both,
}

/// Search configuration; JSON `{family, resolution, delta_min, iters, seed}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Strategy {
    pub family: SearchFamily,
    /// Test-field nodes per grid cell.
    pub resolution: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Cap on coordinate-ascent sweeps.
    pub iters: usize,
    pub seed: u64,
    /// Relative improvement per sweep below which ascent stops.
    pub tol: f64,
    /// Local refinement steps after the coarse bump grid.
    pub refine_steps: usize,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy {
            family: SearchFamily::Both,
            resolution: 1,
            delta_min: 1e-4,
            delta_max: 0.3,
            iters: 200,
            seed: 0,
            tol: 1e-10,
            refine_steps: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualEstimate {
    pub value: f64,
    pub optimizer: TestField,
    pub iterations: usize,
    /// Coordinate ascent stopped at the sweep cap.
    pub capped: bool,
    /// `modular_exact − value`, when the closed form is available.
    #[serde(with = "signed_opt")]
    pub gap_vs_exact: Option<f64>,
}

mod signed_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::extreal::signed")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// `∫ ∇ᵃu · w dx + Σ_i s_i w(x_i)`; for the Heaviside this is `w(x₀)`.
pub fn dual_pairing(u: &BVFunction, w: &TestField) -> Result<f64> {
    let phi = PhiFunction::linear();
    let pb = Problem::new(&phi, u, w.grid().n / u.domain().cells().max(1))?;
    pb.check_grid(w)?;
    Ok(pb.pairing(w, &pb.geometry(w.bumps())))
}

/// `dual_pairing − ρ_{φ*}(|w|)`, or `−∞` when the conjugate modular is infinite.
pub fn dual_objective(phi: &PhiFunction, u: &BVFunction, w: &TestField) -> Result<f64> {
    let pb = Problem::new(phi, u, w.grid().n / u.domain().cells().max(1))?;
    pb.check_grid(w)?;
    Ok(pb.objective(w))
}

/// `ρ_{φ*}(|w|)` for a test field on the grid refining `domain`.
pub fn conjugate_modular(phi: &PhiFunction, domain: &Domain, w: &TestField) -> Result<ExtReal> {
    let iv = *domain.as_interval()?;
    let u = BVFunction::from_parts(*domain, vec![0.0; iv.n], vec![0.0; iv.n], vec![])?;
    let pb = Problem::new(phi, &u, w.grid().n / iv.n.max(1))?;
    pb.check_grid(w)?;
    Ok(pb.conj_modular(w, &pb.geometry(w.bumps()), 1.0))
}

/// Grid for test fields with `resolution` nodes per cell of `domain`.
pub fn field_grid(domain: &Domain, resolution: usize) -> Result<crate::domain::Interval> {
    let iv = domain.as_interval()?;
    crate::domain::Interval::new(iv.lo, iv.hi, iv.n * resolution.max(1))
}

/// Young-equality warm start `w = φ'(x, |∇ᵃu|/λ) sign(∇ᵃu)`; atom nodes get
/// `sign(s) φ'_∞` (or the neighbouring magnitude when that is infinite).
fn warm_start(pb: &Problem, lambda: f64) -> Vec<f64> {
    let n_f = pb.grid.n;
    let r = pb.resolution();
    let grad = pb.u.gradient();
    let slope = |x: f64, g: f64| -> f64 {
        if g == 0.0 {
            return 0.0;
        }
        let d = pb.phi.left_derivative(&Point::at(x), g.abs() / lambda).to_finite().unwrap_or(0.0);
        d * g.signum()
    };
    let eps = 1e-9 * pb.grid.h();
    // one-sided recession so that nodes on a coefficient jump stay feasible on both sides
    let cap = |x: f64| -> f64 {
        let a = pb.phi.recession(&Point::at(x - eps)).value();
        let b = pb.phi.recession(&Point::at(x + eps)).value();
        a.min(b)
    };
    let mut w = vec![0.0; n_f + 1];
    for (m, wm) in w.iter_mut().enumerate().take(n_f - 1).skip(2) {
        let x = pb.grid.node(m);
        let v = if m % r != 0 {
            slope(x, grad[m / r])
        } else {
            let k = m / r;
            0.5 * (slope(x - eps, grad[k - 1]) + slope(x + eps, grad[k]))
        };
        let c = cap(x);
        *wm = v.clamp(-c, c);
    }
    for &(m, x, s) in &pb.atoms {
        if m < 2 || m > n_f - 2 || s == 0.0 {
            continue;
        }
        let rec = pb.phi.recession(&Point::at(x));
        let mag = rec.to_finite().unwrap_or_else(|| w[m - 1].abs().max(w[m + 1].abs()).max(1.0));
        w[m] = s.signum() * mag;
    }
    w
}

fn feasible_start(pb: &Problem, field: &mut TestField, geom: &[Cell]) -> f64 {
    for _ in 0..60 {
        let v = pb.objective_with(field, geom);
        if v > f64::NEG_INFINITY {
            return v;
        }
        field.nodal_mut().iter_mut().for_each(|x| *x *= 0.5);
    }
    field.nodal_mut().iter_mut().for_each(|x| *x = 0.0);
    pb.objective_with(field, geom)
}

/// Red-black coordinate ascent on the nodal values with the bumps held fixed.
/// Returns `(sweeps, capped)`.
fn nodal_ascent(pb: &Problem, field: &mut TestField, geom: &[Cell], st: &Strategy) -> (usize, bool) {
    let n_f = pb.grid.n;
    let atom_at: Vec<Option<(f64, f64)>> = {
        let mut v = vec![None; n_f + 1];
        for &(m, x, s) in &pb.atoms {
            let b: f64 = field.bumps().iter().map(|b| b.at(b.dist(x, 0.0))).sum();
            v[m] = Some((s, b));
        }
        v
    };
    let mut value = pb.objective_with(field, geom);
    for sweep in 1..=st.iters {
        for color in 0..2 {
            let nodal = field.nodal().to_vec();
            let updates: Vec<(usize, f64)> = (2..n_f - 1)
                .into_par_iter()
                .filter(|m| m % 2 == color)
                .map(|m| {
                    let (l, r) = (nodal[m - 1], nodal[m + 1]);
                    let local = |w: f64| {
                        let a = pb.cell_value(&geom[m - 1], l, w);
                        if a == f64::NEG_INFINITY {
                            return a;
                        }
                        let b = pb.cell_value(&geom[m], w, r);
                        let atom = atom_at[m].map_or(0.0, |(s, bump)| s * (w + bump));
                        a + b + atom
                    };
                    let cur = nodal[m];
                    let f0 = local(cur);
                    let (x, v) = concave_max(local, cur, (0.25 * cur.abs()).max(1e-3), 48);
                    if v > f0 {
                        (m, x)
                    } else {
                        (m, cur)
                    }
                })
                .collect();
            let nm = field.nodal_mut();
            for (m, x) in updates {
                nm[m] = x;
            }
        }
        let next = pb.objective_with(field, geom);
        let gain = next - value;
        value = next.max(value);
        if gain <= st.tol * (1.0 + value.abs()) {
            return (sweep, false);
        }
    }
    (st.iters, true)
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|k| lo * (step * k as f64).exp()).collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Best bump around `center` under `score` (larger is better, `−∞` inadmissible).
/// Coarse grid over `(M, δ)` with `δ' = δ/2` and both orientations, then
/// simplex refinement in `(log M, log δ, logit δ'/δ)`.
fn bump_search(
    center: f64,
    delta_hi: f64,
    st: &Strategy,
    heights: &[f64],
    deltas: usize,
    score: &(dyn Fn(&Bump) -> f64 + Sync),
) -> Option<(Bump, f64)> {
    let dmax = st.delta_max.min(delta_hi);
    if dmax < st.delta_min {
        return None;
    }
    let ds = geometric(st.delta_min, dmax, deltas);
    let mut cands = Vec::new();
    for &sign in &[1.0, -1.0] {
        for &m in heights {
            for &d in &ds {
                cands.push(Bump { center, delta: d, plateau: 0.5 * d, height: sign * m });
            }
        }
    }
    let scored: Vec<f64> = cands.par_iter().map(|b| score(b)).collect();
    let (bi, bv) = scored
        .iter()
        .enumerate()
        .fold((usize::MAX, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if bi == usize::MAX {
        return None;
    }
    let best = cands[bi];
    let sign = best.height.signum();
    let to_bump = |x: &[f64]| -> Option<Bump> {
        let d = x[1].exp();
        if !(d >= st.delta_min && d <= dmax) {
            return None;
        }
        let (plateau, height) = (d * sigmoid(x[2]), x[0].exp());
        if !(plateau < d) || !height.is_finite() {
            return None;
        }
        Some(Bump { center, delta: d, plateau, height: sign * height })
    };
    let f = |x: &[f64]| to_bump(x).map_or(f64::NEG_INFINITY, |b| score(&b));
    let start = [best.height.abs().ln(), best.delta.ln(), 0.0];
    let mut rng = ChaCha8Rng::seed_from_u64(st.seed ^ center.to_bits());
    let mut winner = (best, bv);
    let mut starts = vec![start.to_vec()];
    for _ in 0..2 {
        let jitter: Vec<f64> = start.iter().map(|s| s + rng.random_range(-0.5..0.5)).collect();
        starts.push(jitter);
    }
    let runs: Vec<(Vec<f64>, f64)> =
        starts.par_iter().map(|s| nelder_mead(f, s, &[0.3, 1.0, 0.5], st.refine_steps)).collect();
    for (x, v) in runs {
        if v > winner.1 {
            if let Some(b) = to_bump(&x) {
                winner = (b, v);
            }
        }
    }
    Some(winner)
}

fn heights_grid() -> Vec<f64> {
    geometric(0.1, 100.0, 25)
}

/// Adds one bump per atom, each searched on top of the current field, keeping
/// it only when it improves the objective.
fn add_bumps(pb: &Problem, mut field: TestField, st: &Strategy) -> Result<TestField> {
    let heights = heights_grid();
    for &(_, x, s) in &pb.atoms {
        if s == 0.0 {
            continue;
        }
        let existing = field.bumps().to_vec();
        let fref = &field;
        let score = |b: &Bump| {
            let cells = pb.cells_near(b.center, b.delta);
            let mut with = existing.clone();
            with.push(*b);
            let v = pb.local_objective(fref, &with, cells.clone());
            if v == f64::NEG_INFINITY {
                return v;
            }
            v - pb.local_objective(fref, &existing, cells)
        };
        if let Some((b, gain)) = bump_search(x, field.max_delta(x), st, &heights, 20, &score) {
            if gain > 0.0 {
                field = field.with_bump(b)?;
            }
        }
    }
    Ok(field)
}

/// Best value of `∫ u div w − ρ_{φ*}(|w|)` found by the strategy.
///
/// With both families, bumps are searched twice: on top of the converged
/// nodal field, and first on a field with the atom nodes cleared, followed by
/// nodal ascent. The better of the two is returned.
pub fn dual_sup(phi: &PhiFunction, u: &BVFunction, st: &Strategy) -> Result<DualEstimate> {
    let pb = Problem::new(phi, u, st.resolution)?;
    let plain = pb.geometry(&[]);
    let mut sweeps = 0;
    let mut capped = false;
    let mut ascend = |field: &mut TestField, geom: &[Cell]| {
        let (s, c) = nodal_ascent(&pb, field, geom, st);
        sweeps += s;
        capped |= c;
    };
    let mut candidates = Vec::new();
    let has_atoms = pb.atoms.iter().any(|a| a.2 != 0.0);
    if st.family != SearchFamily::Bump {
        let mut field = TestField::zero(pb.grid);
        *field.nodal_mut() = warm_start(&pb, 1.0);
        let mut cleared = field.clone();
        feasible_start(&pb, &mut field, &plain);
        ascend(&mut field, &plain);
        if st.family == SearchFamily::Both && has_atoms {
            let mut on_top = add_bumps(&pb, field.clone(), st)?;
            if !on_top.bumps().is_empty() {
                let geom = pb.geometry(on_top.bumps());
                ascend(&mut on_top, &geom);
                candidates.push(on_top);
            }
            for &(m, _, _) in &pb.atoms {
                cleared.nodal_mut()[m] = 0.0;
            }
            feasible_start(&pb, &mut cleared, &plain);
            let mut first = add_bumps(&pb, cleared, st)?;
            let geom = pb.geometry(first.bumps());
            ascend(&mut first, &geom);
            candidates.push(first);
        }
        candidates.push(field);
    } else if has_atoms {
        candidates.push(add_bumps(&pb, TestField::zero(pb.grid), st)?);
    }
    // the zero field is always admissible
    let mut best = (TestField::zero(pb.grid), 0.0);
    for c in candidates {
        let v = pb.objective(&c);
        if v > best.1 {
            best = (c, v);
        }
    }
    let (optimizer, value) = best;
    let gap_vs_exact = modular_exact(phi, u).total.to_finite().map(|e| e - value);
    Ok(DualEstimate { value, optimizer, iterations: sweeps, capped, gap_vs_exact })
}

/// `inf{λ > 0 : ρ(λ) ≤ 1}` for a modular given as a function of the divisor `λ`,
/// by bracketing and 60 bisection steps; the returned side satisfies `ρ ≤ 1`.
pub fn luxemburg(rho: impl Fn(f64) -> ExtReal) -> ExtReal {
    luxemburg_from(rho, 1.0, 60)
}

fn luxemburg_from(rho: impl Fn(f64) -> ExtReal, guess: f64, iters: usize) -> ExtReal {
    let ok = |l: f64| rho(l) <= ExtReal::ONE;
    let mut hi = if guess > 0.0 && guess.is_finite() { guess } else { 1.0 };
    let mut n = 0;
    while !ok(hi) {
        hi *= 2.0;
        n += 1;
        if n > 1100 {
            return ExtReal::INFINITY;
        }
    }
    let mut lo = hi / 2.0;
    n = 0;
    while ok(lo) {
        hi = lo;
        lo /= 2.0;
        n += 1;
        if n > 1100 {
            return ExtReal::ZERO;
        }
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    ExtReal::new(hi)
}

/// Whether a Luxemburg norm is taken for `φ` or for `φ*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Phi,
    Conjugate,
}

/// `‖g‖_φ` (or `‖g‖_{φ*}`) of cell-constant samples.
pub fn luxemburg_norm(phi: &PhiFunction, which: Which, domain: &Domain, g: &[f64]) -> Result<ExtReal> {
    let iv = *domain.as_interval()?;
    if g.len() != iv.n {
        return Err(Error::Shape { expected: iv.n, got: g.len() });
    }
    if g.iter().all(|v| *v == 0.0) {
        return Ok(ExtReal::ZERO);
    }
    let sing = phi.singular_points();
    let radial = phi.radial_points();
    let rho = |lambda: f64| -> ExtReal {
        let mut total = ExtReal::ZERO;
        for (i, gi) in g.iter().enumerate() {
            let t = gi.abs() / lambda;
            if t == 0.0 {
                continue;
            }
            total += integrate_split_radial(
                |p, _| match which {
                    Which::Phi => phi.value(&p, t),
                    Which::Conjugate => phi.conjugate(&p, t),
                },
                iv.node(i),
                iv.node(i + 1),
                &sing,
                &radial,
            );
            if total.is_infinite() {
                break;
            }
        }
        total
    };
    Ok(luxemburg(rho))
}

fn field_norm(pb: &Problem, w: &TestField, geom: &[Cell], iters: usize) -> ExtReal {
    luxemburg_from(|l| pb.conj_modular(w, geom, 1.0 / l), w.sup_norm(), iters)
}

/// Best value of `∫ u div w` over fields with `‖w‖_{φ*} ≤ 1`: each candidate
/// is rescaled by its Luxemburg norm.
pub fn dual_norm_v(phi: &PhiFunction, u: &BVFunction, st: &Strategy) -> Result<DualEstimate> {
    let pb = Problem::new(phi, u, st.resolution)?;
    let zero = TestField::zero(pb.grid);
    let area = u.domain().measure();
    let tv = crate::bv::total_variation(u);
    if tv == 0.0 {
        return Ok(DualEstimate { value: 0.0, optimizer: zero, iterations: 0, capped: false, gap_vs_exact: None });
    }
    let ratio = |w: &TestField, geom: &[Cell]| -> f64 {
        let n = field_norm(&pb, w, geom, 30);
        match n.to_finite() {
            Some(n) if n > 0.0 => pb.pairing(w, geom) / n,
            _ => f64::NEG_INFINITY,
        }
    };
    let base_geom = pb.geometry(&[]);
    let mut best = (zero.clone(), 0.0);
    if st.family != SearchFamily::Bump {
        let candidate = |ln_l: f64| -> (TestField, f64) {
            let mut w = zero.clone();
            *w.nodal_mut() = warm_start(&pb, ln_l.exp());
            let r = ratio(&w, &base_geom);
            (w, r)
        };
        let scale = (tv / area).ln();
        let grid: Vec<f64> = (-12..=12).map(|k| scale + k as f64 * std::f64::consts::LN_2).collect();
        let vals: Vec<f64> = grid.par_iter().map(|&l| candidate(l).1).collect();
        let (k, _) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(grid.len() - 1)];
        let (l, _) = golden_max(|l| candidate(l).1, lo, hi, 40);
        for ln_l in [grid[k], l] {
            let (w, r) = candidate(ln_l);
            if r > best.1 {
                best = (w, r);
            }
        }
    }
    if st.family != SearchFamily::Nodal {
        let heights = geometric(0.1, 100.0, 13);
        for i in 0..pb.atoms.len() {
            let (_, x, s) = pb.atoms[i];
            if s == 0.0 {
                continue;
            }
            let base = best.0.clone();
            let score = |b: &Bump| {
                let mut w = base.clone();
                let mut bs = w.bumps().to_vec();
                bs.push(*b);
                w.set_bumps(bs);
                ratio(&w, &pb.geometry(w.bumps()))
            };
            let narrow = Strategy { refine_steps: st.refine_steps.min(60), ..*st };
            if let Some((b, v)) = bump_search(x, base.max_delta(x), &narrow, &heights, 10, &score) {
                if v > best.1 {
                    best = (base.with_bump(b)?, v);
                }
            }
        }
    }
    let (w, _) = best;
    let geom = pb.geometry(w.bumps());
    let n = field_norm(&pb, &w, &geom, 60);
    let (optimizer, value) = match n.to_finite() {
        Some(n) if n > 0.0 => {
            let unit = w.scaled(1.0 / n);
            let g = pb.geometry(unit.bumps());
            let v = pb.pairing(&unit, &g);
            (unit, v)
        }
        _ => (zero, 0.0),
    };
    Ok(DualEstimate { value: value.max(0.0), optimizer, iterations: 0, capped: false, gap_vs_exact: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Luxemburg norm of the estimated dual modular.
    pub modular_norm: f64,
    pub dual_norm: f64,
    /// `modular_norm / dual_norm`, expected `≤ 1`.
    #[serde(with = "signed")]
    pub lower_ratio: f64,
    /// `dual_norm / modular_norm`, expected `≤ 2`.
    #[serde(with = "signed")]
    pub upper_ratio: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `‖u‖_{ρ_{V,φ}} ≤ V_φ(u) ≤ 2‖u‖_{ρ_{V,φ}}` up to the factor `1 + slack`,
/// with both sides taken from the module's own estimators.
pub fn equivalence_check(phi: &PhiFunction, u: &BVFunction, st: &Strategy, slack: f64) -> Result<EquivalenceReport> {
    let v = dual_norm_v(phi, u, st)?.value;
    if v == 0.0 && crate::bv::total_variation(u) == 0.0 {
        return Ok(EquivalenceReport { modular_norm: 0.0, dual_norm: 0.0, lower_ratio: 0.0, upper_ratio: 0.0, slack, holds: true });
    }
    let rho = |lambda: f64| -> ExtReal {
        match dual_sup(phi, &u.scaled(1.0 / lambda), st) {
            Ok(e) => ExtReal::new(e.value),
            Err(_) => ExtReal::INFINITY,
        }
    };
    // ‖u‖ lies in [V/2, V] when the sandwich holds; bracket around it and bisect in log scale
    let ok = |l: f64| rho(l) <= ExtReal::ONE;
    let start = if v > 0.0 { v } else { 1.0 };
    let (mut lo, mut hi) = (0.25 * start, 2.0 * start);
    let mut guard = 0;
    while !ok(hi) && guard < 60 {
        lo = hi;
        hi *= 4.0;
        guard += 1;
    }
    guard = 0;
    while ok(lo) && guard < 60 {
        hi = lo;
        lo /= 4.0;
        guard += 1;
    }
    for _ in 0..14 {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let m = hi;
    let lower = m / v;
    let upper = v / m;
    let holds = m <= (1.0 + slack) * v && v <= 2.0 * (1.0 + slack) * m;
    Ok(EquivalenceReport { modular_norm: m, dual_norm: v, lower_ratio: lower, upper_ratio: upper, slack, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `ρ_{φ*}(|w|) < ∞`.
    pub admissible: bool,
    pub holds: bool,
    /// Largest `|w(x)| / φ'_∞(x)` seen.
    pub worst_ratio: f64,
    pub worst_x: f64,
    pub tol: f64,
}

/// Checks `|w| ≤ φ'_∞` at all nodes and bump breakpoints.
pub fn bound_check(phi: &PhiFunction, domain: &Domain, w: &TestField, tol: f64) -> Result<BoundReport> {
    let rho = conjugate_modular(phi, domain, w)?;
    let mut worst = (0.0f64, domain.as_interval()?.lo);
    for p in w.knot_points() {
        let v = w.value(&p).abs();
        if v == 0.0 {
            continue;
        }
        let rec = phi.recession(&p);
        let r = rec.to_finite().map_or(0.0, |rc| if rc == 0.0 { f64::INFINITY } else { v / rc });
        if r > worst.0 {
            worst = (r, p.x_value());
        }
    }
    let admissible = rho.is_finite();
    Ok(BoundReport { admissible, holds: admissible && worst.0 <= 1.0 + tol, worst_ratio: worst.0, worst_x: worst.1, tol })
}
