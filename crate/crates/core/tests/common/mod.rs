//! Shared fixtures: the randomized 1D suite and the property suites.
#![allow(dead_code)]

use bvphi::bv::{modular_exact, Atom, BVFunction};
use bvphi::domain::{Domain, Point};
use bvphi::duality::{bound_check, conjugate_modular, dual_objective, dual_sup, field_grid, luxemburg_norm, Bump, Strategy as Search, TestField, Which};
use bvphi::field::ScalarField;
use bvphi::gamma::{minimize_fp, EnergySpec};
use bvphi::io::{parse_pgm, parse_signal, pgm_bytes, signal_csv, Image};
use bvphi::phi::PhiFunction;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smooth part `Σ a_m sin(ω_m x)` plus up to three atoms at `x < −0.1`.
pub fn random_u(seed: u64, n: usize, atoms: bool) -> BVFunction {
    let d = Domain::interval(-1.0, 1.0, n).unwrap();
    let iv = *d.as_interval().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<(f64, f64)> = (1..=3)
        .map(|m| (rng.random_range(-1.0..1.0) / m as f64, m as f64 * rng.random_range(1.0..3.0)))
        .collect();
    let mut free: Vec<f64> = (2..iv.n - 1).map(|m| iv.node(m)).filter(|x| *x < -0.1).collect();
    let k = if atoms { rng.random_range(1..=3usize).min(free.len()) } else { 0 };
    let mut at: Vec<Atom> = Vec::new();
    for _ in 0..k {
        let x = free.swap_remove(rng.random_range(0..free.len()));
        at.push(Atom { x, jump: rng.random_range(-1.5..1.5) });
    }
    let c2 = c.clone();
    BVFunction::from_fn(
        d,
        move |x| c.iter().map(|(a, w)| a * (w * x).sin()).sum(),
        move |x| c2.iter().map(|(a, w)| a * w * (w * x).cos()).sum(),
        at,
    )
    .unwrap()
}

fn step(left: f64, right: f64) -> ScalarField {
    ScalarField::Step { at: 0.0, left, right }
}

/// Families used with the random suite, and whether atoms are allowed
/// (finite recession on `x < 0`).
pub fn suite_families() -> Vec<(&'static str, PhiFunction, bool)> {
    vec![
        ("linear", PhiFunction::linear(), true),
        ("double_phase", PhiFunction::double_phase(step(0.0, 1.0)).unwrap(), true),
        ("power_varexp", PhiFunction::power_varexp(step(1.0, 1.5)).unwrap(), true),
        ("clr", PhiFunction::clr(step(1.0, 2.0)).unwrap(), true),
        ("autonomous", PhiFunction::autonomous(1.0, 1.5).unwrap(), false),
    ]
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn family(k: usize, a: f64, b: f64) -> PhiFunction {
    match k % 7 {
        0 => PhiFunction::linear(),
        1 => PhiFunction::power_varexp(ScalarField::power_type(0.5 + 1.5 * a, 0.0)).unwrap(),
        2 => PhiFunction::normalized_varexp(ScalarField::log_type(0.2 + 0.8 * a, 0.0)).unwrap(),
        3 => PhiFunction::clr(ScalarField::constant(1.2 + 1.8 * a)).unwrap(),
        4 => PhiFunction::double_phase(ScalarField::constant(2.0 * a)).unwrap(),
        5 => PhiFunction::autonomous(0.5 + 1.5 * a, 1.1 + 2.9 * b).unwrap(),
        _ => {
            let slopes = [0.2 + a, 0.5 + a + b, 1.0 + 2.0 * a + b, 3.0 + 4.0 * b];
            let (mut t, mut v) = (vec![0.0], vec![0.0]);
            for (j, s) in slopes.iter().enumerate() {
                let dt = 0.5 * (j + 1) as f64;
                t.push(t[j] + dt);
                v.push(v[j] + s * dt);
            }
            PhiFunction::tabulated(t, v).unwrap()
        }
    }
}

fn any_phi() -> impl Strategy<Value = (usize, f64, f64)> {
    (0usize..7, 0.0..1.0f64, 0.0..1.0f64)
}

fn log_t() -> impl Strategy<Value = f64> {
    (-3.0..2.0f64).prop_map(|e| 10f64.powf(e))
}

pub type Suite = (&'static str, u32, fn(u32) -> Result<(), String>);

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn convexity(cases: u32) -> Result<(), String> {
    run(cases, (any_phi(), -0.99..0.99f64, log_t(), log_t()), |((k, a, b), x, t, s)| {
        let phi = family(k, a, b);
        let p = Point::at(x);
        let (ft, fs, fm) = (phi.value(&p, t), phi.value(&p, s), phi.value(&p, 0.5 * (t + s)));
        if let (Some(ft), Some(fs), Some(fm)) = (ft.to_finite(), fs.to_finite(), fm.to_finite()) {
            prop_assert!(fm <= 0.5 * (ft + fs) * (1.0 + 1e-12) + 1e-300, "{fm} {ft} {fs}");
        }
        Ok(())
    })
}

fn monotonicity(cases: u32) -> Result<(), String> {
    run(cases, (any_phi(), -0.99..0.99f64, log_t(), 1.0..10.0f64), |((k, a, b), x, t, f)| {
        let phi = family(k, a, b);
        let p = Point::at(x);
        prop_assert!(phi.value(&p, t).value() <= phi.value(&p, t * f).value() * (1.0 + 1e-12));
        prop_assert_eq!(phi.value(&p, 0.0).value(), 0.0);
        Ok(())
    })
}

fn order_reversal(cases: u32) -> Result<(), String> {
    run(cases, (0.2..2.0f64, 1.0..3.0f64, 1.1..4.0f64, 0.0..2.0f64, log_t()), |(c, m, q, a, s)| {
        // φ₁ ≤ φ₂ pointwise implies φ₂* ≤ φ₁*
        let pairs = [
            (PhiFunction::autonomous(c, q).unwrap(), PhiFunction::autonomous(c * m, q).unwrap()),
            (PhiFunction::double_phase(ScalarField::constant(a)).unwrap(), PhiFunction::double_phase(ScalarField::constant(a * m + 0.01)).unwrap()),
            (PhiFunction::linear(), PhiFunction::double_phase(ScalarField::constant(a)).unwrap()),
        ];
        let p = Point::at(0.0);
        for (lo, hi) in &pairs {
            let (c_lo, c_hi) = (lo.conjugate(&p, s), hi.conjugate(&p, s));
            prop_assert!(c_hi.value() <= c_lo.value() * (1.0 + 1e-12) + 1e-15, "{c_hi} {c_lo}");
            let (n_lo, n_hi) = (lo.conjugate_numeric(&p, s), hi.conjugate_numeric(&p, s));
            prop_assert!(n_hi.value() <= n_lo.value() * (1.0 + 1e-9) + 1e-12);
        }
        Ok(())
    })
}

fn young_inequality(cases: u32) -> Result<(), String> {
    run(cases, (any_phi(), -0.99..0.99f64, log_t(), log_t()), |((k, a, b), x, t, s)| {
        let phi = family(k, a, b);
        let p = Point::at(x);
        let rhs = phi.value(&p, t) + phi.conjugate(&p, s);
        prop_assert!(s * t <= rhs.value() + 1e-9 * (1.0 + s * t), "{} > {}", s * t, rhs);
        Ok(())
    })
}

fn young_equality(cases: u32) -> Result<(), String> {
    run(cases, (any_phi(), -0.99..0.99f64, log_t()), |((k, a, b), x, t)| {
        let phi = family(k, a, b);
        if let Some(g) = phi.young_gap(x, t) {
            let scale = phi.value(&Point::at(x), t).value().max(1.0);
            prop_assert!(g.abs() <= 1e-6 * scale, "gap {g}");
        }
        Ok(())
    })
}

fn random_field(grid: bvphi::domain::Interval, amp: f64, seed: u64, bump: bool) -> TestField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n;
    let nodal = (0..=n).map(|k| if k < 2 || k + 2 > n { 0.0 } else { amp * rng.random_range(-1.0..1.0) }).collect();
    let mut w = TestField::from_nodal(grid, nodal).unwrap();
    if bump {
        let c = grid.lo + grid.length() * rng.random_range(0.3..0.7);
        let delta = (rng.random_range(0.01..0.2f64)).min(w.max_delta(c) * 0.99);
        w = w.with_bump(Bump { center: c, delta, plateau: 0.5 * delta, height: amp * rng.random_range(-1.0..1.0) }).unwrap();
    }
    w
}

fn recession_bound(cases: u32) -> Result<(), String> {
    let d = Domain::interval(-1.0, 1.0, 16).unwrap();
    let grid = field_grid(&d, 2).unwrap();
    let phis = [PhiFunction::linear(), PhiFunction::double_phase(ScalarField::Step { at: 0.0, left: 0.0, right: 1.0 }).unwrap()];
    run(cases, (0usize..2, 0.0..1.6f64, any::<u64>(), any::<bool>()), |(k, amp, seed, bump)| {
        let w = random_field(grid, amp, seed, bump);
        let finite = conjugate_modular(&phis[k], &d, &w).unwrap().is_finite();
        let rep = bound_check(&phis[k], &d, &w, 1e-9).unwrap();
        if finite {
            prop_assert!(rep.holds, "finite conjugate modular but ratio {}", rep.worst_ratio);
        }
        Ok(())
    })
}

fn objective_soundness(cases: u32) -> Result<(), String> {
    let phis = suite_families();
    run(cases, (0usize..5, 0.0..1.2f64, any::<u64>(), any::<bool>()), |(k, amp, seed, bump)| {
        let (_, phi, atoms) = &phis[k];
        let u = random_u(seed % 1000, 16, *atoms);
        let w = random_field(field_grid(u.domain(), 2).unwrap(), amp, seed, bump);
        let v = dual_objective(phi, &u, &w).unwrap();
        let m = modular_exact(phi, &u).total.value();
        prop_assert!(v <= m + 1e-9 * (1.0 + m), "{v} > {m}");
        Ok(())
    })
}

fn semimodular(cases: u32) -> Result<(), String> {
    let phis = suite_families();
    run(cases, (0usize..5, any::<u64>(), 0.0..1.0f64, 1.0..4.0f64), |(k, seed, lam, big)| {
        let (_, phi, atoms) = &phis[k];
        let u = random_u(seed % 1000, 24, *atoms);
        let r = |c: f64| modular_exact(phi, &u.scaled(c)).total.value();
        let (r1, rl, rb) = (r(1.0), r(lam), r(big));
        prop_assert_eq!(r(0.0), 0.0);
        prop_assert!((r(-1.0) - r1).abs() <= 1e-12 * r1.max(1.0));
        prop_assert!(rl <= lam * r1 * (1.0 + 1e-12) + 1e-15, "convexity {rl} {r1}");
        prop_assert!(r1 <= rb * (1.0 + 1e-12), "monotone {r1} {rb}");
        // Luxemburg norm is homogeneous
        let g = u.gradient().to_vec();
        let n1 = luxemburg_norm(phi, Which::Phi, u.domain(), &g).unwrap().value();
        let gb: Vec<f64> = g.iter().map(|v| v * big).collect();
        let nb = luxemburg_norm(phi, Which::Phi, u.domain(), &gb).unwrap().value();
        prop_assert!(rel(nb, big * n1) < 1e-6, "{nb} {}", big * n1);
        Ok(())
    })
}

fn determinism(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), any::<u64>()), |(seed, st_seed)| {
        let u = random_u(seed % 1000, 16, true);
        let phi = PhiFunction::double_phase(step(0.0, 1.0)).unwrap();
        let st = Search { seed: st_seed, iters: 20, ..Search::default() };
        let a = serde_json::to_string(&dual_sup(&phi, &u, &st).unwrap()).unwrap();
        let b = serde_json::to_string(&dual_sup(&phi, &u, &st).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        let spec = EnergySpec::new(PhiFunction::linear(), *u.domain(), 1.25, u.values().to_vec()).unwrap();
        let (m1, m2) = (minimize_fp(&spec).unwrap(), minimize_fp(&spec).unwrap());
        prop_assert_eq!(m1.u, m2.u);
        Ok(())
    })
}

fn csv_round_trip(cases: u32) -> Result<(), String> {
    run(cases, (prop::collection::vec(-1e6..1e6f64, 2..40), -10.0..10.0f64, 0.01..5.0f64), |(v, lo, len)| {
        let d = Domain::interval(lo, lo + len, v.len()).unwrap();
        let s = parse_signal(&signal_csv(&d, &v).unwrap(), "mem").unwrap();
        for (a, b) in s.values.iter().zip(&v) {
            prop_assert!(rel(*a, *b) <= 1e-12 || a == b);
        }
        Ok(())
    })
}

fn pgm_round_trip(cases: u32) -> Result<(), String> {
    run(cases, (1usize..9, 1usize..9, prop::collection::vec(any::<u8>(), 64), any::<bool>()), |(w, h, raw, ascii)| {
        let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
        bytes.extend_from_slice(&raw[..w * h]);
        let img = parse_pgm(&bytes, "mem").unwrap();
        prop_assert!(img.values.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(pgm_bytes(&img, true).unwrap(), bytes);
        if ascii {
            let back = parse_pgm(&pgm_bytes(&img, false).unwrap(), "mem").unwrap();
            prop_assert_eq!(back, Image { ..img });
        }
        Ok(())
    })
}

/// Property suites and their case counts; the counts sum to 10⁴.
pub fn property_suites() -> Vec<Suite> {
    vec![
        ("convexity in t", 1500, convexity),
        ("monotonicity in t", 1000, monotonicity),
        ("order reversal of conjugation", 1000, order_reversal),
        ("Young inequality", 1500, young_inequality),
        ("Young equality at the derivative", 1000, young_equality),
        ("feasible fields obey the recession bound", 500, recession_bound),
        ("dual objective below the closed form", 500, objective_soundness),
        ("semimodular axioms", 1000, semimodular),
        ("determinism", 20, determinism),
        ("signal CSV round trip", 990, csv_round_trip),
        ("PGM round trip", 990, pgm_round_trip),
    ]
}
