use super::*;
use crate::bv::{modular_fidelity, BVFunction};
use crate::domain::Domain;
use crate::phi::PhiFunction;

fn unit(n: usize) -> Domain {
    Domain::interval(0.0, 1.0, n).unwrap()
}

#[test]
fn energy_examples() {
    let d = unit(200);
    let xs = d.as_interval().unwrap().centers();
    let lin = PhiFunction::linear();
    let f = vec![0.3; 200];
    let spec = EnergySpec::new(lin.clone(), d, 2.0, f.clone()).unwrap();
    assert_eq!(energy_fp(&spec, &f).unwrap(), 0.0);
    // p = 1 is allowed for evaluation; the last cell carries no difference
    let spec = EnergySpec::new(lin.clone(), d, 1.0, xs.clone()).unwrap().with_eps(0.0);
    assert!((energy_fp(&spec, &xs).unwrap() - 1.0).abs() < 1.0 / 200.0 + 1e-12);
    let spec = EnergySpec::new(lin, d, 2.0, vec![0.0; 200]).unwrap().with_eps(0.0);
    let e = energy_fp(&spec, &xs).unwrap();
    assert!((e - 4.0 / 3.0).abs() < 1e-2, "{e}");
    assert!(energy_fp(&spec, &xs[..10]).is_err());
}

#[test]
fn constant_data_is_its_own_minimizer() {
    let d = unit(32);
    let spec = EnergySpec::new(PhiFunction::linear(), d, 1.5, vec![2.0; 32]).unwrap();
    let m = minimize_fp(&spec).unwrap();
    assert_eq!(m.energy, 0.0);
    assert!(m.u.iter().all(|v| *v == 2.0));
}

#[test]
fn clean_step_shrinks() {
    let d = unit(256);
    let f = noisy_step(&d, 0.5, 4.0, 0.0, 0).unwrap();
    let spec = EnergySpec::new(PhiFunction::linear(), d, 1.0 + 2f64.powi(-6), f.clone()).unwrap();
    let m = minimize_fp(&spec).unwrap();
    assert!(m.energy <= energy_fp(&spec, &f).unwrap());
    let jump = m.u[255] - m.u[0];
    assert!(jump < 4.0 - 0.5 && jump > 0.0, "{jump}");
    assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    assert!((m.energy - energy_fp(&spec, &m.u).unwrap()).abs() < 1e-12);
}

#[test]
fn gradient_descent_agrees_with_newton() {
    let d = unit(64);
    let f = noisy_step(&d, 0.5, 1.0, 0.05, 3).unwrap();
    let base = EnergySpec::new(PhiFunction::autonomous(1.0, 2.0).unwrap(), d, 1.5, f).unwrap();
    let a = minimize_fp(&base).unwrap();
    let gd = base.clone().with_options(SolverOptions { method: Method::GradientDescent, ..Default::default() });
    let b = minimize_fp(&gd).unwrap();
    assert!((a.energy - b.energy).abs() < 1e-6 * a.energy, "{} {}", a.energy, b.energy);
}

#[test]
fn two_dimensional_minimization() {
    let d = Domain::rect((0.0, 1.0), (0.0, 1.0), 16, 16).unwrap();
    let f: Vec<f64> = (0..256).map(|k| if k % 16 >= 8 { 1.0 } else { 0.0 }).collect();
    let spec = EnergySpec::new(PhiFunction::linear(), d, 1.25, f.clone()).unwrap();
    let m = minimize_fp(&spec).unwrap();
    assert!(!m.capped);
    assert!(m.energy < energy_fp(&spec, &f).unwrap());
    assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn rof_constant_and_two_cells() {
    let r = rof_reference(&[1.5; 10], 0.1, 1e-10);
    assert!(r.u.iter().all(|v| (v - 1.5).abs() < 1e-12));
    // |u1 − u0| + h((u0 + c)² + (u1 − c)²): each value moves by 1/(2h) toward 0
    let h = 0.25;
    let r = rof_reference(&[-3.0, 3.0], h, 1e-12);
    assert!((r.u[0] + 1.0).abs() < 1e-9 && (r.u[1] - 1.0).abs() < 1e-9, "{:?}", r.u);
    let r = rof_reference(&[-1.0, 1.0], h, 1e-12);
    assert!(r.u.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn rof_energy_matches_modular_fidelity() {
    let d = unit(256);
    let h = 1.0 / 256.0;
    let f = noisy_step(&d, 0.5, 4.0, 0.0, 0).unwrap();
    let r = rof_reference(&f, h, 1e-10);
    let tv: f64 = r.u.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let e = tv + h * r.u.iter().zip(&f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let u = BVFunction::from_samples(d, r.u.clone()).unwrap();
    let m = modular_fidelity(&PhiFunction::linear(), &u, &f).unwrap();
    assert!((m.total.value() - e).abs() < 1e-6);
    // plateaus of length 1/2 move by 1/(2·1/2) = 1 each
    assert!((r.u[0] - 1.0).abs() < 1e-6 && (r.u[255] - 3.0).abs() < 1e-6, "{} {}", r.u[0], r.u[255]);
}

#[test]
fn sweep_of_constant_data() {
    let d = unit(64);
    let s = gamma_sweep(&PhiFunction::linear(), &d, &[1.0; 64], &SweepOptions::default()).unwrap();
    assert!(s.energies.iter().all(|e| *e == 0.0));
    assert_eq!(s.gap, Some(0.0));
    assert!(s.flags.is_empty());
    assert!(gamma_sweep(&PhiFunction::linear(), &d, &[1.0; 64], &SweepOptions { kmax: 13, ..Default::default() }).is_err());
}

#[test]
fn thresholds() {
    let d = unit(8);
    let u = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
    assert!((jump_threshold(&d, &u) - 0.1).abs() < 1e-15);
}

#[test]
fn approximation_examples() {
    let d = Domain::interval(-1.0, 1.0, 32).unwrap();
    let u = BVFunction::heaviside(d, 0.0, 1.0).unwrap();
    let tr = smooth_approximation(&PhiFunction::linear(), &u, &[0.1, 1e-3, 1e-8]).unwrap();
    for s in &tr.steps {
        assert!((s.modular.value() - 1.0).abs() < 1e-9, "{:?}", s);
    }
    let d = unit(64);
    let u = BVFunction::from_fn(d, |x| x, |_| 1.0, vec![]).unwrap();
    let tr = smooth_approximation(&PhiFunction::autonomous(1.0, 2.0).unwrap(), &u, &[1e-2, 1e-4]).unwrap();
    // only the collar of width δ at each end loses mass
    for s in &tr.steps {
        assert!((s.modular.value() - 1.0).abs() < 2.0 * s.delta, "{:?}", s);
    }
    let d = Domain::interval(-1.0, 1.0, 32).unwrap();
    let u = BVFunction::heaviside(d, 0.875, 1.0).unwrap();
    let tr = smooth_approximation(&PhiFunction::linear(), &u, &[0.1]).unwrap();
    assert!(tr.steps[0].note.is_some() && tr.steps[0].delta < 0.1);
}
