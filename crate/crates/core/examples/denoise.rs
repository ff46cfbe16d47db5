//! One regularized minimization next to the total variation reference.
use bvphi::domain::Domain;
use bvphi::gamma::{minimize_fp, noisy_step, rof_reference, EnergySpec};
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(0.0, 1.0, 256)?;
    let f = noisy_step(&d, 0.5, 4.0, 0.05, 0)?;
    let spec = EnergySpec::new(PhiFunction::linear(), d, 1.0 + 2f64.powi(-10), f.clone())?;
    let m = minimize_fp(&spec)?;
    let r = rof_reference(&f, d.cell_measure(), 1e-10);
    let diff = m.u.iter().zip(&r.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("F_p = {:.6} after {} iterations, max |u - u_rof| = {diff:.2e}", m.energy, m.iterations);
    println!("plateaus {:.4} {:.4}", m.u[10], m.u[245]);
    Ok(())
}
