//! Warm-started sweep p_k = 1 + 2^-k and the double-phase exclusion.
use bvphi::domain::Domain;
use bvphi::field::ScalarField;
use bvphi::gamma::{gamma_sweep, noisy_step, SweepOptions};
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(0.0, 1.0, 256)?;
    let opts = SweepOptions::default();
    let f = noisy_step(&d, 0.5, 4.0, 0.05, 0)?;
    let s = gamma_sweep(&PhiFunction::linear(), &d, &f, &opts)?;
    for st in &s.steps {
        println!("k = {} p = {:.6} E = {:.6}", st.k, st.p, st.energy);
    }
    println!("limit modular {} relative gap {:?}", s.limit_modular.total, s.relative_gap);

    let phi = PhiFunction::double_phase(ScalarField::Step { at: 0.5, left: 0.0, right: 1e-4 })?;
    for at in [0.25, 0.75] {
        let f = noisy_step(&d, at, 4.0, 0.05, 0)?;
        let s = gamma_sweep(&phi, &d, &f, &opts)?;
        println!("jump at {at}: limit modular {} flags {:?}", s.limit_modular.total, s.flags);
    }
    Ok(())
}
