//! Sampled regularity checks, including the strong log-Hölder modulus.
use bvphi::conditions::{check_a0, check_growth, log_holder_modulus};
use bvphi::domain::Domain;
use bvphi::field::ScalarField;
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(-1.0, 1.0, 256)?;
    let phi = PhiFunction::double_phase(ScalarField::Step { at: 0.0, left: 0.0, right: 1.0 })?;
    let a0 = check_a0(&phi, &d);
    println!("double phase A0: {:?} {:?}", a0.verdict, a0.constants);
    let g = check_growth(&phi, &d, 1.0, 2.0)?;
    println!("double phase aInc_1/aDec_2: {:?} {:?}", g.verdict, g.constants);

    for (name, p) in [("log type", ScalarField::log_type(1.0, 0.0)), ("power type", ScalarField::power_type(1.0, 0.0))] {
        let r = log_holder_modulus(&p, &d, true)?;
        println!("{name}: {:?}", r.verdict);
        for (radius, w) in r.table.iter().step_by(4) {
            println!("  r = {radius:.2e}  modulus {w:.4}");
        }
    }
    Ok(())
}
