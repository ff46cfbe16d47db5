//! Dual modular of a unit jump under variable exponents that touch 1 at the jump.
//!
//! Under the log-type exponent the supremum approaches e, although the
//! recession weight at the jump is 1.
use bvphi::bv::{modular_exact, BVFunction};
use bvphi::domain::Domain;
use bvphi::duality::{dual_sup, Strategy};
use bvphi::field::ScalarField;
use bvphi::phi::PhiFunction;
use std::time::Instant;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(-1.0, 1.0, 64)?;
    let u = BVFunction::heaviside(d, 0.0, 1.0)?;
    let st = Strategy { delta_min: 1e-100, ..Strategy::default() };
    for (name, phi) in [
        ("log type", PhiFunction::normalized_varexp(ScalarField::log_type(1.0, 0.0))?),
        ("power type", PhiFunction::normalized_varexp(ScalarField::power_type(1.0, 0.0))?),
    ] {
        let t = Instant::now();
        let est = dual_sup(&phi, &u, &st)?;
        println!(
            "{name}: dual {:.6} closed form {} ({:.1?})",
            est.value,
            modular_exact(&phi, &u).total,
            t.elapsed()
        );
    }
    println!("e = {:.6}", std::f64::consts::E);
    Ok(())
}
