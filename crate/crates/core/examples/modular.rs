//! Closed-form modular of a function with a smooth part and jumps.
use bvphi::bv::{modular_exact, total_variation, Atom, BVFunction};
use bvphi::domain::Domain;
use bvphi::field::ScalarField;
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(-1.0, 1.0, 200)?;
    let atoms = vec![Atom { x: -0.5, jump: 1.0 }, Atom { x: 0.5, jump: -0.25 }];
    let u = BVFunction::from_fn(d, |x| (2.0 * x).sin(), |x| 2.0 * (2.0 * x).cos(), atoms)?;
    println!("|Du| = {:.6}", total_variation(&u));
    let a = ScalarField::Step { at: 0.0, left: 0.0, right: 0.3 };
    for (name, phi) in [
        ("linear", PhiFunction::linear()),
        ("double phase", PhiFunction::double_phase(a)?),
        ("t^(1+|x|)", PhiFunction::power_varexp(ScalarField::power_type(1.0, 0.0))?),
    ] {
        let r = modular_exact(&phi, &u);
        println!("{name:>13}: ac {:.6} singular {} total {}", r.ac_part, r.singular_part, r.total);
    }
    Ok(())
}
