//! Dual norm, Luxemburg norm of the dual modular, and the equivalence sandwich.
use bvphi::bv::{modular_exact, Atom, BVFunction};
use bvphi::domain::Domain;
use bvphi::duality::{dual_norm_v, equivalence_check, Strategy};
use bvphi::field::ScalarField;
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(-1.0, 1.0, 32)?;
    let u = BVFunction::from_fn(d, |x| 0.5 * x * x, |x| x, vec![Atom { x: -0.25, jump: 0.5 }])?;
    // linear growth where the jump sits, quadratic on the right half
    let phi = PhiFunction::double_phase(ScalarField::Step { at: 0.0, left: 0.0, right: 1.0 })?;
    let st = Strategy { ..Strategy::default() };
    let v = dual_norm_v(&phi, &u, &st)?;
    println!("V estimate {:.5} (closed-form modular {})", v.value, modular_exact(&phi, &u).total);
    let eq = equivalence_check(&phi, &u, &st, 0.1)?;
    println!(
        "Luxemburg {:.5}  ratios {:.3} {:.3}  holds {}",
        eq.modular_norm, eq.lower_ratio, eq.upper_ratio, eq.holds
    );
    Ok(())
}
