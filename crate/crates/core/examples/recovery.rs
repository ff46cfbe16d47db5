//! Modular of mollified approximations as the width shrinks.
use bvphi::bv::BVFunction;
use bvphi::domain::Domain;
use bvphi::field::ScalarField;
use bvphi::gamma::smooth_approximation;
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(-1.0, 1.0, 64)?;
    let u = BVFunction::heaviside(d, 0.0, 1.0)?;
    let deltas: Vec<f64> = [1e-2, 1e-6, 1e-10, 1e-20, 1e-40].to_vec();
    for (name, phi) in [
        ("linear", PhiFunction::linear()),
        ("log type", PhiFunction::normalized_varexp(ScalarField::log_type(1.0, 0.0))?),
    ] {
        let tr = smooth_approximation(&phi, &u, &deltas)?;
        println!("{name} (closed form {}):", tr.exact);
        for s in &tr.steps {
            println!("  delta {:.0e}: {}", s.delta, s.modular);
        }
    }
    Ok(())
}
