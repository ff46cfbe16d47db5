//! Closed-form conjugates against the numeric Legendre transform.
use bvphi::domain::Point;
use bvphi::field::ScalarField;
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let families = [
        ("linear", PhiFunction::linear()),
        ("t^p(x)", PhiFunction::power_varexp(ScalarField::power_type(1.0, 0.0))?),
        ("t^p(x)/p(x)", PhiFunction::normalized_varexp(ScalarField::log_type(1.0, 0.0))?),
        ("t + a t^2", PhiFunction::double_phase(ScalarField::constant(0.5))?),
    ];
    let x = Point::at(0.3);
    for (name, phi) in &families {
        println!("{name}: recession at 0.3 = {}", phi.recession(&x));
        for s in [0.1, 0.9, 1.5, 10.0] {
            println!("  s = {s:<5} closed {:<22} numeric {}", phi.conjugate(&x, s).to_string(), phi.conjugate_numeric(&x, s));
        }
        if let Some(g) = phi.young_gap(x, 2.0) {
            println!("  Young gap at t = 2: {g:.3e}");
        }
    }
    Ok(())
}
