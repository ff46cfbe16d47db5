//! Signal and atom CSV files feeding the closed-form modular.
use bvphi::bv::{modular_exact, Atom};
use bvphi::domain::Domain;
use bvphi::io::{atoms_csv, parse_atoms, parse_signal, report_json, signal_csv, signal_to_bv};
use bvphi::phi::PhiFunction;

fn main() -> bvphi::error::Result<()> {
    let d = Domain::interval(0.0, 1.0, 8)?;
    let values: Vec<f64> = (0..8).map(|k| if k < 4 { 0.1 * k as f64 } else { 1.0 + 0.1 * k as f64 }).collect();
    let text = signal_csv(&d, &values)?;
    print!("{text}");
    let sig = parse_signal(&text, "memory")?;
    let atoms = parse_atoms(&atoms_csv(&[Atom { x: 0.5, jump: 0.9 }]), "memory")?;
    let u = signal_to_bv(&sig, atoms)?;
    print!("{}", report_json(&modular_exact(&PhiFunction::linear(), &u))?);
    Ok(())
}
