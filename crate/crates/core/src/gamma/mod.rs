//! Regularized energies `F_p(u) = ∫ φ(x, |∇u|)^p + |u − f|²`, their
//! minimization, and the harness comparing minimizers with the dual modular.

mod approx;
mod energy;
mod rof;
mod sweep;

pub use approx::{smooth_approximation, ApproxStep, ApproxTrace};
pub use energy::{energy_fp, minimize_fp, minimize_fp_from, EnergySpec, Method, Minimizer, SolverOptions};
pub use rof::{rof_reference, RofResult};
pub use sweep::{gamma_sweep, jump_threshold, noisy_step, SweepOptions, SweepResult, SweepStep, NOT_IN_BV_PHI};

#[cfg(test)]
mod tests;
