//! Denoise a synthetic PGM image with a spatially varying double phase.
use bvphi::field::ScalarField;
use bvphi::gamma::{minimize_fp, EnergySpec};
use bvphi::io::{load_pgm, save_pgm, Image};
use bvphi::phi::PhiFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> bvphi::error::Result<()> {
    let (w, h) = (48, 48);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let noise = Normal::new(0.0, 0.08).unwrap();
    let values = (0..w * h)
        .map(|k| {
            let (i, j) = (k % w, k / w);
            let disc = ((i as f64 - 24.0).powi(2) + (j as f64 - 24.0).powi(2)) < 144.0;
            (if disc { 0.8f64 } else { 0.2 } + noise.sample(&mut rng)).clamp(0.0, 1.0)
        })
        .collect();
    let dir = std::env::temp_dir();
    let noisy = Image { width: w, height: h, maxval: 255, values };
    save_pgm(&dir.join("bvphi_noisy.pgm"), &noisy, true)?;

    let img = load_pgm(&dir.join("bvphi_noisy.pgm"))?;
    let a = ScalarField::Step { at: 0.5, left: 0.0, right: 0.05 };
    let spec = EnergySpec::new(PhiFunction::double_phase(a)?, img.domain()?, 1.05, img.values.clone())?;
    let m = minimize_fp(&spec)?;
    println!("energy {:.5} after {} iterations", m.energy, m.iterations);
    let out = dir.join("bvphi_denoised.pgm");
    save_pgm(&out, &Image { values: m.u, ..img }, true)?;
    println!("wrote {}", out.display());
    Ok(())
}
