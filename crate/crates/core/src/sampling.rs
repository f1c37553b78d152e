//! Seeded sampling helpers. Every sampler is deterministic given its seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed disc of radius `r`.
pub fn disc(rng: &mut SeededRng, r: f64) -> Complex64 {
    let rho = r * rng.gen::<f64>().sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(rho, theta)
}

/// Uniform point of the disc of radius `r` with `Im z < 0`.
pub fn lower_half_disc(rng: &mut SeededRng, r: f64) -> Complex64 {
    loop {
        let z = disc(rng, r);
        if z.im < 0.0 {
            return z;
        }
    }
}

pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Random point of the unit sphere in `R^d`.
pub fn unit_vector(rng: &mut SeededRng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Strictly positive weights summing to one.
pub fn simplex_weights(rng: &mut SeededRng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-12).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}
