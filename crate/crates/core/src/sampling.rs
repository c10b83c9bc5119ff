//! Reproducible random inputs for the Monte Carlo checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::bounds::ProbabilityVector;
use crate::error::Result;

/// Samples per generator stream in [`min_over_samples`].
pub const CHUNK: usize = 512;

/// Smallest value of `f` over `samples` draws. Draws are split into fixed
/// chunks, each using its own stream of a generator seeded with `seed`, so
/// the result is reproducible and independent of the thread count.
pub fn min_over_samples<F>(samples: usize, seed: u64, f: F) -> Result<f64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut worst = f64::INFINITY;
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                worst = worst.min(f(&mut rng)?);
            }
            Ok(worst)
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// Concentrations mixed into [`random_distribution`]; small values give
/// nearly pure distributions, large ones nearly uniform.
const CONCENTRATIONS: [f64; 5] = [0.05, 0.3, 1.0, 3.0, 30.0];

/// Symmetric Dirichlet sample with a length drawn from `min_len..=max_len`
/// and a concentration drawn from a fixed ladder.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, min_len: usize, max_len: usize) -> ProbabilityVector {
    let len = rng.gen_range(min_len..=max_len);
    let alpha = CONCENTRATIONS[rng.gen_range(0..CONCENTRATIONS.len())];
    dirichlet(rng, len, alpha)
}

pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, len: usize, alpha: f64) -> ProbabilityVector {
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let draws: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && total.is_finite() {
            let probs = draws.into_iter().map(|x| x / total).collect();
            if let Ok(p) = ProbabilityVector::new(probs) {
                return p;
            }
        }
    }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-8 {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}

/// Uniform point of the unit ball, i.e. a Bloch vector of a random qubit state.
pub fn random_bloch_ball<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let dir = random_unit_vector(rng);
    let r = rng.gen::<f64>().cbrt();
    [r * dir[0], r * dir[1], r * dir[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = random_distribution(&mut rng, 2, 64);
            assert!((2..=64).contains(&p.len()));
            let b = random_bloch_ball(&mut rng);
            assert!(b.iter().map(|x| x * x).sum::<f64>() <= 1.0);
        }
    }

    #[test]
    fn chunked_minimum_is_reproducible() {
        let f = |rng: &mut ChaCha8Rng| Ok(rng.gen::<f64>());
        let a = min_over_samples(2000, 4, f).unwrap();
        assert_eq!(a, min_over_samples(2000, 4, f).unwrap());
        assert_ne!(a, min_over_samples(2000, 5, f).unwrap());
        assert_eq!(min_over_samples(0, 4, f).unwrap(), f64::INFINITY);
    }
}
