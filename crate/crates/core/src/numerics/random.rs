use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Seeded random stream backed by the ChaCha8 block function.
///
/// Streams are never shared between workers. Parallel code derives one
/// child per work item with [`RandomStream::child`], which depends only on
/// the parent seed and the item index, so results do not depend on how
/// items are scheduled.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for work item `index`, derived from the seed only
    /// (not from the current position of `self`).
    pub fn child(&self, index: u64) -> RandomStream {
        RandomStream::new(splitmix64(
            self.seed ^ splitmix64(index.wrapping_add(0x5851_F42D)),
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    fn next_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n` (multiply-shift, bias below 2⁻⁶⁴·n).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal via Box–Muller.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_open_closed();
        let u2 = self.next_f64();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(2.0 * PI * u2);
        self.spare_normal = Some(radius * s);
        radius * c
    }

    pub fn normal_vec(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.next_normal()).collect()
    }
}

/// Uniform sample on the sphere of the given radius centred at the origin:
/// an isotropic Gaussian draw, normalized and rescaled.
pub fn sample_sphere(dim: usize, radius: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("sphere radius must be positive and finite"));
    }
    loop {
        let mut v = rng.normal_vec(dim);
        let n = super::norm2(&v);
        if n > 0.0 && n.is_finite() {
            v.iter_mut().for_each(|x| *x = *x / n * radius);
            return Ok(v);
        }
    }
}
