//! Counter-based Gaussian noise.
//!
//! Normal draw number `c` of path `p` is a pure function of `(master_seed, p, c)`:
//! a ChaCha8 keystream keyed by the master seed, with the path index as the stream id
//! and the draw counter as the block position. Each draw consumes exactly two 64-bit
//! words and is mapped to N(0,1) with the Box–Muller cosine branch, so draw `c` can be
//! recomputed in isolation and the sequential and random-access routes agree.

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Words of the ChaCha keystream (32-bit units) used per normal draw.
const WORDS_PER_DRAW: u128 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoiseSource {
    pub master_seed: u64,
    pub path_index: u64,
}

impl NoiseSource {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        Self {
            master_seed,
            path_index,
        }
    }

    fn stream(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.path_index);
        rng
    }

    /// The `counter`-th standard normal draw of this path.
    pub fn standard_normal(&self, counter: u64) -> f64 {
        let mut rng = self.stream();
        rng.set_word_pos(counter as u128 * WORDS_PER_DRAW);
        box_muller(&mut rng)
    }

    /// First `count` standard normal draws, in order.
    pub fn standard_normals(&self, count: usize) -> Vec<f64> {
        let mut rng = self.stream();
        (0..count).map(|_| box_muller(&mut rng)).collect()
    }

    /// Wiener increments for `n_steps` steps of size `dt` in dimension `dim`.
    /// Step `k`, component `j` uses draw `k·dim + j`.
    pub fn increments(&self, dt: f64, n_steps: usize, dim: usize) -> Vec<DVector<f64>> {
        let scale = dt.sqrt();
        let z = self.standard_normals(n_steps * dim);
        z.chunks(dim.max(1))
            .take(n_steps)
            .map(|c| DVector::from_iterator(dim, c.iter().map(|v| v * scale)))
            .collect()
    }

    /// Scalar Wiener increments.
    pub fn scalar_increments(&self, dt: f64, n_steps: usize) -> Vec<f64> {
        let scale = dt.sqrt();
        self.standard_normals(n_steps)
            .into_iter()
            .map(|z| z * scale)
            .collect()
    }
}

fn unit_open(bits: u64) -> f64 {
    // (0, 1]
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn unit_closed_open(bits: u64) -> f64 {
    // [0, 1)
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = unit_open(rng.next_u64());
    let u2 = unit_closed_open(rng.next_u64());
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Sums consecutive groups of `factor` increments, giving the increments of the same
/// Brownian path on a grid `factor` times coarser. Trailing partial groups are dropped.
pub fn coarsen_increments(fine: &[DVector<f64>], factor: usize) -> Vec<DVector<f64>> {
    assert!(factor >= 1, "coarsening factor must be positive");
    fine.chunks_exact(factor)
        .map(|group| {
            let mut acc = group[0].clone();
            for inc in &group[1..] {
                acc += inc;
            }
            acc
        })
        .collect()
}
