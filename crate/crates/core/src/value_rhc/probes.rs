use nalgebra::DVector;

use crate::sde::StateBounds;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
pub fn van_der_corput(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Point `index` (1-based to skip the origin of the cube) of the Halton sequence in `dim` dimensions.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton probes support up to {} dimensions", PRIMES.len());
    PRIMES[..dim].iter().map(|&p| van_der_corput(index, p)).collect()
}

/// Deterministic probe set: the origin, the box corners, then `n` Halton points.
pub fn probe_set(domain: &StateBounds, n: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(n + 1 + (1 << domain.dim()));
    out.push(DVector::zeros(domain.dim()));
    out.extend(domain.corners());
    out.extend((1..=n as u64).map(|i| domain.from_unit(&halton(i, domain.dim()))));
    out
}
