//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trackscore::tensor::tensor_size;
use trackscore::{PiecewiseLinearPath, TruncatedTensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_path(r: &mut ChaCha8Rng, dim: usize, segments: usize) -> PiecewiseLinearPath {
    let pts = (0..(segments + 1) * dim).map(|_| r.random_range(-1.0..1.0)).collect();
    PiecewiseLinearPath::new(dim, pts).unwrap()
}

pub fn random_tensor(r: &mut ChaCha8Rng, d: usize, m: usize, scale: f64) -> TruncatedTensor {
    let c = (0..tensor_size(d, m)).map(|_| scale * r.random_range(-1.0..1.0)).collect();
    TruncatedTensor::from_coeffs(d, m, c).unwrap()
}

pub fn level_offset(d: usize, m: usize) -> usize {
    (0..m).map(|k| d.pow(k as u32)).sum()
}

/// Iterated integrals by trapezoidal quadrature of `dI_{w i} = I_w dX^i`
/// with `n` steps per segment.
pub fn quadrature_signature(x: &PiecewiseLinearPath, depth: usize, n: usize) -> Vec<f64> {
    let d = x.dim();
    let mut s = vec![0.0; tensor_size(d, depth)];
    s[0] = 1.0;
    for inc in x.increments() {
        let dx: Vec<f64> = inc.iter().map(|v| v / n as f64).collect();
        for _ in 0..n {
            let old = s.clone();
            for m in 1..=depth {
                let (lo, hi) = (level_offset(d, m - 1), level_offset(d, m));
                for w in 0..d.pow(m as u32 - 1) {
                    let avg = 0.5 * (old[lo + w] + s[lo + w]);
                    for (i, dxi) in dx.iter().enumerate() {
                        s[hi + w * d + i] += avg * dxi;
                    }
                }
            }
        }
    }
    s
}

/// `‖a - b‖ / (1 + max(‖a‖, ‖b‖))`.
pub fn rel_err(a: &TruncatedTensor, b: &TruncatedTensor) -> f64 {
    a.sub(b).unwrap().norm() / (1.0 + a.norm().max(b.norm()))
}
