//! Seeded simulators for the experiments.
//!
//! Random streams come from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64(seed)` and switched to stream `k` with `set_stream(k)`.
//! Gaussians are drawn with `rand_distr::StandardNormal`. Work item `k` of a
//! batch always reads stream `k`, so results do not depend on the order in
//! which items are executed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;
use crate::scoring::ConditionalSampler;

pub type SimRng = ChaCha8Rng;

/// Upper end of the rotational-speed distribution, `ω ∼ U[0, 8π)`.
pub const OMEGA_MAX: f64 = 8.0 * PI;

/// Range of the random warp exponent, `p ∼ U[1, 10]`.
pub const WARP_P_RANGE: (f64, f64) = (1.0, 10.0);

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Horizon, grid and dimension of a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub horizon: f64,
    pub resolution: f64,
    pub dim: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            horizon: 1.0,
            resolution: 1e-2,
            dim: 2,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.resolution > 0.0 && self.resolution < self.horizon) {
            return Err(Error::InvalidArgument(format!(
                "resolution must lie in (0, horizon), got {}",
                self.resolution
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(())
    }

    /// Number of grid steps, `round(T / resolution)`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.resolution).round() as usize
    }

    /// Grid `t_k = k·resolution`, `k = 0..=steps`.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps()).map(|k| k as f64 * self.resolution).collect()
    }

    pub fn rng(&self) -> SimRng {
        stream_rng(self.seed, 0)
    }
}

/// Brownian motion from the origin on the grid of `cfg`, drawing from `rng`.
pub fn brownian_with(cfg: &SimConfig, rng: &mut SimRng) -> Result<PiecewiseLinearPath> {
    cfg.validate()?;
    let grid = cfg.grid();
    let sd = cfg.resolution.sqrt();
    let mut pts = Vec::with_capacity(grid.len() * cfg.dim);
    let mut cur = vec![0.0; cfg.dim];
    pts.extend_from_slice(&cur);
    for _ in 1..grid.len() {
        for c in cur.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *c += sd * z;
        }
        pts.extend_from_slice(&cur);
    }
    PiecewiseLinearPath::new(cfg.dim, pts)?.with_times(grid)
}

/// Brownian motion seeded by `cfg.seed`.
pub fn brownian(cfg: &SimConfig) -> Result<PiecewiseLinearPath> {
    brownian_with(cfg, &mut cfg.rng())
}

/// Time change `t ↦ t_0 + T((t - t_0)/T)^p` followed by linear interpolation
/// back onto the original grid.
pub fn power_warp(x: &PiecewiseLinearPath, p: f64) -> Result<PiecewiseLinearPath> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("warp exponent must be >= 1, got {p}")));
    }
    let times = x
        .times()
        .ok_or_else(|| Error::InvalidPath("power_warp needs a timestamped path".into()))?;
    if p == 1.0 {
        return Ok(x.clone());
    }
    let t0 = times[0];
    let span = times[times.len() - 1] - t0;
    let mut pts = Vec::with_capacity(x.flat_points().len());
    for &t in times {
        let s = if span > 0.0 { t0 + span * ((t - t0) / span).powf(p) } else { t };
        pts.extend(x.value_at(s));
    }
    PiecewiseLinearPath::new(x.dim(), pts)?.with_times(times.to_vec())
}

pub fn omega_with(rng: &mut SimRng) -> f64 {
    rng.random_range(0.0..OMEGA_MAX)
}

/// Rotational speed `ω ∼ U[0, 8π)` drawn from `seed`.
pub fn sample_omega(seed: u64) -> f64 {
    omega_with(&mut stream_rng(seed, 0))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho must lie in [0, 1], got {rho}")));
    }
    Ok(())
}

/// `y_t = ρ t (cos ωt, sin ωt) + sqrt(1 - ρ²) x_t` with a fresh planar
/// Brownian `x` from `rng`.
pub fn spiral_with(rho: f64, omega: f64, cfg: &SimConfig, rng: &mut SimRng) -> Result<PiecewiseLinearPath> {
    check_rho(rho)?;
    if cfg.dim != 2 {
        return Err(Error::InvalidArgument(format!("spiral process is planar, got dim {}", cfg.dim)));
    }
    let noise = brownian_with(cfg, rng)?;
    let times = noise.times().expect("brownian paths are timestamped").to_vec();
    let c = (1.0 - rho * rho).max(0.0).sqrt();
    let mut pts = Vec::with_capacity(noise.flat_points().len());
    for (t, x) in times.iter().zip(noise.points()) {
        let (s, co) = (omega * t).sin_cos();
        pts.push(rho * t * co + c * x[0]);
        pts.push(rho * t * s + c * x[1]);
    }
    PiecewiseLinearPath::new(2, pts)?.with_times(times)
}

/// Spiral process seeded by `cfg.seed`.
pub fn spiral_process(rho: f64, omega: f64, cfg: &SimConfig) -> Result<PiecewiseLinearPath> {
    spiral_with(rho, omega, cfg, &mut cfg.rng())
}

/// Spiral model conditioned on its rotational speed.
#[derive(Debug, Clone, Copy)]
pub struct SpiralModel {
    pub rho: f64,
    pub cfg: SimConfig,
}

impl ConditionalSampler for SpiralModel {
    type Condition = f64;

    fn sample_condition(&self, rng: &mut SimRng) -> Result<f64> {
        Ok(omega_with(rng))
    }

    fn sample_given(&self, omega: &f64, rng: &mut SimRng) -> Result<PiecewiseLinearPath> {
        spiral_with(self.rho, *omega, &self.cfg, rng)
    }
}

/// One draw of the warped mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedMix {
    pub x: PiecewiseLinearPath,
    pub z: PiecewiseLinearPath,
    pub p: f64,
}

/// `z_t = ρ x_{φ(t)} + sqrt(1 - ρ²) y_t` for given `x` and `p`, with a fresh
/// Brownian `y` from `rng`.
pub fn warped_mix_given(
    x: &PiecewiseLinearPath,
    p: f64,
    rho: f64,
    cfg: &SimConfig,
    rng: &mut SimRng,
) -> Result<PiecewiseLinearPath> {
    check_rho(rho)?;
    let warped = power_warp(x, p)?;
    let y = brownian_with(cfg, rng)?;
    if y.len() != warped.len() || y.dim() != warped.dim() {
        return Err(Error::DimensionMismatch(
            "conditioning path does not live on the simulation grid".into(),
        ));
    }
    let c = (1.0 - rho * rho).max(0.0).sqrt();
    let pts = warped
        .flat_points()
        .iter()
        .zip(y.flat_points())
        .map(|(a, b)| rho * a + c * b)
        .collect();
    PiecewiseLinearPath::new(x.dim(), pts)?.with_times(y.times().expect("timestamped").to_vec())
}

pub fn warp_exponent_with(rng: &mut SimRng) -> f64 {
    rng.random_range(WARP_P_RANGE.0..=WARP_P_RANGE.1)
}

/// Draws `(x, z, p)` seeded by `cfg.seed`.
pub fn warped_mix_process(rho: f64, cfg: &SimConfig) -> Result<WarpedMix> {
    check_rho(rho)?;
    let mut rng = cfg.rng();
    let x = brownian_with(cfg, &mut rng)?;
    let p = warp_exponent_with(&mut rng);
    let z = warped_mix_given(&x, p, rho, cfg, &mut rng)?;
    Ok(WarpedMix { x, z, p })
}

/// Warped mixture `z` conditioned on the driving path `x`.
#[derive(Debug, Clone, Copy)]
pub struct WarpedMixModel {
    pub rho: f64,
    pub cfg: SimConfig,
}

impl ConditionalSampler for WarpedMixModel {
    type Condition = PiecewiseLinearPath;

    fn sample_condition(&self, rng: &mut SimRng) -> Result<PiecewiseLinearPath> {
        brownian_with(&self.cfg, rng)
    }

    fn sample_given(&self, x: &PiecewiseLinearPath, rng: &mut SimRng) -> Result<PiecewiseLinearPath> {
        let p = warp_exponent_with(rng);
        warped_mix_given(x, p, self.rho, &self.cfg, rng)
    }
}
