//! Experiment runners producing plot-ready CSV tables.
//!
//! Every grid point and draw reads its own random stream, so tables are
//! identical across execution modes and thread counts.

use std::fmt::Write as _;

use crate::baselines::{dtw, soft_dtw_divergence};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::scoring::{point_divergence, ScoringRule, Side};
use crate::stochastic::{brownian_with, power_warp, stream_rng, SimConfig, SpiralModel, WarpedMixModel};

/// `n` log-spaced values from 1 to `p_max`; a single point is `[1]`.
pub fn log_grid(p_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(p_max >= 1.0 && p_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("p_max must be >= 1, got {p_max}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let top = p_max.ln();
    let mut g: Vec<f64> = (0..n).map(|k| (top * k as f64 / (n - 1) as f64).exp()).collect();
    g[0] = 1.0;
    g[n - 1] = p_max;
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpConfig {
    pub p_max: f64,
    pub n_p: usize,
    pub gammas: Vec<f64>,
    pub depth: usize,
    pub n_paths: usize,
    pub sim: SimConfig,
}

impl Default for WarpConfig {
    fn default() -> Self {
        Self {
            p_max: 25.0,
            n_p: 20,
            gammas: vec![0.01, 0.1, 1.0],
            depth: 4,
            n_paths: 10,
            sim: SimConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpRow {
    pub p: f64,
    pub geometric: f64,
    /// One entry per configured `gamma`, in order.
    pub sdtw: Vec<f64>,
    pub dtw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpTable {
    pub config: WarpConfig,
    pub rows: Vec<WarpRow>,
}

impl WarpTable {
    pub fn header(&self) -> String {
        let mut h = String::from("p,geometric_divergence");
        for g in &self.config.gammas {
            let _ = write!(h, ",sdtw_gamma_{g}");
        }
        h.push_str(",dtw");
        h
    }

    /// Column of the given `gamma`, if configured.
    pub fn sdtw_column(&self, gamma: f64) -> Option<Vec<f64>> {
        let k = self.config.gammas.iter().position(|g| *g == gamma)?;
        Some(self.rows.iter().map(|r| r.sdtw[k]).collect())
    }

    pub fn geometric_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.geometric).collect()
    }

    pub fn dtw_column(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.dtw).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{:e}", r.p, r.geometric);
            for v in &r.sdtw {
                let _ = write!(s, ",{v:e}");
            }
            let _ = writeln!(s, ",{:e}", r.dtw);
        }
        s
    }
}

/// Compares a Brownian path with its power-warped copy over a log grid of
/// exponents. Each row averages over `n_paths` draws; draw `k` uses stream
/// `k` of `sim.seed` at every exponent.
pub fn warp_experiment(cfg: &WarpConfig, exec: Exec) -> Result<WarpTable> {
    cfg.sim.validate()?;
    if cfg.n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be positive".into()));
    }
    if let Some(g) = cfg.gammas.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {g}")));
    }
    let grid = log_grid(cfg.p_max, cfg.n_p)?;
    let paths = exec.try_map_range(cfg.n_paths, |k| brownian_with(&cfg.sim, &mut stream_rng(cfg.sim.seed, k as u64)))?;
    let n = cfg.n_paths as f64;
    let rows = exec.try_map(&grid, |&p| {
        let mut row = WarpRow {
            p,
            geometric: 0.0,
            sdtw: vec![0.0; cfg.gammas.len()],
            dtw: 0.0,
        };
        for x in &paths {
            let y = power_warp(x, p)?;
            row.geometric += point_divergence(x, &y, cfg.depth)? / n;
            for (acc, &g) in row.sdtw.iter_mut().zip(&cfg.gammas) {
                *acc += soft_dtw_divergence(x, &y, g)? / n;
            }
            row.dtw += dtw(x, &y)? / n;
        }
        Ok::<_, Error>(row)
    })?;
    Ok(WarpTable { config: cfg.clone(), rows })
}

/// Which conditional model an MI sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiModel {
    /// Spiral process conditioned on its rotational speed.
    Spiral,
    /// Warped mixture conditioned on its driving Brownian path.
    WarpedMix,
}

impl MiModel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Spiral => "spiral",
            Self::WarpedMix => "warped_mix",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiConfig {
    pub model: MiModel,
    pub rhos: Vec<f64>,
    pub n_u: usize,
    pub n_x: usize,
    pub depth: usize,
    pub side: Side,
    pub seeds: Vec<u64>,
    pub sim: SimConfig,
}

impl MiConfig {
    pub fn new(model: MiModel) -> Self {
        Self {
            model,
            rhos: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            n_u: 20,
            n_x: 50,
            depth: 4,
            side: Side::Right,
            seeds: vec![0],
            sim: SimConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiRow {
    pub rho: f64,
    pub mi: f64,
    pub entropy: f64,
    pub n_u: usize,
    pub n_x: usize,
    pub seed: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiTable {
    pub config: MiConfig,
    /// Rows ordered by `rho`, then by seed.
    pub rows: Vec<MiRow>,
}

impl MiTable {
    pub const HEADER: &'static str = "rho,mi,entropy,n_u,n_x,seed";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::HEADER);
        for r in &self.rows {
            let _ = writeln!(s, "{},{:e},{:e},{},{},{}", r.rho, r.mi, r.entropy, r.n_u, r.n_x, r.seed);
        }
        s
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    /// Rows for one `rho`.
    pub fn at(&self, rho: f64) -> impl Iterator<Item = &MiRow> {
        self.rows.iter().filter(move |r| r.rho == rho)
    }
}

/// Mutual-information sweep over `rhos` and `seeds`. Each `(rho, seed)`
/// pair draws from `seed` independently of the other grid points.
pub fn mi_experiment(cfg: &MiConfig, exec: Exec) -> Result<MiTable> {
    cfg.sim.validate()?;
    if let Some(r) = cfg.rhos.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::InvalidArgument(format!("rho must lie in [0, 1], got {r}")));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one seed is required".into()));
    }
    let jobs: Vec<(f64, u64)> = cfg
        .rhos
        .iter()
        .flat_map(|&r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    // parallelism lives inside each estimate
    let rule = ScoringRule::new(cfg.depth, cfg.side).with_exec(exec);
    let rows = Exec::Sequential.try_map(&jobs, |&(rho, seed)| {
        let sim = SimConfig { seed, ..cfg.sim };
        let est = match cfg.model {
            MiModel::Spiral => rule.mutual_information(&SpiralModel { rho, cfg: sim }, cfg.n_u, cfg.n_x, seed)?,
            MiModel::WarpedMix => rule.mutual_information(&WarpedMixModel { rho, cfg: sim }, cfg.n_u, cfg.n_x, seed)?,
        };
        Ok::<_, Error>(MiRow {
            rho,
            mi: est.mi,
            entropy: est.entropy,
            n_u: est.n_u,
            n_x: est.n_x,
            seed,
            converged: est.all_converged,
        })
    })?;
    Ok(MiTable { config: cfg.clone(), rows })
}

/// Sample mean and standard deviation (`n - 1` denominator).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
