//! Dynamic time warping baselines.
//!
//! Local cost is the squared Euclidean distance between points. Admissible
//! steps are `(1,0)`, `(0,1)` and `(1,1)`; both sequences are matched from
//! first to last point.

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;

/// Dense pairwise squared distances, row `i` for point `i` of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    cost: Vec<f64>,
}

impl CostMatrix {
    pub fn new(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath) -> Result<Self> {
        check_pair(x, y)?;
        let (rows, cols) = (x.len(), y.len());
        let mut cost = Vec::with_capacity(rows * cols);
        for a in x.points() {
            cost.extend(y.points().map(|b| sq_dist(a, b)));
        }
        Ok(Self { rows, cols, cost })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.cols + j]
    }
}

fn check_pair(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "paths of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Runs the accumulated-cost recursion with rolling rows and a three-way
/// `combine(diag, up, left)`.
fn accumulate(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, combine: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let m = y.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for (i, a) in x.points().enumerate() {
        for (j, b) in y.points().enumerate() {
            let c = sq_dist(a, b);
            cur[j] = if i == 0 && j == 0 {
                c
            } else {
                let diag = if i > 0 && j > 0 { prev[j - 1] } else { f64::INFINITY };
                let up = if i > 0 { prev[j] } else { f64::INFINITY };
                let left = if j > 0 { cur[j - 1] } else { f64::INFINITY };
                c + combine(diag, up, left)
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Classical DTW cost.
pub fn dtw(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath) -> Result<f64> {
    check_pair(x, y)?;
    Ok(accumulate(x, y, |a, b, c| a.min(b).min(c)))
}

fn soft_min(gamma: f64, a: f64, b: f64, c: f64) -> f64 {
    let m = a.min(b).min(c);
    if m == f64::INFINITY {
        return m;
    }
    let s = (-(a - m) / gamma).exp() + (-(b - m) / gamma).exp() + (-(c - m) / gamma).exp();
    m - gamma * s.ln()
}

/// Soft-DTW with smoothing `gamma > 0`.
pub fn soft_dtw(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, gamma: f64) -> Result<f64> {
    check_pair(x, y)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("soft-DTW needs gamma > 0, got {gamma}")));
    }
    Ok(accumulate(x, y, |a, b, c| soft_min(gamma, a, b, c)))
}

/// Debiased soft-DTW, `sdtw(x,y) - (sdtw(x,x) + sdtw(y,y)) / 2`.
pub fn soft_dtw_divergence(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, gamma: f64) -> Result<f64> {
    let xy = soft_dtw(x, y, gamma)?;
    let xx = soft_dtw(x, x, gamma)?;
    let yy = soft_dtw(y, y, gamma)?;
    Ok(xy - 0.5 * (xx + yy))
}
