//! Piecewise-linear paths and their truncated signatures.
//!
//! A time series is identified with the piecewise-linear interpolation of its
//! observations. Only the increments between breakpoints enter the signature,
//! which is evaluated as the ordered product `exp(v_1)···exp(v_L)`.

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::tensor::{ExpScratch, TruncatedTensor};

/// Ordered breakpoints in `R^d`, optionally timestamped.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearPath {
    dim: usize,
    /// Row-major breakpoints, `dim` values per point.
    points: Vec<f64>,
    times: Option<Vec<f64>>,
}

impl PiecewiseLinearPath {
    /// Path through the given points with no timestamps.
    pub fn new(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPath("dimension must be positive".into()));
        }
        if points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::InvalidPath(format!(
                "{} coordinates do not form a non-empty list of {dim}-dimensional points",
                points.len()
            )));
        }
        Ok(Self {
            dim,
            points,
            times: None,
        })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidPath("a path needs at least one breakpoint".into()))?;
        let dim = first.as_ref().len();
        let mut flat = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::InvalidPath(format!(
                    "breakpoint {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            flat.extend_from_slice(p);
        }
        Self::new(dim, flat)
    }

    /// Builds a timestamped path from `(time, value)` rows.
    pub fn from_time_series<P: AsRef<[f64]>>(rows: &[(f64, P)]) -> Result<Self> {
        let pts: Vec<&[f64]> = rows.iter().map(|(_, p)| p.as_ref()).collect();
        let times = rows.iter().map(|(t, _)| *t).collect();
        Self::from_points(&pts)?.with_times(times)
    }

    /// Attaches timestamps, which must be finite and strictly increasing.
    pub fn with_times(mut self, times: Vec<f64>) -> Result<Self> {
        if times.len() != self.len() {
            return Err(Error::InvalidPath(format!(
                "{} timestamps for {} breakpoints",
                times.len(),
                self.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidPath("timestamps must be finite".into()));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(format!(
                "timestamps not strictly increasing at index {}",
                i + 1
            )));
        }
        self.times = Some(times);
        Ok(self)
    }

    pub fn without_times(mut self) -> Self {
        self.times = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of breakpoints.
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn num_segments(&self) -> usize {
        self.len() - 1
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn flat_points(&self) -> &[f64] {
        &self.points
    }

    pub fn times(&self) -> Option<&[f64]> {
        self.times.as_deref()
    }

    pub fn has_times(&self) -> bool {
        self.times.is_some()
    }

    /// Timestamps, or the uniform grid `0, 1, ..., L` when none are stored.
    pub fn times_or_uniform(&self) -> Vec<f64> {
        match &self.times {
            Some(t) => t.clone(),
            None => (0..self.len()).map(|i| i as f64).collect(),
        }
    }

    pub fn first(&self) -> &[f64] {
        self.point(0)
    }

    pub fn last(&self) -> &[f64] {
        self.point(self.len() - 1)
    }

    /// Segment increments `v_i = x_{i+1} - x_i`.
    pub fn increments(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.points
            .chunks_exact(self.dim)
            .zip(self.points.chunks_exact(self.dim).skip(1))
            .map(|(a, b)| b.iter().zip(a).map(|(y, x)| y - x).collect())
    }

    /// Sum of Euclidean segment lengths (the 1-variation).
    pub fn length(&self) -> f64 {
        self.increments()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum()
    }

    /// Truncated signature `exp(v_1)···exp(v_L)`, streamed left to right.
    pub fn signature(&self, depth: usize) -> TruncatedTensor {
        let mut sig = TruncatedTensor::unit(self.dim, depth);
        let mut scratch = ExpScratch::default();
        let mut v = vec![0.0; self.dim];
        for w in self.points.windows(2 * self.dim).step_by(self.dim) {
            let (a, b) = w.split_at(self.dim);
            for ((vi, bi), ai) in v.iter_mut().zip(b).zip(a) {
                *vi = bi - ai;
            }
            sig.mul_exp_assign(&v, &mut scratch);
        }
        sig
    }

    /// Concatenation `self ★ other`: `other` is translated to start where
    /// `self` ends. Timestamps are kept only if both paths carry them, with
    /// `other`'s clock shifted to continue from `self`'s last time.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate paths of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        let shift: Vec<f64> = self
            .last()
            .iter()
            .zip(other.first())
            .map(|(a, b)| a - b)
            .collect();
        let mut points = self.points.clone();
        for p in other.points().skip(1) {
            points.extend(p.iter().zip(&shift).map(|(x, s)| x + s));
        }
        let times = match (&self.times, &other.times) {
            (Some(a), Some(b)) => {
                let off = a[a.len() - 1] - b[0];
                let mut t = a.clone();
                t.extend(b.iter().skip(1).map(|x| x + off));
                Some(t)
            }
            _ => None,
        };
        Ok(Self {
            dim: self.dim,
            points,
            times,
        })
    }

    /// The path run backwards. Timestamps are mirrored so they stay increasing.
    pub fn reverse(&self) -> Self {
        let points = self
            .points
            .chunks_exact(self.dim)
            .rev()
            .flatten()
            .copied()
            .collect();
        let times = self.times.as_ref().map(|t| {
            let (a, b) = (t[0], t[t.len() - 1]);
            t.iter().rev().map(|x| a + b - x).collect()
        });
        Self {
            dim: self.dim,
            points,
            times,
        }
    }

    /// Prepends time as coordinate 0. Paths without timestamps use `0, 1, ..., L`.
    pub fn time_augment(&self) -> Self {
        let times = self.times_or_uniform();
        let mut points = Vec::with_capacity(self.len() * (self.dim + 1));
        for (t, p) in times.iter().zip(self.points()) {
            points.push(*t);
            points.extend_from_slice(p);
        }
        Self {
            dim: self.dim + 1,
            points,
            times: Some(times),
        }
    }

    /// Drops coordinate `coord`, keeping timestamps.
    pub fn project_out(&self, coord: usize) -> Result<Self> {
        if self.dim < 2 || coord >= self.dim {
            return Err(Error::InvalidArgument(format!(
                "cannot remove coordinate {coord} from a {}-dimensional path",
                self.dim
            )));
        }
        let points = self
            .points()
            .flat_map(|p| {
                p.iter()
                    .enumerate()
                    .filter(move |(i, _)| *i != coord)
                    .map(|(_, x)| *x)
            })
            .collect();
        Ok(Self {
            dim: self.dim - 1,
            points,
            times: self.times.clone(),
        })
    }

    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "shift of dimension {} for a {}-dimensional path",
                shift.len(),
                self.dim
            )));
        }
        let mut out = self.clone();
        for p in out.points.chunks_exact_mut(self.dim) {
            for (x, s) in p.iter_mut().zip(shift) {
                *x += s;
            }
        }
        Ok(out)
    }

    /// Spatial scaling of every breakpoint by `lambda`.
    pub fn scale(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.points.iter_mut().for_each(|x| *x *= lambda);
        out
    }

    /// Splits segment `seg` at its midpoint. The image of the path is unchanged.
    pub fn insert_midpoint(&self, seg: usize) -> Result<Self> {
        if seg >= self.num_segments() {
            return Err(Error::InvalidArgument(format!(
                "segment {seg} out of range for a path with {} segments",
                self.num_segments()
            )));
        }
        let mid: Vec<f64> = self
            .point(seg)
            .iter()
            .zip(self.point(seg + 1))
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let at = (seg + 1) * self.dim;
        let mut points = self.points.clone();
        points.splice(at..at, mid);
        let times = self.times.as_ref().map(|t| {
            let mut t = t.clone();
            t.insert(seg + 1, 0.5 * (t[seg] + t[seg + 1]));
            t
        });
        Ok(Self {
            dim: self.dim,
            points,
            times,
        })
    }

    /// Linear interpolation at time `t`, clamped to the endpoints.
    pub fn value_at(&self, t: f64) -> Vec<f64> {
        let times = self.times_or_uniform();
        let n = times.len();
        if n == 1 || t <= times[0] {
            return self.first().to_vec();
        }
        if t >= times[n - 1] {
            return self.last().to_vec();
        }
        // first index with times[i] > t
        let i = times.partition_point(|&s| s <= t);
        let (t0, t1) = (times[i - 1], times[i]);
        let w = (t - t0) / (t1 - t0);
        self.point(i - 1)
            .iter()
            .zip(self.point(i))
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }
}

/// Signatures of a batch of paths, in input order.
pub fn signatures(paths: &[PiecewiseLinearPath], depth: usize, exec: Exec) -> Vec<TruncatedTensor> {
    exec.map(paths, |p| p.signature(depth))
}
