//! Dense truncated free tensor algebra over `R^d`.
//!
//! An element is a sequence of tensors `(t_0, t_1, ..., t_M)` with `t_m` a
//! degree-`m` tensor stored as `d^m` coefficients in row-major lexicographic
//! multi-index order. All levels live in one contiguous buffer. Products are
//! computed in the quotient at depth `M`: terms of degree above `M` are
//! dropped.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Level-0 magnitude below which an element is treated as non-invertible.
pub const INVERTIBILITY_TOL: f64 = 1e-12;

/// Relative tolerance of the group-likeness predicate.
pub const GROUPLIKE_TOL: f64 = 1e-9;

/// An element of the tensor algebra truncated at `depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTensor {
    width: usize,
    depth: usize,
    coeffs: Vec<f64>,
}

/// Number of coefficients in levels `0..=depth` for the given width.
pub fn tensor_size(width: usize, depth: usize) -> usize {
    level_offset(width, depth + 1)
}

fn level_offset(width: usize, level: usize) -> usize {
    let mut off = 0;
    let mut len = 1;
    for _ in 0..level {
        off += len;
        len *= width;
    }
    off
}

/// Accumulates `scale * (a ⊗ b)` into `out`, where `out.len() == a.len() * b.len()`.
#[inline]
fn outer_acc(out: &mut [f64], a: &[f64], b: &[f64], scale: f64) {
    let nb = b.len();
    for (ia, &av) in a.iter().enumerate() {
        let s = av * scale;
        if s == 0.0 {
            continue;
        }
        let row = &mut out[ia * nb..(ia + 1) * nb];
        for (o, &bv) in row.iter_mut().zip(b) {
            *o += s * bv;
        }
    }
}

/// Contracts `w` (length `d^(k+j)`) with `g` (length `d^k`) over the leading
/// `k` indices, accumulating into `out` (length `d^j`).
#[inline]
fn contract_leading(out: &mut [f64], g: &[f64], w: &[f64]) {
    let nj = out.len();
    for (ia, &gv) in g.iter().enumerate() {
        if gv == 0.0 {
            continue;
        }
        for (o, &wv) in out.iter_mut().zip(&w[ia * nj..(ia + 1) * nj]) {
            *o += gv * wv;
        }
    }
}

/// Contracts `w` (length `d^(j+k)`) with `g` (length `d^k`) over the trailing
/// `k` indices, accumulating into `out` (length `d^j`).
#[inline]
fn contract_trailing(out: &mut [f64], g: &[f64], w: &[f64]) {
    let nk = g.len();
    for (ia, o) in out.iter_mut().enumerate() {
        let row = &w[ia * nk..(ia + 1) * nk];
        *o += row.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
    }
}

impl TruncatedTensor {
    /// The zero element.
    pub fn zeros(width: usize, depth: usize) -> Self {
        assert!(width >= 1, "tensor width must be positive");
        Self {
            width,
            depth,
            coeffs: vec![0.0; tensor_size(width, depth)],
        }
    }

    /// The multiplicative unit `(1, 0, 0, ...)`.
    pub fn unit(width: usize, depth: usize) -> Self {
        let mut t = Self::zeros(width, depth);
        t.coeffs[0] = 1.0;
        t
    }

    /// Builds an element from its flat coefficient buffer.
    pub fn from_coeffs(width: usize, depth: usize, coeffs: Vec<f64>) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidArgument("tensor width must be positive".into()));
        }
        let n = tensor_size(width, depth);
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "width {width}, depth {depth} needs {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            width,
            depth,
            coeffs,
        })
    }

    /// Builds an element from per-level arrays; `levels[m]` must have `d^m` entries.
    pub fn from_levels(width: usize, levels: &[Vec<f64>]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("at least level 0 is required".into()));
        }
        let depth = levels.len() - 1;
        let mut coeffs = Vec::with_capacity(tensor_size(width.max(1), depth));
        let mut expect = 1usize;
        for (m, lv) in levels.iter().enumerate() {
            if lv.len() != expect {
                return Err(Error::DimensionMismatch(format!(
                    "level {m} has {} coefficients, expected {expect}",
                    lv.len()
                )));
            }
            coeffs.extend_from_slice(lv);
            expect *= width;
        }
        Self::from_coeffs(width, depth, coeffs)
    }

    /// `exp(v) = (1, v, v⊗v/2!, ..., v^{⊗M}/M!)`.
    pub fn exp(v: &[f64], depth: usize) -> Self {
        let width = v.len();
        let mut t = Self::unit(width, depth);
        for m in 1..=depth {
            let (lo, hi) = t.coeffs.split_at_mut(level_offset(width, m));
            let prev = &lo[level_offset(width, m - 1)..];
            let cur = &mut hi[..prev.len() * width];
            outer_acc(cur, prev, v, 1.0 / m as f64);
        }
        t
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// All coefficients, level by level.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn level(&self, m: usize) -> &[f64] {
        let a = level_offset(self.width, m);
        let b = level_offset(self.width, m + 1);
        &self.coeffs[a..b]
    }

    pub fn level_mut(&mut self, m: usize) -> &mut [f64] {
        let a = level_offset(self.width, m);
        let b = level_offset(self.width, m + 1);
        &mut self.coeffs[a..b]
    }

    /// Level-0 coefficient.
    pub fn scalar(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient at a multi-index with 0-based letters.
    pub fn get(&self, word: &[usize]) -> f64 {
        let mut idx = 0;
        for &i in word {
            assert!(i < self.width, "letter {i} out of range");
            idx = idx * self.width + i;
        }
        self.level(word.len())[idx]
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.width != other.width || self.depth != other.depth {
            return Err(Error::DimensionMismatch(format!(
                "(width {}, depth {}) vs (width {}, depth {})",
                self.width, self.depth, other.width, other.depth
            )));
        }
        Ok(())
    }

    pub fn is_unital(&self) -> bool {
        self.coeffs[0] == 1.0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, 1.0);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_scaled(other, -1.0);
        Ok(out)
    }

    /// `self += c * other`. Panics on shape mismatch.
    pub fn add_assign_scaled(&mut self, other: &Self, c: f64) {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "shape mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x *= c);
        out
    }

    /// Truncated product `(s·t)_m = Σ_k s_k ⊗ t_{m-k}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.width, self.depth);
        for m in 0..=self.depth {
            let a = level_offset(self.width, m);
            let b = level_offset(self.width, m + 1);
            let dst = &mut out.coeffs[a..b];
            for k in 0..=m {
                outer_acc(dst, self.level(k), other.level(m - k), 1.0);
            }
        }
        out
    }

    /// Right-multiplies in place by `exp(v)`, using `scratch` as working memory.
    ///
    /// Levels are updated from the top down with a Horner scheme, so each
    /// segment costs `O(M d^M)` without materialising `exp(v)`.
    pub fn mul_exp_assign(&mut self, v: &[f64], scratch: &mut ExpScratch) {
        assert_eq!(v.len(), self.width, "increment dimension mismatch");
        let d = self.width;
        for m in (1..=self.depth).rev() {
            let acc = &mut scratch.acc;
            let tmp = &mut scratch.tmp;
            acc.clear();
            let s0 = self.coeffs[0] / m as f64;
            acc.extend(v.iter().map(|x| s0 * x));
            for k in 1..m {
                // acc <- (acc + s_k) ⊗ v / (m - k)
                let sk = self.level(k);
                for (a, s) in acc.iter_mut().zip(sk) {
                    *a += s;
                }
                tmp.clear();
                tmp.resize(acc.len() * d, 0.0);
                outer_acc(tmp, acc, v, 1.0 / (m - k) as f64);
                std::mem::swap(acc, tmp);
            }
            for (s, a) in self.level_mut(m).iter_mut().zip(scratch.acc.iter()) {
                *s += a;
            }
        }
    }

    /// Multiplicative inverse via the terminating geometric series
    /// `t^{-1} = (1/t_0) Σ_m (1 - t/t_0)^m`.
    pub fn inverse(&self) -> Result<Self> {
        let t0 = self.coeffs[0];
        if !(t0.abs() > INVERTIBILITY_TOL) {
            return Err(Error::NotInvertible(t0));
        }
        let mut u = self.scale(-1.0 / t0);
        u.coeffs[0] = 0.0;
        let unit = Self::unit(self.width, self.depth);
        // Horner: r <- 1 + u·r, M times.
        let mut r = unit.clone();
        for _ in 0..self.depth {
            r = u.mul_unchecked(&r);
            r.coeffs[0] += 1.0;
        }
        Ok(r.scale(1.0 / t0))
    }

    /// The antipode: `(i_1..i_m) ↦ (-1)^m (i_m..i_1)` on every level.
    pub fn antipode(&self) -> Self {
        let d = self.width;
        let mut out = Self::zeros(d, self.depth);
        for m in 0..=self.depth {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let src = self.level(m);
            let dst = out.level_mut(m);
            for (idx, &c) in src.iter().enumerate() {
                dst[reverse_word_index(idx, d, m)] = sign * c;
            }
        }
        out
    }

    /// Grading automorphism `δ_λ`: level `m` is scaled by `λ^m`.
    pub fn dilate(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        let mut f = 1.0;
        for m in 0..=self.depth {
            out.level_mut(m).iter_mut().for_each(|x| *x *= f);
            f *= lambda;
        }
        out
    }

    /// ℓ² inner product over all levels.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.dot(other))
    }

    pub(crate) fn dot(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Euclidean norm of a single level.
    pub fn level_norm(&self, m: usize) -> f64 {
        self.level(m).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Adjoint of `x ↦ g·x`: `<g·x, w> = <x, lmul_adjoint(g, w)>`.
    pub fn lmul_adjoint(g: &Self, w: &Self) -> Result<Self> {
        g.check_compatible(w)?;
        Ok(Self::lmul_adjoint_unchecked(g, w))
    }

    pub(crate) fn lmul_adjoint_unchecked(g: &Self, w: &Self) -> Self {
        let mut out = Self::zeros(g.width, g.depth);
        for j in 0..=g.depth {
            let a = level_offset(g.width, j);
            let b = level_offset(g.width, j + 1);
            let dst = &mut out.coeffs[a..b];
            for k in 0..=(g.depth - j) {
                contract_leading(dst, g.level(k), w.level(k + j));
            }
        }
        out
    }

    /// Adjoint of `x ↦ x·g`: `<x·g, w> = <x, rmul_adjoint(g, w)>`.
    pub fn rmul_adjoint(g: &Self, w: &Self) -> Result<Self> {
        g.check_compatible(w)?;
        Ok(Self::rmul_adjoint_unchecked(g, w))
    }

    pub(crate) fn rmul_adjoint_unchecked(g: &Self, w: &Self) -> Self {
        let mut out = Self::zeros(g.width, g.depth);
        for j in 0..=g.depth {
            let a = level_offset(g.width, j);
            let b = level_offset(g.width, j + 1);
            let dst = &mut out.coeffs[a..b];
            for k in 0..=(g.depth - j) {
                contract_trailing(dst, g.level(k), w.level(j + k));
            }
        }
        out
    }

    /// `true` iff `antipode(g)·g` is the unit up to `1e-9·(1 + ‖g‖)`.
    pub fn is_grouplike(&self) -> bool {
        let prod = self.antipode().mul_unchecked(self);
        let mut diff = prod;
        diff.coeffs[0] -= 1.0;
        diff.norm() <= GROUPLIKE_TOL * (1.0 + self.norm())
    }

    /// Same-shape element with the given level-1 vector and zeros elsewhere.
    pub fn from_vector(v: &[f64], depth: usize) -> Self {
        let mut t = Self::zeros(v.len(), depth);
        if depth >= 1 {
            t.level_mut(1).copy_from_slice(v);
        }
        t
    }

    /// Serialises as `width,depth` followed by one line per level with
    /// comma-separated coefficients at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{},{}", self.width, self.depth);
        for m in 0..=self.depth {
            let line = self
                .level(m)
                .iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(",");
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    /// Parses the format written by [`TruncatedTensor::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty tensor record"))?;
        let (width, depth) = parse_header(header).ok_or_else(|| {
            parse_err(hl + 1, format!("expected header `width,depth`, got `{header}`"))
        })?;
        let mut levels = Vec::with_capacity(depth + 1);
        for m in 0..=depth {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| parse_err(hl + 2 + m, format!("missing level {m}")))?;
            let vals = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(ln + 1, format!("bad coefficient: {e}")))?;
            levels.push(vals);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln + 1, "trailing data after last level"));
        }
        Self::from_levels(width, &levels)
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let (a, b) = line.trim().split_once(',')?;
    let w = a.trim().parse().ok()?;
    let d = b.trim().parse().ok()?;
    (w >= 1).then_some((w, d))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: "tensor".into(),
        line,
        message: message.into(),
    }
}

/// Index of the reversed word at level `m` in base `d`.
fn reverse_word_index(mut idx: usize, d: usize, m: usize) -> usize {
    let mut rev = 0;
    for _ in 0..m {
        rev = rev * d + idx % d;
        idx /= d;
    }
    rev
}

/// Reusable buffers for [`TruncatedTensor::mul_exp_assign`].
#[derive(Debug, Default, Clone)]
pub struct ExpScratch {
    acc: Vec<f64>,
    tmp: Vec<f64>,
}
