//! Scoring rules on tracks.
//!
//! For a loss `L` on the tensor algebra with its minimum at the unit, the left
//! and right losses of an action `m ∈ H*` against a path `x` are
//! `L(m⁻¹Φ(x))` and `L(Φ(x)m⁻¹)`. A Bayes act minimises the expected loss
//! over an empirical measure; score, entropy, divergence and mutual
//! information all derive from it.
//!
//! Bayes acts are found in the inverted variable `x = m⁻¹`, where the
//! averaged objective `x ↦ E L(Φ(X)·x)` (right) or `E L(x·Φ(X))` (left) is
//! convex, and inverted at the end.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimize::{affine_descent, DescentConfig, DescentStatus, Functional};
use crate::par::Exec;
use crate::path::{signatures, PiecewiseLinearPath};
use crate::stochastic::{stream_rng, SimRng};
use crate::tensor::TruncatedTensor;

/// Which side the action is divided out on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `L(m⁻¹ Φ(x))`
    Left,
    /// `L(Φ(x) m⁻¹)`
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::InvalidArgument(format!("unknown side `{other}`"))),
        }
    }
}

/// Weighted sum of squared coefficients over levels `1..=M`.
///
/// Level 0 never contributes, so the minimum sits at the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredNorm {
    /// Weight of level `m` at index `m - 1`; missing levels weigh 1.
    level_weights: Vec<f64>,
}

impl Default for SquaredNorm {
    fn default() -> Self {
        Self::uniform()
    }
}

impl SquaredNorm {
    pub fn uniform() -> Self {
        Self {
            level_weights: Vec::new(),
        }
    }

    pub fn with_level_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("level weights must be positive".into()));
        }
        Ok(Self {
            level_weights: weights,
        })
    }

    fn weight(&self, m: usize) -> f64 {
        self.level_weights.get(m - 1).copied().unwrap_or(1.0)
    }

    pub fn value(&self, t: &TruncatedTensor) -> f64 {
        (1..=t.depth())
            .map(|m| self.weight(m) * t.level(m).iter().map(|x| x * x).sum::<f64>())
            .sum()
    }

    pub fn gradient(&self, t: &TruncatedTensor) -> TruncatedTensor {
        let mut g = t.scale(2.0);
        g.coeffs_mut()[0] = 0.0;
        for m in 1..=t.depth() {
            let w = self.weight(m);
            if w != 1.0 {
                g.level_mut(m).iter_mut().for_each(|x| *x *= w);
            }
        }
        g
    }
}

/// The uniform squared-norm loss `Σ_{m=1..M} ‖t_m‖²`.
pub fn loss_l(t: &TruncatedTensor) -> f64 {
    SquaredNorm::uniform().value(t)
}

fn check_unital(m: &TruncatedTensor) -> Result<()> {
    if (m.scalar() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnital(m.scalar()));
    }
    Ok(())
}

/// Side loss of action `m` against a precomputed signature.
pub fn side_loss_sig(
    loss: &SquaredNorm,
    side: Side,
    sig: &TruncatedTensor,
    m: &TruncatedTensor,
) -> Result<f64> {
    check_unital(m)?;
    let inv = m.inverse()?;
    let prod = match side {
        Side::Left => inv.mul(sig)?,
        Side::Right => sig.mul(&inv)?,
    };
    Ok(loss.value(&prod))
}

/// `L(m⁻¹ Φ(x))` with the uniform squared-norm loss at `m`'s depth.
pub fn left_loss(x: &PiecewiseLinearPath, m: &TruncatedTensor) -> Result<f64> {
    side_loss_sig(&SquaredNorm::uniform(), Side::Left, &x.signature(m.depth()), m)
}

/// `L(Φ(x) m⁻¹)` with the uniform squared-norm loss at `m`'s depth.
pub fn right_loss(x: &PiecewiseLinearPath, m: &TruncatedTensor) -> Result<f64> {
    side_loss_sig(&SquaredNorm::uniform(), Side::Right, &x.signature(m.depth()), m)
}

/// Divergence between point masses, `L(Φ(x) Φ(y)⁻¹)`.
pub fn point_divergence(x: &PiecewiseLinearPath, y: &PiecewiseLinearPath, depth: usize) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!(
            "paths of dimension {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    let sx = x.signature(depth);
    let sy = y.signature(depth);
    Ok(loss_l(&sx.mul(&sy.inverse()?)?))
}

/// Finite weighted collection of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    paths: Vec<PiecewiseLinearPath>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Uniform weights.
    pub fn new(paths: Vec<PiecewiseLinearPath>) -> Result<Self> {
        let n = paths.len();
        Self::with_weights(paths, vec![1.0 / n.max(1) as f64; n])
    }

    /// Weights must be nonnegative and sum to one within `1e-12`.
    pub fn with_weights(paths: Vec<PiecewiseLinearPath>, weights: Vec<f64>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::InvalidArgument("empirical measure needs at least one path".into()));
        }
        if weights.len() != paths.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} paths",
                weights.len(),
                paths.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        let dim = paths[0].dim();
        if let Some(p) = paths.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "measure mixes paths of dimension {dim} and {}",
                p.dim()
            )));
        }
        Ok(Self { paths, weights })
    }

    pub fn dirac(path: PiecewiseLinearPath) -> Self {
        Self {
            paths: vec![path],
            weights: vec![1.0],
        }
    }

    /// `λ·a + (1-λ)·b` as a single measure over the union of supports.
    pub fn mixture(a: &Self, b: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("mixture weight {lambda} outside [0, 1]")));
        }
        let mut paths = a.paths.clone();
        paths.extend(b.paths.iter().cloned());
        let mut weights: Vec<f64> = a.weights.iter().map(|w| lambda * w).collect();
        weights.extend(b.weights.iter().map(|w| (1.0 - lambda) * w));
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::with_weights(paths, weights)
    }

    /// Every path run backwards.
    pub fn reversed(&self) -> Self {
        self.map_paths(|p| p.reverse())
    }

    /// Applies `f` to every path, keeping weights.
    pub fn map_paths(&self, f: impl Fn(&PiecewiseLinearPath) -> PiecewiseLinearPath) -> Self {
        Self {
            paths: self.paths.iter().map(f).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn paths(&self) -> &[PiecewiseLinearPath] {
        &self.paths
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.paths[0].dim()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn signatures(&self, depth: usize, exec: Exec) -> SignatureSample {
        SignatureSample {
            sigs: signatures(&self.paths, depth, exec),
            weights: self.weights.clone(),
        }
    }
}

/// Signatures of an empirical measure's support with their weights.
#[derive(Debug, Clone)]
pub struct SignatureSample {
    pub sigs: Vec<TruncatedTensor>,
    pub weights: Vec<f64>,
}

/// `E[Φ(X)]`, the Bayes act of the flat (linear) scoring rule.
pub fn expected_signature(mu: &EmpiricalMeasure, depth: usize) -> TruncatedTensor {
    let mut acc = TruncatedTensor::zeros(mu.dim(), depth);
    for (p, w) in mu.paths.iter().zip(&mu.weights) {
        acc.add_assign_scaled(&p.signature(depth), *w);
    }
    acc
}

/// `‖E Φ(X) - E Φ(Y)‖²` over levels `1..M`.
pub fn linear_divergence(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, depth: usize) -> Result<f64> {
    let a = expected_signature(mu, depth);
    let b = expected_signature(nu, depth);
    Ok(loss_l(&a.sub(&b)?))
}

/// A Bayes act with the optimizer's diagnostics.
#[derive(Debug, Clone)]
pub struct BayesAct {
    pub value: TruncatedTensor,
    pub side: Side,
    pub iterations: usize,
    /// Projected gradient norm of the objective in the inverted variable.
    pub grad_norm: f64,
    /// Expected side loss at `value`.
    pub objective: f64,
    pub status: DescentStatus,
}

impl BayesAct {
    pub fn converged(&self) -> bool {
        self.status == DescentStatus::Converged
    }
}

const CHUNK: usize = 64;

/// Averaged side loss as a function of the inverted action `x = m⁻¹`.
pub struct BayesObjective<'a> {
    sample: &'a SignatureSample,
    side: Side,
    loss: &'a SquaredNorm,
    exec: Exec,
}

impl<'a> BayesObjective<'a> {
    pub fn new(sample: &'a SignatureSample, side: Side, loss: &'a SquaredNorm, exec: Exec) -> Self {
        Self {
            sample,
            side,
            loss,
            exec,
        }
    }

    fn product(&self, sig: &TruncatedTensor, x: &TruncatedTensor) -> TruncatedTensor {
        match self.side {
            Side::Right => sig.mul_unchecked(x),
            Side::Left => x.mul_unchecked(sig),
        }
    }

    // Fixed chunking keeps the summation order, and hence the bits, independent
    // of the execution policy.
    fn chunks(&self) -> usize {
        self.sample.sigs.len().div_ceil(CHUNK)
    }

    fn chunk_range(&self, c: usize) -> std::ops::Range<usize> {
        c * CHUNK..((c + 1) * CHUNK).min(self.sample.sigs.len())
    }
}

impl Functional for BayesObjective<'_> {
    fn value(&self, x: &TruncatedTensor) -> f64 {
        let partial = self.exec.map_range(self.chunks(), |c| {
            self.chunk_range(c)
                .map(|i| self.sample.weights[i] * self.loss.value(&self.product(&self.sample.sigs[i], x)))
                .sum::<f64>()
        });
        partial.into_iter().sum()
    }

    fn gradient(&self, x: &TruncatedTensor) -> Option<TruncatedTensor> {
        let partial = self.exec.map_range(self.chunks(), |c| {
            let mut acc = TruncatedTensor::zeros(x.width(), x.depth());
            for i in self.chunk_range(c) {
                let sig = &self.sample.sigs[i];
                let lg = self.loss.gradient(&self.product(sig, x));
                let adj = match self.side {
                    Side::Right => TruncatedTensor::lmul_adjoint_unchecked(sig, &lg),
                    Side::Left => TruncatedTensor::rmul_adjoint_unchecked(sig, &lg),
                };
                acc.add_assign_scaled(&adj, self.sample.weights[i]);
            }
            acc
        });
        let mut total = TruncatedTensor::zeros(x.width(), x.depth());
        for p in &partial {
            total.add_assign_scaled(p, 1.0);
        }
        total.coeffs_mut()[0] = 0.0;
        Some(total)
    }
}

/// Summary row for result CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub quantity: String,
    pub side: Side,
    pub depth: usize,
    pub value: f64,
    pub n_samples: usize,
    pub seed: Option<u64>,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl ResultRow {
    pub const HEADER: &'static str = "quantity,side,depth,value,n_samples,seed,iterations,grad_norm";

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{:.16e},{},{},{},{:.6e}",
            self.quantity,
            self.side,
            self.depth,
            self.value,
            self.n_samples,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.iterations,
            self.grad_norm
        )
    }
}

/// A draw-able model with exact conditional sampling, for mutual information.
pub trait ConditionalSampler: Sync {
    type Condition: Send + Sync;

    fn sample_condition(&self, rng: &mut SimRng) -> Result<Self::Condition>;

    fn sample_given(&self, u: &Self::Condition, rng: &mut SimRng) -> Result<PiecewiseLinearPath>;
}

/// Mutual information estimate with its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct MiEstimate {
    pub mi: f64,
    /// Mean entropy of unconditional batches.
    pub entropy: f64,
    /// Mean entropy of conditional batches.
    pub conditional_entropy: f64,
    pub n_u: usize,
    pub n_x: usize,
    pub seed: u64,
    /// Largest iteration count over all Bayes acts.
    pub max_iterations: usize,
    /// Largest final gradient norm over all Bayes acts.
    pub max_grad_norm: f64,
    pub all_converged: bool,
}

/// Scoring rule with its loss, side, depth and optimizer settings.
#[derive(Debug, Clone)]
pub struct ScoringRule {
    pub depth: usize,
    pub side: Side,
    pub loss: SquaredNorm,
    pub descent: DescentConfig,
    pub exec: Exec,
}

impl ScoringRule {
    pub fn new(depth: usize, side: Side) -> Self {
        Self {
            depth,
            side,
            loss: SquaredNorm::uniform(),
            descent: DescentConfig::default(),
            exec: Exec::default(),
        }
    }

    pub fn with_descent(mut self, cfg: DescentConfig) -> Self {
        self.descent = cfg;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_loss(mut self, loss: SquaredNorm) -> Self {
        self.loss = loss;
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn sample(&self, mu: &EmpiricalMeasure) -> SignatureSample {
        mu.signatures(self.depth, self.exec)
    }

    pub fn side_loss(&self, x: &PiecewiseLinearPath, m: &TruncatedTensor) -> Result<f64> {
        side_loss_sig(&self.loss, self.side, &x.signature(self.depth), m)
    }

    pub fn bayes_act(&self, mu: &EmpiricalMeasure) -> Result<BayesAct> {
        self.bayes_act_of(&self.sample(mu))
    }

    /// Bayes act from precomputed signatures.
    pub fn bayes_act_of(&self, sample: &SignatureSample) -> Result<BayesAct> {
        let first = sample
            .sigs
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty signature sample".into()))?;
        if first.depth() != self.depth {
            return Err(Error::DimensionMismatch(format!(
                "signatures at depth {} for a rule at depth {}",
                first.depth(),
                self.depth
            )));
        }
        let objective = BayesObjective::new(sample, self.side, &self.loss, self.exec);
        let start = TruncatedTensor::unit(first.width(), self.depth);
        let out = affine_descent(&objective, &start, &self.descent)?;
        Ok(BayesAct {
            value: out.minimizer.inverse()?,
            side: self.side,
            iterations: out.iterations,
            grad_norm: out.grad_norm,
            objective: out.objective,
            status: out.status,
        })
    }

    /// `E_{X∼sample}` of the side loss at action `m`.
    pub fn expected_loss(&self, sample: &SignatureSample, m: &TruncatedTensor) -> Result<f64> {
        check_unital(m)?;
        let inv = m.inverse()?;
        let objective = BayesObjective::new(sample, self.side, &self.loss, self.exec);
        Ok(objective.value(&inv))
    }

    /// `s(x, μ)`: loss of `x` against μ's Bayes act.
    pub fn score(&self, x: &PiecewiseLinearPath, mu: &EmpiricalMeasure) -> Result<f64> {
        let act = self.bayes_act(mu)?;
        self.side_loss(x, &act.value)
    }

    /// `E_{X∼ν} s(X, μ)`.
    pub fn expected_score(&self, nu: &EmpiricalMeasure, mu: &EmpiricalMeasure) -> Result<f64> {
        let act = self.bayes_act(mu)?;
        self.expected_loss(&self.sample(nu), &act.value)
    }

    pub fn entropy(&self, mu: &EmpiricalMeasure) -> Result<f64> {
        Ok(self.entropy_report(mu)?.0)
    }

    /// Entropy together with the Bayes act that attains it.
    pub fn entropy_report(&self, mu: &EmpiricalMeasure) -> Result<(f64, BayesAct)> {
        let sample = self.sample(mu);
        let act = self.bayes_act_of(&sample)?;
        let h = self.expected_loss(&sample, &act.value)?;
        Ok((h, act))
    }

    /// `d(ν, μ) = E_ν[loss(a_μ, X) - loss(a_ν, X)]`. Not clamped at zero.
    pub fn divergence(&self, nu: &EmpiricalMeasure, mu: &EmpiricalMeasure) -> Result<f64> {
        Ok(self.divergence_report(nu, mu)?.0)
    }

    /// Divergence with both Bayes acts (`a_ν`, `a_μ`).
    pub fn divergence_report(
        &self,
        nu: &EmpiricalMeasure,
        mu: &EmpiricalMeasure,
    ) -> Result<(f64, BayesAct, BayesAct)> {
        let s_nu = self.sample(nu);
        let s_mu = self.sample(mu);
        let a_nu = self.bayes_act_of(&s_nu)?;
        let a_mu = self.bayes_act_of(&s_mu)?;
        let objective = BayesObjective::new(&s_nu, self.side, &self.loss, self.exec);
        let d = objective.value(&a_mu.value.inverse()?) - objective.value(&a_nu.value.inverse()?);
        Ok((d, a_nu, a_mu))
    }

    /// Mutual information `H(μ) - E_U H(μ|U)` by conditional resampling.
    ///
    /// For each of `n_u` conditions a batch of `n_x` conditional draws and a
    /// batch of `n_x` unconditional draws are taken; the estimate is the mean
    /// unconditional entropy minus the mean conditional entropy. Both batches
    /// have the same size, so finite-sample bias cancels under independence.
    /// Condition `k` draws from stream `k` of the seeded generator.
    pub fn mutual_information<S: ConditionalSampler>(
        &self,
        model: &S,
        n_u: usize,
        n_x: usize,
        seed: u64,
    ) -> Result<MiEstimate> {
        if n_u < 2 || n_x < 2 {
            return Err(Error::InvalidArgument(format!(
                "mutual information needs n_u >= 2 and n_x >= 2, got {n_u} and {n_x}"
            )));
        }
        let inner = self.clone().with_exec(Exec::Sequential);
        let per_condition = self.exec.try_map_range(n_u, |k| {
            let mut rng = stream_rng(seed, k as u64);
            let u = model.sample_condition(&mut rng)?;
            let cond = (0..n_x)
                .map(|_| model.sample_given(&u, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let uncond = (0..n_x)
                .map(|_| {
                    let u2 = model.sample_condition(&mut rng)?;
                    model.sample_given(&u2, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let (hc, ac) = inner.entropy_report(&EmpiricalMeasure::new(cond)?)?;
            let (hu, au) = inner.entropy_report(&EmpiricalMeasure::new(uncond)?)?;
            Ok::<_, Error>((hc, hu, ac, au))
        })?;
        let n = n_u as f64;
        let conditional_entropy = per_condition.iter().map(|r| r.0).sum::<f64>() / n;
        let entropy = per_condition.iter().map(|r| r.1).sum::<f64>() / n;
        let acts = per_condition.iter().flat_map(|r| [&r.2, &r.3]);
        let (mut max_iterations, mut max_grad_norm, mut all_converged) = (0, 0.0f64, true);
        for a in acts {
            max_iterations = max_iterations.max(a.iterations);
            max_grad_norm = max_grad_norm.max(a.grad_norm);
            all_converged &= a.converged();
        }
        Ok(MiEstimate {
            mi: entropy - conditional_entropy,
            entropy,
            conditional_entropy,
            n_u,
            n_x,
            seed,
            max_iterations,
            max_grad_norm,
            all_converged,
        })
    }
}
