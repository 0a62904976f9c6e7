//! Descent on the unital slice `H*` and geometric descent on the group of
//! group-like elements.
//!
//! [`affine_descent`] moves in the affine slice `{t_0 = 1}` along projected
//! gradients (optionally Polak–Ribière conjugate directions) with a secant
//! line search on the directional derivative. [`pansu_descent`] updates
//! `g ← g·exp(-η Df(g))`, where `Df` is the degree-1 Pansu gradient, and halves
//! `η` whenever a step would not decrease the objective. Both only ever accept
//! non-increasing steps, so recorded traces are monotone.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tensor::TruncatedTensor;

/// A real-valued functional on the (truncated) tensor algebra.
pub trait Functional: Sync {
    fn value(&self, t: &TruncatedTensor) -> f64;

    /// Euclidean gradient in `H` with respect to the ℓ² inner product, if known
    /// in closed form. `None` selects central finite differences.
    fn gradient(&self, _t: &TruncatedTensor) -> Option<TruncatedTensor> {
        None
    }
}

/// Adapts a closure (value only) into a [`Functional`].
pub struct FnFunctional<F>(pub F);

impl<F: Fn(&TruncatedTensor) -> f64 + Sync> Functional for FnFunctional<F> {
    fn value(&self, t: &TruncatedTensor) -> f64 {
        (self.0)(t)
    }
}

/// `t ↦ ‖t - target‖²` over all levels.
#[derive(Debug, Clone)]
pub struct DistanceSquared {
    pub target: TruncatedTensor,
}

impl Functional for DistanceSquared {
    fn value(&self, t: &TruncatedTensor) -> f64 {
        let mut d = t.clone();
        d.add_assign_scaled(&self.target, -1.0);
        d.dot(&d)
    }

    fn gradient(&self, t: &TruncatedTensor) -> Option<TruncatedTensor> {
        let mut d = t.clone();
        d.add_assign_scaled(&self.target, -1.0);
        Some(d.scale(2.0))
    }
}

/// Step size, budget and stopping tolerance shared by both optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig {
    /// Initial step `η`.
    pub step: f64,
    pub max_iters: usize,
    /// Stop once the ℓ² norm of the (projected) gradient falls below this.
    pub grad_tol: f64,
    pub record_trace: bool,
    /// Use Polak–Ribière conjugate directions in [`affine_descent`].
    pub conjugate: bool,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            step: 0.5,
            max_iters: 2000,
            grad_tol: 1e-10,
            record_trace: false,
            conjugate: true,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.step)));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
}

/// Renders a trace as CSV with header `iter,objective,grad_norm,step`.
pub fn trace_to_csv(trace: &[TraceRow]) -> String {
    let mut s = String::from("iter,objective,grad_norm,step\n");
    for r in trace {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e}",
            r.iter, r.objective, r.grad_norm, r.step
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentStatus {
    Converged,
    BudgetExhausted,
    /// No decreasing step could be found before the step size underflowed.
    StepUnderflow,
}

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub minimizer: TruncatedTensor,
    pub objective: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Number of step-halving events in the line search.
    pub halvings: usize,
    pub status: DescentStatus,
    pub trace: Vec<TraceRow>,
}

impl DescentOutcome {
    pub fn converged(&self) -> bool {
        self.status == DescentStatus::Converged
    }
}

const MIN_STEP: f64 = 1e-30;
const FD_STEP: f64 = 1e-5;

/// Gradient of `f`, falling back to central differences in every coefficient.
pub fn gradient_of<F: Functional + ?Sized>(f: &F, t: &TruncatedTensor) -> TruncatedTensor {
    f.gradient(t).unwrap_or_else(|| finite_difference_gradient(f, t))
}

/// Central finite-difference gradient with scale-relative steps.
pub fn finite_difference_gradient<F: Functional + ?Sized>(f: &F, t: &TruncatedTensor) -> TruncatedTensor {
    let mut g = TruncatedTensor::zeros(t.width(), t.depth());
    let mut probe = t.clone();
    for i in 0..t.coeffs().len() {
        let x = t.coeffs()[i];
        let h = FD_STEP * x.abs().max(1.0);
        probe.coeffs_mut()[i] = x + h;
        let fp = f.value(&probe);
        probe.coeffs_mut()[i] = x - h;
        let fm = f.value(&probe);
        probe.coeffs_mut()[i] = x;
        g.coeffs_mut()[i] = (fp - fm) / (2.0 * h);
    }
    g
}

fn project_slice(mut g: TruncatedTensor) -> TruncatedTensor {
    g.coeffs_mut()[0] = 0.0;
    g
}

fn rounding_slack(f: f64) -> f64 {
    8.0 * f64::EPSILON * f.abs().max(f64::MIN_POSITIVE)
}

/// Minimises `f` over the unital slice `H*` starting from `start`.
///
/// Gradients are projected onto levels `1..M` so every iterate keeps
/// `t_0 = 1`. A step is accepted only if it lowers the objective, or if it
/// leaves it unchanged up to rounding while reducing the gradient norm.
pub fn affine_descent<F: Functional + ?Sized>(
    f: &F,
    start: &TruncatedTensor,
    cfg: &DescentConfig,
) -> Result<DescentOutcome> {
    cfg.validate()?;
    if (start.scalar() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnital(start.scalar()));
    }
    let mut x = start.clone();
    x.coeffs_mut()[0] = 1.0;
    let mut fx = f.value(&x);
    let mut g = project_slice(gradient_of(f, &x));
    let mut gn = g.norm();
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(TraceRow {
            iter: 0,
            objective: fx,
            grad_norm: gn,
            step: 0.0,
        });
    }
    let ncoef = x.coeffs().len().saturating_sub(1).max(1);
    let mut dir = g.scale(-1.0);
    let mut trial = cfg.step;
    let mut halvings = 0;
    let mut iterations = 0;
    let mut since_restart = 0;
    let mut status = DescentStatus::BudgetExhausted;

    while iterations < cfg.max_iters {
        if !fx.is_finite() {
            return Err(Error::Numerical(format!("objective became {fx}")));
        }
        if gn <= cfg.grad_tol {
            status = DescentStatus::Converged;
            break;
        }
        let mut slope = g.dot(&dir);
        if !(slope < 0.0) {
            dir = g.scale(-1.0);
            slope = -gn * gn;
            since_restart = 0;
        }

        let mut a = trial;
        let accepted = loop {
            let mut x1 = x.clone();
            x1.add_assign_scaled(&dir, a);
            let g1 = project_slice(gradient_of(f, &x1));
            let s1 = g1.dot(&dir);
            let mut candidates = Vec::with_capacity(2);
            if s1 > slope {
                let a_sec = a * slope / (slope - s1);
                if a_sec.is_finite() && a_sec > 0.0 {
                    let mut x2 = x.clone();
                    x2.add_assign_scaled(&dir, a_sec);
                    let g2 = project_slice(gradient_of(f, &x2));
                    candidates.push((a_sec, x2, g2));
                }
            }
            candidates.push((a, x1, g1));
            let found = candidates.into_iter().find_map(|(a, xc, gc)| {
                let fc = f.value(&xc);
                let ok = fc < fx || (fc <= fx + rounding_slack(fx) && gc.norm() < gn);
                ok.then_some(((a, xc, fc), gc))
            });
            if found.is_some() {
                break found;
            }
            a *= 0.5;
            halvings += 1;
            if a < MIN_STEP * cfg.step {
                break None;
            }
        };
        let Some(((a, x_new, f_new), g_new)) = accepted else {
            status = DescentStatus::StepUnderflow;
            break;
        };
        iterations += 1;
        since_restart += 1;
        trial = a.abs().max(MIN_STEP);
        let gn_new = g_new.norm();
        if cfg.conjugate && since_restart < ncoef {
            let mut y = g_new.clone();
            y.add_assign_scaled(&g, -1.0);
            let beta = (g_new.dot(&y) / (gn * gn)).max(0.0);
            let mut d = g_new.scale(-1.0);
            d.add_assign_scaled(&dir, beta);
            dir = d;
        } else {
            dir = g_new.scale(-1.0);
            since_restart = 0;
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        gn = gn_new;
        if cfg.record_trace {
            trace.push(TraceRow {
                iter: iterations,
                objective: fx,
                grad_norm: gn,
                step: a,
            });
        }
    }
    if status == DescentStatus::BudgetExhausted && gn <= cfg.grad_tol {
        status = DescentStatus::Converged;
    }
    Ok(DescentOutcome {
        minimizer: x,
        objective: fx,
        grad_norm: gn,
        iterations,
        halvings,
        status,
        trace,
    })
}

/// Degree-1 Pansu gradient: component `i` is `d/dη f(g·exp(η e_i))` at `η = 0`.
///
/// Uses the closed-form chain rule `<∇f(g), g·e_i>` when `f` provides a
/// gradient, central finite differences otherwise.
pub fn pansu_gradient<F: Functional + ?Sized>(f: &F, g: &TruncatedTensor) -> Vec<f64> {
    match f.gradient(g) {
        Some(grad) => {
            let adj = TruncatedTensor::lmul_adjoint_unchecked(g, &grad);
            if g.depth() == 0 {
                vec![0.0; g.width()]
            } else {
                adj.level(1).to_vec()
            }
        }
        None => pansu_gradient_fd(f, g, FD_STEP),
    }
}

/// Finite-difference Pansu gradient with step `h` scaled by `max(1, ‖g‖)`.
pub fn pansu_gradient_fd<F: Functional + ?Sized>(f: &F, g: &TruncatedTensor, h: f64) -> Vec<f64> {
    let d = g.width();
    let h = h * g.norm().max(1.0);
    (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = h;
            let fp = f.value(&g.mul_unchecked(&TruncatedTensor::exp(&e, g.depth())));
            e[i] = -h;
            let fm = f.value(&g.mul_unchecked(&TruncatedTensor::exp(&e, g.depth())));
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Geometric descent `g ← g·exp(-η Df(g))` from a group-like start.
pub fn pansu_descent<F: Functional + ?Sized>(
    f: &F,
    start: &TruncatedTensor,
    cfg: &DescentConfig,
) -> Result<DescentOutcome> {
    cfg.validate()?;
    if !start.is_grouplike() {
        return Err(Error::InvalidArgument("start of pansu_descent must be group-like".into()));
    }
    let depth = start.depth();
    let mut g = start.clone();
    let mut fg = f.value(&g);
    let mut dg = pansu_gradient(f, &g);
    let mut gn = vnorm(&dg);
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(TraceRow {
            iter: 0,
            objective: fg,
            grad_norm: gn,
            step: 0.0,
        });
    }
    let mut eta = cfg.step;
    let mut halvings = 0;
    let mut iterations = 0;
    let mut status = DescentStatus::BudgetExhausted;
    while iterations < cfg.max_iters {
        if gn <= cfg.grad_tol {
            status = DescentStatus::Converged;
            break;
        }
        let accepted = loop {
            let v: Vec<f64> = dg.iter().map(|x| -eta * x).collect();
            let cand = g.mul_unchecked(&TruncatedTensor::exp(&v, depth));
            let fc = f.value(&cand);
            if fc < fg {
                let dc = pansu_gradient(f, &cand);
                break Some((cand, fc, dc));
            }
            if fc <= fg + rounding_slack(fg) {
                let dc = pansu_gradient(f, &cand);
                if vnorm(&dc) < gn {
                    break Some((cand, fc, dc));
                }
            }
            eta *= 0.5;
            halvings += 1;
            if eta < MIN_STEP * cfg.step {
                break None;
            }
        };
        let Some((cand, fc, dc)) = accepted else {
            status = DescentStatus::StepUnderflow;
            break;
        };
        iterations += 1;
        g = cand;
        fg = fc;
        gn = vnorm(&dc);
        dg = dc;
        if cfg.record_trace {
            trace.push(TraceRow {
                iter: iterations,
                objective: fg,
                grad_norm: gn,
                step: eta,
            });
        }
    }
    if status == DescentStatus::BudgetExhausted && gn <= cfg.grad_tol {
        status = DescentStatus::Converged;
    }
    Ok(DescentOutcome {
        minimizer: g,
        objective: fg,
        grad_norm: gn,
        iterations,
        halvings,
        status,
        trace,
    })
}

/// First-order Taylor remainders along a dilated exponential direction.
#[derive(Debug, Clone)]
pub struct TaylorReport {
    pub etas: Vec<f64>,
    /// `|f(g·exp(ηv)) - f(g) - η Df(g)·v|` for each `η`.
    pub remainders: Vec<f64>,
    /// Least-squares slope of `ln remainder` against `ln η`, over remainders
    /// above the rounding floor.
    pub slope: Option<f64>,
    /// Fewer than two remainders rose above the rounding floor.
    pub degenerate: bool,
}

/// Measures how fast the first-order remainder of `η ↦ f(g·exp(ηv))` vanishes.
pub fn taylor_check<F: Functional + ?Sized>(
    f: &F,
    g: &TruncatedTensor,
    v: &[f64],
    etas: &[f64],
) -> Result<TaylorReport> {
    if etas.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "taylor_check needs at least 3 step sizes, got {}",
            etas.len()
        )));
    }
    if v.len() != g.width() {
        return Err(Error::DimensionMismatch(format!(
            "direction of dimension {} for width {}",
            v.len(),
            g.width()
        )));
    }
    if etas.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("step sizes must be positive".into()));
    }
    let f0 = f.value(g);
    let df = pansu_gradient(f, g);
    let slope_v: f64 = df.iter().zip(v).map(|(a, b)| a * b).sum();
    let remainders: Vec<f64> = etas
        .iter()
        .map(|&eta| {
            let step: Vec<f64> = v.iter().map(|x| eta * x).collect();
            let fe = f.value(&g.mul_unchecked(&TruncatedTensor::exp(&step, g.depth())));
            (fe - f0 - eta * slope_v).abs()
        })
        .collect();
    let floor = 1e-13 * (1.0 + f0.abs());
    let pts: Vec<(f64, f64)> = etas
        .iter()
        .zip(&remainders)
        .filter(|(_, r)| **r > floor)
        .map(|(e, r)| (e.ln(), r.ln()))
        .collect();
    let degenerate = pts.len() < 2;
    let slope = (!degenerate).then(|| {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(TaylorReport {
        etas: etas.to_vec(),
        remainders,
        slope,
        degenerate,
    })
}

/// Gap `f(g·δ_λ(g⁻¹h)) - ((1-λ) f(g) + λ f(h))`; positive values violate
/// geometric convexity at this triple.
pub fn geometric_convexity_gap<F: Functional + ?Sized>(
    f: &F,
    g: &TruncatedTensor,
    h: &TruncatedTensor,
    lambda: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let step = g.inverse()?.mul(h)?.dilate(lambda);
    let lhs = f.value(&g.mul(&step)?);
    Ok(lhs - ((1.0 - lambda) * f.value(g) + lambda * f.value(h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(depth: usize) -> TruncatedTensor {
        TruncatedTensor::exp(&[0.8, -0.5], depth).mul(&TruncatedTensor::exp(&[0.1, 0.9], depth)).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = DescentConfig::default();
        assert!(c.validate().is_ok());
        c.step = 0.0;
        assert!(c.validate().is_err());
        c = DescentConfig { grad_tol: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn quadratic_bowl_converges() {
        let t = target(3);
        let f = DistanceSquared { target: t.clone() };
        let cfg = DescentConfig { record_trace: true, ..Default::default() };
        let out = affine_descent(&f, &TruncatedTensor::unit(2, 3), &cfg).unwrap();
        assert!(out.converged(), "{:?}", out.status);
        assert!(out.minimizer.sub(&t).unwrap().norm() < 1e-8);
        assert!(out.trace.windows(2).all(|w| w[1].objective <= w[0].objective));
    }

    #[test]
    fn plain_gradient_descent_also_converges() {
        let t = target(2);
        let f = DistanceSquared { target: t.clone() };
        let cfg = DescentConfig { conjugate: false, record_trace: true, ..Default::default() };
        let out = affine_descent(&f, &TruncatedTensor::unit(2, 2), &cfg).unwrap();
        assert!(out.converged());
        assert!(out.minimizer.sub(&t).unwrap().norm() < 1e-8);
        assert!(out.trace.windows(2).all(|w| w[1].objective <= w[0].objective));
    }

    #[test]
    fn affine_descent_requires_unital_start() {
        let f = DistanceSquared { target: target(2) };
        let start = TruncatedTensor::unit(2, 2).scale(2.0);
        assert!(matches!(
            affine_descent(&f, &start, &DescentConfig::default()),
            Err(Error::NotUnital(_))
        ));
    }

    #[test]
    fn finite_difference_fallback_matches_closed_form() {
        let t = target(3);
        let f = DistanceSquared { target: t.clone() };
        let x = TruncatedTensor::exp(&[0.3, 0.2], 3);
        let fd = finite_difference_gradient(&f, &x);
        let an = f.gradient(&x).unwrap();
        assert!(fd.sub(&an).unwrap().norm() <= 1e-7 * an.norm());
    }

    #[test]
    fn pansu_gradient_at_minimum_is_zero() {
        let f = FnFunctional(|t: &TruncatedTensor| {
            (1..=t.depth()).map(|m| t.level_norm(m).powi(2)).sum::<f64>()
        });
        let g = pansu_gradient(&f, &TruncatedTensor::unit(2, 2));
        assert!(g.iter().all(|x| x.abs() < 1e-12), "{g:?}");
    }

    #[test]
    fn pansu_gradient_matches_finite_differences() {
        let f = DistanceSquared { target: target(3) };
        let g = TruncatedTensor::exp(&[0.4, 0.3], 3).mul(&TruncatedTensor::exp(&[-0.2, 0.5], 3)).unwrap();
        let an = pansu_gradient(&f, &g);
        for h in [1e-3, 1e-4] {
            let fd = pansu_gradient_fd(&f, &g, h);
            for (a, b) in an.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "{a} vs {b} at h={h}");
            }
        }
    }

    #[test]
    fn pansu_gradient_is_linear_in_f() {
        let f1 = DistanceSquared { target: target(3) };
        let f2 = DistanceSquared { target: TruncatedTensor::exp(&[1.0, 1.0], 3) };
        let combo = FnFunctional(|t: &TruncatedTensor| 2.0 * f1.value(t) - 0.5 * f2.value(t));
        let g = TruncatedTensor::exp(&[0.1, -0.7], 3);
        let a = pansu_gradient(&f1, &g);
        let b = pansu_gradient(&f2, &g);
        let c = pansu_gradient(&combo, &g);
        for i in 0..2 {
            assert!((c[i] - (2.0 * a[i] - 0.5 * b[i])).abs() < 1e-6);
        }
    }

    #[test]
    fn pansu_descent_reaches_single_exponential() {
        let depth = 4;
        let t = TruncatedTensor::exp(&[0.9, -0.6], depth);
        let f = DistanceSquared { target: t };
        let cfg = DescentConfig { step: 0.1, record_trace: true, ..Default::default() };
        let out = pansu_descent(&f, &TruncatedTensor::unit(2, depth), &cfg).unwrap();
        assert!(out.objective <= 1e-6, "{}", out.objective);
        assert!(out.trace.windows(2).all(|w| w[1].objective <= w[0].objective));
        assert!(out.minimizer.is_grouplike());
    }

    #[test]
    fn pansu_descent_stops_immediately_at_minimum() {
        let f = FnFunctional(|t: &TruncatedTensor| {
            (1..=t.depth()).map(|m| t.level_norm(m).powi(2)).sum::<f64>()
        });
        let out = pansu_descent(&f, &TruncatedTensor::unit(2, 3), &DescentConfig::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.converged());
    }

    #[test]
    fn pansu_descent_rejects_non_grouplike_start() {
        let f = DistanceSquared { target: target(2) };
        let mut s = TruncatedTensor::unit(2, 2);
        s.level_mut(2)[1] = 3.0;
        assert!(pansu_descent(&f, &s, &DescentConfig::default()).is_err());
    }

    #[test]
    fn taylor_slope_for_quadratic() {
        let f = DistanceSquared { target: target(3) };
        let g = TruncatedTensor::exp(&[0.3, 0.6], 3);
        let r = taylor_check(&f, &g, &[0.6, 0.8], &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
        assert!(r.slope.unwrap() >= 1.9, "{:?}", r);
    }

    #[test]
    fn taylor_linear_functional_has_no_remainder() {
        // depends on levels 0 and 1 only, which are affine under right
        // multiplication by a degree-1 exponential
        struct Linear;
        impl Functional for Linear {
            fn value(&self, t: &TruncatedTensor) -> f64 {
                3.0 * t.scalar() + t.level(1)[0] - 2.0 * t.level(1)[1]
            }
            fn gradient(&self, t: &TruncatedTensor) -> Option<TruncatedTensor> {
                let mut g = TruncatedTensor::zeros(t.width(), t.depth());
                g.coeffs_mut()[..3].copy_from_slice(&[3.0, 1.0, -2.0]);
                Some(g)
            }
        }
        let f = Linear;
        let g = TruncatedTensor::exp(&[0.3, 0.6], 3);
        let r = taylor_check(&f, &g, &[0.6, 0.8], &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(r.remainders.iter().all(|x| *x < 1e-14), "{:?}", r.remainders);
        assert!(r.degenerate);
        assert!(taylor_check(&f, &g, &[0.6, 0.8], &[1e-1, 1e-2]).is_err());
    }

    #[test]
    fn convexity_gap_is_zero_at_endpoints() {
        let f = DistanceSquared { target: TruncatedTensor::unit(2, 3) };
        let g = TruncatedTensor::exp(&[0.3, 0.6], 3);
        let h = TruncatedTensor::exp(&[-0.5, 0.1], 3);
        assert!(geometric_convexity_gap(&f, &g, &h, 0.0).unwrap().abs() < 1e-12);
        assert!(geometric_convexity_gap(&f, &g, &h, 1.0).unwrap().abs() < 1e-12);
        assert!(geometric_convexity_gap(&f, &g, &h, 1.5).is_err());
    }

    #[test]
    fn trace_csv_header() {
        let csv = trace_to_csv(&[TraceRow { iter: 0, objective: 1.0, grad_norm: 2.0, step: 0.0 }]);
        assert!(csv.starts_with("iter,objective,grad_norm,step\n0,"));
    }
}
