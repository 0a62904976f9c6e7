//! Cross-checks against independent reference computations.

mod common;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use trackscore::baselines::{dtw, soft_dtw};
use trackscore::optimize::{pansu_gradient, pansu_gradient_fd, DistanceSquared};
use trackscore::scoring::{EmpiricalMeasure, ScoringRule, Side};
use trackscore::tensor::tensor_size;
use trackscore::TruncatedTensor;

use common::{level_offset, quadrature_signature, random_path, random_tensor, rng};

#[test]
fn signature_matches_quadrature() {
    let mut r = rng(1);
    for _ in 0..5 {
        let x = random_path(&mut r, 2, 3);
        let sig = x.signature(3);
        let q = quadrature_signature(&x, 3, 2000);
        for (a, b) in sig.coeffs().iter().zip(&q) {
            assert!((a - b).abs() <= 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

/// Matrix of `z ↦ g·z` (left) or `z ↦ z·g` (right) in coefficient coordinates.
fn product_matrix(g: &TruncatedTensor, left: bool) -> DMatrix<f64> {
    let (d, depth) = (g.width(), g.depth());
    let n = tensor_size(d, depth);
    let mut a = DMatrix::zeros(n, n);
    for lg in 0..=depth {
        for lz in 0..=depth - lg {
            for i in 0..d.pow(lg as u32) {
                for j in 0..d.pow(lz as u32) {
                    let col = level_offset(d, lz) + j;
                    let word = if left { i * d.pow(lz as u32) + j } else { j * d.pow(lg as u32) + i };
                    let row = level_offset(d, lg + lz) + word;
                    a[(row, col)] += g.level(lg)[i];
                }
            }
        }
    }
    a
}

#[test]
fn adjoints_are_matrix_transposes() {
    let mut r = rng(2);
    for (d, m) in [(2, 3), (3, 2), (1, 4)] {
        let g = random_tensor(&mut r, d, m, 1.0);
        let w = random_tensor(&mut r, d, m, 1.0);
        let wv = DVector::from_column_slice(w.coeffs());
        let l = product_matrix(&g, true).transpose() * &wv;
        let rr = product_matrix(&g, false).transpose() * &wv;
        let la = TruncatedTensor::lmul_adjoint(&g, &w).unwrap();
        let ra = TruncatedTensor::rmul_adjoint(&g, &w).unwrap();
        for k in 0..l.len() {
            assert!((la.coeffs()[k] - l[k]).abs() < 1e-12);
            assert!((ra.coeffs()[k] - rr[k]).abs() < 1e-12);
        }
        let prod = product_matrix(&g, true) * DVector::from_column_slice(w.coeffs());
        let direct = g.mul(&w).unwrap();
        for k in 0..prod.len() {
            assert!((direct.coeffs()[k] - prod[k]).abs() < 1e-12);
        }
    }
}

/// Minimiser of `Σ_i w_i L(Φ_i x)` (right) or `Σ_i w_i L(x Φ_i)` (left)
/// over unital `x`, by linear least squares.
fn least_squares_act(sigs: &[TruncatedTensor], weights: &[f64], side: Side) -> DVector<f64> {
    let n = sigs[0].coeffs().len();
    let k = n - 1;
    let mut a = DMatrix::zeros(sigs.len() * k, k);
    let mut b = DVector::zeros(sigs.len() * k);
    for (s, (sig, w)) in sigs.iter().zip(weights).enumerate() {
        let p = product_matrix(sig, side == Side::Right);
        let sw = w.sqrt();
        for row in 0..k {
            b[s * k + row] = -sw * p[(row + 1, 0)];
            for col in 0..k {
                a[(s * k + row, col)] = sw * p[(row + 1, col + 1)];
            }
        }
    }
    let z = a.svd(true, true).solve(&b, 1e-14).unwrap();
    let mut x = DVector::zeros(n);
    x[0] = 1.0;
    x.rows_mut(1, k).copy_from(&z);
    x
}

#[test]
fn bayes_act_matches_least_squares() {
    let mut r = rng(3);
    for side in [Side::Right, Side::Left] {
        for trial in 0..4 {
            let paths: Vec<_> = (0..3 + trial).map(|_| random_path(&mut r, 2, 4)).collect();
            let mu = EmpiricalMeasure::new(paths).unwrap();
            let rule = ScoringRule::new(3, side);
            let sample = rule.sample(&mu);
            let act = rule.bayes_act(&mu).unwrap();
            assert!(act.converged());
            let x = least_squares_act(&sample.sigs, &sample.weights, side);
            let xa = act.value.inverse().unwrap();
            let err = xa.coeffs().iter().zip(x.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(err <= 1e-8 * (1.0 + x.norm()), "{side} trial {trial}: {err}");
        }
    }
}

fn alignments(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(i: usize, j: usize, n: usize, m: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        cur.push((i, j));
        if i == n - 1 && j == m - 1 {
            out.push(cur.clone());
        } else {
            if i + 1 < n {
                go(i + 1, j, n, m, cur, out);
            }
            if j + 1 < m {
                go(i, j + 1, n, m, cur, out);
            }
            if i + 1 < n && j + 1 < m {
                go(i + 1, j + 1, n, m, cur, out);
            }
        }
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, 0, n, m, &mut Vec::new(), &mut out);
    out
}

#[test]
fn dtw_matches_enumeration() {
    let mut r = rng(4);
    for (n, m) in [(1, 1), (2, 3), (4, 4), (5, 3), (3, 6)] {
        let x = random_path(&mut r, 2, n - 1);
        let y = random_path(&mut r, 2, m - 1);
        let costs: Vec<f64> = alignments(n, m)
            .iter()
            .map(|al| {
                al.iter()
                    .map(|&(i, j)| x.point(i).iter().zip(y.point(j)).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                    .sum()
            })
            .collect();
        let best = costs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((dtw(&x, &y).unwrap() - best).abs() < 1e-12);
        for gamma in [0.05, 0.5, 2.0] {
            let z: f64 = costs.iter().map(|c| (-(c - best) / gamma).exp()).sum();
            let soft = best - gamma * z.ln();
            assert!((soft_dtw(&x, &y, gamma).unwrap() - soft).abs() < 1e-10, "{n}x{m} gamma {gamma}");
        }
    }
}

#[test]
fn pansu_gradient_matches_finite_differences() {
    let mut r = rng(5);
    for _ in 0..10 {
        let v: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();
        let g = random_path(&mut r, 2, 3).signature(3);
        let f = DistanceSquared { target: TruncatedTensor::exp(&v, 3) };
        let exact = pansu_gradient(&f, &g);
        for h in [1e-3, 1e-4] {
            let fd = pansu_gradient_fd(&f, &g, h);
            let num = exact.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den = exact.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(num <= 1e-5 * den, "h {h}: {num} vs {den}");
        }
    }
}
