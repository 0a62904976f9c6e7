use proptest::prelude::*;

use trackscore::baselines::{dtw, soft_dtw};
use trackscore::io::{parse_series_csv, write_series_csv, Series};
use trackscore::path::signatures;
use trackscore::scoring::{loss_l, point_divergence, EmpiricalMeasure, ScoringRule, Side};
use trackscore::tensor::tensor_size;
use trackscore::{Exec, PiecewiseLinearPath, TruncatedTensor};

fn close(a: &TruncatedTensor, b: &TruncatedTensor, rel: f64) -> bool {
    let scale = 1.0 + a.norm().max(b.norm());
    a.sub(b).unwrap().norm() <= rel * scale
}

fn tensor(d: usize, m: usize) -> impl Strategy<Value = TruncatedTensor> {
    prop::collection::vec(-1.0f64..1.0, tensor_size(d, m))
        .prop_map(move |c| TruncatedTensor::from_coeffs(d, m, c).unwrap())
}

/// Unital tensor, so it is invertible.
fn unital(d: usize, m: usize) -> impl Strategy<Value = TruncatedTensor> {
    tensor(d, m).prop_map(|mut t| {
        t.coeffs_mut()[0] = 1.0;
        t
    })
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 0usize..=4)
}

fn path(dim: usize, max_segments: usize) -> impl Strategy<Value = PiecewiseLinearPath> {
    (1..=max_segments + 1).prop_flat_map(move |n| {
        prop::collection::vec(-1.0f64..1.0, n * dim).prop_map(move |p| PiecewiseLinearPath::new(dim, p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative((a, b, c) in shape().prop_flat_map(|(d, m)| (tensor(d, m), tensor(d, m), tensor(d, m)))) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-12));
        let one = TruncatedTensor::unit(a.width(), a.depth());
        prop_assert_eq!(one.mul(&a).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn inverse_is_two_sided(t in unital(2, 4)) {
        let inv = t.inverse().unwrap();
        let one = TruncatedTensor::unit(2, 4);
        prop_assert!(close(&t.mul(&inv).unwrap(), &one, 1e-10));
        prop_assert!(close(&inv.mul(&t).unwrap(), &one, 1e-10));
    }

    #[test]
    fn antipode_is_an_antihomomorphic_involution(a in tensor(3, 3), b in tensor(3, 3)) {
        prop_assert_eq!(a.antipode().antipode(), a.clone());
        let lhs = a.mul(&b).unwrap().antipode();
        let rhs = b.antipode().mul(&a.antipode()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
        prop_assert!((loss_l(&a) - loss_l(&a.antipode())).abs() <= 1e-12 * (1.0 + loss_l(&a)));
    }

    #[test]
    fn dilation_is_multiplicative(a in tensor(2, 4), b in tensor(2, 4), lambda in -2.0f64..2.0) {
        let lhs = a.mul(&b).unwrap().dilate(lambda);
        let rhs = a.dilate(lambda).mul(&b.dilate(lambda)).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn adjoints_are_adjoint(g in tensor(2, 3), s in tensor(2, 3), w in tensor(2, 3)) {
        let l = g.mul(&s).unwrap().inner(&w).unwrap();
        let r = s.inner(&TruncatedTensor::lmul_adjoint(&g, &w).unwrap()).unwrap();
        prop_assert!((l - r).abs() <= 1e-12 * (1.0 + l.abs()));
        let l = s.mul(&g).unwrap().inner(&w).unwrap();
        let r = s.inner(&TruncatedTensor::rmul_adjoint(&g, &w).unwrap()).unwrap();
        prop_assert!((l - r).abs() <= 1e-12 * (1.0 + l.abs()));
    }

    #[test]
    fn text_roundtrip(t in tensor(2, 3)) {
        prop_assert_eq!(TruncatedTensor::from_text(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn chen_identity(x in path(2, 8), y in path(2, 8)) {
        let lhs = x.concat(&y).unwrap().signature(4);
        let rhs = x.signature(4).mul(&y.signature(4)).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn signature_is_grouplike(x in path(3, 10)) {
        prop_assert!(x.signature(4).is_grouplike());
    }

    #[test]
    fn reversal_is_antipode_and_inverse(x in path(2, 10)) {
        let s = x.signature(4);
        let r = x.reverse().signature(4);
        prop_assert!(close(&r, &s.antipode(), 1e-10));
        prop_assert!(close(&r, &s.inverse().unwrap(), 1e-10));
    }

    #[test]
    fn translation_and_refinement_invariance(x in path(2, 10), shift in prop::array::uniform2(-5.0f64..5.0), seg in 0usize..10) {
        let s = x.signature(4);
        prop_assert!(close(&x.translate(&shift).unwrap().signature(4), &s, 1e-10));
        if x.num_segments() > 0 {
            let refined = x.insert_midpoint(seg % x.num_segments()).unwrap();
            prop_assert!(close(&refined.signature(4), &s, 1e-10));
        }
    }

    #[test]
    fn scaling_dilates(x in path(2, 10), lambda in -3.0f64..3.0) {
        prop_assert!(close(&x.scale(lambda).signature(4), &x.signature(4).dilate(lambda), 1e-10));
    }

    #[test]
    fn factorial_decay(x in path(2, 10)) {
        let s = x.signature(5);
        let v = x.length();
        let mut fact = 1.0;
        for m in 1..=5 {
            fact *= m as f64;
            prop_assert!(s.level_norm(m) <= v.powi(m as i32) / fact * (1.0 + 1e-10) + 1e-15);
        }
    }

    #[test]
    fn batch_signatures_do_not_depend_on_exec(xs in prop::collection::vec(path(2, 6), 1..12)) {
        prop_assert_eq!(signatures(&xs, 3, Exec::Sequential), signatures(&xs, 3, Exec::Parallel));
    }

    #[test]
    fn point_divergence_properties(x in path(2, 6), y in path(2, 6)) {
        let d = point_divergence(&x, &y, 3).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(point_divergence(&x, &x, 3).unwrap() <= 1e-20);
        // α(Φ(x)Φ(y)⁻¹) = Φ(y)Φ(x)⁻¹ and L∘α = L
        let swapped = point_divergence(&y, &x, 3).unwrap();
        prop_assert!((d - swapped).abs() <= 1e-10 * (1.0 + d));
    }

    #[test]
    fn dtw_properties(x in path(2, 8), y in path(2, 8), gamma in 0.01f64..5.0) {
        let d = dtw(&x, &y).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!((d - dtw(&y, &x).unwrap()).abs() <= 1e-12 * (1.0 + d));
        prop_assert_eq!(dtw(&x, &x).unwrap(), 0.0);
        prop_assert!(soft_dtw(&x, &y, gamma).unwrap() <= d + 1e-12);
    }

    #[test]
    fn csv_roundtrip(xs in prop::collection::vec(path(2, 5), 1..4)) {
        let series: Vec<Series> = xs
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let times = (0..p.len()).map(|k| k as f64 * 0.25).collect();
                Series::new(format!("s{i}"), p.with_times(times).unwrap())
            })
            .collect();
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &series).unwrap();
        prop_assert_eq!(parse_series_csv(buf.as_slice(), "mem").unwrap(), series);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn divergence_is_nonnegative(xs in prop::collection::vec(path(2, 4), 2..5), ys in prop::collection::vec(path(2, 4), 2..5)) {
        let nu = EmpiricalMeasure::new(xs).unwrap();
        let mu = EmpiricalMeasure::new(ys).unwrap();
        for side in [Side::Left, Side::Right] {
            let rule = ScoringRule::new(3, side);
            prop_assert!(rule.divergence(&nu, &mu).unwrap() >= -1e-8);
            prop_assert!(rule.divergence(&nu, &nu).unwrap().abs() <= 1e-8);
        }
    }

    #[test]
    fn expected_score_is_affine(xs in prop::collection::vec(path(2, 4), 1..4), ys in prop::collection::vec(path(2, 4), 1..4), lambda in 0.0f64..1.0) {
        let a = EmpiricalMeasure::new(xs).unwrap();
        let b = EmpiricalMeasure::new(ys).unwrap();
        let mu = EmpiricalMeasure::mixture(&a, &b, 0.5).unwrap();
        let rule = ScoringRule::new(3, Side::Right);
        let mix = EmpiricalMeasure::mixture(&a, &b, lambda).unwrap();
        let lhs = rule.expected_score(&mix, &mu).unwrap();
        let rhs = lambda * rule.expected_score(&a, &mu).unwrap() + (1.0 - lambda) * rule.expected_score(&b, &mu).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn entropy_is_concave(xs in prop::collection::vec(path(2, 4), 1..4), ys in prop::collection::vec(path(2, 4), 1..4)) {
        let a = EmpiricalMeasure::new(xs).unwrap();
        let b = EmpiricalMeasure::new(ys).unwrap();
        let rule = ScoringRule::new(3, Side::Left);
        let (ha, hb) = (rule.entropy(&a).unwrap(), rule.entropy(&b).unwrap());
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let h = rule.entropy(&EmpiricalMeasure::mixture(&a, &b, lambda).unwrap()).unwrap();
            prop_assert!(h >= lambda * ha + (1.0 - lambda) * hb - 1e-8);
        }
    }
}
