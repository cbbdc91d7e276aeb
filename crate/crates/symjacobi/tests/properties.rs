use std::f64::consts::PI;

use proptest::prelude::*;
use symjacobi::basis::{d_apply_spectral, eval_phi, phi_table, SymmetrizedCoeffs};
use symjacobi::estimates::{ap_constant, lemma_ladder, LemmaKind, WeightSpec};
use symjacobi::jacobi::{
    eval_trig_poly, eval_trig_poly_deriv, jacobi_operator_apply_pointwise, JacobiParams,
};
use symjacobi::kernels::{poisson_kernel_series, KernelPoint};
use symjacobi::operators::{
    multiplier_apply, norm_sq, riesz_apply, semigroup_apply, MultiplierSpec, ParityTarget, Profile,
};
use symjacobi::quadrature::{ball_measure, gauss_jacobi_rule, mu_plus_interval, mu_plus_rule};
use symjacobi::special::beta;

fn params() -> impl Strategy<Value = JacobiParams<f64>> {
    (-0.9f64..4.0, -0.9f64..4.0).prop_map(|(a, b)| JacobiParams::new(a, b).unwrap())
}

fn kernel_params() -> impl Strategy<Value = JacobiParams<f64>> {
    (-0.5f64..3.0, -0.5f64..3.0).prop_map(|(a, b)| JacobiParams::new(a, b).unwrap())
}

fn coeffs(p: JacobiParams<f64>, n_max: usize) -> impl Strategy<Value = SymmetrizedCoeffs<f64>> {
    prop::collection::vec(-1.0f64..1.0, n_max + 1).prop_map(move |c| SymmetrizedCoeffs::new(p, c))
}

fn params_and_coeffs() -> impl Strategy<Value = SymmetrizedCoeffs<f64>> {
    params().prop_flat_map(|p| coeffs(p, 20))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orthonormal_up_to_degree_32(p in params()) {
        let rule = mu_plus_rule(&p, 64).unwrap();
        let mut gram = vec![[0.0; 33]; 33];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v: Vec<f64> = (0..=32).map(|n| eval_trig_poly(&p, n, t)).collect();
            for n in 0..=32 {
                for m in 0..=32 {
                    gram[n][m] += w * v[n] * v[m];
                }
            }
        }
        for n in 0..=32 {
            for m in 0..=32 {
                let target = if n == m { 1.0 } else { 0.0 };
                prop_assert!((gram[n][m] - target).abs() < 1e-10, "n={n} m={m} {}", gram[n][m]);
            }
        }
    }

    #[test]
    fn derivative_rule_matches_central_difference(p in params(), n in 1usize..=16, t in 1e-3f64..(PI - 1e-3)) {
        let h = 1e-5;
        let t = t.clamp(1e-3 + h, PI - 1e-3 - h);
        let scale = (0..=200)
            .map(|j| eval_trig_poly_deriv(&p, n, 1e-3 + j as f64 * (PI - 2e-3) / 200.0).abs())
            .fold(0.0, f64::max);
        let fd = (eval_trig_poly(&p, n, t + h) - eval_trig_poly(&p, n, t - h)) / (2.0 * h);
        prop_assert!((eval_trig_poly_deriv(&p, n, t) - fd).abs() <= 1e-6 * scale);
    }

    #[test]
    fn growth_is_uniform_in_degree(p in params()) {
        let grid: Vec<f64> = (1..200).map(|j| j as f64 * PI / 200.0).collect();
        let ratio = |n: usize| {
            grid.iter().map(|&t| eval_trig_poly(&p, n, t).abs()).fold(0.0, f64::max)
                / (n as f64 + 1.0).powf(p.alpha + p.beta + 2.0)
        };
        let first = (0..=8).map(ratio).fold(0.0, f64::max);
        let all = (0..=64).map(ratio).fold(0.0, f64::max);
        prop_assert!(all <= 2.0 * first.max(1.0), "{all} vs {first}");
    }

    #[test]
    fn phi_parity(p in params(), t in -3.1f64..3.1) {
        let a = phi_table(&p, 16, t);
        let b = phi_table(&p, 16, -t);
        for n in 0..=16 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((b[n] - sign * a[n]).abs() < 1e-12 * a[n].abs().max(1.0));
        }
    }

    #[test]
    fn d_is_skew_adjoint(f in params_and_coeffs(), g in prop::collection::vec(-1.0f64..1.0, 21)) {
        let g = SymmetrizedCoeffs::new(f.params, g);
        let df = d_apply_spectral(&f, 1);
        let dg = d_apply_spectral(&g, 1);
        let dot = |a: &SymmetrizedCoeffs<f64>, b: &SymmetrizedCoeffs<f64>| -> f64 {
            a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y).sum()
        };
        let lhs = dot(&df, &g);
        let rhs = -dot(&f, &dg);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn quadrature_weights_positive_and_moments_exact(a in -0.9f64..3.0, b in -0.9f64..3.0, n in 2usize..40) {
        let rule = gauss_jacobi_rule(a, b, n).unwrap();
        prop_assert!(rule.weights.iter().all(|&w| w > 0.0));
        prop_assert!(rule.nodes.iter().all(|&x| x > -1.0 && x < 1.0));
        // ∫ (1−x)^a (1+x)^b ((1+x)/2)^k dx = 2^{a+b+1} B(a+1, b+k+1)
        for k in [0, n, 2 * n - 1] {
            let exact = 2f64.powf(a + b + 1.0) * beta(a + 1.0, b + k as f64 + 1.0);
            let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w * ((1.0 + x) / 2.0).powi(k as i32)).sum();
            prop_assert!((q - exact).abs() < 1e-12 * exact.max(1e-300) * (n as f64), "k={k} {q} {exact}");
        }
    }

    #[test]
    fn swapped_ball_lies_in_the_doubled_ball(p in params(), t in 0.01f64..3.1, s in 0.01f64..3.1) {
        prop_assume!((t - s).abs() > 1e-6);
        let r = (t - s).abs();
        let a = ball_measure(&p, t, s).unwrap();
        let b = ball_measure(&p, s, t).unwrap();
        // B(φ, r) ⊂ B(θ, 2r) and B(θ, r) ⊂ B(φ, 2r)
        prop_assert!(b <= mu_plus_interval(&p, t - 2.0 * r, t + 2.0 * r) * (1.0 + 1e-12));
        prop_assert!(a <= mu_plus_interval(&p, s - 2.0 * r, s + 2.0 * r) * (1.0 + 1e-12));
        prop_assert!((a - mu_plus_interval(&p, t - r, t + r)).abs() <= 1e-14 * a);
    }

    #[test]
    fn poisson_kernel_positive_and_symmetric(p in kernel_params(), t in 0.05f64..5.0, x in 0.05f64..3.1, y in 0.05f64..3.1) {
        let h = poisson_kernel_series(&p, &KernelPoint::new(t, x, y).unwrap()).unwrap();
        let hs = poisson_kernel_series(&p, &KernelPoint::new(t, y, x).unwrap()).unwrap();
        prop_assert!(h > 0.0);
        prop_assert!((h - hs).abs() <= 1e-12 * h);
    }

    #[test]
    fn semigroup_contracts(f in params_and_coeffs(), t in 0.0f64..5.0) {
        let g = semigroup_apply(&f, t).unwrap();
        prop_assert!(g.norm_sq() <= f.norm_sq() * (1.0 + 1e-15));
        if t == 0.0 {
            prop_assert_eq!(g.norm_sq(), f.norm_sq());
        }
    }

    #[test]
    fn riesz_restricted_bound(f in params_and_coeffs(), order in 1usize..=3) {
        for target in [ParityTarget::RestrictedEven, ParityTarget::RestrictedOdd] {
            let out = riesz_apply(&f, order, target).unwrap();
            let denom = norm_sq(&f, target);
            if denom > 0.0 {
                prop_assert!(2.0 * out.norm_sq() / denom <= 0.25 + 1e-12);
            }
        }
    }

    #[test]
    fn multiplier_commutes_with_semigroup(f in params_and_coeffs(), t in 0.0f64..3.0, s in 0.01f64..3.0) {
        let spec = MultiplierSpec::stieltjes(vec![(s, 0.7), (2.0 * s, 0.3)]).unwrap();
        for spec in [spec, MultiplierSpec::laplace(Profile::SignSin, 1.0).unwrap()] {
            let a = semigroup_apply(&multiplier_apply(&f, &spec, ParityTarget::FullSymmetrized).unwrap(), t).unwrap();
            let b = multiplier_apply(&semigroup_apply(&f, t).unwrap(), &spec, ParityTarget::FullSymmetrized).unwrap();
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                prop_assert!((x - y).abs() <= 1e-15 * x.abs().max(1.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ap_constant_grows_with_resolution(a in -0.5f64..2.0, b in -0.5f64..2.0, r in -1.0f64..3.0, s in -1.0f64..1.0) {
        let p = JacobiParams::new(a, b).unwrap();
        let w = WeightSpec::new(r, s, 2.0).unwrap();
        let mut prev = 0.0;
        for n in [2, 4, 6, 8] {
            let (c, _) = ap_constant(&w, &p, n).unwrap();
            prop_assert!(c >= prev * (1.0 - 1e-12) && c >= 1.0 - 1e-12);
            prev = c;
        }
    }
}

#[test]
fn eigen_relation_is_second_order() {
    for (a, b) in [(0.0, 0.0), (0.5, 2.0), (-0.5, 1.5)] {
        let p = JacobiParams::new(a, b).unwrap();
        for n in 0..=8 {
            let err = |h: f64| {
                let len = ((PI - 0.6) / h).round() as usize + 1;
                let v: Vec<f64> = (0..len)
                    .map(|j| eval_trig_poly(&p, n, 0.3 + j as f64 * h))
                    .collect();
                let out = jacobi_operator_apply_pointwise(&p, 0.3, h, &v).unwrap();
                out.iter()
                    .enumerate()
                    .map(|(j, &x)| (x - p.lambda(n) * v[j + 1]).abs())
                    .fold(0.0, f64::max)
            };
            let (e1, e2) = (err(0.01), err(0.005));
            if e2 > 1e-8 {
                assert!((e1 / e2).log2() > 1.9, "n={n} {e1} {e2}");
            }
        }
    }
}

#[test]
fn lemma_ladder_is_monotone() {
    let p = JacobiParams::new(0.5, 2.0).unwrap();
    for kind in [LemmaKind::Bridge1, LemmaKind::Trig, LemmaKind::Asympt] {
        let r = lemma_ladder(&p, kind, 3, 7).unwrap();
        let sups: Vec<f64> = r.levels.iter().map(|l| l.empirical_sup).collect();
        assert!(sups.windows(2).all(|w| w[1] >= w[0]), "{kind:?} {sups:?}");
    }
}

#[test]
fn phi_values_are_real_numbers_everywhere() {
    let p = JacobiParams::new(-0.5, -0.5).unwrap();
    for j in 0..=100 {
        let t = -PI + j as f64 * 2.0 * PI / 100.0;
        assert!((0..=8).all(|n| eval_phi(&p, n, t).is_finite()));
    }
}
