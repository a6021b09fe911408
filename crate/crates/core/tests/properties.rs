use std::sync::Arc;

use proptest::prelude::*;

use bgls_core::criteria::{boundedness, Operator};
use bgls_core::domain::{defect_bounds, defect_constants, measure_scaling_factor};
use bgls_core::function::{lp_norm, lp_norm_with, scale_arg, LpOptions, Path};
use bgls_core::indices::{shimogaki_indices, shimogaki_m, LogGrid};
use bgls_core::psi::{eval_psi, multiply_psi, scale_psi};
use bgls_core::space::{bgls_norm, bgls_norm_with, fundamental_function_psi, NormOptions};
use bgls_core::*;

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

/// Random piecewise-power function on `R₊` with finite `L_p` norms for
/// `p` in `(2, 4)`: exponents near 0 lie in `(-1/4, 0]`, in the tail in
/// `(-1, -1/2)`.
fn piecewise() -> impl Strategy<Value = ProductFunction> {
    (
        0.1f64..3.0,
        -0.25f64..0.0,
        0.1f64..3.0,
        -0.6f64..0.6,
        0.1f64..3.0,
        -1.0f64..-0.5,
        0.05f64..0.9,
        1.1f64..20.0,
    )
        .prop_map(|(c0, e0, c1, e1, c2, e2, x0, x1)| {
            let pieces = vec![
                Piece::power(0.0, x0, c0, e0),
                Piece::power(x0, x1, c1, e1),
                Piece::power(x1, f64::INFINITY, c2, e2),
            ];
            ProductFunction::on_line(PiecewisePowerFactor::new(pieces).unwrap())
        })
}

fn canonical_space() -> GrandSpace {
    let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, 4.0)).unwrap();
    GrandSpace::from_representation(psi).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_identity(f in piecewise(), p in 2.05f64..3.95, k in 0usize..4) {
        let s = [0.25, 0.5, 2.0, 4.0][k];
        let g = scale_arg(&f, &[s]).unwrap();
        let lhs = lp_norm(&g, p, 1e-12).unwrap().value;
        let rhs = s.powf(1.0 / p) * lp_norm(&f, p, 1e-12).unwrap().value;
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn weighted_scaling_identity(p in 2.05f64..3.95, theta in 0.0f64..2.0, s in 0.1f64..10.0) {
        let w = WeightedDomain::single(1, theta).unwrap();
        let f = bgls_core::function::canonical_function(&w, 2.0, 4.0).unwrap();
        let lhs = lp_norm(&scale_arg(&f, &[s]).unwrap(), p, 1e-12).unwrap().value;
        let rhs = s.powf((1.0 + theta) / p) * lp_norm(&f, p, 1e-12).unwrap().value;
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn analytic_matches_quadrature(f in piecewise(), p in 2.05f64..3.95) {
        let a = lp_norm(&f, p, 1e-12).unwrap();
        let q = lp_norm_with(&f, p, LpOptions { path: Path::ForceQuadrature, tol: 1e-10, ..Default::default() }).unwrap();
        prop_assert!((a.value - q.value).abs() <= q.est_error.max(1e-7) * a.value);
    }

    #[test]
    fn lp_norm_is_log_convex(f in piecewise(), p0 in 2.05f64..3.5, h in 0.01f64..0.2) {
        let v = |p: f64| p * lp_norm(&f, p, 1e-12).unwrap().ln_value;
        let (l, m, r) = (v(p0), v(p0 + h), v(p0 + 2.0 * h));
        prop_assert!(l + r - 2.0 * m >= -1e-9 * (l.abs() + r.abs() + 1.0));
    }

    #[test]
    fn norm_homogeneity(f in piecewise(), c in 0.01f64..100.0) {
        let sp = canonical_space();
        let n1 = bgls_norm(&sp, &f, 1e-11).unwrap().value;
        let n2 = bgls_norm(&sp, &f.scaled(c), 1e-11).unwrap().value;
        let n3 = bgls_norm(&sp, &f.scaled(-c), 1e-11).unwrap().value;
        prop_assert!(rel(n2, c * n1) < 1e-12);
        prop_assert!(rel(n3, c * n1) < 1e-12);
    }

    #[test]
    fn measure_factor_group(t0 in 0.0f64..2.0, t1 in -0.5f64..2.0, s0 in 0.01f64..100.0, s1 in 0.01f64..100.0) {
        let d = WeightedDomain::new(vec![BlockSpec::power(1, t0, 1.0), BlockSpec::power(2, t1, 2.0)]).unwrap();
        let x = measure_scaling_factor(&d, &[s0, s1]).unwrap();
        let y = measure_scaling_factor(&d, &[1.0 / s0, 1.0 / s1]).unwrap();
        prop_assert!((x * y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_product_algebra(c0 in 0.5f64..3.0, g0 in 0.0f64..1.0, c1 in 0.5f64..3.0, g1 in 0.0f64..1.0, p in 2.01f64..3.99) {
        let i = iv(2.0, 4.0);
        let x = PsiFunction::power(i, c0, g0, g1).unwrap();
        let y = PsiFunction::power(i, c1, g1, g0).unwrap();
        let z = PsiFunction::canonical(&WeightedDomain::line(), i).unwrap();
        let xy = eval_psi(&multiply_psi(&x, &y).unwrap(), p).unwrap();
        let yx = eval_psi(&multiply_psi(&y, &x).unwrap(), p).unwrap();
        prop_assert!(rel(xy, yx) < 1e-14);
        let l = eval_psi(&multiply_psi(&multiply_psi(&x, &y).unwrap(), &z).unwrap(), p).unwrap();
        let r = eval_psi(&multiply_psi(&x, &multiply_psi(&y, &z).unwrap()).unwrap(), p).unwrap();
        prop_assert!(rel(l, r) < 1e-13);
    }

    #[test]
    fn verdicts_are_monotone(a in 1.0f64..5.0, w in 0.01f64..5.0, x in 0.01f64..0.99, y in 0.01f64..0.99) {
        let i = iv(a, a + w);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let p = |v| boundedness(Operator::PAlpha, &i, Some(v)).unwrap().bounded;
        let q = |v| boundedness(Operator::QBeta, &i, Some(v)).unwrap().bounded;
        prop_assert!(!p(lo) || p(hi));
        prop_assert!(!q(hi) || q(lo));
        prop_assert_eq!(p(lo), lo > 1.0 / a);
        prop_assert_eq!(q(lo), lo < 1.0 / (a + w));
    }

    #[test]
    fn fundamental_function_quasiconcave(k0 in -6.0f64..6.0, dk in 0.01f64..3.0) {
        let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, 4.0)).unwrap();
        let (d0, d1) = (10f64.powf(k0), 10f64.powf(k0 + dk));
        let (f0, f1) = (fundamental_function_psi(&psi, d0).unwrap().value, fundamental_function_psi(&psi, d1).unwrap().value);
        prop_assert!(f1 >= f0 * (1.0 - 1e-12));
        prop_assert!(f1 / d1 <= f0 / d0 * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn triangle_inequality(f in piecewise(), g in piecewise()) {
        let sp = canonical_space();
        let sum = f.try_add(&g).unwrap();
        let n = |h: &ProductFunction| bgls_norm(&sp, h, 1e-10).unwrap().value;
        prop_assert!(n(&sum) <= (n(&f) + n(&g)) * (1.0 + 1e-9));
    }

    #[test]
    fn m_is_submultiplicative(k0 in -3.0f64..3.0, k1 in -3.0f64..3.0) {
        let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, 4.0)).unwrap();
        let grid = LogGrid::default();
        let (t0, t1) = (10f64.powf(k0), 10f64.powf(k1));
        let m = |t: f64| shimogaki_m(&psi, t, &grid).unwrap().value;
        prop_assert!(m(t0 * t1) <= m(t0) * m(t1) * (1.0 + 1e-6));
    }

    #[test]
    fn nearly_homogeneous_weight_sandwich(s in 1.5f64..20.0, c in 0.2f64..5.0) {
        // W(x) = x(1+x)/(1+2x): order 1 with bounded defect
        let w = |x: f64| x * (1.0 + x) / (1.0 + 2.0 * x);
        let ln_w: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(move |x: f64| w(x).ln());
        let domain = WeightedDomain::new(vec![BlockSpec::custom(1, 1.0, ln_w)]).unwrap();
        let k = defect_constants(w, 1.0, 40).unwrap();
        let bounds = defect_bounds(&k, 2.0, 4.0);
        let i = iv(2.0, 4.0);
        let psi = PsiFunction::power(i, 1.0, 0.0, 0.5).unwrap();
        let nu = PsiFunction::constant(i, 1.0).unwrap();
        let zeta = multiply_psi(&psi, &nu).unwrap();
        let f = ProductFunction::new(vec![PiecewisePowerFactor::single(0.0, c, 1.0, -0.2).unwrap().into()], domain.clone()).unwrap();
        let g = scale_arg(&f, &[s]).unwrap();
        let opts = NormOptions { lp: LpOptions { tol: 1e-9, ..Default::default() }, ..Default::default() };
        let n_f = bgls_norm_with(&GrandSpace::new(domain.clone(), psi).unwrap(), &f, opts).unwrap().value;
        let n_g = bgls_norm_with(&GrandSpace::new(domain, zeta).unwrap(), &g, opts).unwrap().value;
        let phi = fundamental_function_psi(&nu, s * s).unwrap().value;
        prop_assert!(n_g <= bounds.upper_inf * phi * n_f * (1.0 + 1e-6));
    }
}

#[test]
fn shimogaki_invariant_under_constant_multiple() {
    let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(2.0, 4.0)).unwrap();
    let r0 = shimogaki_indices(&psi, 5).unwrap();
    for c in [0.1, 7.0] {
        let r = shimogaki_indices(&scale_psi(&psi, c).unwrap(), 5).unwrap();
        assert!((r.beta_minus - r0.beta_minus).abs() < 1e-9 && (r.beta_plus - r0.beta_plus).abs() < 1e-9);
    }
}

#[test]
fn representation_psi_is_log_convex() {
    for (a, b) in [(2.0, 4.0), (1.0, 3.0), (1.0, f64::INFINITY)] {
        let psi = PsiFunction::canonical(&WeightedDomain::line(), iv(a, b)).unwrap();
        let i = psi.interval();
        let v: Vec<f64> = (1..200).map(|k| i.p_of(k as f64 / 200.0)).map(|p| p * psi.ln_eval(p).unwrap()).collect();
        for w in v.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-9 * (w[0].abs() + w[2].abs() + 1.0));
        }
    }
}
