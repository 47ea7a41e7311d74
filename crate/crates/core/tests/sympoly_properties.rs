use framediv::sympoly::{
    coeff_b, coeff_c, elementary_symmetric, inverse_pprime_scale, lambda_gradient_coefficients, power_sums_to_sigma,
    quad_g, quad_l, quad_l_double_sum, sigma_to_power_sums, sum_form_disagreement, sum_inverse_pprime,
    verify_partial_fraction_identity, weight_u, weight_v, GradientMode, MonicPolynomial, Spectrum,
};
use proptest::prelude::*;

/// Ascending values with every gap in `[0.05, 1.2]`, starting in `[-5, 0]`.
fn spaced(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    (-5.0..0.0f64, prop::collection::vec(0.05..1.2f64, n)).prop_map(|(start, gaps)| {
        let mut x = start;
        gaps.iter()
            .map(|g| {
                x += g;
                x
            })
            .collect()
    })
}

/// `n − 1` same-sign values kept at least 0.05 apart and away from zero,
/// followed by an exact zero.
fn same_sign_with_zero() -> impl Strategy<Value = Spectrum> {
    (prop::collection::vec(0.05..1.2f64, 3..=7), any::<bool>()).prop_map(|(gaps, negative)| {
        let mut x = 0.0;
        let values: Vec<f64> = gaps
            .iter()
            .map(|g| {
                x += g;
                if negative {
                    -x
                } else {
                    x
                }
            })
            .collect();
        Spectrum::with_trailing_zero(&values).unwrap()
    })
}

/// Root of `p` near `x0` by Newton's method on the coefficient form.
fn newton_root(p: &MonicPolynomial, x0: f64) -> f64 {
    let mut x = x0;
    for _ in 0..50 {
        let (v, d, _) = p.eval_suite(x);
        let step = v / d;
        x -= step;
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

fn perturbed(spec: &Spectrum, k: usize, eps: f64) -> MonicPolynomial {
    let mut sigma: Vec<f64> = (1..=spec.len()).map(|j| elementary_symmetric(spec).get(j)).collect();
    sigma[k - 1] += eps;
    MonicPolynomial::from_sigma(sigma).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn partial_fraction_identity_holds(values in spaced(2..=8)) {
        let s = Spectrum::new(values).unwrap();
        for i in 0..s.len() {
            let r = verify_partial_fraction_identity(&s, i).unwrap();
            prop_assert!(r < 1e-10, "i = {i}: {r:e}");
        }
    }

    #[test]
    fn inverse_derivatives_sum_to_zero(values in spaced(2..=8)) {
        let s = Spectrum::new(values).unwrap();
        let scaled = sum_inverse_pprime(&s).unwrap().abs() / inverse_pprime_scale(&s);
        prop_assert!(scaled < 1e-9, "{scaled:e}");
    }

    #[test]
    fn polynomial_vanishes_on_its_spectrum(values in spaced(2..=8)) {
        let s = Spectrum::new(values).unwrap();
        let p = MonicPolynomial::from_spectrum(&s);
        for &x in s.values() {
            let (v, d, _) = p.eval_suite(x);
            prop_assert!(v.abs() <= 1e-9 * (1.0 + d.abs()), "P({x}) = {v:e}");
        }
    }

    #[test]
    fn newton_identities_round_trip(values in spaced(2..=8)) {
        let s = Spectrum::new(values).unwrap();
        let n = s.len();
        let p: Vec<f64> = (1..=n).map(|k| s.values().iter().map(|x| x.powi(k as i32)).sum()).collect();
        let sigma = power_sums_to_sigma(&p);
        let e = elementary_symmetric(&s);
        for k in 1..=n {
            prop_assert!((sigma[k - 1] - e.get(k)).abs() <= 1e-9 * (1.0 + e.get(k).abs()));
        }
        let back = sigma_to_power_sums(&sigma);
        for k in 0..n {
            prop_assert!((back[k] - p[k]).abs() <= 1e-9 * (1.0 + p[k].abs()));
        }
    }

    #[test]
    fn quadratic_form_l_is_negative(values in spaced(3..=8)) {
        let s = Spectrum::new(values).unwrap();
        for r in 0..s.len() {
            let l = quad_l(&s, r).unwrap();
            prop_assert!(l < 0.0, "L({r}) = {l}");
            let double = quad_l_double_sum(&s, r).unwrap();
            prop_assert!((l - double).abs() <= 1e-9 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn quadratic_form_g_is_negative(s in same_sign_with_zero()) {
        for (k, g) in quad_g(&s, true).unwrap().into_iter().enumerate() {
            prop_assert!(g < 0.0, "G({k}) = {g}");
        }
    }

    #[test]
    fn closed_forms_match_column_sums(values in spaced(2..=8)) {
        let s = Spectrum::new(values).unwrap();
        let v = sum_form_disagreement(&coeff_c(&s).unwrap(), &weight_v(&s).unwrap());
        let u = sum_form_disagreement(&coeff_b(&s, false).unwrap(), &weight_u(&s, false).unwrap());
        prop_assert!(v.iter().chain(&u).all(|d| *d < 1e-9), "{v:?} {u:?}");
    }

    #[test]
    fn reduced_closed_forms_match(s in same_sign_with_zero()) {
        let u = sum_form_disagreement(&coeff_b(&s, true).unwrap(), &weight_u(&s, true).unwrap());
        prop_assert!(u.iter().all(|d| *d < 1e-9), "{u:?}");
    }

    // Root motion under a change of one symmetric function, against central
    // differences of Newton-refined roots of the perturbed polynomial. The
    // perturbation is sized so each root moves by about 1e-4 of the gap.
    #[test]
    fn root_sensitivities_match_perturbation(values in spaced(2..=6)) {
        let s = Spectrum::new(values).unwrap();
        let n = s.len();
        for (mode, k) in [(GradientMode::SigmaNVaries, n), (GradientMode::SigmaNm1Varies, n - 1)] {
            let mu = lambda_gradient_coefficients(&s, mode).unwrap();
            for (i, &x) in s.values().iter().enumerate() {
                let eps = 1e-4 * s.min_gap() / mu[i].abs().max(1.0);
                let plus = perturbed(&s, k, eps);
                let minus = perturbed(&s, k, -eps);
                let fd = (newton_root(&plus, x) - newton_root(&minus, x)) / (2.0 * eps);
                prop_assert!(
                    (fd - mu[i]).abs() <= 1e-5 * (1.0 + mu[i].abs()),
                    "{mode:?} i = {i}: {fd} vs {}", mu[i]
                );
            }
        }
    }
}

#[test]
fn small_spectrum_values() {
    let s = Spectrum::new(vec![1.0, 2.0, 3.0]).unwrap();
    // c_10 = 1/((2 − 1)·P'(2)) = −1 and c_20 = 1/((3 − 1)·P'(3)) = 1/4
    let hand = 2.0 * (-1.0) * 0.25;
    assert!((quad_l(&s, 0).unwrap() - hand).abs() < 1e-12);
    assert!((quad_l(&s, 0).unwrap() + 0.5).abs() < 1e-12);

    let z = Spectrum::with_trailing_zero(&[1.0, 2.0, 3.0]).unwrap();
    let g = quad_g(&z, true).unwrap();
    assert!((g[3] + 0.5).abs() < 1e-12, "{g:?}");
}
