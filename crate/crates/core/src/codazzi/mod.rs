//! Symmetric (0,2)-tensor fields: covariant derivatives, the Codazzi
//! total-symmetry test, eigenframes, and the identities satisfied by the
//! eigenframe connection of a Codazzi field.

mod eigen;
mod field;
mod identities;
pub mod synthetic;

pub use eigen::{eigen_decomposition, eigen_point, eigenframe, EigenPoint, Eigenframe, EigenframeSample};
pub use field::{
    codazzi_residual, covariant_derivative, CovariantDerivativeSample, SymmetricTensorField,
    TensorFn, DERIVATIVE_SYMMETRY_LIMIT,
};
pub use identities::{
    diagonal_gamma_residual, eigen_derivative_residuals, gradient_check, sigma_constancy_deviation,
    triple_sum, verify_diagonal_connection, verify_eigen_derivatives, verify_gradient_formulas,
    GradientCheck, CODAZZI_TOLERANCE, SIGMA_CONSTANCY_FACTOR, TRIPLE_SUM_TOLERANCE,
};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::{DMatrix, DVector};

    use super::synthetic::*;
    use super::*;
    use crate::error::Error;
    use crate::geometry::builtins::{euclidean, round_s2, warped_torus3};
    use crate::geometry::frame_connection;
    use crate::sympoly::GradientMode;

    fn strip_points(field: &SymmetricTensorField) -> Vec<Vec<f64>> {
        let m = field.metric();
        let (lo, hi) = (m.domain.lo[0], m.domain.hi[0]);
        (0..5)
            .map(|k| {
                let mut p = vec![0.7; m.dim()];
                p[0] = lo + (hi - lo) * (0.1 + 0.2 * k as f64);
                p
            })
            .collect()
    }

    #[test]
    fn metric_and_scaled_metric_are_parallel() {
        for m in [round_s2(), warped_torus3()] {
            let p = if m.dim() == 2 { vec![0.9, 0.4] } else { vec![0.3, 1.0, 2.0] };
            let frame = frame_connection(&m, &p).unwrap();
            for c in [1.0, -2.5] {
                let field = SymmetricTensorField::scaled_metric(&m, c);
                let d = covariant_derivative(&field, &frame).unwrap();
                for i in 0..m.dim() {
                    for j in 0..m.dim() {
                        for k in 0..m.dim() {
                            assert!(d.get(i, j, k).abs() < 1e-7, "{}", d.get(i, j, k));
                        }
                    }
                }
            }
            assert!(codazzi_residual(&SymmetricTensorField::from_metric(&m), &frame).unwrap() < 1e-7);
        }
    }

    #[test]
    fn swapped_diagonal_is_not_codazzi_but_aligned_is() {
        let p = [0.3, -0.5, 0.2];
        let frame = frame_connection(&euclidean(3), &p).unwrap();
        let bad = swapped_diagonal_field(3).unwrap();
        assert!((codazzi_residual(&bad, &frame).unwrap() - 1.0).abs() < 1e-9);
        let good = aligned_diagonal_field(3).unwrap();
        assert!(codazzi_residual(&good, &frame).unwrap() < 1e-10);
    }

    #[test]
    fn constant_diagonal_field_eigenframe() {
        let field = SymmetricTensorField::new(
            "const",
            euclidean(3),
            Arc::new(|_| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]))),
        );
        let s = eigenframe(&field, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(s.lambdas.values(), &[1.0, 2.0, 3.0]);
        assert!((&s.eigenframe - DMatrix::<f64>::identity(3, 3)).amax() < 1e-14);
        assert!(s.lambda_grad.amax() < 1e-12);
        let pts = vec![vec![0.1, 0.2, 0.3]];
        for r in verify_eigen_derivatives(&field, &pts, 1e-12).unwrap() {
            assert!(r.passed(), "{}", r.identity);
        }
        for r in verify_diagonal_connection(&field, &pts, 1e-12, 1e-12).unwrap() {
            assert!(r.passed(), "{}", r.identity);
        }
    }

    #[test]
    fn explicit_two_dimensional_diagonal_field() {
        // λ = (f, g) with f = sin x1 − 2, g = x1² + x2; a = diag(g, f) so the
        // sort swaps the coordinate order
        let field = SymmetricTensorField::new(
            "fg",
            euclidean(2),
            Arc::new(|p| DMatrix::from_diagonal(&DVector::from_vec(vec![p[0] * p[0] + p[1], p[0].sin() - 2.0]))),
        );
        let p = [0.4, 0.3];
        let s = eigenframe(&field, &p).unwrap();
        let f = p[0].sin() - 2.0;
        let g = p[0] * p[0] + p[1];
        assert!((s.lambdas.values()[0] - f).abs() < 1e-14 && (s.lambdas.values()[1] - g).abs() < 1e-14);
        // e_0 = ∂_2, e_1 = ∂_1
        assert!((s.eigenframe[(1, 0)] - 1.0).abs() < 1e-14 && (s.eigenframe[(0, 1)] - 1.0).abs() < 1e-14);
        assert!((s.lambda_grad[(0, 1)] - p[0].cos()).abs() < 1e-8);
        assert!(s.lambda_grad[(0, 0)].abs() < 1e-8);
        assert!((s.lambda_grad[(1, 1)] - 2.0 * p[0]).abs() < 1e-8);
        assert!((s.lambda_grad[(1, 0)] - 1.0).abs() < 1e-8);
        for r in verify_eigen_derivatives(&field, &[p.to_vec()], 1e-8).unwrap() {
            assert!(r.passed(), "{} {}", r.identity, r.max_residual());
        }
    }

    #[test]
    fn eigen_decomposition_on_curved_metric() {
        let m = warped_torus3();
        let field = SymmetricTensorField::new(
            "mixed",
            m.clone(),
            Arc::new(|p| {
                DMatrix::from_row_slice(3, 3, &[
                    2.0 + p[0].sin(), 0.3, 0.1 * p[1].cos(),
                    0.3, 1.0, 0.2,
                    0.1 * p[1].cos(), 0.2, -1.0 + 0.5 * p[2].sin(),
                ])
            }),
        );
        let p = [0.7, 1.1, 2.3];
        let s = eigenframe(&field, &p).unwrap();
        assert!(s.eigen_residual(&field).unwrap() < 1e-9);
        assert!(s.diagonalization_residual(&field) < 1e-8);
        let ortho = s.eigenframe.transpose() * m.g(&p) * &s.eigenframe;
        assert!((ortho - DMatrix::<f64>::identity(3, 3)).amax() < 1e-10);
        for r in verify_eigen_derivatives(&field, &[p.to_vec()], 1e-6).unwrap() {
            assert!(r.passed(), "{} {}", r.identity, r.max_residual());
        }
    }

    #[test]
    fn repeated_eigenvalue_rejected() {
        let field = SymmetricTensorField::from_metric(&euclidean(2));
        assert!(matches!(
            eigenframe(&field, &[0.0, 0.0]),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((q - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn synthetic_fields_are_codazzi() {
        for fam in [SyntheticFamily::sigma_n_example(), SyntheticFamily::sigma_nm1_example()] {
            let field = fam.field();
            let pts = strip_points(&field);
            for r in verify_eigen_derivatives(&field, &pts, 1e-6).unwrap() {
                assert!(r.passed(), "{} {}", r.identity, r.max_residual());
            }
            for r in verify_diagonal_connection(&field, &pts, 1e-6, 1e-6).unwrap() {
                assert!(r.passed(), "{} {}", r.identity, r.max_residual());
            }
            for r in verify_gradient_formulas(&field, &pts, fam.mode(), 1e-6).unwrap() {
                assert!(r.passed(), "{} {}", r.identity, r.max_residual());
            }
        }
    }

    #[test]
    fn synthetic_field_gradients_are_not_trivial() {
        let field = SyntheticFamily::sigma_n_example().field();
        let p = strip_points(&field)[2].clone();
        let pt = eigen_point(&field, &p).unwrap();
        assert!(pt.eigen.lambda_grad.amax() > 0.1);
        assert!(pt.connection.psi().abs() > 1e-3);
    }

    #[test]
    fn wrong_mode_violates_hypothesis() {
        let field = SyntheticFamily::sigma_n_example().field();
        let pts = strip_points(&field);
        assert!(matches!(
            verify_gradient_formulas(&field, &pts, GradientMode::SigmaNm1Varies, 1e-6),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn violating_fields() {
        let bad = swapped_diagonal_field(3).unwrap();
        let pts = vec![vec![0.3, -0.5, 0.2]];
        assert!(matches!(
            verify_diagonal_connection(&bad, &pts, CODAZZI_TOLERANCE, 1e-6),
            Err(Error::NotCodazzi { .. })
        ));
        let twisted = twisted_frame_field();
        let p = [0.2, -0.3, 0.4];
        assert!(triple_sum(&twisted, &p).unwrap() > 0.01, "{}", triple_sum(&twisted, &p).unwrap());
        let frame = frame_connection(twisted.metric(), &p).unwrap();
        assert!(codazzi_residual(&twisted, &frame).unwrap() > 0.01);
    }
}
