//! Hypersurfaces of unit spheres: induced metric, shape operator, principal
//! and mean curvatures, the Gauss-equation scalar curvature and the
//! isoparametric test.

pub mod builtins;
mod immersion;
mod shape;

pub use immersion::{Immersion, ImmersionFn, Jet, JetFn, JET_STEP};
pub use shape::{
    binomial, gauss_scalar, isoparametric_check, second_fundamental_form, shape_sample,
    shape_tensor_field, unit_normal, IsoparametricReport, ShapeSample, CONSTANCY_FACTOR,
    RANK_TOLERANCE,
};

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;
    use std::sync::Arc;

    use nalgebra::DVector;

    use super::builtins::*;
    use super::*;
    use crate::error::Error;
    use crate::geometry::scalar_curvature;

    fn grid(imm: &Immersion, per_axis: usize) -> Vec<Vec<f64>> {
        imm.sample_grid(&vec![per_axis; imm.dim()]).unwrap()
    }

    #[test]
    fn analytic_jet_matches_differences() {
        let imm = clifford_torus(1, 2, 0.6).unwrap();
        let p = [0.4, 1.1, 2.0];
        let (a, b) = (imm.jet(&p), imm.jet_fd(&p));
        assert!((&a.d1 - &b.d1).amax() < 1e-10);
        for (x, y) in a.d2.iter().zip(&b.d2) {
            assert!((x - y).amax() < 1e-8, "{}", (x - y).amax());
        }
    }

    #[test]
    fn perturbed_jet_matches_differences() {
        let imm = perturbed_clifford_torus(FRAC_1_SQRT_2, BUMP_AMPLITUDE).unwrap();
        for p in [[1.3, 1.7], [0.2, 4.0]] {
            let (a, b) = (imm.jet(&p), imm.jet_fd(&p));
            assert!((&a.d1 - &b.d1).amax() < 1e-9);
            for (x, y) in a.d2.iter().zip(&b.d2) {
                assert!((x - y).amax() < 1e-7, "{}", (x - y).amax());
            }
        }
    }

    #[test]
    fn clifford_principal_curvatures_match() {
        for &(p, q, r) in CLIFFORD_FAMILY {
            let imm = clifford_torus(p, q, r).unwrap();
            let pts = grid(&imm, 4);
            assert!(imm.sphere_defect(&pts) < 1e-12);
            let (k1, k2) = clifford_principal_curvatures(r);
            let mut expected: Vec<f64> = std::iter::repeat(k1).take(p).chain(std::iter::repeat(k2).take(q)).collect();
            expected.sort_by(f64::total_cmp);
            let flipped: Vec<f64> = expected.iter().rev().map(|x| -x).collect();
            for pt in &pts {
                let s = shape_sample(&imm, pt).unwrap();
                let got = s.principal.values();
                let same = got.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-9);
                let opposite = got.iter().zip(&flipped).all(|(a, b)| (a - b).abs() < 1e-9);
                assert!(same || opposite, "{got:?} vs {expected:?}");
                assert!(s.self_adjointness_residual() < 1e-10);
                assert!(s.mean_curvature_residual() < 1e-10);
                assert!(s.normal.dot(&imm.f(pt)).abs() < 1e-12);
                assert!((s.normal.transpose() * imm.jet(pt).d1).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn minimal_clifford_tori() {
        for (p, q) in [(1, 1), (1, 2), (2, 2)] {
            let r = (p as f64 / (p + q) as f64).sqrt();
            let imm = clifford_torus(p, q, r).unwrap();
            let s = shape_sample(&imm, &vec![1.0; p + q]).unwrap();
            assert!(s.h[0].abs() < 1e-8, "{}", s.h[0]);
        }
    }

    #[test]
    fn two_dimensional_clifford_tori_are_flat() {
        for r in [FRAC_1_SQRT_2, 0.3, 0.9] {
            let imm = clifford_torus(1, 1, r).unwrap();
            let s = shape_sample(&imm, &[0.5, 2.5]).unwrap();
            assert!(gauss_scalar(&s).abs() < 1e-9);
        }
    }

    #[test]
    fn equatorial_sphere_is_totally_geodesic() {
        for n in [2, 3] {
            let imm = equatorial_sphere(n).unwrap();
            let s = shape_sample(&imm, &vec![1.0; n]).unwrap();
            assert!(s.shape.amax() < 1e-12);
            assert!(s.h.iter().all(|h| h.abs() < 1e-12));
            assert!((gauss_scalar(&s) - (n * (n - 1)) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn small_sphere_is_umbilic() {
        let theta: f64 = 0.8;
        let imm = small_sphere(2, theta).unwrap();
        let s = shape_sample(&imm, &[1.0, 0.3]).unwrap();
        for l in s.principal.values() {
            assert!((l.abs() - theta.cos() / theta.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn gauss_scalar_matches_intrinsic_curvature() {
        for imm in [
            clifford_torus(1, 2, 0.6).unwrap(),
            clifford_torus(2, 1, 0.8).unwrap(),
            small_sphere(3, 1.1).unwrap(),
            perturbed_clifford_torus(FRAC_1_SQRT_2, BUMP_AMPLITUDE).unwrap(),
        ] {
            let metric = imm.induced_metric();
            let p = vec![1.4; imm.dim()];
            let extrinsic = gauss_scalar(&shape_sample(&imm, &p).unwrap());
            let intrinsic = scalar_curvature(&metric, &p).unwrap().scalar;
            assert!((extrinsic - intrinsic).abs() < 1e-4, "{}: {extrinsic} vs {intrinsic}", imm.name);
        }
    }

    #[test]
    fn clifford_family_is_isoparametric() {
        for &(p, q, r) in CLIFFORD_FAMILY {
            let imm = clifford_torus(p, q, r).unwrap();
            let rep = isoparametric_check(&imm, &grid(&imm, 3), 1e-6).unwrap();
            assert!(rep.isoparametric(), "{:?}", rep.std);
            assert!(rep.codazzi.passed(), "{:?}", rep.codazzi.failures().next());
            assert!(rep.min_scalar >= -1e-6);
        }
    }

    #[test]
    fn perturbed_torus_is_not_isoparametric() {
        let imm = perturbed_clifford_torus(FRAC_1_SQRT_2, BUMP_AMPLITUDE).unwrap();
        let rep = isoparametric_check(&imm, &grid(&imm, 8), 1e-6).unwrap();
        assert!(!rep.isoparametric());
        assert!(rep.deviation() > 1e-3, "{}", rep.deviation());
        assert!(rep.codazzi.passed(), "{}", rep.codazzi.max_residual());
    }

    #[test]
    fn bad_parameters_and_rank_loss() {
        assert!(matches!(clifford_torus(1, 1, 1.0), Err(Error::BadParameters(_))));
        assert!(matches!(clifford_torus(0, 2, 0.5), Err(Error::BadParameters(_))));
        let flat = Immersion::new(
            "constant",
            crate::geometry::Domain::torus(2, 1.0),
            Arc::new(|_| DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])),
        );
        assert!(matches!(shape_sample(&flat, &[0.5, 0.5]), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 5), 1.0);
    }
}
