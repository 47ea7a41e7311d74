//! Chart-based Riemannian geometry: Christoffel symbols, orthonormal frames
//! and their connection coefficients, curvature, the field
//! `X = Σ ∇_{e_i} e_i`, `Ψ`, and the divergence identity.

pub mod builtins;
mod connection;
mod curvature;
mod divergence;
mod metric;

pub use connection::{
    christoffel, christoffel_derivatives, connection_of, frame_connection, inverse_metric,
    orthonormal_frame, Christoffel, FrameField, FramePointData, GramSchmidt, ANTISYMMETRY_LIMIT,
};
pub use curvature::{curvature_in_frame, riemann_coordinate, scalar_curvature, CurvatureSample};
pub use divergence::{
    div_x, field_x, identity_sample, integrate_closed, integrate_closed_all, psi,
    verify_div_identity, volume_density, ClosedIntegrals, FieldX, IdentitySample, Integrand,
};
pub use metric::{
    ChartedMetric, DerivativeMode, Domain, StencilOrder, FrameRotationFn, MetricDerivFn, MetricFn, DEFAULT_STEP,
};

#[cfg(test)]
mod tests {
    use super::builtins::*;
    use super::*;
    use crate::error::Error;
    use std::sync::Arc;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn euclidean_is_trivial() {
        let m = euclidean(3);
        let p = [0.1, -0.2, 0.3];
        let chr = christoffel(&m, &p).unwrap();
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(chr.get(c, a, b), 0.0);
                }
            }
        }
        let f = frame_connection(&m, &p).unwrap();
        assert_eq!(f.frame, nalgebra::DMatrix::identity(3, 3));
        assert!(f.gamma_data().iter().all(|&g| g == 0.0));
        assert_eq!(div_x(&m, &p).unwrap(), 0.0);
        assert_eq!(psi(&m, &p).unwrap(), 0.0);
        let report = verify_div_identity(&m, &[p.to_vec()], 0.0);
        assert!(report.passed());
    }

    #[test]
    fn sphere_christoffel_and_frame() {
        let m = round_s2();
        let th: f64 = 0.9;
        let p = [th, 1.3];
        let chr = christoffel(&m, &p).unwrap();
        assert!(close(chr.get(0, 1, 1), -th.sin() * th.cos(), 1e-14));
        assert!(close(chr.get(1, 0, 1), th.cos() / th.sin(), 1e-14));
        let e = orthonormal_frame(&m, &p).unwrap();
        assert!(close(e[(0, 0)], 1.0, 1e-15) && close(e[(1, 1)], 1.0 / th.sin(), 1e-14));
        assert_eq!(e[(0, 1)], 0.0);
        assert_eq!(e[(1, 0)], 0.0);
    }

    #[test]
    fn sphere_connection_x_and_divergence() {
        let m = round_s2();
        let th: f64 = 0.7;
        let p = [th, 2.0];
        let cot = th.cos() / th.sin();
        let f = frame_connection(&m, &p).unwrap();
        assert!(close(f.gamma(1, 1, 0), -cot, 1e-8));
        assert!(close(f.gamma(1, 1, 1), 0.0, 1e-12));
        let x = field_x(&m, &p).unwrap();
        assert!(close(x.frame[0], -cot, 1e-8) && close(x.frame[1], 0.0, 1e-8));
        assert!(close(div_x(&m, &p).unwrap(), 1.0, 1e-7));
        let s = scalar_curvature(&m, &p).unwrap();
        assert!(close(s.scalar, 2.0, 1e-7));
        assert_eq!(f.psi(), 0.0);
    }

    #[test]
    fn flat_torus_vanishes() {
        let m = flat_torus(3);
        let p = [1.0, 2.0, 3.0];
        assert_eq!(div_x(&m, &p).unwrap(), 0.0);
        assert_eq!(scalar_curvature(&m, &p).unwrap().scalar, 0.0);
        assert!(field_x(&m, &p).unwrap().coords.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn three_sphere_scalar_curvature() {
        let m = round_s3();
        let s = scalar_curvature(&m, &[1.1, 0.8, 0.4]).unwrap();
        assert!(close(s.scalar, 6.0, 1e-6), "{}", s.scalar);
        assert!(s.symmetry_residual() < 1e-8, "{}", s.symmetry_residual());
    }

    #[test]
    fn fourth_order_stencil_tightens_curvature() {
        let p = [1.1, 0.8, 0.4];
        let second = scalar_curvature(&round_s3().with_stencil(StencilOrder::Second), &p).unwrap();
        let fourth = scalar_curvature(&round_s3(), &p).unwrap();
        assert!((fourth.scalar - 6.0).abs() < (second.scalar - 6.0).abs());
    }

    #[test]
    fn warped_torus_psi_closed_form() {
        let m = warped_torus3();
        for x in [0.3, 1.7, 4.0] {
            let (f, df) = warp_f(x);
            let (h, dh) = warp_h(x);
            let got = psi(&m, &[x, 0.5, 0.5]).unwrap();
            assert!(close(got, (df / f) * (dh / h), 1e-8), "{got}");
        }
    }

    #[test]
    fn analytic_and_fd_christoffels_agree() {
        for idx in 0..3 {
            let fd = perturbed_flat_torus3(5, idx);
            let an = fd.clone().with_mode(DerivativeMode::Analytic).unwrap();
            let p = [0.4, 1.9, 5.1];
            let (a, b) = (christoffel(&fd, &p).unwrap(), christoffel(&an, &p).unwrap());
            for c in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        assert!(close(a.get(c, i, j), b.get(c, i, j), 1e-6));
                    }
                }
            }
        }
    }

    #[test]
    fn perturbed_torus_identity_and_index_claim() {
        let m = perturbed_flat_torus3(1, 0);
        for p in [[0.3, 2.2, 4.1], [5.0, 0.1, 1.0]] {
            let s = identity_sample(&m, &p).unwrap();
            assert!(s.residual() < 1e-5, "{}", s.residual());
            assert!(s.frame.antisymmetry_residual() < 1e-8);
            assert!(s.frame.orthonormality_residual(&m.g(&p)) < 1e-12);
            let (l, r) = s.frame.index_identity_sides();
            assert!(close(l, r, 1e-8));
            assert!(s.curvature.symmetry_residual() < 1e-6);
        }
    }

    #[test]
    fn rotated_frame_changes_psi_but_not_identity() {
        let rot: FrameRotationFn = Arc::new(|p: &[f64]| {
            let a = p[0] + 0.5 * p[1];
            let mut r = nalgebra::DMatrix::identity(3, 3);
            r[(0, 0)] = a.cos();
            r[(0, 1)] = -a.sin();
            r[(1, 0)] = a.sin();
            r[(1, 1)] = a.cos();
            r
        });
        let base = warped_torus3();
        let rotated = base.clone().with_frame_rotation(rot);
        let p = [0.8, 0.3, 0.2];
        let s0 = identity_sample(&base, &p).unwrap();
        let s1 = identity_sample(&rotated, &p).unwrap();
        assert!(s1.residual() < 1e-5);
        assert!((s0.psi - s1.psi).abs() > 1e-3);
        assert!(close(s0.curvature.scalar, s1.curvature.scalar, 1e-8));
    }

    #[test]
    fn integrals_on_closed_charts() {
        let flat = integrate_closed_all(&flat_torus(2), &[8, 8]).unwrap();
        assert_eq!(flat.half_scalar, 0.0);
        assert_eq!(flat.div_x, 0.0);
        assert!(close(flat.volume, std::f64::consts::TAU.powi(2), 1e-12));

        let tor = torus_of_revolution(2.0).unwrap();
        let r = integrate_closed_all(&tor, &[64, 64]).unwrap();
        assert!(r.half_scalar.abs() / r.volume < 1e-8);
        assert!(r.div_x.abs() / r.volume < 1e-8);
        assert_eq!(r.psi, 0.0);

        assert!(matches!(
            integrate_closed(&round_s2(), Integrand::DivX, &[4, 4]),
            Err(Error::NotClosed { axis: 0 })
        ));
    }

    #[test]
    fn invariant_axes_collapse_matches_full_grid() {
        let m = warped_torus3();
        let full = m.clone().with_invariant_axes(vec![]);
        let a = integrate_closed_all(&m, &[12, 4, 4]).unwrap();
        let b = integrate_closed_all(&full, &[12, 4, 4]).unwrap();
        assert!(close(a.half_scalar, b.half_scalar, 1e-9 * b.magnitude));
        assert!(close(a.psi, b.psi, 1e-9 * b.magnitude));
        assert!(close(a.volume, b.volume, 1e-9 * b.volume));
    }

    #[test]
    fn singular_metric_is_reported() {
        let m = ChartedMetric::new(
            "degenerate",
            Domain::torus(2, 1.0),
            Arc::new(|_| nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0])),
        );
        assert!(matches!(
            frame_connection(&m, &[0.5, 0.5]),
            Err(Error::SingularMetric { .. })
        ));
    }

    #[test]
    fn out_of_domain_rejected() {
        assert!(matches!(
            frame_connection(&round_s2(), &[4.0, 0.0]),
            Err(Error::OutOfDomain { .. })
        ));
    }
}
