use nalgebra::{DMatrix, SymmetricEigen};

use super::field::{covariant_derivative, CovariantDerivativeSample, SymmetricTensorField};
use crate::error::{Error, Result};
use crate::geometry::{connection_of, FrameField, FramePointData};
use crate::sympoly::Spectrum;

/// Eigen-data of the (1,1)-tensor `g⁻¹a` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenframeSample {
    pub point: Vec<f64>,
    /// Ascending.
    pub lambdas: Spectrum,
    /// Column `i` is the unit eigenvector for `λ_i`.
    pub eigenframe: DMatrix<f64>,
    /// `lambda_grad[(i, k)] = λ_ik = e_k(λ_i)`.
    pub lambda_grad: DMatrix<f64>,
}

impl EigenframeSample {
    /// `max |a(e_i, e_j) − λ_i δ_ij|`.
    pub fn diagonalization_residual(&self, field: &SymmetricTensorField) -> f64 {
        let e = &self.eigenframe;
        let m = e.transpose() * field.a(&self.point) * e;
        let l = self.lambdas.values();
        let n = l.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { l[i] } else { 0.0 };
                worst = worst.max((m[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// `max_i ‖g⁻¹a e_i − λ_i e_i‖∞`.
    pub fn eigen_residual(&self, field: &SymmetricTensorField) -> Result<f64> {
        let g = field.metric().g(&self.point);
        let shape = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::SingularMetric {
                point: self.point.clone(),
            })?
            .solve(&field.a(&self.point));
        let e = &self.eigenframe;
        let l = self.lambdas.values();
        let mut worst = 0.0f64;
        for i in 0..l.len() {
            let col = e.column(i);
            worst = worst.max((&shape * col - col * l[i]).amax());
        }
        Ok(worst)
    }
}

/// Sorted eigenvalues and a sign-fixed `g`-orthonormal eigenframe of `g⁻¹a`.
///
/// With `g = L Lᵀ`, the problem becomes the symmetric one for `L⁻¹ a L⁻ᵀ`,
/// whose eigenvectors `w` map back to `v = L⁻ᵀ w`. Each column has its first
/// non-negligible component made positive, or, when `reference` is given,
/// is oriented to agree with the matching reference column.
pub fn eigen_decomposition(
    field: &SymmetricTensorField,
    p: &[f64],
    reference: Option<&DMatrix<f64>>,
) -> Result<(Spectrum, DMatrix<f64>)> {
    let metric = field.metric();
    metric.check_point(p)?;
    let n = metric.dim();
    let chol = metric
        .g(p)
        .cholesky()
        .ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    let mut m = &l_inv * field.a(p) * l_inv.transpose();
    m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));

    let back = l_inv.transpose();
    let mut frame = DMatrix::<f64>::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let mut v = &back * eig.eigenvectors.column(src);
        let flip = match reference {
            Some(r) => r.column(col).dot(&v) < 0.0,
            None => {
                let scale = v.amax();
                v.iter().find(|x| x.abs() > 1e-10 * scale).is_some_and(|&x| x < 0.0)
            }
        };
        if flip {
            v = -v;
        }
        frame.set_column(col, &v);
    }
    let spectrum = Spectrum::new(values)?;
    spectrum.require_distinct()?;
    Ok((spectrum, frame))
}

/// The eigenframe of a field as a [`FrameField`].
pub struct Eigenframe<'a>(pub &'a SymmetricTensorField);

impl FrameField for Eigenframe<'_> {
    fn frame_at(&self, p: &[f64], reference: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>> {
        Ok(eigen_decomposition(self.0, p, reference)?.1)
    }
}

/// Eigenvalues, eigenframe and frame derivatives `λ_ik` of the eigenvalues.
pub fn eigenframe(field: &SymmetricTensorField, p: &[f64]) -> Result<EigenframeSample> {
    let (lambdas, frame) = eigen_decomposition(field, p, None)?;
    let lambda_grad = lambda_gradient(field, p, &frame)?;
    Ok(EigenframeSample {
        point: p.to_vec(),
        lambdas,
        eigenframe: frame,
        lambda_grad,
    })
}

fn lambda_gradient(field: &SymmetricTensorField, p: &[f64], frame: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let metric = field.metric();
    let n = metric.dim();
    // coord[(i, a)] = ∂_a λ_i
    let mut coord = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        let d = metric.derivative(p, a, |q| {
            let (s, _) = eigen_decomposition(field, q, None)?;
            Ok(DMatrix::from_column_slice(n, 1, s.values()))
        })?;
        coord.set_column(a, &d.column(0));
    }
    Ok(coord * frame)
}

/// Everything the eigenframe identities need at one point: eigen-data, the
/// connection coefficients of the eigenframe and `∇a` in that frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPoint {
    pub eigen: EigenframeSample,
    pub connection: FramePointData,
    pub derivative: CovariantDerivativeSample,
}

pub fn eigen_point(field: &SymmetricTensorField, p: &[f64]) -> Result<EigenPoint> {
    let eigen = eigenframe(field, p)?;
    let connection = connection_of(field.metric(), p, &Eigenframe(field))?;
    let derivative = covariant_derivative(field, &connection)?;
    Ok(EigenPoint {
        eigen,
        connection,
        derivative,
    })
}
