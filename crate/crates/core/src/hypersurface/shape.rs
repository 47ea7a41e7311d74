use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::immersion::{Immersion, Jet};
use crate::codazzi::{codazzi_residual, SymmetricTensorField};
use crate::error::{Error, Result};
use crate::geometry::frame_connection;
use crate::report::VerificationReport;
use crate::sympoly::{elementary_symmetric, Spectrum};

/// Smallest singular value of `df` (relative to the largest) accepted as
/// full rank.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Relative factor of the isoparametric test `std(H_r) < 1e-8 (1 + |mean|)`.
pub const CONSTANCY_FACTOR: f64 = 1e-8;

/// Extrinsic data of a hypersurface of the unit sphere at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSample {
    pub point: Vec<f64>,
    pub induced_g: DMatrix<f64>,
    pub second_ff: DMatrix<f64>,
    /// `g⁻¹ · II`.
    pub shape: DMatrix<f64>,
    pub normal: DVector<f64>,
    /// Principal curvatures, ascending.
    pub principal: Spectrum,
    /// `h[r − 1] = H_r`.
    pub h: Vec<f64>,
}

impl ShapeSample {
    pub fn dim(&self) -> usize {
        self.principal.len()
    }

    /// `max |g·shape − (g·shape)ᵀ|`.
    pub fn self_adjointness_residual(&self) -> f64 {
        let m = &self.induced_g * &self.shape;
        (&m - m.transpose()).amax()
    }

    /// `max_r |H_r C(n, r) − σ_r|`.
    pub fn mean_curvature_residual(&self) -> f64 {
        let n = self.dim();
        let sigma = elementary_symmetric(&self.principal);
        (1..=n)
            .map(|r| (self.h[r - 1] * binomial(n, r) - sigma.get(r)).abs())
            .fold(0.0, f64::max)
    }
}

pub fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unit vector orthogonal to the `n + 1` columns of `m` in `R^{n+2}`:
/// the generalized cross product `ν_i = (−1)^i det(m without row i)`,
/// normalised. Its sign varies smoothly with `m`.
fn cross_normal(m: &DMatrix<f64>) -> DVector<f64> {
    let rows = m.nrows();
    let v = DVector::from_fn(rows, |i, _| {
        let minor = m.clone().remove_row(i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    });
    let norm = v.norm();
    v / norm
}

/// Unit normal to the hypersurface inside the sphere: orthogonal to `f` and
/// to every `∂_a f`, oriented so `(ν, f, ∂_1 f, …, ∂_n f)` is positive.
pub fn unit_normal(jet: &Jet) -> DVector<f64> {
    let n = jet.d1.ncols();
    let mut m = DMatrix::zeros(jet.f.len(), n + 1);
    m.set_column(0, &jet.f);
    for a in 0..n {
        m.set_column(a + 1, &jet.d1.column(a));
    }
    cross_normal(&m)
}

fn check_rank(p: &[f64], d1: &DMatrix<f64>) -> Result<()> {
    let sv = d1.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || !(min > RANK_TOLERANCE * max) {
        return Err(Error::RankDeficient { point: p.to_vec() });
    }
    Ok(())
}

/// Second fundamental form `II_ab = ⟨∂_a ∂_b f, ν⟩` at a point.
pub fn second_fundamental_form(imm: &Immersion, p: &[f64]) -> Result<DMatrix<f64>> {
    let jet = imm.jet(p);
    check_rank(p, &jet.d1)?;
    let nu = unit_normal(&jet);
    Ok(second_ff_from(&jet, &nu))
}

fn second_ff_from(jet: &Jet, nu: &DVector<f64>) -> DMatrix<f64> {
    let n = jet.d1.ncols();
    let m = DMatrix::from_fn(n, n, |a, b| jet.d2[a].column(b).dot(nu));
    (&m + m.transpose()) * 0.5
}

pub fn shape_sample(imm: &Immersion, p: &[f64]) -> Result<ShapeSample> {
    imm.check_point(p)?;
    let n = imm.dim();
    let jet = imm.jet(p);
    check_rank(p, &jet.d1)?;
    let g = jet.d1.transpose() * &jet.d1;
    let nu = unit_normal(&jet);
    let second_ff = second_ff_from(&jet, &nu);
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient { point: p.to_vec() })?;
    let shape = chol.solve(&second_ff);
    // principal curvatures in the orthonormal gauge L⁻¹ II L⁻ᵀ
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient { point: p.to_vec() })?;
    let sym = &l_inv * &second_ff * l_inv.transpose();
    let eig = SymmetricEigen::new((&sym + sym.transpose()) * 0.5);
    let principal = Spectrum::new(eig.eigenvalues.as_slice().to_vec())?;
    let sigma = elementary_symmetric(&principal);
    let h = (1..=n).map(|r| sigma.get(r) / binomial(n, r)).collect();
    Ok(ShapeSample {
        point: p.to_vec(),
        induced_g: g,
        second_ff,
        shape,
        normal: nu,
        principal,
        h,
    })
}

/// Gauss equation in the unit sphere: `S = n(n−1) + σ_1² − |A|²`.
pub fn gauss_scalar(sample: &ShapeSample) -> f64 {
    let n = sample.dim() as f64;
    let l = sample.principal.values();
    let s1: f64 = l.iter().sum();
    let sq: f64 = l.iter().map(|x| x * x).sum();
    n * (n - 1.0) + s1 * s1 - sq
}

/// The second fundamental form as a tensor field on the induced metric.
pub fn shape_tensor_field(imm: &Immersion) -> SymmetricTensorField {
    let inner = imm.clone();
    SymmetricTensorField::new(
        format!("shape-{}", imm.name),
        imm.induced_metric(),
        Arc::new(move |p| {
            second_fundamental_form(&inner, p).unwrap_or_else(|_| DMatrix::from_element(p.len(), p.len(), f64::NAN))
        }),
    )
}

/// Outcome of [`isoparametric_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct IsoparametricReport {
    pub mean: Vec<f64>,
    /// Sample standard deviation of each `H_r`.
    pub std: Vec<f64>,
    /// `max |H_r − mean_r|` over the grid.
    pub max_deviation: Vec<f64>,
    /// Smallest Gauss-equation scalar curvature over the grid.
    pub min_scalar: f64,
    pub max_scalar: f64,
    /// Rows per `r`: `std(H_r)/(1 + |mean_r|)` against `1e-8`.
    pub constancy: VerificationReport,
    /// Rows per point: total-symmetry residual of `∇II`.
    pub codazzi: VerificationReport,
}

impl IsoparametricReport {
    pub fn isoparametric(&self) -> bool {
        self.constancy.passed()
    }

    /// Largest `max |H_r − mean_r|` over all `r`.
    pub fn deviation(&self) -> f64 {
        self.max_deviation.iter().copied().fold(0.0, f64::max)
    }
}

/// Constancy of every `H_r` over the grid, plus the Codazzi residual of the
/// shape tensor at each point (tested against `codazzi_tol`).
pub fn isoparametric_check(imm: &Immersion, points: &[Vec<f64>], codazzi_tol: f64) -> Result<IsoparametricReport> {
    let samples: Vec<ShapeSample> = points
        .par_iter()
        .map(|p| shape_sample(imm, p))
        .collect::<Result<_>>()?;
    let field = shape_tensor_field(imm);
    let metric = field.metric().clone();
    let codazzi_rows: Vec<Result<f64>> = points
        .par_iter()
        .map(|p| codazzi_residual(&field, &frame_connection(&metric, p)?))
        .collect();

    let n = imm.dim();
    let m = samples.len() as f64;
    let mut mean = vec![0.0; n];
    let mut std = vec![0.0; n];
    let mut max_deviation = vec![0.0; n];
    let mut constancy = VerificationReport::new("mean-curvature-constancy", &imm.name, CONSTANCY_FACTOR);
    for r in 0..n {
        mean[r] = samples.iter().map(|s| s.h[r]).sum::<f64>() / m;
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s.h[r] - mean[r]).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        std[r] = var.sqrt();
        max_deviation[r] = samples.iter().map(|s| (s.h[r] - mean[r]).abs()).fold(0.0, f64::max);
        constancy.push(&[(r + 1) as f64], std[r] / (1.0 + mean[r].abs()));
    }
    constancy.set_meta("samples", &samples.len().to_string());

    let mut codazzi = VerificationReport::new("shape-codazzi", &imm.name, codazzi_tol);
    for (p, r) in points.iter().zip(codazzi_rows) {
        codazzi.push_result(p, r);
    }
    let scalars: Vec<f64> = samples.iter().map(gauss_scalar).collect();
    Ok(IsoparametricReport {
        mean,
        std,
        max_deviation,
        min_scalar: scalars.iter().copied().fold(f64::INFINITY, f64::min),
        max_scalar: scalars.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        constancy,
        codazzi,
    })
}
