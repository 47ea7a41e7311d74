use nalgebra::{Cholesky, DMatrix};

use super::metric::ChartedMetric;
use crate::error::{Error, Result};

/// Antisymmetry residual of `Γ_ij^k + Γ_ik^j` above which the derivative step
/// is considered misconfigured.
pub const ANTISYMMETRY_LIMIT: f64 = 1e-6;

/// Smallest acceptable metric eigenvalue proxy (squared Cholesky pivot).
const PIVOT_FLOOR: f64 = 1e-10;

/// Coordinate Christoffel symbols `Γ^c_{ab}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^c_{ab}`.
    pub fn get(&self, c: usize, a: usize, b: usize) -> f64 {
        self.data[(c * self.n + a) * self.n + b]
    }

    /// Matrix `C_a` with entries `C_a[b][c] = Γ^b_{ac}`, the coordinate form of
    /// `v ↦ ∇_{∂_a} v` without the derivative part.
    pub fn along(&self, a: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |b, c| self.get(b, a, c))
    }

    fn axpy(&mut self, s: f64, other: &Christoffel) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += s * y;
        }
    }
}

/// Inverse metric, rejecting points where the metric is not positive definite.
pub fn inverse_metric(p: &[f64], g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = cholesky(g).ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    Ok(chol.inverse())
}

fn cholesky(g: &DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let chol = Cholesky::new(g.clone())?;
    let l = chol.l_dirty();
    if (0..g.nrows()).any(|i| l[(i, i)] * l[(i, i)] < PIVOT_FLOOR) {
        return None;
    }
    Some(chol)
}

/// `Γ^c_{ab} = ½ g^{cd}(∂_a g_{bd} + ∂_b g_{ad} − ∂_d g_{ab})`.
pub fn christoffel(metric: &ChartedMetric, p: &[f64]) -> Result<Christoffel> {
    let g = metric.g(p);
    let ginv = inverse_metric(p, &g)?;
    let dg = metric.dg(p);
    Ok(christoffel_from(&ginv, &dg))
}

pub(crate) fn christoffel_from(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let n = ginv.nrows();
    // lowered symbols Γ_{d,ab}
    let mut lower = vec![0.0; n * n * n];
    for d in 0..n {
        for a in 0..n {
            for b in 0..n {
                lower[(d * n + a) * n + b] = 0.5 * (dg[a][(b, d)] + dg[b][(a, d)] - dg[d][(a, b)]);
            }
        }
    }
    let mut data = vec![0.0; n * n * n];
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += ginv[(c, d)] * lower[(d * n + a) * n + b];
                }
                data[(c * n + a) * n + b] = s;
            }
        }
    }
    Christoffel { n, data }
}

/// `∂_e Γ^c_{ab}` for every `e`, by central differences of [`christoffel`].
pub fn christoffel_derivatives(metric: &ChartedMetric, p: &[f64]) -> Result<Vec<Christoffel>> {
    let n = metric.dim();
    let h = metric.step();
    let mut q = p.to_vec();
    (0..n)
        .map(|e| {
            let mut acc = Christoffel {
                n,
                data: vec![0.0; n * n * n],
            };
            for &(o, w) in metric.stencil().weights() {
                q[e] = p[e] + o * h;
                acc.axpy(w / h, &christoffel(metric, &q)?);
                q[e] = p[e] - o * h;
                acc.axpy(-w / h, &christoffel(metric, &q)?);
            }
            q[e] = p[e];
            Ok(acc)
        })
        .collect()
}

/// Gram–Schmidt of the coordinate basis in index order: `e_i` lies in the
/// span of `∂_1..∂_i` with a positive `∂_i` component. Equals `L^{-T}` for the
/// Cholesky factorisation `g = L Lᵀ`. A frame rotation, if configured, is
/// applied on the right.
pub fn orthonormal_frame(metric: &ChartedMetric, p: &[f64]) -> Result<DMatrix<f64>> {
    let g = metric.g(p);
    let chol = cholesky(&g).ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    let lt = chol.l().transpose();
    let n = g.nrows();
    let e = lt
        .solve_upper_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;
    Ok(match metric.rotation() {
        Some(r) => e * r(p),
        None => e,
    })
}

/// An orthonormal frame at a point with its connection coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePointData {
    pub point: Vec<f64>,
    /// Column `i` holds the coordinate components of `e_i`.
    pub frame: DMatrix<f64>,
    gamma: Vec<f64>,
    n: usize,
}

impl FramePointData {
    pub fn from_gamma(point: Vec<f64>, frame: DMatrix<f64>, gamma: Vec<f64>) -> Self {
        let n = frame.ncols();
        assert_eq!(gamma.len(), n * n * n);
        FramePointData {
            point,
            frame,
            gamma,
            n,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ_ij^k = ⟨∇_{e_i} e_j, e_k⟩`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    pub fn gamma_data(&self) -> &[f64] {
        &self.gamma
    }

    /// `max |Γ_ij^k + Γ_ik^j|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.gamma(i, j, k) + self.gamma(i, k, j)).abs());
                }
            }
        }
        worst
    }

    /// `max |Eᵀ g E − I|`.
    pub fn orthonormality_residual(&self, g: &DMatrix<f64>) -> f64 {
        let m = self.frame.transpose() * g * &self.frame;
        let n = self.n;
        (m - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// Frame components `X^j = Σ_i Γ_ii^j` of `X = Σ_i ∇_{e_i} e_i`.
    pub fn x_frame(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.gamma(i, i, j)).sum())
            .collect()
    }

    /// Coordinate components of `X`.
    pub fn x_coords(&self) -> Vec<f64> {
        let xf = self.x_frame();
        (0..self.n)
            .map(|a| (0..self.n).map(|j| self.frame[(a, j)] * xf[j]).sum())
            .collect()
    }

    /// `Ψ = Σ_{i<j, k≠i,j} (Γ_ii^k Γ_jj^k − Γ_ij^k Γ_ji^k)`.
    pub fn psi(&self) -> f64 {
        self.psi_parts().0 - self.psi_parts().1
    }

    /// `(Σ Γ_ii^k Γ_jj^k, Σ Γ_ij^k Γ_ji^k)` over `i<j`, `k≠i,j`.
    pub fn psi_parts(&self) -> (f64, f64) {
        let n = self.n;
        let (mut diag, mut cross) = (0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                for k in (0..n).filter(|&k| k != i && k != j) {
                    diag += self.gamma(i, i, k) * self.gamma(j, j, k);
                    cross += self.gamma(i, j, k) * self.gamma(j, i, k);
                }
            }
        }
        (diag, cross)
    }

    /// Both sides of `Σ (Γ_ij^k − Γ_ji^k) Γ_kj^i = 2 Σ Γ_ij^k Γ_ji^k` over
    /// `i<j`, `k≠i,j`.
    pub fn index_identity_sides(&self) -> (f64, f64) {
        let n = self.n;
        let mut lhs = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                for k in (0..n).filter(|&k| k != i && k != j) {
                    lhs += (self.gamma(i, j, k) - self.gamma(j, i, k)) * self.gamma(k, j, i);
                }
            }
        }
        (lhs, 2.0 * self.psi_parts().1)
    }
}

/// A frame field evaluated at a point. The second argument is a nearby frame
/// the result should be aligned with (used by eigenframes to keep column
/// signs consistent between neighbouring samples).
pub trait FrameField {
    fn frame_at(&self, p: &[f64], reference: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>>;
}

/// The canonical Gram–Schmidt frame of a metric.
pub struct GramSchmidt<'a>(pub &'a ChartedMetric);

impl FrameField for GramSchmidt<'_> {
    fn frame_at(&self, p: &[f64], _: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>> {
        orthonormal_frame(self.0, p)
    }
}

/// `Γ_ij^k` of a frame field, from coordinate Christoffels plus central
/// differences of the frame coefficients:
/// `∇_{e_i} e_j = E^a_i (∂_a E^b_j + Γ^b_{ac} E^c_j) ∂_b`.
pub fn connection_of(
    metric: &ChartedMetric,
    p: &[f64],
    field: &dyn FrameField,
) -> Result<FramePointData> {
    metric.check_point(p)?;
    let n = metric.dim();
    let e = field.frame_at(p, None)?;
    let g = metric.g(p);
    let ginv = inverse_metric(p, &g)?;
    let chr = christoffel_from(&ginv, &metric.dg(p));

    let mut nabla: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    for a in 0..n {
        let de = metric.derivative(p, a, |q| field.frame_at(q, Some(&e)))?;
        // columns: ∇_{∂_a} e_j
        nabla.push(de + chr.along(a) * &e);
    }

    let ge = &g * &e;
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (a, na) in nabla.iter().enumerate() {
            m += na * e[(a, i)];
        }
        let block = m.transpose() * &ge;
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] = block[(j, k)];
            }
        }
    }
    let data = FramePointData::from_gamma(p.to_vec(), e, gamma);
    let residual = data.antisymmetry_residual();
    if !(residual <= ANTISYMMETRY_LIMIT) {
        return Err(Error::StepTooLarge {
            residual,
            limit: ANTISYMMETRY_LIMIT,
        });
    }
    Ok(data)
}

/// Connection coefficients of the canonical frame.
pub fn frame_connection(metric: &ChartedMetric, p: &[f64]) -> Result<FramePointData> {
    connection_of(metric, p, &GramSchmidt(metric))
}
