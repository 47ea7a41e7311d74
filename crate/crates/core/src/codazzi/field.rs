use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{christoffel, ChartedMetric, FramePointData};

/// Coordinate components `a_ab` of a symmetric (0,2)-tensor at a point.
pub type TensorFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Largest `|a_ij − a_ji|` tolerated by [`covariant_derivative`].
pub const DERIVATIVE_SYMMETRY_LIMIT: f64 = 1e-6;

/// A symmetric (0,2)-tensor field on a charted metric.
#[derive(Clone)]
pub struct SymmetricTensorField {
    pub name: String,
    metric: ChartedMetric,
    a: TensorFn,
}

impl fmt::Debug for SymmetricTensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricTensorField")
            .field("name", &self.name)
            .field("metric", &self.metric)
            .finish()
    }
}

impl SymmetricTensorField {
    pub fn new(name: impl Into<String>, metric: ChartedMetric, a: TensorFn) -> Self {
        SymmetricTensorField {
            name: name.into(),
            metric,
            a,
        }
    }

    /// The metric itself viewed as a tensor field.
    pub fn from_metric(metric: &ChartedMetric) -> Self {
        Self::scaled_metric(metric, 1.0)
    }

    /// `c·g`.
    pub fn scaled_metric(metric: &ChartedMetric, c: f64) -> Self {
        let m = metric.clone();
        SymmetricTensorField::new(
            format!("{c}*{}", metric.name),
            metric.clone(),
            Arc::new(move |p| m.g(p) * c),
        )
    }

    pub fn metric(&self) -> &ChartedMetric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn a(&self, p: &[f64]) -> DMatrix<f64> {
        (self.a)(p)
    }

    /// `max |a_ab − a_ba|`.
    pub fn asymmetry(&self, p: &[f64]) -> f64 {
        let a = self.a(p);
        (&a - a.transpose()).amax()
    }
}

/// `(∇_{e_k} a)(e_i, e_j)` in one frame at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantDerivativeSample {
    pub point: Vec<f64>,
    n: usize,
    data: Vec<f64>,
}

impl CovariantDerivativeSample {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `a_ijk`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    /// `max |a_ijk − a_jik|`.
    pub fn pair_symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest difference between `a_ijk` and any permutation of it.
    pub fn total_symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [
                        self.get(i, k, j),
                        self.get(j, i, k),
                        self.get(j, k, i),
                        self.get(k, i, j),
                        self.get(k, j, i),
                    ] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }
}

/// `a_ijk = E^a_i E^b_j E^c_k (∂_c a_ab − Γ^d_{ca} a_db − Γ^d_{cb} a_ad)`,
/// with `∂_c a` by central differences of the coordinate components.
pub fn covariant_derivative(
    field: &SymmetricTensorField,
    frame: &FramePointData,
) -> Result<CovariantDerivativeSample> {
    let metric = field.metric();
    let p = &frame.point;
    metric.check_point(p)?;
    let n = metric.dim();
    let chr = christoffel(metric, p)?;
    let a = field.a(p);
    let e = &frame.frame;

    // nabla[c][(a, b)] = ∇_c a_ab
    let mut nabla = Vec::with_capacity(n);
    for c in 0..n {
        let mut m = metric.derivative(p, c, |q| Ok(field.a(q)))?;
        for x in 0..n {
            for y in 0..n {
                let mut corr = 0.0;
                for d in 0..n {
                    corr += chr.get(d, c, x) * a[(d, y)] + chr.get(d, c, y) * a[(x, d)];
                }
                m[(x, y)] -= corr;
            }
        }
        nabla.push(m);
    }

    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        let mut mk = DMatrix::<f64>::zeros(n, n);
        for (c, m) in nabla.iter().enumerate() {
            mk += m * e[(c, k)];
        }
        let block = e.transpose() * mk * e;
        for i in 0..n {
            for j in 0..n {
                data[(i * n + j) * n + k] = block[(i, j)];
            }
        }
    }
    let sample = CovariantDerivativeSample {
        point: p.clone(),
        n,
        data,
    };
    let residual = sample.pair_symmetry_residual();
    if !(residual <= DERIVATIVE_SYMMETRY_LIMIT) {
        return Err(Error::StepTooLarge {
            residual,
            limit: DERIVATIVE_SYMMETRY_LIMIT,
        });
    }
    Ok(sample)
}

/// Total-symmetry defect of `∇a`; zero exactly for Codazzi tensors.
pub fn codazzi_residual(field: &SymmetricTensorField, frame: &FramePointData) -> Result<f64> {
    Ok(covariant_derivative(field, frame)?.total_symmetry_residual())
}
