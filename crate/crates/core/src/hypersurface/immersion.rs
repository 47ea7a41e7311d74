use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{ChartedMetric, Domain, StencilOrder};

/// Step of the finite-difference jets of immersions without analytic
/// derivatives. Fourth-order stencils keep the second derivatives accurate
/// to about 1e-9 at this step.
pub const JET_STEP: f64 = 1e-3;

/// Value and first two derivatives of an immersion at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub f: DVector<f64>,
    /// Column `a` is `∂_a f`.
    pub d1: DMatrix<f64>,
    /// `d2[a]` has column `b` equal to `∂_a ∂_b f`.
    pub d2: Vec<DMatrix<f64>>,
}

impl Jet {
    /// Jet of `v/|v|` from the jet of `v`.
    pub fn normalized(&self) -> Jet {
        let n = self.d1.ncols();
        let v = &self.f;
        let rho = v.norm();
        let rho_a: Vec<f64> = (0..n).map(|a| v.dot(&self.d1.column(a)) / rho).collect();
        let mut d1 = DMatrix::zeros(v.len(), n);
        for a in 0..n {
            d1.set_column(a, &(self.d1.column(a) / rho - v * (rho_a[a] / (rho * rho))));
        }
        let mut d2 = vec![DMatrix::zeros(v.len(), n); n];
        for a in 0..n {
            for b in 0..n {
                let vab = self.d2[a].column(b);
                let rho_ab = (self.d1.column(a).dot(&self.d1.column(b)) + v.dot(&vab)) / rho
                    - rho_a[a] * rho_a[b] / rho;
                let col = vab / rho
                    - self.d1.column(a) * (rho_a[b] / (rho * rho))
                    - self.d1.column(b) * (rho_a[a] / (rho * rho))
                    - v * (rho_ab / (rho * rho))
                    + v * (2.0 * rho_a[a] * rho_a[b] / rho.powi(3));
                d2[a].set_column(b, &col);
            }
        }
        Jet { f: v / rho, d1, d2 }
    }
}

pub type ImmersionFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type JetFn = Arc<dyn Fn(&[f64]) -> Jet + Send + Sync>;

/// A map from an `n`-dimensional chart into the unit sphere of `R^{n+2}`.
#[derive(Clone)]
pub struct Immersion {
    pub name: String,
    pub domain: Domain,
    f: ImmersionFn,
    jet: Option<JetFn>,
    guard: f64,
}

impl fmt::Debug for Immersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Immersion")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("analytic_jet", &self.jet.is_some())
            .finish()
    }
}

impl Immersion {
    pub fn new(name: impl Into<String>, domain: Domain, f: ImmersionFn) -> Self {
        Immersion {
            name: name.into(),
            domain,
            f,
            jet: None,
            guard: 5.0 * JET_STEP,
        }
    }

    pub fn with_jet(mut self, jet: JetFn) -> Self {
        self.jet = Some(jet);
        self
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn f(&self, p: &[f64]) -> DVector<f64> {
        (self.f)(p)
    }

    pub fn sample_grid(&self, counts: &[usize]) -> Result<Vec<Vec<f64>>> {
        self.domain.grid(counts, self.guard)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        if !self.domain.contains(p) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        Ok(())
    }

    /// Analytic jet if one was supplied, fourth-order differences otherwise.
    pub fn jet(&self, p: &[f64]) -> Jet {
        match &self.jet {
            Some(j) => j(p),
            None => self.jet_fd(p),
        }
    }

    pub fn jet_fd(&self, p: &[f64]) -> Jet {
        let n = self.dim();
        let h = JET_STEP;
        let f0 = self.f(p);
        let big = f0.len();
        // full antisymmetric stencil as (offset, weight) pairs
        let weights: Vec<(f64, f64)> = StencilOrder::Fourth
            .weights()
            .iter()
            .flat_map(|&(o, w)| [(o, w), (-o, -w)])
            .collect();
        let mut d1 = DMatrix::zeros(big, n);
        for a in 0..n {
            let mut q = p.to_vec();
            let mut acc = DVector::zeros(big);
            for &(o, w) in &weights {
                q[a] = p[a] + o * h;
                acc += self.f(&q) * (w / h);
            }
            d1.set_column(a, &acc);
        }
        let mut d2 = vec![DMatrix::zeros(big, n); n];
        for a in 0..n {
            let mut q = p.to_vec();
            let mut diag = &f0 * (-30.0);
            for (o, w) in [(2.0, -1.0), (1.0, 16.0), (-1.0, 16.0), (-2.0, -1.0)] {
                q[a] = p[a] + o * h;
                diag += self.f(&q) * w;
            }
            d2[a].set_column(a, &(diag / (12.0 * h * h)));
            for b in a + 1..n {
                let mut acc = DVector::zeros(big);
                for &(oa, wa) in &weights {
                    for &(ob, wb) in &weights {
                        let mut q = p.to_vec();
                        q[a] += oa * h;
                        q[b] += ob * h;
                        acc += self.f(&q) * (wa * wb / (h * h));
                    }
                }
                d2[a].set_column(b, &acc);
                d2[b].set_column(a, &acc);
            }
        }
        Jet { f: f0, d1, d2 }
    }

    /// `max | |f| − 1 |` over the given points.
    pub fn sphere_defect(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .map(|p| (self.f(p).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The induced metric `dfᵀdf` with derivatives from the jet. When the
    /// jet itself comes from differences, further derivatives use the jet
    /// step to keep the noise down.
    pub fn induced_metric(&self) -> ChartedMetric {
        let (a, b) = (self.clone(), self.clone());
        let metric = ChartedMetric::new(
            format!("induced-{}", self.name),
            self.domain.clone(),
            Arc::new(move |p| {
                let j = a.jet(p);
                j.d1.transpose() * &j.d1
            }),
        )
        .with_derivatives(Arc::new(move |p| {
            let j = b.jet(p);
            j.d2.iter()
                .map(|d2c| {
                    let m = d2c.transpose() * &j.d1;
                    &m + m.transpose()
                })
                .collect()
        }))
        .with_guard(self.guard);
        if self.jet.is_some() {
            metric
        } else {
            metric.with_step(JET_STEP)
        }
    }
}
