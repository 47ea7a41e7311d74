use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Metric components at a point.
pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
/// `∂_c g` at a point, one matrix per coordinate `c`.
pub type MetricDerivFn = Arc<dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync>;
/// A pointwise rotation applied to the Gram–Schmidt frame, `E ↦ E·R(p)`.
pub type FrameRotationFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Accuracy order of the central-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    /// `(offset in steps, weight)` pairs of the antisymmetric stencil; the
    /// derivative is `Σ w (f(p + o h) − f(p − o h)) / h`.
    pub fn weights(self) -> &'static [(f64, f64)] {
        match self {
            StencilOrder::Second => &[(1.0, 0.5)],
            StencilOrder::Fourth => &[(1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
        }
    }
}

/// A coordinate box with optional per-axis periodicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || periodic.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: hi.len().min(periodic.len()),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::BadParameters("domain box has an empty side".into()));
        }
        Ok(Domain { lo, hi, periodic })
    }

    /// The periodic box `[0, period)^n`.
    pub fn torus(n: usize, period: f64) -> Self {
        Domain {
            lo: vec![0.0; n],
            hi: vec![period; n],
            periodic: vec![true; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && (0..self.dim()).all(|a| self.periodic[a] || (p[a] >= self.lo[a] && p[a] <= self.hi[a]))
    }

    pub fn is_closed(&self) -> Result<()> {
        match self.periodic.iter().position(|&p| !p) {
            Some(axis) => Err(Error::NotClosed { axis }),
            None => Ok(()),
        }
    }

    /// Uniform grid with `counts[a]` points per axis. Periodic axes use the
    /// half-open layout `lo + k·L/N`; other axes span `[lo + guard, hi − guard]`
    /// inclusive.
    pub fn grid(&self, counts: &[usize], guard: f64) -> Result<Vec<Vec<f64>>> {
        if counts.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: counts.len(),
            });
        }
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|a| axis_nodes(self.lo[a], self.hi[a], self.periodic[a], counts[a], guard))
            .collect::<Result<_>>()?;
        Ok(cartesian(&axes))
    }
}

fn axis_nodes(lo: f64, hi: f64, periodic: bool, count: usize, guard: f64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::BadParameters("grid axis with zero points".into()));
    }
    if periodic {
        let step = (hi - lo) / count as f64;
        return Ok((0..count).map(|k| lo + k as f64 * step).collect());
    }
    let (a, b) = (lo + guard, hi - guard);
    if !(a <= b) {
        return Err(Error::BadParameters("guard band swallows the axis".into()));
    }
    if count == 1 {
        return Ok(vec![0.5 * (a + b)]);
    }
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count).map(|k| a + k as f64 * step).collect())
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &x in axis {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// A Riemannian metric on a coordinate chart.
#[derive(Clone)]
pub struct ChartedMetric {
    pub name: String,
    pub domain: Domain,
    g: MetricFn,
    dg: Option<MetricDerivFn>,
    mode: DerivativeMode,
    step: f64,
    order: StencilOrder,
    rotation: Option<FrameRotationFn>,
    /// Axes along which the metric components do not change.
    invariant_axes: Vec<usize>,
    /// Band kept clear of non-periodic chart boundaries when sampling.
    guard: Option<f64>,
}

impl fmt::Debug for ChartedMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedMetric")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("mode", &self.mode)
            .field("step", &self.step)
            .field("order", &self.order)
            .field("rotated_frame", &self.rotation.is_some())
            .field("invariant_axes", &self.invariant_axes)
            .finish()
    }
}

impl ChartedMetric {
    pub fn new(name: impl Into<String>, domain: Domain, g: MetricFn) -> Self {
        ChartedMetric {
            name: name.into(),
            domain,
            g,
            dg: None,
            mode: DerivativeMode::FiniteDifference,
            step: DEFAULT_STEP,
            order: StencilOrder::Fourth,
            rotation: None,
            invariant_axes: Vec::new(),
            guard: None,
        }
    }

    /// Supplies analytic first derivatives and switches to using them.
    pub fn with_derivatives(mut self, dg: MetricDerivFn) -> Self {
        self.dg = Some(dg);
        self.mode = DerivativeMode::Analytic;
        self
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Result<Self> {
        if mode == DerivativeMode::Analytic && self.dg.is_none() {
            return Err(Error::BadParameters(format!(
                "metric '{}' has no analytic derivatives",
                self.name
            )));
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.step = h;
        self
    }

    pub fn with_stencil(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    pub fn stencil(&self) -> StencilOrder {
        self.order
    }

    pub fn with_frame_rotation(mut self, r: FrameRotationFn) -> Self {
        self.rotation = Some(r);
        self
    }

    /// Declares coordinate axes the metric does not depend on. Quadrature
    /// then evaluates integrands on one slice per remaining coordinate.
    pub fn with_invariant_axes(mut self, axes: Vec<usize>) -> Self {
        self.invariant_axes = axes;
        self
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = Some(guard);
        self
    }

    /// Guard band for sampling; defaults to five derivative steps.
    pub fn guard(&self) -> f64 {
        self.guard.unwrap_or(5.0 * self.step)
    }

    /// Uniform sample grid honouring the guard band.
    pub fn sample_grid(&self, counts: &[usize]) -> Result<Vec<Vec<f64>>> {
        self.domain.grid(counts, self.guard())
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.dg.is_some()
    }

    pub fn rotation(&self) -> Option<&FrameRotationFn> {
        self.rotation.as_ref()
    }

    pub fn invariant_axes(&self) -> &[usize] {
        &self.invariant_axes
    }

    pub fn g(&self, p: &[f64]) -> DMatrix<f64> {
        (self.g)(p)
    }

    /// `∂_c g` for every `c`, analytic or by central differences.
    pub fn dg(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        match (&self.dg, self.mode) {
            (Some(dg), DerivativeMode::Analytic) => dg(p),
            _ => self.dg_fd(p),
        }
    }

    pub fn dg_fd(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        (0..n)
            .map(|c| self.derivative(p, c, |q| Ok(self.g(q))).expect("metric evaluation is infallible"))
            .collect()
    }

    /// Central-difference derivative along axis `a` of a matrix-valued
    /// function, using the configured step and stencil.
    pub fn derivative<F>(&self, p: &[f64], a: usize, f: F) -> Result<DMatrix<f64>>
    where
        F: Fn(&[f64]) -> Result<DMatrix<f64>>,
    {
        let h = self.step;
        let mut q = p.to_vec();
        let mut acc: Option<DMatrix<f64>> = None;
        for &(o, w) in self.order.weights() {
            q[a] = p[a] + o * h;
            let plus = f(&q)?;
            q[a] = p[a] - o * h;
            let v = (plus - f(&q)?) * (w / h);
            acc = Some(match acc {
                Some(s) => s + v,
                None => v,
            });
        }
        Ok(acc.expect("stencils are non-empty"))
    }

    /// Scalar version of [`ChartedMetric::derivative`].
    pub fn derivative_scalar<F>(&self, p: &[f64], a: usize, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64>,
    {
        let h = self.step;
        let mut q = p.to_vec();
        let mut acc = 0.0;
        for &(o, w) in self.order.weights() {
            q[a] = p[a] + o * h;
            let plus = f(&q)?;
            q[a] = p[a] - o * h;
            acc += w * (plus - f(&q)?);
        }
        Ok(acc / h)
    }

    /// Analytic derivatives, when present.
    pub fn dg_analytic(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        self.dg.as_ref().map(|dg| dg(p))
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
}
