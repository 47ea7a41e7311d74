use rayon::prelude::*;

use super::connection::{frame_connection, FramePointData};
use super::curvature::{curvature_in_frame, CurvatureSample};
use super::metric::{cartesian, ChartedMetric};
use crate::error::{Error, Result};
use crate::report::VerificationReport;

/// `X = Σ_i ∇_{e_i} e_i` in frame and coordinate components.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldX {
    pub frame: Vec<f64>,
    pub coords: Vec<f64>,
}

pub fn field_x(metric: &ChartedMetric, p: &[f64]) -> Result<FieldX> {
    let data = frame_connection(metric, p)?;
    Ok(FieldX {
        frame: data.x_frame(),
        coords: data.x_coords(),
    })
}

/// `div X = (1/√det g) ∂_a(√det g X^a)` with central differences of the
/// assembled coordinate field.
pub fn div_x(metric: &ChartedMetric, p: &[f64]) -> Result<f64> {
    metric.check_point(p)?;
    let mut total = 0.0;
    for a in 0..metric.dim() {
        total += metric.derivative_scalar(p, a, |q| density_component(metric, q, a))?;
    }
    Ok(total / volume_density(metric, p))
}

fn density_component(metric: &ChartedMetric, q: &[f64], a: usize) -> Result<f64> {
    let data = frame_connection(metric, q)?;
    Ok(volume_density(metric, q) * data.x_coords()[a])
}

/// `√det g`.
pub fn volume_density(metric: &ChartedMetric, p: &[f64]) -> f64 {
    metric.g(p).determinant().max(0.0).sqrt()
}

pub fn psi(metric: &ChartedMetric, p: &[f64]) -> Result<f64> {
    Ok(frame_connection(metric, p)?.psi())
}

/// Everything the divergence identity needs at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySample {
    pub frame: FramePointData,
    pub curvature: CurvatureSample,
    pub div_x: f64,
    pub psi: f64,
}

impl IdentitySample {
    pub fn half_scalar(&self) -> f64 {
        0.5 * self.curvature.scalar
    }

    /// `|div X − (S/2 − Ψ)|`.
    pub fn residual(&self) -> f64 {
        (self.div_x - (self.half_scalar() - self.psi)).abs()
    }
}

pub fn identity_sample(metric: &ChartedMetric, p: &[f64]) -> Result<IdentitySample> {
    let frame = frame_connection(metric, p)?;
    let curvature = curvature_in_frame(metric, p, &frame.frame)?;
    let div_x = div_x(metric, p)?;
    let psi = frame.psi();
    Ok(IdentitySample {
        frame,
        curvature,
        div_x,
        psi,
    })
}

/// Residual `|div X − (S/2 − Ψ)|` at every point.
pub fn verify_div_identity(
    metric: &ChartedMetric,
    points: &[Vec<f64>],
    tolerance: f64,
) -> VerificationReport {
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|p| identity_sample(metric, p).map(|s| s.residual()))
        .collect();
    let mut report = VerificationReport::new("div-identity", &metric.name, tolerance);
    describe(&mut report, metric);
    for (p, r) in points.iter().zip(results) {
        report.push_result(p, r);
    }
    report
}

pub(crate) fn describe(report: &mut VerificationReport, metric: &ChartedMetric) {
    report.set_meta("metric", &metric.name);
    report.set_meta("frame", if metric.rotation().is_some() { "gram-schmidt-rotated" } else { "gram-schmidt" });
    report.set_meta("derivative_mode", &format!("{:?}", metric.mode()));
    report.set_meta("step", &format!("{:e}", metric.step()));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    HalfScalar,
    Psi,
    DivX,
    Volume,
}

/// Integrals over a closed (fully periodic) chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedIntegrals {
    pub volume: f64,
    pub half_scalar: f64,
    pub psi: f64,
    pub div_x: f64,
    /// `∫ (|S|/2 + |Ψ| + 1)`, the scale for judging `∫(S/2 − Ψ)`.
    pub magnitude: f64,
    /// `∫ |div X|`.
    pub div_magnitude: f64,
}

impl ClosedIntegrals {
    pub fn get(&self, which: Integrand) -> f64 {
        match which {
            Integrand::HalfScalar => self.half_scalar,
            Integrand::Psi => self.psi,
            Integrand::DivX => self.div_x,
            Integrand::Volume => self.volume,
        }
    }
}

/// Periodic trapezoidal quadrature with the Riemannian volume element on a
/// `counts[0] × counts[1] × ⋯` grid. Axes declared invariant on the metric
/// are collapsed to one node and weighted by their full period.
pub fn integrate_closed_all(metric: &ChartedMetric, counts: &[usize]) -> Result<ClosedIntegrals> {
    let dom = &metric.domain;
    dom.is_closed()?;
    if counts.len() != metric.dim() {
        return Err(Error::DimensionMismatch {
            expected: metric.dim(),
            got: counts.len(),
        });
    }
    let mut axes = Vec::with_capacity(counts.len());
    let mut weight = 1.0;
    for (a, &m) in counts.iter().enumerate() {
        if m == 0 {
            return Err(Error::BadParameters("grid axis with zero points".into()));
        }
        if metric.invariant_axes().contains(&a) {
            axes.push(vec![dom.lo[a]]);
            weight *= dom.extent(a);
        } else {
            let step = dom.extent(a) / m as f64;
            axes.push((0..m).map(|k| dom.lo[a] + k as f64 * step).collect());
            weight *= step;
        }
    }
    let points = cartesian(&axes);
    let per_point: Vec<[f64; 6]> = points
        .par_iter()
        .map(|p| {
            let s = identity_sample(metric, p)?;
            let w = volume_density(metric, p);
            Ok([
                w,
                w * s.half_scalar(),
                w * s.psi,
                w * s.div_x,
                w * (s.half_scalar().abs() + s.psi.abs() + 1.0),
                w * s.div_x.abs(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut acc = [0.0; 6];
    for v in &per_point {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    Ok(ClosedIntegrals {
        volume: weight * acc[0],
        half_scalar: weight * acc[1],
        psi: weight * acc[2],
        div_x: weight * acc[3],
        magnitude: weight * acc[4],
        div_magnitude: weight * acc[5],
    })
}

pub fn integrate_closed(metric: &ChartedMetric, integrand: Integrand, counts: &[usize]) -> Result<f64> {
    Ok(integrate_closed_all(metric, counts)?.get(integrand))
}
