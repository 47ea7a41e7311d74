//! The verification suites behind the command-line driver.
//!
//! [`run`] fails only for configuration problems (unknown fixtures, bad
//! dimensions, unparsable polynomials). Numerical failures at individual
//! samples are recorded as failing report rows instead, so a run always
//! produces a complete report.

use std::path::Path;

use rayon::prelude::*;

use crate::codazzi::{
    codazzi_residual, synthetic, triple_sum, verify_diagonal_connection, verify_eigen_derivatives,
    verify_gradient_formulas, SymmetricTensorField, CODAZZI_TOLERANCE,
};
use crate::config::{Suite, SuiteConfig};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{
    div_x, frame_connection, integrate_closed_all, scalar_curvature, verify_div_identity, ChartedMetric,
};
use crate::hypersurface::{gauss_scalar, isoparametric_check, shape_sample, Immersion, CONSTANCY_FACTOR};
use crate::polyfamily::{
    default_offsets, endpoint_blowup_scan, monic_from_ascending, roots_at, Endpoint, ShiftFamily,
    BLOWUP_THRESHOLD, BOUNDED_DRIFT,
};
use crate::report::{write_report_files, VerificationReport};
use crate::sympoly::sampling::SpectrumSampler;
use crate::sympoly::{
    coeff_b, coeff_c, inverse_pprime_scale, quad_g, quad_l, sum_form_disagreement, sum_inverse_pprime,
    verify_partial_fraction_identity, weight_u, weight_v, GradientMode, Spectrum,
};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const PARTIAL_FRACTION_TOLERANCE: f64 = 1e-10;
pub const SUM_INVERSE_TOLERANCE: f64 = 1e-9;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-9;
pub const EXACT_VALUE_TOLERANCE: f64 = 1e-12;
pub const DIV_IDENTITY_TOLERANCE: f64 = 1e-5;
pub const DIV_EXACT_TOLERANCE: f64 = 1e-6;
pub const INTEGRATED_TOLERANCE: f64 = 1e-6;
pub const EIGEN_IDENTITY_TOLERANCE: f64 = 1e-6;
pub const GRADIENT_TOLERANCE: f64 = 1e-5;
/// Size a violation must reach for a non-Codazzi fixture to count as rejected.
pub const VIOLATION_MARGIN: f64 = 0.01;
pub const GAUSS_CROSS_TOLERANCE: f64 = 1e-4;
pub const SCALAR_FLOOR: f64 = -1e-6;
pub const SPHERE_DEFECT_TOLERANCE: f64 = 1e-12;
pub const MEAN_CURVATURE_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_DIV_METRICS: &[&str] = &["round-s2", "flat-torus-2", "flat-torus-3", "flat-torus-4", "warped-torus-3"];
pub const DEFAULT_PERTURBED_METRICS: usize = 20;
pub const DEFAULT_INTEGRATED_METRICS: &[&str] = &["torus-of-revolution", "warped-torus-3"];
pub const DEFAULT_TENSORS: &[&str] = &["synthetic-sigma-n", "synthetic-sigma-nm1"];
pub const DEFAULT_IMMERSIONS: &[&str] = &[
    "clifford-minimal",
    "clifford-1-1",
    "clifford-1-2",
    "clifford-2-1",
    "clifford-2-2",
    "clifford-1-3",
    "equatorial-s2",
    "equatorial-s3",
    "small-s2",
];
pub const DEFAULT_Q: &str = "x^3-3x";

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub seed: u64,
    pub reports: Vec<VerificationReport>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(VerificationReport::passed)
    }

    pub fn failed_reports(&self) -> impl Iterator<Item = &VerificationReport> {
        self.reports.iter().filter(|r| !r.passed())
    }

    /// `<dir>/report.jsonl` and `<dir>/summary.csv`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_report_files(dir, self.suite.name(), self.seed, &self.reports)
    }
}

pub fn run(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut reports = match config.suite {
        Suite::DivIdentity => div_identity(config)?,
        Suite::CodazziLemmas => codazzi_lemmas(config)?,
        Suite::SympolyIdentities => sympoly_identities(config)?,
        Suite::PolyfamilyScan => polyfamily_scan(config)?,
        Suite::HypersurfaceIsoparametric => hypersurface_isoparametric(config)?,
        Suite::IntegratedTorus => integrated_torus(config)?,
    };
    for r in &mut reports {
        r.set_meta("seed", &config.seed.to_string());
    }
    Ok(SuiteOutcome {
        suite: config.suite,
        seed: config.seed,
        reports,
    })
}

/// A report holding one failed row, for a fixture whose check could not run.
fn error_report(identity: &str, fixture: &str, tol: f64, err: &Error) -> VerificationReport {
    let mut r = VerificationReport::new(identity, fixture, tol);
    r.push_error(&[], err);
    r
}

fn default_grid(n: usize) -> usize {
    match n {
        0..=2 => 50,
        3 => 8,
        _ => 5,
    }
}

fn div_metrics(config: &SuiteConfig) -> Result<Vec<ChartedMetric>> {
    match &config.metric {
        Some(name) if name == "perturbed-torus-3" => perturbed(config),
        Some(name) => Ok(vec![config.resolve_metric(name, 0)?]),
        None => {
            let mut out: Vec<ChartedMetric> = DEFAULT_DIV_METRICS
                .iter()
                .map(|m| config.resolve_metric(m, 0))
                .collect::<Result<_>>()?;
            out.extend(perturbed(config)?);
            Ok(out)
        }
    }
}

fn perturbed(config: &SuiteConfig) -> Result<Vec<ChartedMetric>> {
    let count = config.samples.unwrap_or(DEFAULT_PERTURBED_METRICS);
    (0..count as u64)
        .map(|k| config.resolve_metric("perturbed-torus-3", k))
        .collect()
}

/// Gaussian curvature of two-dimensional fixtures where it is known in
/// closed form; there `div X` must equal it.
fn known_gauss_curvature(name: &str) -> Option<f64> {
    match name {
        "round-s2" => Some(1.0),
        "flat-torus-2" | "euclidean-2" => Some(0.0),
        _ => None,
    }
}

fn div_identity(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = config.tol.unwrap_or(DIV_IDENTITY_TOLERANCE);
    let mut reports = Vec::new();
    for metric in div_metrics(config)? {
        let counts = config.grid_for(metric.dim(), default_grid(metric.dim()))?;
        let points = metric.sample_grid(&counts).map_err(|e| Error::Config(e.to_string()))?;
        reports.push(verify_div_identity(&metric, &points, tol));
        if let Some(k) = known_gauss_curvature(&metric.name).filter(|_| metric.dim() == 2) {
            let values: Vec<Result<f64>> = points.par_iter().map(|p| div_x(&metric, p)).collect();
            let mut r = VerificationReport::new("div-x-gauss-curvature", &metric.name, DIV_EXACT_TOLERANCE);
            r.set_meta("expected", &k.to_string());
            for (p, v) in points.iter().zip(values) {
                r.push_result(p, v.map(|d| (d - k).abs()));
            }
            reports.push(r);
        }
    }
    Ok(reports)
}

fn integrated_torus(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = config.tol.unwrap_or(INTEGRATED_TOLERANCE);
    let names: Vec<String> = match &config.metric {
        Some(m) => vec![m.clone()],
        None => DEFAULT_INTEGRATED_METRICS.iter().map(|s| s.to_string()).collect(),
    };
    let mut reports = Vec::new();
    for name in names {
        let metric = config.resolve_metric(&name, 0)?;
        metric.domain.is_closed().map_err(|e| Error::Config(format!("{name}: {e}")))?;
        let counts = config.grid_for(metric.dim(), 100)?;
        let mut identity = VerificationReport::new("integrated-identity", &metric.name, tol);
        let mut divergence = VerificationReport::new("integrated-div-x", &metric.name, tol);
        match integrate_closed_all(&metric, &counts) {
            Ok(i) => {
                let grid: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
                identity.push(&grid, (i.half_scalar - i.psi).abs() / i.volume);
                divergence.push(&grid, i.div_x.abs() / i.volume);
                for r in [&mut identity, &mut divergence] {
                    r.set_meta("volume", &format!("{:e}", i.volume));
                    r.set_meta("half_scalar", &format!("{:e}", i.half_scalar));
                    r.set_meta("psi", &format!("{:e}", i.psi));
                    r.set_meta("div_x", &format!("{:e}", i.div_x));
                }
            }
            Err(e) => {
                identity.push_error(&[], &e);
                divergence.push_error(&[], &e);
            }
        }
        reports.push(identity);
        reports.push(divergence);
    }
    Ok(reports)
}

fn gradient_mode(name: &str) -> Option<GradientMode> {
    match name {
        "synthetic-sigma-n" => Some(GradientMode::SigmaNVaries),
        "synthetic-sigma-nm1" => Some(GradientMode::SigmaNm1Varies),
        _ => None,
    }
}

/// Grid for a tensor field. The synthetic fields vary along `x1` only.
fn tensor_points(config: &SuiteConfig, name: &str, field: &SymmetricTensorField) -> Result<Vec<Vec<f64>>> {
    let n = field.dim();
    let counts = match (&config.grid, gradient_mode(name)) {
        (Some(_), _) => config.grid_for(n, 0)?,
        (None, Some(_)) => (0..n).map(|a| if a == 0 { 9 } else { 1 }).collect(),
        (None, None) => vec![if n <= 3 { 5 } else { 3 }; n],
    };
    field.metric().sample_grid(&counts).map_err(|e| Error::Config(e.to_string()))
}

fn codazzi_lemmas(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let tol = config.tol.unwrap_or(EIGEN_IDENTITY_TOLERANCE);
    let names: Vec<String> = match &config.tensor {
        Some(t) => vec![t.clone()],
        None => DEFAULT_TENSORS.iter().map(|s| s.to_string()).collect(),
    };
    let mut reports = Vec::new();
    for name in &names {
        let field = config.resolve_tensor(name)?;
        let points = tensor_points(config, name, &field)?;
        match verify_eigen_derivatives(&field, &points, tol) {
            Ok(r) => reports.extend(r),
            Err(e) => reports.push(error_report("eigen-derivatives", &field.name, tol, &e)),
        }
        match verify_diagonal_connection(&field, &points, CODAZZI_TOLERANCE, tol) {
            Ok(r) => reports.extend(r),
            Err(e) => reports.push(error_report("diagonal-connection", &field.name, tol, &e)),
        }
        if let Some(mode) = gradient_mode(name) {
            let gtol = config.tol.unwrap_or(GRADIENT_TOLERANCE);
            match verify_gradient_formulas(&field, &points, mode, gtol) {
                Ok(r) => reports.extend(r),
                Err(e) => reports.push(error_report("gradient-formulas", &field.name, gtol, &e)),
            }
        }
    }
    if config.tensor.is_none() {
        reports.extend(rejections(config)?);
    }
    Ok(reports)
}

/// Random interior points of `[-0.9, 0.9]^n`, one stream per point.
fn random_points(seed: u64, n: usize, count: usize) -> Vec<Vec<f64>> {
    use rand::Rng;
    (0..count as u64)
        .map(|k| {
            let mut rng = crate::sympoly::sampling::stream_rng(seed, k);
            (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect()
        })
        .collect()
}

/// The non-Codazzi fixtures must be rejected by a clear margin.
fn rejections(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let count = 16;
    let swapped = synthetic::builtin_field("swapped-diagonal", config.n.unwrap_or(3))?;
    let pts = random_points(config.seed, swapped.dim(), count);
    let mut rejected = VerificationReport::at_least("non-codazzi-rejection", &swapped.name, VIOLATION_MARGIN);
    for p in &pts {
        match verify_diagonal_connection(&swapped, std::slice::from_ref(p), CODAZZI_TOLERANCE, EIGEN_IDENTITY_TOLERANCE) {
            Err(Error::NotCodazzi { residual, .. }) => rejected.push(p, residual),
            Err(e) => rejected.push_error(p, &e),
            Ok(_) => rejected.push(p, 0.0),
        }
    }

    let twisted = synthetic::builtin_field("twisted-frame", 3)?;
    let pts = random_points(config.seed.wrapping_add(1), twisted.dim(), count);
    let mut triple = VerificationReport::at_least("triple-sum-violation", &twisted.name, VIOLATION_MARGIN);
    let mut codazzi = VerificationReport::at_least("codazzi-violation", &twisted.name, VIOLATION_MARGIN);
    for p in &pts {
        triple.push_result(p, triple_sum(&twisted, p).map(f64::abs));
        codazzi.push_result(
            p,
            frame_connection(twisted.metric(), p).and_then(|f| codazzi_residual(&twisted, &f)),
        );
    }
    Ok(vec![rejected, triple, codazzi])
}

fn sympoly_identities(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let sampler = SpectrumSampler::new(config.seed);
    let fixture = match config.n {
        Some(n) => format!("random-n{n}"),
        None => "random-n2-8".to_string(),
    };
    let n_or = |lo: usize, span: usize, i: usize| config.n.unwrap_or(lo + i % span);
    let tol = |default: f64| config.tol.unwrap_or(default);

    // distinct spectra, n = 2..8 unless fixed
    let distinct: Vec<Spectrum> = (0..samples)
        .into_par_iter()
        .map(|i| sampler.distinct(n_or(2, 7, i), i as u64))
        .collect();
    let rows: Vec<Result<[f64; 4]>> = distinct
        .par_iter()
        .map(|s| {
            let pf = (0..s.len())
                .map(|i| verify_partial_fraction_identity(s, i))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let inv = sum_inverse_pprime(s)?.abs() / inverse_pprime_scale(s);
            let v = max_of(sum_form_disagreement(&coeff_c(s)?, &weight_v(s)?));
            let u = max_of(sum_form_disagreement(&coeff_b(s, false)?, &weight_u(s, false)?));
            Ok([pf, inv, v, u])
        })
        .collect();
    let mut pf = VerificationReport::new("partial-fraction", &fixture, tol(PARTIAL_FRACTION_TOLERANCE));
    let mut inv = VerificationReport::new("sum-inverse-pprime", &fixture, tol(SUM_INVERSE_TOLERANCE));
    let mut v = VerificationReport::new("v-closed-form", &fixture, tol(CLOSED_FORM_TOLERANCE));
    let mut u = VerificationReport::new("u-closed-form", &fixture, tol(CLOSED_FORM_TOLERANCE));
    for (s, row) in distinct.iter().zip(rows) {
        match row {
            Ok(vals) => {
                for (r, x) in [&mut pf, &mut inv, &mut v, &mut u].into_iter().zip(vals) {
                    r.push(s.values(), x);
                }
            }
            Err(e) => {
                for r in [&mut pf, &mut inv, &mut v, &mut u] {
                    r.push_error(s.values(), &e);
                }
            }
        }
    }
    let mut reports = vec![pf, inv, v, u];

    // L(r) < 0 on n ≥ 3
    if config.n.map_or(true, |n| n >= 3) {
        let offset = 1u64 << 32;
        let spectra: Vec<Spectrum> = (0..samples)
            .into_par_iter()
            .map(|i| sampler.distinct(n_or(3, 6, i), offset + i as u64))
            .collect();
        let values: Vec<Result<f64>> = spectra
            .par_iter()
            .map(|s| {
                (0..s.len())
                    .map(|r| quad_l(s, r))
                    .collect::<Result<Vec<f64>>>()
                    .map(|l| l.into_iter().fold(f64::NEG_INFINITY, f64::max))
            })
            .collect();
        let mut neg = VerificationReport::new("quad-l-negative", &fixture, 0.0);
        neg.set_meta("residual", "max_r L(r)");
        for (s, x) in spectra.iter().zip(values) {
            neg.push_result(s.values(), x);
        }
        reports.push(neg);
        let s = Spectrum::new(vec![1.0, 2.0, 3.0])?;
        let mut exact = VerificationReport::new("quad-l-exact", "spectrum-1-2-3", EXACT_VALUE_TOLERANCE);
        exact.set_meta("expected", "-0.5");
        exact.push_result(s.values(), quad_l(&s, 0).map(|l| (l + 0.5).abs()));
        reports.push(exact);
    }

    // G(k) < 0 on same-sign spectra with an appended zero, n ≥ 4
    if config.n.map_or(true, |n| n >= 4) {
        let zero_fixture = match config.n {
            Some(n) => format!("same-sign-zero-n{n}"),
            None => "same-sign-zero-n4-8".to_string(),
        };
        let offset = 2u64 << 32;
        let spectra: Vec<Spectrum> = (0..samples)
            .into_par_iter()
            .map(|i| sampler.same_sign_with_zero(n_or(4, 5, i), offset + i as u64))
            .collect();
        let rows: Vec<Result<[f64; 2]>> = spectra
            .par_iter()
            .map(|s| {
                let g = quad_g(s, true)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
                let u = max_of(sum_form_disagreement(&coeff_b(s, true)?, &weight_u(s, true)?));
                Ok([g, u])
            })
            .collect();
        let mut neg = VerificationReport::new("quad-g-negative", &zero_fixture, 0.0);
        neg.set_meta("residual", "max_k G(k)");
        let mut u = VerificationReport::new("u-closed-form", &zero_fixture, tol(CLOSED_FORM_TOLERANCE));
        for (s, row) in spectra.iter().zip(rows) {
            match row {
                Ok([g, d]) => {
                    neg.push(s.values(), g);
                    u.push(s.values(), d);
                }
                Err(e) => {
                    neg.push_error(s.values(), &e);
                    u.push_error(s.values(), &e);
                }
            }
        }
        reports.push(neg);
        reports.push(u);
        let s = Spectrum::with_trailing_zero(&[1.0, 2.0, 3.0])?;
        let mut exact = VerificationReport::new("quad-g-exact", "spectrum-1-2-3-0", EXACT_VALUE_TOLERANCE);
        exact.set_meta("expected", "-0.5");
        exact.push_result(s.values(), quad_g(&s, true).map(|g| (g[3] + 0.5).abs()));
        reports.push(exact);
    }
    Ok(reports)
}

fn max_of(v: Vec<f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn polyfamily_scan(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let text = config.q.as_deref().unwrap_or(DEFAULT_Q);
    let q = Expr::parse(text)
        .and_then(|e| e.polynomial_coefficients())
        .map_err(|e| Error::Config(format!("q: {e}")))
        .and_then(|c| monic_from_ascending(&c).map_err(|e| Error::Config(format!("q: {e}"))))?;
    let family = ShiftFamily::admissible(q).map_err(|e| Error::Config(format!("q = {text}: {e}")))?;
    let (lo, hi) = family.t_range();
    let fixture = format!("q={text}");
    let endpoints = match config.endpoint {
        Some(e) => vec![e],
        None => vec![Endpoint::Lower, Endpoint::Upper],
    };
    let offsets = default_offsets();
    let mut reports = Vec::new();
    for endpoint in endpoints {
        let t = match endpoint {
            Endpoint::Lower => lo,
            Endpoint::Upper => hi,
        };
        let tag = endpoint.name();
        let mut merge = VerificationReport::at_least(format!("endpoint-merge-{tag}"), &fixture, 2.0);
        let mut blowup = VerificationReport::at_least(format!("blowup-{tag}"), &fixture, BLOWUP_THRESHOLD);
        let mut drift = VerificationReport::new(format!("bounded-drift-{tag}"), &fixture, BOUNDED_DRIFT);
        let mut monotone = VerificationReport::at_least(format!("blowup-monotone-{tag}"), &fixture, 1.0);
        for r in [&mut merge, &mut blowup, &mut drift, &mut monotone] {
            r.set_meta("t_range", &format!("[{lo}, {hi}]"));
            r.set_meta("endpoint", &t.to_string());
        }
        match roots_at(&family, t) {
            Ok(roots) => {
                merge.set_meta("roots", &format!("{:?}", roots.spectrum.values()));
                merge.push(&[t], roots.max_multiplicity() as f64);
            }
            Err(e) => merge.push_error(&[t], &e),
        }
        match endpoint_blowup_scan(&family, endpoint, &offsets) {
            Ok(path) => {
                let last = path.ratios.len() - 1;
                let t_last = path.t_samples[last];
                for &i in &path.flagged {
                    blowup.push(&[t_last, i as f64], endpoint.expected_sign() * path.ratios[last][i]);
                }
                if path.flagged.is_empty() {
                    blowup.push_error(&[t_last], &Error::BadParameters("no merging roots flagged".into()));
                }
                drift.push(&[t_last], path.verdict.bounded_drift);
                monotone.push(&[t_last], if path.verdict.monotone { 1.0 } else { 0.0 });
            }
            Err(e) => {
                for r in [&mut blowup, &mut drift, &mut monotone] {
                    r.push_error(&[t], &e);
                }
            }
        }
        reports.extend([merge, blowup, drift, monotone]);
    }
    Ok(reports)
}

fn immersion_points(config: &SuiteConfig, imm: &Immersion) -> Result<Vec<Vec<f64>>> {
    let counts = config.grid_for(imm.dim(), 6)?;
    imm.sample_grid(&counts).map_err(|e| Error::Config(e.to_string()))
}

fn hypersurface_isoparametric(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let names: Vec<String> = match &config.immersion {
        Some(i) => vec![i.clone()],
        None => DEFAULT_IMMERSIONS.iter().map(|s| s.to_string()).collect(),
    };
    let mut reports = Vec::new();
    for name in names {
        let imm = config.resolve_immersion(&name)?;
        let points = immersion_points(config, &imm)?;
        let mut sphere = VerificationReport::new("sphere-defect", &imm.name, SPHERE_DEFECT_TOLERANCE);
        for p in &points {
            sphere.push(p, (imm.f(p).norm() - 1.0).abs());
        }
        reports.push(sphere);

        let codazzi_tol = config.tol.unwrap_or(CODAZZI_TOLERANCE);
        match isoparametric_check(&imm, &points, codazzi_tol) {
            Ok(iso) => {
                let deviation = iso.deviation();
                let mut constancy = iso.constancy;
                constancy.set_meta("mean", &format!("{:?}", iso.mean));
                constancy.set_meta("max_deviation", &format!("{deviation:e}"));
                reports.push(constancy);
                reports.push(iso.codazzi);
            }
            Err(e) => {
                reports.push(error_report("mean-curvature-constancy", &imm.name, CONSTANCY_FACTOR, &e));
            }
        }

        let metric = imm.induced_metric();
        let rows: Vec<Result<[f64; 3]>> = points
            .par_iter()
            .map(|p| {
                let s = shape_sample(&imm, p)?;
                let extrinsic = gauss_scalar(&s);
                let intrinsic = scalar_curvature(&metric, p)?.scalar;
                Ok([extrinsic, (extrinsic - intrinsic).abs(), s.mean_curvature_residual()])
            })
            .collect();
        let mut floor = VerificationReport::at_least("scalar-nonnegative", &imm.name, SCALAR_FLOOR);
        let mut cross = VerificationReport::new("gauss-intrinsic", &imm.name, GAUSS_CROSS_TOLERANCE);
        let mut mean = VerificationReport::new("mean-curvature-identity", &imm.name, MEAN_CURVATURE_TOLERANCE);
        for (p, row) in points.iter().zip(rows) {
            match row {
                Ok([s, c, m]) => {
                    floor.push(p, s);
                    cross.push(p, c);
                    mean.push(p, m);
                }
                Err(e) => {
                    for r in [&mut floor, &mut cross, &mut mean] {
                        r.push_error(p, &e);
                    }
                }
            }
        }
        reports.extend([floor, cross, mean]);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;

    fn config(suite: &str, o: Overrides) -> SuiteConfig {
        SuiteConfig::layered(Some(suite), &o, None).unwrap()
    }

    #[test]
    fn small_sympoly_run_passes_and_is_deterministic() {
        let o = Overrides {
            samples: Some(200),
            ..Default::default()
        };
        let a = run(&config("sympoly-identities", o.clone())).unwrap();
        let b = run(&config("sympoly-identities", o)).unwrap();
        assert!(a.passed());
        assert_eq!(a, b);
        assert!(a.reports.iter().all(|r| r.metadata["seed"] == "7"));
    }

    #[test]
    fn fixed_n_skips_inapplicable_sweeps() {
        let o = Overrides {
            samples: Some(50),
            n: Some(3),
            ..Default::default()
        };
        let out = run(&config("sympoly-identities", o)).unwrap();
        assert!(out.reports.iter().any(|r| r.identity == "quad-l-negative"));
        assert!(!out.reports.iter().any(|r| r.identity == "quad-g-negative"));
    }

    #[test]
    fn polyfamily_default_cubic() {
        let out = run(&config("polyfamily-scan", Overrides::default())).unwrap();
        assert!(out.passed(), "{:?}", out.failed_reports().map(|r| &r.identity).collect::<Vec<_>>());
        assert_eq!(out.reports.len(), 8);
    }

    #[test]
    fn unknown_fixture_is_a_config_error() {
        let o = Overrides {
            metric: Some("nowhere".into()),
            ..Default::default()
        };
        assert!(matches!(run(&config("div-identity", o)), Err(Error::Config(_))));
        let o = Overrides {
            q: Some("2x^2 + 1".into()),
            ..Default::default()
        };
        assert!(matches!(run(&config("polyfamily-scan", o)), Err(Error::Config(_))));
    }

    #[test]
    fn perturbed_torus_fails_the_isoparametric_suite() {
        let o = Overrides {
            immersion: Some("perturbed-clifford".into()),
            grid: Some("8".into()),
            ..Default::default()
        };
        let out = run(&config("hypersurface-isoparametric", o)).unwrap();
        assert!(!out.passed());
        let failed: Vec<&str> = out.failed_reports().map(|r| r.identity.as_str()).collect();
        assert!(failed.contains(&"mean-curvature-constancy"), "{failed:?}");
    }
}
