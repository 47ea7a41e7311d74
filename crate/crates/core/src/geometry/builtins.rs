//! Built-in metrics used by the suites and tests.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use super::metric::{ChartedMetric, Domain};
use crate::error::{Error, Result};
use crate::sympoly::sampling::stream_rng;

/// Guard band on polar angles of sphere charts.
pub const POLAR_GUARD: f64 = 0.2;

fn diag(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

fn zero_derivs(n: usize) -> Vec<DMatrix<f64>> {
    vec![DMatrix::zeros(n, n); n]
}

/// `δ_ab` on `[−1, 1]^n`.
pub fn euclidean(n: usize) -> ChartedMetric {
    let dom = Domain {
        lo: vec![-1.0; n],
        hi: vec![1.0; n],
        periodic: vec![false; n],
    };
    ChartedMetric::new(
        format!("euclidean-{n}"),
        dom,
        Arc::new(move |_| DMatrix::identity(n, n)),
    )
    .with_derivatives(Arc::new(move |_| zero_derivs(n)))
    .with_invariant_axes((0..n).collect())
}

/// `δ_ab` on the periodic box `[0, 2π)^n`.
pub fn flat_torus(n: usize) -> ChartedMetric {
    ChartedMetric::new(
        format!("flat-torus-{n}"),
        Domain::torus(n, TAU),
        Arc::new(move |_| DMatrix::identity(n, n)),
    )
    .with_derivatives(Arc::new(move |_| zero_derivs(n)))
    .with_invariant_axes((0..n).collect())
}

/// Unit sphere in polar coordinates `(θ, φ)`: `dθ² + sin²θ dφ²`.
pub fn round_s2() -> ChartedMetric {
    let dom = Domain {
        lo: vec![0.0, 0.0],
        hi: vec![PI, TAU],
        periodic: vec![false, true],
    };
    ChartedMetric::new(
        "round-s2",
        dom,
        Arc::new(|p| diag(&[1.0, p[0].sin().powi(2)])),
    )
    .with_derivatives(Arc::new(|p| {
        let s2 = (2.0 * p[0]).sin();
        vec![diag(&[0.0, s2]), DMatrix::zeros(2, 2)]
    }))
    .with_invariant_axes(vec![1])
    .with_guard(POLAR_GUARD)
}

/// Unit 3-sphere in hyperspherical coordinates `(ψ, θ, φ)`:
/// `dψ² + sin²ψ (dθ² + sin²θ dφ²)`.
pub fn round_s3() -> ChartedMetric {
    let dom = Domain {
        lo: vec![0.0, 0.0, 0.0],
        hi: vec![PI, PI, TAU],
        periodic: vec![false, false, true],
    };
    ChartedMetric::new(
        "round-s3",
        dom,
        Arc::new(|p| {
            let a = p[0].sin().powi(2);
            diag(&[1.0, a, a * p[1].sin().powi(2)])
        }),
    )
    .with_derivatives(Arc::new(|p| {
        let (s1, s2) = (p[0].sin(), p[1].sin());
        let d1 = (2.0 * p[0]).sin();
        let d2 = (2.0 * p[1]).sin();
        vec![
            diag(&[0.0, d1, d1 * s2 * s2]),
            diag(&[0.0, 0.0, s1 * s1 * d2]),
            DMatrix::zeros(3, 3),
        ]
    }))
    .with_invariant_axes(vec![2])
    .with_guard(POLAR_GUARD)
}

/// Warp functions of [`warped_torus3`] and their derivatives.
pub fn warp_f(x: f64) -> (f64, f64) {
    (1.5 + 0.5 * x.sin(), 0.5 * x.cos())
}

pub fn warp_h(x: f64) -> (f64, f64) {
    (1.3 + 0.4 * (2.0 * x).cos(), -0.8 * (2.0 * x).sin())
}

/// `dx1² + f(x1)² dx2² + h(x1)² dx3²` on `[0, 2π)³` with periodic `f`, `h`.
pub fn warped_torus3() -> ChartedMetric {
    ChartedMetric::new(
        "warped-torus-3",
        Domain::torus(3, TAU),
        Arc::new(|p| {
            let (f, _) = warp_f(p[0]);
            let (h, _) = warp_h(p[0]);
            diag(&[1.0, f * f, h * h])
        }),
    )
    .with_derivatives(Arc::new(|p| {
        let (f, df) = warp_f(p[0]);
        let (h, dh) = warp_h(p[0]);
        vec![
            diag(&[0.0, 2.0 * f * df, 2.0 * h * dh]),
            DMatrix::zeros(3, 3),
            DMatrix::zeros(3, 3),
        ]
    }))
    .with_invariant_axes(vec![1, 2])
}

/// Torus of revolution `du² + (R + cos u)² dv²`.
pub fn torus_of_revolution(big_r: f64) -> Result<ChartedMetric> {
    if !(big_r > 1.0) {
        return Err(Error::BadParameters(format!(
            "torus of revolution needs R > 1, got {big_r}"
        )));
    }
    Ok(ChartedMetric::new(
        "torus-of-revolution",
        Domain::torus(2, TAU),
        Arc::new(move |p| diag(&[1.0, (big_r + p[0].cos()).powi(2)])),
    )
    .with_derivatives(Arc::new(move |p| {
        let w = big_r + p[0].cos();
        vec![diag(&[0.0, -2.0 * w * p[0].sin()]), DMatrix::zeros(2, 2)]
    }))
    .with_invariant_axes(vec![1]))
}

/// One Fourier mode `amp · sin(k·x + phase)` of a perturbation entry.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Mode {
    k: [f64; 3],
    amp: f64,
    phase: f64,
}

/// Amplitude bound of each perturbation entry.
pub const PERTURBATION_AMPLITUDE: f64 = 0.1;
const MODES_PER_ENTRY: usize = 2;

/// `δ_ab + ε_ab(x)` on `[0, 2π)³` where each entry of the symmetric `ε` is a
/// sum of two random integer-wavevector sine modes with total amplitude at
/// most 0.1, so the metric is smooth, periodic and diagonally dominant.
pub fn perturbed_flat_torus3(seed: u64, index: u64) -> ChartedMetric {
    let mut rng = stream_rng(seed, index);
    let mut modes = vec![[Mode { k: [0.0; 3], amp: 0.0, phase: 0.0 }; MODES_PER_ENTRY]; 6];
    for entry in modes.iter_mut() {
        for m in entry.iter_mut() {
            let k = loop {
                let k = [
                    rng.gen_range(-1i32..=1) as f64,
                    rng.gen_range(-1i32..=1) as f64,
                    rng.gen_range(-1i32..=1) as f64,
                ];
                if k != [0.0; 3] {
                    break k;
                }
            };
            *m = Mode {
                k,
                amp: rng.gen_range(-1.0..1.0) * PERTURBATION_AMPLITUDE / MODES_PER_ENTRY as f64,
                phase: rng.gen_range(0.0..TAU),
            };
        }
    }
    let modes = Arc::new(modes);
    let slot = |a: usize, b: usize| -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        match (a, b) {
            (0, 0) => 0,
            (1, 1) => 1,
            (2, 2) => 2,
            (0, 1) => 3,
            (0, 2) => 4,
            _ => 5,
        }
    };
    let m1 = Arc::clone(&modes);
    let m2 = Arc::clone(&modes);
    ChartedMetric::new(
        format!("perturbed-torus-3-{seed}-{index}"),
        Domain::torus(3, TAU),
        Arc::new(move |p| {
            DMatrix::from_fn(3, 3, |a, b| {
                let base = if a == b { 1.0 } else { 0.0 };
                base + m1[slot(a, b)]
                    .iter()
                    .map(|m| m.amp * (m.k[0] * p[0] + m.k[1] * p[1] + m.k[2] * p[2] + m.phase).sin())
                    .sum::<f64>()
            })
        }),
    )
    .with_derivatives(Arc::new(move |p| {
        (0..3)
            .map(|c| {
                DMatrix::from_fn(3, 3, |a, b| {
                    m2[slot(a, b)]
                        .iter()
                        .map(|m| {
                            m.amp
                                * m.k[c]
                                * (m.k[0] * p[0] + m.k[1] * p[1] + m.k[2] * p[2] + m.phase).cos()
                        })
                        .sum::<f64>()
                })
            })
            .collect()
    }))
    .with_mode(super::metric::DerivativeMode::FiniteDifference)
    .expect("derivatives were supplied")
}

/// Names accepted by [`builtin_metric`].
pub const BUILTIN_METRICS: &[&str] = &[
    "euclidean-2",
    "euclidean-3",
    "euclidean-4",
    "round-s2",
    "round-s3",
    "flat-torus-2",
    "flat-torus-3",
    "flat-torus-4",
    "warped-torus-3",
    "torus-of-revolution",
    "perturbed-torus-3",
];

/// Looks up a built-in metric. `perturbed-torus-3` takes the seed from the
/// caller and uses stream `index`.
pub fn builtin_metric(name: &str, seed: u64, index: u64) -> Result<ChartedMetric> {
    Ok(match name {
        "euclidean-2" => euclidean(2),
        "euclidean-3" => euclidean(3),
        "euclidean-4" => euclidean(4),
        "round-s2" => round_s2(),
        "round-s3" => round_s3(),
        "flat-torus-2" => flat_torus(2),
        "flat-torus-3" => flat_torus(3),
        "flat-torus-4" => flat_torus(4),
        "warped-torus-3" => warped_torus3(),
        "torus-of-revolution" => torus_of_revolution(2.0)?,
        "perturbed-torus-3" => perturbed_flat_torus3(seed, index),
        other => {
            return Err(Error::Config(format!(
                "unknown metric '{other}'; known: {}",
                BUILTIN_METRICS.join(", ")
            )))
        }
    })
}
