//! Hand-built tensor fields with known Codazzi behaviour.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::field::SymmetricTensorField;
use crate::error::{Error, Result};
use crate::geometry::builtins::euclidean;
use crate::geometry::{ChartedMetric, Domain};
use crate::polyfamily::{monic_from_ascending, roots_at, ShiftFamily};
use crate::sympoly::{GradientMode, MonicPolynomial, Spectrum};

const QUADRATURE_NODES: usize = 24;
const CHEBYSHEV_NODES: usize = 40;
/// Relative padding of the interpolation interval beyond the strip.
const PADDING: f64 = 0.02;

/// Chebyshev interpolant of a smooth function on `[a, b]`.
#[derive(Debug, Clone)]
struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    fn fit(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> Self {
        let theta = |j: usize| std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
        let values: Vec<f64> = (0..m)
            .map(|j| f(0.5 * (a + b) + 0.5 * (b - a) * theta(j).cos()))
            .collect();
        let coeffs = (0..m)
            .map(|k| {
                let s: f64 = values.iter().enumerate().map(|(j, v)| v * (k as f64 * theta(j)).cos()).sum();
                let c = 2.0 * s / m as f64;
                if k == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Chebyshev { a, b, coeffs }
    }

    fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.coeffs[0]
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Golub–Welsch).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// A diagonal Codazzi field whose eigenvalues are the roots of `Q(λ) + t`
/// (optionally with an extra constant zero eigenvalue), where `t = x1`.
///
/// The field lives on the warped strip `dx1² + Σ_{i≥2} f_i(x1)² dx_i²` with
/// `x1 ∈ [t0, t1]` and the other coordinates periodic. One eigenvalue `μ`
/// belongs to `∂_1`, the rest to the other axes, and
/// `(ln f_i)' = λ_i' / (μ − λ_i)`, which is exactly what makes `∇a` totally
/// symmetric. Every symmetric function except the one carrying `t` stays
/// constant.
#[derive(Debug, Clone)]
pub struct SyntheticFamily {
    pub family: ShiftFamily,
    pub append_zero: bool,
    /// Position in the ascending spectrum of the eigenvalue along `∂_1`.
    pub axis_root: usize,
}

impl SyntheticFamily {
    pub fn new(q: MonicPolynomial, t_range: (f64, f64), append_zero: bool, axis_root: usize) -> Result<Self> {
        let family = ShiftFamily::new(q, t_range)?;
        let s = SyntheticFamily {
            family,
            append_zero,
            axis_root,
        };
        if axis_root >= s.dim() {
            return Err(Error::BadParameters(format!(
                "axis root {axis_root} out of range for dimension {}",
                s.dim()
            )));
        }
        let (lo, hi) = s.padded_range();
        for k in 0..=16 {
            let t = lo + (hi - lo) * k as f64 / 16.0;
            let spec = s.spectrum(t)?;
            spec.require_distinct()?;
            if append_zero && spec.values().iter().filter(|&&v| v == 0.0).count() != 1 {
                return Err(Error::BadParameters("a root of Q + t vanishes on the range".into()));
            }
        }
        Ok(s)
    }

    /// `Q = x⁴ − 2x²`, `t ∈ [0.3, 0.7]`: `σ_1, σ_2, σ_3` constant, `σ_4 = t`.
    pub fn sigma_n_example() -> Self {
        let q = monic_from_ascending(&[0.0, 0.0, -2.0, 0.0, 1.0]).expect("monic");
        SyntheticFamily::new(q, (0.3, 0.7), false, 0).expect("distinct roots on the range")
    }

    /// `Q = x³ − 3x`, `t ∈ [0.5, 1.5]` with a zero appended: `σ_1, σ_2, σ_4`
    /// constant, `σ_3 = −t`.
    pub fn sigma_nm1_example() -> Self {
        let q = monic_from_ascending(&[0.0, -3.0, 0.0, 1.0]).expect("monic");
        SyntheticFamily::new(q, (0.5, 1.5), true, 0).expect("distinct nonzero roots on the range")
    }

    pub fn dim(&self) -> usize {
        self.family.q().degree() + usize::from(self.append_zero)
    }

    pub fn mode(&self) -> GradientMode {
        if self.append_zero {
            GradientMode::SigmaNm1Varies
        } else {
            GradientMode::SigmaNVaries
        }
    }

    fn padded_range(&self) -> (f64, f64) {
        let (t0, t1) = self.family.t_range();
        let pad = PADDING * (t1 - t0);
        (t0 - pad, t1 + pad)
    }

    /// Ascending eigenvalues at `t`.
    pub fn spectrum(&self, t: f64) -> Result<Spectrum> {
        let roots = roots_at(&self.family, t)?;
        let mut values = roots.spectrum.values().to_vec();
        if self.append_zero {
            values.push(0.0);
        }
        Spectrum::new(values)
    }

    /// `dλ_i/dt`: `−1/P'(λ_i)` for a root of `Q + t`, zero for the appended zero.
    fn rates(&self, spec: &Spectrum) -> Vec<f64> {
        let dq = self.family.q().derivative_coefficients();
        spec.values()
            .iter()
            .map(|&l| {
                if self.append_zero && l == 0.0 {
                    0.0
                } else {
                    -1.0 / dq.iter().fold(0.0, |acc, c| acc * l + c)
                }
            })
            .collect()
    }

    /// Eigenvalue order along the coordinate axes.
    fn axis_order(&self) -> Vec<usize> {
        let n = self.dim();
        std::iter::once(self.axis_root)
            .chain((0..n).filter(|&i| i != self.axis_root))
            .collect()
    }

    /// `(ln f_i)'` per axis (zero for axis 0).
    fn log_rates(&self, t: f64) -> Vec<f64> {
        let spec = self.spectrum(t).expect("validated range");
        let rates = self.rates(&spec);
        let l = spec.values();
        let mu = l[self.axis_root];
        self.axis_order()
            .iter()
            .enumerate()
            .map(|(axis, &i)| if axis == 0 { 0.0 } else { rates[i] / (mu - l[i]) })
            .collect()
    }

    /// `ln f_i(x1) = ∫_{t0}^{x1} (ln f_i)'` by Gauss–Legendre quadrature.
    fn log_f(&self, x1: f64, nodes: &(Vec<f64>, Vec<f64>)) -> Vec<f64> {
        let t0 = self.family.t_range().0;
        let half = 0.5 * (x1 - t0);
        let mut log_f = vec![0.0; self.dim()];
        for (&x, &w) in nodes.0.iter().zip(&nodes.1) {
            let r = self.log_rates(t0 + half * (x + 1.0));
            for (acc, v) in log_f.iter_mut().zip(r) {
                *acc += half * w * v;
            }
        }
        log_f
    }

    /// Interpolants of `ln f_i` over the padded strip.
    fn log_f_interpolants(&self) -> Vec<Chebyshev> {
        let nodes = gauss_legendre(QUADRATURE_NODES);
        let (a, b) = self.padded_range();
        let samples: Vec<(f64, Vec<f64>)> = (0..CHEBYSHEV_NODES)
            .map(|j| {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / CHEBYSHEV_NODES as f64;
                let x = 0.5 * (a + b) + 0.5 * (b - a) * theta.cos();
                (x, self.log_f(x, &nodes))
            })
            .collect();
        (0..self.dim())
            .map(|i| {
                Chebyshev::fit(a, b, CHEBYSHEV_NODES, |x| {
                    samples
                        .iter()
                        .find(|(sx, _)| *sx == x)
                        .map(|(_, v)| v[i])
                        .expect("fit evaluates at the Chebyshev nodes")
                })
            })
            .collect()
    }

    /// Axis eigenvalues, `ln f` and `(ln f)'` at `x1`.
    fn profile(&self, x1: f64, interp: &[Chebyshev]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let spec = self.spectrum(x1).expect("validated range");
        let lambdas = self.axis_order().iter().map(|&i| spec.values()[i]).collect();
        let log_f = interp.iter().map(|c| c.eval(x1)).collect();
        (lambdas, log_f, self.log_rates(x1))
    }

    /// The warped strip and the diagonal field on it.
    pub fn field(&self) -> SymmetricTensorField {
        let n = self.dim();
        let (t0, t1) = self.family.t_range();
        let mut lo = vec![0.0; n];
        let mut hi = vec![TAU; n];
        let mut periodic = vec![true; n];
        lo[0] = t0;
        hi[0] = t1;
        periodic[0] = false;
        let dom = Domain::new(lo, hi, periodic).expect("valid box");
        let nodes = Arc::new(self.log_f_interpolants());
        let me = Arc::new(self.clone());

        let (m1, n1) = (Arc::clone(&me), Arc::clone(&nodes));
        let (m2, n2) = (Arc::clone(&me), Arc::clone(&nodes));
        let (m3, n3) = (Arc::clone(&me), Arc::clone(&nodes));
        let metric = ChartedMetric::new(
            format!("warped-strip-{n}"),
            dom,
            Arc::new(move |p| {
                let (_, log_f, _) = m1.profile(p[0], &n1);
                DMatrix::from_diagonal(&DVector::from_iterator(n, log_f.iter().map(|l| (2.0 * l).exp())))
            }),
        )
        .with_derivatives(Arc::new(move |p| {
            let (_, log_f, rate) = m2.profile(p[0], &n2);
            let mut out = vec![DMatrix::zeros(n, n); n];
            for i in 0..n {
                out[0][(i, i)] = 2.0 * rate[i] * (2.0 * log_f[i]).exp();
            }
            out
        }))
        .with_invariant_axes((1..n).collect());
        let name = match self.mode() {
            GradientMode::SigmaNVaries => "synthetic-sigma-n",
            GradientMode::SigmaNm1Varies => "synthetic-sigma-nm1",
        };
        SymmetricTensorField::new(
            format!("{name}-{n}"),
            metric,
            Arc::new(move |p| {
                let (lambdas, log_f, _) = m3.profile(p[0], &n3);
                DMatrix::from_diagonal(&DVector::from_iterator(
                    n,
                    lambdas.iter().zip(&log_f).map(|(l, f)| l * (2.0 * f).exp()),
                ))
            }),
        )
    }
}

/// `diag(x2, x1, 0, …)` on flat `[−1, 1]^n`. Not Codazzi: `a_112 = 1` while
/// `a_121 = 0`.
pub fn swapped_diagonal_field(n: usize) -> Result<SymmetricTensorField> {
    if n < 2 {
        return Err(Error::TooFewValues { min: 2, got: n });
    }
    Ok(SymmetricTensorField::new(
        format!("swapped-diagonal-{n}"),
        euclidean(n),
        Arc::new(move |p| {
            let mut d = vec![0.0; n];
            d[0] = p[1];
            d[1] = p[0];
            DMatrix::from_diagonal(&DVector::from_vec(d))
        }),
    ))
}

/// `diag(x1, x2, 0, …)` on flat `[−1, 1]^n`. Each entry depends only on its
/// own coordinate, so this one is Codazzi.
pub fn aligned_diagonal_field(n: usize) -> Result<SymmetricTensorField> {
    if n < 2 {
        return Err(Error::TooFewValues { min: 2, got: n });
    }
    Ok(SymmetricTensorField::new(
        format!("aligned-diagonal-{n}"),
        euclidean(n),
        Arc::new(move |p| {
            let mut d = vec![0.0; n];
            d[0] = p[0];
            d[1] = p[1];
            DMatrix::from_diagonal(&DVector::from_vec(d))
        }),
    ))
}

fn plane_rotation(i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(3, 3);
    let (s, c) = angle.sin_cos();
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r
}

/// `E diag(1, 2, 3) Eᵀ` on flat `[−1, 1]³` with the eigenframe
/// `E = R₁₂(x3) R₂₃(x1) R₁₃(x2)` twisting in every direction. Its eigenframe
/// has a triple sum `Σ Γ_ij^k Γ_ji^k` well away from zero.
pub fn twisted_frame_field() -> SymmetricTensorField {
    SymmetricTensorField::new(
        "twisted-frame-3",
        euclidean(3),
        Arc::new(|p| {
            let e = plane_rotation(0, 1, p[2]) * plane_rotation(1, 2, p[0]) * plane_rotation(0, 2, p[1]);
            let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
            &e * d * e.transpose()
        }),
    )
}

/// Names accepted by [`builtin_field`].
pub const BUILTIN_FIELDS: &[&str] = &[
    "synthetic-sigma-n",
    "synthetic-sigma-nm1",
    "swapped-diagonal",
    "aligned-diagonal",
    "twisted-frame",
];

pub fn builtin_field(name: &str, n: usize) -> Result<SymmetricTensorField> {
    Ok(match name {
        "synthetic-sigma-n" => SyntheticFamily::sigma_n_example().field(),
        "synthetic-sigma-nm1" => SyntheticFamily::sigma_nm1_example().field(),
        "swapped-diagonal" => swapped_diagonal_field(n)?,
        "aligned-diagonal" => aligned_diagonal_field(n)?,
        "twisted-frame" => twisted_frame_field(),
        other => {
            return Err(Error::Config(format!(
                "unknown tensor field '{other}'; known: {}",
                BUILTIN_FIELDS.join(", ")
            )))
        }
    })
}
