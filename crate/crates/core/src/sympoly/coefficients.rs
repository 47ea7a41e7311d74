//! Coefficient families built from a distinct spectrum.
//!
//! With `P(x) = ∏ (x − λ_i)` and `n` the spectrum length:
//!
//! * `c_ik = (−1)^{n+1} / ((λ_i − λ_k) P'(λ_i))` and `v_k = Σ_{i≠k} c_ik`,
//!   whose closed form is `(−1)^{n+1} P''(λ_k) / (2 P'(λ_k)²)`;
//! * `b_ik = (−1)^n λ_i / ((λ_i − λ_k) P'(λ_i))` and `u_k = Σ_{i≠k} b_ik`;
//! * `L(r) = Σ_{i≠j; i,j≠r} c_ir c_jr` and `G(k) = Σ_{i≠j; i,j≠k} b_ik b_jk`,
//!   both evaluated as `(Σ)² − Σ(²)`.
//!
//! Evaluations at roots use the product forms of `P'` and `P''` carried by
//! [`Spectrum`], which stay accurate for clustered roots where Horner's
//! scheme on the expanded coefficients loses digits.

use super::Spectrum;
use crate::error::{Error, Result};

/// Which family a [`CoefficientFamily`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    C,
    V,
    B,
    U,
    G,
    L,
}

/// Values of a family, either pairwise `(i, k)` with `i ≠ k` or per index.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientTable {
    /// Row-major `n × n`; diagonal entries are undefined and stored as NaN.
    Pairwise { n: usize, values: Vec<f64> },
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFamily {
    pub kind: FamilyKind,
    pub table: CoefficientTable,
}

impl CoefficientFamily {
    fn pairwise(kind: FamilyKind, n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = vec![f64::NAN; n * n];
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    values[i * n + k] = f(i, k);
                }
            }
        }
        CoefficientFamily {
            kind,
            table: CoefficientTable::Pairwise { n, values },
        }
    }

    fn vector(kind: FamilyKind, values: Vec<f64>) -> Self {
        CoefficientFamily {
            kind,
            table: CoefficientTable::Vector(values),
        }
    }

    pub fn len(&self) -> usize {
        match &self.table {
            CoefficientTable::Pairwise { n, .. } => *n,
            CoefficientTable::Vector(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairwise entry `(i, k)`; `None` on the diagonal or for vector families.
    pub fn pair(&self, i: usize, k: usize) -> Option<f64> {
        match &self.table {
            CoefficientTable::Pairwise { n, values } if i != k => Some(values[i * n + k]),
            _ => None,
        }
    }

    /// Entry `k` of a vector family.
    pub fn get(&self, k: usize) -> Option<f64> {
        match &self.table {
            CoefficientTable::Vector(v) => v.get(k).copied(),
            CoefficientTable::Pairwise { .. } => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match &self.table {
            CoefficientTable::Vector(v) => Some(v),
            CoefficientTable::Pairwise { .. } => None,
        }
    }

    /// `Σ_{i≠k} x_ik` for every `k` of a pairwise family.
    pub fn off_diagonal_column_sums(&self) -> Option<Vec<f64>> {
        match &self.table {
            CoefficientTable::Pairwise { n, values } => Some(
                (0..*n)
                    .map(|k| (0..*n).filter(|&i| i != k).map(|i| values[i * n + k]).sum())
                    .collect(),
            ),
            CoefficientTable::Vector(_) => None,
        }
    }

    /// `Σ_{i≠k} |x_ik|` for every `k`; the magnitude scale of a column sum.
    pub fn off_diagonal_column_magnitudes(&self) -> Option<Vec<f64>> {
        match &self.table {
            CoefficientTable::Pairwise { n, values } => Some(
                (0..*n)
                    .map(|k| {
                        (0..*n)
                            .filter(|&i| i != k)
                            .map(|i| values[i * n + k].abs())
                            .sum()
                    })
                    .collect(),
            ),
            CoefficientTable::Vector(_) => None,
        }
    }
}

/// How the eigenvalue gradients are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Every `σ_k` with `k ≠ n` is constant.
    SigmaNVaries,
    /// Every `σ_k` with `k ≠ n − 1` is constant.
    SigmaNm1Varies,
}

fn sign_pow(e: usize) -> f64 {
    if e % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `|Σ_{k≠i} 1/(P'(λ_k)(λ_i − λ_k)) + ½ P''(λ_i)/P'(λ_i)²|`.
pub fn verify_partial_fraction_identity(spec: &Spectrum, i: usize) -> Result<f64> {
    spec.require_distinct()?;
    check_index(spec, i)?;
    let lambda = spec.values();
    let lhs: f64 = (0..spec.len())
        .filter(|&k| k != i)
        .map(|k| 1.0 / (spec.pprime_at(k) * (lambda[i] - lambda[k])))
        .sum();
    let dp = spec.pprime_at(i);
    let rhs = -0.5 * spec.psecond_at(i) / (dp * dp);
    Ok((lhs - rhs).abs())
}

/// `Σ_i 1/P'(λ_i)`, which vanishes for every distinct spectrum.
pub fn sum_inverse_pprime(spec: &Spectrum) -> Result<f64> {
    spec.require_distinct()?;
    Ok((0..spec.len()).map(|i| 1.0 / spec.pprime_at(i)).sum())
}

/// `max_i |1/P'(λ_i)|`, the scale of [`sum_inverse_pprime`].
pub fn inverse_pprime_scale(spec: &Spectrum) -> f64 {
    (0..spec.len())
        .map(|i| (1.0 / spec.pprime_at(i)).abs())
        .fold(0.0, f64::max)
}

pub fn coeff_c(spec: &Spectrum) -> Result<CoefficientFamily> {
    spec.require_distinct()?;
    let n = spec.len();
    let lambda = spec.values();
    let sign = sign_pow(n + 1);
    let dp: Vec<f64> = (0..n).map(|i| spec.pprime_at(i)).collect();
    Ok(CoefficientFamily::pairwise(FamilyKind::C, n, |i, k| {
        sign / ((lambda[i] - lambda[k]) * dp[i])
    }))
}

/// Closed form `v_k = (−1)^{n+1} P''(λ_k) / (2 P'(λ_k)²)`.
pub fn weight_v(spec: &Spectrum) -> Result<CoefficientFamily> {
    spec.require_distinct()?;
    let n = spec.len();
    let sign = sign_pow(n + 1);
    let v = (0..n)
        .map(|k| {
            let dp = spec.pprime_at(k);
            sign * spec.psecond_at(k) / (2.0 * dp * dp)
        })
        .collect();
    Ok(CoefficientFamily::vector(FamilyKind::V, v))
}

/// `L(r)` for 0-based `r`, via `(Σ_{i≠r} c_ir)² − Σ_{i≠r} c_ir²`.
pub fn quad_l(spec: &Spectrum, r: usize) -> Result<f64> {
    if spec.len() < 3 {
        return Err(Error::TooFewValues {
            min: 3,
            got: spec.len(),
        });
    }
    check_index(spec, r)?;
    let c = coeff_c(spec)?;
    Ok(sum_square_minus_squares((0..spec.len()).filter(|&i| i != r).map(|i| c.pair(i, r).unwrap())))
}

/// `L(r)` by the literal double sum over ordered pairs `i ≠ j`, both `≠ r`.
pub fn quad_l_double_sum(spec: &Spectrum, r: usize) -> Result<f64> {
    check_index(spec, r)?;
    let c = coeff_c(spec)?;
    let n = spec.len();
    let mut total = 0.0;
    for i in (0..n).filter(|&i| i != r) {
        for j in (0..n).filter(|&j| j != r && j != i) {
            total += c.pair(i, r).unwrap() * c.pair(j, r).unwrap();
        }
    }
    Ok(total)
}

fn sum_square_minus_squares(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, sq) = values.fold((0.0, 0.0), |(s, q), x| (s + x, q + x * x));
    sum * sum - sq
}

fn check_index(spec: &Spectrum, i: usize) -> Result<()> {
    if i < spec.len() {
        Ok(())
    } else {
        Err(Error::BadParameters(format!(
            "index {i} out of range for spectrum of length {}",
            spec.len()
        )))
    }
}

fn check_zero_last(spec: &Spectrum) -> Result<()> {
    let v = spec.values();
    let last = *v.last().unwrap();
    if last != 0.0 || v[..v.len() - 1].iter().any(|&x| x == 0.0) {
        return Err(Error::ZeroConventionViolated { last });
    }
    Ok(())
}

/// `b_ik`. With `zero_last` the trailing exact zero is `λ_n` and the
/// reduced form `b_ik = (−1)^n / ((λ_i − λ_k) P₁'(λ_i))`, `b_nk = 0` is used,
/// where `P₁` is the characteristic polynomial of the nonzero eigenvalues.
pub fn coeff_b(spec: &Spectrum, zero_last: bool) -> Result<CoefficientFamily> {
    spec.require_distinct()?;
    let n = spec.len();
    let lambda = spec.values();
    let sign = sign_pow(n);
    if zero_last {
        check_zero_last(spec)?;
        let dp1: Vec<f64> = (0..n - 1).map(|i| reduced_pprime(lambda, i)).collect();
        Ok(CoefficientFamily::pairwise(FamilyKind::B, n, |i, k| {
            if i == n - 1 {
                0.0
            } else {
                sign / ((lambda[i] - lambda[k]) * dp1[i])
            }
        }))
    } else {
        let dp: Vec<f64> = (0..n).map(|i| spec.pprime_at(i)).collect();
        Ok(CoefficientFamily::pairwise(FamilyKind::B, n, |i, k| {
            sign * lambda[i] / ((lambda[i] - lambda[k]) * dp[i])
        }))
    }
}

/// Closed forms of `u_k = Σ_{i≠k} b_ik`.
///
/// With `zero_last`: `u_k = (−1)^n P₁''(λ_k) / (2 P₁'(λ_k)²)` for `k < n` and
/// `u_n = (−1)^{n+1} / P'(0)`. Otherwise the general form
/// `u_k = (−1)^n (λ_k P''(λ_k) / (2 P'(λ_k)²) − 1/P'(λ_k))`, which follows from
/// the partial-fraction identity together with `Σ 1/P'(λ_i) = 0`.
pub fn weight_u(spec: &Spectrum, zero_last: bool) -> Result<CoefficientFamily> {
    spec.require_distinct()?;
    let n = spec.len();
    let lambda = spec.values();
    let u = if zero_last {
        check_zero_last(spec)?;
        let reduced = Spectrum::new(lambda[..n - 1].to_vec())?;
        let idx = sorted_positions(&lambda[..n - 1]);
        let mut u: Vec<f64> = (0..n - 1)
            .map(|k| {
                if n - 1 == 1 {
                    // P₁ is linear: P₁'' = 0
                    0.0
                } else {
                    let j = idx[k];
                    let dp1 = reduced.pprime_at(j);
                    sign_pow(n) * reduced.psecond_at(j) / (2.0 * dp1 * dp1)
                }
            })
            .collect();
        u.push(sign_pow(n + 1) / spec.pprime_at(n - 1));
        u
    } else {
        (0..n)
            .map(|k| {
                let dp = spec.pprime_at(k);
                sign_pow(n) * (lambda[k] * spec.psecond_at(k) / (2.0 * dp * dp) - 1.0 / dp)
            })
            .collect()
    };
    Ok(CoefficientFamily::vector(FamilyKind::U, u))
}

/// `G(k)` for every `k`, via `(Σ_{i≠k} b_ik)² − Σ_{i≠k} b_ik²`.
pub fn quad_g(spec: &Spectrum, zero_last: bool) -> Result<Vec<f64>> {
    let b = coeff_b(spec, zero_last)?;
    let n = spec.len();
    Ok((0..n)
        .map(|k| {
            sum_square_minus_squares((0..n).filter(|&i| i != k).map(|i| b.pair(i, k).unwrap()))
        })
        .collect())
}

/// Multiplier `μ_i` in `λ_ij = μ_i (σ)_j`: `(−1)^{n+1}/P'(λ_i)` when `σ_n`
/// varies, `(−1)^n λ_i/P'(λ_i)` when `σ_{n−1}` varies.
pub fn lambda_gradient_coefficients(spec: &Spectrum, mode: GradientMode) -> Result<Vec<f64>> {
    spec.require_distinct()?;
    let n = spec.len();
    let lambda = spec.values();
    Ok((0..n)
        .map(|i| {
            let dp = spec.pprime_at(i);
            match mode {
                GradientMode::SigmaNVaries => sign_pow(n + 1) / dp,
                GradientMode::SigmaNm1Varies => sign_pow(n) * lambda[i] / dp,
            }
        })
        .collect())
}

/// `P₁'(λ_i) = ∏_{l≠i, l<n} (λ_i − λ_l)` over the leading `n − 1` values.
fn reduced_pprime(lambda: &[f64], i: usize) -> f64 {
    let m = lambda.len() - 1;
    (0..m)
        .filter(|&l| l != i)
        .map(|l| lambda[i] - lambda[l])
        .product()
}

/// Position of each value of `values` in its ascending ordering.
fn sorted_positions(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut pos = vec![0; values.len()];
    for (rank, &idx) in order.iter().enumerate() {
        pos[idx] = rank;
    }
    pos
}

/// `|sum − closed| / max(|closed|, Σ|terms|, tiny)`, the disagreement of a
/// column-sum family with its closed form, measured against the size of the
/// summands so cancellation does not inflate it.
pub fn sum_form_disagreement(pairwise: &CoefficientFamily, closed: &CoefficientFamily) -> Vec<f64> {
    let sums = pairwise.off_diagonal_column_sums().unwrap_or_default();
    let mags = pairwise.off_diagonal_column_magnitudes().unwrap_or_default();
    let closed = closed.as_vector().unwrap_or_default();
    sums.iter()
        .zip(mags.iter())
        .zip(closed.iter())
        .map(|((s, m), c)| (s - c).abs() / c.abs().max(*m).max(f64::MIN_POSITIVE))
        .collect()
}
