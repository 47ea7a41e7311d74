use super::Spectrum;
use crate::error::{Error, Result};

/// `sigma[k-1] = σ_k`, the k-th elementary symmetric function of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementarySymmetricVector {
    pub sigma: Vec<f64>,
}

impl ElementarySymmetricVector {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// `σ_k` with the usual convention `σ_0 = 1` and `σ_k = 0` past the degree.
    pub fn get(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            k if k <= self.sigma.len() => self.sigma[k - 1],
            _ => 0.0,
        }
    }
}

/// Expands `∏ (x − λ_i)` one factor at a time, accumulating unsigned `σ_k`.
pub fn elementary_symmetric(spec: &Spectrum) -> ElementarySymmetricVector {
    ElementarySymmetricVector {
        sigma: elementary_symmetric_of(spec.values()),
    }
}

pub(crate) fn elementary_symmetric_of(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    // e[k] = σ_k, e[0] = 1
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (m, &lambda) in values.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += lambda * e[k - 1];
        }
    }
    e.remove(0);
    e
}

/// Either representation of the symmetric data of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum SymmetricData {
    /// `p_1..p_m` with `p_k = Σ λ_i^k`.
    PowerSums(Vec<f64>),
    /// `σ_1..σ_m`.
    Elementary(Vec<f64>),
}

/// Converts between power sums and elementary symmetric functions with
/// Newton's identities `k σ_k = Σ_{i=1}^k (−1)^{i−1} σ_{k−i} p_i`.
pub fn newton_convert(input: &SymmetricData, n: usize) -> Result<SymmetricData> {
    let m = match input {
        SymmetricData::PowerSums(v) | SymmetricData::Elementary(v) => v.len(),
    };
    if m > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m,
        });
    }
    Ok(match input {
        SymmetricData::PowerSums(p) => SymmetricData::Elementary(power_sums_to_sigma(p)),
        SymmetricData::Elementary(s) => SymmetricData::PowerSums(sigma_to_power_sums(s)),
    })
}

pub fn power_sums_to_sigma(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut sigma = vec![1.0; m + 1];
    for k in 1..=m {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * sigma[k - i] * p[i - 1];
        }
        sigma[k] = acc / k as f64;
    }
    sigma.remove(0);
    sigma
}

pub fn sigma_to_power_sums(sigma: &[f64]) -> Vec<f64> {
    let m = sigma.len();
    let s = |k: usize| if k == 0 { 1.0 } else { sigma[k - 1] };
    let mut p: Vec<f64> = Vec::with_capacity(m);
    for k in 1..=m {
        // p_k = (−1)^{k−1} k σ_k + Σ_{i=1}^{k−1} (−1)^{k−1+i} σ_{k−i} p_i
        let mut acc = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 } * k as f64 * s(k);
        for i in 1..k {
            let sign = if (k - 1 + i) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * s(k - i) * p[i - 1];
        }
        p.push(acc);
    }
    p
}

/// Monic polynomial `x^n − σ_1 x^{n−1} + σ_2 x^{n−2} − ⋯ + (−1)^n σ_n`.
///
/// The unsigned `σ_k` are stored and signs are applied on evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    sigma: Vec<f64>,
}

impl MonicPolynomial {
    pub fn from_sigma(sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::TooFewValues { min: 1, got: 0 });
        }
        if let Some(&bad) = sigma.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(MonicPolynomial { sigma })
    }

    pub fn from_spectrum(spec: &Spectrum) -> Self {
        MonicPolynomial {
            sigma: elementary_symmetric(spec).sigma,
        }
    }

    /// Builds from ordinary coefficients, highest power first; the leading
    /// coefficient must be exactly 1.
    pub fn from_coefficients(coeffs: &[f64]) -> Result<Self> {
        match coeffs.first() {
            None => Err(Error::TooFewValues { min: 2, got: 0 }),
            Some(&lead) if lead != 1.0 => Err(Error::NotMonic(lead)),
            Some(_) => {
                let sigma = coeffs[1..]
                    .iter()
                    .enumerate()
                    .map(|(idx, &c)| if idx % 2 == 0 { -c } else { c })
                    .collect();
                MonicPolynomial::from_sigma(sigma)
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Ordinary coefficients `[1, −σ_1, σ_2, …, (−1)^n σ_n]`, highest power first.
    pub fn coefficients(&self) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(
                self.sigma
                    .iter()
                    .enumerate()
                    .map(|(idx, &s)| if idx % 2 == 0 { -s } else { s }),
            )
            .collect()
    }

    pub fn constant_term(&self) -> f64 {
        *self.coefficients().last().unwrap()
    }

    /// The polynomial plus a constant, `P(x) + t`.
    pub fn shifted(&self, t: f64) -> MonicPolynomial {
        let n = self.degree();
        let mut sigma = self.sigma.clone();
        // constant term is (−1)^n σ_n
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sigma[n - 1] += sign * t;
        MonicPolynomial { sigma }
    }

    /// Horner evaluation of `(P(x), P'(x), P''(x))`.
    pub fn eval_suite(&self, x: f64) -> (f64, f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        let mut ddp = 0.0;
        for c in self.coefficients() {
            ddp = ddp * x + 2.0 * dp;
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp, ddp)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_suite(x).0
    }

    /// Ordinary coefficients of the derivative, highest power first.
    pub fn derivative_coefficients(&self) -> Vec<f64> {
        let c = self.coefficients();
        let n = self.degree();
        c[..n]
            .iter()
            .enumerate()
            .map(|(idx, &ci)| ci * (n - idx) as f64)
            .collect()
    }
}

/// `(P(x), P'(x), P''(x))` by Horner's scheme.
pub fn poly_eval_suite(poly: &MonicPolynomial, x: f64) -> (f64, f64, f64) {
    poly.eval_suite(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn elementary_symmetric_examples() {
        assert_eq!(elementary_symmetric(&spec(&[0.0, 0.0, 0.0])).sigma, vec![0.0; 3]);
        assert_eq!(
            elementary_symmetric(&spec(&[1.0, 2.0, 3.0])).sigma,
            vec![6.0, 11.0, 6.0]
        );
        assert_eq!(
            elementary_symmetric(&spec(&[0.0, 1.0, 2.0])).sigma,
            vec![3.0, 2.0, 0.0]
        );
    }

    #[test]
    fn newton_examples() {
        let p = newton_convert(&SymmetricData::Elementary(vec![6.0, 11.0, 6.0]), 3).unwrap();
        assert_eq!(p, SymmetricData::PowerSums(vec![6.0, 14.0, 36.0]));
        let back = newton_convert(&p, 3).unwrap();
        assert_eq!(back, SymmetricData::Elementary(vec![6.0, 11.0, 6.0]));
        let zero = newton_convert(&SymmetricData::PowerSums(vec![0.0; 3]), 3).unwrap();
        assert_eq!(zero, SymmetricData::Elementary(vec![0.0; 3]));
    }

    #[test]
    fn newton_rejects_too_many_terms() {
        let err = newton_convert(&SymmetricData::PowerSums(vec![1.0; 4]), 3).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn eval_suite_examples() {
        // x^3 - 3x^2 + 2x
        let p = MonicPolynomial::from_sigma(vec![3.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.eval_suite(0.0), (0.0, 2.0, -6.0));
        assert_eq!(p.eval_suite(2.0), (0.0, 2.0, 6.0));
        for n in 3..7 {
            let xn = MonicPolynomial::from_sigma(vec![0.0; n]).unwrap();
            assert_eq!(poly_eval_suite(&xn, 0.0), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn coefficient_round_trip_and_shift() {
        let q = MonicPolynomial::from_coefficients(&[1.0, 0.0, -3.0, 0.0]).unwrap();
        assert_eq!(q.sigma(), &[0.0, -3.0, 0.0]);
        assert_eq!(q.coefficients(), vec![1.0, 0.0, -3.0, 0.0]);
        let p = q.shifted(2.0);
        assert_eq!(p.coefficients(), vec![1.0, 0.0, -3.0, 2.0]);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(q.derivative_coefficients(), vec![3.0, 0.0, -3.0]);
        assert!(matches!(
            MonicPolynomial::from_coefficients(&[2.0, 1.0]),
            Err(Error::NotMonic(_))
        ));
    }
}
