use crate::error::{Error, Result};

/// Relative factor of the degeneracy tolerance `1e-8 * (1 + max|λ|)`.
pub const DEGENERACY_FACTOR: f64 = 1e-8;

/// An ordered list of real eigenvalues together with its smallest pairwise gap.
///
/// Values are kept in ascending order. The one exception is the trailing-zero
/// layout built by [`Spectrum::with_trailing_zero`], where the nonzero values
/// are ascending and an exact `0.0` is appended as the last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    min_gap: f64,
}

impl Spectrum {
    pub fn new(values: impl Into<Vec<f64>>) -> Result<Self> {
        let mut values = values.into();
        check_values(&values)?;
        values.sort_by(f64::total_cmp);
        let min_gap = min_gap_of(&values);
        Ok(Spectrum { values, min_gap })
    }

    /// Ascending nonzero values followed by an exact zero as the last eigenvalue.
    pub fn with_trailing_zero(nonzero: &[f64]) -> Result<Self> {
        let mut values = nonzero.to_vec();
        values.sort_by(f64::total_cmp);
        values.push(0.0);
        check_values(&values)?;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let min_gap = min_gap_of(&sorted);
        Ok(Spectrum { values, min_gap })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Gap below which the spectrum counts as degenerate.
    pub fn degeneracy_tolerance(&self) -> f64 {
        DEGENERACY_FACTOR * (1.0 + self.max_abs())
    }

    pub fn is_distinct(&self) -> bool {
        self.min_gap >= self.degeneracy_tolerance()
    }

    pub fn require_distinct(&self) -> Result<()> {
        if self.is_distinct() {
            Ok(())
        } else {
            Err(Error::DegenerateSpectrum {
                min_gap: self.min_gap,
                tolerance: self.degeneracy_tolerance(),
            })
        }
    }

    /// `P'(λ_i) = ∏_{k≠i} (λ_i − λ_k)`.
    pub fn pprime_at(&self, i: usize) -> f64 {
        let li = self.values[i];
        self.values
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &lk)| li - lk)
            .product()
    }

    /// `P''(λ_i) = 2 Σ_{j≠i} ∏_{m≠i,j} (λ_i − λ_m)`, the exact second
    /// derivative of the product polynomial at one of its roots.
    pub fn psecond_at(&self, i: usize) -> f64 {
        let li = self.values[i];
        let n = self.values.len();
        let mut total = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let mut prod = 1.0;
            for (m, &lm) in self.values.iter().enumerate() {
                if m != i && m != j {
                    prod *= li - lm;
                }
            }
            total += prod;
        }
        2.0 * total
    }

    /// `P(x) = ∏ (x − λ_i)` evaluated in product form.
    pub fn eval_product(&self, x: f64) -> f64 {
        self.values.iter().map(|&l| x - l).product()
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::TooFewValues {
            min: 2,
            got: values.len(),
        });
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    Ok(())
}

fn min_gap_of(sorted: &[f64]) -> f64 {
    sorted
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_measures_gap() {
        let s = Spectrum::new(vec![3.0, 1.0, 2.5]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.5, 3.0]);
        assert_eq!(s.min_gap(), 0.5);
    }

    #[test]
    fn repeated_values_have_zero_gap() {
        let s = Spectrum::new(vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.min_gap(), 0.0);
        assert!(matches!(
            s.require_distinct(),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn rejects_short_and_non_finite() {
        assert!(matches!(
            Spectrum::new(vec![1.0]),
            Err(Error::TooFewValues { .. })
        ));
        assert!(matches!(
            Spectrum::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn trailing_zero_layout() {
        let s = Spectrum::with_trailing_zero(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0, 0.0]);
        assert_eq!(s.min_gap(), 1.0);
    }

    #[test]
    fn product_derivatives_at_roots() {
        // x(x-1)(x-2) = x^3 - 3x^2 + 2x, P' = 3x^2 - 6x + 2, P'' = 6x - 6
        let s = Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.pprime_at(0), 2.0);
        assert_eq!(s.pprime_at(1), -1.0);
        assert_eq!(s.pprime_at(2), 2.0);
        assert_eq!(s.psecond_at(0), -6.0);
        assert_eq!(s.psecond_at(1), 0.0);
        assert_eq!(s.psecond_at(2), 6.0);
    }
}
