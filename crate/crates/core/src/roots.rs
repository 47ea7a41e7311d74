//! Real roots of monic polynomials: companion-matrix eigenvalues followed by
//! guarded Newton polishing and cluster merging.

use nalgebra::{DMatrix, Schur};

use crate::sympoly::MonicPolynomial;

/// Relative factor of the cluster tolerance `1e-6 * (1 + max|λ|)`.
pub const CLUSTER_FACTOR: f64 = 1e-6;

/// Shifts tried when the QR iteration stalls on the unshifted companion
/// matrix (symmetric root patterns such as even polynomials can defeat the
/// standard shift strategy).
const RETRY_SHIFTS: [f64; 4] = [0.0, 0.318_309_886, -0.577_215_665, 0.707_106_781];
const MAX_SWEEPS_PER_DIM: usize = 200;

/// Eigenvalues of the companion matrix, as `(re, im)` sorted by real part.
pub fn companion_roots(p: &MonicPolynomial) -> Vec<(f64, f64)> {
    let c = p.coefficients();
    let n = p.degree();
    if n == 1 {
        return vec![(-c[1], 0.0)];
    }
    for s in RETRY_SHIFTS {
        // roots of p(y + s) are the roots of p minus s
        let shifted = taylor_shift(&c, s);
        if let Some(mut out) = companion_eigenvalues(&shifted) {
            out.iter_mut().for_each(|z| z.0 += s);
            out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            return out;
        }
    }
    panic!("companion QR iteration failed to converge for {c:?}");
}

fn companion_eigenvalues(c: &[f64]) -> Option<Vec<(f64, f64)>> {
    let n = c.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -c[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let schur = Schur::try_new(m, f64::EPSILON, MAX_SWEEPS_PER_DIM * n)?;
    Some(
        schur
            .complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect(),
    )
}

/// Coefficients (highest first) of `p(y + s)`.
fn taylor_shift(c: &[f64], s: f64) -> Vec<f64> {
    let mut out = c.to_vec();
    if s == 0.0 {
        return out;
    }
    let n = out.len() - 1;
    // repeated synthetic division by (y - s), in ascending storage
    out.reverse();
    for k in 0..n {
        for j in (k..n).rev() {
            out[j] += s * out[j + 1];
        }
    }
    out.reverse();
    out
}

/// A root with its detected multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteredRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Outcome of [`real_roots`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoots {
    /// Ascending, repeated according to multiplicity.
    pub values: Vec<f64>,
    pub clusters: Vec<ClusteredRoot>,
    /// Largest `|im|` among the raw companion eigenvalues.
    pub max_imag: f64,
}

/// All roots when they are real. Returns `Err(max_imag)` if some eigenvalue
/// has an imaginary part above `imag_tol`.
///
/// Roots closer than `cluster_tol` are merged and placed at the nearby zero of
/// `P'`, which is where a multiple root sits and which Newton on `P'`
/// locates to full precision.
pub fn real_roots(p: &MonicPolynomial, imag_tol: f64, cluster_tol: f64) -> Result<RealRoots, f64> {
    let raw = companion_roots(p);
    let max_imag = raw.iter().fold(0.0f64, |m, z| m.max(z.1.abs()));
    if max_imag > imag_tol {
        return Err(max_imag);
    }
    let coeffs = p.coefficients();
    let dcoeffs = p.derivative_coefficients();
    let mut xs: Vec<f64> = raw.iter().map(|z| polish(&coeffs, z.0, 3)).collect();
    xs.sort_by(f64::total_cmp);

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for x in xs {
        match clusters.last_mut() {
            Some(c) if x - c.last().unwrap() < cluster_tol => c.push(x),
            _ => clusters.push(vec![x]),
        }
    }
    let mut values = Vec::new();
    let mut out = Vec::new();
    for c in clusters {
        let m = c.len();
        let mean = c.iter().sum::<f64>() / m as f64;
        let value = if m == 1 {
            c[0]
        } else {
            let refined = polish(&dcoeffs, mean, 4);
            if (refined - mean).abs() < cluster_tol {
                refined
            } else {
                mean
            }
        };
        values.extend(std::iter::repeat(value).take(m));
        out.push(ClusteredRoot {
            value,
            multiplicity: m,
        });
    }
    Ok(RealRoots {
        values,
        clusters: out,
        max_imag,
    })
}

/// Newton steps on the polynomial with highest-first `coeffs`, each accepted
/// only when it lowers `|p|`.
fn polish(coeffs: &[f64], mut x: f64, steps: usize) -> f64 {
    let mut px = horner(coeffs, x).0;
    for _ in 0..steps {
        let (p, dp) = horner(coeffs, x);
        if p == 0.0 || dp == 0.0 {
            break;
        }
        let cand = x - p / dp;
        let pc = horner(coeffs, cand).0;
        if pc.abs() < px.abs() {
            x = cand;
            px = pc;
        } else {
            break;
        }
    }
    x
}

fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> MonicPolynomial {
        MonicPolynomial::from_coefficients(c).unwrap()
    }

    #[test]
    fn simple_cubic() {
        let r = real_roots(&poly(&[1.0, -6.0, 11.0, -6.0]), 1e-8, 1e-6).unwrap();
        for (a, b) in r.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(r.clusters.iter().all(|c| c.multiplicity == 1));
    }

    #[test]
    fn double_root_is_merged() {
        // (x - 1)^2 (x + 2)
        let r = real_roots(&poly(&[1.0, 0.0, -3.0, 2.0]), 1e-6, 1e-6).unwrap();
        assert_eq!(r.clusters.len(), 2);
        assert_eq!(r.clusters[1].multiplicity, 2);
        assert!((r.values[0] + 2.0).abs() < 1e-12);
        assert!((r.values[1] - 1.0).abs() < 1e-12);
        assert_eq!(r.values[1], r.values[2]);
    }

    #[test]
    fn complex_pair_rejected() {
        let err = real_roots(&poly(&[1.0, 0.0, 1.0]), 1e-8, 1e-6).unwrap_err();
        assert!((err - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_quartic_does_not_stall() {
        // x^4 - 2x^2 + 0.5
        let r = real_roots(&poly(&[1.0, 0.0, -2.0, 0.0, 0.5]), 1e-8, 1e-6).unwrap();
        for x in r.values {
            assert!((x.powi(4) - 2.0 * x * x + 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn taylor_shift_matches_expansion() {
        // (y + 1)^2 - 3 = y^2 + 2y - 2
        assert_eq!(taylor_shift(&[1.0, 0.0, -3.0], 1.0), vec![1.0, 2.0, -2.0]);
    }

    #[test]
    fn linear() {
        let r = real_roots(&poly(&[1.0, -2.5]), 1e-8, 1e-6).unwrap();
        assert_eq!(r.values, vec![2.5]);
    }
}
