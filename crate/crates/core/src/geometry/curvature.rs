use nalgebra::DMatrix;

use super::connection::{christoffel, christoffel_derivatives, orthonormal_frame};
use super::metric::ChartedMetric;
use crate::error::Result;

/// Curvature at a point, in the canonical frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    n: usize,
    /// `⟨R(e_i,e_j)e_k, e_l⟩` at `[((i·n + j)·n + k)·n + l]`.
    pub riemann: Vec<f64>,
    pub scalar: f64,
}

impl CurvatureSample {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    /// Largest violation of antisymmetry in `(i,j)` and `(k,l)` and of pair
    /// exchange symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Sectional curvature `⟨R(e_i,e_j)e_j, e_i⟩`.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        self.get(i, j, j, i)
    }
}

/// Coordinate components `R^a_{bcd}` with `R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a`, for
/// the convention `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`.
/// Stored at `[((a·n + b)·n + c)·n + d]`.
pub fn riemann_coordinate(metric: &ChartedMetric, p: &[f64]) -> Result<Vec<f64>> {
    metric.check_point(p)?;
    let n = metric.dim();
    let chr = christoffel(metric, p)?;
    let dchr = christoffel_derivatives(metric, p)?;
    let mut out = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut r = dchr[c].get(a, d, b) - dchr[d].get(a, c, b);
                    for e in 0..n {
                        r += chr.get(a, c, e) * chr.get(e, d, b) - chr.get(a, d, e) * chr.get(e, c, b);
                    }
                    out[((a * n + b) * n + c) * n + d] = r;
                }
            }
        }
    }
    Ok(out)
}

/// Riemann tensor in a given orthonormal frame and its double trace
/// `S = Σ_{i,j} ⟨R(e_i,e_j)e_j, e_i⟩`.
pub fn curvature_in_frame(
    metric: &ChartedMetric,
    p: &[f64],
    frame: &DMatrix<f64>,
) -> Result<CurvatureSample> {
    let n = metric.dim();
    let rc = riemann_coordinate(metric, p)?;
    let g = metric.g(p);
    // lower the first index: R_{ebcd} = g_{ea} R^a_{bcd}
    let mut low = vec![0.0; n * n * n * n];
    for e in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        s += g[(e, a)] * rc[((a * n + b) * n + c) * n + d];
                    }
                    low[((e * n + b) * n + c) * n + d] = s;
                }
            }
        }
    }
    // ⟨R(e_i,e_j)e_k, e_l⟩ = E^c_i E^d_j E^b_k E^e_l R_{ebcd}; contract one
    // index at a time
    let contract = |t: &[f64], slot: usize| -> Vec<f64> {
        let mut out = vec![0.0; n * n * n * n];
        let stride = n.pow(3 - slot as u32);
        for idx in 0..out.len() {
            let fi = (idx / stride) % n;
            let base = idx - fi * stride;
            let mut s = 0.0;
            for x in 0..n {
                s += frame[(x, fi)] * t[base + x * stride];
            }
            out[idx] = s;
        }
        out
    };
    let mut t = low;
    for slot in 0..4 {
        t = contract(&t, slot);
    }
    // t is now indexed by frame slots (l, k, i, j) following R_{ebcd}
    let mut riemann = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    riemann[((i * n + j) * n + k) * n + l] = t[((l * n + k) * n + i) * n + j];
                }
            }
        }
    }
    let mut scalar = 0.0;
    for i in 0..n {
        for j in 0..n {
            scalar += riemann[((i * n + j) * n + j) * n + i];
        }
    }
    Ok(CurvatureSample {
        point: p.to_vec(),
        n,
        riemann,
        scalar,
    })
}

/// Curvature in the canonical Gram–Schmidt frame.
pub fn scalar_curvature(metric: &ChartedMetric, p: &[f64]) -> Result<CurvatureSample> {
    let frame = orthonormal_frame(metric, p)?;
    curvature_in_frame(metric, p, &frame)
}
