//! Built-in hypersurfaces of unit spheres.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::immersion::{Immersion, Jet};
use crate::error::{Error, Result};
use crate::geometry::builtins::POLAR_GUARD;
use crate::geometry::Domain;

/// Bump amplitude of [`perturbed_clifford_torus`].
pub const BUMP_AMPLITUDE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Factor {
    One,
    Sin,
    Cos,
}

impl Factor {
    /// `d^k/dx^k` of the factor.
    fn eval(self, k: usize, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        match (self, k % 4) {
            (Factor::One, 0) => 1.0,
            (Factor::One, _) => 0.0,
            (Factor::Sin, 0) | (Factor::Cos, 3) => s,
            (Factor::Sin, 1) | (Factor::Cos, 0) => c,
            (Factor::Sin, 2) | (Factor::Cos, 1) => -s,
            (Factor::Sin, _) | (Factor::Cos, _) => -c,
        }
    }
}

/// Factor of component `m` of the unit `S^p` along angle `k`, in the
/// hyperspherical layout `u_m = sin α_0 ⋯ sin α_{m−1} cos α_m`,
/// `u_p = sin α_0 ⋯ sin α_{p−1}`.
fn sphere_factor(p: usize, m: usize, k: usize) -> Factor {
    if k < m {
        Factor::Sin
    } else if k == m && m < p {
        Factor::Cos
    } else {
        Factor::One
    }
}

/// Exact jet of `radius · u(α)` for the unit `S^p`, written into rows
/// `offset..offset+p+1` and angle columns `col..col+p` of `jet`.
fn sphere_jet_into(jet: &mut Jet, alpha: &[f64], radius: f64, offset: usize, col: usize) {
    let p = alpha.len();
    for m in 0..=p {
        let order = |k: usize, j: &[usize]| j.iter().filter(|&&x| x == k).count();
        let product = |which: &[usize]| -> f64 {
            (0..p)
                .map(|k| sphere_factor(p, m, k).eval(order(k, which), alpha[k]))
                .product::<f64>()
                * radius
        };
        jet.f[offset + m] = product(&[]);
        for a in 0..p {
            jet.d1[(offset + m, col + a)] = product(&[a]);
            for b in 0..p {
                jet.d2[col + a][(offset + m, col + b)] = product(&[a, b]);
            }
        }
    }
}

/// Chart box of `S^p`: `p − 1` polar angles in `[0, π]` and one periodic
/// angle in `[0, 2π)`.
fn sphere_box(p: usize) -> (Vec<f64>, Vec<f64>, Vec<bool>) {
    let mut hi = vec![PI; p];
    let mut periodic = vec![false; p];
    hi[p - 1] = TAU;
    periodic[p - 1] = true;
    (vec![0.0; p], hi, periodic)
}

fn empty_jet(big: usize, n: usize) -> Jet {
    Jet {
        f: DVector::zeros(big),
        d1: DMatrix::zeros(big, n),
        d2: vec![DMatrix::zeros(big, n); n],
    }
}

/// Generalized Clifford torus `S^p(r) × S^q(s)`, `s = √(1 − r²)`, in the unit
/// `S^{p+q+1}`, with the first `p` chart coordinates on the first factor.
pub fn clifford_torus(p: usize, q: usize, r: f64) -> Result<Immersion> {
    if p == 0 || q == 0 || !(r > 0.0 && r < 1.0) {
        return Err(Error::BadParameters(format!(
            "Clifford torus needs p, q ≥ 1 and 0 < r < 1, got p={p}, q={q}, r={r}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let n = p + q;
    let (mut lo, mut hi, mut periodic) = sphere_box(p);
    let (lo2, hi2, per2) = sphere_box(q);
    lo.extend(lo2);
    hi.extend(hi2);
    periodic.extend(per2);
    let domain = Domain::new(lo, hi, periodic)?;
    let jet = move |x: &[f64]| {
        let mut j = empty_jet(n + 2, n);
        sphere_jet_into(&mut j, &x[..p], r, 0, 0);
        sphere_jet_into(&mut j, &x[p..], s, p + 1, p);
        j
    };
    Ok(Immersion::new(
        format!("clifford-{p}-{q}-{r:.6}"),
        domain,
        Arc::new(move |x| jet(x).f),
    )
    .with_jet(Arc::new(jet))
    .with_guard(POLAR_GUARD))
}

/// Principal curvatures `(−s/r, r/s)` of [`clifford_torus`] with
/// multiplicities `p` and `q`, in the orientation the immersion uses.
pub fn clifford_principal_curvatures(r: f64) -> (f64, f64) {
    let s = (1.0 - r * r).sqrt();
    (-s / r, r / s)
}

/// Totally geodesic `S^n` inside the hyperplane `x_{n+2} = 0`.
pub fn equatorial_sphere(n: usize) -> Result<Immersion> {
    if n < 2 {
        return Err(Error::BadParameters(format!("equatorial sphere needs n ≥ 2, got {n}")));
    }
    let (lo, hi, periodic) = sphere_box(n);
    let jet = move |x: &[f64]| {
        let mut j = empty_jet(n + 2, n);
        sphere_jet_into(&mut j, x, 1.0, 0, 0);
        j
    };
    Ok(Immersion::new(
        format!("equatorial-s{n}"),
        Domain::new(lo, hi, periodic)?,
        Arc::new(move |x| jet(x).f),
    )
    .with_jet(Arc::new(jet))
    .with_guard(POLAR_GUARD))
}

/// The geodesic sphere of radius `θ` about a pole: `(sin θ · u, cos θ)`.
/// Umbilic with principal curvature `cot θ` up to orientation.
pub fn small_sphere(n: usize, theta: f64) -> Result<Immersion> {
    if n < 2 || !(theta > 0.0 && theta < PI) {
        return Err(Error::BadParameters(format!(
            "small sphere needs n ≥ 2 and 0 < θ < π, got n={n}, θ={theta}"
        )));
    }
    let (lo, hi, periodic) = sphere_box(n);
    let jet = move |x: &[f64]| {
        let mut j = empty_jet(n + 2, n);
        sphere_jet_into(&mut j, x, theta.sin(), 0, 0);
        j.f[n + 1] = theta.cos();
        j
    };
    Ok(Immersion::new(
        format!("small-s{n}-{theta:.6}"),
        Domain::new(lo, hi, periodic)?,
        Arc::new(move |x| jet(x).f),
    )
    .with_jet(Arc::new(jet))
    .with_guard(POLAR_GUARD))
}

/// Sharpness of the bump of [`perturbed_clifford_torus`].
const BUMP_SHARPNESS: f64 = 2.0;

/// `S^1(r) × S^1(s)` pushed along its normal by the bump
/// `A exp(κ(cos(x1 − π/2) − 1) + κ(cos(x2 − π/2) − 1))`, then projected back
/// to the sphere.
pub fn perturbed_clifford_torus(r: f64, amplitude: f64) -> Result<Immersion> {
    let base = clifford_torus(1, 1, r)?;
    let s = (1.0 - r * r).sqrt();
    let k = BUMP_SHARPNESS;
    let jet = move |x: &[f64]| {
        let mut point = empty_jet(4, 2);
        sphere_jet_into(&mut point, &x[..1], r, 0, 0);
        sphere_jet_into(&mut point, &x[1..], s, 2, 1);
        let mut normal = empty_jet(4, 2);
        sphere_jet_into(&mut normal, &x[..1], s, 0, 0);
        sphere_jet_into(&mut normal, &x[1..], -r, 2, 1);

        let sines = [(x[0] - PI / 2.0).sin(), (x[1] - PI / 2.0).sin()];
        let cosines = [(x[0] - PI / 2.0).cos(), (x[1] - PI / 2.0).cos()];
        let b = amplitude * (k * (cosines[0] - 1.0) + k * (cosines[1] - 1.0)).exp();
        let b1 = [-k * sines[0] * b, -k * sines[1] * b];
        let b2 = |a: usize, c: usize| {
            if a == c {
                b * (k * k * sines[a] * sines[a] - k * cosines[a])
            } else {
                b * k * k * sines[a] * sines[c]
            }
        };

        let mut v = empty_jet(4, 2);
        v.f = &point.f + &normal.f * b;
        for a in 0..2 {
            let col = point.d1.column(a) + &normal.f * b1[a] + normal.d1.column(a) * b;
            v.d1.set_column(a, &col);
            for c in 0..2 {
                let col = point.d2[a].column(c)
                    + &normal.f * b2(a, c)
                    + normal.d1.column(c) * b1[a]
                    + normal.d1.column(a) * b1[c]
                    + normal.d2[a].column(c) * b;
                v.d2[a].set_column(c, &col);
            }
        }
        v.normalized()
    };
    Ok(Immersion::new(
        format!("perturbed-clifford-{r:.6}"),
        base.domain.clone(),
        Arc::new(move |x| jet(x).f),
    )
    .with_jet(Arc::new(jet)))
}

/// `(p, q, r)` of the built-in Clifford tori.
pub const CLIFFORD_FAMILY: &[(usize, usize, f64)] = &[
    (1, 1, std::f64::consts::FRAC_1_SQRT_2),
    (1, 1, 0.6),
    (1, 2, 0.577_350_269_189_625_8),
    (2, 1, 0.8),
    (2, 2, std::f64::consts::FRAC_1_SQRT_2),
    (1, 3, 0.5),
];

/// Names accepted by [`builtin_immersion`].
pub const BUILTIN_IMMERSIONS: &[&str] = &[
    "clifford-minimal",
    "clifford-1-1",
    "clifford-1-2",
    "clifford-2-1",
    "clifford-2-2",
    "clifford-1-3",
    "equatorial-s2",
    "equatorial-s3",
    "small-s2",
    "perturbed-clifford",
];

pub fn builtin_immersion(name: &str) -> Result<Immersion> {
    let family = |i: usize| {
        let (p, q, r) = CLIFFORD_FAMILY[i];
        clifford_torus(p, q, r)
    };
    match name {
        "clifford-minimal" => family(0),
        "clifford-1-1" => family(1),
        "clifford-1-2" => family(2),
        "clifford-2-1" => family(3),
        "clifford-2-2" => family(4),
        "clifford-1-3" => family(5),
        "equatorial-s2" => equatorial_sphere(2),
        "equatorial-s3" => equatorial_sphere(3),
        "small-s2" => small_sphere(2, 0.8),
        "perturbed-clifford" => perturbed_clifford_torus(std::f64::consts::FRAC_1_SQRT_2, BUMP_AMPLITUDE),
        other => Err(Error::Config(format!(
            "unknown immersion '{other}'; known: {}",
            BUILTIN_IMMERSIONS.join(", ")
        ))),
    }
}
