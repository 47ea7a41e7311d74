//! The shift family `P(x)(t) = Q(x) + t` with `Q(0) = 0`: critical profile of
//! `Q`, the admissible parameter interval, roots along the family and the
//! behaviour of `P''(λ_i)/P'(λ_i)²` as `t` approaches a threshold.

use crate::error::{Error, Result};
use crate::roots::{real_roots, ClusteredRoot, CLUSTER_FACTOR};
use crate::sympoly::{MonicPolynomial, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftFamily {
    q: MonicPolynomial,
    t_range: (f64, f64),
}

impl ShiftFamily {
    pub fn new(q: MonicPolynomial, t_range: (f64, f64)) -> Result<Self> {
        let c0 = q.constant_term();
        if c0 != 0.0 {
            return Err(Error::NonzeroConstantTerm(c0));
        }
        if q.degree() < 2 {
            return Err(Error::TooFewValues {
                min: 2,
                got: q.degree(),
            });
        }
        if !(t_range.0 <= t_range.1) {
            return Err(Error::BadParameters(format!(
                "parameter range [{}, {}] is empty",
                t_range.0, t_range.1
            )));
        }
        Ok(ShiftFamily { q, t_range })
    }

    /// The family over its whole admissible interval.
    pub fn admissible(q: MonicPolynomial) -> Result<Self> {
        let profile = critical_profile(&q)?;
        let range = admissible_interval(&profile)?;
        ShiftFamily::new(q, range)
    }

    pub fn q(&self) -> &MonicPolynomial {
        &self.q
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn at(&self, t: f64) -> MonicPolynomial {
        self.q.shifted(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalProfile {
    pub xi: Vec<f64>,
    pub q_values: Vec<f64>,
    pub classes: Vec<CriticalKind>,
    /// Smallest local maximum value `M̲`; absent when `Q` has no local max.
    pub m_lower: Option<f64>,
    /// Largest local minimum value `m̄`; absent when `Q` has no local min.
    pub m_upper: Option<f64>,
}

impl CriticalProfile {
    /// Indices of the critical points whose value equals `level`.
    pub fn critical_points_at(&self, level: f64) -> Vec<usize> {
        let tol = 1e-9 * (1.0 + level.abs());
        (0..self.xi.len())
            .filter(|&j| (self.q_values[j] - level).abs() <= tol)
            .collect()
    }
}

pub fn critical_profile(q: &MonicPolynomial) -> Result<CriticalProfile> {
    let n = q.degree();
    if n < 2 {
        return Err(Error::DegenerateCriticalPoints(format!(
            "degree {n} polynomial has no critical points"
        )));
    }
    let dq: Vec<f64> = q
        .derivative_coefficients()
        .iter()
        .map(|c| c / n as f64)
        .collect();
    let dq = MonicPolynomial::from_coefficients(&dq)?;
    let scale = 1.0 + dq.coefficients().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let found = real_roots(&dq, 1e-8 * scale, CLUSTER_FACTOR * scale).map_err(|im| {
        Error::DegenerateCriticalPoints(format!("Q' has non-real roots (|im| up to {im:e})"))
    })?;
    if let Some(c) = found.clusters.iter().find(|c| c.multiplicity > 1) {
        return Err(Error::DegenerateCriticalPoints(format!(
            "Q' has a root of multiplicity {} near {}",
            c.multiplicity, c.value
        )));
    }
    let xi = found.values;
    let mut q_values = Vec::with_capacity(xi.len());
    let mut classes = Vec::with_capacity(xi.len());
    for &x in &xi {
        let (v, _, dd) = q.eval_suite(x);
        if dd.abs() < 1e-12 * scale {
            return Err(Error::DegenerateCriticalPoints(format!(
                "Q'' vanishes at critical point {x}"
            )));
        }
        q_values.push(v);
        classes.push(if dd < 0.0 {
            CriticalKind::Max
        } else {
            CriticalKind::Min
        });
    }
    let pick = |kind: CriticalKind| {
        q_values
            .iter()
            .zip(&classes)
            .filter(move |(_, &c)| c == kind)
            .map(|(&v, _)| v)
    };
    let m_lower = pick(CriticalKind::Max).reduce(f64::min);
    let m_upper = pick(CriticalKind::Min).reduce(f64::max);
    Ok(CriticalProfile {
        xi,
        q_values,
        classes,
        m_lower,
        m_upper,
    })
}

/// `[−M̲, −m̄]`, with infinite ends when the corresponding extremum is absent.
pub fn admissible_interval(profile: &CriticalProfile) -> Result<(f64, f64)> {
    if let (Some(ml), Some(mu)) = (profile.m_lower, profile.m_upper) {
        if ml <= mu {
            return Err(Error::EmptyInterval {
                m_upper: mu,
                m_lower: ml,
            });
        }
    }
    Ok((
        profile.m_lower.map_or(f64::NEG_INFINITY, |v| -v),
        profile.m_upper.map_or(f64::INFINITY, |v| -v),
    ))
}

/// Roots of one member of the family.
#[derive(Debug, Clone, PartialEq)]
pub struct RootsAt {
    pub t: f64,
    /// Ascending, a merged root repeated by its multiplicity.
    pub spectrum: Spectrum,
    pub clusters: Vec<ClusteredRoot>,
}

impl RootsAt {
    pub fn max_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).max().unwrap_or(0)
    }

    pub fn multiple_roots(&self) -> Vec<ClusteredRoot> {
        self.clusters
            .iter()
            .copied()
            .filter(|c| c.multiplicity > 1)
            .collect()
    }
}

pub fn roots_at(family: &ShiftFamily, t: f64) -> Result<RootsAt> {
    let p = family.at(t);
    roots_of(&p, t)
}

fn roots_of(p: &MonicPolynomial, t: f64) -> Result<RootsAt> {
    // a bound on the root moduli sets the scale of both tolerances
    let bound = 1.0 + p.coefficients()[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = CLUSTER_FACTOR * bound;
    let found = real_roots(p, tol, tol)
        .map_err(|max_imag| Error::ComplexRootsDetected { t, max_imag })?;
    let scale = 1.0 + found.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let found = if scale < bound {
        real_roots(p, tol, CLUSTER_FACTOR * scale)
            .map_err(|max_imag| Error::ComplexRootsDetected { t, max_imag })?
    } else {
        found
    };
    Ok(RootsAt {
        t,
        spectrum: Spectrum::new(found.values)?,
        clusters: found.clusters,
    })
}

/// `P''(λ_i)/P'(λ_i)²` for every root of a distinct spectrum, product forms.
pub fn curvature_ratios(spec: &Spectrum) -> Vec<f64> {
    (0..spec.len())
        .map(|i| {
            let d = spec.pprime_at(i);
            spec.psecond_at(i) / (d * d)
        })
        .collect()
}

/// Whether `λ_1 < ξ_1 < λ_2 < ⋯ < ξ_{n−1} < λ_n` holds strictly.
pub fn interlaces(roots: &[f64], xi: &[f64]) -> bool {
    roots.len() == xi.len() + 1
        && xi
            .iter()
            .enumerate()
            .all(|(j, &x)| roots[j] < x && x < roots[j + 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Lower,
    Upper,
}

impl Endpoint {
    pub fn name(self) -> &'static str {
        match self {
            Endpoint::Lower => "lower",
            Endpoint::Upper => "upper",
        }
    }

    /// Sign of the divergence expected for merging roots.
    pub fn expected_sign(self) -> f64 {
        match self {
            Endpoint::Lower => -1.0,
            Endpoint::Upper => 1.0,
        }
    }
}

impl std::str::FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" => Ok(Endpoint::Lower),
            "upper" => Ok(Endpoint::Upper),
            other => Err(Error::BadParameters(format!(
                "endpoint must be 'lower' or 'upper', got '{other}'"
            ))),
        }
    }
}

/// Magnitude a diverging ratio must exceed at the smallest offset.
pub const BLOWUP_THRESHOLD: f64 = 1e3;
/// Allowed relative drift of bounded ratios over the last decade of offsets.
pub const BOUNDED_DRIFT: f64 = 0.1;

/// Offsets `1e-2, 5e-3, 2e-3, 1e-3, …, 1e-6`.
pub fn default_offsets() -> Vec<f64> {
    let mut out = Vec::new();
    for d in 2..=6 {
        let base = 10f64.powi(-d);
        out.push(base);
        if d < 6 {
            out.push(base / 2.0);
            out.push(base / 5.0);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupVerdict {
    /// `sign · ratio` minimised over flagged roots at the smallest offset.
    pub flagged_final: f64,
    /// Flagged `sign · ratio` increases as the offset shrinks over the last
    /// three decades.
    pub monotone: bool,
    /// Largest `|Δ ratio| / max(|ratio|, 1)` of unflagged roots over the last decade.
    pub bounded_drift: f64,
    pub diverges: bool,
}

/// Roots and ratios along `t = endpoint ± δ_m`, listed in the order the
/// offsets were given (normally decreasing, approaching the endpoint).
#[derive(Debug, Clone, PartialEq)]
pub struct RootPath {
    pub endpoint: Endpoint,
    pub endpoint_value: f64,
    pub offsets: Vec<f64>,
    pub t_samples: Vec<f64>,
    pub roots: Vec<Spectrum>,
    pub ratios: Vec<Vec<f64>>,
    /// Indices of the roots that merge at the endpoint.
    pub flagged: Vec<usize>,
    pub verdict: BlowupVerdict,
}

impl RootPath {
    pub fn max_abs_ratio(&self) -> f64 {
        self.ratios
            .iter()
            .flatten()
            .fold(0.0f64, |m, r| m.max(r.abs()))
    }

    /// Largest displacement of any root between consecutive samples.
    pub fn max_step_displacement(&self) -> f64 {
        self.roots
            .windows(2)
            .map(|w| {
                w[0].values()
                    .iter()
                    .zip(w[1].values())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// Scans the family near one end of its parameter range.
///
/// The family's range end must sit on the matching threshold `−M̲` (lower)
/// or `−m̄` (upper); otherwise the scan still runs and the error reports the
/// largest ratio seen, which stays bounded.
pub fn endpoint_blowup_scan(
    family: &ShiftFamily,
    endpoint: Endpoint,
    offsets: &[f64],
) -> Result<RootPath> {
    if offsets.is_empty() || offsets.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::BadParameters("offsets must be positive".into()));
    }
    let profile = critical_profile(family.q())?;
    let (a, b) = family.t_range();
    let (value, level) = match endpoint {
        Endpoint::Lower => (a, profile.m_lower.map(|m| -m)),
        Endpoint::Upper => (b, profile.m_upper.map(|m| -m)),
    };
    if !value.is_finite() {
        return Err(Error::BadParameters(format!(
            "{} end of the parameter range is not finite",
            endpoint.name()
        )));
    }
    let direction = match endpoint {
        Endpoint::Lower => 1.0,
        Endpoint::Upper => -1.0,
    };
    let mut t_samples = Vec::with_capacity(offsets.len());
    let mut roots = Vec::with_capacity(offsets.len());
    let mut ratios = Vec::with_capacity(offsets.len());
    for &d in offsets {
        let t = value + direction * d;
        let r = roots_at(family, t)?;
        r.spectrum.require_distinct()?;
        ratios.push(curvature_ratios(&r.spectrum));
        roots.push(r.spectrum);
        t_samples.push(t);
    }

    let is_threshold = level.is_some_and(|l| (l - value).abs() <= 1e-9 * (1.0 + l.abs()));
    let flagged: Vec<usize> = if is_threshold {
        // a critical point ξ_j at the merging level separates roots j and j+1
        profile
            .critical_points_at(-value)
            .into_iter()
            .flat_map(|j| [j, j + 1])
            .collect()
    } else {
        Vec::new()
    };
    let verdict = judge(endpoint, offsets, &ratios, &flagged);
    let path = RootPath {
        endpoint,
        endpoint_value: value,
        offsets: offsets.to_vec(),
        t_samples,
        roots,
        ratios,
        flagged,
        verdict,
    };
    if !is_threshold {
        return Err(Error::NotAThresholdEndpoint {
            endpoint: endpoint.name(),
            value,
            bound: path.max_abs_ratio(),
        });
    }
    Ok(path)
}

fn judge(endpoint: Endpoint, offsets: &[f64], ratios: &[Vec<f64>], flagged: &[usize]) -> BlowupVerdict {
    let sign = endpoint.expected_sign();
    let last = ratios.len() - 1;
    let d_min = offsets[last];
    let flagged_final = flagged
        .iter()
        .map(|&i| sign * ratios[last][i])
        .fold(f64::INFINITY, f64::min);

    let window: Vec<usize> = (0..ratios.len())
        .filter(|&m| offsets[m] <= 1e3 * d_min * (1.0 + 1e-9))
        .collect();
    let monotone = window.windows(2).all(|w| {
        flagged
            .iter()
            .all(|&i| sign * ratios[w[1]][i] > sign * ratios[w[0]][i])
    });

    let decade_start = (0..ratios.len())
        .find(|&m| offsets[m] <= 10.0 * d_min * (1.0 + 1e-9))
        .unwrap_or(last);
    let n = ratios[last].len();
    let bounded_drift = (0..n)
        .filter(|i| !flagged.contains(i))
        .map(|i| {
            let r = ratios[last][i];
            (r - ratios[decade_start][i]).abs() / r.abs().max(1.0)
        })
        .fold(0.0, f64::max);

    let diverges = !flagged.is_empty()
        && flagged_final > BLOWUP_THRESHOLD
        && monotone
        && bounded_drift < BOUNDED_DRIFT;
    BlowupVerdict {
        flagged_final,
        monotone,
        bounded_drift,
        diverges,
    }
}

/// Builds a monic polynomial from ascending coefficients (as produced by the
/// expression parser), rejecting a non-unit leading coefficient.
pub fn monic_from_ascending(coeffs: &[f64]) -> Result<MonicPolynomial> {
    let highest_first: Vec<f64> = coeffs.iter().rev().copied().collect();
    MonicPolynomial::from_coefficients(&highest_first)
}
