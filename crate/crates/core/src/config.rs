//! Suite configuration. Settings come from three layers, later ones winning:
//! built-in defaults, command-line flags, and a TOML file.
//!
//! ```toml
//! [run]
//! suite = "div-identity"
//! metric = "bumpy"
//! grid = "20x20"
//! seed = 11
//!
//! [metrics.bumpy]
//! lo = [0, 0]
//! hi = ["2*pi", "2*pi"]
//! periodic = [true, true]
//! g = [["1 + 0.1*sin(x2)", "0"], ["0", "1"]]
//!
//! [tensors.t]
//! metric = "euclidean-2"
//! a = [["x1", "0"], ["0", "x2 + 3"]]
//!
//! [immersions.sphere]
//! lo = [0.2, 0]
//! hi = ["pi - 0.2", "2*pi"]
//! periodic = [false, true]
//! f = ["sin(x1)*cos(x2)", "sin(x1)*sin(x2)", "cos(x1)", "0"]
//! ```
//!
//! Names defined in the file shadow built-in fixtures of the same name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::codazzi::{synthetic, SymmetricTensorField};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{builtins, ChartedMetric, Domain};
use crate::hypersurface::{builtins as immersions, Immersion};
use crate::polyfamily::Endpoint;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    DivIdentity,
    CodazziLemmas,
    SympolyIdentities,
    PolyfamilyScan,
    HypersurfaceIsoparametric,
    IntegratedTorus,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::DivIdentity,
        Suite::CodazziLemmas,
        Suite::SympolyIdentities,
        Suite::PolyfamilyScan,
        Suite::HypersurfaceIsoparametric,
        Suite::IntegratedTorus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DivIdentity => "div-identity",
            Suite::CodazziLemmas => "codazzi-lemmas",
            Suite::SympolyIdentities => "sympoly-identities",
            Suite::PolyfamilyScan => "polyfamily-scan",
            Suite::HypersurfaceIsoparametric => "hypersurface-isoparametric",
            Suite::IntegratedTorus => "integrated-torus",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::Config(format!("unknown suite '{s}'; known: {}", known.join(", ")))
            })
    }
}

/// Optional settings, as given by flags or by the `[run]` table of a file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub suite: Option<String>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub metric: Option<String>,
    pub tensor: Option<String>,
    pub immersion: Option<String>,
    /// Points per axis, `"50x50"` or a single count used for every axis.
    pub grid: Option<String>,
    pub q: Option<String>,
    pub endpoint: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

/// A number, or a constant expression such as `"2*pi"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Constant {
    Number(f64),
    Expr(String),
}

impl Constant {
    fn value(&self) -> Result<f64> {
        match self {
            Constant::Number(v) => Ok(*v),
            Constant::Expr(s) => {
                let e = Expr::parse(s)?;
                e.check_dim(0)?;
                Ok(e.eval(&[]))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDef {
    pub lo: Vec<Constant>,
    pub hi: Vec<Constant>,
    pub periodic: Option<Vec<bool>>,
    /// Symmetric matrix of component expressions in `x1..xn`.
    pub g: Vec<Vec<String>>,
    pub guard: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDef {
    /// A metric defined in the same file or a built-in one.
    pub metric: String,
    pub a: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionDef {
    pub lo: Vec<Constant>,
    pub hi: Vec<Constant>,
    pub periodic: Option<Vec<bool>>,
    /// `n + 2` component expressions of a unit vector.
    pub f: Vec<String>,
    pub guard: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: Overrides,
    #[serde(default)]
    pub metrics: BTreeMap<String, MetricDef>,
    #[serde(default)]
    pub tensors: BTreeMap<String, TensorDef>,
    #[serde(default)]
    pub immersions: BTreeMap<String, ImmersionDef>,
}

impl FromStr for ConfigFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }
}

/// Fully merged settings for one suite run. `None` means the suite default.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub metric: Option<String>,
    pub tensor: Option<String>,
    pub immersion: Option<String>,
    pub grid: Option<Vec<usize>>,
    pub q: Option<String>,
    pub endpoint: Option<Endpoint>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub metrics: BTreeMap<String, MetricDef>,
    pub tensors: BTreeMap<String, TensorDef>,
    pub immersions: BTreeMap<String, ImmersionDef>,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            seed: DEFAULT_SEED,
            n: None,
            samples: None,
            metric: None,
            tensor: None,
            immersion: None,
            grid: None,
            q: None,
            endpoint: None,
            tol: None,
            out: None,
            metrics: BTreeMap::new(),
            tensors: BTreeMap::new(),
            immersions: BTreeMap::new(),
        }
    }

    /// Defaults, then `flags`, then the file's `[run]` table and definitions.
    /// The suite name may come from either layer.
    pub fn layered(suite: Option<&str>, flags: &Overrides, file: Option<ConfigFile>) -> Result<Self> {
        let from_file = file.as_ref().and_then(|f| f.run.suite.clone());
        let name = from_file
            .as_deref()
            .or(flags.suite.as_deref())
            .or(suite)
            .ok_or_else(|| Error::Config("no suite given".into()))?;
        let mut cfg = SuiteConfig::new(name.parse()?);
        cfg.apply(flags)?;
        if let Some(file) = file {
            cfg.apply(&file.run)?;
            cfg.metrics = file.metrics;
            cfg.tensors = file.tensors;
            cfg.immersions = file.immersions;
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(s) = &o.suite {
            self.suite = s.parse()?;
        }
        if let Some(n) = o.n {
            if n < 2 {
                return Err(Error::Config(format!("n must be at least 2, got {n}")));
            }
            self.n = Some(n);
        }
        if let Some(s) = o.samples {
            if s == 0 {
                return Err(Error::Config("samples must be positive".into()));
            }
            self.samples = Some(s);
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(g) = &o.grid {
            self.grid = Some(parse_grid(g)?);
        }
        if let Some(e) = &o.endpoint {
            self.endpoint = Some(e.parse().map_err(|e: Error| Error::Config(e.to_string()))?);
        }
        if let Some(t) = o.tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!("tolerance must be positive, got {t}")));
            }
            self.tol = Some(t);
        }
        let set = |dst: &mut Option<String>, src: &Option<String>| {
            if src.is_some() {
                dst.clone_from(src);
            }
        };
        set(&mut self.metric, &o.metric);
        set(&mut self.tensor, &o.tensor);
        set(&mut self.immersion, &o.immersion);
        set(&mut self.q, &o.q);
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        Ok(())
    }

    /// Grid counts for a chart of dimension `n`: the configured grid (a single
    /// count is repeated) or `default` on every axis.
    pub fn grid_for(&self, n: usize, default: usize) -> Result<Vec<usize>> {
        match &self.grid {
            None => Ok(vec![default; n]),
            Some(g) if g.len() == 1 => Ok(vec![g[0]; n]),
            Some(g) if g.len() == n => Ok(g.clone()),
            Some(g) => Err(Error::Config(format!(
                "grid has {} axes but the chart is {n}-dimensional",
                g.len()
            ))),
        }
    }

    /// A metric defined in the file, else a built-in one.
    pub fn resolve_metric(&self, name: &str, index: u64) -> Result<ChartedMetric> {
        match self.metrics.get(name) {
            Some(def) => metric_from_def(name, def).map_err(as_config(name)),
            None => builtins::builtin_metric(name, self.seed, index),
        }
    }

    pub fn resolve_tensor(&self, name: &str) -> Result<SymmetricTensorField> {
        match self.tensors.get(name) {
            Some(def) => {
                let metric = self.resolve_metric(&def.metric, 0)?;
                tensor_from_def(name, def, metric).map_err(as_config(name))
            }
            None => synthetic::builtin_field(name, self.n.unwrap_or(3)),
        }
    }

    pub fn resolve_immersion(&self, name: &str) -> Result<Immersion> {
        match self.immersions.get(name) {
            Some(def) => immersion_from_def(name, def).map_err(as_config(name)),
            None => immersions::builtin_immersion(name).map_err(as_config(name)),
        }
    }
}

fn as_config(name: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config(_) => e,
        other => Error::Config(format!("{name}: {other}")),
    }
}

/// `"50x50"`, `"8x8x8"` or `"12"`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let counts: Vec<usize> = s
        .split(['x', 'X'])
        .map(|part| part.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("grid must look like 50x50, got '{s}'")))?;
    if counts.contains(&0) {
        return Err(Error::Config(format!("grid axis with zero points in '{s}'")));
    }
    Ok(counts)
}

fn domain_from(lo: &[Constant], hi: &[Constant], periodic: &Option<Vec<bool>>) -> Result<Domain> {
    let lo: Vec<f64> = lo.iter().map(Constant::value).collect::<Result<_>>()?;
    let hi: Vec<f64> = hi.iter().map(Constant::value).collect::<Result<_>>()?;
    let periodic = periodic.clone().unwrap_or_else(|| vec![false; lo.len()]);
    Domain::new(lo, hi, periodic)
}

/// Parses a symmetric matrix of expressions. Symmetry is required
/// syntactically, entry by entry.
fn symmetric_exprs(rows: &[Vec<String>], n: usize, what: &str) -> Result<Vec<Vec<Expr>>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("{what} must be a {n}x{n} matrix")));
    }
    let parsed: Vec<Vec<Expr>> = rows
        .iter()
        .map(|r| r.iter().map(|s| Expr::parse(s)).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()?;
    for i in 0..n {
        for j in 0..n {
            parsed[i][j].check_dim(n)?;
            if parsed[i][j] != parsed[j][i] {
                return Err(Error::Config(format!(
                    "{what} is not symmetric: entry ({}, {}) differs from ({}, {})",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(parsed)
}

fn matrix_fn(exprs: Vec<Vec<Expr>>) -> Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync> {
    let n = exprs.len();
    Arc::new(move |p| DMatrix::from_fn(n, n, |i, j| exprs[i][j].eval(p)))
}

pub fn metric_from_def(name: &str, def: &MetricDef) -> Result<ChartedMetric> {
    let domain = domain_from(&def.lo, &def.hi, &def.periodic)?;
    let g = symmetric_exprs(&def.g, domain.dim(), "g")?;
    let mut metric = ChartedMetric::new(name, domain, matrix_fn(g));
    if let Some(guard) = def.guard {
        metric = metric.with_guard(guard);
    }
    if let Some(h) = def.step {
        if !(h > 0.0) {
            return Err(Error::Config(format!("step must be positive, got {h}")));
        }
        metric = metric.with_step(h);
    }
    Ok(metric)
}

pub fn tensor_from_def(name: &str, def: &TensorDef, metric: ChartedMetric) -> Result<SymmetricTensorField> {
    let a = symmetric_exprs(&def.a, metric.dim(), "a")?;
    Ok(SymmetricTensorField::new(name, metric, matrix_fn(a)))
}

pub fn immersion_from_def(name: &str, def: &ImmersionDef) -> Result<Immersion> {
    let domain = domain_from(&def.lo, &def.hi, &def.periodic)?;
    let n = domain.dim();
    if n < 2 {
        return Err(Error::Config(format!("hypersurface charts need dimension at least 2, got {n}")));
    }
    if def.f.len() != n + 2 {
        return Err(Error::Config(format!(
            "an immersion of a {n}-dimensional chart needs {} components, got {}",
            n + 2,
            def.f.len()
        )));
    }
    let f: Vec<Expr> = def
        .f
        .iter()
        .map(|s| Expr::parse(s))
        .collect::<std::result::Result<_, _>>()?;
    for e in &f {
        e.check_dim(n)?;
    }
    let imm = Immersion::new(
        name,
        domain,
        Arc::new(move |p| DVector::from_iterator(f.len(), f.iter().map(|e| e.eval(p)))),
    );
    Ok(match def.guard {
        Some(g) => imm.with_guard(g),
        None => imm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = r#"
        [run]
        metric = "bumpy"
        grid = "6x6"
        seed = 11

        [metrics.bumpy]
        lo = [0, 0]
        hi = ["2*pi", "2*pi"]
        periodic = [true, true]
        g = [["1 + 0.1*sin(x2)", "0"], ["0", "1"]]

        [tensors.t]
        metric = "euclidean-2"
        a = [["x1", "0"], ["0", "x2 + 3"]]

        [immersions.sphere]
        lo = [0.2, 0]
        hi = ["pi - 0.2", "2*pi"]
        periodic = [false, true]
        f = ["sin(x1)*cos(x2)", "sin(x1)*sin(x2)", "cos(x1)", "0"]
    "#;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Config(_))));
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("50x50").unwrap(), vec![50, 50]);
        assert_eq!(parse_grid("7").unwrap(), vec![7]);
        assert!(parse_grid("5x0").is_err());
        assert!(parse_grid("ax5").is_err());
    }

    #[test]
    fn file_overrides_flags_overrides_defaults() {
        let flags = Overrides {
            grid: Some("3x3".into()),
            seed: Some(5),
            tol: Some(1e-3),
            ..Default::default()
        };
        let file: ConfigFile = FILE.parse().unwrap();
        let cfg = SuiteConfig::layered(Some("div-identity"), &flags, Some(file)).unwrap();
        assert_eq!(cfg.grid, Some(vec![6, 6]));
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.tol, Some(1e-3));
        assert_eq!(cfg.metric.as_deref(), Some("bumpy"));

        let plain = SuiteConfig::layered(Some("div-identity"), &Overrides::default(), None).unwrap();
        assert_eq!(plain.seed, DEFAULT_SEED);
        assert_eq!(plain.grid, None);
    }

    #[test]
    fn definitions_resolve() {
        let file: ConfigFile = FILE.parse().unwrap();
        let cfg = SuiteConfig::layered(Some("div-identity"), &Overrides::default(), Some(file)).unwrap();
        let m = cfg.resolve_metric("bumpy", 0).unwrap();
        let g = m.g(&[0.0, std::f64::consts::FRAC_PI_2]);
        assert!((g[(0, 0)] - 1.1).abs() < 1e-15);
        assert!((m.domain.hi[0] - 2.0 * std::f64::consts::PI).abs() < 1e-15);

        let t = cfg.resolve_tensor("t").unwrap();
        assert_eq!(t.a(&[0.25, 0.5])[(1, 1)], 3.5);

        let c = cfg.resolve_immersion("sphere").unwrap();
        assert!((c.f(&[1.0, 2.0]).norm() - 1.0).abs() < 1e-15);

        assert!(cfg.resolve_metric("round-s2", 0).is_ok());
        assert!(matches!(cfg.resolve_metric("missing", 0), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_definitions() {
        let asym = r#"
            [metrics.m]
            lo = [0, 0]
            hi = [1, 1]
            g = [["1", "x1"], ["0", "1"]]
        "#;
        let file: ConfigFile = asym.parse().unwrap();
        let cfg = SuiteConfig::layered(Some("div-identity"), &Overrides::default(), Some(file)).unwrap();
        assert!(matches!(cfg.resolve_metric("m", 0), Err(Error::Config(_))));

        let unknown_key = "[run]\nsuit = \"div-identity\"\n";
        assert!(matches!(unknown_key.parse::<ConfigFile>(), Err(Error::Config(_))));

        let out_of_range = r#"
            [immersions.c]
            lo = [0, 0]
            hi = [1, 1]
            f = ["cos(x3)", "sin(x1)", "0", "0"]
        "#;
        let file: ConfigFile = out_of_range.parse().unwrap();
        let cfg = SuiteConfig::layered(Some("div-identity"), &Overrides::default(), Some(file)).unwrap();
        assert!(matches!(cfg.resolve_immersion("c"), Err(Error::Config(_))));

        let curve = r#"
            [immersions.c]
            lo = [0]
            hi = [1]
            f = ["cos(x1)", "sin(x1)", "0"]
        "#;
        let file: ConfigFile = curve.parse().unwrap();
        let cfg = SuiteConfig::layered(Some("div-identity"), &Overrides::default(), Some(file)).unwrap();
        assert!(matches!(cfg.resolve_immersion("c"), Err(Error::Config(_))));
    }
}
