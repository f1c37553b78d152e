//! Scenario files: one JSON object per run, discriminated by `kind`.

use serde::{Deserialize, Serialize};

use reflexcr_core::series::{ComplexSeries, MultiSeries, PowerSeries1D};
use reflexcr_core::wedge::{chart_vars, ChartBoxes, Cone, GenericManifold};

use crate::expr::{self, Compiled};

/// Configuration problems; always exit code 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {msg}")]
pub struct ConfigError {
    pub field: String,
    pub msg: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            msg: msg.into(),
        }
    }
}

pub const DEFAULT_TRACE_ORDER: usize = 64;
pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_GRID_COUNT: usize = 1000;
pub const DEFAULT_CR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scenario {
    Reflect(Reflect),
    Harmonic(Harmonic),
    Curve(Curve),
    Eow(Eow),
    Crextend(Crextend),
    Verify(Verify),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReflectMethod {
    General,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

/// One-variable real power series: exactly one of `builtin`, `coeffs`, `expand`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series1D {
    /// `sin`, `cos`, `exp`, `sinh`, `cosh`, `geometric` or `zero`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    /// Expression in `z` whose `part` is expanded along the real axis
    /// (along the curve for `curve` traces).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expand: Option<String>,
    #[serde(default = "part_im")]
    pub part: Part,
    #[serde(default = "trace_order")]
    pub order: usize,
    #[serde(default = "one")]
    pub scale: f64,
    /// Convergence radius; polynomial and entire inputs default to infinity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl Series1D {
    pub fn expand(expr: &str, part: Part) -> Self {
        Self {
            builtin: None,
            coeffs: None,
            expand: Some(expr.to_string()),
            part,
            order: DEFAULT_TRACE_ORDER,
            scale: 1.0,
            radius: None,
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        let set = [self.builtin.is_some(), self.coeffs.is_some(), self.expand.is_some()];
        if set.iter().filter(|b| **b).count() != 1 {
            return Err(ConfigError::new(field, "exactly one of `builtin`, `coeffs`, `expand` is required"));
        }
        if let Some(b) = &self.builtin {
            if !["sin", "cos", "exp", "sinh", "cosh", "geometric", "zero"].contains(&b.as_str()) {
                return Err(ConfigError::new(format!("{field}.builtin"), format!("unknown series `{b}`")));
            }
        }
        if let Some(c) = &self.coeffs {
            if c.is_empty() || c.iter().any(|a| !a.is_finite()) {
                return Err(ConfigError::new(format!("{field}.coeffs"), "needs finite coefficients"));
            }
        }
        if let Some(e) = &self.expand {
            compile(e, &["z"], &format!("{field}.expand"))?;
        }
        if !self.scale.is_finite() {
            return Err(ConfigError::new(format!("{field}.scale"), "must be finite"));
        }
        if let Some(r) = self.radius {
            positive(r, &format!("{field}.radius"))?;
        }
        Ok(())
    }

    /// Builds the series; `curve` substitutes `z = x + i curve(x)` before expanding.
    pub fn build(&self, field: &str, curve: Option<&PowerSeries1D>) -> Result<PowerSeries1D, ConfigError> {
        let bad = |e: reflexcr_core::Error| ConfigError::new(field, e.to_string());
        let base = if let Some(b) = &self.builtin {
            match b.as_str() {
                "sin" => PowerSeries1D::sin(self.order),
                "cos" => PowerSeries1D::cos(self.order),
                "exp" => PowerSeries1D::exp(self.order),
                "sinh" => PowerSeries1D::sinh(self.order),
                "cosh" => PowerSeries1D::cosh(self.order),
                "geometric" => PowerSeries1D::geometric(self.order),
                _ => PowerSeries1D::zero(self.order, f64::INFINITY).map_err(bad)?,
            }
        } else if let Some(c) = &self.coeffs {
            PowerSeries1D::new(c.clone(), f64::INFINITY).map_err(bad)?
        } else {
            let e = compile(self.expand.as_deref().unwrap_or_default(), &["z"], field)?;
            let x = MultiSeries::polynomial(&["x"], self.order, [(vec![1], 1.0)]).map_err(bad)?;
            let y = match curve {
                None => x.zero_like(),
                Some(g) => MultiSeries::polynomial(
                    &["x"],
                    self.order,
                    g.coeffs().iter().enumerate().map(|(k, &a)| (vec![k as u32], a)),
                )
                .map_err(bad)?,
            };
            let s = e.eval_series(&[ComplexSeries::new(x, y)]).map_err(bad)?;
            let part = if self.part == Part::Re { s.re } else { s.im };
            let coeffs = (0..=self.order).map(|k| part.coeff(&[k as u32])).collect();
            let radius = curve.map(|g| g.radius()).unwrap_or(f64::INFINITY);
            PowerSeries1D::new(coeffs, radius).map_err(bad)?
        };
        let s = base.scale(self.scale);
        match self.radius {
            Some(r) => s.with_radius(r).map_err(bad),
            None => Ok(s),
        }
    }
}

/// Multivariate real series over named variables: a real polynomial
/// expression (`expr`) or explicit `terms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesSpec {
    Expr(String),
    Terms { terms: Vec<(Vec<u32>, f64)> },
}

impl SeriesSpec {
    pub fn build(&self, vars: &[&str], order: usize, field: &str) -> Result<MultiSeries, ConfigError> {
        let bad = |e: reflexcr_core::Error| ConfigError::new(field, e.to_string());
        match self {
            SeriesSpec::Terms { terms } => MultiSeries::polynomial(vars, order, terms.iter().cloned()).map_err(bad),
            SeriesSpec::Expr(src) => {
                let e = compile(src, vars, field)?;
                let template = MultiSeries::zero(vars, order, vec![f64::INFINITY; vars.len()]).map_err(bad)?;
                let args = vars
                    .iter()
                    .map(|v| template.variable_like(v).map(ComplexSeries::real))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(bad)?;
                let s = e.eval_series(&args).map_err(bad)?;
                if s.im.max_abs_coeff() > 0.0 {
                    return Err(ConfigError::new(field, "series expression must be real"));
                }
                Ok(s.re)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub generators: Vec<Vec<f64>>,
}

impl ConeSpec {
    pub fn build(&self, d: usize, field: &str) -> Result<Cone, ConfigError> {
        if self.generators.iter().any(|g| g.len() != d) {
            return Err(ConfigError::new(format!("{field}.generators"), format!("every generator needs {d} entries")));
        }
        Cone::new(self.generators.clone(), field).map_err(|e| ConfigError::new(format!("{field}.generators"), e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default = "grid_count")]
    pub count: usize,
    /// Kind-specific default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            count: DEFAULT_GRID_COUNT,
            radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxesSpec {
    Uniform(f64),
    Full(ChartBoxes),
}

impl BoxesSpec {
    pub fn boxes(&self) -> ChartBoxes {
        match *self {
            BoxesSpec::Uniform(r) => ChartBoxes::uniform(r),
            BoxesSpec::Full(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormalizationSpec {
    /// `auto` (scaled cone generators) or `identity`.
    Named(String),
    /// Rows of `A`.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reflect {
    /// Holomorphic function of `z` on the upper half disc.
    pub f: String,
    pub trace: Series1D,
    #[serde(default = "general")]
    pub method: ReflectMethod,
    #[serde(default = "one")]
    pub radius: f64,
    /// Reference for the extension; defaults to `f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "tol_reflect")]
    pub tol: f64,
    #[serde(default = "cr_tol")]
    pub cr_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    /// Holomorphic `h`; the harmonic input is `v = Re h`.
    pub h: String,
    /// Defaults to the expansion of `Re h` along the axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Series1D>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "tol_harmonic")]
    pub tol: f64,
    #[serde(default = "laplacian_tol")]
    pub laplacian_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub f: String,
    /// Real series of the curve `y = gamma(x)`.
    pub gamma: Series1D,
    /// Defaults to the expansion of `Im f` along the curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Series1D>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "tol_curve")]
    pub tol: f64,
    #[serde(default = "cr_tol")]
    pub cr_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Optional wedge certification attached to an `eow` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma27Spec {
    pub n: usize,
    /// Defining functions in `x1..xn, y1..yn, s1..sd`.
    pub phi: Vec<SeriesSpec>,
    pub sub_cone: ConeSpec,
    pub boxes: BoxesSpec,
    #[serde(default = "lemma_samples")]
    pub samples: usize,
    #[serde(default = "series_order")]
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eow {
    pub d: usize,
    /// Entire function of `w1..wd`, restricted to the wedges and the edge.
    pub g: String,
    pub cone: ConeSpec,
    /// Half-widths of the edge box; default 6 in every coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<Vec<f64>>,
    /// Truncation radius of the cone; default `6 sqrt(d)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wedge_radius: Option<f64>,
    #[serde(default = "auto_normalization")]
    pub normalization: NormalizationSpec,
    #[serde(default = "nodes")]
    pub nodes: usize,
    /// Node counts for `convergence.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma27: Option<Lemma27Spec>,
    /// `grid.radius` bounds `|ω_k|` with `w = A ω`; default 0.5.
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "tol_eow")]
    pub tol: f64,
    #[serde(default = "cr_tol")]
    pub cr_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Crextend {
    pub n: usize,
    pub d: usize,
    /// Defining functions in `x1..xn, y1..yn, s1..sd`, no terms of degree <= 1.
    pub phi: Vec<SeriesSpec>,
    pub cone: ConeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sub_cone: Option<ConeSpec>,
    /// Holomorphic `F0(z1..zn, w1..wd)`; the wedge function is its restriction.
    pub f: String,
    /// Edge trace `Im F0∘Psi~` in chart variables; defaults to the expansion of `f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<SeriesSpec>,
    #[serde(default = "series_order")]
    pub order: usize,
    #[serde(default = "expansion_order")]
    pub trace_order: usize,
    pub boxes: BoxesSpec,
    #[serde(default = "one")]
    pub manifold_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Vec<Vec<f64>>>,
    #[serde(default = "nodes")]
    pub nodes: usize,
    #[serde(default = "lemma_samples")]
    pub lemma_samples: usize,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "tol_crextend")]
    pub tol: f64,
    #[serde(default = "cr_tol")]
    pub cr_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verify {
    pub n: usize,
    pub d: usize,
    pub phi: Vec<SeriesSpec>,
    #[serde(default = "series_order")]
    pub order: usize,
    /// Functions of `z1..zn, w1..wd` compared on the manifold.
    pub f: String,
    pub g: String,
    /// Base point in chart coordinates `(z, s)` as `[re, im]` pairs; default origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<[f64; 2]>>,
    /// `grid.radius` is the chart box radius for edge points; default 0.3.
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "expect_pass")]
    pub expect: Expect,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}
fn part_im() -> Part {
    Part::Im
}
fn trace_order() -> usize {
    DEFAULT_TRACE_ORDER
}
fn general() -> ReflectMethod {
    ReflectMethod::General
}
fn grid_count() -> usize {
    DEFAULT_GRID_COUNT
}
fn nodes() -> usize {
    DEFAULT_NODES
}
fn lemma_samples() -> usize {
    reflexcr_core::crext::DEFAULT_LEMMA_SAMPLES
}
fn series_order() -> usize {
    16
}
fn expansion_order() -> usize {
    24
}
fn auto_normalization() -> NormalizationSpec {
    NormalizationSpec::Named("auto".into())
}
fn expect_pass() -> Expect {
    Expect::Pass
}
fn cr_tol() -> f64 {
    DEFAULT_CR_TOL
}
fn laplacian_tol() -> f64 {
    reflexcr_core::reflection::HARMONIC_TOL
}
fn tol_reflect() -> f64 {
    1e-10
}
fn tol_harmonic() -> f64 {
    1e-12
}
fn tol_curve() -> f64 {
    1e-6
}
fn tol_eow() -> f64 {
    1e-10
}
fn tol_crextend() -> f64 {
    1e-8
}

pub(crate) fn compile(src: &str, names: &[&str], field: &str) -> Result<Compiled, ConfigError> {
    let e = expr::parse(src).map_err(|e| ConfigError::new(field, e.to_string()))?;
    e.compile(names).map_err(|m| ConfigError::new(field, m))
}

fn positive(x: f64, field: &str) -> Result<(), ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {x}")))
    }
}

/// `z1..zn, w1..wd`.
pub fn ambient_vars(n: usize, d: usize) -> Vec<String> {
    (1..=n).map(|j| format!("z{j}")).chain((1..=d).map(|k| format!("w{k}"))).collect()
}

fn check_phi(phi: &[SeriesSpec], n: usize, d: usize, order: usize, field: &str) -> Result<(), ConfigError> {
    if phi.len() != d {
        return Err(ConfigError::new(field, format!("expected {d} defining functions, got {}", phi.len())));
    }
    let vars = chart_vars(n, d);
    let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
    let mut built = Vec::with_capacity(d);
    for (k, p) in phi.iter().enumerate() {
        built.push(p.build(&vars, order, &format!("{field}[{k}]"))?);
    }
    GenericManifold::with_radius(n, d, built, 1.0).map_err(|e| ConfigError::new(field, e.to_string()))?;
    Ok(())
}

fn check_grid(g: &Grid) -> Result<(), ConfigError> {
    if g.count == 0 {
        return Err(ConfigError::new("grid.count", "must be at least 1"));
    }
    if let Some(r) = g.radius {
        positive(r, "grid.radius")?;
    }
    Ok(())
}

fn check_nodes(nodes: usize, field: &str) -> Result<(), ConfigError> {
    if nodes == 0 {
        Err(ConfigError::new(field, "must be at least 1"))
    } else {
        Ok(())
    }
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Reflect(_) => "reflect",
            Scenario::Harmonic(_) => "harmonic",
            Scenario::Curve(_) => "curve",
            Scenario::Eow(_) => "eow",
            Scenario::Crextend(_) => "crextend",
            Scenario::Verify(_) => "verify",
        }
    }

    pub fn seed_mut(&mut self) -> &mut u64 {
        match self {
            Scenario::Reflect(s) => &mut s.seed,
            Scenario::Harmonic(s) => &mut s.seed,
            Scenario::Curve(s) => &mut s.seed,
            Scenario::Eow(s) => &mut s.seed,
            Scenario::Crextend(s) => &mut s.seed,
            Scenario::Verify(s) => &mut s.seed,
        }
    }

    /// Main tolerance; `verify` has fixed gates and none.
    pub fn tol_mut(&mut self) -> Option<&mut f64> {
        match self {
            Scenario::Reflect(s) => Some(&mut s.tol),
            Scenario::Harmonic(s) => Some(&mut s.tol),
            Scenario::Curve(s) => Some(&mut s.tol),
            Scenario::Eow(s) => Some(&mut s.tol),
            Scenario::Crextend(s) => Some(&mut s.tol),
            Scenario::Verify(_) => None,
        }
    }

    pub fn nodes_mut(&mut self) -> Option<&mut usize> {
        match self {
            Scenario::Eow(s) => Some(&mut s.nodes),
            Scenario::Crextend(s) => Some(&mut s.nodes),
            _ => None,
        }
    }

    /// Checks everything that can be checked without running a module.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            Scenario::Reflect(s) => {
                compile(&s.f, &["z"], "f")?;
                if let Some(o) = &s.oracle {
                    compile(o, &["z"], "oracle")?;
                }
                s.trace.validate("trace")?;
                positive(s.radius, "radius")?;
                positive(s.tol, "tol")?;
                positive(s.cr_tol, "cr_tol")?;
                check_grid(&s.grid)
            }
            Scenario::Harmonic(s) => {
                compile(&s.h, &["z"], "h")?;
                if let Some(t) = &s.trace {
                    t.validate("trace")?;
                }
                positive(s.tol, "tol")?;
                positive(s.laplacian_tol, "laplacian_tol")?;
                check_grid(&s.grid)
            }
            Scenario::Curve(s) => {
                compile(&s.f, &["z"], "f")?;
                if let Some(o) = &s.oracle {
                    compile(o, &["z"], "oracle")?;
                }
                s.gamma.validate("gamma")?;
                if s.gamma.expand.is_some() {
                    return Err(ConfigError::new("gamma.expand", "the curve must be given by `builtin` or `coeffs`"));
                }
                if let Some(t) = &s.trace {
                    t.validate("trace")?;
                }
                positive(s.tol, "tol")?;
                positive(s.cr_tol, "cr_tol")?;
                check_grid(&s.grid)
            }
            Scenario::Eow(s) => {
                if s.d == 0 {
                    return Err(ConfigError::new("d", "must be at least 1"));
                }
                let names = ambient_vars(0, s.d);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                compile(&s.g, &names, "g")?;
                s.cone.build(s.d, "cone")?;
                if let Some(e) = &s.edge {
                    if e.len() != s.d {
                        return Err(ConfigError::new("edge", format!("expected {} entries", s.d)));
                    }
                    for (k, &r) in e.iter().enumerate() {
                        positive(r, &format!("edge[{k}]"))?;
                    }
                }
                if let Some(r) = s.wedge_radius {
                    positive(r, "wedge_radius")?;
                }
                match &s.normalization {
                    NormalizationSpec::Named(n) if n == "auto" || n == "identity" => {}
                    NormalizationSpec::Named(n) => {
                        return Err(ConfigError::new("normalization", format!("expected `auto`, `identity` or a matrix, got `{n}`")))
                    }
                    NormalizationSpec::Matrix(rows) => {
                        if rows.len() != s.d || rows.iter().any(|r| r.len() != s.d) {
                            return Err(ConfigError::new("normalization", format!("expected a {0}x{0} matrix", s.d)));
                        }
                    }
                }
                check_nodes(s.nodes, "nodes")?;
                for (k, &n) in s.sweep.iter().flatten().enumerate() {
                    check_nodes(n, &format!("sweep[{k}]"))?;
                }
                if let Some(l) = &s.lemma27 {
                    check_phi(&l.phi, l.n, s.d, l.order, "lemma27.phi")?;
                    l.sub_cone.build(s.d, "lemma27.sub_cone")?;
                    let b = l.boxes.boxes();
                    for (v, f) in [(b.z_radius, "z_radius"), (b.s_radius, "s_radius"), (b.t_radius, "t_radius")] {
                        positive(v, &format!("lemma27.boxes.{f}"))?;
                    }
                }
                positive(s.tol, "tol")?;
                positive(s.cr_tol, "cr_tol")?;
                check_grid(&s.grid)
            }
            Scenario::Crextend(s) => {
                if s.d == 0 {
                    return Err(ConfigError::new("d", "must be at least 1"));
                }
                check_phi(&s.phi, s.n, s.d, s.order, "phi")?;
                s.cone.build(s.d, "cone")?;
                if let Some(c) = &s.sub_cone {
                    c.build(s.d, "sub_cone")?;
                }
                let names = ambient_vars(s.n, s.d);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                compile(&s.f, &names, "f")?;
                if let Some(t) = &s.trace {
                    let vars = chart_vars(s.n, s.d);
                    let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
                    t.build(&vars, s.trace_order, "trace")?;
                }
                let b = s.boxes.boxes();
                for (v, f) in [(b.z_radius, "z_radius"), (b.s_radius, "s_radius"), (b.t_radius, "t_radius")] {
                    positive(v, &format!("boxes.{f}"))?;
                }
                positive(s.manifold_radius, "manifold_radius")?;
                if let Some(rows) = &s.normalization {
                    if rows.len() != s.d || rows.iter().any(|r| r.len() != s.d) {
                        return Err(ConfigError::new("normalization", format!("expected a {0}x{0} matrix", s.d)));
                    }
                }
                check_nodes(s.nodes, "nodes")?;
                check_nodes(s.lemma_samples, "lemma_samples")?;
                positive(s.tol, "tol")?;
                positive(s.cr_tol, "cr_tol")?;
                check_grid(&s.grid)
            }
            Scenario::Verify(s) => {
                if s.d == 0 {
                    return Err(ConfigError::new("d", "must be at least 1"));
                }
                check_phi(&s.phi, s.n, s.d, s.order, "phi")?;
                let names = ambient_vars(s.n, s.d);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                compile(&s.f, &names, "f")?;
                compile(&s.g, &names, "g")?;
                if let Some(b) = &s.base {
                    if b.len() != s.n + s.d {
                        return Err(ConfigError::new("base", format!("expected {} coordinates", s.n + s.d)));
                    }
                }
                check_grid(&s.grid)
            }
        }
    }
}

/// Parses and validates a JSON scenario. Errors name the offending field
/// or, for malformed JSON, the line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::new(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let kind = match value.get("kind") {
        Some(serde_json::Value::String(k)) => k.clone(),
        Some(_) => return Err(ConfigError::new("kind", "must be a string")),
        None => return Err(ConfigError::new("kind", "missing field")),
    };
    if !["reflect", "harmonic", "curve", "eow", "crextend", "verify"].contains(&kind.as_str()) {
        return Err(ConfigError::new("kind", format!("unknown kind `{kind}`")));
    }
    let scenario: Scenario = serde_json::from_value(value).map_err(|e| ConfigError::new(kind.as_str(), e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}
