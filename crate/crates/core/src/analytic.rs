//! Complex points, domains, evaluable analytic functions and the numerical
//! holomorphy checks every other module reports through.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Closed tolerance used for every domain membership test.
pub const DOMAIN_TOL: f64 = 1e-12;

/// Default central-difference step for [`cr_residual`].
pub const DEFAULT_STEP: f64 = 1e-5;

/// A point of `C^dim` with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("complex vector must have dim >= 1".into()));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite(format!("complex vector {}", fmt_point(&entries))));
        }
        Ok(Self(entries))
    }

    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn from_reals(re: &[f64]) -> Result<Self> {
        Self::new(re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl fmt::Display for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_point(&self.0))
    }
}

pub(crate) fn fmt_point(p: &[Complex64]) -> String {
    let parts: Vec<String> = p.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

/// Half-plane constraint on a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Constraint {
    ImPositive,
    ImNonNegative,
    ImNegative,
    ImNonPositive,
    Real,
}

impl Constraint {
    fn holds(self, z: Complex64, tol: f64) -> bool {
        match self {
            Constraint::ImPositive => z.im > 0.0,
            Constraint::ImNonNegative => z.im >= -tol,
            Constraint::ImNegative => z.im < 0.0,
            Constraint::ImNonPositive => z.im <= tol,
            Constraint::Real => z.im.abs() <= tol,
        }
    }
}

/// Polydisc `|z_j - c_j| <= r_j` intersected with optional half-plane constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainBox {
    center: ComplexVector,
    radii: Vec<f64>,
    constraints: Vec<(usize, Constraint)>,
}

impl DomainBox {
    pub fn new(center: ComplexVector, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != center.dim() {
            return Err(Error::DimensionMismatch {
                expected: center.dim(),
                got: radii.len(),
            });
        }
        if radii.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidInput("domain radii must be positive".into()));
        }
        Ok(Self {
            center,
            radii,
            constraints: Vec::new(),
        })
    }

    /// Polydisc of common radius `r` around the origin of `C^dim`.
    pub fn polydisc(dim: usize, r: f64) -> Result<Self> {
        Self::new(
            ComplexVector::new(vec![Complex64::new(0.0, 0.0); dim])?,
            vec![r; dim],
        )
    }

    pub fn with_constraint(mut self, coord: usize, c: Constraint) -> Result<Self> {
        if coord >= self.dim() {
            return Err(Error::InvalidInput(format!(
                "constraint on coordinate {coord} of a {}-dimensional box",
                self.dim()
            )));
        }
        self.constraints.push((coord, c));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn center(&self) -> &ComplexVector {
        &self.center
    }

    pub fn contains(&self, p: &[Complex64], tol: f64) -> bool {
        p.len() == self.dim()
            && p
                .iter()
                .zip(self.center.as_slice())
                .zip(&self.radii)
                .all(|((z, c), r)| (z - c).norm() <= r + tol)
            && self
                .constraints
                .iter()
                .all(|&(j, c)| c.holds(p[j], tol))
    }
}

type Predicate = Arc<dyn Fn(&[Complex64]) -> bool + Send + Sync>;

/// Declared domain of an [`AnalyticFunction`].
#[derive(Clone)]
pub enum Domain {
    Everywhere,
    Box(DomainBox),
    Union(Vec<Domain>),
    /// Membership decided by a caller-supplied test (wedges, regions above curves).
    Predicate { label: String, test: Predicate },
}

impl Domain {
    pub fn predicate(
        label: impl Into<String>,
        test: impl Fn(&[Complex64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Domain::Predicate {
            label: label.into(),
            test: Arc::new(test),
        }
    }

    pub fn contains(&self, p: &[Complex64]) -> bool {
        match self {
            Domain::Everywhere => true,
            Domain::Box(b) => b.contains(p, DOMAIN_TOL),
            Domain::Union(parts) => parts.iter().any(|d| d.contains(p)),
            Domain::Predicate { test, .. } => test(p),
        }
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Everywhere => f.write_str("Everywhere"),
            Domain::Box(b) => f.debug_tuple("Box").field(b).finish(),
            Domain::Union(parts) => f.debug_tuple("Union").field(parts).finish(),
            Domain::Predicate { label, .. } => write!(f, "Predicate({label})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    BlackBox,
    Polynomial,
    SeriesBacked,
    ConstructedExtension,
}

type Evaluator = Arc<dyn Fn(&[Complex64]) -> Result<Complex64> + Send + Sync>;

/// Complex-valued map on a declared domain of `C^arity`.
///
/// Evaluation validates arity, domain membership and finiteness of both the
/// argument and the result; NaN or infinity is always an error.
#[derive(Clone)]
pub struct AnalyticFunction {
    arity: usize,
    domain: Domain,
    provenance: Provenance,
    label: String,
    eval: Evaluator,
}

impl AnalyticFunction {
    pub fn new(
        arity: usize,
        domain: Domain,
        provenance: Provenance,
        label: impl Into<String>,
        f: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::fallible(arity, domain, provenance, label, move |p| Ok(f(p)))
    }

    /// Like [`AnalyticFunction::new`] for evaluators that can fail on their own
    /// (nested evaluations, chart inversions).
    pub fn fallible(
        arity: usize,
        domain: Domain,
        provenance: Provenance,
        label: impl Into<String>,
        f: impl Fn(&[Complex64]) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        assert!(arity > 0, "analytic function arity must be positive");
        Self {
            arity,
            domain,
            provenance,
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    /// Black-box function defined on all of `C^arity`.
    pub fn entire(
        arity: usize,
        label: impl Into<String>,
        f: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(arity, Domain::Everywhere, Provenance::BlackBox, label, f)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same evaluator, different declared domain.
    pub fn restrict(&self, domain: Domain, label: impl Into<String>) -> Self {
        Self {
            domain,
            label: label.into(),
            ..self.clone()
        }
    }

    pub fn contains(&self, p: &[Complex64]) -> bool {
        p.len() == self.arity && self.domain.contains(p)
    }

    pub fn eval(&self, p: &[Complex64]) -> Result<Complex64> {
        if p.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                got: p.len(),
            });
        }
        if p.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite(format!("argument of {}", self.label)));
        }
        if !self.domain.contains(p) {
            return Err(Error::DomainViolation {
                point: fmt_point(p),
                context: self.label.clone(),
            });
        }
        let v = (self.eval)(p)?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!(
                "value of {} at {}",
                self.label,
                fmt_point(p)
            )));
        }
        Ok(v)
    }

    pub fn eval1(&self, z: Complex64) -> Result<Complex64> {
        self.eval(&[z])
    }
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .field("provenance", &self.provenance)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Evaluation points paired with values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSample {
    points: Vec<ComplexVector>,
    values: Vec<Complex64>,
}

impl GridSample {
    pub fn new(points: Vec<ComplexVector>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: values.len(),
            });
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            let key: Vec<(u64, u64)> = p
                .as_slice()
                .iter()
                .map(|z| (z.re.to_bits(), z.im.to_bits()))
                .collect();
            if !seen.insert(key) {
                return Err(Error::InvalidInput(format!("duplicate grid point {p}")));
            }
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[ComplexVector] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Pointwise comparison against an oracle with Cauchy–Riemann residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub grid: GridSample,
    pub oracle_values: Option<Vec<Complex64>>,
    pub abs_errors: Vec<f64>,
    pub cr_residuals: Vec<f64>,
    pub max_abs_error: f64,
    pub max_cr_residual: f64,
}

impl ResidualReport {
    pub fn new(
        grid: GridSample,
        oracle_values: Option<Vec<Complex64>>,
        cr_residuals: Vec<f64>,
    ) -> Result<Self> {
        if cr_residuals.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: cr_residuals.len(),
            });
        }
        let abs_errors = match &oracle_values {
            Some(o) if o.len() != grid.len() => {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: o.len(),
                })
            }
            Some(o) => grid
                .values()
                .iter()
                .zip(o)
                .map(|(v, w)| (v - w).norm())
                .collect(),
            None => vec![0.0; grid.len()],
        };
        let max_abs_error = abs_errors.iter().copied().fold(0.0, f64::max);
        let max_cr_residual = cr_residuals.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            grid,
            oracle_values,
            abs_errors,
            cr_residuals,
            max_abs_error,
            max_cr_residual,
        })
    }
}

/// Evaluates `f` at every point; the first failing point (in input order) is reported.
pub fn evaluate_on_grid(f: &AnalyticFunction, points: &[ComplexVector]) -> Result<GridSample> {
    let values: Vec<Result<Complex64>> = points
        .par_iter()
        .map(|p| f.eval(p.as_slice()))
        .collect();
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    GridSample::new(points.to_vec(), values)
}

/// Central-difference estimate of `max_j |df/dzbar_j|` over all coordinates.
pub fn cr_residual(f: &AnalyticFunction, point: &ComplexVector, step: f64) -> Result<f64> {
    let coords: Vec<usize> = (0..point.dim()).collect();
    cr_residual_in(f, point, step, &coords)
}

/// Like [`cr_residual`], restricted to the listed coordinates.
pub fn cr_residual_in(
    f: &AnalyticFunction,
    point: &ComplexVector,
    step: f64,
    coords: &[usize],
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let p = point.as_slice();
    let shifted = |j: usize, delta: Complex64| {
        let mut q = p.to_vec();
        q[j] += delta;
        q
    };
    let mut worst: f64 = 0.0;
    for &j in coords {
        if j >= p.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                got: j + 1,
            });
        }
        // stencil must sit inside the domain with room to spare
        for delta in [
            Complex64::new(2.0 * step, 0.0),
            Complex64::new(-2.0 * step, 0.0),
            Complex64::new(0.0, 2.0 * step),
            Complex64::new(0.0, -2.0 * step),
        ] {
            let q = shifted(j, delta);
            if !f.contains(&q) {
                return Err(Error::DomainViolation {
                    point: fmt_point(&q),
                    context: format!("cr_residual stencil of {}", f.label()),
                });
            }
        }
        let h = Complex64::new(step, 0.0);
        let ih = Complex64::new(0.0, step);
        let dx = (f.eval(&shifted(j, h))? - f.eval(&shifted(j, -h))?) / (2.0 * step);
        let dy = (f.eval(&shifted(j, ih))? - f.eval(&shifted(j, -ih))?) / (2.0 * step);
        let dzbar = (dx + Complex64::i() * dy) * 0.5;
        worst = worst.max(dzbar.norm());
    }
    Ok(worst)
}

/// Pointwise `|f - oracle|` and CR residual of `f` on `points`.
pub fn compare(
    f: &AnalyticFunction,
    oracle: &AnalyticFunction,
    points: &[ComplexVector],
) -> Result<ResidualReport> {
    let coords: Vec<usize> = (0..f.arity()).collect();
    compare_in(f, oracle, points, &coords, DEFAULT_STEP)
}

/// [`compare`] with the CR residual taken only in `coords`.
pub fn compare_in(
    f: &AnalyticFunction,
    oracle: &AnalyticFunction,
    points: &[ComplexVector],
    coords: &[usize],
    step: f64,
) -> Result<ResidualReport> {
    let grid = evaluate_on_grid(f, points)?;
    let oracle_values = evaluate_on_grid(oracle, points)?.values().to_vec();
    let residuals = residuals_at(f, points, coords, step)?;
    ResidualReport::new(grid, Some(oracle_values), residuals)
}

/// Report with CR residuals only, for runs without an oracle.
pub fn holomorphy_report(
    f: &AnalyticFunction,
    points: &[ComplexVector],
    coords: &[usize],
    step: f64,
) -> Result<ResidualReport> {
    let grid = evaluate_on_grid(f, points)?;
    let residuals = residuals_at(f, points, coords, step)?;
    ResidualReport::new(grid, None, residuals)
}

fn residuals_at(
    f: &AnalyticFunction,
    points: &[ComplexVector],
    coords: &[usize],
    step: f64,
) -> Result<Vec<f64>> {
    let r: Vec<Result<f64>> = points
        .par_iter()
        .map(|p| cr_residual_in(f, p, step, coords))
        .collect();
    r.into_iter().collect()
}
