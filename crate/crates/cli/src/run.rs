//! Dispatch of a validated scenario to the library modules.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use reflexcr_core::analytic::{compare_in, AnalyticFunction, ComplexVector, Domain, ResidualReport, DEFAULT_STEP};
use reflexcr_core::crext::{edge_points, extend_cr_function, uniqueness_check, CrExtensionConfig, Verdict, WedgeFunction};
use reflexcr_core::eow::{eow_extend, EowDomain, NormalizationMap, CERTIFY_SAMPLES, MODEL_SCALE};
use reflexcr_core::reflection::{classical_reflect, curve_flatten_reflect, general_reflect, harmonic_reflect, HalfDiscFunction, LAPLACIAN_STEP};
use reflexcr_core::sampling;
use reflexcr_core::series::MultiSeries;
use reflexcr_core::wedge::{chart_vars, lemma27_verify, ChartBoxes, GenericManifold, Wedge};
use reflexcr_core::{Complex64, Error};

use crate::scenario::{self, ambient_vars, compile, ConfigError, Expect, NormalizationSpec, Part, ReflectMethod, Scenario, Series1D};

/// Errors below this count as the round-off floor in node sweeps.
pub const SWEEP_FLOOR: f64 = 1e-13;

/// One pass/fail criterion; `pass` iff `value <= limit` (`at_most`) or `value < limit` (`below`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value < limit,
        }
    }

    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageLine {
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub point: Vec<Complex64>,
    pub value: Complex64,
    pub oracle: Option<Complex64>,
    pub abs_err: f64,
    pub cr_residual: f64,
}

/// Grid table; coordinate columns are `<name>_re, <name>_im` per entry of `coords`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridTable {
    pub coords: Vec<String>,
    pub rows: Vec<GridRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub nodes: usize,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub kind: &'static str,
    pub scenario: Scenario,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, serde_json::Value>,
    pub stages: Vec<StageLine>,
    pub error: Option<StageError>,
    /// Set when a module error cut the run short.
    pub partial: bool,
    pub files: Vec<String>,
    #[serde(skip)]
    pub grid: GridTable,
    #[serde(skip)]
    pub convergence: Vec<ConvergenceRow>,
    #[serde(skip)]
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    fn new(scenario: &Scenario) -> Self {
        Self {
            kind: scenario.kind(),
            scenario: scenario.clone(),
            pass: false,
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            stages: Vec::new(),
            error: None,
            partial: false,
            files: Vec::new(),
            grid: GridTable::default(),
            convergence: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    fn stage(&mut self, stage: &str, detail: impl Into<String>) {
        self.stages.push(StageLine {
            stage: stage.into(),
            detail: detail.into(),
        });
    }

    fn metric(&mut self, name: &str, v: impl Serialize) {
        self.metrics.insert(name.into(), serde_json::to_value(v).unwrap_or(serde_json::Value::Null));
    }

    fn fill_grid(&mut self, coords: Vec<String>, r: &ResidualReport) {
        self.grid.coords = coords;
        self.grid.rows = (0..r.grid.len())
            .map(|k| GridRow {
                point: r.grid.points()[k].as_slice().to_vec(),
                value: r.grid.values()[k],
                oracle: r.oracle_values.as_ref().map(|o| o[k]),
                abs_err: r.abs_errors[k],
                cr_residual: r.cr_residuals[k],
            })
            .collect();
    }
}

/// Module failure tagged with the stage that raised it.
struct Failure {
    stage: String,
    error: Error,
}

fn at(stage: &'static str) -> impl Fn(Error) -> Failure {
    move |error| match error {
        Error::Stage { stage, source } => Failure {
            stage: stage.to_string(),
            error: *source,
        },
        error => Failure {
            stage: stage.to_string(),
            error,
        },
    }
}

enum Abort {
    Config(ConfigError),
    Module(Failure),
}

impl From<ConfigError> for Abort {
    fn from(e: ConfigError) -> Self {
        Abort::Config(e)
    }
}

impl From<Failure> for Abort {
    fn from(f: Failure) -> Self {
        Abort::Module(f)
    }
}

struct Clock {
    start: Instant,
}

impl Clock {
    fn start() -> Self {
        Self { start: Instant::now() }
    }

    fn lap(&mut self, report: &mut RunReport, stage: &str) {
        report.timings.insert(stage.into(), self.start.elapsed().as_secs_f64());
        self.start = Instant::now();
    }
}

/// Runs a validated scenario. Configuration problems surface as `Err`;
/// module failures give a failing report with `error` and `partial` set.
pub fn run(scenario: &Scenario) -> Result<RunReport, ConfigError> {
    let mut report = RunReport::new(scenario);
    let total = Instant::now();
    let outcome = match scenario {
        Scenario::Reflect(s) => run_reflect(s, &mut report),
        Scenario::Harmonic(s) => run_harmonic(s, &mut report),
        Scenario::Curve(s) => run_curve(s, &mut report),
        Scenario::Eow(s) => run_eow(s, &mut report),
        Scenario::Crextend(s) => run_crextend(s, &mut report),
        Scenario::Verify(s) => run_verify(s, &mut report),
    };
    report.timings.insert("total".into(), total.elapsed().as_secs_f64());
    match outcome {
        Ok(()) => {
            report.pass = !report.checks.is_empty() && report.checks.iter().all(|c| c.pass);
        }
        Err(Abort::Config(e)) => return Err(e),
        Err(Abort::Module(f)) => {
            report.pass = false;
            report.partial = true;
            report.error = Some(StageError {
                stage: f.stage,
                message: f.error.to_string(),
            });
        }
    }
    Ok(report)
}

fn entire1(src: &str, field: &str) -> Result<AnalyticFunction, ConfigError> {
    let e = compile(src, &["z"], field)?;
    Ok(AnalyticFunction::entire(1, src, move |p| e.eval(p)))
}

fn entire_n(src: &str, names: &[String], field: &str) -> Result<AnalyticFunction, ConfigError> {
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let e = compile(src, &names, field)?;
    Ok(AnalyticFunction::entire(names.len(), src, move |p| e.eval(p)))
}

fn step_for(a: &NormalizationMap) -> f64 {
    let sigma = a.matrix().clone().svd(false, false).singular_values.min();
    DEFAULT_STEP.min(0.01 * sigma)
}

fn residual_checks(report: &mut RunReport, r: &ResidualReport, tol: f64, cr_tol: f64) {
    report.metric("max_abs_error", r.max_abs_error);
    report.metric("max_cr_residual", r.max_cr_residual);
    report.checks.push(Check::below("max_abs_error", r.max_abs_error, tol));
    report.checks.push(Check::below("max_cr_residual", r.max_cr_residual, cr_tol));
}

fn run_reflect(s: &scenario::Reflect, report: &mut RunReport) -> Result<(), Abort> {
    let mut clock = Clock::start();
    let f = entire1(&s.f, "f")?;
    let oracle = entire1(s.oracle.as_deref().unwrap_or(&s.f), "oracle")?;
    let trace = s.trace.build("trace", None)?;
    let radius = s.radius;
    let upper = f.restrict(
        Domain::predicate("upper half disc", move |p| p[0].im >= 0.0 && p[0].norm() <= radius),
        format!("{} on D+", s.f),
    );
    let h = HalfDiscFunction::with_radius(upper, trace, radius).map_err(at("input"))?;
    report.metric("effective_radius", h.effective_radius());
    report.stage("input", format!("trace checked on the axis, effective radius {:.6}", h.effective_radius()));
    let big_f = match s.method {
        ReflectMethod::General => general_reflect(&h),
        ReflectMethod::Classical => classical_reflect(&h),
    }
    .map_err(at("reflect"))?;
    report.stage("reflect", format!("{:?} reflection", s.method).to_lowercase());
    clock.lap(report, "reflect");
    let mut rng = sampling::rng(s.seed);
    let r = s.grid.radius.unwrap_or(0.9);
    let pts: Vec<ComplexVector> = (0..s.grid.count)
        .map(|_| ComplexVector::scalar(sampling::lower_half_disc(&mut rng, r)))
        .collect::<Result<_, _>>()
        .map_err(at("grid"))?;
    let rep = compare_in(&big_f, &oracle, &pts, &[0], DEFAULT_STEP).map_err(at("compare"))?;
    report.stage("compare", format!("{} lower half disc points of radius {r}", pts.len()));
    clock.lap(report, "compare");
    report.fill_grid(vec!["z".into()], &rep);
    residual_checks(report, &rep, s.tol, s.cr_tol);
    Ok(())
}

fn run_harmonic(s: &scenario::Harmonic, report: &mut RunReport) -> Result<(), Abort> {
    let mut clock = Clock::start();
    let h = compile(&s.h, &["z"], "h")?;
    let trace_spec = s.trace.clone().unwrap_or_else(|| Series1D::expand(&s.h, Part::Re));
    let trace = trace_spec.build("trace", None)?;
    let hv = h.clone();
    let ext = harmonic_reflect(move |x, y| hv.eval(&[Complex64::new(x, y)]).re, trace).map_err(at("reflect"))?;
    report.metric("radius", ext.radius());
    report.stage("reflect", format!("harmonic reflection, radius {:.6}", ext.radius()));
    clock.lap(report, "reflect");
    let mut rng = sampling::rng(s.seed);
    let r = s.grid.radius.unwrap_or(0.8);
    let mut rows = Vec::with_capacity(s.grid.count);
    for _ in 0..s.grid.count {
        let z = sampling::disc(&mut rng, r);
        let v = ext.eval(z.re, z.im).map_err(at("compare"))?;
        let want = h.eval(&[z]).re;
        let lap = ext.laplacian(z.re, z.im, LAPLACIAN_STEP).map_err(at("compare"))?;
        rows.push(GridRow {
            point: vec![z],
            value: Complex64::new(v, 0.0),
            oracle: Some(Complex64::new(want, 0.0)),
            abs_err: (v - want).abs(),
            cr_residual: lap.abs(),
        });
    }
    clock.lap(report, "compare");
    report.stage("compare", format!("{} disc points of radius {r}; cr_residual column holds |discrete Laplacian|", rows.len()));
    let err = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let lap = rows.iter().map(|r| r.cr_residual).fold(0.0, f64::max);
    report.grid = GridTable {
        coords: vec!["z".into()],
        rows,
    };
    report.metric("max_abs_error", err);
    report.metric("max_laplacian", lap);
    report.checks.push(Check::below("max_abs_error", err, s.tol));
    report.checks.push(Check::below("max_laplacian", lap, s.laplacian_tol));
    Ok(())
}

fn run_curve(s: &scenario::Curve, report: &mut RunReport) -> Result<(), Abort> {
    let mut clock = Clock::start();
    let f = entire1(&s.f, "f")?;
    let oracle = entire1(s.oracle.as_deref().unwrap_or(&s.f), "oracle")?;
    let gamma = s.gamma.build("gamma", None)?;
    let trace_spec = s.trace.clone().unwrap_or_else(|| Series1D::expand(&s.f, Part::Im));
    let trace = trace_spec.build("trace", Some(&gamma))?;
    let g = gamma.clone();
    let above = f.restrict(
        Domain::predicate("above the curve", move |p| p[0].norm() <= 1.0 && p[0].im >= g.eval(p[0].re) - 1e-12),
        format!("{} above the curve", s.f),
    );
    let big_f = curve_flatten_reflect(&above, &gamma, trace).map_err(at("reflect"))?;
    report.stage("reflect", "curve flattened, reflected and mapped back");
    clock.lap(report, "reflect");
    let mut rng = sampling::rng(s.seed);
    let r = s.grid.radius.unwrap_or(0.2);
    let pts: Vec<ComplexVector> = (0..s.grid.count)
        .map(|_| ComplexVector::scalar(sampling::disc(&mut rng, r)))
        .collect::<Result<_, _>>()
        .map_err(at("grid"))?;
    let rep = compare_in(&big_f, &oracle, &pts, &[0], DEFAULT_STEP).map_err(at("compare"))?;
    report.stage("compare", format!("{} disc points of radius {r}", pts.len()));
    clock.lap(report, "compare");
    report.fill_grid(vec!["z".into()], &rep);
    residual_checks(report, &rep, s.tol, s.cr_tol);
    Ok(())
}

fn normalization(spec: &NormalizationSpec, dom: &EowDomain, field: &str) -> Result<NormalizationMap, Abort> {
    let d = dom.dim();
    match spec {
        NormalizationSpec::Named(n) if n == "identity" => Ok(NormalizationMap::identity(d).map_err(at("normalization"))?),
        NormalizationSpec::Named(_) => Ok(NormalizationMap::for_domain(dom).map_err(at("normalization"))?),
        NormalizationSpec::Matrix(rows) => {
            let m = DMatrix::from_row_iterator(d, d, rows.iter().flatten().copied());
            NormalizationMap::new(m).map_err(|e| Abort::Config(ConfigError::new(field, e.to_string())))
        }
    }
}

fn phi_series(phi: &[scenario::SeriesSpec], n: usize, d: usize, order: usize, field: &str) -> Result<Vec<MultiSeries>, ConfigError> {
    let vars = chart_vars(n, d);
    let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
    phi.iter()
        .enumerate()
        .map(|(k, p)| p.build(&vars, order, &format!("{field}[{k}]")))
        .collect()
}

fn run_eow(s: &scenario::Eow, report: &mut RunReport) -> Result<(), Abort> {
    let mut clock = Clock::start();
    let d = s.d;
    let names = ambient_vars(0, d);
    let g = entire_n(&s.g, &names, "g")?;
    let cone = s.cone.build(d, "cone")?;
    let edge = s.edge.clone().unwrap_or_else(|| vec![MODEL_SCALE; d]);
    let radius = s.wedge_radius.unwrap_or(MODEL_SCALE * (d as f64).sqrt());
    let dom = EowDomain::new(edge, cone.clone(), radius).map_err(at("domain"))?;
    let a = normalization(&s.normalization, &dom, "normalization")?;
    let cert = a.certify(&cone, CERTIFY_SAMPLES, s.seed).map_err(at("normalization"))?;
    report.stage("normalization", format!("A(orthant) in cone: {} violations over {} samples", cert.violations, cert.samples));
    report.checks.push(Check::at_most("normalization_violations", cert.violations as f64, 0.0));
    clock.lap(report, "normalization");

    if let Some(l) = &s.lemma27 {
        let phi = phi_series(&l.phi, l.n, d, l.order, "lemma27.phi")?;
        let boxes = l.boxes.boxes();
        let m = GenericManifold::with_radius(l.n, d, phi, 2.0 * boxes.max_radius()).map_err(|e| ConfigError::new("lemma27.phi", e.to_string()))?;
        let wedge = Wedge::over(m, cone.clone()).map_err(at("lemma27"))?;
        let sub = l.sub_cone.build(d, "lemma27.sub_cone")?;
        let rep = lemma27_verify(&wedge, &sub, boxes, l.samples, s.seed).map_err(at("lemma27"))?;
        report.stage(
            "lemma27",
            format!("{} samples, {} violations, worst margin {:.6e}", rep.samples, rep.violations, rep.worst_margin),
        );
        report.metric("lemma27_violations", rep.violations);
        report.metric("lemma27_worst_margin", rep.worst_margin);
        report.checks.push(Check::at_most("lemma27_violations", rep.violations as f64, 0.0));
        clock.lap(report, "lemma27");
    }

    let restricted = dom.restrict(&g);
    let big_g = eow_extend(&restricted, &dom, &a, s.nodes).map_err(at("extend"))?;
    report.stage("extend", format!("{} nodes", s.nodes));
    let mut rng = sampling::rng(s.seed);
    let r = s.grid.radius.unwrap_or(0.5);
    let pts: Vec<ComplexVector> = (0..s.grid.count)
        .map(|_| {
            let omega: Vec<Complex64> = (0..d).map(|_| sampling::disc(&mut rng, r)).collect();
            ComplexVector::new(a.apply(&omega))
        })
        .collect::<Result<_, _>>()
        .map_err(at("grid"))?;
    let coords: Vec<usize> = (0..d).collect();
    let rep = compare_in(&big_g, &g, &pts, &coords, step_for(&a)).map_err(at("compare"))?;
    report.stage("compare", format!("{} points w = A omega with |omega_k| <= {r}", pts.len()));
    clock.lap(report, "extend");

    let edge: Vec<Vec<Complex64>> = (0..s.grid.count)
        .map(|_| {
            let omega: Vec<Complex64> = (0..d).map(|_| Complex64::new(sampling::uniform(&mut rng, -r, r), 0.0)).collect();
            a.apply(&omega)
        })
        .collect();
    let mut edge_err: f64 = 0.0;
    for p in &edge {
        let v = big_g.eval(p).map_err(at("edge"))?;
        edge_err = edge_err.max((v - g.eval(p).map_err(at("edge"))?).norm());
    }
    report.stage("edge", format!("{} real edge points", edge.len()));
    report.metric("edge_max_abs_error", edge_err);
    clock.lap(report, "edge");

    report.fill_grid(names, &rep);
    residual_checks(report, &rep, s.tol, s.cr_tol);
    report.checks.push(Check::below("edge_max_abs_error", edge_err, s.tol));

    if let Some(sweep) = &s.sweep {
        for &nodes in sweep {
            let gn = eow_extend(&restricted, &dom, &a, nodes).map_err(at("sweep"))?;
            let mut err: f64 = 0.0;
            for p in &pts {
                let v = gn.eval(p.as_slice()).map_err(at("sweep"))?;
                err = err.max((v - g.eval(p.as_slice()).map_err(at("sweep"))?).norm());
            }
            report.convergence.push(ConvergenceRow { nodes, max_abs_error: err });
        }
        let geometric = report
            .convergence
            .windows(2)
            .all(|w| w[0].max_abs_error <= SWEEP_FLOOR || w[1].max_abs_error <= w[0].max_abs_error / 10.0);
        report.metric("sweep_geometric_until_floor", geometric);
        report.stage("sweep", format!("{} node counts", sweep.len()));
        clock.lap(report, "sweep");
    }
    Ok(())
}

fn run_crextend(s: &scenario::Crextend, report: &mut RunReport) -> Result<(), Abort> {
    let mut clock = Clock::start();
    let (n, d) = (s.n, s.d);
    let phi = phi_series(&s.phi, n, d, s.order, "phi")?;
    let m = GenericManifold::with_radius(n, d, phi, s.manifold_radius).map_err(|e| ConfigError::new("phi", e.to_string()))?;
    let cone = s.cone.build(d, "cone")?;
    let wedge = Wedge::over(m, cone).map_err(at("input"))?;
    let f0 = entire_n(&s.f, &ambient_vars(n, d), "f")?;
    let vars = chart_vars(n, d);
    let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
    let trace = match &s.trace {
        Some(t) => t.build(&vars, s.trace_order, "trace")?,
        None => {
            let names = ambient_vars(n, d);
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let e = compile(&s.f, &names, "f")?;
            reflexcr_core::crext::edge_expansion(wedge.manifold(), s.trace_order, |a| e.eval_series(a))
                .map_err(at("trace"))?
                .im
        }
    };
    report.stage("trace", format!("{} terms, order {}", trace.num_terms(), trace.order()));
    let boxes = s.boxes.boxes();
    let wf = WedgeFunction::from_holomorphic(&f0, trace, wedge, boxes, s.seed).map_err(at("input"))?;
    let mut cfg = CrExtensionConfig::new(boxes);
    cfg.sub_cone = s.sub_cone.as_ref().map(|c| c.build(d, "sub_cone")).transpose()?;
    cfg.normalization = match &s.normalization {
        None => None,
        Some(rows) => Some(
            NormalizationMap::new(DMatrix::from_row_iterator(d, d, rows.iter().flatten().copied()))
                .map_err(|e| ConfigError::new("normalization", e.to_string()))?,
        ),
    };
    cfg.nodes = s.nodes;
    cfg.lemma_samples = s.lemma_samples;
    cfg.oracle_samples = s.grid.count;
    cfg.seed = s.seed;
    clock.lap(report, "input");
    let res = extend_cr_function(&wf, &cfg, Some(&f0)).map_err(at("pipeline"))?;
    clock.lap(report, "pipeline");
    for st in &res.stages {
        report.stage(st.stage, st.detail.clone());
    }
    report.metric("lemma27_violations", res.lemma.violations);
    report.metric("lemma27_worst_margin", res.lemma.worst_margin);
    report.metric("boxes", res.boxes);
    report.metric("domain_halvings", res.domain_halvings);
    report.metric("normalization", &res.normalization);
    report.checks.push(Check::at_most("lemma27_violations", res.lemma.violations as f64, 0.0));
    let rep = res.report.as_ref().ok_or_else(|| Failure {
        stage: "oracle".into(),
        error: Error::Precondition("pipeline produced no oracle report".into()),
    })?;
    let coords = (1..=n).map(|j| format!("z{j}")).chain((1..=d).map(|k| format!("w{k}"))).collect();
    report.fill_grid(coords, rep);
    residual_checks(report, rep, s.tol, s.cr_tol);
    Ok(())
}

fn run_verify(s: &scenario::Verify, report: &mut RunReport) -> Result<(), Abort> {
    let mut clock = Clock::start();
    let (n, d) = (s.n, s.d);
    let phi = phi_series(&s.phi, n, d, s.order, "phi")?;
    let r = s.grid.radius.unwrap_or(0.3);
    let m = GenericManifold::with_radius(n, d, phi, 2.0 * r).map_err(|e| ConfigError::new("phi", e.to_string()))?;
    let names = ambient_vars(n, d);
    let f = entire_n(&s.f, &names, "f")?;
    let g = entire_n(&s.g, &names, "g")?;
    let pts = edge_points(&m, &ChartBoxes::uniform(r), s.grid.count, s.seed).map_err(at("grid"))?;
    let base = match &s.base {
        None => vec![Complex64::new(0.0, 0.0); n + d],
        Some(b) => b.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
    };
    let base = ComplexVector::new(base).map_err(|e| ConfigError::new("base", e.to_string()))?;
    let u = uniqueness_check(&f, &g, &m, &pts, &base).map_err(at("uniqueness"))?;
    let verdict = match u.verdict {
        Verdict::Pass => Expect::Pass,
        Verdict::Fail => Expect::Fail,
        Verdict::NotApplicable => Expect::NotApplicable,
    };
    report.stage(
        "uniqueness",
        format!("verdict {:?}; max |Im f - Im g| {:.3e}, base diff {:.3e}, max |f - g| {:.3e}", u.verdict, u.max_im_diff, u.base_diff, u.max_diff),
    );
    report.metric("verdict", u.verdict);
    report.metric("expect", s.expect);
    report.metric("max_im_diff", u.max_im_diff);
    report.metric("base_diff", u.base_diff);
    report.metric("max_diff", u.max_diff);
    report.checks.push(Check {
        name: "verdict_matches_expect".into(),
        value: if verdict == s.expect { 0.0 } else { 1.0 },
        limit: 0.0,
        pass: verdict == s.expect,
    });
    let coords: Vec<usize> = (0..n + d).collect();
    let rep = compare_in(&f, &g, &pts, &coords, DEFAULT_STEP).map_err(at("compare"))?;
    clock.lap(report, "uniqueness");
    report.fill_grid(names, &rep);
    Ok(())
}
