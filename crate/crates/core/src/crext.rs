//! Holomorphic extension of wedge functions whose imaginary part is real
//! analytic on the edge.
//!
//! In chart coordinates `(z, w = s + it)` the pipeline is
//!
//! 1. pull back: `f∘Ψ~(z, w)` for `t` in a certified subcone `Γ'`;
//! 2. complexify the edge trace `v(z, zbar, s)` in `s`;
//! 3. reflect: `g = f∘Ψ~ - iv` above, `g = conj(f∘Ψ~(z, wbar)) + iv` below;
//! 4. extend `g(z, ·)` across the edge by circular averaging;
//! 5. reassemble `F = G + iv`.
//!
//! `F` is holomorphic in `w` for each fixed `z`; the ambient extension is
//! `F∘Ψ~⁻¹`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{
    compare_in, fmt_point, AnalyticFunction, ComplexVector, Domain, Provenance, ResidualReport, DEFAULT_STEP,
    DOMAIN_TOL,
};
use crate::eow::{eow_average, EowDomain, NormalizationMap, CERTIFY_SAMPLES, CLOSURE_TOL, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::sampling;
use crate::series::{ComplexSeries, MultiSeries};
use crate::wedge::{chart_vars, lemma27_shrink, ChartBoxes, Cone, GenericManifold, Lemma27Report, Wedge};

/// Tolerance of the edge consistency check of a trace.
pub const TRACE_CHECK_TOL: f64 = 1e-8;
/// Slack on `rho` when restricting a function to the closed wedge.
pub const EDGE_CLOSURE_TOL: f64 = 1e-10;
/// `|Im g|` allowed on the edge.
pub const EDGE_REALITY_TOL: f64 = 1e-8;
pub const MAX_DOMAIN_HALVINGS: usize = 6;
pub const DEFAULT_SUBCONE_SHRINK: f64 = 0.5;
pub const DEFAULT_LEMMA_SAMPLES: usize = 100_000;
/// Uniqueness gates on `|Im f - Im g|` and `|f(p0) - g(p0)|`.
pub const UNIQUENESS_GATE_TOL: f64 = 1e-10;
pub const UNIQUENESS_PASS_TOL: f64 = 1e-8;

const CHECK_SAMPLES: usize = 64;
const PROBE_SAMPLES: usize = 16;

fn split(p: &[Complex64], n: usize) -> (&[Complex64], &[Complex64]) {
    p.split_at(n)
}

fn in_z_box(z: &[Complex64], boxes: &ChartBoxes) -> bool {
    z.iter().all(|x| x.norm() <= boxes.z_radius + DOMAIN_TOL)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn chart_series_args(z: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    z.iter()
        .map(|x| Complex64::new(x.re, 0.0))
        .chain(z.iter().map(|x| Complex64::new(x.im, 0.0)))
        .chain(w.iter().copied())
        .collect()
}

/// Seeded points `(z, s)` of the real chart box.
fn edge_samples(n: usize, d: usize, boxes: &ChartBoxes, count: usize, seed: u64) -> Vec<(Vec<Complex64>, Vec<f64>)> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            let z = (0..n).map(|_| sampling::disc(&mut rng, boxes.z_radius)).collect();
            let s = (0..d).map(|_| sampling::uniform(&mut rng, -boxes.s_radius, boxes.s_radius)).collect();
            (z, s)
        })
        .collect()
}

/// Seeded points of the edge `M`, as ambient coordinates.
pub fn edge_points(manifold: &GenericManifold, boxes: &ChartBoxes, count: usize, seed: u64) -> Result<Vec<ComplexVector>> {
    edge_samples(manifold.n(), manifold.d(), boxes, count, seed)
        .iter()
        .map(|(z, s)| manifold.psi(z, s))
        .collect()
}

/// Holomorphic function on a wedge, continuous up to the edge, with the
/// imaginary part of its edge values given as a real series `v(x, y, s)`.
#[derive(Debug, Clone)]
pub struct WedgeFunction {
    f: AnalyticFunction,
    trace: MultiSeries,
    wedge: Wedge,
}

impl WedgeFunction {
    /// Checks `Im f(Psi(z, s)) = v(z, zbar, s)` on seeded edge samples in `boxes`.
    pub fn new(f: AnalyticFunction, trace: MultiSeries, wedge: Wedge, boxes: ChartBoxes, seed: u64) -> Result<Self> {
        let m = wedge.manifold();
        let (n, d) = (m.n(), m.d());
        if f.arity() != n + d {
            return Err(Error::DimensionMismatch {
                expected: n + d,
                got: f.arity(),
            });
        }
        let vars = chart_vars(n, d);
        if trace.vars() != vars.as_slice() {
            return Err(Error::IncompatibleVariables(format!(
                "trace has variables {:?}, expected {vars:?}",
                trace.vars()
            )));
        }
        for (z, s) in edge_samples(n, d, &boxes, CHECK_SAMPLES, seed) {
            let p = m.psi(&z, &s)?;
            let im = f.eval(p.as_slice())?.im;
            let args: Vec<f64> = z.iter().map(|x| x.re).chain(z.iter().map(|x| x.im)).chain(s.iter().copied()).collect();
            let v = trace.eval_real(&args)?;
            if (im - v).abs() > TRACE_CHECK_TOL {
                return Err(Error::InconsistentTrace(format!(
                    "Im f = {im} but trace = {v} at edge point {}",
                    fmt_point(p.as_slice())
                )));
            }
        }
        Ok(Self { f, trace, wedge })
    }

    /// `f0` restricted to the closure of the wedge.
    pub fn from_holomorphic(f0: &AnalyticFunction, trace: MultiSeries, wedge: Wedge, boxes: ChartBoxes, seed: u64) -> Result<Self> {
        let w = wedge.clone();
        let domain = Domain::predicate("closed wedge", move |p| w.contains_with_edge(p, EDGE_CLOSURE_TOL));
        let f = f0.restrict(domain, format!("{} on the wedge", f0.label()));
        Self::new(f, trace, wedge, boxes, seed)
    }

    pub fn function(&self) -> &AnalyticFunction {
        &self.f
    }

    pub fn trace(&self) -> &MultiSeries {
        &self.trace
    }

    pub fn wedge(&self) -> &Wedge {
        &self.wedge
    }

    pub fn manifold(&self) -> &GenericManifold {
        self.wedge.manifold()
    }
}

/// Expands `F0(z, s + i phi(z, zbar, s))` as a complex series in the chart
/// variables; `f0` receives `(z_1..z_n, w_1..w_d)` as series. Its imaginary
/// part is the edge trace of `F0`.
pub fn edge_expansion(
    manifold: &GenericManifold,
    order: usize,
    f0: impl Fn(&[ComplexSeries]) -> Result<ComplexSeries>,
) -> Result<ComplexSeries> {
    let (n, d) = (manifold.n(), manifold.d());
    let template = manifold.phi()[0].with_order(order).zero_like();
    let mut args = Vec::with_capacity(n + d);
    for j in 1..=n {
        args.push(ComplexSeries::new(
            template.variable_like(&format!("x{j}"))?,
            template.variable_like(&format!("y{j}"))?,
        ));
    }
    for (k, phi) in manifold.phi().iter().enumerate() {
        args.push(ComplexSeries::new(
            template.variable_like(&format!("s{}", k + 1))?,
            phi.with_order(order),
        ));
    }
    f0(&args)
}

/// Pull-back `f∘Psi~` on `(Q1 x (Γ' ∪ {0})) ∩ U1` with the certificate it rests on.
#[derive(Debug, Clone)]
pub struct PullBack {
    pub function: AnalyticFunction,
    pub boxes: ChartBoxes,
    pub lemma: Lemma27Report,
    pub lemma_attempts: Vec<Lemma27Report>,
}

/// Certifies `Psi~((Q1 x Γ') ∩ U1) ⊂ W` (halving `boxes` as needed) and
/// returns `(z, w) -> f(Psi~(z, w))` on the certified boxes.
pub fn pull_back(wf: &WedgeFunction, sub_cone: &Cone, boxes: ChartBoxes, samples: usize, seed: u64) -> Result<PullBack> {
    let (lemma, lemma_attempts) = lemma27_shrink(wf.wedge(), sub_cone, boxes, samples, seed)?;
    let boxes = lemma.boxes;
    let m = wf.manifold().clone();
    let n = m.n();
    let f = wf.function().clone();
    let cone = sub_cone.clone();
    let domain = Domain::predicate("(Q1 x (Γ' ∪ {0})) ∩ U1", move |p| {
        let (z, w) = split(p, n);
        let t: Vec<f64> = w.iter().map(|x| x.im).collect();
        in_z_box(z, &boxes)
            && w.iter().all(|x| x.re.abs() <= boxes.s_radius + DOMAIN_TOL)
            && norm(&t) <= boxes.t_radius + DOMAIN_TOL
            && cone.contains_closed(&t, CLOSURE_TOL)
    });
    let function = AnalyticFunction::fallible(
        n + m.d(),
        domain,
        Provenance::BlackBox,
        format!("{}∘Psi~", wf.function().label()),
        move |p| {
            let (z, w) = split(p, n);
            f.eval(m.psi_tilde(z, w)?.as_slice())
        },
    );
    Ok(PullBack {
        function,
        boxes,
        lemma,
        lemma_attempts,
    })
}

/// `v(z, zbar, w)`: the trace with its `s` variables complexified, on
/// `|z_j| <= z_radius`, `|Re w| <= s_radius`, `|Im w| <= t_radius`.
pub fn complexify_trace(trace: &MultiSeries, n: usize, d: usize, boxes: ChartBoxes) -> Result<AnalyticFunction> {
    let vars = chart_vars(n, d);
    if trace.vars() != vars.as_slice() {
        return Err(Error::IncompatibleVariables(format!(
            "trace has variables {:?}, expected {vars:?}",
            trace.vars()
        )));
    }
    let pr = trace.polyradius();
    let w_reach = boxes.s_radius.hypot(boxes.t_radius);
    let covered = pr[..2 * n].iter().all(|&r| r >= boxes.z_radius) && pr[2 * n..].iter().all(|&r| r > w_reach);
    if !covered {
        return Err(Error::Precondition(format!(
            "trace polyradius {pr:?} does not cover the chart boxes {boxes:?}"
        )));
    }
    let v = trace.clone();
    let domain = Domain::predicate("U2", move |p| {
        let (z, w) = split(p, n);
        in_z_box(z, &boxes)
            && w.iter().all(|x| x.re.abs() <= boxes.s_radius + DOMAIN_TOL && x.im.abs() <= boxes.t_radius + DOMAIN_TOL)
    });
    Ok(AnalyticFunction::fallible(
        n + d,
        domain,
        Provenance::SeriesBacked,
        "complexified trace v(z, zbar, w)",
        move |p| {
            let (z, w) = split(p, n);
            v.eval_complex(&chart_series_args(z, w))
        },
    ))
}

/// Two-sided reflected function on `(Q1 x (±cl Γ')) ∩ U2`.
///
/// Upper side (`t` in `cl Γ'`, including `t = 0`): `f∘Psi~ - iv`.
/// Lower side (`-t` in `Γ'`): `conj(f∘Psi~(z, wbar)) + iv`, which equals the
/// conjugate of the upper formula at `wbar` because `v` has real coefficients.
pub fn build_g(pull: &AnalyticFunction, v: &AnalyticFunction, n: usize, sub_cone: &Cone, boxes: ChartBoxes, seed: u64) -> Result<AnalyticFunction> {
    let d = pull.arity() - n;
    let side = EowDomain::new(vec![boxes.s_radius; d], sub_cone.clone(), boxes.t_radius)?;
    let dom_side = side.clone();
    let domain = Domain::predicate("(Q1 x (Γ' ∪ {0} ∪ -Γ')) ∩ U2", move |p| {
        let (z, w) = split(p, n);
        in_z_box(z, &boxes) && dom_side.contains(w, CLOSURE_TOL)
    });
    let (pull, v, cone) = (pull.clone(), v.clone(), sub_cone.clone());
    let g = AnalyticFunction::fallible(n + d, domain, Provenance::ConstructedExtension, "reflected g", move |p| {
        let (_, w) = split(p, n);
        let t: Vec<f64> = w.iter().map(|x| x.im).collect();
        let neg: Vec<f64> = t.iter().map(|x| -x).collect();
        if norm(&t) <= CLOSURE_TOL || cone.contains_closed(&t, CLOSURE_TOL) {
            Ok(pull.eval(p)? - Complex64::i() * v.eval(p)?)
        } else if cone.contains_closed(&neg, CLOSURE_TOL) {
            let conj: Vec<Complex64> = p[..n].iter().copied().chain(w.iter().map(|x| x.conj())).collect();
            Ok(pull.eval(&conj)?.conj() + Complex64::i() * v.eval(p)?)
        } else {
            Err(Error::DomainViolation {
                point: fmt_point(p),
                context: "reflected g (Im w in neither Γ' nor -Γ')".into(),
            })
        }
    });
    for (z, s) in edge_samples(n, d, &boxes, CHECK_SAMPLES, seed) {
        let p: Vec<Complex64> = z.iter().copied().chain(s.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        let val = g.eval(&p)?;
        if val.im.abs() > EDGE_REALITY_TOL {
            return Err(Error::InconsistentTrace(format!(
                "Im g = {:e} on the edge at {}",
                val.im,
                fmt_point(&p)
            )));
        }
    }
    Ok(g)
}

/// `G(z, w) = (1/2π) ∫ g(z, A Φ(A⁻¹ w, e^{iθ})) dθ` on `Q1-box x A(D^d)`.
pub fn extend(g: &AnalyticFunction, n: usize, sub_cone: &Cone, boxes: ChartBoxes, a: &NormalizationMap, nodes: usize) -> Result<AnalyticFunction> {
    let d = g.arity() - n;
    if a.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: a.dim(),
        });
    }
    let side = EowDomain::new(vec![boxes.s_radius; d], sub_cone.clone(), boxes.t_radius)?;
    let a_dom = a.clone();
    let domain = Domain::predicate("U3 x U5", move |p| {
        let (z, w) = split(p, n);
        in_z_box(z, &boxes) && a_dom.in_image_of_polydisc(w)
    });
    let (g, a) = (g.clone(), a.clone());
    Ok(AnalyticFunction::fallible(
        n + d,
        domain,
        Provenance::ConstructedExtension,
        format!("averaged extension G ({nodes} nodes)"),
        move |p| {
            let (z, w) = split(p, n);
            let at_z = |u: &[Complex64]| {
                let q: Vec<Complex64> = z.iter().chain(u).copied().collect();
                g.eval(&q)
            };
            eow_average(&at_z, &side, &a, nodes, w)
        },
    ))
}

/// `F = G + iv` on the domain of `G`.
pub fn reassemble(big_g: &AnalyticFunction, v: &AnalyticFunction) -> AnalyticFunction {
    let (gg, vv) = (big_g.clone(), v.clone());
    AnalyticFunction::fallible(
        big_g.arity(),
        big_g.domain().clone(),
        Provenance::ConstructedExtension,
        "F = G + iv",
        move |p| Ok(gg.eval(p)? + Complex64::i() * vv.eval(p)?),
    )
}

/// `F∘Psi~⁻¹`: the chart extension pushed to ambient coordinates.
pub fn push_forward(f_chart: &AnalyticFunction, manifold: &GenericManifold) -> AnalyticFunction {
    let (f, m, f2, m2) = (f_chart.clone(), manifold.clone(), f_chart.clone(), manifold.clone());
    let domain = Domain::predicate("Psi~(U3 x U5)", move |p| {
        m2.psi_tilde_inverse(p)
            .map(|(z, w)| f2.contains(&[z, w].concat()))
            .unwrap_or(false)
    });
    AnalyticFunction::fallible(
        f_chart.arity(),
        domain,
        Provenance::ConstructedExtension,
        "F∘Psi~^-1 (ambient)",
        move |p| {
            let (z, w) = m.psi_tilde_inverse(p)?;
            f.eval(&[z, w].concat())
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrExtensionConfig {
    pub boxes: ChartBoxes,
    /// Defaults to the [`DEFAULT_SUBCONE_SHRINK`]-shrunk wedge cone.
    pub sub_cone: Option<Cone>,
    /// Defaults to [`NormalizationMap::for_domain`] of the certified boxes.
    pub normalization: Option<NormalizationMap>,
    pub nodes: usize,
    pub lemma_samples: usize,
    /// Points of the oracle comparison grid.
    pub oracle_samples: usize,
    pub seed: u64,
}

impl CrExtensionConfig {
    pub fn new(boxes: ChartBoxes) -> Self {
        Self {
            boxes,
            sub_cone: None,
            normalization: None,
            nodes: DEFAULT_NODES,
            lemma_samples: DEFAULT_LEMMA_SAMPLES,
            oracle_samples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: &'static str,
    pub detail: String,
}

/// Everything the pipeline built, in chart coordinates unless noted.
#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub f_chart: AnalyticFunction,
    pub ambient: AnalyticFunction,
    pub pull_back: AnalyticFunction,
    pub trace: AnalyticFunction,
    pub g: AnalyticFunction,
    pub big_g: AnalyticFunction,
    pub sub_cone: Cone,
    pub boxes: ChartBoxes,
    pub normalization: NormalizationMap,
    pub lemma: Lemma27Report,
    pub domain_halvings: usize,
    pub stages: Vec<StageRecord>,
    /// `F_chart` against `F0∘Psi~` on the half-radius grid, when an oracle was supplied.
    pub report: Option<ResidualReport>,
    pub n: usize,
    pub d: usize,
}

impl ExtensionResult {
    /// Seeded grid: `z` in the half-radius `z` box, `w = A ω` with `|ω_k| <= 1/2`.
    pub fn sample_grid(&self, count: usize, seed: u64) -> Result<Vec<ComplexVector>> {
        grid(self.n, self.d, &self.boxes, &self.normalization, count, seed)
    }
}

fn grid(n: usize, d: usize, boxes: &ChartBoxes, a: &NormalizationMap, count: usize, seed: u64) -> Result<Vec<ComplexVector>> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            let z: Vec<Complex64> = (0..n).map(|_| sampling::disc(&mut rng, 0.5 * boxes.z_radius)).collect();
            let omega: Vec<Complex64> = (0..d).map(|_| sampling::disc(&mut rng, 0.5)).collect();
            ComplexVector::new([z, a.apply(&omega)].concat())
        })
        .collect()
}

/// Probes `G` near the rim of `A(D^d)`; a quadrature escape means `A` is too large.
fn probe(big_g: &AnalyticFunction, n: usize, d: usize, boxes: &ChartBoxes, a: &NormalizationMap, seed: u64) -> Result<()> {
    let mut rng = sampling::rng(seed ^ 0x9e37_79b9);
    for k in 0..PROBE_SAMPLES {
        let z: Vec<Complex64> = (0..n).map(|_| sampling::disc(&mut rng, boxes.z_radius)).collect();
        let omega: Vec<Complex64> = (0..d)
            .map(|_| {
                let r = if k == 0 { 0.0 } else { 0.95 };
                Complex64::from_polar(r, sampling::uniform(&mut rng, 0.0, std::f64::consts::TAU))
            })
            .collect();
        big_g.eval(&[z, a.apply(&omega)].concat())?;
    }
    Ok(())
}

/// Runs the full pipeline. Errors carry the stage that raised them.
pub fn extend_cr_function(wf: &WedgeFunction, cfg: &CrExtensionConfig, oracle: Option<&AnalyticFunction>) -> Result<ExtensionResult> {
    let m = wf.manifold().clone();
    let (n, d) = (m.n(), m.d());
    let mut stages = Vec::new();
    let sub_cone = match &cfg.sub_cone {
        Some(c) => c.clone(),
        None => wf.wedge().cone().shrunk(DEFAULT_SUBCONE_SHRINK).map_err(|e| e.in_stage("subcone"))?,
    };
    let pb = pull_back(wf, &sub_cone, cfg.boxes, cfg.lemma_samples, cfg.seed).map_err(|e| e.in_stage("lemma27"))?;
    let boxes = pb.boxes;
    stages.push(StageRecord {
        stage: "lemma27",
        detail: format!(
            "{} samples, {} violations, worst margin {:.6e}, {} attempt(s), boxes {:?}",
            pb.lemma.samples,
            pb.lemma.violations,
            pb.lemma.worst_margin,
            pb.lemma_attempts.len(),
            boxes
        ),
    });
    stages.push(StageRecord {
        stage: "pull_back",
        detail: pb.function.label().to_string(),
    });
    let v = complexify_trace(wf.trace(), n, d, boxes).map_err(|e| e.in_stage("complexify_trace"))?;
    stages.push(StageRecord {
        stage: "complexify_trace",
        detail: format!("{} terms, order {}", wf.trace().num_terms(), wf.trace().order()),
    });
    let g = build_g(&pb.function, &v, n, &sub_cone, boxes, cfg.seed).map_err(|e| e.in_stage("build_g"))?;
    stages.push(StageRecord {
        stage: "build_g",
        detail: format!("edge reality checked on {CHECK_SAMPLES} samples"),
    });
    let mut a = match &cfg.normalization {
        Some(a) => a.clone(),
        None => {
            let side = EowDomain::new(vec![boxes.s_radius; d], sub_cone.clone(), boxes.t_radius).map_err(|e| e.in_stage("extend"))?;
            NormalizationMap::for_domain(&side).map_err(|e| e.in_stage("extend"))?
        }
    };
    let cert = a
        .certify(&sub_cone, CERTIFY_SAMPLES, cfg.seed)
        .map_err(|e| e.in_stage("extend"))?;
    if !cert.passes {
        return Err(Error::Precondition(format!(
            "normalization map sends {} of {} orthant samples outside Γ'",
            cert.violations, cert.samples
        ))
        .in_stage("extend"));
    }
    let mut halvings = 0;
    let big_g = loop {
        let big_g = extend(&g, n, &sub_cone, boxes, &a, cfg.nodes).map_err(|e| e.in_stage("extend"))?;
        match probe(&big_g, n, d, &boxes, &a, cfg.seed) {
            Ok(()) => break big_g,
            Err(Error::QuadratureEscape { .. }) if halvings < MAX_DOMAIN_HALVINGS => {
                halvings += 1;
                a = a.halved();
            }
            Err(e) => return Err(e.in_stage("extend")),
        }
    };
    stages.push(StageRecord {
        stage: "extend",
        detail: format!("{} nodes, {halvings} domain halving(s)", cfg.nodes),
    });
    let f_chart = reassemble(&big_g, &v);
    stages.push(StageRecord {
        stage: "reassemble",
        detail: "F = G + iv".into(),
    });
    let ambient = push_forward(&f_chart, &m);
    let report = match oracle {
        None => None,
        Some(f0) => {
            let (f0, mm) = (f0.clone(), m.clone());
            let chart_oracle = AnalyticFunction::fallible(
                n + d,
                f_chart.domain().clone(),
                Provenance::BlackBox,
                format!("{}∘Psi~", f0.label()),
                move |p| {
                    let (z, w) = split(p, n);
                    f0.eval(mm.psi_tilde(z, w)?.as_slice())
                },
            );
            let pts = grid(n, d, &boxes, &a, cfg.oracle_samples, cfg.seed).map_err(|e| e.in_stage("oracle"))?;
            let coords: Vec<usize> = (n..n + d).collect();
            let step = DEFAULT_STEP.min(0.01 * min_w_reach(&a));
            let r = compare_in(&f_chart, &chart_oracle, &pts, &coords, step).map_err(|e| e.in_stage("oracle"))?;
            stages.push(StageRecord {
                stage: "oracle",
                detail: format!(
                    "{} points, max |F - F0∘Psi~| = {:.3e}, max w-CR residual = {:.3e}",
                    pts.len(),
                    r.max_abs_error,
                    r.max_cr_residual
                ),
            });
            Some(r)
        }
    };
    Ok(ExtensionResult {
        f_chart,
        ambient,
        pull_back: pb.function,
        trace: v,
        g,
        big_g,
        sub_cone,
        boxes,
        normalization: a,
        lemma: pb.lemma,
        domain_halvings: halvings,
        stages,
        report,
        n,
        d,
    })
}

/// Smallest singular value of `A`: the radius of a ball inside `A(D^d)`.
fn min_w_reach(a: &NormalizationMap) -> f64 {
    a.matrix().clone().svd(false, false).singular_values.min()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub verdict: Verdict,
    pub points: usize,
    pub max_im_diff: f64,
    pub base_diff: f64,
    pub max_diff: f64,
}

/// Operational check of "equal imaginary parts on `M` and equal values at `p0`
/// imply `f = g` on `M`". Failed hypotheses give [`Verdict::NotApplicable`].
pub fn uniqueness_check(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    manifold: &GenericManifold,
    points: &[ComplexVector],
    base: &ComplexVector,
) -> Result<UniquenessReport> {
    for p in points.iter().chain([base]) {
        let rho = manifold.rho(p.as_slice())?;
        if rho.iter().any(|r| r.abs() > 1e-12) {
            return Err(Error::InvalidInput(format!("point {p} is not on the manifold")));
        }
    }
    let mut max_im_diff: f64 = 0.0;
    let mut max_diff: f64 = 0.0;
    for p in points {
        let (a, b) = (f.eval(p.as_slice())?, g.eval(p.as_slice())?);
        max_im_diff = max_im_diff.max((a.im - b.im).abs());
        max_diff = max_diff.max((a - b).norm());
    }
    let base_diff = (f.eval(base.as_slice())? - g.eval(base.as_slice())?).norm();
    let verdict = if max_im_diff >= UNIQUENESS_GATE_TOL || base_diff >= UNIQUENESS_GATE_TOL {
        Verdict::NotApplicable
    } else if max_diff < UNIQUENESS_PASS_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(UniquenessReport {
        verdict,
        points: points.len(),
        max_im_diff,
        base_diff,
        max_diff,
    })
}

/// Rigid target `Im w' = phi'(z', zbar')`, with `phi'` in `x1..xn', y1..yn'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidManifold {
    n: usize,
    d: usize,
    phi: Vec<MultiSeries>,
}

/// Variable names `x1..xn, y1..yn` of a rigid graph.
pub fn rigid_vars(n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("x{j}")).chain((1..=n).map(|j| format!("y{j}"))).collect()
}

impl RigidManifold {
    pub fn new(n: usize, phi: Vec<MultiSeries>) -> Result<Self> {
        if n == 0 || phi.is_empty() {
            return Err(Error::InvalidInput("rigid manifold needs n' >= 1 and d' >= 1".into()));
        }
        let vars = rigid_vars(n);
        for (k, p) in phi.iter().enumerate() {
            if p.vars() != vars.as_slice() {
                return Err(Error::IncompatibleVariables(format!(
                    "phi'[{k}] has variables {:?}, expected {vars:?} (no s-dependence)",
                    p.vars()
                )));
            }
            if let Some((idx, c)) = p.terms().find(|(idx, c)| idx.iter().sum::<u32>() <= 1 && c.abs() > 1e-14) {
                return Err(Error::InvalidInput(format!(
                    "phi'[{k}] must vanish to second order at 0, found {c} at {idx:?}"
                )));
            }
        }
        Ok(Self { n, d: phi.len(), phi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phi(&self) -> &[MultiSeries] {
        &self.phi
    }
}

/// Traces `Im g_i = phi'_i(Re f, Im f)` of the normal components of a map
/// into a rigid target, from the edge series `(Re f_j, Im f_j)` of its
/// tangential components.
pub fn rigid_target_traces(tangential: &[(MultiSeries, MultiSeries)], target: &RigidManifold) -> Result<Vec<MultiSeries>> {
    if tangential.len() != target.n() {
        return Err(Error::DimensionMismatch {
            expected: target.n(),
            got: tangential.len(),
        });
    }
    let inners: Vec<MultiSeries> = tangential
        .iter()
        .map(|(re, _)| re.clone())
        .chain(tangential.iter().map(|(_, im)| im.clone()))
        .collect();
    target.phi().iter().map(|p| MultiSeries::compose(p, &inners)).collect()
}
