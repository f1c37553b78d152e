use reflexcr_core::analytic::{AnalyticFunction, ComplexVector};
use reflexcr_core::crext::*;
use reflexcr_core::eow::NormalizationMap;
use reflexcr_core::reflection::{general_reflect, HalfDiscFunction};
use reflexcr_core::sampling;
use reflexcr_core::series::{MultiSeries, PowerSeries1D};
use reflexcr_core::wedge::{ChartBoxes, Cone, GenericManifold, Wedge};
use reflexcr_core::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const VARS: [&str; 3] = ["x1", "y1", "s1"];

fn heisenberg() -> Wedge {
    let phi = MultiSeries::polynomial(&VARS, 8, [(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0)]).unwrap();
    let m = GenericManifold::with_radius(1, 1, vec![phi], 1.0).unwrap();
    Wedge::over(m, Cone::new(vec![vec![1.0]], "R+").unwrap()).unwrap()
}

fn series(terms: &[(Vec<u32>, f64)]) -> MultiSeries {
    MultiSeries::polynomial(&VARS, 16, terms.iter().cloned()).unwrap()
}

/// `F0 = w~^2` with trace `2 s |z|^2`.
fn w_squared(boxes: ChartBoxes) -> (WedgeFunction, AnalyticFunction) {
    let f0 = AnalyticFunction::entire(2, "w~^2", |p| p[1] * p[1]);
    let trace = series(&[(vec![2, 0, 1], 2.0), (vec![0, 2, 1], 2.0)]);
    (WedgeFunction::from_holomorphic(&f0, trace, heisenberg(), boxes, 1).unwrap(), f0)
}

fn config(r: f64) -> CrExtensionConfig {
    let mut cfg = CrExtensionConfig::new(ChartBoxes::uniform(r));
    cfg.lemma_samples = 5000;
    cfg.oracle_samples = 200;
    cfg
}

#[test]
fn wrong_trace_is_rejected() {
    let f0 = AnalyticFunction::entire(2, "w~^2", |p| p[1] * p[1]);
    let trace = series(&[(vec![2, 0, 1], 3.0)]);
    let err = WedgeFunction::from_holomorphic(&f0, trace, heisenberg(), ChartBoxes::uniform(0.2), 1).unwrap_err();
    assert!(matches!(err, Error::InconsistentTrace(_)));
}

#[test]
fn pull_back_examples() {
    let boxes = ChartBoxes::uniform(0.2);
    let ray = Cone::new(vec![vec![1.0]], "R+").unwrap();
    let (wf, _) = w_squared(boxes);
    let pb = pull_back(&wf, &ray, boxes, 2000, 3).unwrap();
    let (z, w) = (c(0.1, -0.05), c(0.03, 0.02));
    let want = (w + c(0.0, z.norm_sqr())).powi(2);
    assert!((pb.function.eval(&[z, w]).unwrap() - want).norm() < 1e-15);

    let id = AnalyticFunction::entire(2, "w~", |p| p[1]);
    let wf = WedgeFunction::from_holomorphic(&id, series(&[(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0)]), heisenberg(), boxes, 1).unwrap();
    let pb = pull_back(&wf, &ray, boxes, 2000, 3).unwrap();
    assert!((pb.function.eval(&[z, w]).unwrap() - (w + c(0.0, z.norm_sqr()))).norm() < 1e-16);

    let one = AnalyticFunction::entire(2, "1", |_| c(1.0, 0.0));
    let wf = WedgeFunction::from_holomorphic(&one, series(&[]), heisenberg(), boxes, 1).unwrap();
    let pb = pull_back(&wf, &ray, boxes, 2000, 3).unwrap();
    assert_eq!(pb.function.eval(&[z, w]).unwrap(), c(1.0, 0.0));
    assert!(pb.function.eval(&[z, c(0.03, -0.02)]).is_err());
}

#[test]
fn pull_back_refuses_opposite_cone() {
    let boxes = ChartBoxes::uniform(0.2);
    let (wf, _) = w_squared(boxes);
    let neg = Cone::new(vec![vec![-1.0]], "R-").unwrap();
    assert!(matches!(pull_back(&wf, &neg, boxes, 500, 3), Err(Error::Lemma27Failed { .. })));
}

#[test]
fn complexify_trace_examples() {
    let boxes = ChartBoxes::uniform(1.5);
    let v = complexify_trace(&series(&[(vec![2, 0, 1], 2.0), (vec![0, 2, 1], 2.0)]), 1, 1, boxes).unwrap();
    assert_eq!(v.eval(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap(), c(0.0, 2.0));
    let v = complexify_trace(&series(&[(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0)]), 1, 1, boxes).unwrap();
    assert_eq!(v.eval(&[c(0.6, 0.8), c(0.3, 0.7)]).unwrap(), c(1.0, 0.0));
    let v = complexify_trace(&series(&[(vec![0, 0, 2], 1.0)]), 1, 1, boxes).unwrap();
    assert_eq!(v.eval(&[c(0.0, 0.0), c(1.0, 1.0)]).unwrap(), c(0.0, 2.0));
    let short = series(&[(vec![0, 0, 2], 1.0)]).with_polyradius(vec![2.0, 2.0, 0.5]).unwrap();
    assert!(matches!(complexify_trace(&short, 1, 1, boxes), Err(Error::Precondition(_))));
}

#[test]
fn g_for_w_squared_is_w_squared_minus_abs_z_fourth() {
    let boxes = ChartBoxes::uniform(0.2);
    let ray = Cone::new(vec![vec![1.0]], "R+").unwrap();
    let (wf, _) = w_squared(boxes);
    let pb = pull_back(&wf, &ray, boxes, 2000, 3).unwrap();
    let v = complexify_trace(wf.trace(), 1, 1, pb.boxes).unwrap();
    let g = build_g(&pb.function, &v, 1, &ray, pb.boxes, 4).unwrap();
    let mut rng = sampling::rng(8);
    for _ in 0..500 {
        let z = sampling::disc(&mut rng, 0.2);
        let w = c(sampling::uniform(&mut rng, -0.2, 0.2), sampling::uniform(&mut rng, -0.14, 0.14));
        let want = w * w - z.norm_sqr().powi(2);
        let got = g.eval(&[z, w]).unwrap();
        assert!((got - want).norm() < 1e-15, "{got} vs {want}");
        assert!((g.eval(&[z, w.conj()]).unwrap() - got.conj()).norm() < 1e-15);
    }
}

#[test]
fn inconsistent_side_values_fail_edge_reality() {
    let boxes = ChartBoxes::uniform(0.2);
    let ray = Cone::new(vec![vec![1.0]], "R+").unwrap();
    let (wf, _) = w_squared(boxes);
    let pb = pull_back(&wf, &ray, boxes, 500, 3).unwrap();
    let wrong = complexify_trace(&series(&[(vec![0, 0, 1], 1.0)]), 1, 1, pb.boxes).unwrap();
    assert!(matches!(build_g(&pb.function, &wrong, 1, &ray, pb.boxes, 4), Err(Error::InconsistentTrace(_))));
}

#[test]
fn extend_examples_by_mean_value() {
    let boxes = ChartBoxes::uniform(0.2);
    let ray = Cone::new(vec![vec![1.0]], "R+").unwrap();
    let side = reflexcr_core::eow::EowDomain::new(vec![0.2], ray.clone(), 0.2).unwrap();
    let a = NormalizationMap::for_domain(&side).unwrap();
    let gs = [
        AnalyticFunction::entire(2, "w^2 - |z|^4", |p| p[1] * p[1] - p[0].norm_sqr().powi(2)),
        AnalyticFunction::entire(2, "1", |_| c(1.0, 0.0)),
        AnalyticFunction::entire(2, "z w", |p| p[0] * p[1]),
    ];
    let mut rng = sampling::rng(2);
    for g in &gs {
        let big = extend(g, 1, &ray, boxes, &a, 256).unwrap();
        for _ in 0..100 {
            let p = [sampling::disc(&mut rng, 0.2), a.apply(&[sampling::disc(&mut rng, 0.9)])[0]];
            assert!((big.eval(&p).unwrap() - g.eval(&p).unwrap()).norm() < 1e-12, "{}", g.label());
        }
    }
}

#[test]
fn closed_form_pipeline() {
    let (wf, f0) = w_squared(ChartBoxes::uniform(0.2));
    let res = extend_cr_function(&wf, &config(0.2), Some(&f0)).unwrap();
    let report = res.report.as_ref().unwrap();
    assert!(report.max_abs_error < 1e-12, "{}", report.max_abs_error);
    assert!(report.max_cr_residual < 1e-6);
    for p in res.sample_grid(200, 5).unwrap() {
        let (z, w) = (p.as_slice()[0], p.as_slice()[1]);
        let want = w * w - z.norm_sqr().powi(2) + 2.0 * Complex64::i() * w * z.norm_sqr();
        assert!((res.f_chart.eval(p.as_slice()).unwrap() - want).norm() < 1e-12);
        assert!((res.g.eval(p.as_slice()).unwrap() - (w * w - z.norm_sqr().powi(2))).norm() < 1e-15);
    }
    let names: Vec<&str> = res.stages.iter().map(|s| s.stage).collect();
    assert_eq!(names, ["lemma27", "pull_back", "complexify_trace", "build_g", "extend", "reassemble", "oracle"]);
}

#[test]
fn identity_and_zero_functions() {
    let boxes = ChartBoxes::uniform(0.2);
    let id = AnalyticFunction::entire(2, "w~", |p| p[1]);
    let wf = WedgeFunction::from_holomorphic(&id, series(&[(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0)]), heisenberg(), boxes, 1).unwrap();
    let res = extend_cr_function(&wf, &config(0.2), Some(&id)).unwrap();
    assert!(res.report.unwrap().max_abs_error < 1e-13);
    let zero = AnalyticFunction::entire(2, "0", |_| c(0.0, 0.0));
    let wf = WedgeFunction::from_holomorphic(&zero, series(&[]), heisenberg(), boxes, 1).unwrap();
    let res = extend_cr_function(&wf, &config(0.2), None).unwrap();
    for p in res.sample_grid(50, 1).unwrap() {
        assert_eq!(res.f_chart.eval(p.as_slice()).unwrap(), c(0.0, 0.0));
    }
}

#[test]
fn trace_of_imaginary_part_restricts_to_edge() {
    let (wf, _) = w_squared(ChartBoxes::uniform(0.2));
    let res = extend_cr_function(&wf, &config(0.2), None).unwrap();
    let mut rng = sampling::rng(4);
    for _ in 0..100 {
        let z = sampling::disc(&mut rng, 0.1);
        let s = res.normalization.apply(&[c(sampling::uniform(&mut rng, -0.9, 0.9), 0.0)])[0];
        let f = res.f_chart.eval(&[z, s]).unwrap();
        assert!((f.im - 2.0 * s.re * z.norm_sqr()).abs() < 1e-8);
    }
}

#[test]
fn ambient_push_forward_matches_oracle() {
    let (wf, f0) = w_squared(ChartBoxes::uniform(0.2));
    let res = extend_cr_function(&wf, &config(0.2), None).unwrap();
    let m = wf.manifold();
    for p in res.sample_grid(100, 3).unwrap() {
        let amb = m.psi_tilde(&p.as_slice()[..1], &p.as_slice()[1..]).unwrap();
        let got = res.ambient.eval(amb.as_slice()).unwrap();
        assert!((got - f0.eval(amb.as_slice()).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn exp_times_z_with_truncated_trace() {
    let wedge = heisenberg();
    let expansion = edge_expansion(wedge.manifold(), 16, |a| a[1].exp()?.mul(&a[0])).unwrap();
    let f0 = AnalyticFunction::entire(2, "exp(w~) z", |p| p[1].exp() * p[0]);
    let boxes = ChartBoxes::uniform(0.1);
    let wf = WedgeFunction::from_holomorphic(&f0, expansion.im, wedge, boxes, 2).unwrap();
    let res = extend_cr_function(&wf, &config(0.1), Some(&f0)).unwrap();
    assert!(res.report.unwrap().max_abs_error < 1e-6);
}

#[test]
fn stage_errors_name_the_stage() {
    let (wf, _) = w_squared(ChartBoxes::uniform(0.2));
    let mut cfg = config(0.2);
    cfg.sub_cone = Some(Cone::new(vec![vec![-1.0]], "R-").unwrap());
    let err = extend_cr_function(&wf, &cfg, None).unwrap_err();
    assert!(matches!(err, Error::Stage { stage: "lemma27", .. }), "{err}");
    assert!(matches!(err.root(), Error::Lemma27Failed { .. }));
}

#[test]
fn oversized_normalization_is_halved() {
    let (wf, f0) = w_squared(ChartBoxes::uniform(0.2));
    let mut cfg = config(0.2);
    cfg.normalization = Some(NormalizationMap::new(nalgebra::DMatrix::from_element(1, 1, 0.1)).unwrap());
    let res = extend_cr_function(&wf, &cfg, Some(&f0)).unwrap();
    assert!(res.domain_halvings >= 1);
    assert!(res.report.unwrap().max_abs_error < 1e-12);
}

#[test]
fn codimension_zero_z_matches_general_reflection() {
    let phi = MultiSeries::zero(&["s1"], 8, vec![f64::INFINITY]).unwrap();
    let m = GenericManifold::with_radius(0, 1, vec![phi], 1.0).unwrap();
    let wedge = Wedge::over(m, Cone::new(vec![vec![1.0]], "R+").unwrap()).unwrap();
    let f0 = AnalyticFunction::entire(1, "exp(iw)", |p| (Complex64::i() * p[0]).exp());
    let sin = PowerSeries1D::sin(40);
    let trace = MultiSeries::polynomial(&["s1"], 40, sin.coeffs().iter().enumerate().map(|(k, &a)| (vec![k as u32], a))).unwrap();
    let boxes = ChartBoxes::uniform(0.5);
    let wf = WedgeFunction::from_holomorphic(&f0, trace, wedge, boxes, 1).unwrap();
    let mut cfg = CrExtensionConfig::new(boxes);
    cfg.sub_cone = Some(Cone::new(vec![vec![1.0]], "R+").unwrap());
    cfg.lemma_samples = 1000;
    let res = extend_cr_function(&wf, &cfg, None).unwrap();
    let upper = f0.restrict(reflexcr_core::analytic::Domain::predicate("D+", |p| p[0].im >= 0.0), "exp(iz) on D+");
    let hd = HalfDiscFunction::new(upper, sin).unwrap();
    let refl = general_reflect(&hd).unwrap();
    for p in res.sample_grid(300, 9).unwrap() {
        let (a, b) = (res.f_chart.eval(p.as_slice()).unwrap(), refl.eval(p.as_slice()).unwrap());
        assert!((a - b).norm() < 1e-9, "{p}: {a} vs {b}");
    }
}

#[test]
fn two_codimension_instance() {
    let vars = ["x1", "y1", "s1", "s2"];
    let phi1 = MultiSeries::polynomial(&vars, 8, [(vec![2, 0, 0, 0], 1.0), (vec![0, 2, 0, 0], 1.0)]).unwrap();
    let phi2 = MultiSeries::polynomial(&vars, 8, [(vec![1, 1, 0, 0], 1.0), (vec![1, 0, 1, 0], 0.5)]).unwrap();
    let m = GenericManifold::with_radius(1, 2, vec![phi1, phi2], 1.0).unwrap();
    let wedge = Wedge::over(m, Cone::new(vec![vec![1.0, 0.2], vec![0.2, 1.0]], "narrow").unwrap()).unwrap();
    let expansion = edge_expansion(wedge.manifold(), 12, |a| a[1].mul(&a[2])?.add(&a[0].mul(&a[1])?)).unwrap();
    let f0 = AnalyticFunction::entire(3, "w1 w2 + z w1", |p| p[1] * p[2] + p[0] * p[1]);
    let boxes = ChartBoxes::uniform(0.1);
    let wf = WedgeFunction::from_holomorphic(&f0, expansion.im, wedge, boxes, 3).unwrap();
    let mut cfg = config(0.1);
    cfg.nodes = 128;
    cfg.oracle_samples = 60;
    let res = extend_cr_function(&wf, &cfg, Some(&f0)).unwrap();
    assert!(res.report.unwrap().max_abs_error < 1e-10);
}

#[test]
fn uniqueness_gates_and_verdicts() {
    let wedge = heisenberg();
    let m = wedge.manifold();
    let f = AnalyticFunction::entire(2, "w~^2", |p| p[1] * p[1]);
    let pts = edge_points(m, &ChartBoxes::uniform(0.3), 200, 1).unwrap();
    let base = ComplexVector::new(vec![c(0.0, 0.0); 2]).unwrap();
    let r = uniqueness_check(&f, &f, m, &pts, &base).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.max_diff, 0.0);
    for shift in [1e-3, -0.5] {
        let g = AnalyticFunction::entire(2, "w~^2 + c", move |p| p[1] * p[1] + shift);
        let r = uniqueness_check(&f, &g, m, &pts, &base).unwrap();
        assert!(r.max_im_diff < 1e-10);
        assert_eq!(r.verdict, Verdict::NotApplicable);
    }
    let g = AnalyticFunction::entire(2, "w~^2 + i c", |p| p[1] * p[1] + c(0.0, 1e-3));
    assert_eq!(uniqueness_check(&f, &g, m, &pts, &base).unwrap().verdict, Verdict::NotApplicable);
    let off = [ComplexVector::new(vec![c(0.0, 0.0), c(0.0, 0.5)]).unwrap()];
    assert!(uniqueness_check(&f, &f, m, &off, &base).is_err());
}

#[test]
fn uniqueness_reports_fail_when_hypotheses_hold_but_values_differ() {
    // g is not CR; it only shares Im and the base value with f
    let wedge = heisenberg();
    let m = wedge.manifold();
    let f = AnalyticFunction::entire(2, "w~", |p| p[1]);
    let g = AnalyticFunction::entire(2, "w~ + Re(w~)", |p| p[1] + p[1].re);
    let pts = edge_points(m, &ChartBoxes::uniform(0.3), 100, 2).unwrap();
    let base = ComplexVector::new(vec![c(0.0, 0.0); 2]).unwrap();
    assert_eq!(uniqueness_check(&f, &g, m, &pts, &base).unwrap().verdict, Verdict::Fail);
}

#[test]
fn rigid_traces_examples() {
    let xy = ["x1", "y1"];
    let target = RigidManifold::new(1, vec![MultiSeries::polynomial(&xy, 8, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap()]).unwrap();
    let x = series(&[(vec![1, 0, 0], 1.0)]);
    let y = series(&[(vec![0, 1, 0], 1.0)]);
    let t = rigid_target_traces(&[(x.clone(), y.clone())], &target).unwrap();
    assert_eq!(t[0], series(&[(vec![2, 0, 0], 1.0), (vec![0, 2, 0], 1.0)]));

    let flat = RigidManifold::new(1, vec![MultiSeries::zero(&xy, 8, vec![f64::INFINITY; 2]).unwrap()]).unwrap();
    assert!(rigid_target_traces(&[(x.clone(), y.clone())], &flat).unwrap()[0].is_zero());

    let re_sq = RigidManifold::new(1, vec![MultiSeries::polynomial(&xy, 8, [(vec![2, 0], 1.0)]).unwrap()]).unwrap();
    let s = series(&[(vec![0, 0, 1], 1.0)]);
    let t = rigid_target_traces(&[(s, series(&[]))], &re_sq).unwrap();
    assert_eq!(t[0], series(&[(vec![0, 0, 2], 1.0)]));

    assert!(rigid_target_traces(&[], &target).is_err());
    let with_s = MultiSeries::polynomial(&["x1", "y1", "s1"], 4, [(vec![0, 0, 2], 1.0)]).unwrap();
    assert!(RigidManifold::new(1, vec![with_s]).is_err());
}

#[test]
fn rigid_target_pipeline_reproduces_closed_form_map() {
    // H = (a z, |a|^2 w) maps Im w = |z|^2 into Im w' = |z'|^2.
    let a = c(0.8, 0.3);
    let wedge = heisenberg();
    let f1 = edge_expansion(wedge.manifold(), 8, |s| s[0].scale(a)).unwrap();
    let target = RigidManifold::new(1, vec![MultiSeries::polynomial(&["x1", "y1"], 8, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap()]).unwrap();
    let traces = rigid_target_traces(&[(f1.re, f1.im)], &target).unwrap();
    let k = a.norm_sqr();
    let g1 = AnalyticFunction::entire(2, "|a|^2 w~", move |p| k * p[1]);
    let boxes = ChartBoxes::uniform(0.2);
    let wf = WedgeFunction::from_holomorphic(&g1, traces[0].clone(), wedge, boxes, 1).unwrap();
    let res = extend_cr_function(&wf, &config(0.2), Some(&g1)).unwrap();
    assert!(res.report.unwrap().max_abs_error < 1e-8);
}
