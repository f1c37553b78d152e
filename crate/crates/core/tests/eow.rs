use reflexcr_core::analytic::AnalyticFunction;
use reflexcr_core::eow::*;
use reflexcr_core::sampling;
use reflexcr_core::wedge::Cone;
use reflexcr_core::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polydisc_points(seed: u64, d: usize, r: f64, count: usize) -> Vec<Vec<Complex64>> {
    let mut rng = sampling::rng(seed);
    (0..count).map(|_| (0..d).map(|_| sampling::disc(&mut rng, r)).collect()).collect()
}

fn model_extend(f: &AnalyticFunction, nodes: usize) -> AnalyticFunction {
    let dom = EowDomain::model(f.arity()).unwrap();
    eow_extend(&dom.restrict(f), &dom, &NormalizationMap::identity(f.arity()).unwrap(), nodes).unwrap()
}

fn max_err(g: &AnalyticFunction, f: &AnalyticFunction, pts: &[Vec<Complex64>]) -> f64 {
    pts.iter().map(|p| (g.eval(p).unwrap() - f.eval(p).unwrap()).norm()).fold(0.0, f64::max)
}

#[test]
fn kernel_sign_property_on_dense_samples() {
    let mut rng = sampling::rng(1);
    for _ in 0..10_000 {
        let w = sampling::disc(&mut rng, 1.0);
        let lambda = Complex64::from_polar(1.0, sampling::uniform(&mut rng, 0.0, std::f64::consts::TAU));
        let v = mobius_phi(w, lambda).unwrap();
        if lambda.im.abs() > 1e-9 {
            assert_eq!(v.im.signum(), lambda.im.signum(), "w={w} lambda={lambda}");
        }
        let im = mobius_phi_im(w, lambda).unwrap();
        assert!((im - v.im).abs() < 1e-13);
        let x = sampling::uniform(&mut rng, -1.0, 1.0);
        let l = sampling::disc(&mut rng, 1.0);
        let v = mobius_phi(c(x, 0.0), l).unwrap();
        if l.im.abs() > 1e-9 {
            assert_eq!(v.im.signum(), l.im.signum());
        }
        assert!(v.norm() < 6.0);
    }
}

#[test]
fn constant_extends_to_constant() {
    let one = AnalyticFunction::entire(2, "1", |_| c(1.0, 0.0));
    let g = model_extend(&one, 64);
    for p in polydisc_points(2, 2, 0.9, 50) {
        assert!((g.eval(&p).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn mean_value_oracle_for_entire_functions() {
    let pts = polydisc_points(3, 2, 0.5, 400);
    let fs = [
        AnalyticFunction::entire(2, "w1 w2", |w| w[0] * w[1]),
        AnalyticFunction::entire(2, "w1^3 + w2", |w| w[0].powi(3) + w[1]),
        AnalyticFunction::entire(2, "exp(w1 + w2)", |w| (w[0] + w[1]).exp()),
    ];
    for f in &fs {
        let err = max_err(&model_extend(f, 256), f, &pts);
        assert!(err < 1e-12, "{}: {err}", f.label());
    }
}

#[test]
fn doubling_nodes_changes_little() {
    let f = AnalyticFunction::entire(2, "deg 8", |w| w[0].powi(5) * w[1].powi(3) - w[1].powi(8) + 2.0 * w[0]);
    let (g128, g256) = (model_extend(&f, 128), model_extend(&f, 256));
    let pts = polydisc_points(4, 2, 0.9, 200);
    assert!(max_err(&g128, &g256, &pts) < 1e-10);
}

#[test]
fn quadrature_error_decays_geometrically_near_the_boundary() {
    let f = AnalyticFunction::entire(1, "exp", |w| w[0].exp());
    let pts = vec![vec![c(0.0, 0.97)], vec![c(-0.95, 0.1)]];
    let errs: Vec<f64> = [16, 32, 64, 128].iter().map(|&n| max_err(&model_extend(&f, n), &f, &pts)).collect();
    for pair in errs.windows(2) {
        if pair[0] > 1e-13 {
            assert!(pair[1] <= pair[0] / 10.0, "{errs:?}");
        }
    }
}

#[test]
fn edge_and_wedge_agreement_for_a_piecewise_defined_g() {
    let f = AnalyticFunction::entire(2, "sin(w1) w2", |w| w[0].sin() * w[1]);
    let g = model_extend(&f, 256);
    let mut rng = sampling::rng(5);
    for _ in 0..1000 {
        let s = [c(sampling::uniform(&mut rng, -0.7, 0.7), 0.0), c(sampling::uniform(&mut rng, -0.7, 0.7), 0.0)];
        assert!((g.eval(&s).unwrap() - f.eval(&s).unwrap()).norm() < 1e-10);
    }
    for _ in 0..500 {
        let p = [
            c(sampling::uniform(&mut rng, -0.3, 0.3), sampling::uniform(&mut rng, 0.0, 0.3)),
            c(sampling::uniform(&mut rng, -0.3, 0.3), sampling::uniform(&mut rng, 0.0, 0.3)),
        ];
        assert!((g.eval(&p).unwrap() - f.eval(&p).unwrap()).norm() < 1e-9);
    }
}

#[test]
fn general_cone_uses_normalization() {
    let cone = Cone::new(vec![vec![1.0, 0.2], vec![0.3, 1.0]], "tilted").unwrap();
    let dom = EowDomain::new(vec![0.5, 0.5], cone.clone(), 0.4).unwrap();
    let a = NormalizationMap::for_domain(&dom).unwrap();
    assert!(a.certify(&cone, 2000, 9).unwrap().passes);
    let f = AnalyticFunction::entire(2, "w1^2 - 3 w2", |w| w[0] * w[0] - 3.0 * w[1]);
    let g = eow_extend(&dom.restrict(&f), &dom, &a, 256).unwrap();
    let mut rng = sampling::rng(6);
    for _ in 0..200 {
        let omega: Vec<Complex64> = (0..2).map(|_| sampling::disc(&mut rng, 0.5)).collect();
        let w = a.apply(&omega);
        assert!((g.eval(&w).unwrap() - f.eval(&w).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn identity_normalization_is_plain_averaging() {
    let f = AnalyticFunction::entire(2, "w1 + w2^2", |w| w[0] + w[1] * w[1]);
    let dom = EowDomain::model(2).unwrap();
    let via_map = eow_extend(&dom.restrict(&f), &dom, &NormalizationMap::identity(2).unwrap(), 32).unwrap();
    let p = [c(0.2, 0.1), c(-0.3, 0.05)];
    let direct: Complex64 = (0..32)
        .map(|k| {
            let l = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 32.0);
            f.eval(&build_phi(&p, l).unwrap()).unwrap()
        })
        .sum::<Complex64>()
        / 32.0;
    assert_eq!(via_map.eval(&p).unwrap(), direct);
}

#[test]
fn oversized_map_reports_quadrature_escape() {
    let dom = EowDomain::model(1).unwrap();
    let f = AnalyticFunction::entire(1, "w", |w| w[0]);
    let big = NormalizationMap::new(nalgebra::DMatrix::from_element(1, 1, 3.0)).unwrap();
    let g = eow_extend(&dom.restrict(&f), &dom, &big, 16).unwrap();
    let err = g.eval(&[c(0.0, 0.0)]).unwrap_err();
    assert!(matches!(err, Error::QuadratureEscape { .. }), "{err}");
}

#[test]
fn outside_image_of_polydisc_is_a_domain_error() {
    let f = AnalyticFunction::entire(1, "w", |w| w[0]);
    let g = model_extend(&f, 16);
    assert!(matches!(g.eval(&[c(1.2, 0.0)]), Err(Error::DomainViolation { .. })));
}
