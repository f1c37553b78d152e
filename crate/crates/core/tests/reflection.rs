use reflexcr_core::analytic::{compare_in, AnalyticFunction, ComplexVector, Domain, DEFAULT_STEP};
use reflexcr_core::reflection::*;
use reflexcr_core::series::PowerSeries1D;
use reflexcr_core::{sampling, Complex64, Error};

type Entire = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn upper(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> AnalyticFunction {
    AnalyticFunction::entire(1, "f", move |p| f(p[0]))
        .restrict(Domain::predicate("upper half disc", |p| p[0].im >= 0.0 && p[0].norm() <= 1.0), "f on D+")
}

fn lower_points(seed: u64, r: f64, count: usize) -> Vec<ComplexVector> {
    let mut rng = sampling::rng(seed);
    (0..count).map(|_| ComplexVector::scalar(sampling::lower_half_disc(&mut rng, r)).unwrap()).collect()
}

#[test]
fn general_reflection_continues_entire_functions() {
    let cases: Vec<(Entire, PowerSeries1D)> = vec![
        (Box::new(|z: Complex64| (Complex64::i() * z).exp()), PowerSeries1D::sin(64)),
        (Box::new(|z: Complex64| Complex64::i() * z.cos()), PowerSeries1D::cos(64)),
        (Box::new(|z: Complex64| (1.0 + Complex64::i()) * z * z), PowerSeries1D::new(vec![0.0, 0.0, 1.0], f64::INFINITY).unwrap()),
    ];
    for (k, (f, trace)) in cases.into_iter().enumerate() {
        let f = std::sync::Arc::new(f);
        let fa = f.clone();
        let h = HalfDiscFunction::new(upper(move |z| fa(z)), trace).unwrap();
        let big_f = general_reflect(&h).unwrap();
        let oracle = AnalyticFunction::entire(1, "oracle", move |p| f(p[0]));
        let rep = compare_in(&big_f, &oracle, &lower_points(k as u64, 0.9, 300), &[0], DEFAULT_STEP).unwrap();
        assert!(rep.max_abs_error < 1e-12, "case {k}: {}", rep.max_abs_error);
        assert!(rep.max_cr_residual < 1e-6, "case {k}: {}", rep.max_cr_residual);
    }
}

#[test]
fn geometric_trace_limits_the_lower_disc() {
    // f = i/(1-z) has Im f = 1/(1-x) on the axis
    let h = HalfDiscFunction::with_radius(upper(|z| Complex64::i() / (1.0 - z)), PowerSeries1D::geometric(400), 1.0).unwrap();
    assert!(h.effective_radius() < 1.0);
    let big_f = general_reflect(&h).unwrap();
    let r = h.effective_radius();
    assert!(big_f.eval1(c(0.0, -0.5 * r)).is_ok());
    assert!(big_f.eval1(c(0.0, -0.99)).is_err());
}

#[test]
fn inconsistent_trace_is_rejected() {
    let res = HalfDiscFunction::new(upper(|z| (Complex64::i() * z).exp()), PowerSeries1D::cos(32));
    assert!(matches!(res, Err(Error::InconsistentTrace(_))));
}

#[test]
fn classical_reflection_needs_zero_trace() {
    let h = HalfDiscFunction::new(upper(|z| (Complex64::i() * z).exp()), PowerSeries1D::sin(32)).unwrap();
    assert!(matches!(classical_reflect(&h), Err(Error::Precondition(_))));
    let real_on_axis = HalfDiscFunction::new(upper(|z| z.exp()), PowerSeries1D::zero(8, 1.0).unwrap()).unwrap();
    let f = classical_reflect(&real_on_axis).unwrap();
    let z = c(0.2, -0.3);
    assert!((f.eval1(z).unwrap() - z.exp()).norm() < 1e-15);
}

#[test]
fn harmonic_reflection_of_imaginary_parts() {
    // v = Im exp(z) = e^x sin y vanishes on the axis
    let ext = harmonic_reflect(|x, y| x.exp() * y.sin(), PowerSeries1D::zero(8, f64::INFINITY).unwrap()).unwrap();
    for (x, y) in [(0.1, -0.5), (-0.6, -0.2), (0.3, 0.4)] {
        assert!((ext.eval(x, y).unwrap() - x.exp() * y.sin()).abs() < 1e-14);
        assert!(ext.laplacian(x, y, LAPLACIAN_STEP).unwrap().abs() < HARMONIC_TOL);
    }
}

#[test]
fn harmonic_reflection_rejects_non_harmonic_input() {
    let res = harmonic_reflect(|x, y| x * x + y * y, PowerSeries1D::new(vec![0.0, 0.0, 1.0], f64::INFINITY).unwrap());
    assert!(matches!(res, Err(Error::Precondition(_))));
}

#[test]
fn curve_reflection_across_a_cubic() {
    // S = {x + i x^3/3}; f = z^2 has Im f(x + i x^3/3) = 2x^4/3
    let gamma = PowerSeries1D::new(vec![0.0, 0.0, 0.0, 1.0 / 3.0], f64::INFINITY).unwrap();
    let trace = PowerSeries1D::new(vec![0.0, 0.0, 0.0, 0.0, 2.0 / 3.0], f64::INFINITY).unwrap();
    let above = AnalyticFunction::entire(1, "z^2", |p| p[0] * p[0]).restrict(
        Domain::predicate("above the cubic", |p| p[0].norm() <= 1.0 && p[0].im >= p[0].re.powi(3) / 3.0 - 1e-12),
        "z^2",
    );
    let big_f = curve_flatten_reflect(&above, &gamma, trace).unwrap();
    let mut rng = sampling::rng(9);
    for _ in 0..300 {
        let z = sampling::disc(&mut rng, 0.2);
        assert!((big_f.eval1(z).unwrap() - z * z).norm() < 1e-10, "z={z}");
    }
}

#[test]
fn curve_must_pass_through_the_origin() {
    let gamma = PowerSeries1D::new(vec![0.1, 0.0, 1.0], f64::INFINITY).unwrap();
    let f = AnalyticFunction::entire(1, "z", |p| p[0]);
    assert!(matches!(
        curve_flatten_reflect(&f, &gamma, PowerSeries1D::zero(4, 1.0).unwrap()),
        Err(Error::Precondition(_))
    ));
}
