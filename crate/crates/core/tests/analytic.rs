use reflexcr_core::analytic::*;
use reflexcr_core::{sampling, Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pt(z: &[Complex64]) -> ComplexVector {
    ComplexVector::new(z.to_vec()).unwrap()
}

#[test]
fn non_finite_vectors_are_rejected() {
    assert!(matches!(ComplexVector::new(vec![c(f64::NAN, 0.0)]), Err(Error::NonFinite(_))));
    assert!(ComplexVector::from_reals(&[0.5, -1.0]).unwrap().as_slice().iter().all(|z| z.im == 0.0));
}

#[test]
fn evaluation_outside_the_domain_is_an_error() {
    let f = AnalyticFunction::entire(1, "z", |p| p[0]).restrict(Domain::Box(DomainBox::polydisc(1, 0.5).unwrap()), "z on D_0.5");
    assert!(f.eval1(c(0.3, 0.3)).is_ok());
    assert!(matches!(f.eval1(c(0.6, 0.0)), Err(Error::DomainViolation { .. })));
    assert!(matches!(f.eval(&[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn half_plane_constraints_and_unions() {
    let upper = DomainBox::polydisc(1, 1.0).unwrap().with_constraint(0, Constraint::ImNonNegative).unwrap();
    let lower = DomainBox::polydisc(1, 0.2).unwrap().with_constraint(0, Constraint::ImNegative).unwrap();
    assert!(DomainBox::polydisc(1, 1.0).unwrap().with_constraint(1, Constraint::Real).is_err());
    let d = Domain::Union(vec![Domain::Box(upper), Domain::Box(lower)]);
    assert!(d.contains(&[c(0.9, 0.1)]));
    assert!(d.contains(&[c(0.1, -0.1)]));
    assert!(!d.contains(&[c(0.5, -0.1)]));
}

#[test]
fn holomorphic_functions_have_small_cr_residual() {
    let f = AnalyticFunction::entire(2, "exp(z1) z2^2", |p| p[0].exp() * p[1] * p[1]);
    let mut rng = sampling::rng(3);
    let pts: Vec<ComplexVector> = (0..200).map(|_| pt(&[sampling::disc(&mut rng, 1.0), sampling::disc(&mut rng, 1.0)])).collect();
    let rep = compare(&f, &f, &pts).unwrap();
    assert_eq!(rep.max_abs_error, 0.0);
    assert!(rep.max_cr_residual < 1e-9, "{}", rep.max_cr_residual);
}

#[test]
fn conjugation_is_detected_by_cr_residual() {
    let f = AnalyticFunction::entire(1, "conj z", |p| p[0].conj());
    let r = cr_residual(&f, &pt(&[c(0.1, 0.2)]), DEFAULT_STEP).unwrap();
    assert!((r - 1.0).abs() < 1e-9);
}

#[test]
fn cr_stencil_must_fit_in_the_domain() {
    let f = AnalyticFunction::entire(1, "z", |p| p[0]).restrict(Domain::Box(DomainBox::polydisc(1, 0.5).unwrap()), "z");
    assert!(matches!(cr_residual(&f, &pt(&[c(0.5, 0.0)]), 1e-3), Err(Error::DomainViolation { .. })));
    assert!(matches!(cr_residual(&f, &pt(&[c(0.0, 0.0)]), 0.0), Err(Error::InvalidInput(_))));
}

#[test]
fn residual_report_records_pointwise_errors() {
    let f = AnalyticFunction::entire(1, "z^2", |p| p[0] * p[0]);
    let g = AnalyticFunction::entire(1, "z^2 + 1e-3", |p| p[0] * p[0] + 1e-3);
    let pts = vec![pt(&[c(0.1, 0.0)]), pt(&[c(0.0, -0.4)])];
    let rep = compare_in(&g, &f, &pts, &[0], DEFAULT_STEP).unwrap();
    assert_eq!(rep.grid.len(), 2);
    assert!(rep.abs_errors.iter().all(|e| (e - 1e-3).abs() < 1e-15));
    let only = holomorphy_report(&f, &pts, &[0], DEFAULT_STEP).unwrap();
    assert!(only.oracle_values.is_none());
    assert_eq!(only.max_abs_error, 0.0);
}

#[test]
fn grid_evaluation_reports_the_first_failing_point() {
    let f = AnalyticFunction::entire(1, "z", |p| p[0]).restrict(Domain::Box(DomainBox::polydisc(1, 0.5).unwrap()), "z");
    let pts = vec![pt(&[c(0.1, 0.0)]), pt(&[c(0.7, 0.0)]), pt(&[c(0.9, 0.0)])];
    match evaluate_on_grid(&f, &pts) {
        Err(Error::DomainViolation { point, .. }) => assert!(point.contains("0.7"), "{point}"),
        other => panic!("{other:?}"),
    }
}
