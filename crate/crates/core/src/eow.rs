//! Edge-of-the-wedge extension by circular averaging of a Möbius kernel.
//!
//! On the model domain `E = (-6, 6)^d`, `V = (0, 6)^d` the extension of `g`
//! from `W+ ∪ W- ∪ E` to the unit polydisc is
//! `G(w) = (1/2π) ∫ g(Φ(w, e^{iθ})) dθ`, where `Φ` applies
//! `φ(w, λ) = (w + λ/c) / (1 + cλw)`, `c = √2 - 1`, componentwise. A general
//! domain is reduced to the model by a real linear map `A`.

use std::f64::consts::{SQRT_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{fmt_point, AnalyticFunction, Domain, Provenance};
use crate::error::{Error, Result};
use crate::wedge::{cone_containment_check, Cone, ContainmentReport};

/// `c = √2 - 1`.
pub const MOBIUS_C: f64 = SQRT_2 - 1.0;
/// Supremum of `|φ|` on the closed bidisc, `(1 + 1/c) / (1 - c) = 3 + 2√2`.
pub const KERNEL_SUP: f64 = 3.0 + 2.0 * SQRT_2;
/// Half-width of the model edge and height of the model wedge.
pub const MODEL_SCALE: f64 = 6.0;
pub const DEFAULT_NODES: usize = 256;
/// Closure slack of the `W+ ∪ W- ∪ E` membership test.
pub const CLOSURE_TOL: f64 = 1e-12;
/// Samples used to certify a normalization map.
pub const CERTIFY_SAMPLES: usize = 4096;

const SINGULAR_TOL: f64 = 1e-14;
const UNIT_TOL: f64 = 1e-12;

fn check_kernel_args(w: Complex64, lambda: Complex64) -> Result<Complex64> {
    if w.norm() > 1.0 + UNIT_TOL || lambda.norm() > 1.0 + UNIT_TOL {
        return Err(Error::Precondition(format!(
            "kernel arguments must lie in the closed bidisc, got w={w}, lambda={lambda}"
        )));
    }
    let den = 1.0 + MOBIUS_C * lambda * w;
    if den.norm() < SINGULAR_TOL {
        return Err(Error::SingularKernel {
            w: w.to_string(),
            lambda: lambda.to_string(),
        });
    }
    Ok(den)
}

/// `φ(w, λ) = (w + λ/c) / (1 + cλw)` on the closed bidisc.
pub fn mobius_phi(w: Complex64, lambda: Complex64) -> Result<Complex64> {
    let den = check_kernel_args(w, lambda)?;
    Ok((w + lambda / MOBIUS_C) / den)
}

/// `Im φ(w, λ)` from the closed form
/// `((1 - |λ|²) Im(cw) + (1 - |cw|²) Im λ) / (c |1 + cλw|²)`.
pub fn mobius_phi_im(w: Complex64, lambda: Complex64) -> Result<f64> {
    let den = check_kernel_args(w, lambda)?;
    let cw = MOBIUS_C * w;
    Ok(((1.0 - lambda.norm_sqr()) * cw.im + (1.0 - cw.norm_sqr()) * lambda.im) / (MOBIUS_C * den.norm_sqr()))
}

/// `Φ(w, λ) = (φ(w_1, λ), ..., φ(w_d, λ))`.
pub fn build_phi(w: &[Complex64], lambda: Complex64) -> Result<Vec<Complex64>> {
    w.iter().map(|&wj| mobius_phi(wj, lambda)).collect()
}

/// `(z, w) -> (z, Φ(w, λ))`: the kernel acting on the last `w.len()` coordinates.
pub fn build_phi_extended(z: &[Complex64], w: &[Complex64], lambda: Complex64) -> Result<Vec<Complex64>> {
    let mut out = z.to_vec();
    out.extend(build_phi(w, lambda)?);
    Ok(out)
}

/// Domain `W+ ∪ W- ∪ E` with `E = {|Re w_k| < e_k}`, `W± = E ± iV`,
/// `V = cone ∩ B(0, R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EowDomain {
    edge: Vec<f64>,
    cone: Cone,
    radius: f64,
}

impl EowDomain {
    pub fn new(edge: Vec<f64>, cone: Cone, radius: f64) -> Result<Self> {
        if edge.len() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                got: edge.len(),
            });
        }
        if edge.iter().chain([&radius]).any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidInput("edge half-widths and wedge radius must be positive".into()));
        }
        Ok(Self { edge, cone, radius })
    }

    /// `E = (-6, 6)^d` and the orthant wedge of radius `6√d`, which contains
    /// the model cube `(0, 6)^d`.
    pub fn model(d: usize) -> Result<Self> {
        Self::new(
            vec![MODEL_SCALE; d],
            Cone::orthant(d)?,
            MODEL_SCALE * (d as f64).sqrt(),
        )
    }

    pub fn dim(&self) -> usize {
        self.edge.len()
    }

    pub fn edge(&self) -> &[f64] {
        &self.edge
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Membership in the closure of `W+ ∪ W- ∪ E`, with slack `tol`.
    pub fn contains(&self, w: &[Complex64], tol: f64) -> bool {
        if w.len() != self.dim() {
            return false;
        }
        let in_edge = w.iter().zip(&self.edge).all(|(x, e)| x.re.abs() <= e + tol);
        let t: Vec<f64> = w.iter().map(|x| x.im).collect();
        let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        let neg: Vec<f64> = t.iter().map(|x| -x).collect();
        in_edge
            && tn <= self.radius + tol
            && (self.cone.contains_closed(&t, tol) || self.cone.contains_closed(&neg, tol))
    }

    pub fn as_domain(&self) -> Domain {
        let me = self.clone();
        Domain::predicate(format!("W+ ∪ W- ∪ E over {}", self.cone.label()), move |w| {
            me.contains(w, CLOSURE_TOL)
        })
    }

    /// `f` restricted to this domain.
    pub fn restrict(&self, f: &AnalyticFunction) -> AnalyticFunction {
        f.restrict(self.as_domain(), format!("{} on W+ ∪ W- ∪ E", f.label()))
    }
}

/// Real linear map `A` acting on `C^d` coordinatewise, carrying the model
/// domain into a target domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationMap {
    #[serde(serialize_with = "serialize_matrix")]
    a: DMatrix<f64>,
    #[serde(skip)]
    a_inv: DMatrix<f64>,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in m.row_iter() {
        seq.serialize_element(&r.iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

impl NormalizationMap {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::InvalidInput("normalization map must be a nonempty square matrix".into()));
        }
        if a.determinant().abs() <= 1e-12 {
            return Err(Error::Precondition("normalization map is singular".into()));
        }
        let a_inv = a.clone().try_inverse().ok_or_else(|| Error::Precondition("normalization map is singular".into()))?;
        Ok(Self { a, a_inv })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d))
    }

    /// `A = κ [ĝ_1 ... ĝ_d]` from the first `d` independent unit generators,
    /// with `κ` the largest scale keeping `A(E_model) ⊂ E` and
    /// `A(V_model) ⊂ B(0, R)`.
    pub fn for_domain(domain: &EowDomain) -> Result<Self> {
        let d = domain.dim();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for g in domain.cone().generators() {
            let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u: Vec<f64> = g.iter().map(|x| x / n).collect();
            let mut trial = cols.clone();
            trial.push(u.clone());
            let m = DMatrix::from_fn(d, trial.len(), |i, j| trial[j][i]);
            if m.rank(1e-10) == trial.len() {
                cols = trial;
            }
            if cols.len() == d {
                break;
            }
        }
        if cols.len() < d {
            return Err(Error::Precondition("cone generators do not span R^d".into()));
        }
        let g = DMatrix::from_fn(d, d, |i, j| cols[j][i]);
        let mut kappa = domain.radius() / (MODEL_SCALE * d as f64);
        for (k, e) in domain.edge().iter().enumerate() {
            let row: f64 = g.row(k).iter().map(|x| x.abs()).sum();
            kappa = kappa.min(e / (MODEL_SCALE * row));
        }
        Self::new(g * kappa)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn apply(&self, w: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.a, w)
    }

    pub fn apply_inverse(&self, w: &[Complex64]) -> Vec<Complex64> {
        apply_real(&self.a_inv, w)
    }

    /// Same map with `A` halved; the image of the polydisc shrinks accordingly.
    pub fn halved(&self) -> Self {
        Self {
            a: &self.a * 0.5,
            a_inv: &self.a_inv * 2.0,
        }
    }

    /// `A⁻¹ w` lies in the open unit polydisc.
    pub fn in_image_of_polydisc(&self, w: &[Complex64]) -> bool {
        w.len() == self.dim() && self.apply_inverse(w).iter().all(|x| x.norm() < 1.0)
    }

    /// Samples the positive orthant mapped by `A` against `cone`.
    pub fn certify(&self, cone: &Cone, samples: usize, seed: u64) -> Result<ContainmentReport> {
        cone_containment_check(&Cone::orthant(self.dim())?, &self.a, cone, samples, seed)
    }
}

fn apply_real(m: &DMatrix<f64>, w: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| w.iter().enumerate().map(|(j, x)| x * m[(i, j)]).sum())
        .collect()
}

/// Extension of `g` to `A(D^d)`:
/// `G(w) = (1/N) Σ_k g(A Φ(A⁻¹ w, e^{2πik/N}))` (trapezoid rule in `θ`).
///
/// `g` must be defined on `domain` and `A` must carry the model domain into
/// it; a quadrature node landing elsewhere is reported as
/// [`Error::QuadratureEscape`].
pub fn eow_extend(
    g: &AnalyticFunction,
    domain: &EowDomain,
    a: &NormalizationMap,
    nodes: usize,
) -> Result<AnalyticFunction> {
    let d = domain.dim();
    if g.arity() != d || a.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if g.arity() != d { g.arity() } else { a.dim() },
        });
    }
    if nodes == 0 {
        return Err(Error::InvalidInput("quadrature needs at least one node".into()));
    }
    let (g, domain, a) = (g.clone(), domain.clone(), a.clone());
    let a_dom = a.clone();
    let unit = Domain::predicate("A(D^d)", move |w| a_dom.in_image_of_polydisc(w));
    let label = format!("EOW extension of {} ({nodes} nodes)", g.label());
    Ok(AnalyticFunction::fallible(d, unit, Provenance::ConstructedExtension, label, move |w| {
        eow_average(&|p| g.eval(p), &domain, &a, nodes, w)
    }))
}

/// Trapezoid average `(1/N) Σ_k g(A Φ(A⁻¹ w, e^{2πik/N}))` for a single `w`.
///
/// Every node is checked against `domain` before `g` is called; domain errors
/// raised by `g` itself are also reported as [`Error::QuadratureEscape`].
pub fn eow_average(
    g: &dyn Fn(&[Complex64]) -> Result<Complex64>,
    domain: &EowDomain,
    a: &NormalizationMap,
    nodes: usize,
    w: &[Complex64],
) -> Result<Complex64> {
    if nodes == 0 {
        return Err(Error::InvalidInput("quadrature needs at least one node".into()));
    }
    let omega = a.apply_inverse(w);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let theta = TAU * k as f64 / nodes as f64;
        let p = a.apply(&build_phi(&omega, Complex64::from_polar(1.0, theta))?);
        if !domain.contains(&p, CLOSURE_TOL) {
            return Err(Error::QuadratureEscape {
                theta,
                point: fmt_point(&p),
            });
        }
        sum += g(&p).map_err(|e| match e {
            Error::DomainViolation { point, .. } => Error::QuadratureEscape { theta, point },
            other => other,
        })?;
    }
    Ok(sum / nodes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_identity_at_zero_lambda() {
        for w in [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.3)] {
            assert_eq!(mobius_phi(w, c(0.0, 0.0)).unwrap(), w);
        }
        assert!((mobius_phi(c(0.0, 0.0), c(1.0, 0.0)).unwrap().re - (SQRT_2 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn im_formula_cross_check() {
        let (w, l) = (c(0.5, 0.0), c(0.0, 1.0));
        assert!((mobius_phi_im(w, l).unwrap() - mobius_phi(w, l).unwrap().im).abs() < 1e-13);
        assert_eq!(mobius_phi_im(c(0.4, 0.0), c(-0.7, 0.0)).unwrap(), 0.0);
        assert!((mobius_phi_im(c(0.0, 0.2), c(0.0, 0.0)).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn kernel_rejects_points_outside_bidisc() {
        assert!(matches!(mobius_phi(c(1.5, 0.0), c(0.0, 0.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn phi_of_origin_has_modulus_one_over_c() {
        let v = build_phi(&[c(0.0, 0.0); 3], Complex64::from_polar(1.0, 0.7)).unwrap();
        assert!(v.iter().all(|x| (x.norm() - (SQRT_2 + 1.0)).abs() < 1e-14));
    }

    #[test]
    fn kernel_supremum_is_attained_at_w_eq_lambda_eq_i() {
        let v = mobius_phi(c(0.0, 1.0), c(0.0, 1.0)).unwrap();
        assert!((v.norm() - KERNEL_SUP).abs() < 1e-13);
        const { assert!(KERNEL_SUP < MODEL_SCALE) };
    }

    #[test]
    fn model_domain_membership() {
        let dom = EowDomain::model(2).unwrap();
        assert!(dom.contains(&[c(5.0, 1.0), c(-5.0, 2.0)], 0.0));
        assert!(dom.contains(&[c(5.0, -1.0), c(-5.0, -2.0)], 0.0));
        assert!(dom.contains(&[c(1.0, 0.0), c(-1.0, 0.0)], 0.0));
        assert!(!dom.contains(&[c(1.0, 1.0), c(-1.0, -1.0)], 1e-12));
        assert!(!dom.contains(&[c(7.0, 1.0), c(0.0, 1.0)], 1e-12));
    }

    #[test]
    fn normalization_for_model_domain_is_unit_scaled() {
        let a = NormalizationMap::for_domain(&EowDomain::model(2).unwrap()).unwrap();
        let want = 6.0 * SQRT_2 / 12.0;
        assert!((a.matrix()[(0, 0)] - want.min(1.0)).abs() < 1e-15);
        assert!(a.certify(&Cone::orthant(2).unwrap(), 200, 0).unwrap().passes);
    }
}
