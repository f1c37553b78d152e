use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticFunction, Domain, DomainBox, Provenance};
use crate::error::{Error, Result};

/// Default truncation order for one-variable series.
pub const DEFAULT_ORDER: usize = 64;

/// Root-test estimates are multiplied by this before use.
pub const RADIUS_SAFETY: f64 = 0.9;

/// Minimum number of nonzero coefficients for a root-test radius estimate.
pub const MIN_RADIUS_TERMS: usize = 16;

/// Truncated power series `sum a_n x^n` with real coefficients and a declared
/// radius of convergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries1D {
    coeffs: Vec<f64>,
    radius: f64,
}

impl PowerSeries1D {
    pub fn new(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("series coefficients".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("series radius must be positive, got {radius}")));
        }
        Ok(Self { coeffs, radius })
    }

    pub fn zero(order: usize, radius: f64) -> Result<Self> {
        Self::new(vec![0.0; order + 1], radius)
    }

    /// The series `x`, padded to `order`.
    pub fn identity(order: usize, radius: f64) -> Result<Self> {
        let mut c = vec![0.0; order.max(1) + 1];
        c[1] = 1.0;
        Self::new(c, radius)
    }

    /// Taylor series of `sin x` through `x^order`.
    pub fn sin(order: usize) -> Self {
        Self::from_fn(order, f64::INFINITY, |n, fact| match n % 4 {
            1 => 1.0 / fact,
            3 => -1.0 / fact,
            _ => 0.0,
        })
    }

    pub fn cos(order: usize) -> Self {
        Self::from_fn(order, f64::INFINITY, |n, fact| match n % 4 {
            0 => 1.0 / fact,
            2 => -1.0 / fact,
            _ => 0.0,
        })
    }

    pub fn exp(order: usize) -> Self {
        Self::from_fn(order, f64::INFINITY, |_, fact| 1.0 / fact)
    }

    pub fn sinh(order: usize) -> Self {
        Self::from_fn(order, f64::INFINITY, |n, fact| if n % 2 == 1 { 1.0 / fact } else { 0.0 })
    }

    pub fn cosh(order: usize) -> Self {
        Self::from_fn(order, f64::INFINITY, |n, fact| if n % 2 == 0 { 1.0 / fact } else { 0.0 })
    }

    /// `1 + x + x^2 + ...`, radius 1.
    pub fn geometric(order: usize) -> Self {
        Self::from_fn(order, 1.0, |_, _| 1.0)
    }

    fn from_fn(order: usize, radius: f64, a: impl Fn(usize, f64) -> f64) -> Self {
        let mut fact = 1.0;
        let coeffs = (0..=order)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                a(n, fact)
            })
            .collect();
        Self { coeffs, radius }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("series radius must be positive, got {radius}")));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// Horner evaluation at a complex argument. On real arguments the real
    /// part agrees bit-for-bit with [`PowerSeries1D::eval`].
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// The holomorphic function `z -> sum a_n z^n` on the disc of the declared radius.
    pub fn complexify(&self) -> AnalyticFunction {
        let domain = if self.radius.is_finite() {
            Domain::Box(DomainBox::polydisc(1, self.radius).expect("radius validated"))
        } else {
            Domain::Everywhere
        };
        let s = self.clone();
        AnalyticFunction::new(
            1,
            domain,
            Provenance::SeriesBacked,
            format!("series(order {})", self.order()),
            move |p| s.eval_complex(p[0]),
        )
    }

    fn binary(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|k| op(self.coeffs[k], other.coeffs[k])).collect(),
            radius: self.radius.min(other.radius),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
            radius: self.radius,
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut c = vec![0.0; n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Self {
            coeffs: c,
            radius: self.radius.min(other.radius),
        }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = if self.coeffs.len() == 1 {
            vec![0.0]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &a)| n as f64 * a)
                .collect()
        };
        Self {
            coeffs,
            radius: self.radius,
        }
    }

    /// `self(inner(x))`, truncated at the smaller order.
    pub fn compose(&self, inner: &Self) -> Self {
        let n = self.order().min(inner.order());
        let c = compose_coeffs(&to_complex(&self.coeffs), &to_complex(&inner.coeffs), n);
        Self {
            coeffs: c.iter().map(|z| z.re).collect(),
            radius: inner.radius,
        }
    }

    /// Compositional inverse `q` with `p(q(y)) = y` through the series order.
    pub fn revert(&self) -> Result<Self> {
        let q = revert_coeffs(&to_complex(&self.coeffs))?;
        let radius = RADIUS_SAFETY * self.radius.min(1.0) * self.coeff(1).abs();
        Ok(Self {
            coeffs: q.iter().map(|z| z.re).collect(),
            radius: if radius > 0.0 && radius.is_finite() { radius } else { self.radius },
        })
    }

    /// Root-test estimate `0.9 / limsup |a_n|^(1/n)`, taken over the upper
    /// half of the nonzero coefficients.
    ///
    /// The zero series returns the declared radius. A series with fewer than
    /// [`MIN_RADIUS_TERMS`] nonzero coefficients is rejected; callers treat it
    /// as a polynomial.
    pub fn estimate_radius(&self) -> Result<f64> {
        let nonzero: Vec<(usize, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(n, a)| *n > 0 && **a != 0.0)
            .map(|(n, a)| (n, a.abs()))
            .collect();
        if nonzero.is_empty() {
            return Ok(self.radius);
        }
        if nonzero.len() < MIN_RADIUS_TERMS {
            return Err(Error::Precondition(format!(
                "radius estimate needs {MIN_RADIUS_TERMS} nonzero coefficients, found {}",
                nonzero.len()
            )));
        }
        let tail = &nonzero[nonzero.len() / 2..];
        let limsup = tail
            .iter()
            .map(|&(n, a)| a.powf(1.0 / n as f64))
            .fold(0.0, f64::max);
        Ok(if limsup > 0.0 {
            RADIUS_SAFETY / limsup
        } else {
            f64::INFINITY
        })
    }

    /// Least-squares polynomial fit of `degree` to `(x, y)` samples.
    ///
    /// Approximate: fitting error is mixed into any downstream result, so
    /// prefer an exact trace series when one is available.
    pub fn fit_least_squares(samples: &[(f64, f64)], degree: usize, radius: f64) -> Result<Self> {
        if samples.len() <= degree {
            return Err(Error::InvalidInput(format!(
                "{} samples cannot determine a degree-{degree} fit",
                samples.len()
            )));
        }
        let vander = DMatrix::from_fn(samples.len(), degree + 1, |i, j| samples[i].0.powi(j as i32));
        let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
        let sol = vander
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::InvalidInput(format!("least-squares fit failed: {e}")))?;
        Self::new(sol.iter().copied().collect(), radius)
    }
}

pub(crate) fn to_complex(a: &[f64]) -> Vec<Complex64> {
    a.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

pub(crate) fn mul_coeffs(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if *ai == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            c[i + j] += ai * bj;
        }
    }
    c
}

/// Horner composition of coefficient vectors, truncated at order `n`.
pub(crate) fn compose_coeffs(outer: &[Complex64], inner: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
    for a in outer.iter().take(n + 1).rev() {
        acc = mul_coeffs(&acc, inner, n);
        acc[0] += a;
    }
    acc
}

/// Series reversion by order-by-order correction of the leading mismatch.
pub(crate) fn revert_coeffs(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = p.len() - 1;
    if n < 1 {
        return Err(Error::NonInvertible("series has no linear term".into()));
    }
    if p[0].norm() > 1e-14 {
        return Err(Error::NonInvertible(format!("p(0) = {} is not zero", p[0])));
    }
    let lead = p[1];
    if lead.norm() < 1e-14 {
        return Err(Error::NonInvertible("p'(0) = 0".into()));
    }
    let mut q = vec![Complex64::new(0.0, 0.0); n + 1];
    q[1] = 1.0 / lead;
    for k in 2..=n {
        let r = compose_coeffs(p, &q, k);
        q[k] = -r[k] / lead;
    }
    Ok(q)
}

/// Complex-coefficient reversion: returns `(re, im)` coefficient series of
/// the inverse of `re + i*im`.
pub fn revert_complex(re: &PowerSeries1D, im: &PowerSeries1D) -> Result<(PowerSeries1D, PowerSeries1D)> {
    let n = re.order().min(im.order());
    let p: Vec<Complex64> = (0..=n)
        .map(|k| Complex64::new(re.coeff(k), im.coeff(k)))
        .collect();
    let q = revert_coeffs(&p)?;
    let radius = RADIUS_SAFETY * re.radius.min(im.radius).min(1.0) * p[1].norm();
    let radius = if radius > 0.0 && radius.is_finite() { radius } else { re.radius.min(im.radius) };
    Ok((
        PowerSeries1D::new(q.iter().map(|z| z.re).collect(), radius)?,
        PowerSeries1D::new(q.iter().map(|z| z.im).collect(), radius)?,
    ))
}
