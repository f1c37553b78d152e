//! One-variable reflection operators.
//!
//! All operators glue a function given on the upper half disc `D+` to an
//! explicit formula below the real axis. Points exactly on the axis always
//! use the upper-side value.

use std::sync::Arc;

use num_complex::Complex64;

use crate::analytic::{AnalyticFunction, Constraint, Domain, DomainBox, Provenance};
use crate::error::{Error, Result};
use crate::series::{revert_complex, PowerSeries1D};

/// Agreement required between `Im f` on the axis and the supplied trace.
pub const TRACE_TOL: f64 = 1e-8;

/// Bound on the discrete Laplacian accepted as "harmonic".
pub const HARMONIC_TOL: f64 = 1e-4;

/// Step of the 5-point Laplacian used for harmonicity checks.
pub const LAPLACIAN_STEP: f64 = 1e-3;

const AXIS_SAMPLES: i32 = 16;

fn upper_half_disc(radius: f64) -> Result<DomainBox> {
    DomainBox::polydisc(1, radius)?.with_constraint(0, Constraint::ImNonNegative)
}

fn axis_points(r: f64) -> impl Iterator<Item = f64> {
    (-AXIS_SAMPLES..=AXIS_SAMPLES).map(move |k| 0.9 * r * k as f64 / AXIS_SAMPLES as f64)
}

/// `min(declared, root-test estimate)`; polynomial traces keep the declared radius.
fn trace_radius(trace: &PowerSeries1D) -> f64 {
    match trace.estimate_radius() {
        Ok(r) => r.min(trace.radius()),
        Err(_) => trace.radius(),
    }
}

/// A function holomorphic on the upper half disc of radius `radius`, with
/// the power series of its imaginary part along the real axis.
#[derive(Debug, Clone)]
pub struct HalfDiscFunction {
    f: AnalyticFunction,
    trace: PowerSeries1D,
    radius: f64,
}

impl HalfDiscFunction {
    pub fn new(f: AnalyticFunction, trace: PowerSeries1D) -> Result<Self> {
        Self::with_radius(f, trace, 1.0)
    }

    /// Checks `|Im f(x) - trace(x)| < 1e-8` on axis samples inside the
    /// effective radius.
    pub fn with_radius(f: AnalyticFunction, trace: PowerSeries1D, radius: f64) -> Result<Self> {
        if f.arity() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: f.arity(),
            });
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("half-disc radius must be positive".into()));
        }
        let h = Self { f, trace, radius };
        for x in axis_points(h.effective_radius()) {
            let im = h.f.eval1(Complex64::new(x, 0.0))?.im;
            let t = h.trace.eval(x);
            if (im - t).abs() >= TRACE_TOL {
                return Err(Error::InconsistentTrace(format!(
                    "Im f({x}) = {im} but trace gives {t}"
                )));
            }
        }
        Ok(h)
    }

    pub fn function(&self) -> &AnalyticFunction {
        &self.f
    }

    pub fn trace(&self) -> &PowerSeries1D {
        &self.trace
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Radius of the lower disc on which the reflected formula is used.
    pub fn effective_radius(&self) -> f64 {
        trace_radius(&self.trace).min(self.radius)
    }
}

/// Schwarz reflection `conj(f(conj z))` for functions real on the axis.
pub fn classical_reflect(h: &HalfDiscFunction) -> Result<AnalyticFunction> {
    if !h.trace.is_zero() {
        return Err(Error::Precondition(
            "classical reflection needs a vanishing imaginary trace; use general_reflect".into(),
        ));
    }
    let f = h.f.clone();
    let domain = Domain::Box(DomainBox::polydisc(1, h.radius)?);
    Ok(AnalyticFunction::fallible(
        1,
        domain,
        Provenance::ConstructedExtension,
        format!("classical reflection of {}", h.f.label()),
        move |p| {
            let z = p[0];
            if z.im >= 0.0 {
                f.eval1(z)
            } else {
                Ok(f.eval1(z.conj())?.conj())
            }
        },
    ))
}

/// Reflection with an analytic imaginary trace:
/// `F = f` on `D+` and `F(z) = conj(f(conj z)) + 2i v(z)` below the axis
/// inside `D_r`, where `v` is the complexified trace.
pub fn general_reflect(h: &HalfDiscFunction) -> Result<AnalyticFunction> {
    let r = h.effective_radius();
    let f = h.f.clone();
    let trace = h.trace.clone();
    let domain = Domain::Union(vec![
        Domain::Box(upper_half_disc(h.radius)?),
        Domain::Box(DomainBox::polydisc(1, r)?),
    ]);
    Ok(AnalyticFunction::fallible(
        1,
        domain,
        Provenance::ConstructedExtension,
        format!("general reflection of {}", h.f.label()),
        move |p| {
            let z = p[0];
            if z.im >= 0.0 || z.norm() >= r {
                f.eval1(z)
            } else {
                let two_i = Complex64::new(0.0, 2.0);
                Ok(f.eval1(z.conj())?.conj() + two_i * trace.eval_complex(z))
            }
        },
    ))
}

type RealFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Harmonic function extended below the axis by `V(x,y) = 2 Re v(z,0) - v(x,-y)`.
#[derive(Clone)]
pub struct HarmonicExtension {
    v: RealFn,
    trace: PowerSeries1D,
    upper_radius: f64,
    radius: f64,
}

impl HarmonicExtension {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let z = Complex64::new(x, y);
        upper_half_disc(self.upper_radius)
            .map(|b| b.contains(&[z], crate::analytic::DOMAIN_TOL))
            .unwrap_or(false)
            || z.norm() < self.radius
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::DomainViolation {
                point: format!("({x}, {y})"),
                context: "harmonic reflection".into(),
            });
        }
        let z = Complex64::new(x, y);
        let v = if y >= 0.0 || z.norm() >= self.radius {
            (self.v)(x, y)
        } else {
            2.0 * self.trace.eval_complex(z).re - (self.v)(x, -y)
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("harmonic extension at ({x}, {y})")));
        }
        Ok(v)
    }

    /// 5-point discrete Laplacian with step `h`.
    pub fn laplacian(&self, x: f64, y: f64, h: f64) -> Result<f64> {
        discrete_laplacian(|a, b| self.eval(a, b), x, y, h)
    }
}

pub(crate) fn discrete_laplacian(
    f: impl Fn(f64, f64) -> Result<f64>,
    x: f64,
    y: f64,
    h: f64,
) -> Result<f64> {
    let c = f(x, y)?;
    Ok((f(x + h, y)? + f(x - h, y)? + f(x, y + h)? + f(x, y - h)? - 4.0 * c) / (h * h))
}

/// Reflects a harmonic `v` on `D+ ∪ L` whose axis values have the power series `trace`.
///
/// `v` is spot-checked for harmonicity on interior samples of `D+` and
/// against `trace` on the axis.
pub fn harmonic_reflect(
    v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    trace: PowerSeries1D,
) -> Result<HarmonicExtension> {
    let r = trace_radius(&trace).min(1.0);
    for x in axis_points(r) {
        let (a, b) = (v(x, 0.0), trace.eval(x));
        if (a - b).abs() >= TRACE_TOL {
            return Err(Error::InconsistentTrace(format!(
                "v({x}, 0) = {a} but trace gives {b}"
            )));
        }
    }
    for (x, y) in [(0.0, 0.5), (0.3, 0.2), (-0.4, 0.6), (0.1, 0.05), (-0.2, 0.3)] {
        let lap = discrete_laplacian(|a, b| Ok(v(a, b)), x, y, LAPLACIAN_STEP)?;
        if lap.abs() >= HARMONIC_TOL {
            return Err(Error::Precondition(format!(
                "v is not harmonic: discrete Laplacian {lap} at ({x}, {y})"
            )));
        }
    }
    Ok(HarmonicExtension {
        v: Arc::new(v),
        trace,
        upper_radius: 1.0,
        radius: r,
    })
}

const CHART_NEWTON_ITERS: usize = 50;

/// Extension of `f`, holomorphic on the side above the curve
/// `S = {x + i gamma(x)}`, across `S`.
///
/// `trace` is the power series of `x -> Im f(x + i gamma(x))`. The curve is
/// flattened by `psi(zeta) = zeta + i gamma(zeta)`, the flattened function
/// is reflected by [`general_reflect`], and the result is mapped back with
/// `psi^-1` (reverted series, polished by Newton on `psi`).
pub fn curve_flatten_reflect(
    f: &AnalyticFunction,
    gamma: &PowerSeries1D,
    trace: PowerSeries1D,
) -> Result<AnalyticFunction> {
    if gamma.coeff(0).abs() > 1e-14 {
        return Err(Error::Precondition(format!(
            "curve must pass through 0, gamma(0) = {}",
            gamma.coeff(0)
        )));
    }
    let order = gamma.order().max(1);
    let mut id = vec![0.0; order + 1];
    id[1] = 1.0;
    let psi_re = PowerSeries1D::new(id, gamma.radius())?;
    let (inv_re, inv_im) = revert_complex(&psi_re, gamma)?;

    let gamma_c = gamma.clone();
    let dgamma = gamma.derivative();
    let psi = move |zeta: Complex64| zeta + Complex64::i() * gamma_c.eval_complex(zeta);
    let dpsi = move |zeta: Complex64| Complex64::new(1.0, 0.0) + Complex64::i() * dgamma.eval_complex(zeta);

    let chart_radius = 0.5 * gamma.radius().min(1.0);
    let f_outer = f.clone();
    let psi_h = psi.clone();
    let flattened = AnalyticFunction::fallible(
        1,
        Domain::Box(upper_half_disc(chart_radius)?),
        Provenance::ConstructedExtension,
        format!("{} in flattened chart", f.label()),
        move |p| f_outer.eval1(psi_h(p[0])),
    );
    let reflected = general_reflect(&HalfDiscFunction::with_radius(flattened, trace, chart_radius)?)?;

    let inverse_radius = inverse_series_radius(&inv_re, &inv_im);
    let out_radius = inverse_radius.min(chart_radius);
    let inverse = move |z: Complex64| -> Result<Complex64> {
        let mut zeta = inv_re.eval_complex(z) + Complex64::i() * inv_im.eval_complex(z);
        for _ in 0..CHART_NEWTON_ITERS {
            let res = psi(zeta) - z;
            if res.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) || res.norm() == 0.0 {
                return Ok(zeta);
            }
            let step = res / dpsi(zeta);
            zeta -= step;
            if step.norm() <= f64::EPSILON * zeta.norm() {
                return Ok(zeta);
            }
        }
        Err(Error::OutsideChart {
            point: format!("{z}"),
            iterations: CHART_NEWTON_ITERS,
        })
    };
    Ok(AnalyticFunction::fallible(
        1,
        Domain::Box(DomainBox::polydisc(1, out_radius)?),
        Provenance::ConstructedExtension,
        format!("curve reflection of {}", f.label()),
        move |p| reflected.eval1(inverse(p[0])?),
    ))
}

fn inverse_series_radius(re: &PowerSeries1D, im: &PowerSeries1D) -> f64 {
    let mags: Vec<f64> = re
        .coeffs()
        .iter()
        .zip(im.coeffs())
        .map(|(a, b)| a.hypot(*b))
        .collect();
    PowerSeries1D::new(mags, re.radius().min(im.radius()))
        .ok()
        .map(|s| trace_radius(&s))
        .unwrap_or(f64::INFINITY)
}
