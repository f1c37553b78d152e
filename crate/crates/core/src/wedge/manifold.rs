use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::cone::Cone;
use crate::analytic::{fmt_point, ComplexVector, DomainBox, DOMAIN_TOL};
use crate::error::{Error, Result};
use crate::series::MultiSeries;

/// Newton tolerance on `|psi_tilde(z, w) - target|`.
pub const CHART_TOL: f64 = 1e-12;
pub const CHART_MAX_ITERS: usize = 50;

/// Chart variable names `x1..xn, y1..yn, s1..sd` (real and imaginary parts
/// of `z`, then the real parts of `w`).
pub fn chart_vars(n: usize, d: usize) -> Vec<String> {
    (1..=n)
        .map(|j| format!("x{j}"))
        .chain((1..=n).map(|j| format!("y{j}")))
        .chain((1..=d).map(|k| format!("s{k}")))
        .collect()
}

/// Generic submanifold `Im w = phi(z, zbar, Re w)` of `C^(n+d)` near 0, in
/// regular coordinates, on the polydisc `omega`.
#[derive(Debug, Clone, Serialize)]
pub struct GenericManifold {
    n: usize,
    d: usize,
    phi: Vec<MultiSeries>,
    #[serde(skip)]
    dphi_ds: Vec<Vec<MultiSeries>>,
    omega: DomainBox,
}

impl GenericManifold {
    /// `phi` holds `d` real series in [`chart_vars`]`(n, d)`, each vanishing to
    /// second order at the origin.
    pub fn new(n: usize, d: usize, phi: Vec<MultiSeries>, omega: DomainBox) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("codimension d must be positive".into()));
        }
        if phi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: phi.len(),
            });
        }
        if omega.dim() != n + d {
            return Err(Error::DimensionMismatch {
                expected: n + d,
                got: omega.dim(),
            });
        }
        let vars = chart_vars(n, d);
        for (k, p) in phi.iter().enumerate() {
            if p.vars() != vars.as_slice() {
                return Err(Error::IncompatibleVariables(format!(
                    "phi[{k}] has variables {:?}, expected {vars:?}",
                    p.vars()
                )));
            }
            for (idx, c) in p.terms() {
                if idx.iter().sum::<u32>() <= 1 && c.abs() > 1e-14 {
                    return Err(Error::InvalidInput(format!(
                        "phi[{k}] must vanish to second order at 0, found coefficient {c} at {idx:?}"
                    )));
                }
            }
        }
        let dphi_ds = phi
            .iter()
            .map(|p| {
                (1..=d)
                    .map(|j| p.derivative(&format!("s{j}")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            d,
            phi,
            dphi_ds,
            omega,
        })
    }

    /// Manifold on the polydisc of common radius `r`.
    pub fn with_radius(n: usize, d: usize, phi: Vec<MultiSeries>, r: f64) -> Result<Self> {
        Self::new(n, d, phi, DomainBox::polydisc(n + d, r)?)
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

    pub fn omega(&self) -> &DomainBox {
        &self.omega
    }

    fn check_z(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        Ok(())
    }

    fn check_w_len(&self, len: usize) -> Result<()> {
        if len != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: len,
            });
        }
        Ok(())
    }

    fn chart_point_in_box(&self, z: &[Complex64], w: &[Complex64]) -> bool {
        let r = self.omega.radii();
        z.iter().zip(r).all(|(zj, rj)| zj.norm() <= rj + DOMAIN_TOL)
            && w.iter()
                .zip(&r[self.n..])
                .all(|(wk, rk)| wk.re.abs() <= rk + DOMAIN_TOL && wk.im.abs() <= rk + DOMAIN_TOL)
    }

    fn chart_args(&self, z: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
        z.iter()
            .map(|zj| Complex64::new(zj.re, 0.0))
            .chain(z.iter().map(|zj| Complex64::new(zj.im, 0.0)))
            .chain(w.iter().copied())
            .collect()
    }

    /// `phi(z, zbar, w)` with the `s` variables complexified.
    pub fn phi_complex(&self, z: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_z(z)?;
        self.check_w_len(w.len())?;
        let args = self.chart_args(z, w);
        self.phi.iter().map(|p| p.eval_complex(&args)).collect()
    }

    pub fn phi_real(&self, z: &[Complex64], s: &[f64]) -> Result<Vec<f64>> {
        let w: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(self.phi_complex(z, &w)?.iter().map(|v| v.re).collect())
    }

    /// Defining function `rho = Im w - phi(z, zbar, Re w)` at an ambient point.
    pub fn rho(&self, point: &[Complex64]) -> Result<Vec<f64>> {
        if point.len() != self.n + self.d {
            return Err(Error::DimensionMismatch {
                expected: self.n + self.d,
                got: point.len(),
            });
        }
        let (z, w) = point.split_at(self.n);
        let s: Vec<f64> = w.iter().map(|x| x.re).collect();
        let phi = self.phi_real(z, &s)?;
        Ok(w.iter().zip(phi).map(|(wk, p)| wk.im - p).collect())
    }

    /// `Psi(z, s) = (z, s + i phi(z, zbar, s))`, a point of the manifold.
    pub fn psi(&self, z: &[Complex64], s: &[f64]) -> Result<ComplexVector> {
        let w: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.psi_tilde(z, &w)
    }

    /// `Psi~(z, w) = (z, w + i phi(z, zbar, w))` for complex `w = s + it`.
    pub fn psi_tilde(&self, z: &[Complex64], w: &[Complex64]) -> Result<ComplexVector> {
        self.check_z(z)?;
        self.check_w_len(w.len())?;
        if !self.chart_point_in_box(z, w) {
            return Err(Error::DomainViolation {
                point: fmt_point(&[z, w].concat()),
                context: "chart box of the manifold".into(),
            });
        }
        let phi = self.phi_complex(z, w)?;
        let mut out = z.to_vec();
        out.extend(w.iter().zip(phi).map(|(wk, p)| wk + Complex64::i() * p));
        ComplexVector::new(out)
    }

    /// Solves `Psi~(z, w) = point` by Newton in `w`, starting from
    /// `w0 = w~ - i phi(z, zbar, Re w~)`. `Im w` is the defining function
    /// `t = Theta(point)`.
    pub fn psi_tilde_inverse(&self, point: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        if point.len() != self.n + self.d {
            return Err(Error::DimensionMismatch {
                expected: self.n + self.d,
                got: point.len(),
            });
        }
        let (z, target) = point.split_at(self.n);
        let s0: Vec<f64> = target.iter().map(|x| x.re).collect();
        let phi0 = self.phi_real(z, &s0)?;
        let mut w: Vec<Complex64> = target
            .iter()
            .zip(&phi0)
            .map(|(t, p)| t - Complex64::i() * p)
            .collect();
        let scale = 1.0 + target.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for _ in 0..CHART_MAX_ITERS {
            let args = self.chart_args(z, &w);
            let phi = self
                .phi
                .iter()
                .map(|p| p.eval_complex(&args))
                .collect::<Result<Vec<_>>>()?;
            let residual: Vec<Complex64> = w
                .iter()
                .zip(&phi)
                .zip(target)
                .map(|((wk, p), t)| wk + Complex64::i() * p - t)
                .collect();
            let res_norm = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
            if res_norm <= 4.0 * f64::EPSILON * scale {
                return Ok((z.to_vec(), w));
            }
            let jac = DMatrix::from_fn(self.d, self.d, |k, j| {
                let dp = self.dphi_ds[k][j].eval_complex(&args).unwrap_or_default();
                let delta = if k == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                delta + Complex64::i() * dp
            });
            let step = jac
                .lu()
                .solve(&DVector::from_vec(residual))
                .ok_or_else(|| Error::OutsideChart {
                    point: fmt_point(point),
                    iterations: CHART_MAX_ITERS,
                })?;
            let step_norm = step.iter().map(|x| x.norm()).fold(0.0, f64::max);
            w.iter_mut().zip(step.iter()).for_each(|(wk, dk)| *wk -= dk);
            if !w.iter().all(|x| x.is_finite()) {
                break;
            }
            if step_norm <= f64::EPSILON * scale && res_norm <= CHART_TOL {
                return Ok((z.to_vec(), w));
            }
        }
        let back = self.psi_tilde_unchecked(z, &w)?;
        let err = back
            .iter()
            .zip(point)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if err <= CHART_TOL {
            return Ok((z.to_vec(), w));
        }
        Err(Error::OutsideChart {
            point: fmt_point(point),
            iterations: CHART_MAX_ITERS,
        })
    }

    fn psi_tilde_unchecked(&self, z: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
        if !w.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("chart inverse iterate".into()));
        }
        let phi = self.phi_complex(z, w)?;
        let mut out = z.to_vec();
        out.extend(w.iter().zip(phi).map(|(wk, p)| wk + Complex64::i() * p));
        Ok(out)
    }
}

/// Wedge `W(omega, rho, cone) = {Z in omega : rho(Z) in cone}` with edge the manifold.
#[derive(Debug, Clone, Serialize)]
pub struct Wedge {
    manifold: GenericManifold,
    cone: Cone,
    omega: DomainBox,
}

impl Wedge {
    pub fn new(manifold: GenericManifold, cone: Cone, omega: DomainBox) -> Result<Self> {
        if cone.dim() != manifold.d() {
            return Err(Error::DimensionMismatch {
                expected: manifold.d(),
                got: cone.dim(),
            });
        }
        if omega.dim() != manifold.n() + manifold.d() {
            return Err(Error::DimensionMismatch {
                expected: manifold.n() + manifold.d(),
                got: omega.dim(),
            });
        }
        Ok(Self {
            manifold,
            cone,
            omega,
        })
    }

    /// Wedge over the manifold's own box.
    pub fn over(manifold: GenericManifold, cone: Cone) -> Result<Self> {
        let omega = manifold.omega().clone();
        Self::new(manifold, cone, omega)
    }

    pub fn manifold(&self) -> &GenericManifold {
        &self.manifold
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn omega(&self) -> &DomainBox {
        &self.omega
    }

    /// Open wedge membership; total, never fails.
    pub fn contains(&self, point: &[Complex64]) -> bool {
        self.omega.contains(point, DOMAIN_TOL)
            && self
                .manifold
                .rho(point)
                .map(|r| self.cone.contains(&r))
                .unwrap_or(false)
    }

    /// Membership in the wedge together with its edge, with slack `tol` on `rho`.
    pub fn contains_with_edge(&self, point: &[Complex64], tol: f64) -> bool {
        self.omega.contains(point, DOMAIN_TOL)
            && self
                .manifold
                .rho(point)
                .map(|r| self.cone.contains_closed(&r, tol))
                .unwrap_or(false)
    }

    /// Angular margin of `rho(point)` in the cone (negative outside).
    pub fn margin(&self, point: &[Complex64]) -> f64 {
        self.manifold
            .rho(point)
            .map(|r| self.cone.margin(&r))
            .unwrap_or(f64::NEG_INFINITY)
    }
}
