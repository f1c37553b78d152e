use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cone::Cone;
use super::manifold::Wedge;
use crate::error::{Error, Result};
use crate::sampling;

/// Boxes below this radius are not tried by [`lemma27_shrink`].
pub const MIN_BOX_RADIUS: f64 = 1e-4;

/// Smallest sampled `|t|` relative to `t_radius`; keeps `rho` above round-off.
pub const MIN_T_FRACTION: f64 = 1e-3;

/// Chart boxes `Q1 x U1`: `|z_j| < z_radius`, `|s_k| < s_radius`, `|t| < t_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartBoxes {
    pub z_radius: f64,
    pub s_radius: f64,
    pub t_radius: f64,
}

impl ChartBoxes {
    pub fn uniform(r: f64) -> Self {
        Self {
            z_radius: r,
            s_radius: r,
            t_radius: r,
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            z_radius: self.z_radius / 2.0,
            s_radius: self.s_radius / 2.0,
            t_radius: self.t_radius / 2.0,
        }
    }

    pub fn max_radius(&self) -> f64 {
        self.z_radius.max(self.s_radius).max(self.t_radius)
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.z_radius, self.s_radius, self.t_radius]
            .iter()
            .all(|r| r.is_finite() && *r > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("chart box radii must be positive: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma27Report {
    pub samples: usize,
    pub violations: usize,
    /// Smallest angular margin of `rho(Psi~(z, s + it))` in the wedge cone.
    pub worst_margin: f64,
    pub boxes: ChartBoxes,
    pub passes: bool,
}

impl Lemma27Report {
    pub fn into_result(self) -> Result<Self> {
        if self.passes {
            Ok(self)
        } else {
            Err(Error::Lemma27Failed {
                violations: self.violations,
                samples: self.samples,
            })
        }
    }
}

/// Samples `(z, s, t)` with `t` in `sub_cone`, maps by `Psi~` and counts points
/// outside the open wedge. Points that leave the chart count as violations.
pub fn lemma27_verify(
    wedge: &Wedge,
    sub_cone: &Cone,
    boxes: ChartBoxes,
    samples: usize,
    seed: u64,
) -> Result<Lemma27Report> {
    boxes.validate()?;
    let m = wedge.manifold();
    let (n, d) = (m.n(), m.d());
    if sub_cone.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: sub_cone.dim(),
        });
    }
    let mut rng = sampling::rng(seed);
    let draws: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..samples)
        .map(|_| {
            let z: Vec<Complex64> = (0..n).map(|_| sampling::disc(&mut rng, boxes.z_radius)).collect();
            let dir = sub_cone.sample_direction(&mut rng);
            let mag = boxes.t_radius * rng.gen_range(MIN_T_FRACTION..1.0);
            let w: Vec<Complex64> = dir
                .iter()
                .map(|u| {
                    let s = sampling::uniform(&mut rng, -boxes.s_radius, boxes.s_radius);
                    Complex64::new(s, mag * u)
                })
                .collect();
            (z, w)
        })
        .collect();
    let margins: Vec<f64> = draws
        .par_iter()
        .map(|(z, w)| match m.psi_tilde(z, w) {
            Ok(p) if wedge.contains(p.as_slice()) => wedge.margin(p.as_slice()),
            Ok(p) => wedge.margin(p.as_slice()).min(0.0),
            Err(_) => f64::NEG_INFINITY,
        })
        .collect();
    let violations = margins.iter().filter(|&&x| x <= 0.0).count();
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Lemma27Report {
        samples,
        violations,
        worst_margin,
        boxes,
        passes: samples > 0 && violations == 0,
    })
}

/// Runs [`lemma27_verify`], halving the boxes until it passes. Fails once the
/// radius would drop below [`MIN_BOX_RADIUS`], returning the last report.
pub fn lemma27_shrink(
    wedge: &Wedge,
    sub_cone: &Cone,
    boxes: ChartBoxes,
    samples: usize,
    seed: u64,
) -> Result<(Lemma27Report, Vec<Lemma27Report>)> {
    let mut attempts = Vec::new();
    let mut current = boxes;
    loop {
        let report = lemma27_verify(wedge, sub_cone, current, samples, seed)?;
        attempts.push(report.clone());
        if report.passes {
            return Ok((report, attempts));
        }
        let next = current.halved();
        if next.max_radius() < MIN_BOX_RADIUS {
            return Err(Error::Lemma27Failed {
                violations: report.violations,
                samples: report.samples,
            });
        }
        current = next;
    }
}
