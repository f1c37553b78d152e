use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling;

/// Strictness tolerance of the open-cone membership test.
pub const CONE_TOL: f64 = 1e-12;

/// Open polyhedral convex cone: the interior of the positive hull of its generators.
///
/// Membership is decided through the facet normals, enumerated once at
/// construction from (d-1)-subsets of the generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
    label: String,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vector orthogonal to the `d-1` rows, by cofactor expansion.
fn orthogonal_complement(rows: &[&Vec<f64>], d: usize) -> Vec<f64> {
    (0..d)
        .map(|k| {
            let m = DMatrix::from_fn(d - 1, d - 1, |i, j| rows[i][if j < k { j } else { j + 1 }]);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * m.determinant()
        })
        .collect()
}

impl Cone {
    pub fn new(generators: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let dim = generators.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidInput("cone needs at least one nonempty generator".into()));
        }
        if generators.iter().any(|g| g.len() != dim) {
            return Err(Error::InvalidInput("cone generators have mixed dimensions".into()));
        }
        if generators.iter().any(|g| g.iter().any(|x| !x.is_finite()) || norm(g) < 1e-14) {
            return Err(Error::InvalidInput("cone generators must be finite and nonzero".into()));
        }
        let gm = DMatrix::from_fn(dim, generators.len(), |i, j| generators[j][i]);
        if gm.rank(1e-12 * gm.norm()) < dim {
            return Err(Error::InvalidInput(format!(
                "generators do not span R^{dim}; the cone has empty interior"
            )));
        }
        let unit: Vec<Vec<f64>> = generators.iter().map(|g| normalized(g)).collect();
        let mut facets: Vec<Vec<f64>> = Vec::new();
        if dim == 1 {
            if unit.iter().all(|g| g[0] > 0.0) {
                facets.push(vec![1.0]);
            } else if unit.iter().all(|g| g[0] < 0.0) {
                facets.push(vec![-1.0]);
            }
        } else {
            for subset in combinations(unit.len(), dim - 1) {
                let rows: Vec<&Vec<f64>> = subset.iter().map(|&i| &unit[i]).collect();
                let n = orthogonal_complement(&rows, dim);
                if norm(&n) < 1e-12 {
                    continue;
                }
                let n = normalized(&n);
                let dots: Vec<f64> = unit.iter().map(|g| dot(g, &n)).collect();
                let sign = if dots.iter().all(|&x| x >= -1e-10) {
                    1.0
                } else if dots.iter().all(|&x| x <= 1e-10) {
                    -1.0
                } else {
                    continue;
                };
                let n: Vec<f64> = n.iter().map(|x| sign * x).collect();
                if !facets.iter().any(|f| dot(f, &n) > 1.0 - 1e-12) {
                    facets.push(n);
                }
            }
        }
        Ok(Self {
            dim,
            generators,
            facets,
            label: label.into(),
        })
    }

    /// The open positive orthant of `R^d`.
    pub fn orthant(d: usize) -> Result<Self> {
        let gens = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(gens, format!("orthant R^{d}_+"))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Unit inner normals of the facets.
    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Strict membership in the open cone; the apex is excluded.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && norm(x) > CONE_TOL && self.facets.iter().all(|n| dot(n, x) > CONE_TOL)
    }

    /// Membership in the closed cone with slack `tol`; the apex is included.
    pub fn contains_closed(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.facets.iter().all(|n| dot(n, x) >= -tol)
    }

    /// Signed angular distance (radians) from the direction of `x` to the
    /// cone boundary: positive inside, negative outside, zero at the apex.
    pub fn margin(&self, x: &[f64]) -> f64 {
        let n = norm(x);
        if n == 0.0 {
            return 0.0;
        }
        self.facets
            .iter()
            .map(|f| (dot(f, x) / n).clamp(-1.0, 1.0).asin())
            .fold(FRAC_PI_2, f64::min)
    }

    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            generators: self.generators.iter().map(|g| g.iter().map(|x| -x).collect()).collect(),
            facets: self.facets.iter().map(|g| g.iter().map(|x| -x).collect()).collect(),
            label: format!("-({})", self.label),
        }
    }

    /// Unit vector along the normalized mean of the unit generators.
    pub fn axis(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.dim];
        for g in &self.generators {
            let u = normalized(g);
            a.iter_mut().zip(&u).for_each(|(s, x)| *s += x);
        }
        normalized(&a)
    }

    /// Subcone whose generators are moved toward the axis:
    /// `g' = (1 - factor) g/|g| + factor * axis`.
    pub fn shrunk(&self, factor: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&factor) {
            return Err(Error::InvalidInput(format!("shrink factor {factor} outside [0, 1)")));
        }
        let axis = self.axis();
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let u = normalized(g);
                normalized(&u.iter().zip(&axis).map(|(x, a)| (1.0 - factor) * x + factor * a).collect::<Vec<_>>())
            })
            .collect();
        Self::new(gens, format!("{factor}-shrunk {}", self.label))
    }

    /// Random unit vector of the open cone (strictly positive generator weights).
    pub fn sample_direction(&self, rng: &mut sampling::SeededRng) -> Vec<f64> {
        let w = sampling::simplex_weights(rng, self.generators.len());
        let mut v = vec![0.0; self.dim];
        for (g, wi) in self.generators.iter().zip(&w) {
            let u = normalized(g);
            v.iter_mut().zip(&u).for_each(|(s, x)| *s += wi * x);
        }
        normalized(&v)
    }
}

/// Outcome of sampling `B * inner` against `outer` on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest signed angular margin (radians) over interior samples.
    pub min_margin: f64,
    /// Margin of the mapped generators, i.e. of the closure of the inner cone.
    pub generator_margin: f64,
    /// Closure of `B * inner` on the sphere lies inside `outer`.
    pub relatively_compact: bool,
    pub passes: bool,
}

/// Samples unit directions of `inner`, maps them by `b`, and measures their
/// angular margin inside `outer`. Passes iff every sample has positive margin.
pub fn cone_containment_check(
    inner: &Cone,
    b: &DMatrix<f64>,
    outer: &Cone,
    samples: usize,
    seed: u64,
) -> Result<ContainmentReport> {
    let d = inner.dim();
    if outer.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: outer.dim(),
        });
    }
    if b.nrows() != d || b.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.nrows().max(b.ncols()),
        });
    }
    if b.determinant().abs() <= 1e-12 {
        return Err(Error::Precondition("matrix B is singular".into()));
    }
    let map = |x: &[f64]| -> Vec<f64> { (b * nalgebra::DVector::from_column_slice(x)).iter().copied().collect() };
    let mut rng = sampling::rng(seed);
    let dirs: Vec<Vec<f64>> = (0..samples).map(|_| inner.sample_direction(&mut rng)).collect();
    let margins: Vec<f64> = dirs.par_iter().map(|x| outer.margin(&map(x))).collect();
    let violations = margins.iter().filter(|&&m| m <= 0.0).count();
    let min_margin = margins.iter().copied().fold(FRAC_PI_2, f64::min);
    let generator_margin = inner
        .generators()
        .iter()
        .map(|g| outer.margin(&map(g)))
        .fold(FRAC_PI_2, f64::min);
    Ok(ContainmentReport {
        samples,
        violations,
        min_margin,
        generator_margin,
        relatively_compact: generator_margin > 0.0,
        passes: samples > 0 && violations == 0 && min_margin > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_membership() {
        let o = Cone::orthant(2).unwrap();
        assert!(o.contains(&[1.0, 2.0]));
        assert!(!o.contains(&[1.0, 0.0]));
        assert!(!o.contains(&[0.0, 0.0]));
        assert!(o.contains_closed(&[1.0, 0.0], 1e-12));
        let ray = Cone::new(vec![vec![1.0]], "R+").unwrap();
        assert!(ray.contains(&[0.5]));
        assert!(!ray.contains(&[-0.5]));
        assert!(!ray.contains(&[0.0]));
    }

    #[test]
    fn redundant_generators_and_half_planes() {
        let c = Cone::new(vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], "with interior ray").unwrap();
        assert_eq!(c.facets().len(), 2);
        let half = Cone::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]], "upper half plane").unwrap();
        assert!(half.contains(&[-5.0, 0.1]));
        assert!(!half.contains(&[-5.0, -0.1]));
        assert!(Cone::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]], "flat").is_err());
    }

    #[test]
    fn containment_examples() {
        let o = Cone::orthant(2).unwrap();
        let id = DMatrix::<f64>::identity(2, 2);
        let rep = cone_containment_check(&o, &id, &o, 1000, 1).unwrap();
        assert!(rep.passes && rep.min_margin > 0.0);
        assert!(!rep.relatively_compact);

        let neg = -DMatrix::<f64>::identity(2, 2);
        let rep = cone_containment_check(&o, &neg, &o, 1000, 1).unwrap();
        assert!(!rep.passes);
        assert_eq!(rep.violations, 1000);

        let (a, b) = (35f64.to_radians(), 55f64.to_radians());
        let narrow = Cone::new(vec![vec![a.cos(), a.sin()], vec![b.cos(), b.sin()]], "10 deg around (1,1)").unwrap();
        let rep = cone_containment_check(&narrow, &id, &o, 1000, 2).unwrap();
        assert!(rep.passes && rep.relatively_compact);
        assert!((rep.generator_margin - a).abs() < 1e-12);
        assert!(rep.min_margin >= a - 1e-12 && rep.min_margin < 36f64.to_radians());

        let singular = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(
            cone_containment_check(&o, &singular, &o, 10, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn shrinking_stays_inside() {
        let o = Cone::orthant(3).unwrap();
        let s = o.shrunk(0.5).unwrap();
        let rep = cone_containment_check(&s, &DMatrix::identity(3, 3), &o, 2000, 5).unwrap();
        assert!(rep.passes && rep.relatively_compact);
        let ray = Cone::new(vec![vec![2.0]], "R+").unwrap();
        assert!(ray.shrunk(0.5).unwrap().contains(&[1.0]));
    }
}
