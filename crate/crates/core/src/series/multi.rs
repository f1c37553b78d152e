use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::power::PowerSeries1D;
use crate::analytic::{AnalyticFunction, Domain, Provenance, DOMAIN_TOL};
use crate::error::{Error, Result};

/// Default total-degree truncation for multivariate series.
pub const DEFAULT_DEGREE: usize = 16;

/// Truncated real-coefficient power series in named real variables.
///
/// Terms of total degree above `order` are discarded by every operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiSeries {
    vars: Vec<String>,
    order: usize,
    terms: BTreeMap<Vec<u32>, f64>,
    polyradius: Vec<f64>,
}

fn degree(idx: &[u32]) -> usize {
    idx.iter().map(|&e| e as usize).sum()
}

impl MultiSeries {
    pub fn zero(vars: &[&str], order: usize, polyradius: Vec<f64>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidInput("series needs at least one variable".into()));
        }
        if polyradius.len() != vars.len() {
            return Err(Error::DimensionMismatch {
                expected: vars.len(),
                got: polyradius.len(),
            });
        }
        if polyradius.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidInput("polyradius entries must be positive".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidInput(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Self {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            order,
            terms: BTreeMap::new(),
            polyradius,
        })
    }

    /// Polynomial (infinite polyradius) built from `(multi-index, coefficient)` pairs.
    pub fn polynomial(
        vars: &[&str],
        order: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self> {
        Self::from_terms(vars, order, terms, vec![f64::INFINITY; vars.len()])
    }

    pub fn from_terms(
        vars: &[&str],
        order: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
        polyradius: Vec<f64>,
    ) -> Result<Self> {
        let mut s = Self::zero(vars, order, polyradius)?;
        for (idx, c) in terms {
            if idx.len() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    got: idx.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("series coefficient".into()));
            }
            s.add_term(idx, c);
        }
        Ok(s)
    }

    /// Zero series sharing this one's variables, order and polyradius.
    pub fn zero_like(&self) -> Self {
        Self {
            terms: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn constant_like(&self, c: f64) -> Self {
        let mut s = self.zero_like();
        s.add_term(vec![0; self.vars.len()], c);
        s
    }

    /// The coordinate series of variable `name`.
    pub fn variable_like(&self, name: &str) -> Result<Self> {
        let j = self.var_index(name)?;
        let mut idx = vec![0; self.vars.len()];
        idx[j] = 1;
        let mut s = self.zero_like();
        s.add_term(idx, 1.0);
        Ok(s)
    }

    fn add_term(&mut self, idx: Vec<u32>, c: f64) {
        if degree(&idx) > self.order || c == 0.0 {
            return;
        }
        match self.terms.entry(idx) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn polyradius(&self) -> &[f64] {
        &self.polyradius
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, idx: &[u32]) -> f64 {
        self.terms.get(idx).copied().unwrap_or(0.0)
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Sum of |coefficients| of total degree `k`.
    pub fn degree_mass(&self, k: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(i, _)| degree(i) == k)
            .map(|(_, c)| c.abs())
            .sum()
    }

    pub fn with_order(&self, order: usize) -> Self {
        let mut s = self.zero_like();
        s.order = order;
        for (k, &c) in &self.terms {
            s.add_term(k.clone(), c);
        }
        s
    }

    pub fn with_polyradius(mut self, polyradius: Vec<f64>) -> Result<Self> {
        if polyradius.len() != self.vars.len() || polyradius.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidInput("invalid polyradius".into()));
        }
        self.polyradius = polyradius;
        Ok(self)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::IncompatibleVariables(format!(
                "{:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        Ok(())
    }

    fn combine_meta(&self, other: &Self) -> Self {
        Self {
            vars: self.vars.clone(),
            order: self.order.min(other.order),
            terms: BTreeMap::new(),
            polyradius: self
                .polyradius
                .iter()
                .zip(&other.polyradius)
                .map(|(a, b)| a.min(*b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut s = self.combine_meta(other);
        for (k, &c) in self.terms.iter().chain(other.terms.iter()) {
            s.add_term(k.clone(), c);
        }
        Ok(s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut s = self.zero_like();
        for (idx, &c) in &self.terms {
            s.add_term(idx.clone(), c * k);
        }
        s
    }

    /// Product truncated at the smaller total degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut s = self.combine_meta(other);
        for (a, &ca) in &self.terms {
            let da = degree(a);
            if da > s.order {
                continue;
            }
            for (b, &cb) in &other.terms {
                if da + degree(b) > s.order {
                    continue;
                }
                let idx: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                s.add_term(idx, ca * cb);
            }
        }
        Ok(s)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = self.constant_like(1.0);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self, name: &str) -> Result<Self> {
        let j = self.var_index(name)?;
        let mut s = self.zero_like();
        for (idx, &c) in &self.terms {
            if idx[j] > 0 {
                let mut d = idx.clone();
                d[j] -= 1;
                s.add_term(d, c * idx[j] as f64);
            }
        }
        Ok(s)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn eval_real(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: x.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(idx, c)| {
                idx.iter()
                    .zip(x)
                    .fold(*c, |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum())
    }

    /// Evaluates with a complex value substituted for every variable.
    pub fn eval_complex(&self, x: &[Complex64]) -> Result<Complex64> {
        if x.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                got: x.len(),
            });
        }
        let mut max_e = vec![0u32; x.len()];
        for idx in self.terms.keys() {
            for (m, &e) in max_e.iter_mut().zip(idx) {
                *m = (*m).max(e);
            }
        }
        let powers: Vec<Vec<Complex64>> = x
            .iter()
            .zip(&max_e)
            .map(|(&z, &m)| {
                let mut p = Vec::with_capacity(m as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                p.push(acc);
                for _ in 0..m {
                    acc *= z;
                    p.push(acc);
                }
                p
            })
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        for (idx, &c) in &self.terms {
            let mut t = Complex64::new(c, 0.0);
            for (j, &e) in idx.iter().enumerate() {
                if e > 0 {
                    t *= powers[j][e as usize];
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Complexifies the named variables.
    ///
    /// The returned function takes one complex argument per series variable;
    /// variables not listed must be passed real (within the domain tolerance).
    /// Every argument must lie within the declared polyradius.
    pub fn complexify(&self, names: &[&str]) -> Result<AnalyticFunction> {
        let mut complex = vec![false; self.vars.len()];
        for n in names {
            complex[self.var_index(n)?] = true;
        }
        let radius = self.polyradius.clone();
        let s = self.clone();
        let domain = Domain::predicate(format!("polyradius {radius:?}"), move |p| {
            p.iter()
                .zip(&radius)
                .zip(&complex)
                .all(|((z, r), &cx)| z.norm() <= r + DOMAIN_TOL && (cx || z.im.abs() <= DOMAIN_TOL))
        });
        Ok(AnalyticFunction::fallible(
            self.vars.len(),
            domain,
            Provenance::SeriesBacked,
            format!("series in {:?} complexified in {names:?}", self.vars),
            move |p| s.eval_complex(p),
        ))
    }

    /// Truncated substitution `outer(inners[0], inners[1], ...)`.
    ///
    /// The result lives in the inners' variables with their order.
    pub fn compose(outer: &MultiSeries, inners: &[MultiSeries]) -> Result<Self> {
        if inners.len() != outer.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: outer.vars.len(),
                got: inners.len(),
            });
        }
        let base = &inners[0];
        for q in &inners[1..] {
            base.check_compatible(q)?;
        }
        let order = inners.iter().map(|q| q.order).min().unwrap_or(base.order);
        let mut template = base.zero_like();
        template.order = order;
        for q in &inners[1..] {
            template = template.combine_meta(q);
        }
        let mut max_e = vec![0u32; inners.len()];
        for idx in outer.terms.keys() {
            for (m, &e) in max_e.iter_mut().zip(idx) {
                *m = (*m).max(e);
            }
        }
        let mut powers: Vec<Vec<MultiSeries>> = Vec::with_capacity(inners.len());
        for (q, &m) in inners.iter().zip(&max_e) {
            let q = q.with_order(order);
            let mut p = vec![template.constant_like(1.0)];
            for k in 0..m as usize {
                let next = p[k].mul(&q)?;
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = template.zero_like();
        for (idx, &c) in &outer.terms {
            let mut t = template.constant_like(c);
            for (j, &e) in idx.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[j][e as usize])?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// `outer(self)` for a one-variable outer series.
    pub fn compose_1d(&self, outer: &PowerSeries1D) -> Result<Self> {
        let mut acc = self.zero_like();
        let n = if self.constant_term() == 0.0 {
            outer.order().min(self.order)
        } else {
            outer.order()
        };
        for k in (0..=n).rev() {
            acc = acc.mul(self)?;
            acc = acc.add(&self.constant_like(outer.coeff(k)))?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexify_in_s_only() {
        // v = 2 s (x^2 + y^2)
        let v = MultiSeries::polynomial(
            &["x", "y", "s"],
            16,
            [(vec![2, 0, 1], 2.0), (vec![0, 2, 1], 2.0)],
        )
        .unwrap();
        let f = v.complexify(&["s"]).unwrap();
        let c = |a, b| Complex64::new(a, b);
        assert_eq!(f.eval(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap(), c(0.0, 2.0));
        // x is real-only
        assert!(f.eval(&[c(1.0, 0.5), c(0.0, 0.0), c(0.0, 1.0)]).is_err());
        assert!(matches!(v.complexify(&["t"]), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn compose_examples() {
        let u2 = MultiSeries::polynomial(&["u"], 8, [(vec![2], 1.0)]).unwrap();
        let inner = MultiSeries::polynomial(&["x"], 8, [(vec![1], 1.0), (vec![2], 1.0)]).unwrap();
        let c = MultiSeries::compose(&u2, std::slice::from_ref(&inner)).unwrap();
        assert_eq!(c.coeff(&[2]), 1.0);
        assert_eq!(c.coeff(&[3]), 2.0);
        assert_eq!(c.coeff(&[4]), 1.0);
        assert_eq!(c.num_terms(), 3);

        let u = MultiSeries::polynomial(&["u"], 8, [(vec![1], 1.0)]).unwrap();
        assert_eq!(MultiSeries::compose(&u, std::slice::from_ref(&inner)).unwrap(), inner);

        let uv = MultiSeries::polynomial(&["u", "v"], 8, [(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
        let x = MultiSeries::polynomial(&["x"], 8, [(vec![1], 1.0)]).unwrap();
        let zero = MultiSeries::compose(&uv, &[x.clone(), x.scale(-1.0)]).unwrap();
        assert!(zero.is_zero());

        assert!(matches!(
            MultiSeries::compose(&uv, &[x]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn truncation_and_incompatibility() {
        let x = MultiSeries::polynomial(&["x", "y"], 1, [(vec![1, 0], 1.0)]).unwrap();
        assert!(x.mul(&x).unwrap().is_zero());
        let y = MultiSeries::polynomial(&["y", "x"], 1, [(vec![1, 0], 1.0)]).unwrap();
        assert!(matches!(x.add(&y), Err(Error::IncompatibleVariables(_))));
    }

    #[test]
    fn compose_1d_exp() {
        let x = MultiSeries::polynomial(&["x", "y"], 12, [(vec![1, 0], 1.0), (vec![0, 1], -0.5)]).unwrap();
        let e = x.compose_1d(&PowerSeries1D::exp(12)).unwrap();
        let v = e.eval_real(&[0.1, 0.2]).unwrap();
        assert!((v - 0f64.exp()).abs() < 1e-14);
        let shifted = x.add(&x.constant_like(0.3)).unwrap();
        let e = shifted.compose_1d(&PowerSeries1D::exp(30)).unwrap();
        let v = e.eval_real(&[0.1, 0.0]).unwrap();
        assert!((v - 0.4f64.exp()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn derivative_and_eval() {
        let p = MultiSeries::polynomial(&["x", "s"], 8, [(vec![2, 1], 3.0), (vec![0, 3], 1.0)]).unwrap();
        let d = p.derivative("s").unwrap();
        assert_eq!(d.coeff(&[2, 0]), 3.0);
        assert_eq!(d.coeff(&[0, 2]), 3.0);
        assert_eq!(p.eval_real(&[2.0, 1.0]).unwrap(), 13.0);
    }
}
