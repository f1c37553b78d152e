use num_complex::Complex64;

use super::multi::MultiSeries;
use super::power::PowerSeries1D;
use crate::error::Result;

/// Complex-valued series stored as a pair of real-coefficient series.
///
/// Used to expand closed-form holomorphic expressions along an edge, e.g.
/// `Im F(z, s + i phi(z, zbar, s))` as a real series in `(x, y, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    pub re: MultiSeries,
    pub im: MultiSeries,
}

impl ComplexSeries {
    pub fn new(re: MultiSeries, im: MultiSeries) -> Self {
        Self { re, im }
    }

    pub fn real(re: MultiSeries) -> Self {
        let im = re.zero_like();
        Self { re, im }
    }

    pub fn constant_like(template: &MultiSeries, c: Complex64) -> Self {
        Self {
            re: template.constant_like(c.re),
            im: template.constant_like(c.im),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.add(&o.re)?,
            im: self.im.add(&o.im)?,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.sub(&o.re)?,
            im: self.im.sub(&o.im)?,
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            re: self.re.scale(-1.0),
            im: self.im.scale(-1.0),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            re: self.re.mul(&o.re)?.sub(&self.im.mul(&o.im)?)?,
            im: self.re.mul(&o.im)?.add(&self.im.mul(&o.re)?)?,
        })
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Ok(Self {
            re: self.re.scale(c.re).sub(&self.im.scale(c.im))?,
            im: self.re.scale(c.im).add(&self.im.scale(c.re))?,
        })
    }

    pub fn powi(&self, k: u32) -> Result<Self> {
        let mut acc = Self::constant_like(&self.re, Complex64::new(1.0, 0.0));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Result<Self> {
        let ea = real_exp(&self.re)?;
        let (cb, sb) = real_cos_sin(&self.im)?;
        Ok(Self {
            re: ea.mul(&cb)?,
            im: ea.mul(&sb)?,
        })
    }

    pub fn sin(&self) -> Result<Self> {
        let (ca, sa) = real_cos_sin(&self.re)?;
        let (chb, shb) = real_cosh_sinh(&self.im)?;
        Ok(Self {
            re: sa.mul(&chb)?,
            im: ca.mul(&shb)?,
        })
    }

    pub fn cos(&self) -> Result<Self> {
        let (ca, sa) = real_cos_sin(&self.re)?;
        let (chb, shb) = real_cosh_sinh(&self.im)?;
        Ok(Self {
            re: ca.mul(&chb)?,
            im: sa.mul(&shb)?.scale(-1.0),
        })
    }
}

fn split_constant(a: &MultiSeries) -> Result<(f64, MultiSeries)> {
    let c = a.constant_term();
    Ok((c, a.sub(&a.constant_like(c))?))
}

fn real_exp(a: &MultiSeries) -> Result<MultiSeries> {
    let (c, rest) = split_constant(a)?;
    Ok(rest.compose_1d(&PowerSeries1D::exp(a.order()))?.scale(c.exp()))
}

fn real_cos_sin(a: &MultiSeries) -> Result<(MultiSeries, MultiSeries)> {
    let (c, rest) = split_constant(a)?;
    let cr = rest.compose_1d(&PowerSeries1D::cos(a.order()))?;
    let sr = rest.compose_1d(&PowerSeries1D::sin(a.order()))?;
    Ok((
        cr.scale(c.cos()).sub(&sr.scale(c.sin()))?,
        sr.scale(c.cos()).add(&cr.scale(c.sin()))?,
    ))
}

fn real_cosh_sinh(a: &MultiSeries) -> Result<(MultiSeries, MultiSeries)> {
    let (c, rest) = split_constant(a)?;
    let chr = rest.compose_1d(&PowerSeries1D::cosh(a.order()))?;
    let shr = rest.compose_1d(&PowerSeries1D::sinh(a.order()))?;
    Ok((
        chr.scale(c.cosh()).add(&shr.scale(c.sinh()))?,
        shr.scale(c.cosh()).add(&chr.scale(c.sinh()))?,
    ))
}
