//! Named density families and tabulated densities.
//!
//! Projections take any `Fn(f64) -> f64`; these are the families the CLI and
//! the verification suites use. On a bounded domain each family is truncated
//! to the domain and renormalized there, and the mass that fell outside is
//! kept as [`Truncated::deficit`].

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::basis::Domain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    /// Constant on a bounded domain.
    Uniform,
    Gaussian { mu: f64, sigma: f64 },
    /// `(weight, mu, sigma)` components; weights are normalized on use.
    Mixture(Vec<(f64, f64, f64)>),
    /// Uniform on `[a, b]`.
    Indicator { a: f64, b: f64 },
    /// Piecewise-linear interpolation of `(x, y)` samples, zero outside.
    Sampled { xs: Vec<f64>, ys: Vec<f64> },
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

impl Density {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("gaussian needs finite mu and sigma > 0, got ({mu}, {sigma})")));
        }
        Ok(Density::Gaussian { mu, sigma })
    }

    pub fn mixture(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("mixture needs at least one component".into()));
        }
        for &(w, mu, s) in &components {
            if !(w >= 0.0 && s > 0.0 && mu.is_finite() && w.is_finite() && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad mixture component ({w}, {mu}, {s})")));
            }
        }
        if components.iter().map(|c| c.0).sum::<f64>() <= 0.0 {
            return Err(Error::InvalidArgument("mixture weights sum to zero".into()));
        }
        Ok(Density::Mixture(components))
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("indicator needs a < b, got ({a}, {b})")));
        }
        Ok(Density::Indicator { a, b })
    }

    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("sampled density needs at least two points".into()));
        }
        if xs.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidArgument("sample abscissae must be strictly increasing".into()));
        }
        if let Some((x, y)) = xs.iter().zip(&ys).find(|(_, y)| !(y.is_finite() && **y >= 0.0)) {
            return Err(Error::NonFinite { x: *x, value: *y });
        }
        Ok(Density::Sampled { xs, ys })
    }

    /// Value of the (untruncated) density. `Uniform` has value 1 here; its
    /// level comes from the domain in [`Density::truncated`].
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Density::Uniform => 1.0,
            Density::Gaussian { mu, sigma } => normal_pdf(x, *mu, *sigma),
            Density::Mixture(cs) => {
                let total: f64 = cs.iter().map(|c| c.0).sum();
                cs.iter().map(|&(w, mu, s)| w * normal_pdf(x, mu, s)).sum::<f64>() / total
            }
            Density::Indicator { a, b } => {
                if x >= *a && x <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Density::Sampled { xs, ys } => interpolate(xs, ys, x),
        }
    }

    /// Mass of [`Density::eval`] on `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Density::Uniform => hi - lo,
            Density::Gaussian { mu, sigma } => gaussian_mass(*mu, *sigma, lo, hi),
            Density::Mixture(cs) => {
                let total: f64 = cs.iter().map(|c| c.0).sum();
                cs.iter().map(|&(w, mu, s)| w * gaussian_mass(mu, s, lo, hi)).sum::<f64>() / total
            }
            Density::Indicator { a, b } => ((b.min(hi) - a.max(lo)).max(0.0)) / (b - a),
            Density::Sampled { xs, ys } => sampled_mass(xs, ys, lo, hi),
        }
    }

    /// The density restricted to `domain` and renormalized there.
    pub fn truncated(&self, domain: &Domain) -> Result<Truncated> {
        let (mass, total) = match domain.bounds() {
            Some((lo, hi)) => {
                let total = match self {
                    Density::Uniform => hi - lo,
                    Density::Sampled { xs, ys } => sampled_mass(xs, ys, f64::NEG_INFINITY, f64::INFINITY),
                    _ => 1.0,
                };
                (self.mass_between(lo, hi), total)
            }
            None => {
                if matches!(self, Density::Uniform) {
                    return Err(Error::InvalidArgument("a uniform density needs a bounded domain".into()));
                }
                let total = self.mass_between(f64::NEG_INFINITY, f64::INFINITY);
                (total, total)
            }
        };
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("density has no mass on {domain}")));
        }
        Ok(Truncated {
            density: self.clone(),
            domain: *domain,
            mass,
            deficit: (1.0 - mass / total).max(0.0),
        })
    }
}

fn gaussian_mass(mu: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    let a = (lo - mu) / sigma;
    let b = (hi - mu) / sigma;
    // use the tail that keeps precision
    if a > 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] || x.is_nan() {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn sampled_mass(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    for i in 1..xs.len() {
        let a = xs[i - 1].max(lo);
        let b = xs[i].min(hi);
        if b > a {
            total += 0.5 * (interpolate(xs, ys, a) + interpolate(xs, ys, b)) * (b - a);
        }
    }
    total
}

/// A density restricted to a domain and scaled to unit mass on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    density: Density,
    domain: Domain,
    mass: f64,
    deficit: f64,
}

impl Truncated {
    pub fn eval(&self, x: f64) -> f64 {
        if !self.domain.contains(x) {
            return 0.0;
        }
        self.density.eval(x) / self.mass
    }

    /// Fraction of the family's mass that lies outside the domain.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn density(&self) -> &Density {
        &self.density
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_truncation_mass() {
        let d = Density::gaussian(0.0, 1.0).unwrap();
        let t = d.truncated(&Domain::default_periodic()).unwrap();
        // 2 Phi(-pi) = 0.00168031633652675
        assert!((t.deficit() - 2.0 * normal_cdf(-PI)).abs() < 1e-15);
        assert!((t.deficit() - 0.001_680_316_336_526_75).abs() < 1e-12);
        assert!((t.eval(0.0) - normal_pdf(0.0, 0.0, 1.0) / (1.0 - t.deficit())).abs() < 1e-15);
        assert_eq!(t.eval(4.0), 0.0);
    }

    #[test]
    fn uniform_on_domain() {
        let t = Density::Uniform.truncated(&Domain::default_periodic()).unwrap();
        assert!((t.eval(0.3) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert_eq!(t.deficit(), 0.0);
        assert!(Density::Uniform.truncated(&Domain::RealLine).is_err());
    }

    #[test]
    fn indicator_and_sampled() {
        let d = Density::indicator(-1.0, 1.0).unwrap();
        assert_eq!(d.eval(0.0), 0.5);
        assert_eq!(d.eval(1.5), 0.0);
        assert!((d.mass_between(0.0, 5.0) - 0.5).abs() < 1e-15);
        assert!(Density::indicator(1.0, 1.0).is_err());

        let s = Density::sampled(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(2.5), 0.0);
        assert!((s.mass_between(f64::NEG_INFINITY, f64::INFINITY) - 2.0).abs() < 1e-15);
        assert!((s.mass_between(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!(Density::sampled(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Density::sampled(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn mixture_weights_normalized() {
        let m = Density::mixture(vec![(2.0, -1.0, 0.5), (2.0, 1.0, 0.5)]).unwrap();
        assert!((m.mass_between(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-15);
        assert!(Density::mixture(vec![]).is_err());
        assert!(Density::mixture(vec![(1.0, 0.0, -1.0)]).is_err());
    }
}
