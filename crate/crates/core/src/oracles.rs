//! Reference answers that share no code with the spectral path: a
//! trapezoid-rule grid posterior and closed-form Gaussian conjugacy.

use crate::density::{normal_cdf, normal_pdf};
use crate::error::{Error, Result};

/// Smallest grid the oracle accepts.
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    pub grid: Vec<f64>,
    /// Normalized posterior density at each grid point.
    pub density: Vec<f64>,
    /// Trapezoid integral of `prior * likelihood`.
    pub evidence: f64,
}

impl GridPosterior {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Trapezoid integral of the normalized density (1 up to rounding).
    pub fn mass(&self) -> f64 {
        trapezoid(&self.density, self.spacing())
    }

    /// Posterior mean and variance by the trapezoid rule.
    pub fn mean_variance(&self) -> (f64, f64) {
        let h = self.spacing();
        let first: Vec<f64> = self.grid.iter().zip(&self.density).map(|(x, p)| x * p).collect();
        let mean = trapezoid(&first, h);
        let second: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.density)
            .map(|(x, p)| (x - mean) * (x - mean) * p)
            .collect();
        (mean, trapezoid(&second, h))
    }
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Bayes' rule on `m` uniform points spanning `[lo, hi]`.
pub fn grid_posterior<P, L>(prior: P, likelihood: L, lo: f64, hi: f64, m: usize) -> Result<GridPosterior>
where
    P: Fn(f64) -> f64,
    L: Fn(f64) -> f64,
{
    if m < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid oracle needs at least {MIN_GRID} points, got {m}")));
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidDomain(format!("[{lo}, {hi}]")));
    }
    let h = (hi - lo) / (m - 1) as f64;
    let grid: Vec<f64> = (0..m).map(|j| lo + j as f64 * h).collect();
    let mut product = Vec::with_capacity(m);
    for &x in &grid {
        let p = prior(x);
        let l = likelihood(x);
        if !(p.is_finite() && l.is_finite() && p >= 0.0 && l >= 0.0) {
            return Err(Error::NonFinite { x, value: p * l });
        }
        product.push(p * l);
    }
    let evidence = trapezoid(&product, h);
    if evidence.is_nan() || evidence <= 0.0 {
        return Err(Error::InvalidPosterior("prior and likelihood have no overlap on the grid".into()));
    }
    Ok(GridPosterior {
        density: product.iter().map(|v| v / evidence).collect(),
        grid,
        evidence,
    })
}

/// Posterior `(mean, variance)` for a Gaussian prior `N(mu0, var0)` and one
/// Gaussian observation `x` with noise variance `var_l`.
pub fn conjugate_gaussian_posterior(mu0: f64, var0: f64, x: f64, var_l: f64) -> Result<(f64, f64)> {
    if !(var0 > 0.0 && var_l > 0.0) {
        return Err(Error::InvalidArgument(format!("variances must be positive, got {var0} and {var_l}")));
    }
    let var = 1.0 / (1.0 / var0 + 1.0 / var_l);
    Ok((var * (mu0 / var0 + x / var_l), var))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMoments {
    /// Mass of `N(mu, var)` inside the interval.
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of `N(mu, var)` restricted to `[lo, hi]`.
pub fn truncated_normal_moments(mu: f64, var: f64, lo: f64, hi: f64) -> Result<TruncatedMoments> {
    if !(var > 0.0 && lo < hi) {
        return Err(Error::InvalidArgument(format!("need var > 0 and lo < hi, got {var}, [{lo}, {hi}]")));
    }
    let s = var.sqrt();
    let a = (lo - mu) / s;
    let b = (hi - mu) / s;
    let mass = if a > 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    let pa = normal_pdf(a, 0.0, 1.0);
    let pb = normal_pdf(b, 0.0, 1.0);
    let shift = (pa - pb) / mass;
    let a_term = if a.is_finite() { a * pa } else { 0.0 };
    let b_term = if b.is_finite() { b * pb } else { 0.0 };
    Ok(TruncatedMoments {
        mass,
        mean: mu + s * shift,
        variance: var * (1.0 + (a_term - b_term) / mass - shift * shift),
    })
}
