//! Orthonormal bases, their quadrature rules, and the maps between densities
//! and coefficient vectors.
//!
//! | kind    | domain           | basis function                                   | indices |
//! |---------|------------------|--------------------------------------------------|---------|
//! | Fourier | periodic `[lo, hi)` | `exp(i k w x) / sqrt(L)`, `w = 2 pi / L`       | `-K..=K` |
//! | Cosine  | `[lo, hi]`       | `1/sqrt(L)`, `sqrt(2/L) cos(pi k (x - lo) / L)`  | `0..=K` |
//! | Hermite | real line        | `(2^k k! sqrt(pi))^(-1/2) H_k(x) exp(-x^2 / 2)`  | `0..=K` |
//!
//! On `(-pi, pi)` the Fourier functions reduce to `exp(i k x) / sqrt(2 pi)`.
//! The cosine `k = 0` function is `1/sqrt(L)` so that the family stays
//! orthonormal.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::par;
use crate::spectral::CoefficientVector;

/// Relative slack allowed when checking that a point lies in a bounded domain.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Periodic interval `[lo, hi)`; the natural home of the Fourier basis.
    Periodic { lo: f64, hi: f64 },
    /// Closed interval `[lo, hi]` with reflecting ends.
    Interval { lo: f64, hi: f64 },
    RealLine,
}

impl Domain {
    pub fn periodic(lo: f64, hi: f64) -> Result<Self> {
        check_bounds(lo, hi)?;
        Ok(Domain::Periodic { lo, hi })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_bounds(lo, hi)?;
        Ok(Domain::Interval { lo, hi })
    }

    /// `(-pi, pi)`.
    pub fn default_periodic() -> Self {
        Domain::Periodic { lo: -PI, hi: PI }
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            Domain::Periodic { lo, hi } | Domain::Interval { lo, hi } => Some((lo, hi)),
            Domain::RealLine => None,
        }
    }

    pub fn length(&self) -> Option<f64> {
        self.bounds().map(|(lo, hi)| hi - lo)
    }

    pub fn contains(&self, theta: f64) -> bool {
        if !theta.is_finite() {
            return false;
        }
        match self.bounds() {
            None => true,
            Some((lo, hi)) => {
                let slack = DOMAIN_SLACK * (hi - lo);
                theta >= lo - slack && theta <= hi + slack
            }
        }
    }
}

fn check_bounds(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidDomain(format!("bounds must be finite: [{lo}, {hi}]")));
    }
    if lo >= hi {
        return Err(Error::InvalidDomain(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Periodic { lo, hi } => write!(f, "periodic [{lo}, {hi})"),
            Domain::Interval { lo, hi } => write!(f, "interval [{lo}, {hi}]"),
            Domain::RealLine => write!(f, "real line"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Fourier,
    Cosine,
    Hermite,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasisKind::Fourier => "Fourier",
            BasisKind::Cosine => "Cosine",
            BasisKind::Hermite => "Hermite",
        };
        f.write_str(s)
    }
}

/// A basis kind on a compatible domain, truncated at wavenumber `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    kind: BasisKind,
    domain: Domain,
    max_wavenumber: usize,
}

impl BasisSpec {
    pub fn new(kind: BasisKind, domain: Domain, max_wavenumber: usize) -> Result<Self> {
        let compatible = matches!(
            (kind, domain),
            (BasisKind::Fourier, Domain::Periodic { .. })
                | (BasisKind::Cosine, Domain::Interval { .. })
                | (BasisKind::Hermite, Domain::RealLine)
        );
        if !compatible {
            return Err(Error::BasisDomainMismatch { kind, domain });
        }
        Ok(BasisSpec {
            kind,
            domain,
            max_wavenumber,
        })
    }

    /// Fourier basis on `(-pi, pi)`.
    pub fn fourier(max_wavenumber: usize) -> Self {
        BasisSpec {
            kind: BasisKind::Fourier,
            domain: Domain::default_periodic(),
            max_wavenumber,
        }
    }

    pub fn cosine(lo: f64, hi: f64, max_wavenumber: usize) -> Result<Self> {
        BasisSpec::new(BasisKind::Cosine, Domain::interval(lo, hi)?, max_wavenumber)
    }

    pub fn hermite(max_wavenumber: usize) -> Self {
        BasisSpec {
            kind: BasisKind::Hermite,
            domain: Domain::RealLine,
            max_wavenumber,
        }
    }

    /// Same kind and domain, different truncation.
    pub fn with_max_wavenumber(&self, max_wavenumber: usize) -> Self {
        BasisSpec {
            max_wavenumber,
            ..*self
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `K`.
    pub fn max_wavenumber(&self) -> usize {
        self.max_wavenumber
    }

    /// Retained mode count: `2K + 1` for Fourier, `K + 1` otherwise.
    pub fn mode_count(&self) -> usize {
        match self.kind {
            BasisKind::Fourier => 2 * self.max_wavenumber + 1,
            _ => self.max_wavenumber + 1,
        }
    }

    pub fn min_index(&self) -> i64 {
        match self.kind {
            BasisKind::Fourier => -(self.max_wavenumber as i64),
            _ => 0,
        }
    }

    pub fn max_index(&self) -> i64 {
        self.max_wavenumber as i64
    }

    /// Storage slot of wavenumber `k`.
    pub fn position(&self, k: i64) -> Option<usize> {
        (self.min_index()..=self.max_index())
            .contains(&k)
            .then(|| (k - self.min_index()) as usize)
    }

    /// Wavenumber stored at slot `pos`.
    pub fn wavenumber(&self, pos: usize) -> i64 {
        self.min_index() + pos as i64
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.min_index()..=self.max_index()
    }

    /// `<1, phi_0>`: the factor between the zeroth coefficient and the
    /// integral of the represented function. `None` for Hermite, whose span
    /// does not contain the constants.
    pub fn mass_factor(&self) -> Option<f64> {
        match self.kind {
            BasisKind::Hermite => None,
            _ => self.domain.length().map(f64::sqrt),
        }
    }

    fn check_index(&self, k: i64) -> Result<()> {
        if self.position(k).is_none() {
            return Err(Error::IndexOutOfRange {
                index: k,
                min: self.min_index(),
                max: self.max_index(),
            });
        }
        Ok(())
    }

    fn check_point(&self, theta: f64) -> Result<()> {
        if !self.domain.contains(theta) {
            return Err(Error::OutsideDomain {
                theta,
                domain: self.domain,
            });
        }
        Ok(())
    }
}

/// `phi_k(theta)`.
pub fn eval_basis(spec: &BasisSpec, k: i64, theta: f64) -> Result<Complex64> {
    spec.check_index(k)?;
    spec.check_point(theta)?;
    Ok(match spec.kind {
        BasisKind::Fourier => {
            let len = spec.domain.length().expect("bounded");
            let w = 2.0 * PI / len;
            Complex64::from_polar(1.0 / len.sqrt(), k as f64 * w * theta)
        }
        BasisKind::Cosine => Complex64::new(cosine_fn(spec, k as usize, theta), 0.0),
        BasisKind::Hermite => {
            let values = hermite_functions(k as usize, theta);
            Complex64::new(values[k as usize], 0.0)
        }
    })
}

fn cosine_fn(spec: &BasisSpec, k: usize, theta: f64) -> f64 {
    let (lo, hi) = spec.domain.bounds().expect("bounded");
    let len = hi - lo;
    if k == 0 {
        1.0 / len.sqrt()
    } else {
        (2.0 / len).sqrt() * (PI * k as f64 * (theta - lo) / len).cos()
    }
}

/// Orthonormal Hermite functions `psi_0..=psi_kmax` at `x`.
///
/// Uses the three-term recurrence with a running log-scale so that neither
/// the Gaussian factor nor the polynomial overflows for large `|x|` or `k`.
pub fn hermite_functions(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let base_log = -0.5 * x * x - 0.25 * PI.ln();
    let mut log_scale = 0.0;
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..=kmax {
        if n > 0 {
            let next = (2.0 / n as f64).sqrt() * x * cur - ((n - 1) as f64 / n as f64).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        if cur.abs() > 1e150 {
            prev /= 1e150;
            cur /= 1e150;
            log_scale += 1e150f64.ln();
        }
        let scale = base_log + log_scale;
        out.push(if cur == 0.0 { 0.0 } else { cur * scale.exp() });
    }
    out
}

/// Ratio data for the degree-`m` Hermite recurrence at `x`: returns
/// `(q_m, q_{m-1}, log_scale)` with `psi_n = q_n * exp(log_scale)`.
fn hermite_pair(m: usize, x: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 1..=m {
        let next = (2.0 / n as f64).sqrt() * x * cur - ((n - 1) as f64 / n as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev /= 1e150;
            cur /= 1e150;
            log_scale += 1e150f64.ln();
        }
    }
    (cur, prev, log_scale)
}

/// Which measure the rule's `weights` integrate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFunction {
    /// `sum w_j g(x_j) ~ int g(x) dx`.
    Unit,
    /// `sum w_j g(x_j) ~ int g(x) exp(-x^2) dx` (classical Gauss-Hermite).
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosineRule {
    Midpoint,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RuleLayout {
    UniformPeriodic { lo: f64, len: f64 },
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // weights for plain dx; equal to `weights` unless the weight function is Gaussian
    dx_weights: Vec<f64>,
    weight_fn: WeightFunction,
    layout: RuleLayout,
    exactness_note: String,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights against [`QuadratureRule::weight_function`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights against plain `dx`. For Gauss-Hermite these are
    /// `w_j exp(x_j^2)`, formed in log space.
    pub fn dx_weights(&self) -> &[f64] {
        &self.dx_weights
    }

    pub fn weight_function(&self) -> WeightFunction {
        self.weight_fn
    }

    pub fn exactness_note(&self) -> &str {
        &self.exactness_note
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Default rule for `spec` with `m` nodes (midpoint rule for cosine).
pub fn quadrature_for(spec: &BasisSpec, m: usize) -> Result<QuadratureRule> {
    quadrature_with(spec, m, CosineRule::Midpoint)
}

/// `m = 2 N` nodes, the default oversampling for projections.
pub fn default_quadrature(spec: &BasisSpec) -> Result<QuadratureRule> {
    quadrature_for(spec, 2 * spec.mode_count())
}

pub fn quadrature_with(spec: &BasisSpec, m: usize, cosine: CosineRule) -> Result<QuadratureRule> {
    let required = spec.mode_count();
    if m < required {
        return Err(Error::InsufficientNodes { nodes: m, required });
    }
    match spec.kind {
        BasisKind::Fourier => {
            let (lo, hi) = spec.domain.bounds().expect("bounded");
            let len = hi - lo;
            let h = len / m as f64;
            Ok(QuadratureRule {
                nodes: (0..m).map(|j| lo + j as f64 * h).collect(),
                weights: vec![h; m],
                dx_weights: vec![h; m],
                weight_fn: WeightFunction::Unit,
                layout: RuleLayout::UniformPeriodic { lo, len },
                exactness_note: format!("uniform periodic rule, exact for trigonometric degree < {m}"),
            })
        }
        BasisKind::Cosine => {
            let (lo, hi) = spec.domain.bounds().expect("bounded");
            let (nodes, weights, note) = match cosine {
                CosineRule::Midpoint => {
                    let h = (hi - lo) / m as f64;
                    (
                        (0..m).map(|j| lo + (j as f64 + 0.5) * h).collect(),
                        vec![h; m],
                        format!("midpoint rule, exact for cos(pi j x / L) with j < {}", 2 * m),
                    )
                }
                CosineRule::GaussLegendre => {
                    let (x, w) = gauss_legendre(m);
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (hi + lo);
                    (
                        x.iter().map(|t| mid + half * t).collect(),
                        w.iter().map(|v| v * half).collect(),
                        format!("Gauss-Legendre, exact for polynomials of degree < {}", 2 * m),
                    )
                }
            };
            Ok(QuadratureRule {
                dx_weights: weights.clone(),
                nodes,
                weights,
                weight_fn: WeightFunction::Unit,
                layout: RuleLayout::Other,
                exactness_note: note,
            })
        }
        BasisKind::Hermite => {
            let (nodes, log_dx) = gauss_hermite(m);
            let weights = nodes
                .iter()
                .zip(&log_dx)
                .map(|(x, lw)| (lw - x * x).exp())
                .collect();
            Ok(QuadratureRule {
                dx_weights: log_dx.iter().map(|lw| lw.exp()).collect(),
                nodes,
                weights,
                weight_fn: WeightFunction::Gaussian,
                layout: RuleLayout::Other,
                exactness_note: format!(
                    "Gauss-Hermite, exact for p(x) exp(-x^2) with deg p < {}",
                    2 * m
                ),
            })
        }
    }
}

/// Gauss-Hermite nodes (ascending) and `ln(w_j) + x_j^2`.
///
/// Roots come from Newton's method on the orthonormal recurrence, started
/// from the usual asymptotic guesses; the plain-`dx` weight is
/// `1 / (m psi_{m-1}(x_j)^2)`.
fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut log_dx = vec![0.0; m];
    let nf = m as f64;
    let mut z = 0.0;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[m - 1],
            3 => 1.91 * z - 0.91 * nodes[m - 2],
            _ => 2.0 * z - nodes[m - 1 - (i - 2)],
        };
        for _ in 0..100 {
            let (qm, qm1, _) = hermite_pair(m, z);
            let step = qm / ((2.0 * nf).sqrt() * qm1);
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, qm1, log_scale) = hermite_pair(m, z);
        let lw = -nf.ln() - 2.0 * (qm1.abs().ln() + log_scale);
        nodes[m - 1 - i] = z;
        nodes[i] = -z;
        log_dx[m - 1 - i] = lw;
        log_dx[i] = lw;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
        let (_, qm1, log_scale) = hermite_pair(m, 0.0);
        log_dx[m / 2] = -nf.ln() - 2.0 * (qm1.abs().ln() + log_scale);
    }
    (nodes, log_dx)
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let nf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for n in 2..=m {
                let p2 = ((2 * n - 1) as f64 * z * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            deriv = nf * (z * pm - pm1) / (z * z - 1.0);
            let step = pm / deriv;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * deriv * deriv);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Coefficients `a_k = sum_j w_j f(x_j) conj(phi_k(x_j))`.
///
/// `f` need not be normalized. A non-finite value at any node is rejected.
pub fn project<F>(spec: &BasisSpec, f: F, rule: &QuadratureRule) -> Result<CoefficientVector>
where
    F: Fn(f64) -> f64,
{
    let values = rule
        .nodes
        .iter()
        .map(|&x| {
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { x, value: v })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    project_samples(spec, &values, rule)
}

/// Projection from values already sampled at `rule.nodes()`.
pub fn project_samples(
    spec: &BasisSpec,
    values: &[f64],
    rule: &QuadratureRule,
) -> Result<CoefficientVector> {
    if values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: rule.len(),
        });
    }
    let weighted: Vec<f64> = values.iter().zip(&rule.dx_weights).map(|(v, w)| v * w).collect();
    let n = spec.mode_count();
    let entries: Vec<Complex64> = match (spec.kind, rule.layout) {
        (BasisKind::Fourier, RuleLayout::UniformPeriodic { lo, len }) => {
            // exp(-i k w x_j) = exp(-i k w lo) * exp(-2 pi i (k j mod m) / m)
            let m = rule.len();
            let table: Vec<Complex64> = (0..m)
                .map(|r| Complex64::from_polar(1.0, -2.0 * PI * r as f64 / m as f64))
                .collect();
            let norm = 1.0 / len.sqrt();
            let w = 2.0 * PI / len;
            par::map_range(n, |pos| {
                let k = spec.wavenumber(pos);
                let kr = k.rem_euclid(m as i64) as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in weighted.iter().enumerate() {
                    acc += table[(kr * j) % m] * v;
                }
                acc * Complex64::from_polar(norm, -(k as f64) * w * lo)
            })
        }
        (BasisKind::Fourier, _) => {
            let len = spec.domain.length().expect("bounded");
            let w = 2.0 * PI / len;
            let norm = 1.0 / len.sqrt();
            par::map_range(n, |pos| {
                let k = spec.wavenumber(pos) as f64;
                rule.nodes
                    .iter()
                    .zip(&weighted)
                    .map(|(&x, &v)| Complex64::from_polar(norm * v, -k * w * x))
                    .sum()
            })
        }
        (BasisKind::Cosine, _) => par::map_range(n, |k| {
            let s: f64 = rule
                .nodes
                .iter()
                .zip(&weighted)
                .map(|(&x, &v)| v * cosine_fn(spec, k, x))
                .sum();
            Complex64::new(s, 0.0)
        }),
        (BasisKind::Hermite, _) => {
            let kmax = spec.max_wavenumber;
            let rows = par::map_slice(&rule.nodes, |&x| hermite_functions(kmax, x));
            par::map_range(n, |k| {
                let s: f64 = rows.iter().zip(&weighted).map(|(row, &v)| v * row[k]).sum();
                Complex64::new(s, 0.0)
            })
        }
    };
    CoefficientVector::new(*spec, entries)
}

/// Point values of a coefficient expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub values: Vec<f64>,
    /// Largest `|Im|` of the complex sum; non-negligible only when the
    /// coefficients are not Hermitian-symmetric.
    pub max_imag: f64,
}

/// `Re(sum_k a_k phi_k(theta))` at every point.
pub fn reconstruct(coeffs: &CoefficientVector, thetas: &[f64]) -> Result<Reconstruction> {
    let spec = coeffs.spec();
    for &t in thetas {
        spec.check_point(t)?;
    }
    let entries = coeffs.entries();
    let sums: Vec<Complex64> = match spec.kind {
        BasisKind::Fourier => {
            let len = spec.domain.length().expect("bounded");
            let w = 2.0 * PI / len;
            let norm = 1.0 / len.sqrt();
            par::map_slice(thetas, |&t| {
                entries
                    .iter()
                    .enumerate()
                    .map(|(pos, a)| a * Complex64::from_polar(norm, spec.wavenumber(pos) as f64 * w * t))
                    .sum()
            })
        }
        BasisKind::Cosine => par::map_slice(thetas, |&t| {
            entries
                .iter()
                .enumerate()
                .map(|(k, a)| a * cosine_fn(spec, k, t))
                .sum()
        }),
        BasisKind::Hermite => par::map_slice(thetas, |&t| {
            let psi = hermite_functions(spec.max_wavenumber, t);
            entries.iter().zip(&psi).map(|(a, p)| a * p).sum()
        }),
    };
    Ok(Reconstruction {
        max_imag: sums.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
        values: sums.iter().map(|z| z.re).collect(),
    })
}

/// Reconstruction on a uniform grid covering the domain, with the
/// integral of the reconstruction over that grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridReconstruction {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    pub mass: f64,
    pub max_imag: f64,
}

impl GridReconstruction {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the expansion on `points` uniform nodes.
///
/// Fourier: `lo + j L / points`, `j < points`, through one inverse FFT; the
/// mass is the periodic rectangle sum, exact for the retained modes. Cosine:
/// `points + 1` nodes including both ends, evaluated through the even
/// extension; the mass is the trapezoid sum, also exact. Hermite: direct
/// evaluation on `[-X, X]` with `X` past the outermost oscillation, mass by
/// trapezoid.
pub fn reconstruct_on_grid(coeffs: &CoefficientVector, points: usize) -> Result<GridReconstruction> {
    let spec = coeffs.spec();
    let points = points.max(spec.mode_count()).max(2);
    match spec.kind {
        BasisKind::Fourier => {
            let (lo, hi) = spec.domain.bounds().expect("bounded");
            let len = hi - lo;
            let w = 2.0 * PI / len;
            let norm = 1.0 / len.sqrt();
            let mut buf = vec![Complex64::new(0.0, 0.0); points];
            for (pos, a) in coeffs.entries().iter().enumerate() {
                let k = spec.wavenumber(pos);
                // several wavenumbers may share a slot only if points < N, excluded above
                buf[k.rem_euclid(points as i64) as usize] += a * Complex64::from_polar(norm, k as f64 * w * lo);
            }
            FftPlan::new(points)?.inverse_unnormalized(&mut buf)?;
            let h = len / points as f64;
            let values: Vec<f64> = buf.iter().map(|z| z.re).collect();
            Ok(GridReconstruction {
                thetas: (0..points).map(|j| lo + j as f64 * h).collect(),
                mass: values.iter().sum::<f64>() * h,
                max_imag: buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
                values,
            })
        }
        BasisKind::Cosine => {
            let (lo, hi) = spec.domain.bounds().expect("bounded");
            let extended = crate::spectral::cosine_to_even_fourier(coeffs)?;
            let full = reconstruct_on_grid(&extended, 2 * points)?;
            // extended grid starts at lo - L; slot `points` is lo
            let mut values: Vec<f64> = full.values[points..].to_vec();
            values.push(full.values[0]);
            let h = (hi - lo) / points as f64;
            let mass = trapezoid_uniform(&values, h);
            Ok(GridReconstruction {
                thetas: (0..=points).map(|j| lo + j as f64 * h).collect(),
                values,
                mass,
                max_imag: full.max_imag,
            })
        }
        BasisKind::Hermite => {
            let reach = (2.0 * spec.max_wavenumber as f64 + 1.0).sqrt() + 8.0;
            let h = 2.0 * reach / points as f64;
            let thetas: Vec<f64> = (0..=points).map(|j| -reach + j as f64 * h).collect();
            let r = reconstruct(coeffs, &thetas)?;
            Ok(GridReconstruction {
                mass: trapezoid_uniform(&r.values, h),
                thetas,
                values: r.values,
                max_imag: r.max_imag,
            })
        }
    }
}

fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryHint {
    Periodic,
    Neumann,
    Decaying,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisAdvice {
    pub kind: BasisKind,
    pub rationale: String,
    pub warning: Option<String>,
}

/// Picks the basis whose implicit boundary behaviour matches the problem.
pub fn advise_basis(domain: &Domain, hint: BoundaryHint) -> BasisAdvice {
    let advice = |kind, rationale: &str| BasisAdvice {
        kind,
        rationale: rationale.to_string(),
        warning: None,
    };
    match hint {
        BoundaryHint::Periodic => advice(
            BasisKind::Fourier,
            "periodic boundary: complex exponentials are the eigenfunctions, smooth periodic densities get exponentially decaying coefficients",
        ),
        BoundaryHint::Neumann => advice(
            BasisKind::Cosine,
            "bounded interval with zero-slope ends: the cosine series is the even extension and avoids the jump a periodic extension would create",
        ),
        BoundaryHint::Decaying => advice(
            BasisKind::Hermite,
            "density on the real line with Gaussian-like tails: Hermite functions carry the exp(-x^2/2) decay themselves",
        ),
        BoundaryHint::Unknown => {
            let mut a = advice(
                BasisKind::Fourier,
                "no boundary information; falling back to the Fourier basis",
            );
            let extra = match domain {
                Domain::Periodic { .. } => "",
                Domain::Interval { .. } => " on a bounded interval; a periodized non-periodic density shows Gibbs oscillation at the ends, consider the cosine basis",
                Domain::RealLine => " on the real line; the density must be truncated to a finite window first, consider the Hermite basis",
            };
            a.warning = Some(format!("basis chosen without boundary information{extra}"));
            a
        }
    }
}
