//! Coefficient-vector algebra and the spectral Bayesian update.
//!
//! The product of two expansions `p = sum a_k phi_k`, `L = sum b_k phi_k`
//! has coefficients `(a * b)_k / sqrt(L_dom)` in the Fourier basis, where
//! `L_dom` is the period; the integral of the product is `(a * b)_0`.
//! [`product_coefficients`] returns the scaled coefficients (so they are a
//! genuine expansion of `p L`), and the evidence is `sqrt(L_dom) c_0`.
//!
//! Two truncation modes exist. `Circular` wraps modes beyond `K` back into
//! the retained range (`N`-point circular convolution); `Padded` computes
//! the linear convolution and drops modes beyond `K`, which is exact for
//! the retained modes whenever the inputs are band-limited to `K`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::{self, BasisKind, BasisSpec, Domain};
use crate::error::{Error, Result};
use crate::fft::{self, FftPlan};
use crate::par;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative size of `Im(c_0)` beyond which a posterior is rejected.
const MAX_IMAG_EVIDENCE: f64 = 1e-8;

/// Tolerance on the unit mass of a normalized posterior.
pub const UNIT_MASS_TOL: f64 = 1e-8;

/// Coefficients of one function in one basis, stored from the lowest
/// retained wavenumber upward.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    spec: BasisSpec,
    entries: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(spec: BasisSpec, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != spec.mode_count() {
            return Err(Error::LengthMismatch {
                left: spec.mode_count(),
                right: entries.len(),
            });
        }
        for (pos, z) in entries.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::NonFinite {
                    x: spec.wavenumber(pos) as f64,
                    value: z.norm(),
                });
            }
        }
        Ok(CoefficientVector { spec, entries })
    }

    pub fn zeros(spec: BasisSpec) -> Self {
        CoefficientVector {
            spec,
            entries: vec![ZERO; spec.mode_count()],
        }
    }

    /// Unit coefficient at wavenumber `k`, zero elsewhere.
    pub fn impulse(spec: BasisSpec, k: i64) -> Result<Self> {
        let pos = spec.position(k).ok_or(Error::IndexOutOfRange {
            index: k,
            min: spec.min_index(),
            max: spec.max_index(),
        })?;
        let mut v = CoefficientVector::zeros(spec);
        v.entries[pos] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// The uniform density on a bounded domain.
    pub fn uniform(spec: BasisSpec) -> Result<Self> {
        let factor = spec.mass_factor().ok_or(Error::Unsupported {
            op: "uniform density",
            kind: spec.kind(),
        })?;
        let mut v = CoefficientVector::zeros(spec);
        // 1/L = (1/sqrt(L)) phi_0
        v.entries[spec.position(0).expect("k = 0 retained")] = Complex64::new(1.0 / factor, 0.0);
        Ok(v)
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        self.spec.position(k).map(|p| self.entries[p])
    }

    /// `(k, a_k)` pairs in storage order.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .map(|(p, &z)| (self.spec.wavenumber(p), z))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CoefficientVector {
            spec: self.spec,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Integral of the represented function over the domain.
    pub fn mass(&self) -> Result<f64> {
        evidence(self)
    }

    /// Same function re-expressed with a different truncation; new modes are
    /// zero, dropped modes are discarded.
    pub fn resized(&self, max_wavenumber: usize) -> Self {
        let spec = self.spec.with_max_wavenumber(max_wavenumber);
        let entries = spec
            .indices()
            .map(|k| self.get(k).unwrap_or(ZERO))
            .collect();
        CoefficientVector { spec, entries }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Wrap-around convolution on the `N` retained modes.
    Circular,
    /// Zero-padded linear convolution truncated back to `-K..=K`.
    #[default]
    Padded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// `O(N^2)` reference summation.
    Direct,
    /// Convolution theorem, `O(N log N)`.
    #[default]
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UpdateOptions {
    pub mode: Mode,
    pub engine: Engine,
    /// Also run the other mode and report the largest coefficient
    /// difference as `aliasing_estimate`.
    pub check_aliasing: bool,
}

impl UpdateOptions {
    pub fn new(mode: Mode, engine: Engine) -> Self {
        UpdateOptions {
            mode,
            engine,
            check_aliasing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateResult {
    /// Normalized posterior coefficients.
    pub posterior: CoefficientVector,
    /// `int prior * likelihood`.
    pub evidence: f64,
    /// Zeroth coefficient of the unnormalized product.
    pub raw_c0: Complex64,
    /// Smallest value of the posterior reconstruction on the probe grid;
    /// negative values signal Gibbs undershoot and are not clipped.
    pub min_density: f64,
    /// `max_k |c_padded - c_circular|`, when requested.
    pub aliasing_estimate: Option<f64>,
}

fn check_pair(a: &CoefficientVector, b: &CoefficientVector) -> Result<()> {
    if a.spec != b.spec {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

fn require_fourier(spec: &BasisSpec, op: &'static str) -> Result<()> {
    if spec.kind() != BasisKind::Fourier {
        return Err(Error::Unsupported { op, kind: spec.kind() });
    }
    Ok(())
}

/// Circular convolution of centered sequences by direct summation.
pub(crate) fn circular_direct(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let sa = fft::center_to_standard(a);
    let sb = fft::center_to_standard(b);
    let standard = par::map_range(n, |s| {
        let mut acc = ZERO;
        for j in 0..=s {
            acc += sa[j] * sb[s - j];
        }
        for j in s + 1..n {
            acc += sa[j] * sb[s + n - j];
        }
        acc
    });
    fft::standard_to_center(&standard)
}

/// Full linear convolution of centered sequences, indices `-2K..=2K`.
pub(crate) fn linear_direct(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    par::map_range(2 * n - 1, |t| linear_term(a, b, t))
}

fn linear_term(a: &[Complex64], b: &[Complex64], t: usize) -> Complex64 {
    let n = a.len();
    let lo = (t + 1).saturating_sub(n);
    let hi = t.min(n - 1);
    let mut acc = ZERO;
    for i in lo..=hi {
        acc += a[i] * b[t - i];
    }
    acc
}

/// Linear convolution truncated to the centered range `-K..=K`.
fn padded_direct(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let k = n / 2;
    par::map_range(n, |i| linear_term(a, b, i + k))
}

fn circular_fft(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let out = fft::fast_circular_convolve(&fft::center_to_standard(a), &fft::center_to_standard(b))?;
    Ok(fft::standard_to_center(&out))
}

fn padded_fft(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let k = (n / 2) as i64;
    let p = (2 * n - 1).next_power_of_two();
    let place = |v: &[Complex64]| {
        let mut buf = vec![ZERO; p];
        for (i, &z) in v.iter().enumerate() {
            buf[(i as i64 - k).rem_euclid(p as i64) as usize] = z;
        }
        buf
    };
    let plan = FftPlan::new(p)?;
    let full = fft::circular_convolve_with(&plan, &place(a), &place(b))?;
    Ok((-k..=k)
        .map(|m| full[m.rem_euclid(p as i64) as usize])
        .collect())
}

/// Unscaled convolution of centered sequences in the requested mode.
pub fn convolve(a: &[Complex64], b: &[Complex64], mode: Mode, engine: Engine) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    match (mode, engine) {
        (Mode::Circular, Engine::Direct) => Ok(circular_direct(a, b)),
        (Mode::Circular, Engine::Fft) => circular_fft(a, b),
        (Mode::Padded, Engine::Direct) => Ok(padded_direct(a, b)),
        (Mode::Padded, Engine::Fft) => padded_fft(a, b),
    }
}

/// `c_k = sum_m a_m b_<k - m>`, with `<n>` wrapping into `-K..=K`.
/// Reference `O(N^2)` implementation; Fourier only.
pub fn circular_convolve_direct(a: &CoefficientVector, b: &CoefficientVector) -> Result<CoefficientVector> {
    check_pair(a, b)?;
    require_fourier(&a.spec, "circular convolution")?;
    CoefficientVector::new(a.spec, circular_direct(&a.entries, &b.entries))
}

/// Full linear convolution, indices `-2K..=2K`; Fourier only.
pub fn linear_convolve_direct(a: &CoefficientVector, b: &CoefficientVector) -> Result<Vec<Complex64>> {
    check_pair(a, b)?;
    require_fourier(&a.spec, "linear convolution")?;
    Ok(linear_direct(&a.entries, &b.entries))
}

/// Cosine coefficients on `[lo, lo + L]` as Fourier coefficients of the even
/// extension on the periodic domain `[lo - L, lo + L)`.
pub fn cosine_to_even_fourier(coeffs: &CoefficientVector) -> Result<CoefficientVector> {
    let spec = coeffs.spec();
    if spec.kind() != BasisKind::Cosine {
        return Err(Error::Unsupported {
            op: "even extension",
            kind: spec.kind(),
        });
    }
    let (lo, hi) = spec.domain().bounds().expect("bounded");
    let len = hi - lo;
    let k_max = spec.max_wavenumber();
    let ext = BasisSpec::new(BasisKind::Fourier, Domain::periodic(lo - len, hi)?, k_max)?;
    let mut out = vec![ZERO; ext.mode_count()];
    let a = coeffs.entries();
    out[k_max] = a[0] * 2f64.sqrt();
    for k in 1..=k_max {
        let phase = Complex64::from_polar(1.0, PI * k as f64 * lo / len);
        out[k_max + k] = a[k] * phase.conj();
        out[k_max - k] = a[k] * phase;
    }
    CoefficientVector::new(ext, out)
}

/// Inverse of [`cosine_to_even_fourier`] for an even extension; averages the
/// `+k` and `-k` readings.
fn even_fourier_to_cosine(ext: &CoefficientVector, target: BasisSpec) -> Result<CoefficientVector> {
    let (lo, hi) = target.domain().bounds().expect("bounded");
    let len = hi - lo;
    let k_max = target.max_wavenumber();
    let f = ext.entries();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(f[k_max] / 2f64.sqrt());
    for k in 1..=k_max {
        let phase = Complex64::from_polar(1.0, PI * k as f64 * lo / len);
        out.push(0.5 * (f[k_max + k] * phase + f[k_max - k] * phase.conj()));
    }
    CoefficientVector::new(target, out)
}

/// Coefficients of the pointwise product of the two represented functions,
/// truncated to the shared basis.
pub fn product_coefficients(
    a: &CoefficientVector,
    b: &CoefficientVector,
    mode: Mode,
    engine: Engine,
) -> Result<CoefficientVector> {
    check_pair(a, b)?;
    let spec = a.spec;
    match spec.kind() {
        BasisKind::Fourier => {
            let scale = 1.0 / spec.mass_factor().expect("bounded");
            let raw = convolve(&a.entries, &b.entries, mode, engine)?;
            CoefficientVector::new(spec, raw.into_iter().map(|z| z * scale).collect())
        }
        BasisKind::Cosine => {
            let ea = cosine_to_even_fourier(a)?;
            let eb = cosine_to_even_fourier(b)?;
            let prod = product_coefficients(&ea, &eb, mode, engine)?;
            even_fourier_to_cosine(&prod, spec)
        }
        BasisKind::Hermite => Err(Error::Unsupported {
            op: "Bayesian update",
            kind: BasisKind::Hermite,
        }),
    }
}

/// Integral of the function whose coefficients are `raw`:
/// `sqrt(L) Re(c_0)` for Fourier and cosine bases.
pub fn evidence(raw: &CoefficientVector) -> Result<f64> {
    let factor = raw.spec.mass_factor().ok_or(Error::Unsupported {
        op: "evidence",
        kind: raw.spec.kind(),
    })?;
    Ok(factor * raw.get(0).expect("k = 0 retained").re)
}

/// `sqrt(sum |a_k|^2)`, the L2 norm of the represented function.
pub fn l2_norm(coeffs: &CoefficientVector) -> f64 {
    coeffs.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes the product of `prior` and `likelihood` into a posterior.
pub fn bayes_update(
    prior: &CoefficientVector,
    likelihood: &CoefficientVector,
    opts: UpdateOptions,
) -> Result<UpdateResult> {
    let raw = product_coefficients(prior, likelihood, opts.mode, opts.engine)?;
    let c0 = raw.get(0).expect("k = 0 retained");
    let z = evidence(&raw)?;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::InvalidPosterior(format!(
            "evidence {z:e} is not positive; the prior and likelihood do not overlap or undershoot badly"
        )));
    }
    if c0.im.abs() > MAX_IMAG_EVIDENCE * c0.norm() {
        return Err(Error::InvalidPosterior(format!(
            "zeroth coefficient {c0} is not real; inputs are not real densities"
        )));
    }
    let posterior = raw.scaled(1.0 / z);
    let probe = basis::reconstruct_on_grid(&posterior, probe_points(&posterior.spec))?;
    if (probe.mass - 1.0).abs() > UNIT_MASS_TOL {
        return Err(Error::InvalidPosterior(format!(
            "posterior mass {} after normalization",
            probe.mass
        )));
    }
    let aliasing_estimate = if opts.check_aliasing {
        let other = match opts.mode {
            Mode::Circular => Mode::Padded,
            Mode::Padded => Mode::Circular,
        };
        let alt = product_coefficients(prior, likelihood, other, opts.engine)?.scaled(1.0 / z);
        Some(max_abs_diff(&posterior, &alt))
    } else {
        None
    };
    Ok(UpdateResult {
        min_density: probe.min_value(),
        posterior,
        evidence: z,
        raw_c0: c0,
        aliasing_estimate,
    })
}

/// Probe-grid size used for posterior checks: a power of two with at least
/// four points per retained mode.
pub fn probe_points(spec: &BasisSpec) -> usize {
    (4 * spec.mode_count()).next_power_of_two().max(256)
}

/// Largest coefficient-wise difference of two vectors in the same basis.
pub fn max_abs_diff(a: &CoefficientVector, b: &CoefficientVector) -> f64 {
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Mass, mean and variance of the represented function over its domain,
/// from closed-form integrals of `x phi_k` and `x^2 phi_k`.
pub fn moments(coeffs: &CoefficientVector) -> Result<Moments> {
    let spec = coeffs.spec;
    let (lo, hi) = spec.domain().bounds().ok_or(Error::Unsupported {
        op: "moments",
        kind: spec.kind(),
    })?;
    let len = hi - lo;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    match spec.kind() {
        BasisKind::Fourier => {
            let norm = 1.0 / len.sqrt();
            let w = 2.0 * PI / len;
            for (k, a) in coeffs.iter_indexed() {
                let (i0, i1, i2) = if k == 0 {
                    (
                        Complex64::new(len, 0.0),
                        Complex64::new(0.5 * (hi * hi - lo * lo), 0.0),
                        Complex64::new((hi.powi(3) - lo.powi(3)) / 3.0, 0.0),
                    )
                } else {
                    // exp(i k w hi) == exp(i k w lo) since k w L = 2 pi k
                    let e = Complex64::from_polar(1.0, k as f64 * w * lo);
                    let ikw = Complex64::new(0.0, k as f64 * w);
                    let i1 = e * len / ikw;
                    let i2 = e * (hi * hi - lo * lo) / ikw - 2.0 * i1 / ikw;
                    (ZERO, i1, i2)
                };
                m0 += (a * i0).re * norm;
                m1 += (a * i1).re * norm;
                m2 += (a * i2).re * norm;
            }
        }
        BasisKind::Cosine => {
            let a = coeffs.entries();
            let c0 = a[0].re / len.sqrt();
            m0 += c0 * len;
            m1 += c0 * 0.5 * (hi * hi - lo * lo);
            m2 += c0 * (hi.powi(3) - lo.powi(3)) / 3.0;
            let norm = (2.0 / len).sqrt();
            for (k, ak) in a.iter().enumerate().skip(1) {
                // u = x - lo on [0, L]: int u cos = (cos(pi k) - 1)/q^2,
                // int u^2 cos = 2 L cos(pi k)/q^2 with q = pi k / L
                let q = PI * k as f64 / len;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let j1 = (sign - 1.0) / (q * q);
                let j2 = 2.0 * len * sign / (q * q);
                let x1 = j1;
                let x2 = j2 + 2.0 * lo * j1;
                m1 += norm * ak.re * x1;
                m2 += norm * ak.re * x2;
            }
        }
        BasisKind::Hermite => unreachable!("unbounded domain handled above"),
    }
    let mean = m1 / m0;
    Ok(Moments {
        mass: m0,
        mean,
        variance: m2 / m0 - mean * mean,
    })
}
