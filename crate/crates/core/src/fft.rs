//! Arbitrary-length DFT and FFT-based circular convolution.
//!
//! Conventions, fixed across the crate:
//!
//! * forward: `X_k = sum_n x_n exp(-2 pi i k n / N)`, unnormalized;
//! * inverse: `x_n = (1/N) sum_k X_k exp(+2 pi i k n / N)`.
//!
//! Power-of-two lengths use an iterative radix-2 kernel. Every other length
//! goes through Bluestein's chirp-z reformulation on top of that kernel, so
//! odd coefficient counts `N = 2K + 1` still cost `O(N log N)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// DFT output in standard `0..N` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<Complex64>);

impl Spectrum {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = entries.iter().find(|z| !z.is_finite()) {
            return Err(Error::NonFinite {
                x: f64::NAN,
                value: bad.norm(),
            });
        }
        Ok(Spectrum(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    log2: u32,
    // exp(-2 pi i j / len) for j < len / 2
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|j| {
                let (s, c) = (-2.0 * PI * j as f64 / len as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        Radix2 {
            len,
            log2: len.trailing_zeros(),
            twiddles,
        }
    }

    /// In-place unnormalized transform; `inverse` flips the exponent sign.
    fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        if n <= 1 {
            return;
        }
        let shift = usize::BITS - self.log2;
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for j in 0..half {
                    let mut w = self.twiddles[j * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let u = buf[start + j];
                    let v = buf[start + j + half] * w;
                    buf[start + j] = u + v;
                    buf[start + j + half] = u - v;
                }
            }
            half *= 2;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    len: usize,
    inner: Radix2,
    // exp(-i pi k^2 / len)
    chirp: Vec<Complex64>,
    // forward transform of the conjugate chirp, pre-scaled by 1 / inner.len
    filter: Vec<Complex64>,
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let m = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(m);
        let two_n = 2 * len as u128;
        let chirp: Vec<Complex64> = (0..len)
            .map(|k| {
                // k^2 mod 2N keeps the angle small and exact
                let r = ((k as u128 * k as u128) % two_n) as f64;
                let (s, c) = (-PI * r / len as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let mut filter = vec![Complex64::new(0.0, 0.0); m];
        filter[0] = chirp[0].conj();
        for k in 1..len {
            let w = chirp[k].conj();
            filter[k] = w;
            filter[m - k] = w;
        }
        inner.process(&mut filter, false);
        let scale = 1.0 / m as f64;
        for z in &mut filter {
            *z *= scale;
        }
        Bluestein {
            len,
            inner,
            chirp,
            filter,
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let m = self.inner.len;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for ((w, x), c) in work.iter_mut().zip(buf.iter()).zip(&self.chirp) {
            *w = x * c;
        }
        self.inner.process(&mut work, false);
        for (w, f) in work.iter_mut().zip(&self.filter) {
            *w *= f;
        }
        self.inner.process(&mut work, true);
        for ((out, w), c) in buf.iter_mut().zip(&work).zip(&self.chirp) {
            *out = w * c;
        }
        debug_assert_eq!(buf.len(), self.len);
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Radix2(Radix2),
    Bluestein(Box<Bluestein>),
}

/// Precomputed transform of a fixed length. Immutable once built, so a plan
/// can be shared across threads.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    kernel: Kernel,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyInput);
        }
        let kernel = if len.is_power_of_two() {
            Kernel::Radix2(Radix2::new(len))
        } else {
            Kernel::Bluestein(Box::new(Bluestein::new(len)))
        };
        Ok(FftPlan { len, kernel })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        match &self.kernel {
            Kernel::Radix2(r) => r.process(buf, false),
            Kernel::Bluestein(b) => b.forward(buf),
        }
        Ok(())
    }

    /// Inverse transform in place, including the `1/N` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) -> Result<()> {
        self.inverse_unnormalized(buf)?;
        let scale = 1.0 / self.len as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
        Ok(())
    }

    /// `sum_k X_k exp(+2 pi i k n / N)` with no `1/N`; this is what
    /// evaluating a trigonometric series on a uniform grid needs.
    pub fn inverse_unnormalized(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check_len(buf.len())?;
        match &self.kernel {
            Kernel::Radix2(r) => r.process(buf, true),
            Kernel::Bluestein(b) => {
                for z in buf.iter_mut() {
                    *z = z.conj();
                }
                b.forward(buf);
                for z in buf.iter_mut() {
                    *z = z.conj();
                }
            }
        }
        Ok(())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: got,
            });
        }
        Ok(())
    }
}

/// Forward DFT of `x` (any length >= 1).
pub fn dft(x: &[Complex64]) -> Result<Spectrum> {
    let plan = FftPlan::new(x.len())?;
    let mut buf = x.to_vec();
    plan.forward(&mut buf)?;
    Spectrum::new(buf)
}

/// Inverse DFT with the `1/N` normalization.
pub fn idft(spectrum: &Spectrum) -> Result<Vec<Complex64>> {
    let plan = FftPlan::new(spectrum.len())?;
    let mut buf = spectrum.as_slice().to_vec();
    plan.inverse(&mut buf)?;
    Ok(buf)
}

/// Circular convolution `c_n = sum_m a_m b_{(n - m) mod N}` via
/// `idft(dft(a) * dft(b))`. Both inputs use standard `0..N` ordering.
pub fn fast_circular_convolve(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let plan = FftPlan::new(a.len())?;
    circular_convolve_with(&plan, a, b)
}

/// Same as [`fast_circular_convolve`] with a caller-held plan.
pub fn circular_convolve_with(
    plan: &FftPlan,
    a: &[Complex64],
    b: &[Complex64],
) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    plan.forward(&mut fa)?;
    plan.forward(&mut fb)?;
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    plan.inverse(&mut fa)?;
    Ok(fa)
}

/// Reorders centered coefficients `(c_{-K}, .., c_K)` so that wavenumber
/// `k` lands at slot `(k + N) mod N`.
pub fn center_to_standard(centered: &[Complex64]) -> Vec<Complex64> {
    let n = centered.len();
    let k = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, &z) in centered.iter().enumerate() {
        let wavenumber = i as i64 - k as i64;
        out[wavenumber.rem_euclid(n as i64) as usize] = z;
    }
    out
}

/// Inverse of [`center_to_standard`].
pub fn standard_to_center(standard: &[Complex64]) -> Vec<Complex64> {
    let n = standard.len();
    let k = n / 2;
    (0..n)
        .map(|i| {
            let wavenumber = i as i64 - k as i64;
            standard[wavenumber.rem_euclid(n as i64) as usize]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let r = ((k * j) % n) as f64;
                        v * Complex64::from_polar(1.0, -2.0 * PI * r / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            / scale
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        (0..n).map(|_| Complex64::new(next(), next())).collect()
    }

    #[test]
    fn impulse_and_constant() {
        let x = dft(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert!(max_rel(x.as_slice(), &[c(1.0); 4]) < 1e-15);
        let x = dft(&[c(1.0); 4]).unwrap();
        assert!(max_rel(x.as_slice(), &[c(4.0), c(0.0), c(0.0), c(0.0)]) < 1e-15);
    }

    #[test]
    fn idft_examples() {
        let s = Spectrum::new(vec![c(4.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert!(max_rel(&idft(&s).unwrap(), &[c(1.0); 4]) < 1e-15);
        let s = Spectrum::new(vec![c(1.0); 4]).unwrap();
        assert!(max_rel(&idft(&s).unwrap(), &[c(1.0), c(0.0), c(0.0), c(0.0)]) < 1e-15);
    }

    #[test]
    fn matches_naive_dft_for_many_lengths() {
        for n in [1, 2, 3, 5, 7, 8, 12, 17, 31, 64, 100, 257] {
            let x = pseudo_random(n, n as u64);
            let fast = dft(&x).unwrap();
            assert!(max_rel(fast.as_slice(), &naive_dft(&x)) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn round_trip_length_seven() {
        let x = pseudo_random(7, 99);
        let back = idft(&dft(&x).unwrap()).unwrap();
        assert!(max_rel(&back, &x) < 1e-12);
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(dft(&[]).unwrap_err(), Error::EmptyInput);
        assert!(Spectrum::new(vec![]).is_err());
        assert!(FftPlan::new(0).is_err());
    }

    #[test]
    fn convolve_small_example() {
        // brute force: c_n = sum_m a_m b_{(n-m) mod 3}
        // c_0 = 1*4 + 2*6 + 3*5 = 31, c_1 = 1*5 + 2*4 + 3*6 = 31, c_2 = 1*6 + 2*5 + 3*4 = 28
        let a = [c(1.0), c(2.0), c(3.0)];
        let b = [c(4.0), c(5.0), c(6.0)];
        let out = fast_circular_convolve(&a, &b).unwrap();
        assert!(max_rel(&out, &[c(31.0), c(31.0), c(28.0)]) < 1e-14);
    }

    #[test]
    fn convolve_with_impulse_is_identity() {
        let a = pseudo_random(11, 3);
        let mut imp = vec![c(0.0); 11];
        imp[0] = c(1.0);
        assert!(max_rel(&fast_circular_convolve(&a, &imp).unwrap(), &a) < 1e-14);
    }

    #[test]
    fn convolve_length_mismatch() {
        let err = fast_circular_convolve(&[c(1.0)], &[c(1.0), c(2.0)]).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn centered_reordering() {
        let a = [c(-1.0), c(0.0), c(1.0)];
        assert_eq!(center_to_standard(&a), vec![c(0.0), c(1.0), c(-1.0)]);
        let x = pseudo_random(9, 5);
        assert_eq!(standard_to_center(&center_to_standard(&x)), x);
    }

    #[test]
    fn plan_rejects_wrong_length() {
        let plan = FftPlan::new(8).unwrap();
        let mut buf = vec![c(0.0); 7];
        assert!(plan.forward(&mut buf).is_err());
    }
}
