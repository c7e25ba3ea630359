//! Suitability diagnostics: how fast coefficients decay, how much energy the
//! truncation drops, and how many modes a density needs.
//!
//! Analytic densities have exponentially decaying coefficients; densities
//! with a jump or a kink only decay algebraically (`|a_k| ~ k^-1` for a
//! jump). The fit looks at the upper envelope `max_{j >= k} |a_j|` so that
//! oscillating sequences such as `sin(k)/k` are judged by their decay and
//! not by their zeros.

use crate::basis::{self, BasisKind, BasisSpec};
use crate::error::{Error, Result};
use crate::spectral::CoefficientVector;

/// Magnitudes below this are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-14;

/// Fewest wavenumbers a decay fit is attempted on.
pub const MIN_FIT_POINTS: usize = 4;

/// Smallest `K` for which a fit is attempted.
pub const MIN_FIT_K: usize = 8;

/// A model must beat the other's residual by this factor to be chosen.
pub const MODEL_MARGIN: f64 = 0.9;

/// Coefficient of determination the winning model must reach; below it the
/// envelope is too irregular (noise, plateaus) to name a decay law.
pub const MIN_FIT_QUALITY: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    Exponential,
    Algebraic,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    pub class: DecayClass,
    /// Rate in `|a_k| ~ C exp(-gamma |k|)`.
    pub gamma: f64,
    /// Exponent in `|a_k| ~ C |k|^-alpha`.
    pub alpha: f64,
    /// Coefficient of determination of the exponential model, in `[0, 1]`.
    pub exp_fit_quality: f64,
    /// Coefficient of determination of the algebraic model, in `[0, 1]`.
    pub alg_fit_quality: f64,
    /// Estimated energy beyond the retained `K`: extrapolated from the
    /// chosen model, or the observed tail past `K/2` when undecided.
    pub tail_energy_at_k: f64,
    /// Wavenumber window the fit used, empty when no fit was possible.
    pub window: (usize, usize),
}

/// `sum_{kp < |k| <= K} |a_k|^2`: the part of the truncation error that is
/// visible inside the retained coefficients. The true tail also includes
/// everything beyond `K`, so this is a lower bound on `||f - f_kp||^2`.
pub fn tail_energy(coeffs: &CoefficientVector, kp: usize) -> Result<f64> {
    let k_max = coeffs.spec().max_wavenumber();
    if kp > k_max {
        return Err(Error::IndexOutOfRange {
            index: kp as i64,
            min: 0,
            max: k_max as i64,
        });
    }
    Ok(coeffs
        .iter_indexed()
        .filter(|(k, _)| k.unsigned_abs() as usize > kp)
        .map(|(_, z)| z.norm_sqr())
        .sum())
}

/// Per-wavenumber magnitude for `k = 0..=K`; Fourier pairs are combined as
/// `sqrt((|a_k|^2 + |a_-k|^2) / 2)`.
fn magnitudes(coeffs: &CoefficientVector) -> Vec<f64> {
    let spec = coeffs.spec();
    (0..=spec.max_wavenumber() as i64)
        .map(|k| match spec.kind() {
            BasisKind::Fourier => {
                let p = coeffs.get(k).unwrap_or_default().norm_sqr();
                let m = coeffs.get(-k).unwrap_or_default().norm_sqr();
                (0.5 * (p + m)).sqrt()
            }
            _ => coeffs.get(k).unwrap_or_default().norm(),
        })
        .collect()
}

struct LineFit {
    slope: f64,
    intercept: f64,
    rss: f64,
    r2: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy > 0.0 { (1.0 - rss / syy).clamp(0.0, 1.0) } else { 0.0 };
    LineFit {
        slope,
        intercept,
        rss,
        r2,
    }
}

/// Usable `(k, envelope)` pairs in `[lo, hi]`.
fn window_points(envelope: &[f64], lo: usize, hi: usize) -> Vec<(usize, f64)> {
    (lo.max(1)..=hi)
        .filter(|&k| envelope[k] >= NOISE_FLOOR)
        .map(|k| (k, envelope[k]))
        .collect()
}

/// Classifies coefficient decay by comparing log-linear fits of the
/// envelope against `k` (exponential) and against `ln k` (algebraic).
///
/// The fit window is `[K/4, K]`. When the coefficients reach the noise floor
/// before `K/4` the window shrinks to `[K'/4, K']`, with `K'` the last
/// wavenumber above the floor, so that fast-decaying analytic densities are
/// still judged on their visible decay.
pub fn fit_decay(coeffs: &CoefficientVector) -> DecayReport {
    let k_max = coeffs.spec().max_wavenumber();
    let mags = magnitudes(coeffs);
    let mut envelope = mags.clone();
    for k in (0..k_max).rev() {
        envelope[k] = envelope[k].max(envelope[k + 1]);
    }
    let fourier = coeffs.spec().kind() == BasisKind::Fourier;
    let undecided = |window| DecayReport {
        class: DecayClass::Undecided,
        gamma: 0.0,
        alpha: 0.0,
        exp_fit_quality: 0.0,
        alg_fit_quality: 0.0,
        tail_energy_at_k: tail_energy(coeffs, k_max / 2).unwrap_or(0.0),
        window,
    };
    if k_max < MIN_FIT_K {
        return undecided((0, 0));
    }

    let mut points = window_points(&envelope, k_max.div_ceil(4), k_max);
    if points.len() < MIN_FIT_POINTS {
        let last = (1..=k_max).rev().find(|&k| mags[k] >= NOISE_FLOOR);
        if let Some(k_eff) = last.filter(|&k| k >= MIN_FIT_K) {
            points = window_points(&envelope, k_eff.div_ceil(4), k_eff);
        }
    }
    if points.len() < MIN_FIT_POINTS {
        return undecided((0, 0));
    }

    let window = (points[0].0, points[points.len() - 1].0);
    let ks: Vec<f64> = points.iter().map(|&(k, _)| k as f64).collect();
    let log_ks: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, m)| m.ln()).collect();
    let exp_fit = fit_line(&ks, &ys);
    let alg_fit = fit_line(&log_ks, &ys);
    let gamma = (-exp_fit.slope).max(0.0);
    let alpha = -alg_fit.slope;

    let class = if exp_fit.rss < MODEL_MARGIN * alg_fit.rss && gamma > 0.0 && exp_fit.r2 >= MIN_FIT_QUALITY {
        DecayClass::Exponential
    } else if alg_fit.rss < MODEL_MARGIN * exp_fit.rss && alpha > 0.0 && alg_fit.r2 >= MIN_FIT_QUALITY {
        DecayClass::Algebraic
    } else {
        DecayClass::Undecided
    };

    let pair = if fourier { 2.0 } else { 1.0 };
    let next = (k_max + 1) as f64;
    let tail_energy_at_k = match class {
        DecayClass::Exponential => {
            let c = exp_fit.intercept.exp();
            let r = (-2.0 * gamma).exp();
            pair * c * c * (-2.0 * gamma * next).exp() / (1.0 - r)
        }
        DecayClass::Algebraic if alpha > 0.5 => {
            let c = alg_fit.intercept.exp();
            pair * c * c * (next - 0.5).powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0)
        }
        DecayClass::Algebraic => f64::INFINITY,
        DecayClass::Undecided => tail_energy(coeffs, k_max / 2).unwrap_or(0.0),
    };

    DecayReport {
        class,
        gamma,
        alpha,
        exp_fit_quality: exp_fit.r2,
        alg_fit_quality: alg_fit.r2,
        tail_energy_at_k,
        window,
    }
}

/// Smallest `K <= k_max` whose relative tail energy is at most `epsilon^2`,
/// measured on a reference projection at `2 k_max`. `None` if no such `K`.
pub fn recommend_k<F>(f: F, template: &BasisSpec, epsilon: f64, k_max: usize) -> Result<Option<usize>>
where
    F: Fn(f64) -> f64,
{
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let reference_spec = template.with_max_wavenumber(2 * k_max.max(1));
    let rule = basis::default_quadrature(&reference_spec)?;
    let reference = basis::project(&reference_spec, f, &rule)?;
    Ok(recommend_k_from(&reference, epsilon, k_max))
}

/// [`recommend_k`] on an existing high-resolution projection.
pub fn recommend_k_from(reference: &CoefficientVector, epsilon: f64, k_max: usize) -> Option<usize> {
    let k_ref = reference.spec().max_wavenumber();
    let mut per_k = vec![0.0; k_ref + 1];
    for (k, z) in reference.iter_indexed() {
        per_k[k.unsigned_abs() as usize] += z.norm_sqr();
    }
    let total: f64 = per_k.iter().sum();
    if total == 0.0 {
        return Some(0);
    }
    // tail[k] = energy strictly above k
    let mut tail = vec![0.0; k_ref + 1];
    for k in (0..k_ref).rev() {
        tail[k] = tail[k + 1] + per_k[k + 1];
    }
    let budget = epsilon * epsilon * total;
    (0..=k_max.min(k_ref)).find(|&k| tail[k] <= budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ideal,
    Usable,
    Challenging,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuitabilityVerdict {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Threshold on the algebraic exponent: at or below it the coefficients are
/// not absolutely summable and truncated expansions ring.
pub const ALPHA_CUT: f64 = 1.0;

/// Combines the prior and likelihood decay reports into a verdict.
pub fn suitability(prior: &DecayReport, likelihood: &DecayReport) -> SuitabilityVerdict {
    let mut reasons = Vec::new();
    let mut challenging = false;
    let mut all_exponential = true;
    for (name, r) in [("prior", prior), ("likelihood", likelihood)] {
        match r.class {
            DecayClass::Exponential => {}
            DecayClass::Algebraic if r.alpha > ALPHA_CUT => {
                all_exponential = false;
                reasons.push(format!(
                    "{name} coefficients decay algebraically (alpha = {:.2}); accuracy improves only polynomially with K",
                    r.alpha
                ));
            }
            DecayClass::Algebraic => {
                all_exponential = false;
                challenging = true;
                reasons.push(format!(
                    "{name} coefficients decay like k^-{:.2}: a discontinuity, expect Gibbs oscillation and negative density near it",
                    r.alpha
                ));
            }
            DecayClass::Undecided => {
                all_exponential = false;
                challenging = true;
                reasons.push(format!(
                    "{name} coefficients show no clear decay; the density may be too rough or too heavy-tailed for K = {}",
                    r.window.1
                ));
            }
        }
    }
    let verdict = if challenging {
        Verdict::Challenging
    } else if all_exponential {
        reasons.push("both inputs have exponentially decaying coefficients".into());
        Verdict::Ideal
    } else {
        Verdict::Usable
    };
    SuitabilityVerdict { verdict, reasons }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn from_magnitudes(k: usize, f: impl Fn(usize) -> f64) -> CoefficientVector {
        let spec = BasisSpec::fourier(k);
        let entries = spec
            .indices()
            .map(|i| Complex64::new(f(i.unsigned_abs() as usize), 0.0))
            .collect();
        CoefficientVector::new(spec, entries).unwrap()
    }

    fn report(class: DecayClass, alpha: f64) -> DecayReport {
        DecayReport {
            class,
            gamma: 1.0,
            alpha,
            exp_fit_quality: 1.0,
            alg_fit_quality: 1.0,
            tail_energy_at_k: 0.0,
            window: (4, 16),
        }
    }

    #[test]
    fn tail_energy_edges() {
        let single = CoefficientVector::impulse(BasisSpec::fourier(6), 3).unwrap();
        assert_eq!(tail_energy(&single, 3).unwrap(), 0.0);
        assert_eq!(tail_energy(&single, 6).unwrap(), 0.0);
        assert_eq!(tail_energy(&single, 2).unwrap(), 1.0);
        assert!(tail_energy(&single, 7).is_err());
    }

    #[test]
    fn tail_energy_geometric() {
        // |a_k| = 2^-|k|: sum over 10 < |k| <= 20 of 4^-|k| = 2 * (4^-11 - 4^-21) / (1 - 1/4)
        let v = from_magnitudes(20, |k| 0.5f64.powi(k as i32));
        let expect = 2.0 * (0.25f64.powi(11) - 0.25f64.powi(21)) / 0.75;
        assert!((tail_energy(&v, 10).unwrap() - expect).abs() < 1e-20);
    }

    #[test]
    fn single_mode_is_undecided() {
        let v = CoefficientVector::impulse(BasisSpec::fourier(32), 5).unwrap();
        assert_eq!(fit_decay(&v).class, DecayClass::Undecided);
        let small = from_magnitudes(4, |k| (-(k as f64)).exp());
        assert_eq!(fit_decay(&small).class, DecayClass::Undecided);
    }

    #[test]
    fn synthetic_rates_recovered() {
        let v = from_magnitudes(64, |k| 3.0 * (-0.7 * k as f64).exp());
        let r = fit_decay(&v);
        assert_eq!(r.class, DecayClass::Exponential);
        assert!((r.gamma - 0.7).abs() < 1e-10);

        let v = from_magnitudes(128, |k| if k == 0 { 1.0 } else { (k as f64).powf(-2.5) });
        let r = fit_decay(&v);
        assert_eq!(r.class, DecayClass::Algebraic);
        assert!((r.alpha - 2.5).abs() < 1e-10);
        assert!(r.tail_energy_at_k > 0.0);
    }

    #[test]
    fn fast_decay_uses_shrunken_window() {
        // reaches the floor near k = 16, well before K/4 = 32
        let v = from_magnitudes(128, |k| (-2.0 * k as f64).exp());
        let r = fit_decay(&v);
        assert_eq!(r.class, DecayClass::Exponential);
        assert!(r.window.1 < 32);
        assert!((r.gamma - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_magnitudes_undecided() {
        let v = from_magnitudes(32, |_| 0.1);
        assert_eq!(fit_decay(&v).class, DecayClass::Undecided);
    }

    #[test]
    fn recommend_band_limited() {
        let spec = BasisSpec::fourier(1);
        let f = |x: f64| 2.0 + x.cos() + 0.5 * (3.0 * x).sin() + 0.1 * (5.0 * x).cos();
        for eps in [1e-3, 1e-8, 1e-12] {
            assert_eq!(recommend_k(f, &spec, eps, 32).unwrap(), Some(5));
        }
        assert!(recommend_k(f, &spec, 0.0, 32).is_err());
    }

    #[test]
    fn suitability_rules() {
        let e = report(DecayClass::Exponential, 0.0);
        assert_eq!(suitability(&e, &e).verdict, Verdict::Ideal);
        let step = report(DecayClass::Algebraic, 1.0);
        let s = suitability(&step, &e);
        assert_eq!(s.verdict, Verdict::Challenging);
        assert!(s.reasons.iter().any(|r| r.contains("Gibbs")));
        let flat = report(DecayClass::Undecided, 0.0);
        assert_eq!(suitability(&e, &flat).verdict, Verdict::Challenging);
        let kink = report(DecayClass::Algebraic, 2.0);
        assert_eq!(suitability(&kink, &e).verdict, Verdict::Usable);
    }
}
