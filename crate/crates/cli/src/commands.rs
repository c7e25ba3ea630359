use std::fs;
use std::io::{self, Write};
use std::path::Path;

use spectral_bayes::basis::{self, default_quadrature, quadrature_for};
use spectral_bayes::diagnostics::{fit_decay, recommend_k_from, suitability, tail_energy, DecayClass, DecayReport};
use spectral_bayes::oracles::trapezoid;
use spectral_bayes::sequential::FilterState;
use spectral_bayes::spectral::moments;
use spectral_bayes::{bayes_update, BasisKind, BasisSpec, CoefficientVector, Domain, UpdateOptions};

use crate::error::CliError;
use crate::family::{parse_family, parse_list};
use crate::file;
use crate::{BasisArg, DiagnoseArgs, ProjectArgs, ReconstructArgs, SequentialArgs, UpdateArgs, UpdateFlags};

/// Grid size of the independent evidence check in `update --check`.
const ORACLE_POINTS: usize = 100_000;

/// Relative level below which a negative reconstruction value is rounding.
const NEGATIVE_NOISE: f64 = 1e-12;

/// Human-readable lines go to stdout when the data has its own file and to
/// stderr when the data itself is on stdout.
pub(crate) fn summary_sink(data_to_file: bool) -> Box<dyn Write> {
    if data_to_file {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    }
}

pub(crate) fn emit_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(CliError::from),
    }
}

fn emit_coefficients(out: Option<&Path>, c: &CoefficientVector) -> Result<(), CliError> {
    match out {
        Some(path) => file::write(path, c),
        None => emit_text(None, &file::render(c)?),
    }
}

fn line(sink: &mut dyn Write, text: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(sink, "{}", text.as_ref()).map_err(CliError::from)
}

/// Fixed-point with ten decimals and no negative zero, so engines that
/// differ only in rounding print the same text.
fn fixed(v: f64) -> String {
    let s = format!("{v:.10}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn basis_spec(kind: BasisArg, domain: Option<&str>, k: usize) -> Result<BasisSpec, CliError> {
    let bounds = domain.map(|d| parse_list(d, 2)).transpose()?;
    let spec = match (kind, bounds) {
        (BasisArg::Fourier, None) => BasisSpec::fourier(k),
        (BasisArg::Fourier, Some(b)) => BasisSpec::new(BasisKind::Fourier, Domain::periodic(b[0], b[1])?, k)?,
        (BasisArg::Cosine, Some(b)) => BasisSpec::cosine(b[0], b[1], k)?,
        (BasisArg::Cosine, None) => return Err(CliError::Contract("the cosine basis needs --domain LO,HI".into())),
        (BasisArg::Hermite, None) => BasisSpec::hermite(k),
        (BasisArg::Hermite, Some(b)) => BasisSpec::new(BasisKind::Hermite, Domain::interval(b[0], b[1])?, k)?,
    };
    Ok(spec)
}

fn describe(spec: &BasisSpec) -> String {
    format!("basis: {} K={} N={} domain {}", spec.kind(), spec.max_wavenumber(), spec.mode_count(), spec.domain())
}

fn decay_lines(r: &DecayReport) -> Vec<String> {
    let mut lines = vec![match r.class {
        DecayClass::Exponential => format!("decay: Exponential gamma={:.6} (R^2 {:.4})", r.gamma, r.exp_fit_quality),
        DecayClass::Algebraic => format!("decay: Algebraic alpha={:.6} (R^2 {:.4})", r.alpha, r.alg_fit_quality),
        DecayClass::Undecided => "decay: Undecided".to_string(),
    }];
    lines.push(format!("fit_window: {}..={}", r.window.0, r.window.1));
    lines.push(format!("tail_energy_beyond_K_estimate: {:.6e}", r.tail_energy_at_k));
    if r.class == DecayClass::Algebraic {
        lines.push(format!(
            "warning: algebraic decay (alpha = {:.2}); expect Gibbs oscillation near discontinuities and slow convergence in K",
            r.alpha
        ));
    }
    lines
}

pub fn project(a: &ProjectArgs) -> Result<(), CliError> {
    let density = parse_family(&a.family)?;
    let spec = basis_spec(a.basis, a.domain.as_deref(), a.k)?;
    let truncated = density.truncated(&spec.domain())?;
    let rule = match a.m {
        Some(m) => quadrature_for(&spec, m)?,
        None => default_quadrature(&spec)?,
    };
    let coeffs = basis::project(&spec, |x| truncated.eval(x), &rule)?;
    emit_coefficients(a.out.as_deref(), &coeffs)?;

    let mut sink = summary_sink(a.out.is_some());
    line(&mut *sink, describe(&spec))?;
    line(&mut *sink, format!("quadrature: M={} ({})", rule.len(), rule.exactness_note()))?;
    line(&mut *sink, format!("truncation_deficit: {:.6e}", truncated.deficit()))?;
    line(&mut *sink, format!("tail_energy_half_K: {:.6e}", tail_energy(&coeffs, spec.max_wavenumber() / 2)?))?;
    for l in decay_lines(&fit_decay(&coeffs)) {
        line(&mut *sink, l)?;
    }
    if let Some(eps) = a.epsilon {
        let k = spectral_bayes::diagnostics::recommend_k(|x| truncated.eval(x), &spec, eps, spec.max_wavenumber())?;
        line(&mut *sink, recommendation(k, eps, spec.max_wavenumber()))?;
    }
    Ok(())
}

fn recommendation(k: Option<usize>, eps: f64, k_max: usize) -> String {
    match k {
        Some(k) => format!("recommended_K: {k} (epsilon {eps:e})"),
        None => format!("recommended_K: none up to {k_max} (epsilon {eps:e})"),
    }
}

fn options(flags: &UpdateFlags, check: bool) -> UpdateOptions {
    UpdateOptions {
        mode: flags.mode.into(),
        engine: flags.engine.into(),
        check_aliasing: check,
    }
}

fn require_same_basis(a: &CoefficientVector, b: &CoefficientVector, name: &Path) -> Result<(), CliError> {
    if a.spec() != b.spec() {
        return Err(CliError::Contract(format!(
            "{} does not share the prior's basis ({} vs {})",
            name.display(),
            describe(b.spec()),
            describe(a.spec())
        )));
    }
    Ok(())
}

/// Trapezoid evidence of the two reconstructions on a fine uniform grid.
fn oracle_evidence(prior: &CoefficientVector, like: &CoefficientVector) -> Result<f64, CliError> {
    let (lo, hi) = prior.spec().domain().bounds().ok_or(CliError::Contract("no bounded domain".into()))?;
    let h = (hi - lo) / (ORACLE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..ORACLE_POINTS).map(|j| lo + j as f64 * h).collect();
    let p = basis::reconstruct(prior, &grid)?.values;
    let l = basis::reconstruct(like, &grid)?.values;
    let product: Vec<f64> = p.iter().zip(&l).map(|(x, y)| x * y).collect();
    Ok(trapezoid(&product, h))
}

pub fn update(a: &UpdateArgs) -> Result<(), CliError> {
    let prior = file::read(&a.prior)?;
    let like = file::read(&a.likelihood)?;
    require_same_basis(&prior, &like, &a.likelihood)?;
    let result = bayes_update(&prior, &like, options(&a.flags, a.check))?;
    emit_coefficients(a.out.as_deref(), &result.posterior)?;

    let mut sink = summary_sink(a.out.is_some());
    line(&mut *sink, format!("evidence: {:.10e}", result.evidence))?;
    line(&mut *sink, format!("log_evidence: {:.10e}", result.evidence.ln()))?;
    let min_text = fixed(result.min_density);
    line(&mut *sink, format!("min_density: {min_text}"))?;
    if min_text.starts_with('-') {
        line(&mut *sink, "warning: the posterior reconstruction dips below zero (Gibbs undershoot)")?;
    }
    if let Some(alias) = result.aliasing_estimate {
        line(&mut *sink, format!("aliasing_estimate: {alias:.3e}"))?;
        let oracle = oracle_evidence(&prior, &like)?;
        line(&mut *sink, format!("oracle_evidence: {oracle:.10e}"))?;
        line(&mut *sink, format!("oracle_relative_difference: {:.3e}", (result.evidence - oracle).abs() / oracle.abs()))?;
    }
    Ok(())
}

pub fn sequential(a: &SequentialArgs) -> Result<(), CliError> {
    let prior = file::read(&a.prior)?;
    let likelihoods = a
        .likelihoods
        .iter()
        .map(|p| {
            let l = file::read(p)?;
            require_same_basis(&prior, &l, p)?;
            Ok(l)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let opts = options(&a.flags, false);

    let mut state = FilterState::init(&prior)?;
    let mut csv = String::from("step,evidence,log_evidence_sum,mean,variance\n");
    let m = moments(state.current())?;
    csv.push_str(&format!("0,,0,{},{}\n", m.mean, m.variance));
    for like in &likelihoods {
        state = state.step(like, opts)?;
        let m = moments(state.current())?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            state.step_count(),
            state.last_evidence().expect("stepped"),
            state.log_evidence_sum(),
            m.mean,
            m.variance
        ));
    }
    emit_text(a.csv.as_deref(), &csv)?;
    if let Some(out) = &a.out {
        let posterior = if likelihoods.is_empty() { &prior } else { state.current() };
        file::write(out, posterior)?;
    }
    Ok(())
}

pub fn diagnose(a: &DiagnoseArgs) -> Result<(), CliError> {
    let coeffs = file::read(&a.file)?;
    let spec = *coeffs.spec();
    let report = fit_decay(&coeffs);
    let like_report = match &a.likelihood {
        Some(p) => {
            let l = file::read(p)?;
            require_same_basis(&coeffs, &l, p)?;
            Some(fit_decay(&l))
        }
        None => None,
    };
    let mut out = io::stdout();
    line(&mut out, describe(&spec))?;
    line(&mut out, format!("tail_energy_half_K: {:.6e}", tail_energy(&coeffs, spec.max_wavenumber() / 2)?))?;
    for l in decay_lines(&report) {
        line(&mut out, l)?;
    }
    let verdict = suitability(&report, like_report.as_ref().unwrap_or(&report));
    line(&mut out, format!("verdict: {:?}", verdict.verdict))?;
    for r in &verdict.reasons {
        line(&mut out, format!("reason: {r}"))?;
    }
    if let Some(eps) = a.epsilon {
        line(&mut out, recommendation(recommend_k_from(&coeffs, eps, spec.max_wavenumber()), eps, spec.max_wavenumber()))?;
    }
    Ok(())
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<(), CliError> {
    let coeffs = file::read(&a.file)?;
    if a.points < 2 {
        return Err(CliError::Contract("--points must be at least 2".into()));
    }
    let (lo, hi) = match &a.grid {
        Some(g) => {
            let v = parse_list(g, 2)?;
            if v[0].partial_cmp(&v[1]) != Some(std::cmp::Ordering::Less) {
                return Err(CliError::Contract(format!("grid {g:?} needs LO < HI")));
            }
            (v[0], v[1])
        }
        None => coeffs.spec().domain().bounds().unwrap_or((-10.0, 10.0)),
    };
    let h = (hi - lo) / (a.points - 1) as f64;
    let thetas: Vec<f64> = (0..a.points).map(|j| if j + 1 == a.points { hi } else { lo + j as f64 * h }).collect();
    let rec = basis::reconstruct(&coeffs, &thetas)?;
    let mut csv = String::from("theta,density\n");
    for (t, v) in thetas.iter().zip(&rec.values) {
        csv.push_str(&format!("{t},{v}\n"));
    }
    emit_text(a.out.as_deref(), &csv)?;

    let scale = rec.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // rounding in the sum leaves values of order 1e-16 * peak on either side of zero
    let negatives = rec.values.iter().filter(|&&v| v < -NEGATIVE_NOISE * scale).count();
    let mut sink = summary_sink(a.out.is_some());
    line(&mut *sink, format!("points: {}", a.points))?;
    line(&mut *sink, format!("negative_points: {negatives}"))?;
    line(&mut *sink, format!("min_density: {}", fixed(rec.values.iter().copied().fold(f64::INFINITY, f64::min))))?;
    if negatives > 0 {
        line(&mut *sink, "warning: negative density values (Gibbs undershoot); not clipped")?;
    }
    if rec.max_imag > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        line(&mut *sink, format!("warning: imaginary residual {:.3e}; coefficients are not Hermitian", rec.max_imag))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_has_no_negative_zero() {
        assert_eq!(fixed(-1e-17), "0.0000000000");
        assert_eq!(fixed(1e-17), "0.0000000000");
        assert_eq!(fixed(-0.25), "-0.2500000000");
    }

    #[test]
    fn basis_pairings() {
        assert!(basis_spec(BasisArg::Fourier, None, 4).is_ok());
        assert!(basis_spec(BasisArg::Cosine, Some("0,1"), 4).is_ok());
        assert!(matches!(basis_spec(BasisArg::Cosine, None, 4), Err(CliError::Contract(_))));
        assert!(matches!(basis_spec(BasisArg::Hermite, Some("-1,1"), 4), Err(CliError::Contract(_))));
        assert!(matches!(basis_spec(BasisArg::Fourier, Some("1,-1"), 4), Err(CliError::Contract(_))));
    }
}
