//! Posterior-becomes-prior chains and per-dimension updates for separable
//! models.

use crate::basis;
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{self, CoefficientVector, UpdateOptions, UpdateResult};

/// Unit-mass tolerance re-checked after every step.
pub const STEP_MASS_TOL: f64 = 1e-7;

/// Running state of a sequential filter. Steps return a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    current: CoefficientVector,
    step_count: usize,
    log_evidence_sum: f64,
    last_evidence: Option<f64>,
}

impl FilterState {
    /// Starts a chain from `prior`, rescaling it to unit mass.
    pub fn init(prior: &CoefficientVector) -> Result<Self> {
        let mass = prior.mass()?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidPosterior(format!("prior has mass {mass}")));
        }
        let current = prior.scaled(1.0 / mass);
        check_unit_mass(&current)?;
        Ok(FilterState {
            current,
            step_count: 0,
            log_evidence_sum: 0.0,
            last_evidence: None,
        })
    }

    /// Folds in one likelihood; the posterior becomes the next prior.
    pub fn step(&self, likelihood: &CoefficientVector, opts: UpdateOptions) -> Result<FilterState> {
        let update = spectral::bayes_update(&self.current, likelihood, opts)?;
        // renormalize every step so the c_0 scale cannot drift along the chain
        let mass = update.posterior.mass()?;
        let current = update.posterior.scaled(1.0 / mass);
        check_unit_mass(&current)?;
        Ok(FilterState {
            current,
            step_count: self.step_count + 1,
            log_evidence_sum: self.log_evidence_sum + update.evidence.ln(),
            last_evidence: Some(update.evidence),
        })
    }

    pub fn current(&self) -> &CoefficientVector {
        &self.current
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn log_evidence_sum(&self) -> f64 {
        self.log_evidence_sum
    }

    /// Evidence of the most recent step.
    pub fn last_evidence(&self) -> Option<f64> {
        self.last_evidence
    }
}

fn check_unit_mass(coeffs: &CoefficientVector) -> Result<()> {
    let probe = basis::reconstruct_on_grid(coeffs, spectral::probe_points(coeffs.spec()))?;
    if (probe.mass - 1.0).abs() > STEP_MASS_TOL {
        return Err(Error::InvalidPosterior(format!("filter state has mass {}", probe.mass)));
    }
    Ok(())
}

/// One factor of a separable model.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub prior: CoefficientVector,
    pub likelihood: CoefficientVector,
}

/// `p(theta) = prod_j p_j(theta_j)` with a likelihood that factorizes the
/// same way. The factorization is the caller's claim; it is not checked.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableModel {
    dims: Vec<Factor>,
}

impl SeparableModel {
    pub fn new(dims: Vec<Factor>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("a separable model needs at least one dimension".into()));
        }
        for (index, f) in dims.iter().enumerate() {
            if f.prior.spec() != f.likelihood.spec() {
                return Err(Error::Dimension {
                    index,
                    source: Box::new(Error::SpecMismatch),
                });
            }
        }
        Ok(SeparableModel { dims })
    }

    pub fn dims(&self) -> &[Factor] {
        &self.dims
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableUpdate {
    pub dims: Vec<UpdateResult>,
    /// Sum of per-dimension log evidences.
    pub log_evidence: f64,
}

impl SeparableUpdate {
    pub fn joint_evidence(&self) -> f64 {
        self.log_evidence.exp()
    }
}

/// Independent update per dimension; dimensions may run concurrently and the
/// result does not depend on the order they finish in.
pub fn separable_update(model: &SeparableModel, opts: UpdateOptions) -> Result<SeparableUpdate> {
    let results = par::map_slice(&model.dims, |f| spectral::bayes_update(&f.prior, &f.likelihood, opts));
    let dims = results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Dimension {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let log_evidence = dims.iter().map(|r| r.evidence.ln()).sum();
    Ok(SeparableUpdate { dims, log_evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{default_quadrature, project, BasisSpec};
    use crate::spectral::max_abs_diff;

    fn gauss(mu: f64, s: f64) -> impl Fn(f64) -> f64 {
        move |x| crate::density::normal_pdf(x, mu, s)
    }

    #[test]
    fn init_renormalizes() {
        let spec = BasisSpec::fourier(8);
        let u = CoefficientVector::uniform(spec).unwrap();
        let a = FilterState::init(&u).unwrap();
        let b = FilterState::init(&u.scaled(2.0)).unwrap();
        assert!(max_abs_diff(a.current(), &u) < 1e-16);
        assert_eq!(a, b);
        assert_eq!(a.step_count(), 0);
        assert!(FilterState::init(&CoefficientVector::zeros(spec)).is_err());
    }

    #[test]
    fn uninformative_step_keeps_state() {
        let spec = BasisSpec::fourier(32);
        let rule = default_quadrature(&spec).unwrap();
        let prior = project(&spec, gauss(0.2, 0.4), &rule).unwrap();
        let s0 = FilterState::init(&prior).unwrap();
        let u = CoefficientVector::uniform(spec).unwrap();
        let s1 = s0.step(&u, UpdateOptions::default()).unwrap();
        assert!(max_abs_diff(s1.current(), s0.current()) < 1e-10);
        // Z = int p / (2 pi) = 1 / (2 pi)
        assert!((s1.log_evidence_sum() + (2.0 * std::f64::consts::PI).ln()).abs() < 1e-10);
        assert_eq!(s1.step_count(), 1);
    }

    #[test]
    fn separable_errors_carry_dimension() {
        let spec = BasisSpec::fourier(4);
        let u = CoefficientVector::uniform(spec).unwrap();
        let model = SeparableModel::new(vec![
            Factor { prior: u.clone(), likelihood: u.clone() },
            Factor { prior: u.clone(), likelihood: CoefficientVector::zeros(spec) },
        ])
        .unwrap();
        match separable_update(&model, UpdateOptions::default()) {
            Err(Error::Dimension { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SeparableModel::new(vec![]).is_err());
        let mismatched = Factor {
            prior: u.clone(),
            likelihood: CoefficientVector::uniform(BasisSpec::fourier(5)).unwrap(),
        };
        assert!(SeparableModel::new(vec![mismatched]).is_err());
    }
}
