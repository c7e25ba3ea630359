//! Spectral Bayesian updates.
//!
//! Priors and likelihoods are projected onto an orthonormal basis; the
//! posterior's coefficients are then the (normalized) convolution of the two
//! coefficient vectors, which the FFT evaluates in `O(N log N)`.
//!
//! ```
//! use spectral_bayes::basis::{default_quadrature, project, BasisSpec};
//! use spectral_bayes::density::normal_pdf;
//! use spectral_bayes::spectral::{bayes_update, moments, UpdateOptions};
//!
//! let spec = BasisSpec::fourier(64);
//! let rule = default_quadrature(&spec).unwrap();
//! let prior = project(&spec, |x| normal_pdf(x, 0.0, 0.5), &rule).unwrap();
//! let like = project(&spec, |x| normal_pdf(x, 0.3, 0.4), &rule).unwrap();
//! let post = bayes_update(&prior, &like, UpdateOptions::default()).unwrap();
//! let m = moments(&post.posterior).unwrap();
//! assert!((m.mean - 0.1829268293).abs() < 1e-6);
//! ```

pub mod basis;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod oracles;
pub mod par;
pub mod sequential;
pub mod spectral;

pub use basis::{BasisKind, BasisSpec, Domain};
pub use error::{Error, Result};
pub use spectral::{bayes_update, CoefficientVector, Engine, Mode, UpdateOptions, UpdateResult};
