//! Serial independence testing for object-valued time series.
//!
//! A stationary sequence of random objects living in a metric space
//! (vectors, curves on a grid, symmetric positive-definite matrices,
//! univariate distributions) is tested for serial independence through its
//! auto-distance covariance at every lag. The per-lag estimates are combined
//! into spectral Cramér–von Mises and Kolmogorov–Smirnov statistics, and the
//! null distribution is calibrated by a wild bootstrap on the U-centered
//! distance products or by permutation.
//!
//! Module map:
//!
//! * [`objects`]: the four object kinds, their metrics, and the symmetric
//!   matrix routines the SPD metrics need.
//! * [`adcv`]: pairwise distance matrices, U-centering, and the lagged
//!   distance-covariance estimator with its brute-force U-statistic oracle.
//! * [`spectral`]: the sine basis, the partial-sum process, and the CvM/KS
//!   statistics.
//! * [`resampling`]: wild bootstrap, permutation, p-values, and the
//!   end-to-end test runner.
//! * [`dgp`]: simulated data generating processes for every supported
//!   object kind.
//! * [`harness`]: Monte Carlo experiments tabulating empirical rejection
//!   rates.
//! * [`io`]: CSV data formats and the JSON run configuration.

pub mod adcv;
pub mod dgp;
pub mod error;
pub mod harness;
pub mod io;
pub mod objects;
pub mod resampling;
pub mod rng;
pub mod spectral;

pub(crate) mod numeric;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
