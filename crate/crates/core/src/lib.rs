//! Short-term wind speed forecasting with a wavelet-decomposed hybrid of
//! autoregressive and support vector regression models.
//!
//! The pipeline:
//!
//! 1. [`wavelet::decompose`] splits a series into dyadic detail bands and a
//!    smooth residual, all on the input's time axis.
//! 2. High-frequency bands get a Burg-estimated AR model ([`ar`]); the
//!    remaining bands and the smooth get an ε-SVR on lagged values ([`svr`]).
//! 3. [`hybrid::forecast_hybrid`] forecasts every band recursively and sums
//!    the results.
//! 4. [`eval`] scores frozen models at rolling forecast origins with RMSE.

pub mod ar;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod hybrid;
pub mod series;
pub mod svr;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
