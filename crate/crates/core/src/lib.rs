//! OFDM sensing under an insufficient cyclic prefix.
//!
//! This crate models the echo of an OFDM integrated sensing and communication
//! frame when target delays exceed the cyclic prefix, and predicts the
//! statistics of the resulting range-Doppler maps. It is `no_std` and only
//! needs `alloc`; FFTs are supplied by the caller through [`dft::Dft`], with
//! [`dft::DirectDft`] as a dependency-free fallback.
//!
//! The pieces, bottom up:
//!
//! - [`constellation`]: unit-power PSK/QAM alphabets and their moments
//!   E{1/|s|²} and E{|s|⁴}.
//! - [`scenario`]: system parameters, the radar equation, grid snapping and
//!   the attenuated target coefficients of echoes that overrun the prefix.
//! - [`waveform`]: CP-OFDM modulation and demodulation.
//! - [`channel`]: echo synthesis, either sample by sample in the time domain
//!   or through the closed-form free/ISI/ICI decomposition per subcarrier.
//! - [`rdm`]: reciprocal- and matched-filter range-Doppler maps and their
//!   sidelobe statistics.
//! - [`analytics`]: closed-form second moments, PSLR and ISLR.
//! - [`estimator`]: peak picking and RMSE scoring.

#![cfg_attr(not(test), no_std)]
#![deny(rust_2018_idioms)]

extern crate alloc;

pub mod analytics;
pub mod channel;
pub mod constellation;
pub mod dft;
mod error;
pub mod estimator;
pub mod grid;
pub mod rdm;
pub mod rng;
pub mod scenario;
pub mod waveform;

pub use error::Error;

pub use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Linear power ratio to decibels.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Decibels to linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
