//! Sensitivity modeling for microwave dark-photon searches with
//! atomic-ensemble detectors.
//!
//! The library covers the full desk-scale pipeline of such an experiment:
//!
//! * [`units`] — frozen CODATA constants and the unit conversions the
//!   pipeline needs (everything internal is SI),
//! * [`detector`] — the electron-on-helium artificial atom with its
//!   field-tunable centimeter- and millimeter-band modes,
//! * [`signal`] — the kinetic-mixing effective field and the induced
//!   excitation probability of the N-atom ensemble,
//! * [`thermal`] — the blackbody background in log-probability space,
//! * [`readout`] — dispersive cavity readout: closed-form steady-state
//!   spectra, a moment-equation integrator as an independent oracle, and
//!   peak-based probability estimation,
//! * [`scan`] — mixing-strength sensitivity, confidence statistics, scan
//!   planning, and exclusion curves,
//! * [`montecarlo`] — seeded, parallel campaign simulation validating the
//!   analytic statistics,
//! * [`config`] / [`commands`] — the batch front-end behind the `haloscan`
//!   binary; one config file per figure-style artifact.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability.

pub mod commands;
pub mod config;
pub mod detector;
pub mod emit;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod readout;
pub mod scan;
pub mod signal;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
