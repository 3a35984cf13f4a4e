//! Simulation and analysis of coincidence spectra from type-II collinear
//! spontaneous parametric down-conversion pumped by ultrafast pulses.
//!
//! * [`dispersion`]: Sellmeier indices, the two transposed phase mismatches
//!   and the degenerate phase-matching angle;
//! * [`spectra`]: polarized and polarization-traced densities, 1-D
//!   coincidence spectra and 2-D joint maps;
//! * [`analysis`]: peaks, double-peak separation and threshold, measured
//!   data ingestion and the axis-angle fit;
//! * [`config`], [`svg`], [`cli`]: the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod spectra;
pub mod svg;

pub use error::{Error, Result};
