//! Peak detection, double-peak descriptors, measured-spectrum ingestion and
//! the axis-angle fit.

mod data;
mod fit;
mod peaks;
mod structure;

pub use data::{CountRecord, ExperimentalSpectrum, Hwp2Setting};
pub use fit::{cod_r2, fit_axis_angle, fit_objective, model_at_data, FitOptions, FitResult};
pub use peaks::{find_peaks, Peak, PeakSet};
pub use structure::{doubling_threshold, peak_count, peak_separation_vs_detuning, Separation, Threshold};

/// Default minimum prominence, as a fraction of the global maximum.
pub const DEFAULT_PROMINENCE: f64 = 0.1;
