//! Peak-count based descriptors of the coincidence spectra: separation of
//! the two polarization peaks and the pulse duration at which they merge.

use serde::Serialize;

use super::peaks::find_peaks;
use crate::error::{Error, Result};
use crate::spectra::{conditional_spectrum, CrystalConfig, Grid1d, PumpPulse, SpectrumOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Separation {
    pub lambda2_nm: f64,
    pub peaks: usize,
    /// Distance between the two peaks in nm, 0 for a single peak.
    pub separation_nm: f64,
}

/// Peak separation for each fixed `λ₂`, sorted by `λ₂`.
///
/// A single peak gives separation 0. Any other count than 1 or 2 is an
/// error naming the offending `λ₂`.
pub fn peak_separation_vs_detuning(
    lambda2_list: &[f64],
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    grid: &Grid1d,
    opts: &SpectrumOptions,
    min_prominence: f64,
) -> Result<Vec<Separation>> {
    let mut lambda2s = lambda2_list.to_vec();
    lambda2s.sort_by(f64::total_cmp);
    lambda2s.dedup();
    lambda2s
        .into_iter()
        .map(|lambda2_nm| {
            let s = conditional_spectrum(lambda2_nm, grid, pump, crystal, opts)?;
            let p = find_peaks(&s, min_prominence)?;
            let separation_nm = match p.len() {
                1 => 0.0,
                2 => p.peaks[1].location_nm - p.peaks[0].location_nm,
                n => return Err(Error::PeakStructure { lambda2_nm, peaks: n }),
            };
            Ok(Separation {
                lambda2_nm,
                peaks: p.len(),
                separation_nm,
            })
        })
        .collect()
}

/// Number of peaks of the coincidence spectrum at `λ₂` for duration `tau_fs`.
pub fn peak_count(
    lambda2_nm: f64,
    tau_fs: f64,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    grid: &Grid1d,
    opts: &SpectrumOptions,
    min_prominence: f64,
) -> Result<usize> {
    let pump = pump.with_tau(tau_fs)?;
    let s = conditional_spectrum(lambda2_nm, grid, &pump, crystal, opts)?;
    Ok(find_peaks(&s, min_prominence)?.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub lambda2_nm: f64,
    /// Largest duration (fs, 1 fs resolution) with a double peak.
    pub tau_star_fs: f64,
    /// Shortest duration found with a single peak, `tau_star_fs + 1` or less.
    pub tau_single_fs: f64,
    pub bracket_fs: [f64; 2],
}

/// Coarse step (fs) of the scan that locates the last double→single change.
const SCAN_STEP_FS: f64 = 10.0;

/// Pulse duration below which the spectrum at `λ₂` is double-peaked.
///
/// The bracket start must show two (or more) peaks and its end a single
/// peak. Peak count is not guaranteed monotone in `τ`, so a coarse scan
/// first finds the last double→single change inside the bracket and
/// bisection then resolves it to 1 fs.
pub fn doubling_threshold(
    lambda2_nm: f64,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    tau_bracket_fs: [f64; 2],
    grid: &Grid1d,
    opts: &SpectrumOptions,
    min_prominence: f64,
) -> Result<Threshold> {
    let [lo, hi] = tau_bracket_fs;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Bracket(format!("invalid duration bracket [{lo}, {hi}] fs")));
    }
    let is_double = |tau: f64| -> Result<bool> {
        Ok(peak_count(lambda2_nm, tau, pump, crystal, grid, opts, min_prominence)? >= 2)
    };
    let count = |tau: f64| peak_count(lambda2_nm, tau, pump, crystal, grid, opts, min_prominence);
    let (c_lo, c_hi) = (count(lo)?, count(hi)?);
    if c_lo < 2 || c_hi != 1 {
        return Err(Error::Bracket(format!(
            "at lambda2 = {lambda2_nm} nm the bracket [{lo}, {hi}] fs gives {c_lo} and {c_hi} peaks; \
             need a double peak at the short end and a single peak at the long end"
        )));
    }

    // last coarse cell whose left end is double and right end single
    let mut cell = (lo, hi);
    let mut prev = (lo, true);
    let mut tau = lo;
    while tau < hi {
        let next = (tau + SCAN_STEP_FS).min(hi);
        let d = if next == hi { false } else { is_double(next)? };
        if prev.1 && !d {
            cell = (prev.0, next);
        }
        prev = (next, d);
        tau = next;
    }

    let (mut a, mut b) = cell;
    while b - a > 1.0 {
        let mid = 0.5 * (a + b);
        if is_double(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Threshold {
        lambda2_nm,
        tau_star_fs: a,
        tau_single_fs: b,
        bracket_fs: tau_bracket_fs,
    })
}
