use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub location_nm: f64,
    pub height: f64,
    pub prominence: f64,
}

/// Peaks sorted by location.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn locations(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.location_nm).collect()
    }
}

/// Local maxima of `spectrum` whose prominence is at least
/// `min_prominence` times the global maximum.
///
/// Prominence is the height above the higher of the two saddles reached by
/// walking outwards until a strictly higher sample or the edge. A flat top
/// spanning several samples counts once, at its middle sample.
pub fn find_peaks(spectrum: &Spectrum, min_prominence: f64) -> Result<PeakSet> {
    let y = spectrum.densities();
    let x = spectrum.lambdas();
    if y.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "peak search needs at least 3 samples, got {}",
            y.len()
        )));
    }
    if !(min_prominence > 0.0 && min_prominence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "min_prominence must lie in (0, 1), got {min_prominence}"
        )));
    }
    let global_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = min_prominence * global_max;

    let mut peaks = Vec::new();
    let n = y.len();
    let mut i = 1;
    while i < n - 1 {
        if y[i] > y[i - 1] {
            // extend over a plateau
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                let mid = (i + j) / 2;
                let prominence = prominence(&y, i, j);
                if prominence > 0.0 && prominence >= threshold {
                    peaks.push(Peak {
                        location_nm: x[mid],
                        height: y[mid],
                        prominence,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Ok(PeakSet { peaks })
}

fn prominence(y: &[f64], first: usize, last: usize) -> f64 {
    let h = y[first];
    let mut left_min = h;
    for &v in y[..first].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[last + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}
