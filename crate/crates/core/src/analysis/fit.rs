//! One-parameter fit of the crystal axis angle to measured coincidence
//! spectra.
//!
//! All curves share the axis angle; each curve gets its own amplitude
//! scale, solved in closed form (weighted linear least squares) at every
//! trial angle. The angle is located by a coarse scan over the bracket
//! followed by golden-section search around the best scan point.

use rayon::prelude::*;
use serde::Serialize;

use super::data::ExperimentalSpectrum;
use crate::dispersion::AxisAngle;
use crate::error::{Error, Result};
use crate::spectra::{gaussian_convolve, mixed_density_at, CrystalConfig, PumpPulse};

/// `1 − SS_res / SS_tot` of `scale · model` against the measured counts,
/// with `SS_tot` taken about the mean of the data.
pub fn cod_r2(model: &[f64], data: &ExperimentalSpectrum, scale: f64) -> Result<f64> {
    if model.len() != data.records.len() {
        return Err(Error::InvalidParameter(format!(
            "model has {} samples, data {}",
            model.len(),
            data.records.len()
        )));
    }
    let n = model.len() as f64;
    let mean = data.records.iter().map(|r| r.counts).sum::<f64>() / n;
    let ss_tot: f64 = data.records.iter().map(|r| (r.counts - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedR2);
    }
    let ss_res: f64 = data
        .records
        .iter()
        .zip(model)
        .map(|(r, m)| (r.counts - scale * m).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Search interval for the axis angle, degrees.
    pub angle_bracket_deg: [f64; 2],
    /// Spacing of the initial scan, degrees.
    pub scan_step_deg: f64,
    /// Final width of the golden-section interval, degrees.
    pub tolerance_deg: f64,
    /// Weight residuals by `1/std²`.
    pub weighted: bool,
    pub convolve_fwhm_nm: Option<f64>,
    pub parallel: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            angle_bracket_deg: [41.36, 41.56],
            scan_step_deg: 0.002,
            tolerance_deg: 1e-6,
            weighted: true,
            convolve_fwhm_nm: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(skip)]
    pub phi0_hat: AxisAngle,
    pub per_curve_scale: Vec<f64>,
    pub r2_per_curve: Vec<f64>,
    /// Minimized objective: (weighted) sum of squared residuals.
    pub residual_sum: f64,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

/// Model densities (no normalization) at the data abscissas of `data`.
pub fn model_at_data(
    data: &ExperimentalSpectrum,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    convolve_fwhm_nm: Option<f64>,
) -> Result<Vec<f64>> {
    let xs = data.lambdas();
    let Some(fwhm) = convolve_fwhm_nm else {
        return mixed_density_at(&xs, data.fixed_lambda2_nm, pump, crystal);
    };
    // evaluate on a fine uniform grid, convolve, then interpolate
    let step = (fwhm / 7.5).min(0.02);
    let start = xs[0] - 4.0 * fwhm;
    let n = ((xs[xs.len() - 1] + 4.0 * fwhm - start) / step).ceil() as usize + 1;
    let fine: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
    let values = mixed_density_at(&fine, data.fixed_lambda2_nm, pump, crystal)?;
    let conv = gaussian_convolve(&values, step, fwhm)?;
    Ok(xs
        .iter()
        .map(|&x| {
            let t = (x - start) / step;
            let i = (t.floor() as usize).min(n - 2);
            let f = t - i as f64;
            conv[i] * (1.0 - f) + conv[i + 1] * f
        })
        .collect())
}

struct CurveFit {
    scale: f64,
    residual: f64,
    model: Vec<f64>,
}

fn fit_curve(data: &ExperimentalSpectrum, pump: &PumpPulse, crystal: &CrystalConfig, opts: &FitOptions) -> Result<CurveFit> {
    let model = model_at_data(data, pump, crystal, opts.convolve_fwhm_nm)?;
    let weight = |std: f64| if opts.weighted { 1.0 / (std * std) } else { 1.0 };
    let (mut num, mut den) = (0.0, 0.0);
    for (r, &m) in data.records.iter().zip(&model) {
        let w = weight(r.std);
        num += w * m * r.counts;
        den += w * m * m;
    }
    let scale = if den > 0.0 { num / den } else { 0.0 };
    let residual = data
        .records
        .iter()
        .zip(&model)
        .map(|(r, &m)| weight(r.std) * (r.counts - scale * m).powi(2))
        .sum();
    Ok(CurveFit { scale, residual, model })
}

fn fit_all(
    datasets: &[ExperimentalSpectrum],
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    phi_deg: f64,
    opts: &FitOptions,
) -> Result<Vec<CurveFit>> {
    let crystal = crystal.with_axis_angle(AxisAngle::interior(phi_deg.to_radians())?);
    if opts.parallel {
        datasets.par_iter().map(|d| fit_curve(d, pump, &crystal, opts)).collect()
    } else {
        datasets.iter().map(|d| fit_curve(d, pump, &crystal, opts)).collect()
    }
}

/// Total residual at axis angle `phi_deg` with every curve's scale at its
/// optimum.
pub fn fit_objective(
    datasets: &[ExperimentalSpectrum],
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    phi_deg: f64,
    opts: &FitOptions,
) -> Result<f64> {
    Ok(fit_all(datasets, pump, crystal, phi_deg, opts)?.iter().map(|c| c.residual).sum())
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

pub fn fit_axis_angle(
    datasets: &[ExperimentalSpectrum],
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    opts: &FitOptions,
) -> Result<FitResult> {
    if datasets.is_empty() {
        return Err(Error::InvalidParameter("fit needs at least one dataset".into()));
    }
    let [lo, hi] = opts.angle_bracket_deg;
    if !(lo > 0.0 && hi < 90.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("angle bracket [{lo}, {hi}] deg must lie inside (0, 90)")));
    }
    if !(opts.scan_step_deg > 0.0 && opts.tolerance_deg > 0.0) {
        return Err(Error::InvalidParameter("scan step and tolerance must be > 0".into()));
    }
    let objective = |phi: f64| fit_objective(datasets, pump, crystal, phi, opts);

    let n = ((hi - lo) / opts.scan_step_deg).ceil() as usize;
    let step = (hi - lo) / n as f64;
    let scan: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let phi = lo + i as f64 * step;
            Ok((phi, objective(phi)?))
        })
        .collect::<Result<_>>()?;
    let mut evaluations = scan.len();
    let best = (0..scan.len())
        .min_by(|&a, &b| scan[a].1.total_cmp(&scan[b].1))
        .expect("scan is non-empty");
    if best == 0 || best == n {
        return Err(Error::Convergence(format!(
            "objective minimum lies on the bracket edge at {:.4} deg; widen angle_bracket_deg",
            scan[best].0
        )));
    }

    let mut warnings = Vec::new();
    let f_best = scan[best].1;
    for i in 1..n {
        if i != best && scan[i].1 < scan[i - 1].1 && scan[i].1 < scan[i + 1].1 && scan[i].1 <= 2.0 * f_best {
            warnings.push(format!(
                "objective not unimodal: secondary minimum near {:.4} deg ({:.4e} vs {:.4e})",
                scan[i].0, scan[i].1, f_best
            ));
        }
    }

    let (mut a, mut b) = (scan[best - 1].0, scan[best + 1].0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    evaluations += 2;
    while b - a > opts.tolerance_deg {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d)?;
        }
        evaluations += 1;
        if evaluations > 10_000 {
            return Err(Error::Convergence("golden-section search exceeded 10000 evaluations".into()));
        }
    }
    let phi_hat = 0.5 * (a + b);

    let curves = fit_all(datasets, pump, crystal, phi_hat, opts)?;
    evaluations += 1;
    let mut scales = Vec::with_capacity(curves.len());
    let mut r2 = Vec::with_capacity(curves.len());
    for (c, d) in curves.iter().zip(datasets) {
        if !(c.scale > 0.0) {
            return Err(Error::Convergence(format!(
                "curve at lambda2 = {} nm has no overlap with the model at {phi_hat:.4} deg",
                d.fixed_lambda2_nm
            )));
        }
        scales.push(c.scale);
        r2.push(cod_r2(&c.model, d, c.scale)?);
    }
    Ok(FitResult {
        phi0_hat: AxisAngle::interior(phi_hat.to_radians())?,
        per_curve_scale: scales,
        r2_per_curve: r2,
        residual_sum: curves.iter().map(|c| c.residual).sum(),
        evaluations,
        warnings,
    })
}
