//! Pump spectral factor and the polarized / polarization-traced probability
//! densities of the biphoton state, sampled on wavelength grids.
//!
//! Densities are proportional quantities: no normalization constant is
//! carried. The pump factor is `exp(−(ω₁+ω₂−ω₀)²τ²/(4 ln 2))`, i.e. `τ` is the
//! intensity FWHM of a transform-limited Gaussian pulse and enters the
//! formulas as given (110 fs means 110 fs, no conversion).

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{AngularFrequency, AxisAngle, SellmeierSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PumpPulse {
    pub lambda0_nm: f64,
    pub tau_fs: f64,
    /// `E₀²·τ` constant. When set, map values are multiplied by
    /// `energy_scale / τ` so maps at different durations share one scale.
    pub energy_scale: Option<f64>,
}

impl PumpPulse {
    pub fn new(lambda0_nm: f64, tau_fs: f64, energy_scale: Option<f64>) -> Result<Self> {
        if !(lambda0_nm.is_finite() && lambda0_nm > 0.0) {
            return Err(Error::InvalidParameter(format!("pump wavelength must be > 0, got {lambda0_nm}")));
        }
        if !(tau_fs.is_finite() && tau_fs > 0.0) {
            return Err(Error::InvalidParameter(format!("pulse duration must be > 0, got {tau_fs}")));
        }
        if let Some(e) = energy_scale {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidParameter(format!("energy scale must be > 0, got {e}")));
            }
        }
        Ok(Self {
            lambda0_nm,
            tau_fs,
            energy_scale,
        })
    }

    pub fn with_tau(&self, tau_fs: f64) -> Result<Self> {
        Self::new(self.lambda0_nm, tau_fs, self.energy_scale)
    }

    pub fn omega0(&self) -> AngularFrequency {
        AngularFrequency::from_wavelength_nm(self.lambda0_nm).expect("validated at construction")
    }

    /// Half width at half maximum of the pump factor in `ω₁+ω₂`, rad/fs.
    pub fn half_width(&self) -> f64 {
        2.0 * LN_2 / self.tau_fs
    }

    fn energy_factor(&self) -> f64 {
        self.energy_scale.map_or(1.0, |e| e / self.tau_fs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    pub length_mm: f64,
    pub axis_angle: AxisAngle,
    pub dispersion: SellmeierSet,
}

impl CrystalConfig {
    pub fn new(length_mm: f64, axis_angle: AxisAngle, dispersion: SellmeierSet) -> Result<Self> {
        if !(length_mm.is_finite() && length_mm > 0.0) {
            return Err(Error::InvalidParameter(format!("crystal length must be > 0, got {length_mm}")));
        }
        Ok(Self {
            length_mm,
            axis_angle,
            dispersion,
        })
    }

    pub fn with_axis_angle(&self, axis_angle: AxisAngle) -> Self {
        Self {
            axis_angle,
            ..self.clone()
        }
    }

    fn half_length_um(&self) -> f64 {
        self.length_mm * 1000.0 / 2.0
    }
}

/// Polarization carried by photon 1.
///
/// `H` is the ordinary wave (photon 2 then vertical / extraordinary), `V`
/// the extraordinary wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    UnitMax,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::UnitMax => "unit-max",
        }
    }
}

/// Uniform wavelength grid `start, start + step, …` up to and including
/// `stop` (to within half a step).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1d {
    pub start_nm: f64,
    pub stop_nm: f64,
    pub step_nm: f64,
}

impl Grid1d {
    pub fn new(start_nm: f64, stop_nm: f64, step_nm: f64) -> Result<Self> {
        if !(start_nm.is_finite() && stop_nm.is_finite() && step_nm.is_finite()) || step_nm <= 0.0 || stop_nm <= start_nm {
            return Err(Error::InvalidParameter(format!(
                "grid needs start < stop and step > 0, got [{start_nm}, {stop_nm}] step {step_nm}"
            )));
        }
        Ok(Self {
            start_nm,
            stop_nm,
            step_nm,
        })
    }

    /// Grid with `points` samples from `start` to `stop` inclusive.
    pub fn with_points(start_nm: f64, stop_nm: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter("a grid needs at least 2 points".into()));
        }
        Self::new(start_nm, stop_nm, (stop_nm - start_nm) / (points - 1) as f64)
    }

    pub fn len(&self) -> usize {
        ((self.stop_nm - self.start_nm) / self.step_nm).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.start_nm + i as f64 * self.step_nm).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub normalization: Normalization,
    /// FWHM in nm of a Gaussian instrument response, applied before
    /// normalization.
    pub convolve_fwhm_nm: Option<f64>,
    pub parallel: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            normalization: Normalization::UnitMax,
            convolve_fwhm_nm: None,
            parallel: true,
        }
    }
}

impl SpectrumOptions {
    pub fn raw() -> Self {
        Self {
            normalization: Normalization::Raw,
            ..Self::default()
        }
    }
}

/// Conditional (coincidence) spectrum at a fixed `λ₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub fixed_lambda2_nm: f64,
    /// `(λ₁ nm, density)` with strictly increasing `λ₁`.
    pub samples: Vec<(f64, f64)>,
    pub normalization: Normalization,
}

impl Spectrum {
    pub fn from_samples(fixed_lambda2_nm: f64, samples: Vec<(f64, f64)>, normalization: Normalization) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter("spectrum wavelengths must be strictly increasing".into()));
        }
        if samples.iter().any(|&(_, d)| !(d >= 0.0 && d.is_finite())) {
            return Err(Error::InvalidParameter("spectrum densities must be finite and >= 0".into()));
        }
        Ok(Self {
            fixed_lambda2_nm,
            samples,
            normalization,
        })
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn max_density(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    /// `lambda1_nm,density` rows after `#`-prefixed header lines.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            push_comment(&mut out, h);
        }
        push_comment(&mut out, &format!("lambda2_nm={}", self.fixed_lambda2_nm));
        push_comment(&mut out, &format!("normalization={}", self.normalization.as_str()));
        out.push_str("lambda1_nm,density\n");
        for &(l, d) in &self.samples {
            out.push_str(&format!("{l:.4},{d:.12e}\n"));
        }
        out
    }

    /// Reads the format written by [`Spectrum::to_csv`]. Unknown comment
    /// lines are ignored.
    pub fn from_csv(text: &str, source_name: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            msg,
        };
        let mut lambda2 = None;
        let mut normalization = Normalization::Raw;
        let mut samples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                let c = c.trim();
                if let Some(v) = c.strip_prefix("lambda2_nm=") {
                    lambda2 = Some(v.trim().parse::<f64>().map_err(|e| parse_err(line_no, format!("lambda2_nm: {e}")))?);
                } else if let Some(v) = c.strip_prefix("normalization=") {
                    normalization = match v.trim() {
                        "raw" => Normalization::Raw,
                        "unit-max" => Normalization::UnitMax,
                        other => return Err(parse_err(line_no, format!("unknown normalization '{other}'"))),
                    };
                }
                continue;
            }
            if line == "lambda1_nm,density" {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(parse_err(line_no, format!("expected 2 fields, found {}", fields.len())));
            }
            let l: f64 = fields[0].parse().map_err(|e| parse_err(line_no, format!("lambda1_nm: {e}")))?;
            let d: f64 = fields[1].parse().map_err(|e| parse_err(line_no, format!("density: {e}")))?;
            samples.push((l, d));
        }
        let lambda2 = lambda2.ok_or_else(|| parse_err(1, "missing '# lambda2_nm=' header".into()))?;
        Self::from_samples(lambda2, samples, normalization).map_err(|e| parse_err(0, e.to_string()))
    }
}

/// Two-frequency density; `values[i * lambda2_axis.len() + j]` belongs to
/// `(lambda1_axis[i], lambda2_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralMap {
    pub lambda1_axis: Vec<f64>,
    pub lambda2_axis: Vec<f64>,
    pub values: Vec<f64>,
}

impl JointSpectralMap {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.lambda2_axis.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.lambda2_axis.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// First data line holds the λ₂ axis, every further line
    /// `lambda1, v, v, …`.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            push_comment(&mut out, h);
        }
        push_comment(&mut out, "rows: lambda1_nm; columns: lambda2_nm");
        out.push_str("lambda1_nm\\lambda2_nm");
        for l2 in &self.lambda2_axis {
            out.push_str(&format!(",{l2:.4}"));
        }
        out.push('\n');
        for (i, l1) in self.lambda1_axis.iter().enumerate() {
            out.push_str(&format!("{l1:.4}"));
            for v in self.row(i) {
                out.push_str(&format!(",{v:.6e}"));
            }
            out.push('\n');
        }
        out
    }
}

fn push_comment(out: &mut String, text: &str) {
    for line in text.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
}

/// `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Pump spectral intensity at the pair's summed frequency.
pub fn pump_intensity_factor(omega1: AngularFrequency, omega2: AngularFrequency, pump: &PumpPulse) -> f64 {
    let detuning = omega1.value() + omega2.value() - pump.omega0().value();
    (-(detuning * detuning) * pump.tau_fs * pump.tau_fs / (4.0 * LN_2)).exp()
}

/// Coincidence density with the polarization of photon 1 selected.
pub fn conditional_density_polarized(
    omega1: AngularFrequency,
    omega2: AngularFrequency,
    which: Polarization,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
) -> Result<f64> {
    let set = &crystal.dispersion;
    let delta = match which {
        Polarization::H => set.mismatch_12(omega1, omega2, crystal.axis_angle)?,
        Polarization::V => set.mismatch_21(omega1, omega2, crystal.axis_angle)?,
    };
    let s = sinc(crystal.half_length_um() * delta);
    Ok(pump_intensity_factor(omega1, omega2, pump) * (s * s))
}

/// Polarization-traced two-frequency density: the incoherent sum of both
/// polarized branches.
pub fn mixed_density(
    omega1: AngularFrequency,
    omega2: AngularFrequency,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
) -> Result<f64> {
    let h = conditional_density_polarized(omega1, omega2, Polarization::H, pump, crystal)?;
    let v = conditional_density_polarized(omega1, omega2, Polarization::V, pump, crystal)?;
    Ok(h + v)
}

fn eval_grid<F>(lambdas: &[f64], parallel: bool, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if parallel {
        lambdas.par_iter().map(|&l| f(l)).collect()
    } else {
        lambdas.iter().map(|&l| f(l)).collect()
    }
}

fn finish_spectrum(lambda2: f64, lambdas: Vec<f64>, mut values: Vec<f64>, grid: &Grid1d, opts: &SpectrumOptions) -> Result<Spectrum> {
    if let Some(fwhm) = opts.convolve_fwhm_nm {
        values = gaussian_convolve(&values, grid.step_nm, fwhm)?;
    }
    if opts.normalization == Normalization::UnitMax {
        normalize_unit_max(&mut values)?;
    }
    Ok(Spectrum {
        fixed_lambda2_nm: lambda2,
        samples: lambdas.into_iter().zip(values).collect(),
        normalization: opts.normalization,
    })
}

fn normalize_unit_max(values: &mut [f64]) -> Result<()> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    for v in values.iter_mut() {
        *v /= max;
    }
    Ok(())
}

/// Polarization-traced coincidence spectrum at fixed `λ₂` over `grid`.
pub fn conditional_spectrum(
    lambda2_nm: f64,
    grid: &Grid1d,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    opts: &SpectrumOptions,
) -> Result<Spectrum> {
    let omega2 = AngularFrequency::from_wavelength_nm(lambda2_nm)?;
    let lambdas = grid.points();
    let values = eval_grid(&lambdas, opts.parallel, |l1| {
        mixed_density(AngularFrequency::from_wavelength_nm(l1)?, omega2, pump, crystal)
    })?;
    finish_spectrum(lambda2_nm, lambdas, values, grid, opts)
}

/// One polarized branch at fixed `λ₂` over `grid`.
pub fn polarized_spectrum(
    lambda2_nm: f64,
    grid: &Grid1d,
    which: Polarization,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    opts: &SpectrumOptions,
) -> Result<Spectrum> {
    let omega2 = AngularFrequency::from_wavelength_nm(lambda2_nm)?;
    let lambdas = grid.points();
    let values = eval_grid(&lambdas, opts.parallel, |l1| {
        conditional_density_polarized(AngularFrequency::from_wavelength_nm(l1)?, omega2, which, pump, crystal)
    })?;
    finish_spectrum(lambda2_nm, lambdas, values, grid, opts)
}

/// Mixed-state density at arbitrary `λ₁` abscissas, no normalization.
pub fn mixed_density_at(lambda1s: &[f64], lambda2_nm: f64, pump: &PumpPulse, crystal: &CrystalConfig) -> Result<Vec<f64>> {
    let omega2 = AngularFrequency::from_wavelength_nm(lambda2_nm)?;
    lambda1s
        .iter()
        .map(|&l1| mixed_density(AngularFrequency::from_wavelength_nm(l1)?, omega2, pump, crystal))
        .collect()
}

/// Joint density over `lambda1 × lambda2`. Each cell is evaluated on its
/// own, so serial and parallel runs agree bit for bit.
pub fn joint_density_map(
    lambda1: &Grid1d,
    lambda2: &Grid1d,
    pump: &PumpPulse,
    crystal: &CrystalConfig,
    normalization: Normalization,
    parallel: bool,
) -> Result<JointSpectralMap> {
    let l1 = lambda1.points();
    let l2 = lambda2.points();
    let w2: Vec<AngularFrequency> = l2
        .iter()
        .map(|&l| AngularFrequency::from_wavelength_nm(l))
        .collect::<Result<_>>()?;
    let factor = pump.energy_factor();
    let row = |lambda1_nm: f64| -> Result<Vec<f64>> {
        let w1 = AngularFrequency::from_wavelength_nm(lambda1_nm)?;
        w2.iter().map(|&w| Ok(mixed_density(w1, w, pump, crystal)? * factor)).collect()
    };
    let rows: Vec<Vec<f64>> = if parallel {
        l1.par_iter().map(|&l| row(l)).collect::<Result<_>>()?
    } else {
        l1.iter().map(|&l| row(l)).collect::<Result<_>>()?
    };
    let mut values: Vec<f64> = rows.into_iter().flatten().collect();
    if normalization == Normalization::UnitMax {
        normalize_unit_max(&mut values)?;
    }
    Ok(JointSpectralMap {
        lambda1_axis: l1,
        lambda2_axis: l2,
        values,
    })
}

/// Convolves uniformly sampled `values` with a unit-area Gaussian of the
/// given FWHM. The kernel is cut at ±4σ and renormalized near the edges.
pub fn gaussian_convolve(values: &[f64], step_nm: f64, fwhm_nm: f64) -> Result<Vec<f64>> {
    if !(fwhm_nm.is_finite() && fwhm_nm > 0.0) {
        return Err(Error::InvalidParameter(format!("convolution FWHM must be > 0, got {fwhm_nm}")));
    }
    let sigma = fwhm_nm / (2.0 * (2.0 * LN_2).sqrt());
    let half = (4.0 * sigma / step_nm).ceil() as isize;
    let kernel: Vec<f64> = (-half..=half)
        .map(|k| {
            let x = k as f64 * step_nm / sigma;
            (-0.5 * x * x).exp()
        })
        .collect();
    let n = values.len() as isize;
    Ok((0..n)
        .map(|i| {
            let mut acc = 0.0;
            let mut norm = 0.0;
            for (k, w) in (-half..=half).zip(&kernel) {
                let j = i + k;
                if (0..n).contains(&j) {
                    acc += w * values[j as usize];
                    norm += w;
                }
            }
            acc / norm
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(tau: f64) -> (PumpPulse, CrystalConfig) {
        (
            PumpPulse::new(404.7, tau, None).unwrap(),
            CrystalConfig::new(
                5.0,
                AxisAngle::from_degrees(41.4625).unwrap(),
                SellmeierSet::bbo_eimerl_1987(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn sinc_branches_meet() {
        assert_eq!(sinc(0.0), 1.0);
        let x = 1e-4;
        let y = x * 0.999_999;
        assert!((sinc(y) - y.sin() / y).abs() < 1e-15);
        assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
        assert!((sinc(std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn pump_factor_half_maximum() {
        let (pump, _) = setup(110.0);
        let w0 = pump.omega0().value();
        let hw = pump.half_width();
        let w1 = AngularFrequency::new(w0 / 2.0).unwrap();
        let w2 = AngularFrequency::new(w0 / 2.0 + hw).unwrap();
        // ω₀/2 + hw − ω₀ cancels about three digits of the detuning
        assert!((pump_intensity_factor(w1, w2, &pump) - 0.5).abs() < 1e-12);
        let w2 = AngularFrequency::new(w0 / 2.0).unwrap();
        assert_eq!(pump_intensity_factor(w1, w2, &pump), 1.0);
        let a = AngularFrequency::new(2.31).unwrap();
        let b = AngularFrequency::new(2.36).unwrap();
        assert_eq!(pump_intensity_factor(a, b, &pump), pump_intensity_factor(b, a, &pump));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PumpPulse::new(404.7, 0.0, None).is_err());
        assert!(PumpPulse::new(-1.0, 100.0, None).is_err());
        assert!(PumpPulse::new(404.7, 100.0, Some(0.0)).is_err());
        let phi = AxisAngle::from_degrees(41.0).unwrap();
        assert!(CrystalConfig::new(0.0, phi, SellmeierSet::bbo_eimerl_1987()).is_err());
        assert!(Grid1d::new(810.0, 800.0, 0.1).is_err());
        assert!(Grid1d::new(800.0, 810.0, 0.0).is_err());
    }

    #[test]
    fn grid_points_include_stop() {
        let g = Grid1d::new(801.0, 817.0, 0.02).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 801);
        assert!((p[800] - 817.0).abs() < 1e-9);
        assert_eq!(Grid1d::with_points(801.0, 817.0, 801).unwrap().len(), 801);
    }

    #[test]
    fn unit_max_is_exact() {
        let (pump, crystal) = setup(110.0);
        let g = Grid1d::new(800.0, 820.0, 0.1).unwrap();
        let s = conditional_spectrum(806.3, &g, &pump, &crystal, &SpectrumOptions::default()).unwrap();
        assert_eq!(s.max_density(), 1.0);
        assert!(s.samples.iter().all(|&(_, d)| d >= 0.0));
    }

    #[test]
    fn range_errors_propagate() {
        let (pump, crystal) = setup(110.0);
        let g = Grid1d::new(1000.0, 1100.0, 1.0).unwrap();
        assert!(matches!(
            conditional_spectrum(806.3, &g, &pump, &crystal, &SpectrumOptions::default()),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn convolution_preserves_constant_and_area() {
        let flat = vec![3.0; 50];
        let c = gaussian_convolve(&flat, 0.02, 0.15).unwrap();
        assert!(c.iter().all(|v| (v - 3.0).abs() < 1e-12));
        let mut spike = vec![0.0; 101];
        spike[50] = 1.0;
        let c = gaussian_convolve(&spike, 0.02, 0.15).unwrap();
        let area: f64 = c.iter().sum();
        assert!((area - 1.0).abs() < 1e-9);
        // FWHM of the response is the kernel FWHM
        let above: usize = c.iter().filter(|&&v| v >= 0.5 * c[50]).count();
        assert!((above as f64 * 0.02 - 0.15).abs() <= 0.02 + 1e-12);
        assert!(gaussian_convolve(&flat, 0.02, 0.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = Spectrum::from_samples(806.3, vec![(800.0, 0.25), (800.5, 1.0)], Normalization::UnitMax).unwrap();
        let text = s.to_csv(&["spdc spectrum".into()]);
        assert!(text.starts_with("# spdc spectrum\n# lambda2_nm=806.3\n# normalization=unit-max\nlambda1_nm,density\n"));
        let back = Spectrum::from_csv(&text, "mem").unwrap();
        assert_eq!(back, s);
        assert!(Spectrum::from_csv("# lambda2_nm=800\n1,2,3\n", "mem").is_err());
    }
}
