//! Subcommands of the `spdc` binary.
//!
//! Every command reads the effective configuration (built-in default, or
//! `--config`, then command-line overrides) and either writes a data file to
//! `--out` (CSV for `spectrum` and `map`) or prints a JSON report to stdout
//! (also copied to `--out` when given). `--svg` writes a plot next to the
//! output file with the extension replaced by `.svg`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::analysis::{
    doubling_threshold, find_peaks, fit_axis_angle, model_at_data, ExperimentalSpectrum, PeakSet,
};
use crate::config::{AngleSpec, Overrides, RunConfig};
use crate::dispersion::solve_phase_matching_angle;
use crate::error::{Error, Result};
use crate::spectra::{conditional_spectrum, joint_density_map, Normalization, Spectrum, SpectrumOptions};
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "spdc", version, about = "Coincidence spectra of ultrafast type-II SPDC")]
pub struct Cli {
    /// Run configuration (TOML). Defaults to the built-in configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot next to --out.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Minimum peak prominence as a fraction of the global maximum.
    #[arg(long, global = true, value_name = "F")]
    pub prominence: Option<f64>,
    /// Convolve spectra with a Gaussian instrument response of this FWHM.
    #[arg(long = "convolve-fwhm", global = true, value_name = "NM")]
    pub convolve_fwhm: Option<f64>,
    /// Override the pump pulse duration.
    #[arg(long, global = true, value_name = "FS")]
    pub tau: Option<f64>,
    /// Override the pump central wavelength.
    #[arg(long, global = true, value_name = "NM")]
    pub lambda0: Option<f64>,
    /// Override the axis angle: degrees, or "solve".
    #[arg(long, global = true, value_name = "DEG|solve")]
    pub phi: Option<String>,
    /// Evaluate grids on one thread (output is identical either way).
    #[arg(long, global = true)]
    pub serial: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the degenerate phase-matching angle.
    Phasematch,
    /// Coincidence spectrum at a fixed λ₂.
    Spectrum {
        #[arg(long, value_name = "NM")]
        lambda2: f64,
    },
    /// Joint two-frequency density map.
    Map,
    /// Fit the axis angle to measured spectra.
    Fit {
        #[arg(required = true, value_name = "DATA_CSV")]
        data: Vec<PathBuf>,
        /// Unit weights instead of 1/std².
        #[arg(long)]
        unweighted: bool,
    },
    /// Longest pulse duration that still gives a double peak at λ₂.
    Threshold {
        #[arg(long, value_name = "NM")]
        lambda2: f64,
        /// Duration bracket in fs (overrides analysis.tau_bracket_fs).
        #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
        tau_bracket: Option<Vec<f64>>,
    },
    /// Peaks of a computed (--lambda2) or stored (--input) spectrum.
    Peaks {
        #[arg(long, value_name = "NM", conflicts_with = "input", required_unless_present = "input")]
        lambda2: Option<f64>,
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
}

impl Cli {
    fn overrides(&self) -> Result<Overrides> {
        let axis_angle = match self.phi.as_deref() {
            None => None,
            Some("solve") => Some(AngleSpec::Keyword("solve".into())),
            Some(s) => Some(AngleSpec::Degrees(
                s.parse()
                    .map_err(|_| Error::Config(format!("--phi expects degrees or \"solve\", got '{s}'")))?,
            )),
        };
        Ok(Overrides {
            tau_fs: self.tau,
            lambda0_nm: self.lambda0,
            axis_angle,
            prominence: self.prominence,
            convolve_fwhm_nm: self.convolve_fwhm,
        })
    }

    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default_config(),
        };
        cfg.apply(&self.overrides()?)?;
        Ok(cfg)
    }
}

/// Runs the parsed command, writing reports to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let cfg = cli.effective_config()?;
    if cli.svg && cli.out.is_none() {
        return Err(Error::Config("--svg needs --out".into()));
    }
    match &cli.command {
        Command::Phasematch => phasematch(cli, &cfg, stdout),
        Command::Spectrum { lambda2 } => spectrum(cli, &cfg, *lambda2, stdout),
        Command::Map => map(cli, &cfg, stdout),
        Command::Fit { data, unweighted } => fit(cli, &cfg, data, *unweighted, stdout),
        Command::Threshold { lambda2, tau_bracket } => threshold(cli, &cfg, *lambda2, tau_bracket.as_deref(), stdout),
        Command::Peaks { lambda2, input } => peaks(cli, &cfg, *lambda2, input.as_deref(), stdout),
    }
}

fn spectrum_options(cli: &Cli, cfg: &RunConfig) -> SpectrumOptions {
    SpectrumOptions {
        parallel: !cli.serial,
        ..cfg.spectrum_options(Normalization::UnitMax)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn svg_path(out: &Path) -> PathBuf {
    out.with_extension("svg")
}

fn emit_report(cli: &Cli, report: &serde_json::Value, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    stdout.write_all(text.as_bytes())?;
    if let Some(out) = &cli.out {
        write_file(out, &text)?;
    }
    Ok(())
}

fn emit_data(cli: &Cli, csv: &str, stdout: &mut dyn Write) -> Result<()> {
    match &cli.out {
        Some(out) => write_file(out, csv),
        None => Ok(stdout.write_all(csv.as_bytes())?),
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn header(kind: &str, cfg: &RunConfig, angle_deg: f64) -> Vec<String> {
    vec![
        format!("spdc {kind}"),
        format!("axis_angle_deg={angle_deg:.6}"),
        "config:".to_string(),
        cfg.to_toml().trim_end().to_string(),
    ]
}

fn phasematch(cli: &Cli, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let set = cfg.sellmeier()?;
    let lambda0 = cfg.pump_block()?.lambda0_nm;
    let pm = solve_phase_matching_angle(lambda0, &set)?;
    let report = json!({
        "sellmeier": set.name,
        "lambda0_nm": lambda0,
        "phi0_deg": round6(pm.angle.degrees()),
        "phi0_rad": pm.angle.radians(),
        "residual_rad_per_um": pm.residual,
        "iterations": pm.iterations,
    });
    emit_report(cli, &report, stdout)
}

fn spectrum(cli: &Cli, cfg: &RunConfig, lambda2: f64, stdout: &mut dyn Write) -> Result<()> {
    let crystal = cfg.crystal()?.crystal;
    let pump = cfg.pump()?;
    let grid = cfg.spectrum_grid()?;
    let s = conditional_spectrum(lambda2, &grid, &pump, &crystal, &spectrum_options(cli, cfg))?;
    emit_data(cli, &s.to_csv(&header("spectrum", cfg, crystal.axis_angle.degrees())), stdout)?;
    if let (true, Some(out)) = (cli.svg, &cli.out) {
        let title = format!("Coincidence spectrum, λ₂ = {lambda2:.2} nm, τ = {} fs", pump.tau_fs);
        let plot = svg::line_plot(
            &title,
            "λ₁ (nm)",
            "density (unit max)",
            &[svg::Series {
                label: "H + V",
                points: &s.samples,
            }],
        );
        write_file(&svg_path(out), &plot)?;
    }
    Ok(())
}

fn map(cli: &Cli, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let crystal = cfg.crystal()?.crystal;
    let pump = cfg.pump()?;
    let grid = cfg.map_grid()?;
    let normalization = if pump.energy_scale.is_some() {
        Normalization::Raw
    } else {
        Normalization::UnitMax
    };
    let m = joint_density_map(&grid, &grid, &pump, &crystal, normalization, !cli.serial)?;
    let mut h = header("map", cfg, crystal.axis_angle.degrees());
    h.push(format!("normalization={}", normalization.as_str()));
    emit_data(cli, &m.to_csv(&h), stdout)?;
    if let (true, Some(out)) = (cli.svg, &cli.out) {
        let title = format!("Joint spectral density, τ = {} fs", pump.tau_fs);
        write_file(&svg_path(out), &svg::heatmap(&title, &m))?;
    }
    Ok(())
}

fn fit(cli: &Cli, cfg: &RunConfig, paths: &[PathBuf], unweighted: bool, stdout: &mut dyn Write) -> Result<()> {
    let datasets: Vec<ExperimentalSpectrum> = paths
        .iter()
        .map(|p| ExperimentalSpectrum::read(p))
        .collect::<Result<_>>()?;
    let crystal = cfg.crystal()?.crystal;
    let pump = cfg.pump()?;
    let mut opts = cfg.fit_options();
    if unweighted {
        opts.weighted = false;
    }
    opts.parallel = !cli.serial;
    let r = fit_axis_angle(&datasets, &pump, &crystal, &opts)?;
    let curves: Vec<_> = paths
        .iter()
        .zip(&datasets)
        .zip(r.per_curve_scale.iter().zip(&r.r2_per_curve))
        .map(|((p, d), (scale, r2))| {
            json!({
                "file": p.display().to_string(),
                "lambda2_nm": d.fixed_lambda2_nm,
                "hwp2": d.hwp2.map(|h| h.to_string()),
                "scale": scale,
                "r2": r2,
            })
        })
        .collect();
    let report = json!({
        "phi0_deg": round6(r.phi0_hat.degrees()),
        "phi0_rad": r.phi0_hat.radians(),
        "curves": curves,
        "residual_sum": r.residual_sum,
        "weighted": opts.weighted,
        "evaluations": r.evaluations,
        "warnings": r.warnings,
    });
    emit_report(cli, &report, stdout)?;
    if let (true, Some(out)) = (cli.svg, &cli.out) {
        // one panel per curve would need layout; plot the data and fitted model of the first curve
        let fitted = crystal.with_axis_angle(r.phi0_hat);
        let d = &datasets[0];
        let model = model_at_data(d, &pump, &fitted, opts.convolve_fwhm_nm)?;
        let data_pts: Vec<(f64, f64)> = d.records.iter().map(|x| (x.lambda1_nm, x.counts)).collect();
        let model_pts: Vec<(f64, f64)> = d
            .lambdas()
            .into_iter()
            .zip(model.iter().map(|m| m * r.per_curve_scale[0]))
            .collect();
        let title = format!("Fit at φ₀ = {:.4}°, λ₂ = {} nm", r.phi0_hat.degrees(), d.fixed_lambda2_nm);
        let plot = svg::line_plot(
            &title,
            "λ₁ (nm)",
            "coincidences",
            &[
                svg::Series {
                    label: "data",
                    points: &data_pts,
                },
                svg::Series {
                    label: "model",
                    points: &model_pts,
                },
            ],
        );
        write_file(&svg_path(out), &plot)?;
    }
    Ok(())
}

fn threshold(cli: &Cli, cfg: &RunConfig, lambda2: f64, bracket: Option<&[f64]>, stdout: &mut dyn Write) -> Result<()> {
    let crystal = cfg.crystal()?.crystal;
    let pump = cfg.pump()?;
    let grid = cfg.spectrum_grid()?;
    let bracket = match bracket {
        Some(&[a, b]) => [a, b],
        Some(_) => return Err(Error::Config("--tau-bracket takes two values".into())),
        None => cfg.analysis.tau_bracket_fs,
    };
    let prominence = cfg.analysis.prominence;
    let t = doubling_threshold(
        lambda2,
        &pump,
        &crystal,
        bracket,
        &grid,
        &spectrum_options(cli, cfg),
        prominence,
    )?;
    let report = json!({
        "lambda2_nm": t.lambda2_nm,
        "tau_star_fs": t.tau_star_fs,
        "tau_single_fs": t.tau_single_fs,
        "bracket_fs": t.bracket_fs,
        "prominence": prominence,
        "note": "tau_star is the longest duration with two detected peaks; \
                 the qualitative expectation is a double peak only for pulses shorter than about 200 fs",
    });
    emit_report(cli, &report, stdout)
}

fn peaks(cli: &Cli, cfg: &RunConfig, lambda2: Option<f64>, input: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let s: Spectrum = match (lambda2, input) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            Spectrum::from_csv(&text, &path.display().to_string())?
        }
        (Some(l2), None) => {
            let crystal = cfg.crystal()?.crystal;
            conditional_spectrum(
                l2,
                &cfg.spectrum_grid()?,
                &cfg.pump()?,
                &crystal,
                &spectrum_options(cli, cfg),
            )?
        }
        (None, None) => return Err(Error::Config("peaks needs --lambda2 or --input".into())),
    };
    let p: PeakSet = find_peaks(&s, cfg.analysis.prominence)?;
    let separation = match p.len() {
        2 => Some(p.peaks[1].location_nm - p.peaks[0].location_nm),
        1 => Some(0.0),
        _ => None,
    };
    let report = json!({
        "lambda2_nm": s.fixed_lambda2_nm,
        "prominence": cfg.analysis.prominence,
        "count": p.len(),
        "peaks": p.peaks,
        "separation_nm": separation,
    });
    emit_report(cli, &report, stdout)
}
