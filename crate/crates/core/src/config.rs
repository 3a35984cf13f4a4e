//! Run configuration: one TOML file with `[crystal]`, `[pump]`, `[grid]` and
//! `[analysis]` tables. Unknown keys anywhere are errors.
//!
//! ```toml
//! [crystal]
//! sellmeier = "bbo-eimerl-1987"   # built-in name, or an inline table:
//! # [crystal.sellmeier]
//! # name = "my-bbo"
//! # ordinary = [2.7405, 0.0184, 0.0179, 0.0155]
//! # extraordinary = [2.3730, 0.0128, 0.0156, 0.0044]
//! # valid_range_nm = [220.0, 1060.0]
//! length_mm = 5.0
//! axis_angle_deg = 41.4625        # or "solve"
//!
//! [pump]
//! lambda0_nm = 404.7
//! tau_fs = 110.0
//! energy_scale = 110.0            # optional: maps scaled by energy_scale / tau_fs
//! ```
//!
//! `[crystal]` and `[pump]` are required; `[grid]` and `[analysis]` fall back
//! to the defaults of `configs/default.toml` key by key.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{FitOptions, DEFAULT_PROMINENCE};
use crate::dispersion::{solve_phase_matching_angle, AxisAngle, SellmeierSet};
use crate::error::{Error, Result};
use crate::spectra::{CrystalConfig, Grid1d, Normalization, PumpPulse, SpectrumOptions};

pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SellmeierSpec {
    Builtin(String),
    Inline(SellmeierSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleSpec {
    Degrees(f64),
    /// Must be the string `"solve"`.
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalBlock {
    pub sellmeier: SellmeierSpec,
    pub length_mm: f64,
    pub axis_angle_deg: AngleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpBlock {
    pub lambda0_nm: f64,
    pub tau_fs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub spectrum_start_nm: f64,
    pub spectrum_stop_nm: f64,
    pub spectrum_step_nm: f64,
    pub map_start_nm: f64,
    pub map_stop_nm: f64,
    pub map_points: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            spectrum_start_nm: 795.0,
            spectrum_stop_nm: 825.0,
            spectrum_step_nm: 0.02,
            map_start_nm: 801.0,
            map_stop_nm: 817.0,
            map_points: 801,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisBlock {
    pub prominence: f64,
    pub convolve: bool,
    pub convolve_fwhm_nm: f64,
    pub weighted: bool,
    pub angle_bracket_deg: [f64; 2],
    pub tau_bracket_fs: [f64; 2],
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        Self {
            prominence: DEFAULT_PROMINENCE,
            convolve: false,
            convolve_fwhm_nm: 0.15,
            weighted: true,
            angle_bracket_deg: FitOptions::default().angle_bracket_deg,
            tau_bracket_fs: [110.0, 1000.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crystal: Option<CrystalBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpBlock>,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub analysis: AnalysisBlock,
}

/// Command-line values that replace file values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tau_fs: Option<f64>,
    pub lambda0_nm: Option<f64>,
    pub axis_angle: Option<AngleSpec>,
    pub prominence: Option<f64>,
    pub convolve_fwhm_nm: Option<f64>,
}

/// Crystal with its angle resolved, plus the phase-matching residual when
/// the angle was solved for.
#[derive(Debug, Clone)]
pub struct ResolvedCrystal {
    pub crystal: CrystalConfig,
    pub solved_residual: Option<f64>,
}

impl RunConfig {
    pub fn default_config() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG).expect("shipped default config parses")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Effective configuration as TOML, used to stamp output headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if o.tau_fs.is_some() || o.lambda0_nm.is_some() {
            let pump = self.pump_block_mut()?;
            if let Some(t) = o.tau_fs {
                pump.tau_fs = t;
            }
            if let Some(l) = o.lambda0_nm {
                pump.lambda0_nm = l;
            }
        }
        if let Some(a) = &o.axis_angle {
            self.crystal_block_mut()?.axis_angle_deg = a.clone();
        }
        if let Some(p) = o.prominence {
            self.analysis.prominence = p;
        }
        if let Some(f) = o.convolve_fwhm_nm {
            self.analysis.convolve = true;
            self.analysis.convolve_fwhm_nm = f;
        }
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        if let Some(c) = &self.crystal {
            if let AngleSpec::Keyword(k) = &c.axis_angle_deg {
                if k != "solve" {
                    return Err(Error::Config(format!("axis_angle_deg must be a number or \"solve\", got \"{k}\"")));
                }
            }
            if let SellmeierSpec::Inline(s) = &c.sellmeier {
                s.validate()?;
            }
        }
        let a = &self.analysis;
        if !(a.prominence > 0.0 && a.prominence < 1.0) {
            return Err(Error::Config(format!("analysis.prominence must lie in (0, 1), got {}", a.prominence)));
        }
        if !(a.convolve_fwhm_nm > 0.0) {
            return Err(Error::Config("analysis.convolve_fwhm_nm must be > 0".into()));
        }
        if self.grid.map_points < 2 {
            return Err(Error::Config("grid.map_points must be >= 2".into()));
        }
        Ok(())
    }

    fn crystal_block_mut(&mut self) -> Result<&mut CrystalBlock> {
        self.crystal.as_mut().ok_or_else(|| Error::Config("missing [crystal] block".into()))
    }

    fn pump_block_mut(&mut self) -> Result<&mut PumpBlock> {
        self.pump.as_mut().ok_or_else(|| Error::Config("missing [pump] block".into()))
    }

    pub fn crystal_block(&self) -> Result<&CrystalBlock> {
        self.crystal.as_ref().ok_or_else(|| Error::Config("missing [crystal] block".into()))
    }

    pub fn pump_block(&self) -> Result<&PumpBlock> {
        self.pump.as_ref().ok_or_else(|| Error::Config("missing [pump] block".into()))
    }

    pub fn sellmeier(&self) -> Result<SellmeierSet> {
        match &self.crystal_block()?.sellmeier {
            SellmeierSpec::Builtin(name) => SellmeierSet::builtin(name)
                .ok_or_else(|| Error::Config(format!("unknown built-in sellmeier set '{name}'"))),
            SellmeierSpec::Inline(s) => Ok(s.clone()),
        }
    }

    pub fn pump(&self) -> Result<PumpPulse> {
        let p = self.pump_block()?;
        PumpPulse::new(p.lambda0_nm, p.tau_fs, p.energy_scale).map_err(into_config)
    }

    pub fn crystal(&self) -> Result<ResolvedCrystal> {
        let block = self.crystal_block()?;
        let set = self.sellmeier()?;
        let (angle, solved_residual) = match &block.axis_angle_deg {
            AngleSpec::Degrees(d) => (AxisAngle::interior(d.to_radians()).map_err(into_config)?, None),
            AngleSpec::Keyword(_) => {
                let pm = solve_phase_matching_angle(self.pump_block()?.lambda0_nm, &set)?;
                (pm.angle, Some(pm.residual))
            }
        };
        Ok(ResolvedCrystal {
            crystal: CrystalConfig::new(block.length_mm, angle, set).map_err(into_config)?,
            solved_residual,
        })
    }

    pub fn spectrum_grid(&self) -> Result<Grid1d> {
        let g = &self.grid;
        Grid1d::new(g.spectrum_start_nm, g.spectrum_stop_nm, g.spectrum_step_nm).map_err(into_config)
    }

    pub fn map_grid(&self) -> Result<Grid1d> {
        let g = &self.grid;
        Grid1d::with_points(g.map_start_nm, g.map_stop_nm, g.map_points).map_err(into_config)
    }

    pub fn convolve_fwhm(&self) -> Option<f64> {
        self.analysis.convolve.then_some(self.analysis.convolve_fwhm_nm)
    }

    pub fn spectrum_options(&self, normalization: Normalization) -> SpectrumOptions {
        SpectrumOptions {
            normalization,
            convolve_fwhm_nm: self.convolve_fwhm(),
            parallel: true,
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            angle_bracket_deg: self.analysis.angle_bracket_deg,
            weighted: self.analysis.weighted,
            convolve_fwhm_nm: self.convolve_fwhm(),
            ..FitOptions::default()
        }
    }
}

fn into_config(e: Error) -> Error {
    match e {
        Error::InvalidParameter(msg) => Error::Config(msg),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_resolves() {
        let cfg = RunConfig::default_config();
        let c = cfg.crystal().unwrap();
        assert!((c.crystal.axis_angle.degrees() - 41.4625).abs() < 1e-12);
        assert_eq!(c.crystal.length_mm, 5.0);
        assert_eq!(cfg.pump().unwrap().tau_fs, 110.0);
        assert_eq!(cfg.map_grid().unwrap().len(), 801);
        assert_eq!(cfg.grid, GridBlock::default());
        assert_eq!(cfg.analysis, AnalysisBlock::default());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = DEFAULT_CONFIG.replace("tau_fs = 110.0", "tau_fs = 110.0\ncolour = 3");
        assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Config(_))));
        let text = DEFAULT_CONFIG.replace("[analysis]", "[analysis]\nfoo = 1");
        assert!(RunConfig::from_toml_str(&text).is_err());
        let inline = r#"
[crystal]
length_mm = 5.0
axis_angle_deg = "solve"
[crystal.sellmeier]
name = "x"
ordinary = [2.7405, 0.0184, 0.0179, 0.0155]
extraordinary = [2.3730, 0.0128, 0.0156, 0.0044]
valid_range_nm = [220.0, 1060.0]
extra = 1
[pump]
lambda0_nm = 404.7
tau_fs = 110.0
"#;
        assert!(RunConfig::from_toml_str(inline).is_err());
        let ok = inline.replace("extra = 1\n", "");
        let cfg = RunConfig::from_toml_str(&ok).unwrap();
        let c = cfg.crystal().unwrap();
        assert!((c.crystal.axis_angle.degrees() - 41.4539).abs() < 1e-3);
        assert!(c.solved_residual.unwrap().abs() < 1e-10);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let text = DEFAULT_CONFIG.replace("axis_angle_deg = 41.4625", "axis_angle_deg = \"guess\"");
        assert!(RunConfig::from_toml_str(&text).is_err());
        let text = DEFAULT_CONFIG.replace("\"bbo-eimerl-1987\"", "\"quartz\"");
        assert!(matches!(RunConfig::from_toml_str(&text).unwrap().sellmeier(), Err(Error::Config(_))));
        let text = DEFAULT_CONFIG.replace("length_mm = 5.0", "length_mm = -5.0");
        assert!(matches!(RunConfig::from_toml_str(&text).unwrap().crystal(), Err(Error::Config(_))));
        let text = DEFAULT_CONFIG.replace("prominence = 0.1", "prominence = 1.5");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn missing_blocks() {
        let cfg = RunConfig::from_toml_str("[grid]\nmap_points = 11\n").unwrap();
        assert!(matches!(cfg.pump(), Err(Error::Config(_))));
        assert!(matches!(cfg.crystal(), Err(Error::Config(_))));
        assert_eq!(cfg.grid.map_start_nm, 801.0);
    }

    #[test]
    fn overrides_and_echo() {
        let mut cfg = RunConfig::default_config();
        cfg.apply(&Overrides {
            tau_fs: Some(1000.0),
            axis_angle: Some(AngleSpec::Keyword("solve".into())),
            convolve_fwhm_nm: Some(0.2),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(cfg.pump().unwrap().tau_fs, 1000.0);
        assert_eq!(cfg.convolve_fwhm(), Some(0.2));
        let echoed = RunConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(echoed, cfg);
        assert!(cfg.to_toml().contains("tau_fs = 1000.0"));
    }
}
