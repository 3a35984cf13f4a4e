//! Measured coincidence spectra.
//!
//! File format:
//!
//! ```text
//! # lambda2_nm=806.3
//! # hwp2=sum
//! lambda1_nm,counts,std
//! 800.00,12,3.46
//! ...
//! ```
//!
//! `# lambda2_nm=` is required, `# hwp2=` (H, V or sum) optional, other
//! comment lines and blank lines are ignored, the column header line is
//! optional. Every other line must be three numeric fields.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Half-wave-plate routing under which a spectrum was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hwp2Setting {
    HRouted,
    VRouted,
    Summed,
}

impl fmt::Display for Hwp2Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hwp2Setting::HRouted => "H",
            Hwp2Setting::VRouted => "V",
            Hwp2Setting::Summed => "sum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountRecord {
    pub lambda1_nm: f64,
    pub counts: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentalSpectrum {
    pub fixed_lambda2_nm: f64,
    pub hwp2: Option<Hwp2Setting>,
    pub records: Vec<CountRecord>,
}

impl ExperimentalSpectrum {
    pub fn new(fixed_lambda2_nm: f64, hwp2: Option<Hwp2Setting>, records: Vec<CountRecord>) -> Result<Self> {
        if let Some(i) = records.iter().position(|r| !(r.counts >= 0.0 && r.counts.is_finite())) {
            return Err(Error::InvalidParameter(format!("record {i}: counts must be >= 0")));
        }
        if let Some(i) = records.iter().position(|r| !(r.std > 0.0 && r.std.is_finite())) {
            return Err(Error::InvalidParameter(format!("record {i}: std must be > 0")));
        }
        if records.windows(2).any(|w| !(w[1].lambda1_nm > w[0].lambda1_nm)) {
            return Err(Error::InvalidParameter("lambda1 values must be strictly increasing".into()));
        }
        Ok(Self {
            fixed_lambda2_nm,
            hwp2,
            records,
        })
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda1_nm).collect()
    }

    pub fn counts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.counts).collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            msg,
        };
        let mut lambda2 = None;
        let mut hwp2 = None;
        let mut records: Vec<CountRecord> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("lambda2_nm=") {
                    let v: f64 = v
                        .trim()
                        .parse()
                        .map_err(|e| err(line_no, format!("lambda2_nm: {e}")))?;
                    if !(v.is_finite() && v > 0.0) {
                        return Err(err(line_no, format!("lambda2_nm must be > 0, got {v}")));
                    }
                    lambda2 = Some(v);
                } else if let Some(v) = comment.strip_prefix("hwp2=") {
                    hwp2 = Some(match v.trim() {
                        "H" => Hwp2Setting::HRouted,
                        "V" => Hwp2Setting::VRouted,
                        "sum" => Hwp2Setting::Summed,
                        other => return Err(err(line_no, format!("hwp2 must be H, V or sum, got '{other}'"))),
                    });
                }
                continue;
            }
            if line.replace(' ', "") == "lambda1_nm,counts,std" {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err(line_no, format!("expected 3 fields (lambda1_nm,counts,std), found {}", fields.len())));
            }
            let num = |i: usize, name: &str| -> Result<f64> {
                let v: f64 = fields[i].parse().map_err(|e| err(line_no, format!("{name}: {e}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(line_no, format!("{name} is not finite")))
                }
            };
            let rec = CountRecord {
                lambda1_nm: num(0, "lambda1_nm")?,
                counts: num(1, "counts")?,
                std: num(2, "std")?,
            };
            if rec.counts < 0.0 {
                return Err(err(line_no, "counts must be >= 0".into()));
            }
            if rec.std <= 0.0 {
                return Err(err(line_no, "std must be > 0".into()));
            }
            if let Some(prev) = records.last() {
                if rec.lambda1_nm <= prev.lambda1_nm {
                    return Err(err(line_no, "lambda1_nm must be strictly increasing".into()));
                }
            }
            records.push(rec);
        }
        let lambda2 = lambda2.ok_or_else(|| err(0, "missing '# lambda2_nm=' header".into()))?;
        if records.is_empty() {
            return Err(err(0, "no data rows".into()));
        }
        Ok(Self {
            fixed_lambda2_nm: lambda2,
            hwp2,
            records,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# lambda2_nm={}\n", self.fixed_lambda2_nm);
        if let Some(h) = self.hwp2 {
            out.push_str(&format!("# hwp2={h}\n"));
        }
        out.push_str("lambda1_nm,counts,std\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.lambda1_nm, r.counts, r.std));
        }
        out
    }
}
