//! Refractive indices of a uniaxial crystal and the two transposed phase
//! mismatches of collinear type-II down-conversion.
//!
//! Conventions used throughout:
//!
//! * wavelengths are vacuum wavelengths in nm at every public interface and
//!   converted to µm only inside the Sellmeier evaluation;
//! * angular frequencies are in rad/fs;
//! * wave numbers and mismatches are in rad/µm.
//!
//! The pump and variable-2 photon travel as extraordinary waves, variable 1
//! as an ordinary wave in `mismatch_12`; `mismatch_21` swaps the ordinary and
//! extraordinary roles of the two signal photons.

mod solver;

pub use solver::{solve_phase_matching_angle, solve_phase_matching_angle_near, PhaseMatch};

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Leg, Result};

/// Speed of light in µm/fs.
pub const C_UM_PER_FS: f64 = 0.299_792_458;

/// Speed of light in nm/fs.
pub const C_NM_PER_FS: f64 = 299.792_458;

/// Angular frequency in rad/fs.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub fn new(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega > 0.0 {
            Ok(Self(omega))
        } else {
            Err(Error::InvalidParameter(format!(
                "angular frequency must be finite and positive, got {omega}"
            )))
        }
    }

    /// `ω = 2πc/λ` for a vacuum wavelength in nm.
    pub fn from_wavelength_nm(lambda_nm: f64) -> Result<Self> {
        if !(lambda_nm.is_finite() && lambda_nm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be finite and positive, got {lambda_nm}"
            )));
        }
        Self::new(2.0 * PI * C_NM_PER_FS / lambda_nm)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn wavelength_nm(self) -> f64 {
        2.0 * PI * C_NM_PER_FS / self.0
    }
}

impl std::ops::Add for AngularFrequency {
    type Output = AngularFrequency;

    fn add(self, rhs: Self) -> Self {
        AngularFrequency(self.0 + rhs.0)
    }
}

/// Angle between the optic axis and the propagation direction.
///
/// Stored in radians. Construction accepts the closed interval `[0, π/2]` so
/// the optic-axis and principal-plane limits can be evaluated; anything that
/// represents a physical crystal cut should check [`AxisAngle::is_interior`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AxisAngle(f64);

impl AxisAngle {
    pub fn from_radians(phi: f64) -> Result<Self> {
        if phi.is_finite() && (0.0..=FRAC_PI_2).contains(&phi) {
            Ok(Self(phi))
        } else {
            Err(Error::InvalidParameter(format!(
                "axis angle {phi} rad outside [0, pi/2]"
            )))
        }
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::from_radians(deg.to_radians())
    }

    /// Like [`AxisAngle::from_radians`] but rejects the two limits.
    pub fn interior(phi: f64) -> Result<Self> {
        let a = Self::from_radians(phi)?;
        if a.is_interior() {
            Ok(a)
        } else {
            Err(Error::InvalidParameter(format!(
                "axis angle {phi} rad must lie strictly inside (0, pi/2)"
            )))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < FRAC_PI_2
    }
}

impl fmt::Display for AxisAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}°", self.degrees())
    }
}

/// Dispersion data of a uniaxial crystal.
///
/// Both indices use the four-term form
///
/// ```text
/// n²(λ) = A + B / (λ² − C) − D·λ²      (λ in µm)
/// ```
///
/// with coefficients stored as `[A, B, C, D]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierSet {
    pub name: String,
    /// Ordinary index coefficients `[A, B, C, D]`.
    pub ordinary: Vec<f64>,
    /// Principal extraordinary index coefficients `[A, B, C, D]`.
    pub extraordinary: Vec<f64>,
    /// Trusted wavelength interval `[min, max]` in nm.
    pub valid_range_nm: [f64; 2],
}

/// Name of the built-in BBO set.
pub const BBO_EIMERL_1987: &str = "bbo-eimerl-1987";

impl SellmeierSet {
    pub fn new(
        name: impl Into<String>,
        ordinary: [f64; 4],
        extraordinary: [f64; 4],
        valid_range_nm: [f64; 2],
    ) -> Result<Self> {
        let set = Self {
            name: name.into(),
            ordinary: ordinary.to_vec(),
            extraordinary: extraordinary.to_vec(),
            valid_range_nm,
        };
        set.validate()?;
        Ok(set)
    }

    /// β-BaB₂O₄ after D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987),
    /// valid 0.22–1.06 µm.
    pub fn bbo_eimerl_1987() -> Self {
        Self::new(
            BBO_EIMERL_1987,
            [2.7405, 0.0184, 0.0179, 0.0155],
            [2.3730, 0.0128, 0.0156, 0.0044],
            [220.0, 1060.0],
        )
        .expect("built-in set is valid")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            BBO_EIMERL_1987 => Some(Self::bbo_eimerl_1987()),
            _ => None,
        }
    }

    /// Checks coefficient counts, the range, the absence of a pole inside the
    /// range and that both indices are finite and > 1 across it.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("sellmeier set '{}': {msg}", self.name)));
        if self.ordinary.len() != 4 || self.extraordinary.len() != 4 {
            return bad("coefficient lists must have exactly 4 entries [A, B, C, D]".into());
        }
        if self.ordinary.iter().chain(&self.extraordinary).any(|c| !c.is_finite()) {
            return bad("coefficients must be finite".into());
        }
        let [lo, hi] = self.valid_range_nm;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return bad(format!("invalid valid_range_nm [{lo}, {hi}]"));
        }
        let lo_um2 = (lo / 1000.0).powi(2);
        let hi_um2 = (hi / 1000.0).powi(2);
        for c in [&self.ordinary, &self.extraordinary] {
            if c[2] >= lo_um2 && c[2] <= hi_um2 {
                return bad(format!("pole at {} nm inside the valid range", c[2].sqrt() * 1000.0));
            }
        }
        const SAMPLES: usize = 256;
        for i in 0..=SAMPLES {
            let lambda = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            for c in [&self.ordinary, &self.extraordinary] {
                let n = eval_sellmeier(c, lambda);
                if !(n.is_finite() && n > 1.0) {
                    return bad(format!("index {n} at {lambda} nm is not a finite value > 1"));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, lambda_nm: f64) -> bool {
        let [lo, hi] = self.valid_range_nm;
        lambda_nm >= lo && lambda_nm <= hi
    }

    fn check(&self, lambda_nm: f64, leg: Leg) -> Result<()> {
        if self.contains(lambda_nm) {
            Ok(())
        } else {
            let [min_nm, max_nm] = self.valid_range_nm;
            Err(Error::OutOfRange {
                leg,
                lambda_nm,
                min_nm,
                max_nm,
            })
        }
    }

    pub fn ordinary_index(&self, lambda_nm: f64) -> Result<f64> {
        self.check(lambda_nm, Leg::Index)?;
        Ok(eval_sellmeier(&self.ordinary, lambda_nm))
    }

    pub fn principal_extraordinary_index(&self, lambda_nm: f64) -> Result<f64> {
        self.check(lambda_nm, Leg::Index)?;
        Ok(eval_sellmeier(&self.extraordinary, lambda_nm))
    }

    /// Extraordinary index at angle `phi` to the optic axis, from the index
    /// ellipse `1/n² = cos²φ/n_o² + sin²φ/n_e²`.
    pub fn extraordinary_index(&self, lambda_nm: f64, phi: AxisAngle) -> Result<f64> {
        self.check(lambda_nm, Leg::Index)?;
        Ok(self.ellipse_index(lambda_nm, phi))
    }

    fn ellipse_index(&self, lambda_nm: f64, phi: AxisAngle) -> f64 {
        let n_o = eval_sellmeier(&self.ordinary, lambda_nm);
        let n_e = eval_sellmeier(&self.extraordinary, lambda_nm);
        let (s, c) = phi.radians().sin_cos();
        1.0 / (c * c / (n_o * n_o) + s * s / (n_e * n_e)).sqrt()
    }

    /// Ordinary-wave wave number in rad/µm.
    fn k_ordinary(&self, omega: AngularFrequency, leg: Leg) -> Result<f64> {
        let lambda = omega.wavelength_nm();
        self.check(lambda, leg)?;
        Ok(eval_sellmeier(&self.ordinary, lambda) * omega.value() / C_UM_PER_FS)
    }

    /// Extraordinary-wave wave number in rad/µm.
    fn k_extraordinary(&self, omega: AngularFrequency, phi: AxisAngle, leg: Leg) -> Result<f64> {
        let lambda = omega.wavelength_nm();
        self.check(lambda, leg)?;
        Ok(self.ellipse_index(lambda, phi) * omega.value() / C_UM_PER_FS)
    }

    /// `k_e(ω_o + ω_e) − k_o(ω_o) − k_e(ω_e)`: shared by both orderings so
    /// that the transposition identity holds bit for bit.
    fn mismatch(&self, omega_o: AngularFrequency, omega_e: AngularFrequency, phi: AxisAngle) -> Result<f64> {
        let k_p = self.k_extraordinary(omega_o + omega_e, phi, Leg::Pump)?;
        let k_o = self.k_ordinary(omega_o, Leg::Ordinary)?;
        let k_e = self.k_extraordinary(omega_e, phi, Leg::Extraordinary)?;
        Ok(k_p - k_o - k_e)
    }

    /// Δ₁₂: photon 1 ordinary, photon 2 extraordinary. rad/µm.
    pub fn mismatch_12(&self, omega1: AngularFrequency, omega2: AngularFrequency, phi: AxisAngle) -> Result<f64> {
        self.mismatch(omega1, omega2, phi)
    }

    /// Δ₂₁: photon 2 ordinary, photon 1 extraordinary. rad/µm.
    pub fn mismatch_21(&self, omega1: AngularFrequency, omega2: AngularFrequency, phi: AxisAngle) -> Result<f64> {
        self.mismatch(omega2, omega1, phi)
    }
}

fn eval_sellmeier(c: &[f64], lambda_nm: f64) -> f64 {
    let l2 = (lambda_nm / 1000.0) * (lambda_nm / 1000.0);
    (c[0] + c[1] / (l2 - c[2]) - c[3] * l2).sqrt()
}
