#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use spdc_core::analysis::{CountRecord, ExperimentalSpectrum};
use spdc_core::dispersion::{AxisAngle, SellmeierSet};
use spdc_core::spectra::{CrystalConfig, Grid1d, PumpPulse, SpectrumOptions};

pub const PHI0_DEG: f64 = 41.4625;
pub const LAMBDA0_NM: f64 = 404.7;
pub const LENGTH_MM: f64 = 5.0;
pub const FIXED_LAMBDA2: [f64; 4] = [809.4, 808.4, 807.3, 806.3];

pub fn pump(tau_fs: f64) -> PumpPulse {
    PumpPulse::new(LAMBDA0_NM, tau_fs, None).unwrap()
}

pub fn crystal(phi_deg: f64) -> CrystalConfig {
    CrystalConfig::new(
        LENGTH_MM,
        AxisAngle::from_degrees(phi_deg).unwrap(),
        SellmeierSet::bbo_eimerl_1987(),
    )
    .unwrap()
}

pub fn grid() -> Grid1d {
    Grid1d::new(795.0, 825.0, 0.02).unwrap()
}

pub fn unit_max() -> SpectrumOptions {
    SpectrumOptions::default()
}

/// Density written out directly from the formulas, sharing no code with the
/// library.
pub mod straight {
    use std::f64::consts::{LN_2, PI};

    const C_NM: f64 = 299.792_458;
    const C_UM: f64 = 0.299_792_458;
    const O: [f64; 4] = [2.7405, 0.0184, 0.0179, 0.0155];
    const E: [f64; 4] = [2.3730, 0.0128, 0.0156, 0.0044];

    fn omega(lambda_nm: f64) -> f64 {
        2.0 * PI * C_NM / lambda_nm
    }

    fn n(c: [f64; 4], omega: f64) -> f64 {
        let lam_um = 2.0 * PI * C_NM / omega / 1000.0;
        let l2 = lam_um * lam_um;
        (c[0] + c[1] / (l2 - c[2]) - c[3] * l2).sqrt()
    }

    fn ne(omega: f64, phi: f64) -> f64 {
        let no = n(O, omega);
        let nep = n(E, omega);
        let (s, c) = phi.sin_cos();
        1.0 / (c * c / (no * no) + s * s / (nep * nep)).sqrt()
    }

    fn sinc2(x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else {
            (x.sin() / x).powi(2)
        }
    }

    /// Both branches separately, `(H, V)`, at wavelengths in nm.
    pub fn branches(l1_nm: f64, l2_nm: f64, phi_deg: f64, tau_fs: f64, length_mm: f64, l0_nm: f64) -> (f64, f64) {
        let phi = phi_deg.to_radians();
        let (w1, w2, w0) = (omega(l1_nm), omega(l2_nm), omega(l0_nm));
        let ws = w1 + w2;
        let kp = ne(ws, phi) * ws / C_UM;
        let d12 = kp - n(O, w1) * w1 / C_UM - ne(w2, phi) * w2 / C_UM;
        let d21 = kp - n(O, w2) * w2 / C_UM - ne(w1, phi) * w1 / C_UM;
        let pumpf = (-((ws - w0) * (ws - w0)) * tau_fs * tau_fs / (4.0 * LN_2)).exp();
        let half_l = length_mm * 1e3 / 2.0;
        (pumpf * sinc2(half_l * d12), pumpf * sinc2(half_l * d21))
    }

    pub fn mixed(l1_nm: f64, l2_nm: f64, phi_deg: f64, tau_fs: f64) -> f64 {
        let (h, v) = branches(l1_nm, l2_nm, phi_deg, tau_fs, super::LENGTH_MM, super::LAMBDA0_NM);
        h + v
    }
}

/// Four measured-looking spectra at the given angle: 201 points over
/// 800–820 nm, peak around 1000 counts, multiplicative Gaussian noise of
/// relative size `noise`.
pub fn synthetic_datasets(phi_deg: f64, tau_fs: f64, noise: f64, seed: u64) -> Vec<ExperimentalSpectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    FIXED_LAMBDA2
        .iter()
        .map(|&l2| {
            let xs: Vec<f64> = (0..201).map(|i| 800.0 + 0.1 * i as f64).collect();
            let clean: Vec<f64> = xs.iter().map(|&x| straight::mixed(x, l2, phi_deg, tau_fs)).collect();
            let max = clean.iter().copied().fold(0.0, f64::max);
            let records = xs
                .iter()
                .zip(&clean)
                .map(|(&x, &c)| {
                    let c = 1000.0 * c / max;
                    let counts = (c * (1.0 + noise * normal.sample(&mut rng))).max(0.0);
                    CountRecord {
                        lambda1_nm: x,
                        counts,
                        std: 0.03 * c + 1.0,
                    }
                })
                .collect();
            ExperimentalSpectrum::new(l2, None, records).unwrap()
        })
        .collect()
}

/// Local maxima of `ys` with their prominence, computed by walking outwards
/// from each candidate until a higher sample or the edge.
pub fn brute_force_peaks(xs: &[f64], ys: &[f64], min_prominence: f64) -> Vec<f64> {
    let max = ys.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 1..ys.len() - 1 {
        if !(ys[i] > ys[i - 1] && ys[i] > ys[i + 1]) {
            continue;
        }
        let mut left = ys[i];
        let mut j = i;
        while j > 0 && ys[j - 1] <= ys[i] {
            j -= 1;
            left = left.min(ys[j]);
        }
        let mut right = ys[i];
        let mut k = i;
        while k + 1 < ys.len() && ys[k + 1] <= ys[i] {
            k += 1;
            right = right.min(ys[k]);
        }
        if ys[i] - left.max(right) >= min_prominence * max {
            out.push(xs[i]);
        }
    }
    out
}

pub fn refined_oracle(lambda2: f64, tau: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=15_000).map(|i| 795.0 + 0.002 * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| straight::mixed(x, lambda2, PHI0_DEG, tau)).collect();
    brute_force_peaks(&xs, &ys, spdc_core::analysis::DEFAULT_PROMINENCE)
}
