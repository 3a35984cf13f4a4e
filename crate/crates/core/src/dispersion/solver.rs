use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::{AngularFrequency, AxisAngle, SellmeierSet};
use crate::error::{Error, Leg, Result};

/// Mismatch at which the solver stops, rad/µm. With |dΔ/dφ| ≈ 2 rad/µm for
/// BBO this pins the angle far below 1e-9 rad.
const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;
/// Angles closer than this to 0 or π/2 are not searched.
const EDGE: f64 = 1e-6;
const SCAN_INTERVALS: usize = 180;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseMatch {
    #[serde(skip)]
    pub angle: AxisAngle,
    /// `Δ₁₂(ω₀/2, ω₀/2)` at the returned angle, rad/µm.
    pub residual: f64,
    pub iterations: usize,
}

/// Axis angle at which both mismatches vanish for degenerate photons at
/// half the pump frequency.
pub fn solve_phase_matching_angle(pump_lambda0_nm: f64, set: &SellmeierSet) -> Result<PhaseMatch> {
    solve(pump_lambda0_nm, set, None)
}

/// Same as [`solve_phase_matching_angle`], with the bracket grown outwards
/// from `guess` (radians) instead of scanned over the whole quadrant.
pub fn solve_phase_matching_angle_near(
    pump_lambda0_nm: f64,
    set: &SellmeierSet,
    guess: f64,
) -> Result<PhaseMatch> {
    solve(pump_lambda0_nm, set, Some(guess))
}

fn solve(pump_lambda0_nm: f64, set: &SellmeierSet, guess: Option<f64>) -> Result<PhaseMatch> {
    for (lambda, leg) in [(pump_lambda0_nm, Leg::Pump), (2.0 * pump_lambda0_nm, Leg::Ordinary)] {
        if !set.contains(lambda) {
            let [min_nm, max_nm] = set.valid_range_nm;
            return Err(Error::OutOfRange {
                leg,
                lambda_nm: lambda,
                min_nm,
                max_nm,
            });
        }
    }
    let half = AngularFrequency::from_wavelength_nm(2.0 * pump_lambda0_nm)?;
    let f = |phi: f64| -> Result<f64> { set.mismatch_12(half, half, AxisAngle::from_radians(phi)?) };

    let (lo, hi) = match guess {
        None => scan_bracket(&f)?,
        Some(g) => grow_bracket(&f, g)?,
    }
    .ok_or(Error::NoPhaseMatching {
        lambda0_nm: pump_lambda0_nm,
    })?;

    let (phi, residual, iterations) = refine(&f, lo, hi)?;
    Ok(PhaseMatch {
        angle: AxisAngle::interior(phi)?,
        residual,
        iterations,
    })
}

type Bracket = Option<((f64, f64), (f64, f64))>;

fn scan_bracket(f: &impl Fn(f64) -> Result<f64>) -> Result<Bracket> {
    let span = FRAC_PI_2 - 2.0 * EDGE;
    let mut prev = (EDGE, f(EDGE)?);
    for i in 1..=SCAN_INTERVALS {
        let x = EDGE + span * i as f64 / SCAN_INTERVALS as f64;
        let cur = (x, f(x)?);
        if prev.1 == 0.0 || prev.1.signum() != cur.1.signum() {
            return Ok(Some((prev, cur)));
        }
        prev = cur;
    }
    Ok(None)
}

fn grow_bracket(f: &impl Fn(f64) -> Result<f64>, guess: f64) -> Result<Bracket> {
    let clamp = |x: f64| x.clamp(EDGE, FRAC_PI_2 - EDGE);
    let mut h = 1e-6;
    loop {
        let a = clamp(guess - h);
        let b = clamp(guess + h);
        let (fa, fb) = (f(a)?, f(b)?);
        if fa == 0.0 || fb == 0.0 || fa.signum() != fb.signum() {
            return Ok(Some(((a, fa), (b, fb))));
        }
        if a <= EDGE && b >= FRAC_PI_2 - EDGE {
            return Ok(None);
        }
        h *= 4.0;
    }
}

/// Bracketed secant (Illinois false position) with a bisection fallback.
fn refine(
    f: &impl Fn(f64) -> Result<f64>,
    (mut a, mut fa): (f64, f64),
    (mut b, mut fb): (f64, f64),
) -> Result<(f64, f64, usize)> {
    if fa == 0.0 {
        return Ok((a, fa, 0));
    }
    if fb == 0.0 {
        return Ok((b, fb, 0));
    }
    // which end was retained on the previous step: -1 = a, +1 = b
    let mut side = 0i8;
    let mut stale = 0u8;
    for it in 1..=MAX_ITER {
        if b - a <= 2.0 * f64::EPSILON * b.abs() {
            let (x, fx) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok((x, fx, it));
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if stale >= 3 || !(secant > a && secant < b) {
            stale = 0;
            0.5 * (a + b)
        } else {
            secant
        };
        let fx = f(x)?;
        if fx.abs() <= RESIDUAL_TOL {
            return Ok((x, fx, it));
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
                stale += 1;
            } else {
                stale = 0;
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
                stale += 1;
            } else {
                stale = 0;
            }
            side = -1;
        }
    }
    Err(Error::IterationLimit {
        iterations: MAX_ITER,
        x: 0.5 * (a + b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_sign_change_is_reported() {
        // isotropic crystal: the mismatch does not depend on the angle
        let iso = SellmeierSet::new("iso", [2.7, 0.018, 0.018, 0.015], [2.7, 0.018, 0.018, 0.015], [220.0, 1060.0])
            .unwrap();
        assert!(matches!(
            solve_phase_matching_angle(404.7, &iso),
            Err(Error::NoPhaseMatching { .. })
        ));
        assert!(matches!(
            solve_phase_matching_angle_near(404.7, &iso, 0.7),
            Err(Error::NoPhaseMatching { .. })
        ));
    }

    #[test]
    fn pump_range_is_checked() {
        let bbo = SellmeierSet::bbo_eimerl_1987();
        assert!(matches!(
            solve_phase_matching_angle(600.0, &bbo),
            Err(Error::OutOfRange { leg: Leg::Ordinary, .. })
        ));
        assert!(matches!(
            solve_phase_matching_angle(200.0, &bbo),
            Err(Error::OutOfRange { leg: Leg::Pump, .. })
        ));
    }

    #[test]
    fn converges_to_small_residual() {
        let bbo = SellmeierSet::bbo_eimerl_1987();
        let pm = solve_phase_matching_angle(404.7, &bbo).unwrap();
        assert!(pm.residual.abs() < 1e-10, "{pm:?}");
        assert!(pm.iterations < 60, "{pm:?}");
    }
}
