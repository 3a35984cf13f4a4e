//! C interface to `spdc-core`.
//!
//! A model is created with [`spdc_model_new_default`] or
//! [`spdc_model_from_config_str`], used through the functions below and
//! released with [`spdc_model_free`]. Every fallible function returns a
//! [`SpdcStatus`]; on failure [`spdc_last_error_message`] describes the error.
//!
//! Array outputs follow the capacity convention: the caller passes a buffer
//! and its capacity, the required length is always written to `out_len`, and
//! `SPDC_STATUS_BUFFER_TOO_SMALL` is returned (without writing the buffer) if
//! the capacity is insufficient. Passing a null buffer with capacity 0 is the
//! way to query the length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spdc_core::analysis::find_peaks;
use spdc_core::config::RunConfig;
use spdc_core::dispersion::{solve_phase_matching_angle, AngularFrequency, AxisAngle};
use spdc_core::spectra::{
    conditional_spectrum, joint_density_map, CrystalConfig, Grid1d, Normalization, PumpPulse, SpectrumOptions,
};
use spdc_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Parse = 4,
    OutOfRange = 5,
    NoPhaseMatching = 6,
    Numerical = 7,
    BufferTooSmall = 8,
    Io = 9,
    Panic = 10,
}

/// Opaque model: pump pulse and crystal.
pub struct SpdcModel {
    pump: PumpPulse,
    crystal: CrystalConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpdcStatus {
    match e {
        Error::OutOfRange { .. } => SpdcStatus::OutOfRange,
        Error::NoPhaseMatching { .. } => SpdcStatus::NoPhaseMatching,
        Error::InvalidParameter(_) => SpdcStatus::InvalidArgument,
        Error::Config(_) => SpdcStatus::Config,
        Error::Parse { .. } => SpdcStatus::Parse,
        Error::Io(_) => SpdcStatus::Io,
        Error::IterationLimit { .. }
        | Error::PeakStructure { .. }
        | Error::ZeroSpectrum
        | Error::Bracket(_)
        | Error::UndefinedR2
        | Error::Convergence(_) => SpdcStatus::Numerical,
    }
}

struct Failure(SpdcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpdcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SpdcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SpdcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn model_ref<'a>(m: *const SpdcModel) -> Result<&'a SpdcModel, Failure> {
    m.as_ref().ok_or_else(|| null("model"))
}

unsafe fn model_mut<'a>(m: *mut SpdcModel) -> Result<&'a mut SpdcModel, Failure> {
    m.as_mut().ok_or_else(|| null("model"))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn fill(values: &[f64], out: *mut f64, capacity: usize, out_len: *mut usize) -> Result<(), Failure> {
    write(out_len, values.len(), "out_len")?;
    if out.is_null() || capacity < values.len() {
        return Err(Failure(
            SpdcStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", values.len()),
        ));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

fn from_config(cfg: &RunConfig) -> Result<SpdcModel, Failure> {
    Ok(SpdcModel {
        pump: cfg.pump()?,
        crystal: cfg.crystal()?.crystal,
    })
}

fn normalization(unit_max: bool) -> Normalization {
    if unit_max {
        Normalization::UnitMax
    } else {
        Normalization::Raw
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn spdc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn spdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Model with the built-in default configuration.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_new_default(out: *mut *mut SpdcModel) -> SpdcStatus {
    guard(|| {
        let m = from_config(&RunConfig::default_config())?;
        write(out, Box::into_raw(Box::new(m)), "out")
    })
}

/// Model from a TOML configuration string (same schema as the CLI).
///
/// # Safety
/// `toml` must be a nul-terminated string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_from_config_str(toml: *const c_char, out: *mut *mut SpdcModel) -> SpdcStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|_| Failure(SpdcStatus::InvalidArgument, "config is not UTF-8".into()))?;
        let m = from_config(&RunConfig::from_toml_str(text)?)?;
        write(out, Box::into_raw(Box::new(m)), "out")
    })
}

/// Releases a model. Null is accepted.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_free(model: *mut SpdcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_set_tau_fs(model: *mut SpdcModel, tau_fs: f64) -> SpdcStatus {
    guard(|| {
        let m = model_mut(model)?;
        m.pump = m.pump.with_tau(tau_fs)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_set_lambda0_nm(model: *mut SpdcModel, lambda0_nm: f64) -> SpdcStatus {
    guard(|| {
        let m = model_mut(model)?;
        m.pump = PumpPulse::new(lambda0_nm, m.pump.tau_fs, m.pump.energy_scale)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_set_length_mm(model: *mut SpdcModel, length_mm: f64) -> SpdcStatus {
    guard(|| {
        let m = model_mut(model)?;
        m.crystal = CrystalConfig::new(length_mm, m.crystal.axis_angle, m.crystal.dispersion.clone())?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_set_axis_angle_deg(model: *mut SpdcModel, degrees: f64) -> SpdcStatus {
    guard(|| {
        let m = model_mut(model)?;
        let angle = AxisAngle::interior(degrees.to_radians())?;
        m.crystal = m.crystal.with_axis_angle(angle);
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle, `out_degrees` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spdc_model_axis_angle_deg(model: *const SpdcModel, out_degrees: *mut f64) -> SpdcStatus {
    guard(|| write(out_degrees, model_ref(model)?.crystal.axis_angle.degrees(), "out_degrees"))
}

/// Degenerate phase-matching angle for the model's pump wavelength and
/// dispersion. Does not change the model.
///
/// # Safety
/// `model` must be a live handle; output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn spdc_phase_matching_angle(
    model: *const SpdcModel,
    out_degrees: *mut f64,
    out_residual: *mut f64,
) -> SpdcStatus {
    guard(|| {
        let m = model_ref(model)?;
        let pm = solve_phase_matching_angle(m.pump.lambda0_nm, &m.crystal.dispersion)?;
        write(out_degrees, pm.angle.degrees(), "out_degrees")?;
        write(out_residual, pm.residual, "out_residual")
    })
}

/// Both phase mismatches (rad/µm) at the model's axis angle.
///
/// # Safety
/// `model` must be a live handle; output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn spdc_mismatch(
    model: *const SpdcModel,
    lambda1_nm: f64,
    lambda2_nm: f64,
    out_delta12: *mut f64,
    out_delta21: *mut f64,
) -> SpdcStatus {
    guard(|| {
        let m = model_ref(model)?;
        let w1 = AngularFrequency::from_wavelength_nm(lambda1_nm)?;
        let w2 = AngularFrequency::from_wavelength_nm(lambda2_nm)?;
        let set = &m.crystal.dispersion;
        write(out_delta12, set.mismatch_12(w1, w2, m.crystal.axis_angle)?, "out_delta12")?;
        write(out_delta21, set.mismatch_21(w1, w2, m.crystal.axis_angle)?, "out_delta21")
    })
}

/// Coincidence spectrum at fixed `lambda2_nm` over `start_nm..=stop_nm` in
/// steps of `step_nm`. Densities go to `out_density`; the `λ₁` abscissas
/// are those of the grid, `start_nm + i·step_nm`.
///
/// # Safety
/// `model` must be a live handle; `out_density` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn spdc_conditional_spectrum(
    model: *const SpdcModel,
    lambda2_nm: f64,
    start_nm: f64,
    stop_nm: f64,
    step_nm: f64,
    unit_max: bool,
    out_density: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> SpdcStatus {
    guard(|| {
        let m = model_ref(model)?;
        let grid = Grid1d::new(start_nm, stop_nm, step_nm)?;
        let opts = SpectrumOptions {
            normalization: normalization(unit_max),
            ..SpectrumOptions::default()
        };
        let s = conditional_spectrum(lambda2_nm, &grid, &m.pump, &m.crystal, &opts)?;
        fill(&s.densities(), out_density, capacity, out_len)
    })
}

/// Joint density on a square `points × points` grid over
/// `start_nm..=stop_nm`, row-major with rows indexed by `λ₁`.
///
/// # Safety
/// `model` must be a live handle; `out_values` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn spdc_joint_map(
    model: *const SpdcModel,
    start_nm: f64,
    stop_nm: f64,
    points: usize,
    unit_max: bool,
    out_values: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> SpdcStatus {
    guard(|| {
        let m = model_ref(model)?;
        let grid = Grid1d::with_points(start_nm, stop_nm, points)?;
        let needed = points * points;
        if out_values.is_null() || capacity < needed {
            // report the size without evaluating the map
            write(out_len, needed, "out_len")?;
            return Err(Failure(
                SpdcStatus::BufferTooSmall,
                format!("buffer holds {capacity} values, {needed} needed"),
            ));
        }
        let map = joint_density_map(&grid, &grid, &m.pump, &m.crystal, normalization(unit_max), true)?;
        fill(&map.values, out_values, capacity, out_len)
    })
}

/// Number of peaks of the unit-max spectrum at `lambda2_nm` on the grid
/// `start_nm..=stop_nm` (step `step_nm`) with prominence at least
/// `min_prominence` times the maximum.
///
/// # Safety
/// `model` must be a live handle; `out_count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spdc_count_peaks(
    model: *const SpdcModel,
    lambda2_nm: f64,
    start_nm: f64,
    stop_nm: f64,
    step_nm: f64,
    min_prominence: f64,
    out_count: *mut usize,
) -> SpdcStatus {
    guard(|| {
        let m = model_ref(model)?;
        let grid = Grid1d::new(start_nm, stop_nm, step_nm)?;
        let s = conditional_spectrum(lambda2_nm, &grid, &m.pump, &m.crystal, &SpectrumOptions::default())?;
        write(out_count, find_peaks(&s, min_prominence)?.len(), "out_count")
    })
}
