use std::fmt;

/// Which wavelength of a three-wave interaction tripped a range check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    /// Direct index evaluation, not part of a mismatch.
    Index,
    Pump,
    Ordinary,
    Extraordinary,
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Leg::Index => "index",
            Leg::Pump => "pump",
            Leg::Ordinary => "ordinary",
            Leg::Extraordinary => "extraordinary",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{leg} wavelength {lambda_nm} nm outside Sellmeier range [{min_nm}, {max_nm}] nm")]
    OutOfRange {
        leg: Leg,
        lambda_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("no phase matching for pump {lambda0_nm} nm: mismatch has no sign change in the angle bracket")]
    NoPhaseMatching { lambda0_nm: f64 },

    #[error("solver hit the iteration limit ({iterations}) at x = {x}")]
    IterationLimit { iterations: usize, x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unexpected peak structure at lambda2 = {lambda2_nm} nm: {peaks} peaks")]
    PeakStructure { lambda2_nm: f64, peaks: usize },

    #[error("spectrum is identically zero; cannot normalize to unit maximum")]
    ZeroSpectrum,

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("coefficient of determination undefined: data has zero variance")]
    UndefinedR2,

    #[error("fit did not converge: {0}")]
    Convergence(String),

    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    ///
    /// 1 = configuration or input format, 2 = numeric, 3 = I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::InvalidParameter(_) => 1,
            Error::OutOfRange { .. }
            | Error::NoPhaseMatching { .. }
            | Error::IterationLimit { .. }
            | Error::PeakStructure { .. }
            | Error::ZeroSpectrum
            | Error::Bracket(_)
            | Error::UndefinedR2
            | Error::Convergence(_) => 2,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
