use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive rate: {name} = {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("negative {name} = {value}; Rabi frequencies and linewidths must be >= 0")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("generator is singular (condition estimate {condition:.3e}){}", fmt_delta2(*.delta2))]
    SingularGenerator { condition: f64, delta2: Option<f64> },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("integration diverged at t = {t} (|x| = {magnitude})")]
    UnstableStep { t: f64, magnitude: f64 },

    #[error("closed-form expression requires delta1 = 0, got {delta1}")]
    WrongBranch { delta1: f64 },

    #[error("negative radicand {radicand} in the resonance position formula")]
    NegativeRadicand { radicand: f64 },

    #[error("determinant fit is ill-conditioned (held-out relative error {relative_error:.3e})")]
    IllConditionedFit { relative_error: f64 },

    #[error("companion eigenvalue iteration did not converge")]
    RootsNotConverged,

    #[error("self-test failed")]
    SelftestFailed,

    #[error("no local extrema in the scan")]
    NoPeaks,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown figure `{0}`")]
    UnknownFigure(String),

    #[error("unknown spectrum method `{0}`")]
    UnknownMethod(String),

    #[error("invalid parameter file: {0}")]
    ParamFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_delta2(delta2: Option<f64>) -> String {
    match delta2 {
        Some(d) => format!(" at delta2 = {d}"),
        None => String::new(),
    }
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularGenerator { .. }
                | Error::UnstableStep { .. }
                | Error::IllConditionedFit { .. }
                | Error::RootsNotConverged
                | Error::SelftestFailed
                | Error::NegativeRadicand { .. }
                | Error::NoPeaks
        )
    }
}
