use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("invalid physical parameter `{field}`: {reason}")]
    InvalidPhysical { field: &'static str, reason: String },

    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |M - M†| = {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("degenerate steady state: kernel dimension {kernel_dim}, expected 1")]
    DegenerateSteadyState { kernel_dim: usize },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("negative continuum readout {0:e}; the readout functional is inconsistent")]
    NegativeReadout(f64),

    #[error(
        "no closed form for Gamma_e = {gamma_e}, gamma_eg = {gamma_eg}; \
         fit oracle or kernel profiles instead"
    )]
    UnsupportedClosedForm { gamma_e: f64, gamma_eg: f64 },

    #[error("asymmetry parameter q must be nonzero")]
    ZeroAsymmetry,

    #[error("continuum grid violates resolution floor: {0}")]
    ResolutionFloor(String),

    #[error("continuum grid of {n} states exceeds the limit of {max}")]
    GridTooLarge { n: usize, max: usize },

    #[error("oracle did not converge: {}", trace_summary(.trace))]
    NonConvergence { trace: Vec<crate::oracle::ConvergenceStep> },

    #[error("invalid profile samples: {0}")]
    InvalidSamples(String),

    #[error("profile has no resolvable feature (flat or monotone samples)")]
    NoFeature,

    #[error("fit did not converge after {iterations} iterations")]
    FitDiverged { iterations: usize },

    #[error("rank-deficient Jacobian; degenerate direction {direction}")]
    RankDeficient { direction: String },
}

impl Error {
    /// Failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSteadyState { .. }
                | Error::Decomposition(_)
                | Error::NegativeReadout(_)
                | Error::NonConvergence { .. }
                | Error::FitDiverged { .. }
                | Error::RankDeficient { .. }
                | Error::NoFeature
        )
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn trace_summary(trace: &[crate::oracle::ConvergenceStep]) -> String {
    trace
        .iter()
        .map(|s| format!("(N={}, W={}, n_c={:.6e})", s.n, s.half_width, s.n_c))
        .collect::<Vec<_>>()
        .join(" -> ")
}
