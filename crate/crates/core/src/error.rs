use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "steady-state fixed point did not converge after {iterations} iterations \
         (last relative step {residual:.3e}); the drive may be in a multistable regime"
    )]
    SteadyStateNotConverged { iterations: usize, residual: f64 },

    #[error("operating point is not resonant (Δ_a = {delta_a:.3e}, Δ̃_m = {delta_m_tilde:.3e} rad/s)")]
    NotResonant { delta_a: f64, delta_m_tilde: f64 },

    #[error("feedback gain g0 = {g0} cannot act with zero magnomechanical coupling")]
    LoopCannotAct { g0: f64 },

    #[error("system is unstable: spectral abscissa {abscissa:.6e} rad/s (threshold {threshold:.6e})")]
    Unstable { abscissa: f64, threshold: f64 },

    #[error("eigenvalue solver failed to converge")]
    EigenSolver,

    #[error("Lyapunov solve failed: {0}")]
    Lyapunov(String),

    #[error(
        "quadrature did not converge: requested relative tolerance {requested:.1e}, \
         achieved {achieved:.3e} after {intervals} subintervals"
    )]
    QuadratureNotConverged { requested: f64, achieved: f64, intervals: usize },

    #[error("no stable gain in range [{lo}, {hi}]")]
    NoStableGain { lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
