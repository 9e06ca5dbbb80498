use magnocool::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 0 ok, 1 other, 2 validation, 3 instability, 4 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                CoreError::Unstable { .. } => 3,
                CoreError::SteadyStateNotConverged { .. }
                | CoreError::QuadratureNotConverged { .. }
                | CoreError::EigenSolver
                | CoreError::Lyapunov(_) => 4,
                CoreError::InvalidParameter { .. }
                | CoreError::NotResonant { .. }
                | CoreError::LoopCannotAct { .. }
                | CoreError::NoStableGain { .. } => 2,
            },
        }
    }
}
