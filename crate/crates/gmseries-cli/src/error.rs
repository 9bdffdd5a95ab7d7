use std::path::PathBuf;

/// Everything that can stop the CLI, with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Library(#[from] gmseries::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn code(&self) -> i32 {
        use gmseries::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Json(_) => 2,
            CliError::Library(e) => match e {
                E::UnknownGenerator(_)
                | E::InvalidParameter { .. }
                | E::SingularPoint { .. }
                | E::HorizonTooSmall { .. }
                | E::InvalidGrid
                | E::NotSerializable(_) => 2,
                E::BetaAtBoundary { .. }
                | E::NoTailCertificate { .. }
                | E::NotSummable { .. }
                | E::QuadratureFailed { .. }
                | E::MissingEnvelope
                | E::ZeroDenominator => 5,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        use gmseries::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Json(_) => "json",
            CliError::Library(e) => match e {
                E::UnknownGenerator(_) => "unknown_generator",
                E::InvalidParameter { .. } => "invalid_parameter",
                E::SingularPoint { .. } => "singular_point",
                E::HorizonTooSmall { .. } => "horizon_too_small",
                E::BetaAtBoundary { .. } => "beta_at_boundary",
                E::NoTailCertificate { .. } => "no_tail_certificate",
                E::NotSummable { .. } => "not_summable",
                E::QuadratureFailed { .. } => "quadrature_failed",
                E::MissingEnvelope => "missing_envelope",
                E::ZeroDenominator => "zero_denominator",
                E::InvalidGrid => "invalid_grid",
                E::NotSerializable(_) => "not_serializable",
            },
        }
    }

    /// The one-line form printed on stderr.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("gmseries: error code={} kind={}: {}", self.code(), self.kind(), msg)
    }
}

pub type CliResult<T> = Result<T, CliError>;
