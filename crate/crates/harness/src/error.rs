use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] tomolab_core::Error),
    #[error("lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: tomolab_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
}

impl HarnessError {
    /// 2 for failed certificates, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Certificate(_) | HarnessError::Core(tomolab_core::Error::CertificateFailure(_)) => 2,
            HarnessError::AtLambda {
                source: tomolab_core::Error::CertificateFailure(_),
                ..
            } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    pub(crate) fn at_lambda(lambda: f64) -> impl FnOnce(tomolab_core::Error) -> Self {
        move |source| HarnessError::AtLambda { lambda, source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
