use std::path::PathBuf;

/// Harness failures. `Display` is a single `key=value` line so scripts can
/// parse the reason of a failed run.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("kind=unknown_key experiment={experiment} key={key}")]
    UnknownKey { experiment: &'static str, key: String },
    #[error("kind=missing_key experiment={experiment} key={key}")]
    MissingKey { experiment: &'static str, key: &'static str },
    #[error("kind=invalid_value key={key} reason={reason:?}")]
    InvalidValue { key: String, reason: String },
    #[error("kind=config reason={0:?}")]
    Config(String),
    #[error("kind=io path={path:?} reason={:?}", .source.to_string())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("kind=model reason={:?}", .0.to_string())]
    Model(#[from] hypimetric::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> HarnessError {
    HarnessError::InvalidValue {
        key: key.into(),
        reason: reason.into(),
    }
}

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
