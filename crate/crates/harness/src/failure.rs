use std::fmt;

/// Process exit code with a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub const CONFIG: i32 = 2;
    pub const DIVERGED: i32 = 3;
    pub const RUNTIME: i32 = 1;

    pub fn config(message: impl Into<String>) -> Self {
        Self { code: Self::CONFIG, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self { code: Self::RUNTIME, message: message.into() }
    }

    /// Maps a core error raised while running `seed`.
    pub fn from_run(err: qrc_core::Error, seed: u64) -> Self {
        let code = match err {
            qrc_core::Error::Divergence(_) => Self::DIVERGED,
            qrc_core::Error::InvalidParameter(_) | qrc_core::Error::Preset(_) | qrc_core::Error::Dimension(_) => {
                Self::CONFIG
            }
            _ => Self::RUNTIME,
        };
        Self { code, message: format!("seed {seed}: {err}") }
    }

    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        Self::runtime(format!("{}: {err}", path.display()))
    }
}

impl From<qrc_core::Error> for Failure {
    fn from(err: qrc_core::Error) -> Self {
        match err {
            qrc_core::Error::Divergence(_) => Self { code: Self::DIVERGED, message: err.to_string() },
            _ => Self::config(err.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}
