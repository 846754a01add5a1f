use std::path::PathBuf;

/// Errors of the file formats, the solver driver and the command line.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{file}:{line}:{column}: {message}")]
    Syntax {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Core(#[from] distcert_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("solver: {0}")]
    Solver(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn syntax(file: &str, line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            file: file.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    /// Process exit status for this error: usage problems are 2, the rest 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Usage(_) | Error::Io { .. } => 2,
            Error::Core(e) => match e {
                distcert_core::Error::Model(_)
                | distcert_core::Error::Solver(_)
                | distcert_core::Error::MonoidTooLarge { .. } => 3,
                _ => 2,
            },
            Error::Solver(_) => 3,
        }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &std::path::Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
