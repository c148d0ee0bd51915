use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates a module invariant. `path` names the
    /// offending field, e.g. `grid.penetration` or `plants[0].p_headroom`.
    #[error("invalid `{path}`: {reason}")]
    Invalid { path: String, reason: String },

    /// The document could not be decoded at all.
    #[error("malformed document at `{path}`: {reason}")]
    Malformed { path: String, reason: String },

    /// The integrator produced NaN or infinity.
    #[error("non-finite state `{variable}` at t = {t:.4} s")]
    NonFinite { variable: String, t: f64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for numerical aborts, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. } => 2,
            _ => 1,
        }
    }
}

/// Field-level checks shared by every parameter struct.
pub(crate) mod check {
    use super::{Error, Result};

    pub fn finite(path: &str, v: f64) -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(path, format!("must be finite, got {v}")))
        }
    }

    pub fn positive(path: &str, v: f64) -> Result<()> {
        finite(path, v)?;
        if v > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(path, format!("must be > 0, got {v}")))
        }
    }

    pub fn non_negative(path: &str, v: f64) -> Result<()> {
        finite(path, v)?;
        if v >= 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(path, format!("must be >= 0, got {v}")))
        }
    }

    pub fn in_range(path: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
        finite(path, v)?;
        if (lo..=hi).contains(&v) {
            Ok(())
        } else {
            Err(Error::invalid(
                path,
                format!("must lie in [{lo}, {hi}], got {v}"),
            ))
        }
    }
}
