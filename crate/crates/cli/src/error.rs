//! CLI errors and the machine-readable error line.

use std::fmt;

/// Where a configuration value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
    Default,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: key '{key}': {message}")]
    Config { origin: OriginDisplay, key: String, message: String },

    #[error("{0}")]
    Core(#[from] morrey_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// `Origin` with its key, for messages such as `line 3` or `flag --p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginDisplay {
    pub origin: Origin,
    pub key: String,
}

impl fmt::Display for OriginDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => write!(f, "flag --{}", self.key),
            Origin::Default => write!(f, "default"),
        }
    }
}

impl CliError {
    pub fn config(origin: Origin, key: &str, message: impl Into<String>) -> Self {
        CliError::Config { origin: OriginDisplay { origin, key: key.to_string() }, key: key.to_string(), message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            CliError::Config { origin: OriginDisplay { origin: Origin::Line(n), .. }, .. } => Some(*n),
            _ => None,
        }
    }

    /// Single tab-separated line: `error`, `kind=…`, optional `line=…` and `key=…`, `message=…`.
    pub fn machine_line(&self) -> String {
        let mut out = format!("error\tkind={}", self.kind());
        if let Some(n) = self.line() {
            out.push_str(&format!("\tline={n}"));
        }
        if let CliError::Config { key, .. } = self {
            out.push_str(&format!("\tkey={key}"));
        }
        let message = self.to_string().replace(['\t', '\n'], " ");
        out.push_str(&format!("\tmessage={message}"));
        out
    }
}
