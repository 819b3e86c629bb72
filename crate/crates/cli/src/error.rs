use thiserror::Error;

/// Failure classes with their stable process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("unsupported configuration: {0}")]
    Config(String),
    #[error("decode failure: {0}")]
    Decode(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Config(_) => 2,
            CliError::Decode(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<rcia_core::RegionError> for CliError {
    fn from(e: rcia_core::RegionError) -> Self {
        match e {
            rcia_core::RegionError::Export(m) => CliError::Io(m),
            rcia_core::RegionError::Unsupported(m) => CliError::Config(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<rcia_core::EngineError> for CliError {
    fn from(e: rcia_core::EngineError) -> Self {
        match e {
            rcia_core::EngineError::Export(m) => CliError::Io(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<rcia_core::AnalysisError> for CliError {
    fn from(e: rcia_core::AnalysisError) -> Self {
        match e {
            rcia_core::AnalysisError::Export(m) => CliError::Io(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::Verify(String::new()).exit_code(), 1);
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Decode(String::new()).exit_code(), 3);
        assert_eq!(CliError::Io(String::new()).exit_code(), 4);
    }
}
