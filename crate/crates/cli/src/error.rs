use complex_oscillator::Error as CoreError;
use std::fmt;
use std::process::ExitCode;

/// A failure with the process exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const VERIFICATION: u8 = 1;
pub const PARAMETER_DOMAIN: u8 = 2;
pub const RESOLUTION: u8 = 3;
pub const UNSUPPORTED: u8 = 4;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::Argument(_) | CoreError::ParameterDomain(_) | CoreError::LengthMismatch { .. } => {
                PARAMETER_DOMAIN
            }
            CoreError::Resolution { .. } | CoreError::BasisSize { .. } => RESOLUTION,
            CoreError::DegenerateNormalization(_)
            | CoreError::Normalization(_)
            | CoreError::Consistency(_) => VERIFICATION,
        };
        Self::new(code, err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Self::new(VERIFICATION, format!("i/o error: {err}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(err: serde_json::Error) -> Self {
        Self::new(VERIFICATION, format!("serialization error: {err}"))
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
