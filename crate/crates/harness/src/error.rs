use std::fmt;

use lowdeg_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const INVARIANT: i32 = 4;
}

#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    Budget(String),
    Invariant(String),
    Other(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => exit::CONFIG,
            HarnessError::Budget(_) => exit::BUDGET,
            HarnessError::Invariant(_) => exit::INVARIANT,
            HarnessError::Other(_) => exit::OTHER,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(m) => write!(f, "config error: {m}"),
            HarnessError::Budget(m) => write!(f, "budget error: {m}"),
            HarnessError::Invariant(m) => write!(f, "invariant violation: {m}"),
            HarnessError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<CoreError> for HarnessError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::BudgetExceeded { .. } => HarnessError::Budget(msg),
            CoreError::Invariant(_)
            | CoreError::DegreeExceeded { .. }
            | CoreError::NotCptp(_)
            | CoreError::NotUnitary(_)
            | CoreError::NotBoolean
            | CoreError::Unbounded(_) => HarnessError::Invariant(msg),
            CoreError::InvalidParams(_)
            | CoreError::CapExceeded { .. }
            | CoreError::WrongTarget { .. }
            | CoreError::QubitMismatch { .. }
            | CoreError::ShapeMismatch(_) => HarnessError::Config(msg),
            _ => HarnessError::Other(msg),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Other(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Other(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Other(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
