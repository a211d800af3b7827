use std::fmt;
use std::fs;
use std::path::Path;

use rigidity_core::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Exit status classes: 1 for a violated property, 2 for bad input.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Violation(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Violation(m) => write!(f, "property violation: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Consistency(m) => CliError::Violation(m),
            Error::Input(m) => CliError::Input(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// A randomized verdict with the seed that produced it and a bound on the
/// probability that it is wrong.
#[derive(Debug, Clone, Serialize)]
pub struct RandomizedVerdict {
    pub name: String,
    pub seed: u64,
    pub error_bound: f64,
}

/// Everything a command prints. `timing` is the only field that may differ
/// between identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub result: Value,
    pub randomized: Vec<RandomizedVerdict>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Collects inputs and randomized verdicts while a command runs.
pub struct Context {
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub randomized: Vec<RandomizedVerdict>,
}

impl Context {
    pub fn new(seed: u64) -> Context {
        Context { seed, inputs: Vec::new(), randomized: Vec::new() }
    }

    pub fn read<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn randomized(&mut self, name: impl Into<String>, seed: u64, error_bound: f64) {
        self.randomized.push(RandomizedVerdict { name: name.into(), seed, error_bound });
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

