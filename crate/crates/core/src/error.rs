use thiserror::Error;

/// Errors from the reliability model and code selection.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EccError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
    #[error("invalid RS({n},{k}) over GF(2^{m}): {reason}")]
    InvalidCode { n: u32, k: u32, m: u32, reason: &'static str },
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
    #[error("invalid reliability targets: {0}")]
    InvalidTargets(&'static str),
    #[error("operation requires {expected} mode")]
    ModeMismatch { expected: &'static str },
    #[error("CRC-detected failure probability is 1; goodput undefined")]
    DegenerateDetection,
    #[error("no frame-fail budget in (0, 1] satisfies the targets")]
    InfeasibleBudget,
    #[error("no code in the family meets the target at p_pre = {p_pre:e} (strongest K = {strongest_k})")]
    NoFeasibleCode { p_pre: f64, strongest_k: u32 },
    #[error("code family is empty")]
    EmptyFamily,
}

/// Errors from synthesis cost tables and ECC stack costing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("missing synthesis record: {0}")]
    MissingRecord(String),
    #[error("invalid synthesis record at row {row}: {reason}")]
    InvalidRecord { row: usize, reason: String },
    #[error("synthesis table parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Ecc(#[from] EccError),
}

/// Errors from link library ingestion and link correction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LibraryError {
    #[error("link library parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("link record '{name}' violates invariant: {reason}")]
    Invariant { name: String, reason: String },
    #[error("duplicate link name '{0}'")]
    Duplicate(String),
    #[error("link '{0}' already carries corrected metrics")]
    AlreadyCorrected(String),
    #[error("non-positive energy for figure of merit")]
    ZeroEnergy,
    #[error("link '{name}': {source}")]
    Ecc { name: String, source: EccError },
    #[error("link '{name}': {source}")]
    Cost { name: String, source: CostError },
}

/// Errors from building assignment problems and reading their input files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignError {
    #[error("net '{net}' references unknown edge {chiplet}/{edge}")]
    DanglingEndpoint { net: String, chiplet: String, edge: String },
    #[error("duplicate {kind} '{id}'")]
    Duplicate { kind: &'static str, id: String },
    #[error("invalid {kind} '{id}': {reason}")]
    Invalid { kind: &'static str, id: String, reason: String },
    #[error("invalid problem parameter: {0}")]
    Parameter(&'static str),
    #[error("{file} parse error at line {line}: {message}")]
    Parse { file: &'static str, line: u64, message: String },
    #[error("unknown link filter '{0}' (expected all, electrical, optical)")]
    UnknownFilter(String),
}
