use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VersionError {
    #[error("invalid version {text:?} at byte {position}")]
    Invalid { text: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequirementError {
    #[error("invalid package name {0:?}")]
    InvalidName(String),
    #[error("invalid requirement {text:?} at byte {position}: {reason}")]
    Invalid {
        text: String,
        position: usize,
        reason: String,
    },
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("input is not JSON Lines: {0}")]
    Format(String),
    #[error("corrupt dependency database: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("unknown seed package {0:?}")]
    UnknownSeed(String),
    #[error("no seed packages given")]
    NoSeeds,
    #[error("unsupported export format {0:?}")]
    UnsupportedFormat(String),
    #[error("graph invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("cluster {0:?} has no edges")]
    DegenerateCluster(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("p-value {0} outside [0, 1]")]
    InvalidP(f64),
    #[error("invalid counts: {x} successes out of {n}")]
    InvalidCounts { x: u64, n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("package {package:?} version {version} in the supply chain is not in the registry")]
    RegistryMismatch { package: String, version: String },
    #[error("package {0:?} has a supply-chain version newer than the registry's latest")]
    AheadOfRegistry(String),
    #[error("graph was built from registry {graph} but the registry is {registry}")]
    HashMismatch { graph: String, registry: String },
    #[error("malformed downloads table at line {line}: {reason}")]
    Downloads { line: usize, reason: String },
}
