use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tensor word: {0}")]
    InvalidWord(String),

    #[error("invalid codon {0:?}")]
    InvalidCodon(String),

    #[error("invalid dinucleotide {0:?}")]
    InvalidDimer(String),

    #[error("invalid amino acid {0:?}")]
    InvalidAminoAcid(String),

    #[error("{0} is a stop codon")]
    StopCodon(String),

    #[error("{0} and {1} are not nearest codons")]
    NotNearest(String, String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid strength function: {0}")]
    InvalidStrength(String),

    #[error("time step {tau} exceeds the stochastic bound {bound}")]
    TimeStepTooLarge { tau: f64, bound: f64 },

    #[error("expected a {expected} matrix, got {found}")]
    WrongMatrixKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("codon usage for {amino_acid} sums to {sum}, not 1")]
    UsageNotNormalized { amino_acid: String, sum: f64 },

    #[error("codon usage has no entry for {0}")]
    UsageMissingCodon(String),

    #[error("expected {expected} labels, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("malformed number {0:?}")]
    MalformedNumber(String),

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("checksum mismatch for {file}: manifest {expected}, computed {found}")]
    Checksum {
        file: String,
        expected: String,
        found: String,
    },

    #[error("no feasible point found: {0}")]
    NoFeasiblePoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category, used as `error: <category>: <detail>`.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidWord(_) => "invalid-word",
            Error::InvalidCodon(_) => "invalid-codon",
            Error::InvalidDimer(_) => "invalid-dimer",
            Error::InvalidAminoAcid(_) => "invalid-amino-acid",
            Error::StopCodon(_) => "stop-codon",
            Error::NotNearest(..) => "not-nearest",
            Error::InvalidParams(_) => "invalid-params",
            Error::InvalidStrength(_) => "invalid-strength",
            Error::TimeStepTooLarge { .. } => "time-step",
            Error::WrongMatrixKind { .. } => "matrix-kind",
            Error::UsageNotNormalized { .. } => "usage-not-normalized",
            Error::UsageMissingCodon(_) => "usage-missing-codon",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::UnknownLabel(_) => "unknown-label",
            Error::MalformedNumber(_) => "malformed-number",
            Error::Malformed(_) => "malformed-file",
            Error::Checksum { .. } => "checksum",
            Error::NoFeasiblePoint(_) => "no-feasible-point",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
