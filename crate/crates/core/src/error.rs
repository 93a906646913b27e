use std::path::PathBuf;

use thiserror::Error;

/// Why a run stopped before reaching its configured generation count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtinctionCause {
    NoMales,
    NoFemales,
    NoOffspring,
}

impl std::fmt::Display for ExtinctionCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExtinctionCause::NoMales => "no males",
            ExtinctionCause::NoFemales => "no females",
            ExtinctionCause::NoOffspring => "no offspring",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("population size {0} is too small (need at least 2)")]
    PopulationTooSmall(usize),

    #[error("empty population")]
    EmptyPopulation,

    #[error("genome length mismatch: {0} vs {1} loci")]
    LociMismatch(usize, usize),

    #[error("locus index {index} out of range for {loci} loci")]
    LocusOutOfRange { index: usize, loci: usize },

    #[error("mother must be female and father must be male")]
    SexRole,

    #[error("extinction: {0}")]
    Extinct(ExtinctionCause),

    #[error("allele {0} does not fit a 16-bit signed field")]
    AlleleOverflow(i32),

    #[error("malformed token {position}: index {index} but dictionary holds {dict_size} phrases")]
    MalformedToken {
        position: usize,
        index: u32,
        dict_size: usize,
    },

    #[error("series `{0}` contains a non-finite value")]
    NonFinite(String),

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("series too short: need more than {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("correlation undefined for a constant series")]
    UndefinedCorrelation,

    #[error("invalid histogram range [{lo}, {hi}] with {bins} bins")]
    HistogramRange { lo: f64, hi: f64, bins: usize },

    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
