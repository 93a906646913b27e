//! Forward-time simulator of a two-sex genetic algorithm with mate choice,
//! instrumented with two entropy measures per generation: the summed
//! per-locus Shannon entropy of the population and an LZ78 estimate of the
//! Kolmogorov complexity of the whole population snapshot.

pub mod analysis;
pub mod complexity;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod genome;
pub mod lz;
pub mod output;
pub mod runner;
pub mod shannon;

pub use config::{load_config, ExperimentConfig};
pub use error::{Error, ExtinctionCause, Result};
pub use genome::{Genome, Individual, Locus, PhenotypeModel, Population, Sex};
pub use runner::{run_experiment, run_sweep, EntropyTrace, SweepSummary};
