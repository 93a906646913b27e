//! Seeded single runs and parallel sweeps.
//!
//! Every run owns a `ChaCha8Rng` seeded from its config, so results do not
//! depend on scheduling. Rows are measured on the population before it is
//! replaced: row `g` describes generation `g`.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{autocorrelation, histogram, pearson, spearman, Series};
use crate::complexity::{conditional_bits, mean_genome_k, measurement_bytes};
use crate::config::ExperimentConfig;
use crate::dynamics::generation_step;
use crate::error::{Error, ExtinctionCause, Result};
use crate::genome::{init_population, Population};
use crate::lz::lz_bit_size;
use crate::shannon::{entropy_by_sex, genome_entropy_sum};

pub const HISTOGRAM_BINS: usize = 10;
pub const HISTOGRAM_RANGE: (f64, f64) = (-1.0, 1.0);

/// Measurements of one generation. `None` marks a value that does not exist
/// (no previous generation, or an absent sex).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub generation: usize,
    pub pop_size: usize,
    pub h_sum: f64,
    pub h_male: Option<f64>,
    pub h_female: Option<f64>,
    pub k_bits: u64,
    /// `K(previous) - K(this)`.
    pub delta_k: Option<i64>,
    /// Complexity of the previous generation given this one.
    pub conditional_k: Option<u64>,
    pub mean_genome_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Completed,
    /// The population could not produce generation `generation`.
    Extinct {
        generation: usize,
        cause: ExtinctionCause,
    },
    Failed(String),
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Completed => f.write_str("completed"),
            Termination::Extinct { generation, cause } => {
                write!(f, "extinct: {cause} at generation {generation}")
            }
            Termination::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace {
    pub config: ExperimentConfig,
    pub rows: Vec<TraceRow>,
    pub termination: Termination,
}

impl EntropyTrace {
    pub fn h_sum_series(&self) -> Series {
        Series::new("h_sum", self.rows.iter().map(|r| r.h_sum).collect())
            .expect("entropies are finite")
    }

    pub fn k_series(&self) -> Series {
        Series::new(
            "k_bits",
            self.rows.iter().map(|r| r.k_bits as f64).collect(),
        )
        .expect("bit counts are finite")
    }
}

/// A finished run together with the last population it measured.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub trace: EntropyTrace,
    pub final_population: Option<Population>,
}

fn measure(pop: &Population, prev: Option<&(Vec<u8>, u64)>) -> Result<(TraceRow, (Vec<u8>, u64))> {
    let bytes = measurement_bytes(pop)?;
    let k_bits = lz_bit_size(&bytes);
    let (delta_k, conditional_k) = match prev {
        Some((prev_bytes, prev_k)) => (
            Some(*prev_k as i64 - k_bits as i64),
            Some(conditional_bits(prev_bytes, &bytes, k_bits)),
        ),
        None => (None, None),
    };
    let by_sex = entropy_by_sex(pop)?;
    let row = TraceRow {
        generation: pop.generation,
        pop_size: pop.len(),
        h_sum: genome_entropy_sum(pop)?,
        h_male: by_sex.male,
        h_female: by_sex.female,
        k_bits,
        delta_k,
        conditional_k,
        mean_genome_k: mean_genome_k(pop)?,
    };
    Ok((row, (bytes, k_bits)))
}

pub fn simulate(cfg: &ExperimentConfig) -> RunRecord {
    let mut rows = Vec::with_capacity(cfg.generations);
    let failed = |rows, msg: String| RunRecord {
        trace: EntropyTrace {
            config: cfg.clone(),
            rows,
            termination: Termination::Failed(msg),
        },
        final_population: None,
    };
    if let Err((field, msg)) = cfg.check() {
        return failed(rows, format!("invalid {field}: {msg}"));
    }
    let mut pop = match init_population(cfg) {
        Ok(p) => p,
        Err(e) => return failed(rows, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut prev = None;
    let mut termination = Termination::Completed;

    for g in 0..cfg.generations {
        match measure(&pop, prev.as_ref()) {
            Ok((row, snapshot)) => {
                rows.push(row);
                prev = Some(snapshot);
            }
            Err(e) => return failed(rows, e.to_string()),
        }
        if g + 1 == cfg.generations {
            break;
        }
        match generation_step(&pop, cfg, &mut rng) {
            Ok(next) => pop = next,
            Err(Error::Extinct(cause)) => {
                termination = Termination::Extinct {
                    generation: g + 1,
                    cause,
                };
                break;
            }
            Err(e) => return failed(rows, e.to_string()),
        }
    }

    RunRecord {
        trace: EntropyTrace {
            config: cfg.clone(),
            rows,
            termination,
        },
        final_population: Some(pop),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> EntropyTrace {
    simulate(cfg).trace
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    /// `None` when either trace is constant (or too short).
    pub pearson_h_vs_k: Option<f64>,
    pub spearman_h_vs_k: Option<f64>,
    pub autocorr_h_sum_lag1: Option<f64>,
    pub generations_completed: usize,
    pub termination: Termination,
}

impl SummaryRow {
    pub fn from_trace(trace: &EntropyTrace) -> Self {
        let h = trace.h_sum_series();
        let k = trace.k_series();
        Self {
            label: trace.config.label.clone(),
            pearson_h_vs_k: pearson(&h, &k).ok(),
            spearman_h_vs_k: spearman(&h, &k).ok(),
            autocorr_h_sum_lag1: autocorrelation(&h, 1).ok(),
            generations_completed: trace.rows.len(),
            termination: trace.termination.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SummaryRow>,
    /// Counts of defined Pearson coefficients over [`HISTOGRAM_RANGE`].
    pub histogram: Vec<usize>,
}

impl SweepSummary {
    pub fn from_traces<'a>(traces: impl IntoIterator<Item = &'a EntropyTrace>) -> Self {
        let rows: Vec<SummaryRow> = traces.into_iter().map(SummaryRow::from_trace).collect();
        let coefficients: Vec<f64> = rows.iter().filter_map(|r| r.pearson_h_vs_k).collect();
        let (lo, hi) = HISTOGRAM_RANGE;
        let histogram =
            histogram(&coefficients, HISTOGRAM_BINS, lo, hi).expect("constant range is valid");
        Self { rows, histogram }
    }
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub summary: SweepSummary,
    pub runs: Vec<RunRecord>,
}

/// Runs every config with at most `parallelism` runs in flight.
/// Rows come back in config order whatever the completion order.
pub fn run_sweep(configs: &[ExperimentConfig], parallelism: usize) -> Result<Sweep> {
    if configs.is_empty() {
        return Err(Error::Config {
            path: "<sweep>".into(),
            line: 0,
            message: "no experiments".into(),
        });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = configs.iter().find(|c| !seen.insert(c.label.as_str())) {
        return Err(Error::Config {
            path: "<sweep>".into(),
            line: 0,
            message: format!("duplicate label `{}`", dup.label),
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .expect("thread pool");
    let runs: Vec<RunRecord> = pool.install(|| configs.par_iter().map(simulate).collect());
    let summary = SweepSummary::from_traces(runs.iter().map(|r| &r.trace));
    Ok(Sweep { summary, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(label: &str, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            label: label.into(),
            population_size: 40,
            generations: 30,
            mu: 0.01,
            seed,
            ..ExperimentConfig::additive_preset()
        }
    }

    #[test]
    fn single_generation_has_no_delta() {
        let t = run_experiment(&ExperimentConfig {
            generations: 1,
            ..small("one", 1)
        });
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].delta_k, None);
        assert_eq!(t.rows[0].conditional_k, None);
        assert_eq!(t.termination, Termination::Completed);
    }

    #[test]
    fn rows_track_generations() {
        let t = run_experiment(&small("g", 2));
        assert_eq!(t.rows.len(), 30);
        for (i, r) in t.rows.iter().enumerate() {
            assert_eq!(r.generation, i);
            assert!(r.pop_size <= 40);
            assert_eq!(r.delta_k.is_some(), i > 0);
            if i > 0 {
                assert_eq!(
                    r.delta_k.unwrap(),
                    t.rows[i - 1].k_bits as i64 - r.k_bits as i64
                );
            }
        }
    }

    #[test]
    fn zero_mutation_keeps_entropy_at_zero() {
        let t = run_experiment(&ExperimentConfig {
            mu: 0.0,
            ..small("z", 3)
        });
        assert!(t.rows.iter().all(|r| r.h_sum == 0.0));
    }

    #[test]
    fn fertility_collapse_is_recorded_as_extinction() {
        // A single fertile couple cannot keep both sexes for long.
        let t = run_experiment(&ExperimentConfig {
            population_size: 2,
            generations: 500,
            b_max: 1.0,
            ..small("tiny", 4)
        });
        assert!(
            matches!(t.termination, Termination::Extinct { .. }),
            "{:?}",
            t.termination
        );
        assert!(t.rows.len() < 500);
    }

    #[test]
    fn invalid_config_is_recorded_not_raised() {
        let t = run_experiment(&ExperimentConfig {
            mu: 2.0,
            ..small("bad", 5)
        });
        assert!(matches!(t.termination, Termination::Failed(_)));
        assert!(t.rows.is_empty());
    }

    #[test]
    fn sweep_rejects_duplicates_and_empty() {
        assert!(run_sweep(&[], 1).is_err());
        assert!(run_sweep(&[small("a", 1), small("a", 2)], 1).is_err());
    }

    #[test]
    fn sweep_rows_follow_config_order() {
        let cfgs: Vec<_> = (0..5).map(|i| small(&format!("r{i}"), i)).collect();
        let sweep = run_sweep(&cfgs, 3).unwrap();
        let labels: Vec<_> = sweep
            .summary
            .rows
            .iter()
            .map(|r| r.label.as_str())
            .collect();
        assert_eq!(labels, ["r0", "r1", "r2", "r3", "r4"]);
    }
}
