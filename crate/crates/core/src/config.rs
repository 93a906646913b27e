//! Experiment configuration and the TOML sweep file loader.
//!
//! A sweep file holds an optional `[defaults]` table and a list of
//! `[[experiment]]` tables. Every key in either place is an
//! [`ExperimentConfig`] field name; experiments inherit anything they do not
//! set from `[defaults]`, and `[defaults]` inherits from the built-in values.
//!
//! ```toml
//! [defaults]
//! population_size = 200
//! generations = 1000
//! seed = 7          # master seed; experiments derive their own from it
//!
//! [[experiment]]
//! label = "additive-2"
//! loci = 2
//! alpha = 0.05
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::dynamics::{DistanceMode, FecundityParams, MatingParams};
use crate::error::{Error, Result};
use crate::genome::{Allele, PhenotypeModel, DEFAULT_ALLELE_MAX};

pub const DEFAULT_MASTER_SEED: u64 = 0x5EED_2009;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub label: String,
    pub population_size: usize,
    pub generations: usize,
    pub loci: usize,
    pub phenotype_model: PhenotypeModel,
    pub mu: f64,
    pub alpha: f64,
    pub sc: f64,
    pub p_opt: f64,
    pub b_max: f64,
    pub n_encounters: usize,
    pub distance_mode: DistanceMode,
    pub allele_max: Allele,
    #[serde(with = "seed_repr")]
    pub seed: u64,
}

/// TOML integers are signed 64-bit; seeds above `i64::MAX` are written as
/// decimal strings and either form is accepted on input.
mod seed_repr {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) => {
                u64::try_from(v).map_err(|_| de::Error::custom("seed must be non-negative"))
            }
            Repr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("invalid seed `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(transparent)]
struct SeedValue(#[serde(with = "seed_repr")] u64);

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            label: "experiment".to_owned(),
            population_size: 1000,
            generations: 10_000,
            loci: 2,
            phenotype_model: PhenotypeModel::Additive,
            mu: 5.0e-5,
            alpha: 0.005,
            sc: 1.02,
            p_opt: 0.2,
            b_max: 5.0,
            n_encounters: 20,
            distance_mode: DistanceMode::Genetic,
            allele_max: DEFAULT_ALLELE_MAX,
            seed: derive_seed(DEFAULT_MASTER_SEED, 0),
        }
    }
}

impl ExperimentConfig {
    /// Parameters of the two-locus additive example figure
    /// (`B_max=5, P_opt=0.2, mu=5e-5, alpha=0.05, sc=1.02`).
    pub fn additive_preset() -> Self {
        Self {
            label: "additive-2-loci".to_owned(),
            loci: 2,
            phenotype_model: PhenotypeModel::Additive,
            alpha: 0.05,
            p_opt: 0.2,
            sc: 1.02,
            ..Self::default()
        }
    }

    pub fn mating(&self) -> MatingParams {
        MatingParams {
            alpha: self.alpha,
            n_encounters: self.n_encounters,
            distance_mode: self.distance_mode,
        }
    }

    pub fn fecundity(&self) -> FecundityParams {
        FecundityParams {
            b_max: self.b_max,
            p_opt: self.p_opt,
            sc: self.sc,
        }
    }

    /// Range-checks every field, returning the offending field name and a message.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        fn fail(
            field: &'static str,
            msg: String,
        ) -> std::result::Result<(), (&'static str, String)> {
            Err((field, msg))
        }
        if self.label.is_empty() {
            return fail("label", "label must not be empty".into());
        }
        if self.population_size < 2 {
            return fail(
                "population_size",
                format!("population_size = {} (need >= 2)", self.population_size),
            );
        }
        if self.generations < 1 {
            return fail("generations", "generations must be >= 1".into());
        }
        if self.loci < 1 {
            return fail("loci", "loci must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return fail("mu", format!("mu = {} is not a probability", self.mu));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return fail(
                "alpha",
                format!("alpha = {} (need finite >= 0)", self.alpha),
            );
        }
        if !(self.sc.is_finite() && self.sc >= 0.0) {
            return fail("sc", format!("sc = {} (need finite >= 0)", self.sc));
        }
        if !(0.0..=1.0).contains(&self.p_opt) {
            return fail("p_opt", format!("p_opt = {} is outside [0, 1]", self.p_opt));
        }
        if !(self.b_max.is_finite() && self.b_max > 0.0) {
            return fail("b_max", format!("b_max = {} (need finite > 0)", self.b_max));
        }
        if self.n_encounters < 1 {
            return fail("n_encounters", "n_encounters must be >= 1".into());
        }
        if !(1..=DEFAULT_ALLELE_MAX).contains(&self.allele_max) {
            return fail(
                "allele_max",
                format!(
                    "allele_max = {} (need 1..={DEFAULT_ALLELE_MAX})",
                    self.allele_max
                ),
            );
        }
        Ok(())
    }
}

/// SplitMix64 finalizer applied to `master + (index + 1) * golden_gamma`.
pub fn derive_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

type Field<T> = Option<Spanned<T>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    label: Field<String>,
    population_size: Field<i64>,
    generations: Field<i64>,
    loci: Field<i64>,
    phenotype_model: Field<PhenotypeModel>,
    mu: Field<f64>,
    alpha: Field<f64>,
    sc: Field<f64>,
    p_opt: Field<f64>,
    b_max: Field<f64>,
    n_encounters: Field<i64>,
    distance_mode: Field<DistanceMode>,
    allele_max: Field<i64>,
    seed: Field<SeedValue>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    defaults: Option<Spanned<RawExperiment>>,
    #[serde(default)]
    experiment: Vec<Spanned<RawExperiment>>,
}

/// Maps byte offsets to 1-based line numbers.
struct Source<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, offset: usize) -> usize {
        let end = offset.min(self.text.len());
        self.text.as_bytes()[..end]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.to_path_buf(),
            line: self.line(offset),
            message: message.into(),
        }
    }
}

/// Tracks where each resolved field came from so range errors can point at it.
#[derive(Default)]
struct Origins {
    fields: Vec<(&'static str, usize)>,
}

impl Origins {
    fn offset(&self, field: &str, fallback: usize) -> usize {
        self.fields
            .iter()
            .rev()
            .find(|(f, _)| *f == field)
            .map_or(fallback, |&(_, o)| o)
    }
}

fn apply(
    src: &Source<'_>,
    raw: &RawExperiment,
    cfg: &mut ExperimentConfig,
    origins: &mut Origins,
) -> Result<()> {
    macro_rules! take {
        ($field:ident) => {
            if let Some(v) = &raw.$field {
                cfg.$field = v.get_ref().clone();
                origins.fields.push((stringify!($field), v.span().start));
            }
        };
        ($field:ident as $ty:ty) => {
            if let Some(v) = &raw.$field {
                let value = *v.get_ref();
                cfg.$field = <$ty>::try_from(value).map_err(|_| {
                    src.error(
                        v.span().start,
                        format!("{} = {value} is out of range", stringify!($field)),
                    )
                })?;
                origins.fields.push((stringify!($field), v.span().start));
            }
        };
    }
    take!(label);
    take!(population_size as usize);
    take!(generations as usize);
    take!(loci as usize);
    take!(phenotype_model);
    take!(mu);
    take!(alpha);
    take!(sc);
    take!(p_opt);
    take!(b_max);
    take!(n_encounters as usize);
    take!(distance_mode);
    take!(allele_max as Allele);
    Ok(())
}

/// Parses a sweep file from text. `master_seed` overrides `[defaults].seed`.
pub fn parse_config(
    path: &Path,
    text: &str,
    master_seed: Option<u64>,
) -> Result<Vec<ExperimentConfig>> {
    let src = Source { path, text };
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        src.error(offset, e.message().trim().to_owned())
    })?;

    if raw.experiment.is_empty() {
        return Err(src.error(0, "no [[experiment]] tables"));
    }

    let mut base = ExperimentConfig::default();
    let mut base_origins = Origins::default();
    let mut master = DEFAULT_MASTER_SEED;
    if let Some(defaults) = &raw.defaults {
        apply(&src, defaults.get_ref(), &mut base, &mut base_origins)?;
        if let Some(seed) = &defaults.get_ref().seed {
            master = seed.get_ref().0;
        }
        if let Some(label) = &defaults.get_ref().label {
            return Err(src.error(label.span().start, "label cannot be set in [defaults]"));
        }
    }
    if let Some(seed) = master_seed {
        master = seed;
    }

    let mut labels = HashSet::new();
    let mut out = Vec::with_capacity(raw.experiment.len());
    for (index, entry) in raw.experiment.iter().enumerate() {
        let table_offset = entry.span().start;
        let raw = entry.get_ref();
        let mut cfg = base.clone();
        let mut origins = Origins {
            fields: base_origins.fields.clone(),
        };
        cfg.label = format!("exp{index:02}");
        apply(&src, raw, &mut cfg, &mut origins)?;
        cfg.seed = match &raw.seed {
            Some(seed) => seed.get_ref().0,
            None => derive_seed(master, index),
        };
        if let Err((field, message)) = cfg.check() {
            return Err(src.error(origins.offset(field, table_offset), message));
        }
        if !labels.insert(cfg.label.clone()) {
            return Err(src.error(
                origins.offset("label", table_offset),
                format!("duplicate label `{}`", cfg.label),
            ));
        }
        out.push(cfg);
    }
    Ok(out)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Vec<ExperimentConfig>> {
    load_config_with_seed(path, None)
}

pub fn load_config_with_seed(
    path: impl AsRef<Path>,
    master_seed: Option<u64>,
) -> Result<Vec<ExperimentConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })?;
    parse_config(path, &text, master_seed)
}

/// Renders configs as a sweep file with every field explicit, including seeds.
pub fn to_toml(configs: &[ExperimentConfig]) -> String {
    #[derive(Serialize)]
    struct File<'a> {
        experiment: &'a [ExperimentConfig],
    }
    toml::to_string(&File {
        experiment: configs,
    })
    .expect("experiment configs always serialize")
}
