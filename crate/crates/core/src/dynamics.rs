//! Mating, fecundity and generational replacement.
//!
//! Each female meets `n_encounters` males drawn with replacement and accepts
//! each with probability `exp(-alpha * d^2)`, where `d` is the genetic or
//! phenotypic distance between them. The fraction `P` of accepted encounters
//! sets her fecundity `B_max * exp(-sc * (P - P_opt)^2)`. Offspring take one
//! allele per locus from each parent, the father being drawn from her
//! accepted mates. Generations do not overlap, and the offspring pool is
//! thinned to the census size when it overshoots.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, ExtinctionCause, Result};
use crate::genome::{
    mutate_in_place, phenotype, Genome, Individual, Locus, PhenotypeModel, Population, Sex,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Position-wise Manhattan distance over all allele slots.
    #[default]
    Genetic,
    /// Absolute difference of phenotypes.
    Phenotypic,
}

impl std::fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DistanceMode::Genetic => "genetic",
            DistanceMode::Phenotypic => "phenotypic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatingParams {
    pub alpha: f64,
    pub n_encounters: usize,
    pub distance_mode: DistanceMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FecundityParams {
    pub b_max: f64,
    pub p_opt: f64,
    pub sc: f64,
}

pub fn distance(
    female: &Individual,
    male: &Individual,
    mode: DistanceMode,
    model: PhenotypeModel,
) -> Result<f64> {
    let (f, m) = (&female.genome, &male.genome);
    if f.len() != m.len() {
        return Err(Error::LociMismatch(f.len(), m.len()));
    }
    Ok(match mode {
        DistanceMode::Genetic => f
            .alleles()
            .zip(m.alleles())
            .map(|(x, y)| u64::from(x.abs_diff(y)))
            .sum::<u64>() as f64,
        DistanceMode::Phenotypic => (phenotype(f, model) - phenotype(m, model)).abs(),
    })
}

/// Acceptance probability `exp(-alpha * d^2)`.
pub fn mating_probability(d: f64, alpha: f64) -> f64 {
    (-alpha * d * d).exp()
}

/// Expected offspring `b_max * exp(-sc * (p - p_opt)^2)`.
pub fn fecundity(p: f64, fp: &FecundityParams) -> f64 {
    let dev = p - fp.p_opt;
    fp.b_max * (-fp.sc * dev * dev).exp()
}

/// `floor(w)` plus one extra with probability `frac(w)`, so the mean is `w`.
pub fn realize_offspring_count<R: Rng + ?Sized>(w: f64, rng: &mut R) -> usize {
    let whole = w.floor();
    let frac = w - whole;
    let extra = frac > 0.0 && rng.gen_bool(frac);
    whole as usize + usize::from(extra)
}

/// Outcome of one female's encounter round.
#[derive(Debug, Clone, PartialEq)]
pub struct Encounter {
    /// Indices into the male pool, one per accepted encounter (repeats allowed).
    pub mated: Vec<usize>,
    /// Fraction of encounters that ended in mating.
    pub proportion: f64,
}

pub fn encounter_round<R: Rng + ?Sized>(
    female: &Individual,
    males: &[&Individual],
    params: &MatingParams,
    model: PhenotypeModel,
    rng: &mut R,
) -> Result<Encounter> {
    if males.is_empty() {
        return Err(Error::Extinct(ExtinctionCause::NoMales));
    }
    let mut mated = Vec::with_capacity(params.n_encounters);
    for _ in 0..params.n_encounters {
        let idx = rng.gen_range(0..males.len());
        let d = distance(female, males[idx], params.distance_mode, model)?;
        let psi = mating_probability(d, params.alpha);
        // ψ == 1 is accepted without a draw so zero-distance pairs never fail.
        if psi >= 1.0 || rng.gen_bool(psi) {
            mated.push(idx);
        }
    }
    let proportion = mated.len() as f64 / params.n_encounters as f64;
    Ok(Encounter { mated, proportion })
}

/// One allele from each parent at every locus, then a fair coin for sex.
pub fn make_offspring<R: Rng + ?Sized>(
    mother: &Individual,
    father: &Individual,
    rng: &mut R,
) -> Result<Individual> {
    if !mother.is_female() || !father.is_male() {
        return Err(Error::SexRole);
    }
    let (m, f) = (&mother.genome, &father.genome);
    if m.len() != f.len() {
        return Err(Error::LociMismatch(m.len(), f.len()));
    }
    let loci = m
        .loci()
        .iter()
        .zip(f.loci())
        .map(|(ml, fl)| {
            let a = if rng.gen_bool(0.5) { ml.a } else { ml.b };
            let b = if rng.gen_bool(0.5) { fl.a } else { fl.b };
            Locus::new(a, b)
        })
        .collect();
    Ok(Individual::new(Genome::new(loci), Sex::random(rng)))
}

/// Advances the population by one non-overlapping generation.
///
/// Returns `Error::Extinct` when a sex is missing or no offspring are born.
pub fn generation_step<R: Rng + ?Sized>(
    pop: &Population,
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Population> {
    let males: Vec<&Individual> = pop.of_sex(Sex::Male).collect();
    if males.is_empty() {
        return Err(Error::Extinct(ExtinctionCause::NoMales));
    }
    if pop.count(Sex::Female) == 0 {
        return Err(Error::Extinct(ExtinctionCause::NoFemales));
    }

    let mating = cfg.mating();
    let fertility = cfg.fecundity();
    let mut pool = Vec::new();
    for mother in pop.of_sex(Sex::Female) {
        let round = encounter_round(mother, &males, &mating, cfg.phenotype_model, rng)?;
        if round.mated.is_empty() {
            continue;
        }
        let w = fecundity(round.proportion, &fertility);
        for _ in 0..realize_offspring_count(w, rng) {
            let father = males[round.mated[rng.gen_range(0..round.mated.len())]];
            let mut child = make_offspring(mother, father, rng)?;
            mutate_in_place(&mut child.genome, cfg.mu, cfg.allele_max, rng);
            pool.push(child);
        }
    }

    if pool.is_empty() {
        return Err(Error::Extinct(ExtinctionCause::NoOffspring));
    }
    if pool.len() > cfg.population_size {
        let (chosen, _) = pool.partial_shuffle(rng, cfg.population_size);
        let chosen = chosen.to_vec();
        pool = chosen;
    }
    Ok(Population {
        members: pool,
        generation: pop.generation + 1,
    })
}
