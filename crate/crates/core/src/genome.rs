//! Diploid genomes, phenotype maps and stepwise mutation.
//!
//! A genome is a fixed-length sequence of loci, each holding two signed
//! integer alleles. Mutation moves an allele one step up or down and is
//! clamped to a configurable bound so that snapshots always fit 16-bit fields.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub type Allele = i32;

/// Default allele clamp, the largest value a 16-bit signed field holds.
pub const DEFAULT_ALLELE_MAX: Allele = i16::MAX as Allele;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Locus {
    pub a: Allele,
    pub b: Allele,
}

impl Locus {
    pub const fn new(a: Allele, b: Allele) -> Self {
        Self { a, b }
    }
}

impl From<(Allele, Allele)> for Locus {
    fn from((a, b): (Allele, Allele)) -> Self {
        Self { a, b }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genome {
    loci: Vec<Locus>,
}

impl Genome {
    pub fn new(loci: Vec<Locus>) -> Self {
        Self { loci }
    }

    /// Monomorphic all-zero genome with `len` loci.
    pub fn zeros(len: usize) -> Self {
        Self {
            loci: vec![Locus::default(); len],
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Allele, Allele)>,
    {
        Self {
            loci: pairs.into_iter().map(Locus::from).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.loci.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loci.is_empty()
    }

    pub fn loci(&self) -> &[Locus] {
        &self.loci
    }

    /// All `2L` allele slots in locus order, `a` before `b`.
    pub fn alleles(&self) -> impl Iterator<Item = Allele> + '_ {
        self.loci.iter().flat_map(|l| [l.a, l.b])
    }

    pub fn negated(&self) -> Self {
        Self {
            loci: self.loci.iter().map(|l| Locus::new(-l.a, -l.b)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sex {
    Male,
    Female,
}

impl Sex {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen_bool(0.5) {
            Sex::Female
        } else {
            Sex::Male
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Individual {
    pub genome: Genome,
    sex: Sex,
}

impl Individual {
    pub fn new(genome: Genome, sex: Sex) -> Self {
        Self { genome, sex }
    }

    pub fn sex(&self) -> Sex {
        self.sex
    }

    pub fn is_female(&self) -> bool {
        self.sex == Sex::Female
    }

    pub fn is_male(&self) -> bool {
        self.sex == Sex::Male
    }
}

/// One generation's census: the snapshot the observer measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, generation: usize) -> Result<Self> {
        if let Some(first) = members.first() {
            let loci = first.genome.len();
            if let Some(bad) = members.iter().find(|m| m.genome.len() != loci) {
                return Err(Error::LociMismatch(loci, bad.genome.len()));
            }
        }
        Ok(Self {
            members,
            generation,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Genome length shared by every member, 0 for an empty population.
    pub fn loci(&self) -> usize {
        self.members.first().map_or(0, |m| m.genome.len())
    }

    pub fn count(&self, sex: Sex) -> usize {
        self.members.iter().filter(|m| m.sex == sex).count()
    }

    pub fn of_sex(&self, sex: Sex) -> impl Iterator<Item = &Individual> + Clone + '_ {
        self.members.iter().filter(move |m| m.sex == sex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PhenotypeModel {
    #[default]
    Additive,
    Dominance,
    #[serde(alias = "co-dominance")]
    Codominance,
}

impl std::fmt::Display for PhenotypeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhenotypeModel::Additive => "additive",
            PhenotypeModel::Dominance => "dominance",
            PhenotypeModel::Codominance => "codominance",
        })
    }
}

/// Scalar trait value of a genome.
///
/// * additive: sum of both alleles at every locus
/// * codominance: mean of the two alleles, summed over loci
/// * dominance: the allele with the larger magnitude at each locus (`a` on ties)
pub fn phenotype(genome: &Genome, model: PhenotypeModel) -> f64 {
    // Integer accumulation keeps the result exact and order-independent.
    let total: i64 = match model {
        PhenotypeModel::Additive | PhenotypeModel::Codominance => genome
            .loci
            .iter()
            .map(|l| i64::from(l.a) + i64::from(l.b))
            .sum(),
        PhenotypeModel::Dominance => genome
            .loci
            .iter()
            .map(|l| {
                if l.b.unsigned_abs() > l.a.unsigned_abs() {
                    i64::from(l.b)
                } else {
                    i64::from(l.a)
                }
            })
            .sum(),
    };
    match model {
        PhenotypeModel::Codominance => total as f64 / 2.0,
        _ => total as f64,
    }
}

/// Stepwise mutation: each allele slot moves by ±1 with probability `mu`,
/// clamped to `[-allele_max, allele_max]`.
pub fn mutate<R: Rng + ?Sized>(
    genome: &Genome,
    mu: f64,
    allele_max: Allele,
    rng: &mut R,
) -> Genome {
    let mut out = genome.clone();
    mutate_in_place(&mut out, mu, allele_max, rng);
    out
}

pub(crate) fn mutate_in_place<R: Rng + ?Sized>(
    genome: &mut Genome,
    mu: f64,
    allele_max: Allele,
    rng: &mut R,
) {
    if mu <= 0.0 {
        return;
    }
    let step = |allele: &mut Allele, rng: &mut R| {
        if rng.gen_bool(mu) {
            let delta = if rng.gen_bool(0.5) { 1 } else { -1 };
            *allele = (*allele + delta).clamp(-allele_max, allele_max);
        }
    };
    for locus in &mut genome.loci {
        step(&mut locus.a, rng);
        step(&mut locus.b, rng);
    }
}

/// Monomorphic all-zero population with alternating sexes, starting male.
pub fn init_population(cfg: &ExperimentConfig) -> Result<Population> {
    if cfg.population_size < 2 {
        return Err(Error::PopulationTooSmall(cfg.population_size));
    }
    let members = (0..cfg.population_size)
        .map(|i| {
            let sex = if i % 2 == 0 { Sex::Male } else { Sex::Female };
            Individual::new(Genome::zeros(cfg.loci), sex)
        })
        .collect();
    Ok(Population {
        members,
        generation: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn phenotype_zero_genome() {
        let g = Genome::zeros(5);
        for m in [
            PhenotypeModel::Additive,
            PhenotypeModel::Dominance,
            PhenotypeModel::Codominance,
        ] {
            assert_eq!(phenotype(&g, m), 0.0);
        }
    }

    #[test]
    fn phenotype_models() {
        let g = Genome::from_pairs([(1, 2), (3, 4)]);
        assert_eq!(phenotype(&g, PhenotypeModel::Additive), 10.0);
        assert_eq!(phenotype(&g, PhenotypeModel::Codominance), 5.0);
        let g = Genome::from_pairs([(-3, 2), (1, 1)]);
        assert_eq!(phenotype(&g, PhenotypeModel::Dominance), -2.0);
        // tie on magnitude keeps allele a
        let g = Genome::from_pairs([(-2, 2)]);
        assert_eq!(phenotype(&g, PhenotypeModel::Dominance), -2.0);
    }

    #[test]
    fn mutate_identity_at_zero_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Genome::from_pairs([(1, -1), (4, 7)]);
        assert_eq!(mutate(&g, 0.0, DEFAULT_ALLELE_MAX, &mut rng), g);
    }

    #[test]
    fn mutate_every_slot_at_unit_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = Genome::from_pairs((0..50).map(|i| (i, -i)));
        let m = mutate(&g, 1.0, DEFAULT_ALLELE_MAX, &mut rng);
        for (x, y) in g.alleles().zip(m.alleles()) {
            assert_eq!((x - y).abs(), 1);
        }
    }

    #[test]
    fn mutate_respects_clamp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Genome::from_pairs([(3, -3); 64]);
        let m = mutate(&g, 1.0, 3, &mut rng);
        assert!(m.alleles().all(|a| (-3..=3).contains(&a)));
        assert!(m.alleles().any(|a| a.abs() == 2));
    }

    #[test]
    fn init_population_alternates_sexes() {
        let cfg = ExperimentConfig {
            population_size: 4,
            loci: 2,
            ..ExperimentConfig::default()
        };
        let pop = init_population(&cfg).unwrap();
        assert_eq!(pop.len(), 4);
        assert_eq!(pop.count(Sex::Male), 2);
        assert_eq!(pop.count(Sex::Female), 2);
        assert_eq!(pop.generation, 0);
        assert!(pop.members.iter().all(|m| m.genome == Genome::zeros(2)));
    }

    #[test]
    fn init_population_rejects_singleton() {
        let cfg = ExperimentConfig {
            population_size: 1,
            ..ExperimentConfig::default()
        };
        assert!(matches!(
            init_population(&cfg),
            Err(Error::PopulationTooSmall(1))
        ));
    }

    #[test]
    fn population_rejects_mixed_lengths() {
        let members = vec![
            Individual::new(Genome::zeros(2), Sex::Male),
            Individual::new(Genome::zeros(3), Sex::Female),
        ];
        assert!(matches!(
            Population::new(members, 0),
            Err(Error::LociMismatch(2, 3))
        ));
    }
}
