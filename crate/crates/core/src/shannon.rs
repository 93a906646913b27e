//! Plug-in Shannon entropy estimators over a population, in bits.
//!
//! Frequencies are tallied by sorting rather than hashing so that every sum
//! runs in the same order and results are bit-reproducible.

use crate::error::{Error, Result};
use crate::genome::{Allele, Genome, Individual, Population, Sex};

/// Entropy of the empirical distribution given by run-length counts.
fn plugin_entropy<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let n = total as f64;
    let h: f64 = counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    // a single symbol gives -1·log2(1) = -0.0
    h.max(0.0)
}

/// Counts of equal neighbours in a sorted slice.
fn run_lengths<T: PartialEq>(sorted: &[T]) -> impl Iterator<Item = usize> + '_ {
    sorted.chunk_by(|a, b| a == b).map(<[T]>::len)
}

fn locus_entropy_of<'a, I>(members: I, locus: usize, scratch: &mut Vec<Allele>) -> f64
where
    I: Iterator<Item = &'a Individual>,
{
    scratch.clear();
    for m in members {
        let l = m.genome.loci()[locus];
        scratch.push(l.a);
        scratch.push(l.b);
    }
    scratch.sort_unstable();
    plugin_entropy(run_lengths(scratch), scratch.len())
}

fn sum_over_loci<'a, I>(members: I, loci: usize) -> f64
where
    I: Iterator<Item = &'a Individual> + Clone,
{
    let mut scratch = Vec::new();
    (0..loci)
        .map(|l| locus_entropy_of(members.clone(), l, &mut scratch))
        .sum()
}

/// Entropy of one locus with both allele slots of every member pooled.
pub fn locus_entropy(pop: &Population, locus: usize) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if locus >= pop.loci() {
        return Err(Error::LocusOutOfRange {
            index: locus,
            loci: pop.loci(),
        });
    }
    Ok(locus_entropy_of(pop.members.iter(), locus, &mut Vec::new()))
}

/// Sum of per-locus entropies; ignores linkage between loci.
pub fn genome_entropy_sum(pop: &Population) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    Ok(sum_over_loci(pop.members.iter(), pop.loci()))
}

/// Entropy of the distribution of whole genomes, each treated as one symbol.
pub fn genome_entropy_joint(pop: &Population) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut genomes: Vec<&Genome> = pop.members.iter().map(|m| &m.genome).collect();
    genomes.sort_unstable();
    Ok(plugin_entropy(run_lengths(&genomes), genomes.len()))
}

/// Per-sex summed entropy. `None` marks a sex with no members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SexEntropy {
    pub male: Option<f64>,
    pub female: Option<f64>,
}

impl SexEntropy {
    pub fn male_or_zero(&self) -> f64 {
        self.male.unwrap_or(0.0)
    }

    pub fn female_or_zero(&self) -> f64 {
        self.female.unwrap_or(0.0)
    }
}

pub fn entropy_by_sex(pop: &Population) -> Result<SexEntropy> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let loci = pop.loci();
    let side = |sex: Sex| {
        let members = pop.of_sex(sex);
        (pop.count(sex) > 0).then(|| sum_over_loci(members, loci))
    };
    Ok(SexEntropy {
        male: side(Sex::Male),
        female: side(Sex::Female),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub h_sum: f64,
    pub h_joint: Option<f64>,
    pub h_male: Option<f64>,
    pub h_female: Option<f64>,
}

impl EntropyReport {
    pub fn measure(pop: &Population, with_joint: bool) -> Result<Self> {
        let by_sex = entropy_by_sex(pop)?;
        Ok(Self {
            h_sum: genome_entropy_sum(pop)?,
            h_joint: if with_joint {
                Some(genome_entropy_joint(pop)?)
            } else {
                None
            },
            h_male: by_sex.male,
            h_female: by_sex.female,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::Genome;

    fn pop(genomes: &[(&[(i32, i32)], Sex)]) -> Population {
        let members = genomes
            .iter()
            .map(|(g, s)| Individual::new(Genome::from_pairs(g.iter().copied()), *s))
            .collect();
        Population::new(members, 0).unwrap()
    }

    #[test]
    fn locus_entropy_examples() {
        let mono = pop(&[(&[(3, 3)], Sex::Male), (&[(3, 3)], Sex::Female)]);
        assert_eq!(locus_entropy(&mono, 0).unwrap(), 0.0);
        let uniform = pop(&[(&[(0, 0)], Sex::Male), (&[(1, 1)], Sex::Female)]);
        assert_eq!(locus_entropy(&uniform, 0).unwrap(), 1.0);
        let skewed = pop(&[(&[(0, 0)], Sex::Male), (&[(1, 2)], Sex::Female)]);
        assert_eq!(locus_entropy(&skewed, 0).unwrap(), 1.5);
    }

    #[test]
    fn locus_entropy_errors() {
        let empty = Population::new(vec![], 0).unwrap();
        assert!(matches!(
            locus_entropy(&empty, 0),
            Err(Error::EmptyPopulation)
        ));
        let p = pop(&[(&[(0, 0)], Sex::Male)]);
        assert!(matches!(
            locus_entropy(&p, 1),
            Err(Error::LocusOutOfRange { index: 1, loci: 1 })
        ));
    }

    #[test]
    fn sum_of_two_uniform_loci() {
        let p = pop(&[
            (&[(0, 1), (1, 0)], Sex::Male),
            (&[(1, 0), (0, 1)], Sex::Female),
        ]);
        assert_eq!(genome_entropy_sum(&p).unwrap(), 2.0);
    }

    #[test]
    fn joint_of_distinct_genomes_is_log_n() {
        let p = pop(&[
            (&[(0, 0)], Sex::Male),
            (&[(0, 1)], Sex::Male),
            (&[(1, 0)], Sex::Female),
            (&[(1, 1)], Sex::Female),
            (&[(2, 2)], Sex::Female),
        ]);
        assert!((genome_entropy_joint(&p).unwrap() - 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn joint_equals_sum_for_single_homozygous_locus() {
        let p = pop(&[
            (&[(0, 0)], Sex::Male),
            (&[(1, 1)], Sex::Male),
            (&[(1, 1)], Sex::Female),
            (&[(4, 4)], Sex::Female),
        ]);
        let j = genome_entropy_joint(&p).unwrap();
        let s = genome_entropy_sum(&p).unwrap();
        assert!((j - s).abs() < 1e-12);
    }

    #[test]
    fn by_sex_absent_and_split() {
        let females = pop(&[(&[(0, 1)], Sex::Female), (&[(2, 1)], Sex::Female)]);
        let e = entropy_by_sex(&females).unwrap();
        assert_eq!(e.male, None);
        assert_eq!(e.male_or_zero(), 0.0);
        assert!(e.female.unwrap() > 0.0);

        let mono = pop(&[(&[(0, 0)], Sex::Male), (&[(0, 0)], Sex::Female)]);
        assert_eq!(
            entropy_by_sex(&mono).unwrap(),
            SexEntropy {
                male: Some(0.0),
                female: Some(0.0)
            }
        );

        let split = pop(&[
            (&[(5, 5), (2, 2)], Sex::Male),
            (&[(5, 5), (2, 2)], Sex::Male),
            (&[(0, 0), (7, 7)], Sex::Female),
            (&[(1, 1), (7, 7)], Sex::Female),
        ]);
        let e = entropy_by_sex(&split).unwrap();
        assert_eq!((e.male, e.female), (Some(0.0), Some(1.0)));
    }
}
