//! Population snapshots and compression-based complexity estimates.
//!
//! Two byte layouts exist. [`serialize`] is the full canonical snapshot: a
//! 12-byte header `(generation, N, L)` as little-endian `u32`, then one
//! record per individual (sex byte, `2L` little-endian `i16` alleles) with
//! records sorted bytewise. It is injective on populations.
//!
//! [`measurement_bytes`] is what the complexity estimates compress: an 8-byte
//! `(N, L)` header followed by the sorted genome records without sex bytes.
//! Leaving out the generation counter and the coin-flip sex labels means the
//! estimate only moves when the genome ensemble does.

use crate::error::{Error, Result};
use crate::genome::{Genome, Population, Sex};
use crate::lz::{lz_bit_size, lz_compress, CompressedBlob};

pub const SNAPSHOT_HEADER_LEN: usize = 12;
pub const MEASUREMENT_HEADER_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotMeta {
    pub generation: usize,
    pub population_size: usize,
    pub loci: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub bytes: Vec<u8>,
    pub meta: SnapshotMeta,
}

fn push_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

fn push_genome(out: &mut Vec<u8>, genome: &Genome) -> Result<()> {
    for allele in genome.alleles() {
        let v = i16::try_from(allele).map_err(|_| Error::AlleleOverflow(allele))?;
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(())
}

/// Concatenates fixed-width records in sorted order.
fn sorted_records(mut records: Vec<Vec<u8>>, out: &mut Vec<u8>) {
    records.sort_unstable();
    for r in records {
        out.extend_from_slice(&r);
    }
}

pub fn serialize(pop: &Population) -> Result<Snapshot> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let loci = pop.loci();
    let meta = SnapshotMeta {
        generation: pop.generation,
        population_size: pop.len(),
        loci,
    };
    let records = pop
        .members
        .iter()
        .map(|m| {
            let mut r = Vec::with_capacity(1 + 4 * loci);
            r.push(match m.sex() {
                Sex::Male => 0,
                Sex::Female => 1,
            });
            push_genome(&mut r, &m.genome)?;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bytes = Vec::with_capacity(SNAPSHOT_HEADER_LEN + records.len() * (1 + 4 * loci));
    push_u32(&mut bytes, meta.generation);
    push_u32(&mut bytes, meta.population_size);
    push_u32(&mut bytes, meta.loci);
    sorted_records(records, &mut bytes);
    Ok(Snapshot { bytes, meta })
}

/// Sex-blind, generation-blind snapshot used by every complexity estimate.
pub fn measurement_bytes(pop: &Population) -> Result<Vec<u8>> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let loci = pop.loci();
    let records = pop
        .members
        .iter()
        .map(|m| genome_bytes(&m.genome))
        .collect::<Result<Vec<_>>>()?;
    let mut bytes = Vec::with_capacity(MEASUREMENT_HEADER_LEN + records.len() * 4 * loci);
    push_u32(&mut bytes, pop.len());
    push_u32(&mut bytes, loci);
    sorted_records(records, &mut bytes);
    Ok(bytes)
}

/// `2L` little-endian `i16` alleles of one genome.
pub fn genome_bytes(genome: &Genome) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(4 * genome.len());
    push_genome(&mut out, genome)?;
    Ok(out)
}

/// Compressed token stream of the measured snapshot (for debugging dumps).
pub fn measured_blob(pop: &Population) -> Result<CompressedBlob> {
    Ok(lz_compress(&measurement_bytes(pop)?))
}

/// Complexity of one generation: LZ78 size of its measured snapshot, in bits.
pub fn k_estimate(pop: &Population) -> Result<u64> {
    Ok(lz_bit_size(&measurement_bytes(pop)?))
}

/// Observer-view entropy change `K(prev) - K(next)`.
pub fn delta_k(prev: &Population, next: &Population) -> Result<i64> {
    Ok(k_estimate(prev)? as i64 - k_estimate(next)? as i64)
}

/// `C(given ++ target) - C(given)`, floored at zero.
pub fn conditional_bits(target: &[u8], given: &[u8], given_bits: u64) -> u64 {
    let mut joined = Vec::with_capacity(given.len() + target.len());
    joined.extend_from_slice(given);
    joined.extend_from_slice(target);
    lz_bit_size(&joined).saturating_sub(given_bits)
}

/// Complexity of `target` once `given` is known.
pub fn conditional_k(target: &Population, given: &Population) -> Result<u64> {
    let given = measurement_bytes(given)?;
    let target = measurement_bytes(target)?;
    Ok(conditional_bits(&target, &given, lz_bit_size(&given)))
}

/// Mean compressed size of individual genomes.
pub fn mean_genome_k(pop: &Population) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut total = 0u64;
    for m in &pop.members {
        total += lz_bit_size(&genome_bytes(&m.genome)?);
    }
    Ok(total as f64 / pop.len() as f64)
}
