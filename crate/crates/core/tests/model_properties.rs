use evo_entropy::config::ExperimentConfig;
use evo_entropy::dynamics::{fecundity, generation_step, mating_probability, FecundityParams};
use evo_entropy::genome::{init_population, mutate, phenotype, DEFAULT_ALLELE_MAX};
use evo_entropy::{Genome, PhenotypeModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn genome() -> impl Strategy<Value = Genome> {
    proptest::collection::vec((-50i32..50, -50i32..50), 1..12).prop_map(Genome::from_pairs)
}

fn model() -> impl Strategy<Value = PhenotypeModel> {
    prop_oneof![
        Just(PhenotypeModel::Additive),
        Just(PhenotypeModel::Dominance),
        Just(PhenotypeModel::Codominance),
    ]
}

proptest! {
    #[test]
    fn phenotype_is_deterministic(g in genome(), m in model()) {
        let copy = g.clone();
        prop_assert_eq!(phenotype(&g, m).to_bits(), phenotype(&copy, m).to_bits());
    }

    #[test]
    fn additive_phenotype_is_odd(g in genome()) {
        prop_assert_eq!(
            phenotype(&g.negated(), PhenotypeModel::Additive),
            -phenotype(&g, PhenotypeModel::Additive)
        );
    }

    #[test]
    fn mutation_reproducible_per_seed(g in genome(), mu in 0.0f64..1.0, seed in any::<u64>()) {
        let a = mutate(&g, mu, DEFAULT_ALLELE_MAX, &mut ChaCha8Rng::seed_from_u64(seed));
        let b = mutate(&g, mu, DEFAULT_ALLELE_MAX, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mutation_moves_by_at_most_one(g in genome(), mu in 0.0f64..1.0, seed in any::<u64>()) {
        let m = mutate(&g, mu, DEFAULT_ALLELE_MAX, &mut ChaCha8Rng::seed_from_u64(seed));
        for (x, y) in g.alleles().zip(m.alleles()) {
            prop_assert!((x - y).abs() <= 1);
        }
    }

    #[test]
    fn mating_probability_monotone(d1 in 0.0f64..50.0, dd in 0.0f64..50.0, a1 in 0.0f64..1.0, da in 0.0f64..1.0) {
        let p = mating_probability(d1, a1);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(mating_probability(d1 + dd, a1) <= p);
        prop_assert!(mating_probability(d1, a1 + da) <= p);
    }

    #[test]
    fn fecundity_peaks_at_optimum_and_is_symmetric(p_opt in 0.0f64..1.0, sc in 0.0f64..5.0, delta in 0.0f64..0.5) {
        let fp = FecundityParams { b_max: 5.0, p_opt, sc };
        let peak = fecundity(p_opt, &fp);
        prop_assert_eq!(peak, 5.0);
        let up = fecundity(p_opt + delta, &fp);
        let down = fecundity(p_opt - delta, &fp);
        prop_assert!((up - down).abs() < 1e-12);
        prop_assert!(up <= peak);
    }
}

/// Expected count of mutated slots is mu * M; check within 6 binomial sigmas.
#[test]
fn mutation_count_within_six_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let g = Genome::zeros(500);
    let mu = 0.01;
    let trials = 200;
    let slots = (2 * g.len() * trials) as f64;
    let mut changed = 0usize;
    for _ in 0..trials {
        let m = mutate(&g, mu, DEFAULT_ALLELE_MAX, &mut rng);
        changed += m.alleles().filter(|&a| a != 0).count();
    }
    let sigma = (slots * mu * (1.0 - mu)).sqrt();
    assert!(
        (changed as f64 - slots * mu).abs() < 6.0 * sigma,
        "{changed}"
    );
}

#[test]
fn additive_preset_desk_scale_hundred_steps() {
    let cfg = ExperimentConfig {
        population_size: 200,
        ..ExperimentConfig::additive_preset()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = init_population(&cfg).unwrap();
    for step in 1..=100 {
        pop = generation_step(&pop, &cfg, &mut rng).unwrap();
        assert_eq!(pop.generation, step);
        assert!(pop.len() <= 200);
    }
}

#[test]
fn census_bound_holds_across_parameters() {
    for (i, (p_opt, sc, alpha)) in [(0.2, 1.02, 0.0), (0.8, 4.08, 0.05), (0.6, 2.04, 0.5)]
        .into_iter()
        .enumerate()
    {
        let cfg = ExperimentConfig {
            population_size: 80,
            loci: 4,
            mu: 0.05,
            p_opt,
            sc,
            alpha,
            ..ExperimentConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let mut pop = init_population(&cfg).unwrap();
        for _ in 0..40 {
            match generation_step(&pop, &cfg, &mut rng) {
                Ok(next) => {
                    assert!(next.len() <= 80);
                    pop = next;
                }
                Err(_) => break,
            }
        }
    }
}
