//! Evolutionary search over block genomes.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::par_map;
use crate::qas::library::{BlockLibrary, Genome};
use crate::qas::task::{fitness, QasTask};
use crate::rng::{stream, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvoConfig {
    pub population: usize,
    pub generations: usize,
    /// Probability that a child gets one slot resampled.
    pub mutation_rate: f64,
    pub elitism: bool,
    pub seed: u64,
}

impl Default for EvoConfig {
    fn default() -> Self {
        EvoConfig {
            population: 20,
            generations: 30,
            mutation_rate: 0.8,
            elitism: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_ever: f64,
    pub best_genome: Genome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvoResult {
    pub best: Genome,
    pub best_fitness: f64,
    /// Generation 0 is the initial population.
    pub history: Vec<GenerationLog>,
    pub evaluations: usize,
}

fn random_genome(library: &BlockLibrary, rng: &mut SimRng) -> Genome {
    Genome(
        library
            .slots
            .iter()
            .map(|s| rng.gen_range(0..s.len()))
            .collect(),
    )
}

/// Resamples one uniformly chosen slot.
pub fn point_mutation(genome: &Genome, library: &BlockLibrary, rng: &mut SimRng) -> Genome {
    let mut g = genome.clone();
    if g.is_empty() {
        return g;
    }
    let slot = rng.gen_range(0..g.len());
    g.0[slot] = rng.gen_range(0..library.slots[slot].len());
    g
}

fn tournament<'a>(pop: &'a [(Genome, f64)], rng: &mut SimRng) -> &'a Genome {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if b.1 > a.1 {
        &b.0
    } else {
        &a.0
    }
}

/// Index of the fittest individual; the earliest wins ties.
fn best_index(pop: &[(Genome, f64)]) -> usize {
    let mut best = 0;
    for (i, (_, f)) in pop.iter().enumerate() {
        if *f > pop[best].1 {
            best = i;
        }
    }
    best
}

/// Size-2 tournament selection, point mutation and optional elitism.
/// Fitness values are cached per genome; each child draws from its own
/// `(generation, index)` stream.
pub fn evolve(library: &BlockLibrary, task: &QasTask, config: &EvoConfig) -> Result<EvoResult> {
    if config.population < 2 {
        return Err(Error::Config(format!(
            "population must be >= 2, got {}",
            config.population
        )));
    }
    if config.generations < 1 {
        return Err(Error::Config("generations must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&config.mutation_rate) {
        return Err(Error::Config(format!(
            "mutation rate {} outside [0, 1]",
            config.mutation_rate
        )));
    }
    library.validate()?;
    task.validate()?;

    let mut cache: BTreeMap<Genome, f64> = BTreeMap::new();
    let mut evaluate = |genomes: Vec<Genome>| -> Result<Vec<(Genome, f64)>> {
        let mut fresh: Vec<Genome> = genomes
            .iter()
            .filter(|g| !cache.contains_key(*g))
            .cloned()
            .collect();
        fresh.sort();
        fresh.dedup();
        let scores = par_map(&fresh, |g| fitness(g, library, task));
        for (g, s) in fresh.into_iter().zip(scores) {
            cache.insert(g, s?);
        }
        Ok(genomes
            .into_iter()
            .map(|g| {
                let f = cache[&g];
                (g, f)
            })
            .collect())
    };

    let initial = (0..config.population)
        .map(|i| random_genome(library, &mut stream(config.seed, &[0, i as u64])))
        .collect();
    let mut pop = evaluate(initial)?;
    let log_of = |generation: usize, pop: &[(Genome, f64)], best: &(Genome, f64)| {
        let i = best_index(pop);
        GenerationLog {
            generation,
            best_fitness: pop[i].1,
            mean_fitness: pop.iter().map(|p| p.1).sum::<f64>() / pop.len() as f64,
            best_ever: best.1,
            best_genome: pop[i].0.clone(),
        }
    };
    let mut best = pop[best_index(&pop)].clone();
    let mut history = vec![log_of(0, &pop, &best)];

    for generation in 1..=config.generations {
        let mut children = Vec::with_capacity(config.population);
        if config.elitism {
            children.push(pop[best_index(&pop)].0.clone());
        }
        while children.len() < config.population {
            let mut rng = stream(config.seed, &[generation as u64, children.len() as u64]);
            let parent = tournament(&pop, &mut rng);
            let child = if rng.gen::<f64>() < config.mutation_rate {
                point_mutation(parent, library, &mut rng)
            } else {
                parent.clone()
            };
            children.push(child);
        }
        pop = evaluate(children)?;
        let i = best_index(&pop);
        if pop[i].1 > best.1 {
            best = pop[i].clone();
        }
        history.push(log_of(generation, &pop, &best));
    }
    Ok(EvoResult {
        best: best.0,
        best_fitness: best.1,
        history,
        evaluations: cache.len(),
    })
}

/// Exhaustive optimum over every full-length genome; the earliest genome
/// in lexicographic order wins ties.
pub fn brute_force(library: &BlockLibrary, task: &QasTask) -> Result<(Genome, f64)> {
    let all = library.enumerate();
    let scores = par_map(&all, |g| fitness(g, library, task));
    let mut best: Option<(Genome, f64)> = None;
    for (g, s) in all.into_iter().zip(scores) {
        let s = s?;
        if best.as_ref().map_or(true, |b| s > b.1) {
            best = Some((g, s));
        }
    }
    best.ok_or_else(|| Error::Empty("library has no genomes".into()))
}
