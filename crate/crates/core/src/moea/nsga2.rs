use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sorting::{crowding_distance, non_dominated_sort};
use super::variation::{polynomial_mutation, sbx_crossover};
use super::{evaluate_all, random_genome, Algorithm, ConfigError, Individual, Recorder, RunConfig, RunResult, Score};
use crate::scenario::Scenario;

/// Generational NSGA-II state; [`Nsga2::step`] advances one generation.
pub struct Nsga2<'a> {
    scenario: &'a Scenario,
    config: RunConfig,
    rng: ChaCha8Rng,
    mutation_prob: f64,
    population: Vec<Individual>,
    recorder: Recorder,
}

impl<'a> Nsga2<'a> {
    pub fn new(scenario: &'a Scenario, config: &RunConfig) -> Result<Self, ConfigError> {
        config.expect(Algorithm::Nsga2)?;
        let dimension = scenario.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let genomes = (0..config.pop_size).map(|_| random_genome(&mut rng, dimension)).collect();
        let mut recorder = Recorder::new();
        let initial = evaluate_all(genomes, scenario);
        recorder.evaluations += initial.len();
        let population = survive(initial, config.pop_size);
        recorder.record(population.iter().filter(|i| i.rank == 0));
        Ok(Self {
            scenario,
            mutation_prob: config.mutation_prob_for(dimension),
            config: config.clone(),
            rng,
            population,
            recorder,
        })
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    fn tournament(&mut self) -> usize {
        let n = self.population.len();
        let a = self.rng.gen_range(0..n);
        let b = self.rng.gen_range(0..n);
        let (pa, pb) = (&self.population[a], &self.population[b]);
        if pb.rank < pa.rank || (pb.rank == pa.rank && pb.crowding > pa.crowding) {
            b
        } else {
            a
        }
    }

    /// Offspring genomes for one generation: tournament, SBX, mutation.
    pub fn breed(&mut self) -> Vec<crate::evaluate::Genome> {
        let n = self.config.pop_size;
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let p1 = self.tournament();
            let p2 = self.tournament();
            let (c1, c2) = sbx_crossover(
                &self.population[p1].genome,
                &self.population[p2].genome,
                self.config.crossover_eta,
                self.config.crossover_prob,
                &mut self.rng,
            );
            for child in [c1, c2] {
                offspring.push(polynomial_mutation(
                    &child,
                    self.config.mutation_eta,
                    self.mutation_prob,
                    &mut self.rng,
                ));
            }
        }
        offspring.truncate(n);
        offspring
    }

    pub fn step(&mut self) {
        let offspring = self.breed();
        let children = evaluate_all(offspring, self.scenario);
        self.recorder.evaluations += children.len();
        let mut merged = std::mem::take(&mut self.population);
        merged.extend(children);
        self.population = survive(merged, self.config.pop_size);
        self.recorder.record(self.population.iter().filter(|i| i.rank == 0));
    }

    pub fn finish(self) -> RunResult {
        let fallback: Vec<Individual> = self.population.iter().filter(|i| i.rank == 0).cloned().collect();
        self.recorder.finish(&self.config, fallback)
    }
}

/// Elitist truncation: whole fronts by rank, then the split front by
/// descending crowding distance (stable, so ties keep the lower index).
pub fn survive(merged: Vec<Individual>, n: usize) -> Vec<Individual> {
    let scores: Vec<Score> = merged.iter().map(Individual::score).collect();
    let fronts = non_dominated_sort(&scores);
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    let mut next = Vec::with_capacity(n);
    for (rank, front) in fronts.iter().enumerate() {
        if next.len() >= n {
            break;
        }
        let crowd = crowding_distance(&scores, front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        if next.len() + front.len() > n {
            order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]));
            order.truncate(n - next.len());
        }
        for k in order {
            let mut ind = slots[front[k]].take().expect("each individual survives once");
            ind.rank = rank;
            ind.crowding = crowd[k];
            next.push(ind);
        }
    }
    next
}

pub fn nsga2_run(scenario: &Scenario, config: &RunConfig) -> Result<RunResult, ConfigError> {
    let mut engine = Nsga2::new(scenario, config)?;
    for _ in 0..config.generations {
        engine.step();
    }
    Ok(engine.finish())
}
