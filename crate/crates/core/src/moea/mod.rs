//! NSGA-II and SPEA-2 over the battery/DER scheduling genome.
//!
//! Each run owns one ChaCha stream seeded from the config. Every
//! RNG-consuming step runs sequentially; only evaluation fans out to the
//! rayon pool, so results do not depend on thread count.

mod archive;
mod dominance;
mod nsga2;
mod sorting;
mod spea2;
mod variation;

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use archive::EliteArchive;
pub use dominance::{constrained_dominates, Score};
pub use nsga2::{nsga2_run, Nsga2};
pub use sorting::{crowding_distance, non_dominated_sort};
pub use spea2::{environmental_selection, spea2_fitness, spea2_run, Spea2, Spea2Fitness};
pub use variation::{polynomial_mutation, sbx_crossover};

use crate::evaluate::{evaluate, Evaluation, Genome};
use crate::metrics::{elite_hypervolume_history, FrontPoint, FrontSet, HistoryPoint, Objectives};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("population size must be even and at least 4, got {0}")]
    PopSize(usize),
    #[error("at least one generation is required")]
    Generations,
    #[error("archive size must be at least 1")]
    ArchiveSize,
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    DistributionIndex { name: &'static str, value: f64 },
    #[error("config runs {got} but this engine is {expected}")]
    WrongAlgorithm { got: Algorithm, expected: Algorithm },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nsga2,
    Spea2,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Spea2 => "spea2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub pop_size: usize,
    pub generations: usize,
    /// SPEA-2 archive size; ignored by NSGA-II.
    pub archive_size: usize,
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / D`.
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Nsga2,
            pop_size: 100,
            generations: 1000,
            archive_size: 100,
            crossover_prob: 0.9,
            crossover_eta: 15.0,
            mutation_prob: None,
            mutation_eta: 20.0,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size < 4 || !self.pop_size.is_multiple_of(2) {
            return Err(ConfigError::PopSize(self.pop_size));
        }
        if self.generations < 1 {
            return Err(ConfigError::Generations);
        }
        if self.archive_size < 1 {
            return Err(ConfigError::ArchiveSize);
        }
        let mut probs = vec![("crossover_prob", self.crossover_prob)];
        if let Some(p) = self.mutation_prob {
            probs.push(("mutation_prob", p));
        }
        for (name, value) in probs {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        for (name, value) in [("crossover_eta", self.crossover_eta), ("mutation_eta", self.mutation_eta)] {
            if !(value > 0.0) {
                return Err(ConfigError::DistributionIndex { name, value });
            }
        }
        Ok(())
    }

    pub fn mutation_prob_for(&self, dimension: usize) -> f64 {
        self.mutation_prob.unwrap_or(if dimension > 0 { 1.0 / dimension as f64 } else { 0.0 })
    }

    fn expect(&self, expected: Algorithm) -> Result<(), ConfigError> {
        self.validate()?;
        if self.algorithm != expected {
            return Err(ConfigError::WrongAlgorithm { got: self.algorithm, expected });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub eval: Evaluation,
    /// Non-domination rank (NSGA-II).
    pub rank: usize,
    pub crowding: f64,
    /// Combined strength fitness (SPEA-2); lower is better.
    pub fitness: f64,
}

impl Individual {
    pub fn new(genome: Genome, eval: Evaluation) -> Self {
        Self { genome, eval, rank: 0, crowding: 0.0, fitness: 0.0 }
    }

    pub fn score(&self) -> Score {
        Score::from(&self.eval)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: RunConfig,
    /// Best non-dominated feasible set found during the run, ascending `f1`.
    /// Holds the least-violating front instead when nothing feasible was seen.
    pub final_front: Vec<Individual>,
    /// Feasible elite objectives per generation; entry 0 is the initial
    /// population.
    pub history: Vec<Vec<Objectives>>,
    pub evaluations: usize,
    pub wall_time: f64,
}

impl RunResult {
    pub fn front_set(&self) -> FrontSet {
        FrontSet::new(
            self.final_front
                .iter()
                .map(|i| FrontPoint { objectives: i.eval.objectives(), cv: i.eval.cv, genome: Some(i.genome.clone()) })
                .collect(),
        )
    }

    pub fn hypervolume_history(&self) -> Vec<HistoryPoint> {
        elite_hypervolume_history(&self.history)
    }

    pub fn min_f1(&self) -> Option<&Individual> {
        self.final_front
            .iter()
            .min_by(|a, b| a.eval.f1.total_cmp(&b.eval.f1).then(a.eval.f2_neg.total_cmp(&b.eval.f2_neg)))
    }

    pub fn min_f2_neg(&self) -> Option<&Individual> {
        self.final_front
            .iter()
            .min_by(|a, b| a.eval.f2_neg.total_cmp(&b.eval.f2_neg).then(a.eval.f1.total_cmp(&b.eval.f1)))
    }
}

pub fn run(scenario: &Scenario, config: &RunConfig) -> Result<RunResult, ConfigError> {
    match config.algorithm {
        Algorithm::Nsga2 => nsga2_run(scenario, config),
        Algorithm::Spea2 => spea2_run(scenario, config),
    }
}

pub(crate) fn random_genome(rng: &mut ChaCha8Rng, dimension: usize) -> Genome {
    Genome((0..dimension).map(|_| rng.gen::<f64>()).collect())
}

pub(crate) fn evaluate_all(genomes: Vec<Genome>, scenario: &Scenario) -> Vec<Individual> {
    genomes
        .into_par_iter()
        .map(|g| {
            let e = evaluate(&g, scenario).expect("genome length matches scenario");
            Individual::new(g, e)
        })
        .collect()
}

/// Shared bookkeeping of both engines.
pub(crate) struct Recorder {
    start: Instant,
    pub archive: EliteArchive,
    pub history: Vec<Vec<Objectives>>,
    pub evaluations: usize,
}

impl Recorder {
    pub fn new() -> Self {
        Self { start: Instant::now(), archive: EliteArchive::default(), history: Vec::new(), evaluations: 0 }
    }

    /// Records the feasible members of `elite` for this generation.
    pub fn record<'a>(&mut self, elite: impl IntoIterator<Item = &'a Individual>) {
        let mut snap = Vec::new();
        for ind in elite {
            if ind.eval.is_feasible() {
                snap.push(ind.eval.objectives());
                self.archive.offer(ind);
            }
        }
        self.history.push(snap);
    }

    pub fn finish(self, config: &RunConfig, fallback: Vec<Individual>) -> RunResult {
        let final_front = if self.archive.is_empty() { fallback } else { self.archive.into_members() };
        RunResult {
            config: config.clone(),
            final_front,
            history: self.history,
            evaluations: self.evaluations,
            wall_time: self.start.elapsed().as_secs_f64(),
        }
    }
}
