use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dominance::{constrained_dominates, Score};
use super::variation::{polynomial_mutation, sbx_crossover};
use super::{evaluate_all, random_genome, Algorithm, ConfigError, Individual, Recorder, RunConfig, RunResult};
use crate::metrics::{Normalization, Objectives};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spea2Fitness {
    /// Number of pool members this one dominates.
    pub strength: usize,
    /// Sum of the strengths of its dominators; zero means non-dominated.
    pub raw: usize,
    pub density: f64,
    pub fitness: f64,
}

/// Pairwise Euclidean distances in the pool-normalized objective space.
fn distance_matrix(scores: &[Score]) -> Vec<Vec<f64>> {
    let objs: Vec<Objectives> = scores.iter().map(|s| s.objectives).collect();
    let norm = Normalization::from_points(&objs);
    let pts: Vec<Objectives> = match norm {
        Some(n) => n.apply_all(&objs),
        None => objs,
    };
    pts.iter().map(|a| pts.iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).collect()).collect()
}

/// Strength, raw fitness and k-th nearest neighbour density of every member,
/// with `k = floor(sqrt(n))`.
pub fn spea2_fitness(scores: &[Score]) -> Vec<Spea2Fitness> {
    let n = scores.len();
    let mut dominates = vec![vec![false; n]; n];
    let mut strength = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && constrained_dominates(&scores[i], &scores[j]) {
                dominates[i][j] = true;
                strength[i] += 1;
            }
        }
    }
    let dist = distance_matrix(scores);
    let k = ((n as f64).sqrt().floor() as usize).clamp(1, n.saturating_sub(1).max(1));
    (0..n)
        .map(|i| {
            let raw: usize = (0..n).filter(|&j| dominates[j][i]).map(|j| strength[j]).sum();
            let mut others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist[i][j]).collect();
            others.sort_by(f64::total_cmp);
            let sigma = others.get(k - 1).copied().unwrap_or(0.0);
            let density = 1.0 / (sigma + 2.0);
            Spea2Fitness { strength: strength[i], raw, density, fitness: raw as f64 + density }
        })
        .collect()
}

/// Next archive as indices into the pool.
///
/// Non-dominated members go in first. A short archive is topped up with the
/// best dominated members by fitness; an overfull one is truncated by
/// repeatedly dropping the member whose sorted neighbour distances are
/// lexicographically smallest (the higher index goes on exact ties).
pub fn environmental_selection(scores: &[Score], fitness: &[Spea2Fitness], archive_size: usize) -> Vec<usize> {
    let n = scores.len();
    let mut chosen: Vec<usize> = (0..n).filter(|&i| fitness[i].raw == 0).collect();
    if chosen.len() < archive_size {
        let mut rest: Vec<usize> = (0..n).filter(|&i| fitness[i].raw != 0).collect();
        rest.sort_by(|&a, &b| fitness[a].fitness.total_cmp(&fitness[b].fitness));
        chosen.extend(rest.into_iter().take(archive_size - chosen.len()));
        return chosen;
    }
    if chosen.len() == archive_size {
        return chosen;
    }

    let dist = distance_matrix(scores);
    let m = chosen.len();
    let neighbours: Vec<Vec<(f64, usize)>> = (0..m)
        .map(|a| {
            let mut v: Vec<(f64, usize)> =
                (0..m).filter(|&b| b != a).map(|b| (dist[chosen[a]][chosen[b]], b)).collect();
            v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            v
        })
        .collect();
    let mut alive = vec![true; m];
    let mut head = vec![0usize; m];
    let mut remaining = m;

    while remaining > archive_size {
        for a in 0..m {
            if alive[a] {
                while head[a] < neighbours[a].len() && !alive[neighbours[a][head[a]].1] {
                    head[a] += 1;
                }
            }
        }
        let mut victim: Option<usize> = None;
        for a in 0..m {
            if !alive[a] {
                continue;
            }
            victim = match victim {
                None => Some(a),
                Some(v) => {
                    if closer_neighbours(&neighbours, &alive, &head, a, v) != std::cmp::Ordering::Greater {
                        Some(a)
                    } else {
                        Some(v)
                    }
                }
            };
        }
        let v = victim.expect("archive is non-empty");
        alive[v] = false;
        remaining -= 1;
    }
    (0..m).filter(|&a| alive[a]).map(|a| chosen[a]).collect()
}

/// Lexicographic comparison of the live neighbour distance lists of `a` and `b`.
fn closer_neighbours(
    neighbours: &[Vec<(f64, usize)>],
    alive: &[bool],
    head: &[usize],
    a: usize,
    b: usize,
) -> std::cmp::Ordering {
    let mut ia = neighbours[a][head[a]..].iter().filter(|e| alive[e.1]);
    let mut ib = neighbours[b][head[b]..].iter().filter(|e| alive[e.1]);
    loop {
        match (ia.next(), ib.next()) {
            (Some(x), Some(y)) => match x.0.total_cmp(&y.0) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            },
            _ => return std::cmp::Ordering::Equal,
        }
    }
}

/// SPEA-2 state: population plus fixed-size archive.
pub struct Spea2<'a> {
    scenario: &'a Scenario,
    config: RunConfig,
    rng: ChaCha8Rng,
    mutation_prob: f64,
    population: Vec<Individual>,
    archive: Vec<Individual>,
    recorder: Recorder,
}

impl<'a> Spea2<'a> {
    pub fn new(scenario: &'a Scenario, config: &RunConfig) -> Result<Self, ConfigError> {
        config.expect(Algorithm::Spea2)?;
        let dimension = scenario.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let genomes = (0..config.pop_size).map(|_| random_genome(&mut rng, dimension)).collect();
        let population = evaluate_all(genomes, scenario);
        let mut recorder = Recorder::new();
        recorder.evaluations += population.len();
        let mut engine = Self {
            scenario,
            mutation_prob: config.mutation_prob_for(dimension),
            config: config.clone(),
            rng,
            population,
            archive: Vec::new(),
            recorder,
        };
        engine.select();
        Ok(engine)
    }

    pub fn archive(&self) -> &[Individual] {
        &self.archive
    }

    fn select(&mut self) {
        let mut pool = std::mem::take(&mut self.population);
        pool.append(&mut self.archive);
        let scores: Vec<Score> = pool.iter().map(Individual::score).collect();
        let fitness = spea2_fitness(&scores);
        let keep = environmental_selection(&scores, &fitness, self.config.archive_size);
        let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
        self.archive = keep
            .into_iter()
            .map(|i| {
                let mut ind = slots[i].take().expect("selected once");
                ind.fitness = fitness[i].fitness;
                ind.rank = fitness[i].raw;
                ind
            })
            .collect();
        self.recorder.record(self.archive.iter().filter(|i| i.rank == 0));
    }

    fn tournament(&mut self) -> usize {
        let n = self.archive.len();
        let a = self.rng.gen_range(0..n);
        let b = self.rng.gen_range(0..n);
        if self.archive[b].fitness < self.archive[a].fitness {
            b
        } else {
            a
        }
    }

    pub fn step(&mut self) {
        let n = self.config.pop_size;
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let p1 = self.tournament();
            let p2 = self.tournament();
            let (c1, c2) = sbx_crossover(
                &self.archive[p1].genome,
                &self.archive[p2].genome,
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
        self.population = evaluate_all(offspring, self.scenario);
        self.recorder.evaluations += n;
        self.select();
    }

    pub fn finish(self) -> RunResult {
        let fallback: Vec<Individual> = self.archive.iter().filter(|i| i.rank == 0).cloned().collect();
        self.recorder.finish(&self.config, fallback)
    }
}

pub fn spea2_run(scenario: &Scenario, config: &RunConfig) -> Result<RunResult, ConfigError> {
    let mut engine = Spea2::new(scenario, config)?;
    for _ in 0..config.generations {
        engine.step();
    }
    Ok(engine.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feasible(points: &[[f64; 2]]) -> Vec<Score> {
        points.iter().map(|p| Score::new(p[0], p[1], 0.0)).collect()
    }

    #[test]
    fn strength_and_raw_example() {
        let f = spea2_fitness(&feasible(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]));
        assert_eq!(f.iter().map(|x| x.strength).collect::<Vec<_>>(), vec![2, 1, 0]);
        assert_eq!(f.iter().map(|x| x.raw).collect::<Vec<_>>(), vec![0, 2, 3]);
        assert!(f.iter().all(|x| x.density > 0.0 && x.density < 0.5));
    }

    #[test]
    fn short_archive_is_filled_by_fitness() {
        let s = feasible(&[[0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]);
        let f = spea2_fitness(&s);
        assert_eq!(environmental_selection(&s, &f, 3), vec![0, 1, 2]);
        assert_eq!(environmental_selection(&s, &f, 2), vec![0, 1]);
    }

    #[test]
    fn truncation_drops_the_crowded_member() {
        // 1 and 2 nearly coincide; one of them must go first.
        let s = feasible(&[[0.0, 1.0], [0.5, 0.5], [0.51, 0.49], [1.0, 0.0]]);
        let f = spea2_fitness(&s);
        let kept = environmental_selection(&s, &f, 3);
        assert_eq!(kept.len(), 3);
        assert!(kept.contains(&0) && kept.contains(&3));
        let kept = environmental_selection(&s, &f, 2);
        assert_eq!(kept, vec![0, 3]);
    }

    #[test]
    fn exact_duplicates_lose_the_higher_index() {
        let s = feasible(&[[0.0, 1.0], [0.5, 0.5], [0.5, 0.5], [1.0, 0.0]]);
        let f = spea2_fitness(&s);
        assert_eq!(environmental_selection(&s, &f, 3), vec![0, 1, 3]);
    }
}
