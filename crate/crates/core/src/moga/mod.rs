//! NSGA-II with Pareto-aware crossovers for the bi-criteria ATSP.

mod crossover;
mod mutation;
mod seeding;
mod selection;

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use crossover::{crossover, dec_pr_crossover, dpx_pr_crossover, recombine, CrossoverKind};
pub use mutation::{segment_insertion, shift_move, shift_mutation, three_opt_jump};
pub use seeding::{assignment_patch, seed_population, PatchStrategy};
pub use selection::tournament_select;

use crate::dominance::{nondominated_sort, Front, RankedPopulation};
use crate::error::{Error, Result};
use crate::instance::{rng_from_seed, Instance, SeededRng, Tour};
use crate::metrics::front_distances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MogaConfig {
    pub population_size: usize,
    pub iterations: usize,
    pub tournament_size: usize,
    pub mutation_probability: f64,
    pub crossover: CrossoverKind,
    pub seed: u64,
}

impl Default for MogaConfig {
    fn default() -> Self {
        MogaConfig {
            population_size: 50,
            iterations: 1000,
            tournament_size: 10,
            mutation_probability: 0.1,
            crossover: CrossoverKind::Dec,
            seed: 1,
        }
    }
}

impl MogaConfig {
    /// Defaults by instance size: `N = 50`, 1000 iterations for small
    /// instances, `N = 100`, 5000 iterations from 30 vertices on.
    pub fn for_size(n: usize) -> Self {
        if n < 30 {
            MogaConfig::default()
        } else {
            MogaConfig {
                population_size: 100,
                iterations: 5000,
                ..MogaConfig::default()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::InvalidArgument(format!(
                "population size {} is below 4",
                self.population_size
            )));
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return Err(Error::InvalidArgument(format!(
                "tournament size {} outside [2, {}]",
                self.tournament_size, self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::InvalidArgument(format!(
                "mutation probability {} outside [0, 1]",
                self.mutation_probability
            )));
        }
        Ok(())
    }
}

/// The generational loop, one step at a time.
pub struct Engine<'a> {
    inst: &'a Instance,
    cfg: MogaConfig,
    rng: SeededRng,
    population: RankedPopulation,
}

impl<'a> Engine<'a> {
    pub fn new(inst: &'a Instance, cfg: MogaConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = rng_from_seed(cfg.seed);
        let tours = seed_population(inst, cfg.population_size, &mut rng);
        let population = nondominated_sort(evaluated(inst, tours));
        Ok(Engine {
            inst,
            cfg,
            rng,
            population,
        })
    }

    pub fn population(&self) -> &RankedPopulation {
        &self.population
    }

    pub fn front(&self) -> Front {
        self.population.front()
    }

    /// One generation. Returns the offspring that competed with the parents.
    pub fn step(&mut self) -> Vec<Tour> {
        let n = self.cfg.population_size;
        let members = self.population.members();
        let mut offspring = Vec::with_capacity(n);
        for _ in 0..n {
            let a = tournament_select(members, self.cfg.tournament_size, &mut self.rng).tour.clone();
            let b = tournament_select(members, self.cfg.tournament_size, &mut self.rng).tour.clone();
            let a = maybe_mutate(a, self.inst, self.cfg.mutation_probability, &mut self.rng);
            let b = maybe_mutate(b, self.inst, self.cfg.mutation_probability, &mut self.rng);
            offspring.push(recombine(&a, &b, self.inst, self.cfg.crossover, &mut self.rng));
        }
        let mut pool: Vec<Tour> = members.iter().map(|m| m.tour.clone()).collect();
        pool.extend(offspring.iter().cloned());
        self.population = nondominated_sort(evaluated(self.inst, pool)).truncate_best(n);
        debug_assert_eq!(self.population.len(), n);
        offspring
    }
}

fn maybe_mutate<R: Rng + ?Sized>(t: Tour, inst: &Instance, p: f64, rng: &mut R) -> Tour {
    if rng.gen_bool(p) {
        three_opt_jump(&t, inst, rng)
    } else {
        t
    }
}

fn evaluated(inst: &Instance, tours: Vec<Tour>) -> Vec<(Tour, crate::instance::ObjectiveVector)> {
    tours
        .into_iter()
        .map(|t| {
            let v = inst.cost(&t);
            (t, v)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub config: MogaConfig,
    pub iterations: usize,
    pub initial_front: Front,
    pub front: Front,
    /// GD and IGD against the reference front, index 0 being the seeded
    /// population. Empty without a reference.
    pub gd_trace: Vec<f64>,
    pub igd_trace: Vec<f64>,
    pub final_gd: Option<f64>,
    pub final_igd: Option<f64>,
    pub wall_ms: u64,
}

pub fn run(inst: &Instance, cfg: &MogaConfig, reference: Option<&Front>) -> Result<RunReport> {
    let started = Instant::now();
    let mut engine = Engine::new(inst, cfg.clone())?;
    let initial_front = engine.front();
    let mut gd_trace = Vec::new();
    let mut igd_trace = Vec::new();
    let mut record = |front: &Front| -> Result<()> {
        if let Some(r) = reference {
            let (g, i) = front_distances(front, r)?;
            gd_trace.push(g);
            igd_trace.push(i);
        }
        Ok(())
    };
    record(&initial_front)?;
    for _ in 0..cfg.iterations {
        engine.step();
        if reference.is_some() {
            record(&engine.front())?;
        }
    }
    let front = engine.front();
    Ok(RunReport {
        instance: inst.name().to_string(),
        config: cfg.clone(),
        iterations: cfg.iterations,
        initial_front,
        front,
        final_gd: gd_trace.last().copied(),
        final_igd: igd_trace.last().copied(),
        gd_trace,
        igd_trace,
        wall_ms: started.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::pareto_filter;
    use crate::instance::generate_random;

    fn small(iterations: usize, seed: u64) -> MogaConfig {
        MogaConfig {
            population_size: 20,
            iterations,
            seed,
            ..MogaConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(MogaConfig::default().validate().is_ok());
        let bad = [
            MogaConfig { population_size: 3, tournament_size: 2, ..MogaConfig::default() },
            MogaConfig { tournament_size: 1, ..MogaConfig::default() },
            MogaConfig { tournament_size: 51, ..MogaConfig::default() },
            MogaConfig { mutation_probability: 1.5, ..MogaConfig::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
        assert_eq!(MogaConfig::for_size(50).population_size, 100);
    }

    #[test]
    fn zero_iterations_report_the_seeded_front() {
        let inst = generate_random(9, 1..=20, 1..=20, 2).unwrap();
        let cfg = small(0, 4);
        let report = run(&inst, &cfg, None).unwrap();
        let mut rng = rng_from_seed(4);
        let seeded = seed_population(&inst, 20, &mut rng);
        let expected = pareto_filter(seeded.into_iter().map(|t| (inst.cost(&t), Some(t))));
        assert_eq!(report.front.vectors(), expected.vectors());
        assert_eq!(report.front, report.initial_front);
        assert!(report.gd_trace.is_empty());
    }

    #[test]
    fn runs_are_deterministic() {
        let inst = generate_random(10, 1..=20, 1..=20, 5).unwrap();
        for kind in [CrossoverKind::Dec, CrossoverKind::Dpx] {
            let cfg = MogaConfig { crossover: kind, ..small(30, 9) };
            let mut a = run(&inst, &cfg, None).unwrap();
            let mut b = run(&inst, &cfg, None).unwrap();
            a.wall_ms = 0;
            b.wall_ms = 0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn population_size_and_elitism() {
        let inst = generate_random(10, 1..=30, 1..=30, 7).unwrap();
        let mut engine = Engine::new(&inst, small(0, 3)).unwrap();
        for _ in 0..40 {
            let parents: Vec<Tour> = engine.population().members().iter().map(|m| m.tour.clone()).collect();
            let offspring = engine.step();
            assert_eq!(engine.population().len(), 20);
            assert_eq!(offspring.len(), 20);
            let union = pareto_filter(parents.into_iter().chain(offspring).map(|t| (inst.cost(&t), None)));
            let now = engine.front();
            if union.len() <= 20 {
                assert!(union.is_subset_of(&now));
            }
            for e in now.entries() {
                assert_eq!(inst.evaluate(e.tour.as_ref().unwrap()).unwrap(), e.vector);
            }
        }
    }

    #[test]
    fn traces_start_at_the_seeded_front() {
        let inst = generate_random(8, 1..=20, 1..=20, 1).unwrap();
        let reference = crate::exact::dp_pareto(&inst).unwrap();
        let report = run(&inst, &small(25, 2), Some(&reference)).unwrap();
        assert_eq!(report.gd_trace.len(), 26);
        assert_eq!(report.igd_trace.len(), 26);
        assert_eq!(report.final_igd, report.igd_trace.last().copied());
        let (g0, _) = front_distances(&report.initial_front, &reference).unwrap();
        assert_eq!(report.gd_trace[0], g0);
        let json = serde_json::to_string(&report).unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.front, report.front);
    }
}
