//! Serial network-based (diffusion) multi-objective evolutionary algorithm.
//!
//! Every node of a [`NetworkTopology`] holds one individual. Each generation,
//! every node breeds one child from parents picked by binary tournaments over
//! its closed neighborhood; the child challenges the node's occupant, and
//! every child is offered to an external [`ParetoArchive`]. Updates are
//! synchronous: all children are bred from the generation-`t` population and
//! installed together.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::{dominates_raw, Individual, ParetoArchive, Solution};
use crate::operators::{bit_flip_mutation, polynomial_mutation, sbx_crossover, uniform_crossover};
use crate::problems::Problem;
use crate::topology::NetworkTopology;

/// Synthetic per-evaluation cost used to emulate expensive problems.
///
/// `Spin` busy-waits for each evaluation. `Sleep` accumulates the cost of a
/// batch of evaluations and sleeps once, which emulates work done on a
/// dedicated machine without occupying a local core.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvaluationCost {
    #[default]
    None,
    Spin(Duration),
    Sleep(Duration),
}

impl EvaluationCost {
    fn pay(&self, evaluations: usize) {
        match *self {
            EvaluationCost::None => {}
            EvaluationCost::Spin(d) => {
                let until = Instant::now() + d * evaluations as u32;
                while Instant::now() < until {
                    std::hint::spin_loop();
                }
            }
            EvaluationCost::Sleep(d) => {
                if evaluations > 0 && !d.is_zero() {
                    std::thread::sleep(d * evaluations as u32);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineParams {
    pub generations: u32,
    pub crossover_probability: f64,
    pub crossover_distribution_index: f64,
    /// Per-gene mutation probability; `None` means `1 / genome length`.
    pub mutation_probability: Option<f64>,
    pub mutation_distribution_index: f64,
    pub seed: u64,
    /// Archive bound; `None` means the population size.
    pub archive_capacity: Option<usize>,
    pub evaluation_cost: EvaluationCost,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            generations: 100,
            crossover_probability: 0.9,
            crossover_distribution_index: 15.0,
            mutation_probability: None,
            mutation_distribution_index: 20.0,
            seed: 0,
            archive_capacity: None,
            evaluation_cost: EvaluationCost::None,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::contract(format!("{name} = {p} outside [0, 1]")))
            }
        };
        prob("crossover_probability", self.crossover_probability)?;
        if let Some(p) = self.mutation_probability {
            prob("mutation_probability", p)?;
        }
        for (name, eta) in [
            ("crossover_distribution_index", self.crossover_distribution_index),
            ("mutation_distribution_index", self.mutation_distribution_index),
        ] {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::contract(format!("{name} = {eta} must be positive")));
            }
        }
        if self.archive_capacity == Some(0) {
            return Err(Error::contract("archive capacity must be positive"));
        }
        Ok(())
    }
}

/// Population `P[t]` and generation counter `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionState {
    pub population: Vec<Individual>,
    pub generation: u64,
}

#[derive(Clone, Debug)]
pub struct EngineResult {
    pub front: Vec<Solution>,
    pub final_population: Vec<Individual>,
    pub pure_execution_time: Duration,
}

/// Where a run's first population comes from.
#[derive(Clone, Debug)]
pub enum StartPopulation {
    /// Uniform random genes drawn from the run's seeded generator.
    Random,
    /// Genomes for nodes `0..n` in order; evaluated before the first step.
    Injected(Vec<Vec<f64>>),
}

/// Uniform random initial population, one evaluated individual per node.
pub fn initialize<R: Rng>(problem: &Problem, topology: &NetworkTopology, rng: &mut R) -> Result<EvolutionState> {
    initialize_with_cost(problem, topology, rng, EvaluationCost::None)
}

fn initialize_with_cost<R: Rng>(
    problem: &Problem,
    topology: &NetworkTopology,
    rng: &mut R,
    cost: EvaluationCost,
) -> Result<EvolutionState> {
    let genomes = (0..topology.node_count()).map(|_| random_genome(problem, rng)).collect();
    from_genomes(problem, topology, genomes, cost)
}

fn random_genome<R: Rng>(problem: &Problem, rng: &mut R) -> Vec<f64> {
    if problem.is_binary() {
        return (0..problem.decision_count()).map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 }).collect();
    }
    problem.bounds().iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()
}

fn from_genomes(
    problem: &Problem,
    topology: &NetworkTopology,
    genomes: Vec<Vec<f64>>,
    cost: EvaluationCost,
) -> Result<EvolutionState> {
    if genomes.len() != topology.node_count() {
        return Err(Error::contract(format!(
            "population of {} for a topology of {} nodes",
            genomes.len(),
            topology.node_count()
        )));
    }
    let population = genomes
        .into_iter()
        .enumerate()
        .map(|(node, genome)| {
            let objectives = problem.evaluate(&genome)?;
            Ok(Individual { genome, objectives: Some(objectives), node_id: node })
        })
        .collect::<Result<Vec<_>>>()?;
    cost.pay(population.len());
    Ok(EvolutionState { population, generation: 0 })
}

fn objectives_of(ind: &Individual) -> Result<&[f64]> {
    ind.objectives
        .as_ref()
        .map(|o| o.values())
        .ok_or_else(|| Error::contract(format!("individual at node {} is not evaluated", ind.node_id)))
}

fn tournament<R: Rng>(pool: &[usize], population: &[Individual], rng: &mut R) -> usize {
    let a = pool[rng.gen_range(0..pool.len())];
    let b = pool[rng.gen_range(0..pool.len())];
    let fa = population[a].objectives.as_ref().expect("checked").values();
    let fb = population[b].objectives.as_ref().expect("checked").values();
    if dominates_raw(fa, fb) {
        a
    } else if dominates_raw(fb, fa) {
        b
    } else if rng.gen::<bool>() {
        a
    } else {
        b
    }
}

/// Advances the population by one synchronous generation.
///
/// Returns how many nodes received their child.
pub fn evolve_step<R: Rng>(
    state: &mut EvolutionState,
    topology: &NetworkTopology,
    params: &EngineParams,
    archive: &mut ParetoArchive,
    problem: &Problem,
    rng: &mut R,
) -> Result<usize> {
    let n = state.population.len();
    if n != topology.node_count() {
        return Err(Error::contract(format!("population of {n} for a topology of {} nodes", topology.node_count())));
    }
    for ind in &state.population {
        objectives_of(ind)?;
    }
    let bounds = problem.bounds();
    let mutation_rate = params.mutation_probability.unwrap_or(1.0 / problem.decision_count() as f64);

    let mut children = Vec::with_capacity(n);
    let mut pool = Vec::new();
    for node in 0..n {
        pool.clear();
        pool.push(node);
        pool.extend_from_slice(topology.neighborhood(node)?);
        let pa = tournament(&pool, &state.population, rng);
        let pb = tournament(&pool, &state.population, rng);
        let (ga, gb) = (&state.population[pa].genome, &state.population[pb].genome);
        let mut child = if rng.gen::<f64>() < params.crossover_probability {
            if problem.is_binary() {
                uniform_crossover(ga, gb, rng)
            } else {
                sbx_crossover(ga, gb, bounds, params.crossover_distribution_index, rng)
            }
        } else {
            ga.clone()
        };
        if problem.is_binary() {
            bit_flip_mutation(&mut child, mutation_rate, rng);
        } else {
            polynomial_mutation(&mut child, bounds, mutation_rate, params.mutation_distribution_index, rng);
        }
        children.push(child);
    }

    let evaluated = children
        .into_iter()
        .map(|g| {
            let obj = problem.evaluate(&g)?;
            Ok((g, obj))
        })
        .collect::<Result<Vec<_>>>()?;
    params.evaluation_cost.pay(n);

    let mut replaced = 0;
    for (node, (genome, obj)) in evaluated.into_iter().enumerate() {
        let occupant = state.population[node].objectives.as_ref().expect("checked").values();
        let install = if dominates_raw(obj.values(), occupant) {
            true
        } else if dominates_raw(occupant, obj.values()) {
            false
        } else {
            rng.gen::<bool>()
        };
        archive.insert_solution(Solution { genome: genome.clone(), objectives: obj.clone() })?;
        if install {
            state.population[node] = Individual { genome, objectives: Some(obj), node_id: node };
            replaced += 1;
        }
    }
    state.generation += 1;
    Ok(replaced)
}

/// Runs `params.generations` steps and returns the archived front.
pub fn evolve_run(
    problem: &Problem,
    topology: &NetworkTopology,
    params: &EngineParams,
    start: StartPopulation,
) -> Result<EngineResult> {
    evolve_run_observed(problem, topology, params, start, |_, _| {})
}

/// Like [`evolve_run`], calling `observer` after initialization and after
/// every step.
pub fn evolve_run_observed<F>(
    problem: &Problem,
    topology: &NetworkTopology,
    params: &EngineParams,
    start: StartPopulation,
    mut observer: F,
) -> Result<EngineResult>
where
    F: FnMut(&EvolutionState, &ParetoArchive),
{
    params.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut state = match start {
        StartPopulation::Random => initialize_with_cost(problem, topology, &mut rng, params.evaluation_cost)?,
        StartPopulation::Injected(genomes) => from_genomes(problem, topology, genomes, params.evaluation_cost)?,
    };
    let capacity = params.archive_capacity.unwrap_or(state.population.len().max(1));
    let mut archive = ParetoArchive::with_truncation(capacity, problem.archive_truncation())?;
    for ind in &state.population {
        archive.insert(ind)?;
    }
    observer(&state, &archive);
    for _ in 0..params.generations {
        evolve_step(&mut state, topology, params, &mut archive, problem, &mut rng)?;
        observer(&state, &archive);
    }
    Ok(EngineResult {
        front: archive.into_members(),
        final_population: state.population,
        pure_execution_time: started.elapsed(),
    })
}
