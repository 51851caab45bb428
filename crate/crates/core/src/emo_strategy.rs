//! Island model on top of the strategy framework.
//!
//! The global population is split into islands. Each macro-iteration runs the
//! serial engine once per island as an independent task, merges every island
//! front into a global archive, records statistics and migrates archive
//! members into the islands for the next iteration.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{Read, Write};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::codec;
use crate::distribution::{TaskHandler, TaskOutput};
use crate::engine::{evolve_run, EngineParams, EngineResult, StartPopulation};
use crate::error::{Error, Result};
use crate::objective::{dominates_raw, Individual, ObjectiveVector, ParetoArchive, Solution};
use crate::problems::{generational_distance, hypervolume_2d, Problem, ProblemKind};
use crate::strategy::{Strategy, Task, TaskId, TaskResult, TaskStatus};
use crate::topology::{NetworkTopology, TopologySpec};

const TOPOLOGY_SALT: u64 = 0x746f_706f_6c6f_6779;
const MIGRATION_SALT: u64 = 0x6d69_6772_6174_6531;
/// Size of the analytic front sample used for generational distance.
const REFERENCE_SAMPLE: usize = 2000;

/// Work unit for one island in one macro-iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IslandTask {
    pub island_id: u32,
    pub iteration: u32,
    pub problem: ProblemKind,
    pub topology: TopologySpec,
    pub topology_seed: u64,
    pub node_count: u32,
    /// `params.seed` is the engine seed for this island and iteration.
    pub params: EngineParams,
    /// Genomes for nodes `0..node_count`; `None` on the first iteration.
    pub injected: Option<Vec<Vec<f64>>>,
}

impl IslandTask {
    /// Runs the engine for this task.
    pub fn run(&self) -> Result<EngineResult> {
        let topology = self.topology.build(self.node_count as usize, self.topology_seed)?;
        self.clone().run_on(&topology)
    }

    /// Runs the engine on an already built topology, which must be the one
    /// `topology.build(node_count, topology_seed)` returns.
    pub fn run_on(self, topology: &NetworkTopology) -> Result<EngineResult> {
        let problem = Problem::new(self.problem);
        let start = match self.injected {
            Some(g) => StartPopulation::Injected(g),
            None => StartPopulation::Random,
        };
        evolve_run(&problem, topology, &self.params, start)
    }
}

/// Built topologies keyed by spec, size and seed. An island keeps its
/// topology for the whole run, so a worker builds each one once.
#[derive(Default)]
struct TopologyCache {
    entries: Vec<((TopologySpec, u32, u64), Arc<NetworkTopology>)>,
}

impl TopologyCache {
    const LIMIT: usize = 256;

    fn get(&mut self, task: &IslandTask) -> Result<Arc<NetworkTopology>> {
        let key = (task.topology, task.node_count, task.topology_seed);
        if let Some((_, t)) = self.entries.iter().find(|(k, _)| *k == key) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(task.topology.build(task.node_count as usize, task.topology_seed)?);
        if self.entries.len() == Self::LIMIT {
            self.entries.remove(0);
        }
        self.entries.push((key, Arc::clone(&t)));
        Ok(t)
    }
}

/// What an island task sends back.
#[derive(Clone, Debug)]
pub struct IslandOutcome {
    pub island_id: u32,
    pub iteration: u32,
    pub result: EngineResult,
}

/// Handler that decodes an [`IslandTask`], runs it and encodes the
/// [`IslandOutcome`]. Decoding and engine errors become failed results.
pub fn island_task_handler() -> TaskHandler {
    let cache = Mutex::new(TopologyCache::default());
    Arc::new(move |payload: &[u8]| {
        let task = codec::decode_island_task(payload).map_err(|e| e.to_string())?;
        let (island_id, iteration) = (task.island_id, task.iteration);
        let topology = cache.lock().unwrap_or_else(|p| p.into_inner()).get(&task).map_err(|e| e.to_string())?;
        let result = task.run_on(&topology).map_err(|e| e.to_string())?;
        let pure = result.pure_execution_time;
        let outcome = IslandOutcome { island_id, iteration, result };
        Ok(TaskOutput { payload: codec::encode_island_outcome(&outcome), pure_execution_time: Some(pure) })
    })
}

/// Island sizes as equal as possible, larger islands first.
pub fn partition(total: usize, islands: usize) -> Result<Vec<usize>> {
    if islands == 0 {
        return Err(Error::Config("island count must be at least 1".into()));
    }
    if total < islands {
        return Err(Error::Config(format!("{total} individuals cannot fill {islands} islands")));
    }
    let base = total / islands;
    let extra = total % islands;
    Ok((0..islands).map(|i| base + usize::from(i < extra)).collect())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `(island, iteration)` under `master`. Distinct pairs never
/// collide for a fixed master seed.
pub fn derive_seed(master: u64, island: u32, iteration: u32) -> u64 {
    splitmix64(splitmix64(master) ^ ((u64::from(island) << 32) | u64::from(iteration)))
}

/// Topology seed of an island; constant across iterations so node ids keep
/// their neighbors.
pub fn topology_seed(master: u64, island: u32) -> u64 {
    derive_seed(master ^ TOPOLOGY_SALT, island, 0)
}

fn migration_seed(master: u64, iteration: u32) -> u64 {
    derive_seed(master ^ MIGRATION_SALT, 0, iteration)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IslandModelConfig {
    pub problem: ProblemKind,
    pub total_individuals: usize,
    pub island_count: usize,
    /// Macro-iterations.
    pub iterations: u32,
    /// One entry per island, or a single entry shared by all.
    pub topologies: Vec<TopologySpec>,
    /// `generations` is the budget per macro-iteration.
    pub engine: EngineParams,
    pub master_seed: u64,
    pub migration_count: usize,
    /// Global archive bound; `None` is unbounded.
    pub global_capacity: Option<usize>,
    /// Resubmissions allowed per island and iteration before the run aborts.
    pub max_task_retries: u32,
    /// Keep every island front for later inspection.
    pub record_island_fronts: bool,
}

impl Default for IslandModelConfig {
    fn default() -> Self {
        IslandModelConfig {
            problem: ProblemKind::Zdt1,
            total_individuals: 1000,
            island_count: 10,
            iterations: 100,
            topologies: vec![TopologySpec::default()],
            engine: EngineParams { generations: 10, ..EngineParams::default() },
            master_seed: 0,
            migration_count: 0,
            global_capacity: Some(1000),
            max_task_retries: 2,
            record_island_fronts: false,
        }
    }
}

impl IslandModelConfig {
    pub fn island_sizes(&self) -> Result<Vec<usize>> {
        partition(self.total_individuals, self.island_count)
    }

    pub fn topology_for(&self, island: usize) -> TopologySpec {
        if self.topologies.len() == 1 {
            self.topologies[0]
        } else {
            self.topologies[island]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sizes = self.island_sizes()?;
        self.engine.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.topologies.len() != 1 && self.topologies.len() != self.island_count {
            return Err(Error::Config(format!(
                "{} topologies given for {} islands",
                self.topologies.len(),
                self.island_count
            )));
        }
        let smallest = *sizes.last().expect("at least one island");
        if self.migration_count > smallest {
            return Err(Error::Config(format!(
                "migration count {} exceeds the smallest island ({smallest})",
                self.migration_count
            )));
        }
        if self.global_capacity == Some(0) {
            return Err(Error::Config("global archive capacity must be positive".into()));
        }
        // Build every topology once so bad shapes fail before any task runs.
        for (i, &n) in sizes.iter().enumerate() {
            self.topology_for(i)
                .build(n, topology_seed(self.master_seed, i as u32))
                .map_err(|e| Error::Config(format!("island {i}: {e}")))?;
        }
        Ok(())
    }
}

/// Quality indicator reported in statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Indicator {
    Hypervolume,
    GenerationalDistance,
}

/// Per-iteration statistics of the global front.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticsRecord {
    pub iteration: u32,
    pub front_size: usize,
    /// Hypervolume for 2-objective problems, generational distance otherwise.
    pub hypervolume_or_gd: f64,
    pub minima: Vec<f64>,
    pub maxima: Vec<f64>,
    /// Seconds since the run started.
    pub wall_time: f64,
}

/// Writes records as CSV: `iteration,front_size,hypervolume_or_gd`, then
/// `f<i>_min,f<i>_max` per objective, then `wall_time`.
pub fn write_statistics_csv<W: Write>(out: W, records: &[StatisticsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let m = records.first().map_or(0, |r| r.minima.len());
    let mut header = vec!["iteration".to_string(), "front_size".into(), "hypervolume_or_gd".into()];
    for i in 1..=m {
        header.push(format!("f{i}_min"));
        header.push(format!("f{i}_max"));
    }
    header.push("wall_time".into());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.iteration.to_string(), r.front_size.to_string(), r.hypervolume_or_gd.to_string()];
        for (lo, hi) in r.minima.iter().zip(&r.maxima) {
            row.push(lo.to_string());
            row.push(hi.to_string());
        }
        row.push(r.wall_time.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_statistics_csv<R: Read>(input: R) -> Result<Vec<StatisticsRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let width = rd.headers()?.len();
    if width < 4 || (width - 4) % 2 != 0 {
        return Err(Error::decode(format!("statistics header has {width} columns")));
    }
    let m = (width - 4) / 2;
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::decode(format!("`{s}`: {e}")));
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let mut minima = Vec::with_capacity(m);
        let mut maxima = Vec::with_capacity(m);
        for i in 0..m {
            minima.push(num(&row[3 + 2 * i])?);
            maxima.push(num(&row[4 + 2 * i])?);
        }
        out.push(StatisticsRecord {
            iteration: row[0].parse().map_err(|e| Error::decode(format!("iteration: {e}")))?,
            front_size: row[1].parse().map_err(|e| Error::decode(format!("front_size: {e}")))?,
            hypervolume_or_gd: num(&row[2])?,
            minima,
            maxima,
            wall_time: num(&row[width - 1])?,
        });
    }
    Ok(out)
}

/// Global archive aggregating island fronts.
#[derive(Clone, Debug)]
pub struct GlobalFront {
    problem: Problem,
    archive: ParetoArchive,
    /// Genomes (as bit patterns) each island got into the archive at its
    /// latest merge.
    contributed: Vec<HashSet<Vec<u64>>>,
    reference_front: Vec<ObjectiveVector>,
    pub records: Vec<StatisticsRecord>,
}

fn genome_key(genome: &[f64]) -> Vec<u64> {
    genome.iter().map(|g| g.to_bits()).collect()
}

impl GlobalFront {
    pub fn new(problem: &Problem, capacity: Option<usize>, islands: usize) -> Result<Self> {
        let archive = match capacity {
            Some(c) => ParetoArchive::with_truncation(c, problem.archive_truncation())?,
            None => ParetoArchive::unbounded(),
        };
        let reference_front = if problem.hypervolume_reference().is_some() {
            Vec::new()
        } else {
            problem.true_front_sample(REFERENCE_SAMPLE)
        };
        Ok(GlobalFront {
            problem: problem.clone(),
            archive,
            contributed: vec![HashSet::new(); islands],
            reference_front,
            records: Vec::new(),
        })
    }

    pub fn archive(&self) -> &ParetoArchive {
        &self.archive
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.archive.objectives()
    }

    pub fn indicator(&self) -> Indicator {
        if self.problem.hypervolume_reference().is_some() {
            Indicator::Hypervolume
        } else {
            Indicator::GenerationalDistance
        }
    }

    /// Archive members not contributed by `island` at its latest merge.
    pub fn foreign_members(&self, island: usize) -> Vec<&Solution> {
        let own = self.contributed.get(island);
        self.archive.members().iter().filter(|m| own.is_none_or(|s| !s.contains(&genome_key(&m.genome)))).collect()
    }
}

/// Offers every point of an island front to the global archive. Returns how
/// many points the archive kept.
pub fn merge_fronts(global: &mut GlobalFront, island: usize, front: &[Solution]) -> Result<usize> {
    if island >= global.contributed.len() {
        return Err(Error::contract(format!("island {island} out of range")));
    }
    let dim = global.problem.objective_count();
    if let Some(bad) = front.iter().find(|s| s.objectives.len() != dim) {
        return Err(Error::contract(format!(
            "island front has {}-objective points, expected {dim}",
            bad.objectives.len()
        )));
    }
    let mut kept = HashSet::new();
    for s in front {
        if global.archive.insert_solution(s.clone())?.candidate_kept() {
            kept.insert(genome_key(&s.genome));
        }
    }
    let n = kept.len();
    global.contributed[island] = kept;
    Ok(n)
}

/// Statistics of the current global front; `None` while it is empty.
pub fn compute_statistics(global: &GlobalFront, iteration: u32, wall_time: f64) -> Result<Option<StatisticsRecord>> {
    if global.archive.is_empty() {
        return Ok(None);
    }
    let points = global.objectives();
    let m = points[0].len();
    let mut minima = vec![f64::INFINITY; m];
    let mut maxima = vec![f64::NEG_INFINITY; m];
    for p in &points {
        for (i, &v) in p.values().iter().enumerate() {
            minima[i] = minima[i].min(v);
            maxima[i] = maxima[i].max(v);
        }
    }
    let value = match global.problem.hypervolume_reference() {
        Some(r) => hypervolume_2d(&points, r)?,
        None => generational_distance(&points, &global.reference_front)?,
    };
    Ok(Some(StatisticsRecord {
        iteration,
        front_size: points.len(),
        hypervolume_or_gd: value,
        minima,
        maxima,
        wall_time,
    }))
}

/// One migrant bound for a node of its destination island.
#[derive(Clone, Debug, PartialEq)]
pub struct Migrant {
    pub node_id: usize,
    pub genome: Vec<f64>,
    pub objectives: ObjectiveVector,
}

/// Migrants per destination island.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MigrationPlan {
    pub islands: Vec<Vec<Migrant>>,
}

impl MigrationPlan {
    pub fn is_empty(&self) -> bool {
        self.islands.iter().all(Vec::is_empty)
    }

    pub fn migrant_count(&self) -> usize {
        self.islands.iter().map(Vec::len).sum()
    }

    /// Installs every migrant in place of its target node's occupant.
    pub fn apply(&self, populations: &mut [Vec<Individual>]) -> Result<()> {
        for (island, migrants) in self.islands.iter().enumerate() {
            let pop = populations
                .get_mut(island)
                .ok_or_else(|| Error::contract(format!("plan targets missing island {island}")))?;
            for m in migrants {
                let slot = pop
                    .get_mut(m.node_id)
                    .ok_or_else(|| Error::contract(format!("node {} out of range on island {island}", m.node_id)))?;
                slot.genome = m.genome.clone();
                slot.objectives = Some(m.objectives.clone());
            }
        }
        Ok(())
    }
}

/// Chooses which individuals move between islands after a merge.
pub trait MigrationPolicy: Send {
    fn plan(
        &self,
        global: &GlobalFront,
        populations: &[Vec<Individual>],
        migration_count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<MigrationPlan>;
}

/// Archive-sourced, foreign-only migration onto dominated nodes.
///
/// For each island, migrants are drawn uniformly without replacement from
/// the global archive minus what that island contributed at the latest
/// merge. Each replaces a distinct node whose occupant some archive member
/// dominates; random other nodes are used when there are too few of those.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmartMigration;

impl MigrationPolicy for SmartMigration {
    fn plan(
        &self,
        global: &GlobalFront,
        populations: &[Vec<Individual>],
        migration_count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<MigrationPlan> {
        plan_migration(global, populations, migration_count, rng)
    }
}

pub fn plan_migration<R: Rng>(
    global: &GlobalFront,
    populations: &[Vec<Individual>],
    migration_count: usize,
    rng: &mut R,
) -> Result<MigrationPlan> {
    let mut plan = MigrationPlan { islands: vec![Vec::new(); populations.len()] };
    if migration_count == 0 {
        return Ok(plan);
    }
    let archive = global.archive.members();
    for (island, pop) in populations.iter().enumerate() {
        if migration_count > pop.len() {
            return Err(Error::Config(format!(
                "migration count {migration_count} exceeds island {island} size {}",
                pop.len()
            )));
        }
        let sources = global.foreign_members(island);
        if sources.is_empty() {
            log::debug!("island {island}: no foreign archive members to migrate");
            continue;
        }
        let count = migration_count.min(sources.len());
        let picked = index::sample(rng, sources.len(), count);

        let (mut dominated, mut others): (Vec<usize>, Vec<usize>) = (0..pop.len()).partition(|&node| {
            let occ = pop[node].objectives.as_ref().map(|o| o.values());
            occ.is_none_or(|o| archive.iter().any(|a| dominates_raw(a.objectives.values(), o)))
        });
        dominated.shuffle(rng);
        others.shuffle(rng);
        let targets = dominated.into_iter().chain(others);

        plan.islands[island] = picked
            .into_iter()
            .zip(targets)
            .map(|(src, node)| Migrant {
                node_id: node,
                genome: sources[src].genome.clone(),
                objectives: sources[src].objectives.clone(),
            })
            .collect();
    }
    Ok(plan)
}

/// Island front kept for inspection when
/// [`IslandModelConfig::record_island_fronts`] is set.
#[derive(Clone, Debug)]
pub struct IslandFrontRecord {
    pub iteration: u32,
    pub island_id: u32,
    pub front: Vec<ObjectiveVector>,
}

struct Slot {
    island: u32,
    attempts: u32,
}

/// The island-model strategy.
pub struct EmoStrategy {
    config: IslandModelConfig,
    problem: Problem,
    sizes: Vec<usize>,
    policy: Box<dyn MigrationPolicy>,
    iteration: u32,
    next_id: TaskId,
    queue: VecDeque<Task>,
    in_flight: HashMap<TaskId, Slot>,
    attempts: Vec<u32>,
    outcomes: Vec<Option<IslandOutcome>>,
    /// Populations to inject at the next iteration.
    populations: Vec<Option<Vec<Individual>>>,
    global: GlobalFront,
    island_fronts: Vec<IslandFrontRecord>,
    started: Instant,
    complete: bool,
}

impl EmoStrategy {
    pub fn new(config: IslandModelConfig) -> Result<Self> {
        Self::with_policy(config, Box::new(SmartMigration))
    }

    pub fn with_policy(config: IslandModelConfig, policy: Box<dyn MigrationPolicy>) -> Result<Self> {
        config.validate()?;
        let problem = Problem::new(config.problem);
        let sizes = config.island_sizes()?;
        let n = sizes.len();
        let global = GlobalFront::new(&problem, config.global_capacity, n)?;
        Ok(EmoStrategy {
            config,
            problem,
            sizes,
            policy,
            iteration: 0,
            next_id: 0,
            queue: VecDeque::new(),
            in_flight: HashMap::new(),
            attempts: vec![0; n],
            outcomes: vec![None; n],
            populations: vec![None; n],
            global,
            island_fronts: Vec::new(),
            started: Instant::now(),
            complete: false,
        })
    }

    pub fn config(&self) -> &IslandModelConfig {
        &self.config
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn island_sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Macro-iterations finished so far.
    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn global_front(&self) -> &GlobalFront {
        &self.global
    }

    pub fn statistics(&self) -> &[StatisticsRecord] {
        &self.global.records
    }

    pub fn island_fronts(&self) -> &[IslandFrontRecord] {
        &self.island_fronts
    }

    /// Island populations after the latest migration.
    pub fn populations(&self) -> Vec<Option<&[Individual]>> {
        self.populations.iter().map(|p| p.as_deref()).collect()
    }

    /// The task island `island` gets in the current iteration.
    pub fn island_task(&self, island: usize) -> IslandTask {
        let id = island as u32;
        IslandTask {
            island_id: id,
            iteration: self.iteration,
            problem: self.config.problem,
            topology: self.config.topology_for(island),
            topology_seed: topology_seed(self.config.master_seed, id),
            node_count: self.sizes[island] as u32,
            params: EngineParams {
                seed: derive_seed(self.config.master_seed, id, self.iteration),
                ..self.config.engine.clone()
            },
            injected: self.populations[island].as_ref().map(|p| p.iter().map(|ind| ind.genome.clone()).collect()),
        }
    }

    fn enqueue(&mut self, island: usize) {
        let payload = codec::encode_island_task(&self.island_task(island));
        let id = self.next_id;
        self.next_id += 1;
        self.in_flight.insert(id, Slot { island: island as u32, attempts: self.attempts[island] });
        self.queue.push_back(Task::new(id, payload));
    }

    fn enqueue_iteration(&mut self) {
        self.attempts.iter_mut().for_each(|a| *a = 0);
        self.outcomes.iter_mut().for_each(|o| *o = None);
        for island in 0..self.sizes.len() {
            self.enqueue(island);
        }
    }
}

impl Strategy for EmoStrategy {
    fn init(&mut self) -> Result<()> {
        self.started = Instant::now();
        self.complete = self.config.iterations == 0;
        if !self.complete {
            self.enqueue_iteration();
        }
        Ok(())
    }

    fn next_task(&mut self) -> Option<Task> {
        if self.complete {
            return None;
        }
        self.queue.pop_front()
    }

    fn on_result(&mut self, result: TaskResult) -> Result<()> {
        let Some(slot) = self.in_flight.remove(&result.task_id) else {
            log::warn!("result for unknown task {}", result.task_id);
            return Ok(());
        };
        let island = slot.island as usize;
        match result.status {
            TaskStatus::Succeeded => {
                let outcome = codec::decode_island_outcome(&result.payload)?;
                if outcome.island_id != slot.island || outcome.iteration != self.iteration {
                    return Err(Error::Strategy(format!(
                        "task {} answered for island {} iteration {}, expected island {} iteration {}",
                        result.task_id, outcome.island_id, outcome.iteration, slot.island, self.iteration
                    )));
                }
                if self.outcomes[island].is_some() {
                    log::warn!("island {island} already reported for iteration {}", self.iteration);
                } else {
                    self.outcomes[island] = Some(outcome);
                }
                Ok(())
            }
            TaskStatus::Failed(msg) => {
                if slot.attempts >= self.config.max_task_retries {
                    return Err(Error::Strategy(format!(
                        "island {island} failed {} times in iteration {}: {msg}",
                        slot.attempts + 1,
                        self.iteration
                    )));
                }
                log::warn!("island {island} task {} failed, resubmitting: {msg}", result.task_id);
                self.attempts[island] = slot.attempts + 1;
                self.enqueue(island);
                Ok(())
            }
        }
    }

    fn iteration_complete(&self) -> bool {
        self.outcomes.iter().all(Option::is_some)
    }

    fn advance_iteration(&mut self) -> Result<()> {
        if !self.iteration_complete() {
            return Err(Error::Strategy("advance before every island reported".into()));
        }
        // Island order, not arrival order, so executors cannot change results.
        let outcomes: Vec<IslandOutcome> = self.outcomes.iter_mut().map(|o| o.take().expect("checked")).collect();
        for o in &outcomes {
            merge_fronts(&mut self.global, o.island_id as usize, &o.result.front)?;
            if self.config.record_island_fronts {
                self.island_fronts.push(IslandFrontRecord {
                    iteration: o.iteration,
                    island_id: o.island_id,
                    front: o.result.front.iter().map(|s| s.objectives.clone()).collect(),
                });
            }
        }
        let wall = self.started.elapsed().as_secs_f64();
        if let Some(rec) = compute_statistics(&self.global, self.iteration, wall)? {
            self.global.records.push(rec);
        }

        let mut populations: Vec<Vec<Individual>> = outcomes.into_iter().map(|o| o.result.final_population).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(migration_seed(self.config.master_seed, self.iteration));
        let plan = self.policy.plan(&self.global, &populations, self.config.migration_count, &mut rng)?;
        plan.apply(&mut populations)?;
        for (slot, pop) in self.populations.iter_mut().zip(populations) {
            *slot = Some(pop);
        }

        self.iteration += 1;
        if self.iteration >= self.config.iterations {
            self.complete = true;
        } else {
            self.enqueue_iteration();
        }
        Ok(())
    }

    fn is_complete(&self) -> bool {
        self.complete
    }
}
