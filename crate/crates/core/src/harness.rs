//! Experiment runner: configuration, distributed and serial runs,
//! overhead and speedup, CSV reports.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread::JoinHandle;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::distribution::local::{PoolExecutor, SyncExecutor};
use crate::distribution::tcp::{
    spawn_local_workers, CoordinatorMonitor, CoordinatorOptions, CoordinatorStats, TcpExecutor,
};
use crate::distribution::Executor;
use crate::emo_strategy::{
    island_task_handler, partition, read_statistics_csv, write_statistics_csv, EmoStrategy, IslandModelConfig,
    StatisticsRecord,
};
use crate::engine::{EngineParams, EvaluationCost};
use crate::error::{Error, Result};
use crate::objective::{read_front, write_front, ObjectiveVector};
use crate::problems::ProblemKind;
use crate::strategy::{Controller, RunSummary, TaskRecord};
use crate::topology::TopologySpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecutorChoice {
    Sync,
    Pool(usize),
    /// Coordinator bound to this address; workers connect on their own.
    Tcp(String),
    /// Coordinator on an ephemeral local port with this many in-process
    /// worker threads.
    TcpLocal(usize),
}

impl fmt::Display for ExecutorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecutorChoice::Sync => write!(f, "sync"),
            ExecutorChoice::Pool(n) => write!(f, "pool:{n}"),
            ExecutorChoice::Tcp(a) => write!(f, "tcp:{a}"),
            ExecutorChoice::TcpLocal(n) => write!(f, "tcp-local:{n}"),
        }
    }
}

impl FromStr for ExecutorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let count = |v: &str| {
            v.parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Config(format!("bad worker count in executor `{s}`")))
        };
        match s.split_once(':') {
            None if s == "sync" => Ok(ExecutorChoice::Sync),
            Some(("pool", n)) => Ok(ExecutorChoice::Pool(count(n)?)),
            Some(("tcp-local", n)) => Ok(ExecutorChoice::TcpLocal(count(n)?)),
            Some(("tcp", addr)) if !addr.is_empty() => Ok(ExecutorChoice::Tcp(addr.to_string())),
            _ => Err(Error::Config(format!(
                "unknown executor `{s}` (expected sync, pool:N, tcp:HOST:PORT or tcp-local:N)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostMode {
    Spin,
    Sleep,
}

impl FromStr for CostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(CostMode::Spin),
            "sleep" => Ok(CostMode::Sleep),
            _ => Err(Error::Config(format!("eval_cost_mode must be spin or sleep, got `{s}`"))),
        }
    }
}

impl fmt::Display for CostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostMode::Spin => "spin",
            CostMode::Sleep => "sleep",
        })
    }
}

/// Declarative description of one run.
///
/// Parsed from a flat `key = value` file; `#` starts a comment. Keys:
///
/// | key | default |
/// |---|---|
/// | `problem` | `zdt1` |
/// | `total_individuals` | `1000` |
/// | `island_count` | `10` |
/// | `iterations` | `100` |
/// | `generations_per_iteration` | `10` |
/// | `topology`, `topology.<island>` | `lattice` |
/// | `crossover_probability` | `0.9` |
/// | `crossover_distribution_index` | `15` |
/// | `mutation_probability` | `auto` (1 / genes) |
/// | `mutation_distribution_index` | `20` |
/// | `archive_capacity` | island size; `0` unbounded |
/// | `global_archive_capacity` | total individuals; `0` unbounded |
/// | `migration_count` | `2` |
/// | `executor` | `sync` |
/// | `seed` | `1` |
/// | `output_dir` | `out` |
/// | `eval_cost_us` | `0` |
/// | `eval_cost_mode` | `spin` |
/// | `max_task_retries` | `2` |
/// | `result_timeout_secs` | none |
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub total_individuals: usize,
    pub island_count: usize,
    pub iterations: u32,
    pub generations_per_iteration: u32,
    pub topology: TopologySpec,
    pub topology_overrides: BTreeMap<usize, TopologySpec>,
    pub crossover_probability: f64,
    pub crossover_distribution_index: f64,
    pub mutation_probability: Option<f64>,
    pub mutation_distribution_index: f64,
    /// `None` is the island size, `Some(0)` unbounded.
    pub archive_capacity: Option<usize>,
    /// `None` is the total population, `Some(0)` unbounded.
    pub global_archive_capacity: Option<usize>,
    pub migration_count: usize,
    pub executor: ExecutorChoice,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Synthetic cost per evaluation.
    pub eval_cost: Duration,
    pub eval_cost_mode: CostMode,
    pub max_task_retries: u32,
    pub result_timeout: Option<Duration>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let engine = EngineParams::default();
        ExperimentConfig {
            problem: ProblemKind::Zdt1,
            total_individuals: 1000,
            island_count: 10,
            iterations: 100,
            generations_per_iteration: 10,
            topology: TopologySpec::default(),
            topology_overrides: BTreeMap::new(),
            crossover_probability: engine.crossover_probability,
            crossover_distribution_index: engine.crossover_distribution_index,
            mutation_probability: None,
            mutation_distribution_index: engine.mutation_distribution_index,
            archive_capacity: None,
            global_archive_capacity: None,
            migration_count: 2,
            executor: ExecutorChoice::Sync,
            seed: 1,
            output_dir: PathBuf::from("out"),
            eval_cost: Duration::ZERO,
            eval_cost_mode: CostMode::Spin,
            max_task_retries: 2,
            result_timeout: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| Error::Config(format!("{key} = `{value}`: {e}")))
}

fn parse_secs(key: &str, value: &str) -> Result<Duration> {
    let v: f64 = parse_num(key, value)?;
    Duration::try_from_secs_f64(v).map_err(|e| Error::Config(format!("{key} = `{value}`: {e}")))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key, as in the config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if let Some(island) = key.strip_prefix("topology.") {
            let i: usize = parse_num(key, island)?;
            self.topology_overrides.insert(i, value.parse()?);
            return Ok(());
        }
        match key {
            "problem" => self.problem = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "total_individuals" => self.total_individuals = parse_num(key, value)?,
            "island_count" => self.island_count = parse_num(key, value)?,
            "iterations" => self.iterations = parse_num(key, value)?,
            "generations_per_iteration" => self.generations_per_iteration = parse_num(key, value)?,
            "topology" => self.topology = value.parse()?,
            "crossover_probability" => self.crossover_probability = parse_num(key, value)?,
            "crossover_distribution_index" => self.crossover_distribution_index = parse_num(key, value)?,
            "mutation_probability" => {
                self.mutation_probability = if value == "auto" { None } else { Some(parse_num(key, value)?) }
            }
            "mutation_distribution_index" => self.mutation_distribution_index = parse_num(key, value)?,
            "archive_capacity" => self.archive_capacity = Some(parse_num(key, value)?),
            "global_archive_capacity" => self.global_archive_capacity = Some(parse_num(key, value)?),
            "migration_count" => self.migration_count = parse_num(key, value)?,
            "executor" => self.executor = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "eval_cost_us" => self.eval_cost = parse_secs(key, value)? / 1_000_000,
            "eval_cost_mode" => self.eval_cost_mode = value.parse()?,
            "max_task_retries" => self.max_task_retries = parse_num(key, value)?,
            "result_timeout_secs" => self.result_timeout = Some(parse_secs(key, value)?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn evaluation_cost(&self) -> EvaluationCost {
        if self.eval_cost.is_zero() {
            return EvaluationCost::None;
        }
        match self.eval_cost_mode {
            CostMode::Spin => EvaluationCost::Spin(self.eval_cost),
            CostMode::Sleep => EvaluationCost::Sleep(self.eval_cost),
        }
    }

    pub fn engine_params(&self) -> EngineParams {
        EngineParams {
            generations: self.generations_per_iteration,
            crossover_probability: self.crossover_probability,
            crossover_distribution_index: self.crossover_distribution_index,
            mutation_probability: self.mutation_probability,
            mutation_distribution_index: self.mutation_distribution_index,
            seed: self.seed,
            archive_capacity: match self.archive_capacity {
                Some(0) => Some(usize::MAX),
                other => other,
            },
            evaluation_cost: self.evaluation_cost(),
        }
    }

    pub fn island_config(&self) -> Result<IslandModelConfig> {
        let topologies = if self.topology_overrides.is_empty() {
            vec![self.topology]
        } else {
            if let Some(&i) = self.topology_overrides.keys().find(|&&i| i >= self.island_count) {
                return Err(Error::Config(format!("topology.{i} names a missing island")));
            }
            (0..self.island_count).map(|i| self.topology_overrides.get(&i).copied().unwrap_or(self.topology)).collect()
        };
        Ok(IslandModelConfig {
            problem: self.problem,
            total_individuals: self.total_individuals,
            island_count: self.island_count,
            iterations: self.iterations,
            topologies,
            engine: self.engine_params(),
            master_seed: self.seed,
            migration_count: self.migration_count,
            global_capacity: match self.global_archive_capacity {
                None => Some(self.total_individuals),
                Some(0) => None,
                Some(c) => Some(c),
            },
            max_task_retries: self.max_task_retries,
            record_island_fronts: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_individuals == 0 || self.island_count == 0 || self.iterations == 0 {
            return Err(Error::Config("total_individuals, island_count and iterations must be positive".into()));
        }
        if self.generations_per_iteration == 0 {
            return Err(Error::Config("generations_per_iteration must be positive".into()));
        }
        self.island_config()?.validate()
    }

    /// Config of the serial baseline: one island over the whole population
    /// with the same total generation budget, on the sync executor.
    pub fn serial_baseline(&self) -> Result<ExperimentConfig> {
        let generations = self
            .iterations
            .checked_mul(self.generations_per_iteration)
            .ok_or_else(|| Error::Config("total generation budget overflows".into()))?;
        Ok(ExperimentConfig {
            island_count: 1,
            iterations: 1,
            generations_per_iteration: generations,
            topology_overrides: BTreeMap::new(),
            migration_count: 0,
            executor: ExecutorChoice::Sync,
            ..self.clone()
        })
    }
}

/// `(cycle - pure) / cycle`, clamped to 0 when `pure > cycle`.
pub fn compute_overhead(cycle_time: f64, pure_time: f64) -> Result<f64> {
    if !(cycle_time > 0.0 && cycle_time.is_finite()) || !(pure_time >= 0.0 && pure_time.is_finite()) {
        return Err(Error::contract(format!("overhead of cycle {cycle_time} and pure {pure_time}")));
    }
    if pure_time > cycle_time {
        log::warn!("pure time {pure_time}s exceeds cycle time {cycle_time}s; clamping overhead to 0");
        return Ok(0.0);
    }
    Ok((cycle_time - pure_time) / cycle_time)
}

pub fn compute_speedup(serial_wall: f64, distributed_wall: f64) -> Result<f64> {
    if !(serial_wall > 0.0 && distributed_wall > 0.0 && serial_wall.is_finite() && distributed_wall.is_finite()) {
        return Err(Error::contract(format!("speedup of {serial_wall}s over {distributed_wall}s")));
    }
    Ok(serial_wall / distributed_wall)
}

/// Timing of one macro-iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationMetrics {
    pub iteration: u64,
    pub tasks: usize,
    pub failed_tasks: usize,
    pub cycle_time_mean: f64,
    pub cycle_time_max: f64,
    pub pure_time_mean: f64,
    /// Overhead of the summed cycle time against the summed pure time.
    pub overhead_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub iterations: Vec<IterationMetrics>,
    pub tasks_executed: usize,
    pub wall_time: f64,
}

impl RunMetrics {
    pub fn from_records(records: &[TaskRecord], wall_time: f64) -> Result<Self> {
        let mut by_iteration: BTreeMap<u64, Vec<&TaskRecord>> = BTreeMap::new();
        for r in records {
            by_iteration.entry(r.iteration).or_default().push(r);
        }
        let mut iterations = Vec::with_capacity(by_iteration.len());
        for (iteration, rs) in by_iteration {
            let n = rs.len() as f64;
            let cycle: f64 = rs.iter().map(|r| r.cycle_time()).sum();
            let pure: f64 = rs.iter().map(|r| r.pure_execution_time).sum();
            iterations.push(IterationMetrics {
                iteration,
                tasks: rs.len(),
                failed_tasks: rs.iter().filter(|r| r.status != "succeeded").count(),
                cycle_time_mean: cycle / n,
                cycle_time_max: rs.iter().map(|r| r.cycle_time()).fold(0.0, f64::max),
                pure_time_mean: pure / n,
                overhead_fraction: if cycle > 0.0 { compute_overhead(cycle, pure)? } else { 0.0 },
            });
        }
        Ok(RunMetrics { iterations, tasks_executed: records.len(), wall_time })
    }

    /// Mean of the per-iteration overhead fractions.
    pub fn mean_overhead(&self) -> f64 {
        if self.iterations.is_empty() {
            return 0.0;
        }
        self.iterations.iter().map(|i| i.overhead_fraction).sum::<f64>() / self.iterations.len() as f64
    }
}

/// Single-row run summary written to `run.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub total_individuals: usize,
    pub island_count: usize,
    pub iterations: u64,
    pub executor: String,
    pub tasks: usize,
    pub wall_time: f64,
    pub mean_overhead: f64,
    pub front_size: usize,
    pub status: String,
}

pub fn write_csv_rows<T: Serialize, W: Write>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_rows<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub metrics: RunMetrics,
    pub summary: RunSummary,
    pub statistics: Vec<StatisticsRecord>,
    pub front: Vec<ObjectiveVector>,
    /// Coordinator counters for TCP runs.
    pub coordinator: Option<CoordinatorStats>,
}

pub const FRONT_FILE: &str = "front.txt";
pub const STATISTICS_FILE: &str = "statistics.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const TASKS_FILE: &str = "tasks.csv";
pub const RUN_FILE: &str = "run.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

struct Backend {
    executor: Box<dyn Executor>,
    monitor: Option<CoordinatorMonitor>,
    local_workers: Vec<JoinHandle<Result<()>>>,
}

fn start_backend(choice: &ExecutorChoice) -> Result<Backend> {
    let handler = island_task_handler();
    let mut backend = match choice {
        ExecutorChoice::Sync => {
            Backend { executor: Box::new(SyncExecutor::new(handler)), monitor: None, local_workers: Vec::new() }
        }
        ExecutorChoice::Pool(n) => {
            Backend { executor: Box::new(PoolExecutor::new(handler, *n)?), monitor: None, local_workers: Vec::new() }
        }
        ExecutorChoice::Tcp(addr) => {
            let exec = TcpExecutor::bind(addr.as_str(), CoordinatorOptions::default())?;
            let monitor = Some(exec.monitor());
            log::info!("waiting for workers on {}", exec.local_addr());
            Backend { executor: Box::new(exec), monitor, local_workers: Vec::new() }
        }
        ExecutorChoice::TcpLocal(n) => {
            let mut exec = TcpExecutor::bind("127.0.0.1:0", CoordinatorOptions::default())?;
            exec.start()?;
            let local_workers = spawn_local_workers(exec.local_addr(), *n, handler);
            exec.wait_for_workers(*n, Duration::from_secs(30))?;
            let monitor = Some(exec.monitor());
            return Ok(Backend { executor: Box::new(exec), monitor, local_workers });
        }
    };
    backend.executor.start()?;
    Ok(backend)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Runs `cfg` end to end and writes its output files.
///
/// On a runtime failure everything recorded so far is still written before
/// the error is returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let mut strategy = EmoStrategy::new(cfg.island_config()?)?;
    let mut backend = start_backend(&cfg.executor)?;
    let controller = Controller { result_timeout: cfg.result_timeout, ..Controller::default() };
    let outcome = controller.run(&mut strategy, &mut backend.executor);
    let shutdown = backend.executor.shutdown();
    for w in backend.local_workers.drain(..) {
        match w.join() {
            Ok(Err(e)) => log::warn!("local worker ended with error: {e}"),
            Err(_) => log::warn!("local worker panicked"),
            Ok(Ok(())) => {}
        }
    }
    let coordinator = backend.monitor.as_ref().map(CoordinatorMonitor::stats);

    let (summary, failure) = match outcome {
        Ok(s) => (s, None),
        Err(aborted) => (aborted.partial, Some(aborted.cause)),
    };
    let metrics = RunMetrics::from_records(&summary.records, summary.wall_time.as_secs_f64())?;
    let front = strategy.global_front().objectives();
    let statistics = strategy.statistics().to_vec();

    let dir = &cfg.output_dir;
    let mut f = create(dir, FRONT_FILE)?;
    write_front(&mut f, &front)?;
    f.flush()?;
    write_statistics_csv(create(dir, STATISTICS_FILE)?, &statistics)?;
    write_csv_rows(create(dir, METRICS_FILE)?, &metrics.iterations)?;
    summary.write_csv(create(dir, TASKS_FILE)?)?;
    let row = RunRow {
        problem: cfg.problem.name().to_string(),
        total_individuals: cfg.total_individuals,
        island_count: cfg.island_count,
        iterations: summary.iterations,
        executor: cfg.executor.to_string(),
        tasks: summary.tasks_executed,
        wall_time: metrics.wall_time,
        mean_overhead: metrics.mean_overhead(),
        front_size: front.len(),
        status: match &failure {
            None => "completed".into(),
            Some(e) => format!("failed: {e}"),
        },
    };
    write_csv_rows(create(dir, RUN_FILE)?, &[row])?;

    if let Some(e) = failure {
        return Err(e);
    }
    shutdown?;
    Ok(RunReport { metrics, summary, statistics, front, coordinator })
}

/// One population size of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub population: usize,
    pub serial_wall: f64,
    pub distributed_wall: f64,
    pub speedup: f64,
    pub mean_overhead: f64,
    pub status: String,
}

/// Runs the serial baseline and the distributed run for every population
/// size and writes `sweep.csv` (rows ordered by population) into
/// `base.output_dir`. A failed run is recorded in its row and the sweep goes
/// on.
pub fn run_sweep(base: &ExperimentConfig, populations: &[usize]) -> Result<Vec<SweepRow>> {
    if populations.is_empty() {
        return Err(Error::Config("sweep needs at least one population size".into()));
    }
    let mut sizes = populations.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut plans = Vec::with_capacity(sizes.len());
    for &pop in &sizes {
        partition(pop, base.island_count)?;
        let dist = ExperimentConfig {
            total_individuals: pop,
            output_dir: base.output_dir.join(format!("distributed-{pop}")),
            ..base.clone()
        };
        let mut serial = dist.serial_baseline()?;
        serial.output_dir = base.output_dir.join(format!("serial-{pop}"));
        dist.validate().map_err(|e| Error::Config(format!("population {pop}: {e}")))?;
        serial.validate().map_err(|e| Error::Config(format!("serial baseline at {pop}: {e}")))?;
        plans.push((pop, serial, dist));
    }
    fs::create_dir_all(&base.output_dir)?;

    let mut rows = Vec::with_capacity(plans.len());
    for (pop, serial, dist) in plans {
        log::info!("sweep: population {pop}");
        let row = match (run_experiment(&serial), run_experiment(&dist)) {
            (Ok(s), Ok(d)) => SweepRow {
                population: pop,
                serial_wall: s.metrics.wall_time,
                distributed_wall: d.metrics.wall_time,
                speedup: compute_speedup(s.metrics.wall_time, d.metrics.wall_time).unwrap_or(f64::NAN),
                mean_overhead: d.metrics.mean_overhead(),
                status: "completed".into(),
            },
            (s, d) => {
                let err = [s.err(), d.err()].into_iter().flatten().map(|e| e.to_string()).collect::<Vec<_>>();
                log::error!("sweep: population {pop} failed: {}", err.join("; "));
                SweepRow {
                    population: pop,
                    serial_wall: f64::NAN,
                    distributed_wall: f64::NAN,
                    speedup: f64::NAN,
                    mean_overhead: f64::NAN,
                    status: format!("failed: {}", err.join("; ")),
                }
            }
        };
        rows.push(row);
    }
    write_csv_rows(create(&base.output_dir, SWEEP_FILE)?, &rows)?;
    Ok(rows)
}

fn open(dir: &Path, name: &str) -> Result<Option<BufReader<File>>> {
    match File::open(dir.join(name)) {
        Ok(f) => Ok(Some(BufReader::new(f))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Renders whatever CSVs `dir` holds as a plain-text summary.
pub fn report(dir: &Path) -> Result<String> {
    let mut out = String::new();
    let mut found = false;
    if let Some(r) = open(dir, RUN_FILE)? {
        found = true;
        for row in read_csv_rows::<RunRow, _>(r)? {
            out += &format!(
                "run: {} with {} individuals on {} islands, executor {}\n  {} iterations, {} tasks, wall {:.3}s, mean overhead {:.2}%, front {} points, {}\n",
                row.problem,
                row.total_individuals,
                row.island_count,
                row.executor,
                row.iterations,
                row.tasks,
                row.wall_time,
                100.0 * row.mean_overhead,
                row.front_size,
                row.status
            );
        }
    }
    if let Some(r) = open(dir, METRICS_FILE)? {
        found = true;
        let rows = read_csv_rows::<IterationMetrics, _>(r)?;
        out += &format!(
            "\n{:>9} {:>6} {:>12} {:>12} {:>10}\n",
            "iteration", "tasks", "cycle_mean", "pure_mean", "overhead"
        );
        for m in &rows {
            out += &format!(
                "{:>9} {:>6} {:>12.6} {:>12.6} {:>9.2}%\n",
                m.iteration,
                m.tasks,
                m.cycle_time_mean,
                m.pure_time_mean,
                100.0 * m.overhead_fraction
            );
        }
    }
    if let Some(r) = open(dir, STATISTICS_FILE)? {
        found = true;
        let rows = read_statistics_csv(r)?;
        if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
            out += &format!(
                "\nfront: {} -> {} points, indicator {:.6} -> {:.6} over {} iterations\n",
                first.front_size,
                last.front_size,
                first.hypervolume_or_gd,
                last.hypervolume_or_gd,
                rows.len()
            );
        }
    }
    if let Some(r) = open(dir, FRONT_FILE)? {
        found = true;
        out += &format!("front file: {} points\n", read_front(r)?.len());
    }
    if let Some(r) = open(dir, SWEEP_FILE)? {
        found = true;
        let rows = read_csv_rows::<SweepRow, _>(r)?;
        out += &format!(
            "\n{:>10} {:>12} {:>12} {:>8} {:>10}  status\n",
            "population", "serial_s", "distrib_s", "speedup", "overhead"
        );
        for s in &rows {
            out += &format!(
                "{:>10} {:>12.3} {:>12.3} {:>8.2} {:>9.2}%  {}\n",
                s.population,
                s.serial_wall,
                s.distributed_wall,
                s.speedup,
                100.0 * s.mean_overhead,
                s.status
            );
        }
    }
    if !found {
        return Err(Error::Config(format!("no run output found in {}", dir.display())));
    }
    Ok(out)
}
