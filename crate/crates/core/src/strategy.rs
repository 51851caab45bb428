//! Strategy/controller framework.
//!
//! A [`Strategy`] owns the distribution logic: it hands out tasks for the
//! current iteration and consumes their results. The [`Controller`] drives
//! iterations: it drains the strategy's tasks into an [`Executor`], waits
//! for completions, forwards each one back to the strategy, and advances
//! the iteration once the strategy reports it complete.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::time::{Duration, Instant};

use crossbeam_channel::RecvTimeoutError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::Executor;
use crate::error::{Error, Result};

pub type TaskId = u64;

/// A unit of work with an opaque payload.
#[derive(Clone, Debug)]
pub struct Task {
    pub task_id: TaskId,
    pub payload: Vec<u8>,
    pub created_at: Instant,
}

impl Task {
    pub fn new(task_id: TaskId, payload: Vec<u8>) -> Self {
        Task { task_id, payload, created_at: Instant::now() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskStatus {
    Succeeded,
    Failed(String),
}

impl TaskStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, TaskStatus::Succeeded)
    }

    pub fn label(&self) -> &'static str {
        match self {
            TaskStatus::Succeeded => "succeeded",
            TaskStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TaskResult {
    pub task_id: TaskId,
    pub status: TaskStatus,
    pub payload: Vec<u8>,
    /// Time spent executing the task on the node that ran it.
    pub pure_execution_time: Duration,
    pub collected_at: Instant,
}

/// Wall time from the task's creation to the collection of its result.
pub fn measure_task_cycle(task: &Task, result: &TaskResult) -> Result<Duration> {
    if task.task_id != result.task_id {
        return Err(Error::contract(format!("result {} does not belong to task {}", result.task_id, task.task_id)));
    }
    Ok(result.collected_at.saturating_duration_since(task.created_at))
}

/// Distribution logic plugged into a [`Controller`].
///
/// Once [`Strategy::is_complete`] returns true, `next_task` must return `None`.
pub trait Strategy {
    fn init(&mut self) -> Result<()>;

    /// Next task of the current iteration, `None` when there is nothing more
    /// to submit right now.
    fn next_task(&mut self) -> Option<Task>;

    fn on_result(&mut self, result: TaskResult) -> Result<()>;

    fn iteration_complete(&self) -> bool;

    fn advance_iteration(&mut self) -> Result<()>;

    fn is_complete(&self) -> bool;
}

/// Timing record of one task, relative to the start of the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub iteration: u64,
    pub task_id: TaskId,
    /// Seconds since run start.
    pub created_at: f64,
    /// Seconds since run start.
    pub collected_at: f64,
    /// Seconds.
    pub pure_execution_time: f64,
    pub status: String,
}

impl TaskRecord {
    pub fn cycle_time(&self) -> f64 {
        self.collected_at - self.created_at
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub iterations: u64,
    pub tasks_executed: usize,
    pub records: Vec<TaskRecord>,
    pub wall_time: Duration,
}

impl RunSummary {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_records<R: Read>(input: R) -> Result<Vec<TaskRecord>> {
        let mut rd = csv::Reader::from_reader(input);
        let mut records = Vec::new();
        for r in rd.deserialize() {
            records.push(r?);
        }
        Ok(records)
    }
}

/// A run that stopped early, with everything recorded up to that point.
#[derive(Debug, Error)]
#[error("run aborted after {} iterations: {cause}", partial.iterations)]
pub struct RunAborted {
    pub cause: Error,
    pub partial: RunSummary,
}

#[derive(Clone, Debug)]
pub struct Controller {
    /// Abort if no result arrives for this long; `None` waits forever.
    pub result_timeout: Option<Duration>,
    /// How long to wait for in-flight results after an abort.
    pub drain_timeout: Duration,
}

impl Default for Controller {
    fn default() -> Self {
        Controller { result_timeout: None, drain_timeout: Duration::from_secs(5) }
    }
}

struct InFlight {
    created_at: Instant,
    iteration: u64,
}

struct RunState {
    started: Instant,
    pending: HashMap<TaskId, InFlight>,
    summary: RunSummary,
}

impl RunState {
    fn secs(&self, t: Instant) -> f64 {
        t.saturating_duration_since(self.started).as_secs_f64()
    }
}

impl Controller {
    pub fn run<S, E>(&self, strategy: &mut S, executor: &mut E) -> std::result::Result<RunSummary, RunAborted>
    where
        S: Strategy + ?Sized,
        E: Executor + ?Sized,
    {
        let mut st = RunState { started: Instant::now(), pending: HashMap::new(), summary: RunSummary::default() };
        match self.drive(strategy, executor, &mut st) {
            Ok(()) => {
                st.summary.wall_time = st.started.elapsed();
                Ok(st.summary)
            }
            Err(cause) => {
                self.drain(executor, &mut st);
                st.summary.wall_time = st.started.elapsed();
                Err(RunAborted { cause, partial: st.summary })
            }
        }
    }

    fn drive<S, E>(&self, strategy: &mut S, executor: &mut E, st: &mut RunState) -> Result<()>
    where
        S: Strategy + ?Sized,
        E: Executor + ?Sized,
    {
        strategy.init()?;
        while !strategy.is_complete() {
            let iteration = st.summary.iterations;
            self.submit_all(strategy, executor, st, iteration)?;
            while !strategy.iteration_complete() {
                if st.pending.is_empty() {
                    return Err(Error::Strategy(format!("iteration {iteration} is incomplete but no task is pending")));
                }
                let result = self.next_result(executor)?;
                let Some(flight) = st.pending.remove(&result.task_id) else {
                    log::warn!("dropping result for unknown task {}", result.task_id);
                    continue;
                };
                st.summary.records.push(TaskRecord {
                    iteration: flight.iteration,
                    task_id: result.task_id,
                    created_at: st.secs(flight.created_at),
                    collected_at: st.secs(result.collected_at),
                    pure_execution_time: result.pure_execution_time.as_secs_f64(),
                    status: result.status.label().to_string(),
                });
                st.summary.tasks_executed += 1;
                strategy.on_result(result)?;
                if !strategy.iteration_complete() {
                    // Replacement tasks for failures show up here.
                    self.submit_all(strategy, executor, st, iteration)?;
                }
            }
            strategy.advance_iteration()?;
            st.summary.iterations += 1;
        }
        Ok(())
    }

    fn submit_all<S, E>(&self, strategy: &mut S, executor: &mut E, st: &mut RunState, iteration: u64) -> Result<()>
    where
        S: Strategy + ?Sized,
        E: Executor + ?Sized,
    {
        while let Some(task) = strategy.next_task() {
            if st.pending.contains_key(&task.task_id) {
                return Err(Error::Strategy(format!("task id {} reused", task.task_id)));
            }
            st.pending.insert(task.task_id, InFlight { created_at: task.created_at, iteration });
            executor.submit(task)?;
        }
        Ok(())
    }

    fn next_result<E: Executor + ?Sized>(&self, executor: &E) -> Result<TaskResult> {
        let rx = executor.completed();
        match self.result_timeout {
            None => rx.recv().map_err(|_| Error::Executor("result queue closed".into())),
            Some(t) => rx.recv_timeout(t).map_err(|e| match e {
                RecvTimeoutError::Timeout => Error::Executor(format!("no result within {t:?}")),
                RecvTimeoutError::Disconnected => Error::Executor("result queue closed".into()),
            }),
        }
    }

    fn drain<E: Executor + ?Sized>(&self, executor: &E, st: &mut RunState) {
        let deadline = Instant::now() + self.drain_timeout;
        while !st.pending.is_empty() {
            let left = deadline.saturating_duration_since(Instant::now());
            match executor.completed().recv_timeout(left) {
                Ok(r) => {
                    st.pending.remove(&r.task_id);
                }
                Err(_) => break,
            }
        }
        if !st.pending.is_empty() {
            log::warn!("{} tasks still in flight after abort", st.pending.len());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::local::SyncExecutor;
    use crate::distribution::{TaskHandler, TaskOutput};
    use std::sync::Arc;

    /// Emits `per_iteration` tasks for `iterations` iterations.
    struct Counting {
        per_iteration: usize,
        iterations: u64,
        done: u64,
        emitted: usize,
        received: usize,
        next_id: u64,
        log: Vec<String>,
        fail_first: bool,
    }

    impl Counting {
        fn new(per_iteration: usize, iterations: u64) -> Self {
            Counting {
                per_iteration,
                iterations,
                done: 0,
                emitted: 0,
                received: 0,
                next_id: 0,
                log: Vec::new(),
                fail_first: false,
            }
        }
    }

    impl Strategy for Counting {
        fn init(&mut self) -> Result<()> {
            self.log.push("init".into());
            Ok(())
        }

        fn next_task(&mut self) -> Option<Task> {
            if self.is_complete() || self.emitted == self.per_iteration {
                return None;
            }
            self.emitted += 1;
            self.next_id += 1;
            let payload = if self.fail_first && self.next_id == 1 { b"fail".to_vec() } else { b"ok".to_vec() };
            self.log.push(format!("task {}", self.next_id));
            Some(Task::new(self.next_id, payload))
        }

        fn on_result(&mut self, result: TaskResult) -> Result<()> {
            self.log.push(format!("result {} {}", result.task_id, result.status.label()));
            if result.status.is_success() {
                self.received += 1;
            } else {
                // resubmit next drain
                self.emitted -= 1;
            }
            Ok(())
        }

        fn iteration_complete(&self) -> bool {
            self.received == self.per_iteration
        }

        fn advance_iteration(&mut self) -> Result<()> {
            self.log.push("advance".into());
            self.done += 1;
            self.emitted = 0;
            self.received = 0;
            Ok(())
        }

        fn is_complete(&self) -> bool {
            self.done >= self.iterations
        }
    }

    fn echo_handler() -> TaskHandler {
        Arc::new(|payload: &[u8]| {
            if payload == b"fail" {
                Err("boom".to_string())
            } else {
                Ok(TaskOutput { payload: payload.to_vec(), pure_execution_time: None })
            }
        })
    }

    fn executor() -> SyncExecutor {
        let mut e = SyncExecutor::new(echo_handler());
        e.start().unwrap();
        e
    }

    #[test]
    fn complete_at_init_runs_nothing() {
        let mut s = Counting::new(3, 0);
        let summary = Controller::default().run(&mut s, &mut executor()).unwrap();
        assert_eq!(summary.iterations, 0);
        assert_eq!(summary.tasks_executed, 0);
    }

    #[test]
    fn counts_tasks_and_iterations() {
        let mut s = Counting::new(3, 2);
        let summary = Controller::default().run(&mut s, &mut executor()).unwrap();
        assert_eq!(summary.iterations, 2);
        assert_eq!(summary.tasks_executed, 6);
        assert_eq!(summary.records.iter().filter(|r| r.iteration == 1).count(), 3);
        // all three submissions precede the first result of the iteration
        assert_eq!(
            &s.log[..8],
            &[
                "init",
                "task 1",
                "task 2",
                "task 3",
                "result 1 succeeded",
                "result 2 succeeded",
                "result 3 succeeded",
                "advance"
            ]
        );
        assert_eq!(s.log.iter().filter(|l| *l == "advance").count(), 2);
    }

    #[test]
    fn failed_task_forwarded_once() {
        let mut s = Counting::new(1, 1);
        s.fail_first = true;
        let summary = Controller::default().run(&mut s, &mut executor()).unwrap();
        assert_eq!(s.log.iter().filter(|l| l.ends_with("failed")).count(), 1);
        assert_eq!(summary.tasks_executed, 2);
        assert_eq!(summary.records[0].status, "failed");
    }

    #[test]
    fn stalled_strategy_aborts_with_partial_summary() {
        struct Stalled;
        impl Strategy for Stalled {
            fn init(&mut self) -> Result<()> {
                Ok(())
            }
            fn next_task(&mut self) -> Option<Task> {
                None
            }
            fn on_result(&mut self, _: TaskResult) -> Result<()> {
                Ok(())
            }
            fn iteration_complete(&self) -> bool {
                false
            }
            fn advance_iteration(&mut self) -> Result<()> {
                Ok(())
            }
            fn is_complete(&self) -> bool {
                false
            }
        }
        let err = Controller::default().run(&mut Stalled, &mut executor()).unwrap_err();
        assert!(matches!(err.cause, Error::Strategy(_)));
        assert_eq!(err.partial.iterations, 0);
    }

    #[test]
    fn strategy_error_aborts() {
        struct Failing(bool);
        impl Strategy for Failing {
            fn init(&mut self) -> Result<()> {
                Ok(())
            }
            fn next_task(&mut self) -> Option<Task> {
                if self.0 {
                    return None;
                }
                self.0 = true;
                Some(Task::new(1, b"ok".to_vec()))
            }
            fn on_result(&mut self, _: TaskResult) -> Result<()> {
                Err(Error::Strategy("bad result".into()))
            }
            fn iteration_complete(&self) -> bool {
                false
            }
            fn advance_iteration(&mut self) -> Result<()> {
                Ok(())
            }
            fn is_complete(&self) -> bool {
                false
            }
        }
        let err = Controller::default().run(&mut Failing(false), &mut executor()).unwrap_err();
        assert_eq!(err.partial.tasks_executed, 1);
    }

    #[test]
    fn cycle_measurement() {
        let task = Task::new(7, vec![]);
        let result = TaskResult {
            task_id: 7,
            status: TaskStatus::Succeeded,
            payload: vec![],
            pure_execution_time: Duration::ZERO,
            collected_at: task.created_at + Duration::from_secs(10),
        };
        assert_eq!(measure_task_cycle(&task, &result).unwrap(), Duration::from_secs(10));
        let same = TaskResult { collected_at: task.created_at, ..result.clone() };
        assert_eq!(measure_task_cycle(&task, &same).unwrap(), Duration::ZERO);
        let other = TaskResult { task_id: 8, ..result };
        assert!(matches!(measure_task_cycle(&task, &other), Err(Error::Contract(_))));
    }

    #[test]
    fn summary_csv_roundtrip() {
        let mut s = Counting::new(2, 2);
        let summary = Controller::default().run(&mut s, &mut executor()).unwrap();
        let mut buf = Vec::new();
        summary.write_csv(&mut buf).unwrap();
        let header = String::from_utf8(buf.clone()).unwrap();
        assert!(header.starts_with("iteration,task_id,created_at,collected_at,pure_execution_time,status\n"));
        assert_eq!(RunSummary::read_records(buf.as_slice()).unwrap(), summary.records);
    }
}
