//! Executor backends: synchronous in-process, a local thread pool, and a TCP
//! coordinator/worker runtime.

pub mod codec;
pub mod local;
pub mod tcp;
pub mod wire;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crossbeam_channel::Receiver;

use crate::error::{Error, Result};
use crate::strategy::{Task, TaskId, TaskResult, TaskStatus};

/// Output of a task handler.
#[derive(Clone, Debug, Default)]
pub struct TaskOutput {
    pub payload: Vec<u8>,
    /// Pure execution time as measured by the handler itself; when `None`
    /// the executor uses the wall time of the handler call.
    pub pure_execution_time: Option<Duration>,
}

/// Executes a task payload on whichever node receives it.
pub type TaskHandler = Arc<dyn Fn(&[u8]) -> std::result::Result<TaskOutput, String> + Send + Sync>;

/// Runs submitted tasks and reports every one of them exactly once on
/// [`Executor::completed`], unless the executor is shut down first.
pub trait Executor {
    fn start(&mut self) -> Result<()>;

    /// Queues a task. Fails once the executor is shut down.
    fn submit(&mut self, task: Task) -> Result<()>;

    fn completed(&self) -> &Receiver<TaskResult>;

    fn shutdown(&mut self) -> Result<()>;
}

impl<E: Executor + ?Sized> Executor for Box<E> {
    fn start(&mut self) -> Result<()> {
        (**self).start()
    }

    fn submit(&mut self, task: Task) -> Result<()> {
        (**self).submit(task)
    }

    fn completed(&self) -> &Receiver<TaskResult> {
        (**self).completed()
    }

    fn shutdown(&mut self) -> Result<()> {
        (**self).shutdown()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Lifecycle {
    Created,
    Running,
    Stopped,
}

pub(crate) fn check_running(state: Lifecycle) -> Result<()> {
    match state {
        Lifecycle::Running => Ok(()),
        Lifecycle::Created => Err(Error::Executor("executor not started".into())),
        Lifecycle::Stopped => Err(Error::Executor("executor shut down".into())),
    }
}

/// Outcome of running a handler: status, payload and pure time.
pub(crate) struct Execution {
    pub status: TaskStatus,
    pub payload: Vec<u8>,
    pub pure_execution_time: Duration,
}

/// Runs `handler`, turning errors and panics into a failed status.
pub(crate) fn execute(handler: &TaskHandler, payload: &[u8]) -> Execution {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| handler(payload)));
    let elapsed = started.elapsed();
    match outcome {
        Ok(Ok(out)) => Execution {
            status: TaskStatus::Succeeded,
            payload: out.payload,
            pure_execution_time: out.pure_execution_time.unwrap_or(elapsed),
        },
        Ok(Err(msg)) => {
            Execution { status: TaskStatus::Failed(msg), payload: Vec::new(), pure_execution_time: elapsed }
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "task panicked".to_string());
            Execution { status: TaskStatus::Failed(msg), payload: Vec::new(), pure_execution_time: elapsed }
        }
    }
}

impl Execution {
    pub(crate) fn into_result(self, task_id: TaskId) -> TaskResult {
        TaskResult {
            task_id,
            status: self.status,
            payload: self.payload,
            pure_execution_time: self.pure_execution_time,
            collected_at: Instant::now(),
        }
    }
}
