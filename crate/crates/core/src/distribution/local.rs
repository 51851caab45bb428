//! In-process executors.

use std::thread::{self, JoinHandle};

use crossbeam_channel::{unbounded, Receiver, Sender};

use super::{check_running, execute, Executor, Lifecycle, TaskHandler};
use crate::error::{Error, Result};
use crate::strategy::{Task, TaskResult};

/// Runs each task inside `submit`, on the caller's thread. Results come out
/// in submission order.
pub struct SyncExecutor {
    handler: TaskHandler,
    tx: Sender<TaskResult>,
    rx: Receiver<TaskResult>,
    state: Lifecycle,
}

impl SyncExecutor {
    pub fn new(handler: TaskHandler) -> Self {
        let (tx, rx) = unbounded();
        SyncExecutor { handler, tx, rx, state: Lifecycle::Created }
    }
}

impl Executor for SyncExecutor {
    fn start(&mut self) -> Result<()> {
        self.state = Lifecycle::Running;
        Ok(())
    }

    fn submit(&mut self, task: Task) -> Result<()> {
        check_running(self.state)?;
        let result = execute(&self.handler, &task.payload).into_result(task.task_id);
        self.tx.send(result).map_err(|_| Error::Executor("result queue closed".into()))
    }

    fn completed(&self) -> &Receiver<TaskResult> {
        &self.rx
    }

    fn shutdown(&mut self) -> Result<()> {
        self.state = Lifecycle::Stopped;
        Ok(())
    }
}

/// Fixed-size pool of worker threads pulling from a shared FIFO queue.
pub struct PoolExecutor {
    handler: TaskHandler,
    threads: usize,
    task_tx: Option<Sender<Task>>,
    result_tx: Sender<TaskResult>,
    result_rx: Receiver<TaskResult>,
    workers: Vec<JoinHandle<()>>,
    state: Lifecycle,
}

impl PoolExecutor {
    pub fn new(handler: TaskHandler, threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::Config("pool needs at least one thread".into()));
        }
        let (result_tx, result_rx) = unbounded();
        Ok(PoolExecutor {
            handler,
            threads,
            task_tx: None,
            result_tx,
            result_rx,
            workers: Vec::new(),
            state: Lifecycle::Created,
        })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Executor for PoolExecutor {
    fn start(&mut self) -> Result<()> {
        if self.state != Lifecycle::Created {
            return Ok(());
        }
        let (task_tx, task_rx) = unbounded::<Task>();
        for i in 0..self.threads {
            let rx = task_rx.clone();
            let tx = self.result_tx.clone();
            let handler = self.handler.clone();
            let handle = thread::Builder::new().name(format!("pool-{i}")).spawn(move || {
                for task in rx {
                    let result = execute(&handler, &task.payload).into_result(task.task_id);
                    if tx.send(result).is_err() {
                        break;
                    }
                }
            })?;
            self.workers.push(handle);
        }
        self.task_tx = Some(task_tx);
        self.state = Lifecycle::Running;
        Ok(())
    }

    fn submit(&mut self, task: Task) -> Result<()> {
        check_running(self.state)?;
        self.task_tx
            .as_ref()
            .expect("running pool has a queue")
            .send(task)
            .map_err(|_| Error::Executor("pool queue closed".into()))
    }

    fn completed(&self) -> &Receiver<TaskResult> {
        &self.result_rx
    }

    fn shutdown(&mut self) -> Result<()> {
        self.state = Lifecycle::Stopped;
        self.task_tx = None;
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
        Ok(())
    }
}

impl Drop for PoolExecutor {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}
