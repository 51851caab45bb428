//! TCP coordinator and worker.
//!
//! The coordinator runs an acceptor thread, one reader thread per
//! connection and a scheduler thread that owns the worker registry. Readers
//! and callers talk to the scheduler through a single event queue. Each
//! worker runs one task at a time; queued tasks go to idle workers in FIFO
//! order. When a worker disconnects or misses too many pings its in-flight
//! task is requeued, and late duplicate results are dropped by task id.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::io;
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use crossbeam_channel::{unbounded, Receiver, RecvTimeoutError, Sender};

use super::wire::{
    decode_task, encode_task, is_disconnect, Hello, MessageType, ResultFrame, WireMessage, PROTOCOL_VERSION,
};
use super::{check_running, execute, Executor, Lifecycle, TaskHandler};
use crate::error::{Error, Result};
use crate::strategy::{Task, TaskId, TaskResult, TaskStatus};

pub const DEFAULT_PORT: u16 = 7007;
/// Overrides the coordinator bind address when set.
pub const BIND_ENV: &str = "OFFSPRING_BIND";

/// Bind address from [`BIND_ENV`], or all interfaces on [`DEFAULT_PORT`].
pub fn default_bind_addr() -> String {
    std::env::var(BIND_ENV).unwrap_or_else(|_| format!("0.0.0.0:{DEFAULT_PORT}"))
}

#[derive(Clone, Debug)]
pub struct CoordinatorOptions {
    pub ping_interval: Duration,
    /// Unanswered pings after which a worker is declared lost.
    pub missed_pings: u32,
    /// How long a new connection may take to send HELLO.
    pub handshake_timeout: Duration,
}

impl Default for CoordinatorOptions {
    fn default() -> Self {
        CoordinatorOptions {
            ping_interval: Duration::from_secs(5),
            missed_pings: 3,
            handshake_timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkerState {
    Idle,
    Busy,
    Lost,
}

/// Registry entry as seen from outside the scheduler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkerInfo {
    pub id: u64,
    pub name: String,
    pub address: SocketAddr,
    pub state: WorkerState,
    pub in_flight: Option<TaskId>,
    pub completed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoordinatorStats {
    pub connected: usize,
    pub queued: usize,
    pub in_flight: usize,
    /// Highest number of simultaneously assigned tasks seen so far.
    pub max_in_flight: usize,
    pub completed: u64,
    pub requeued: u64,
    pub duplicates: u64,
    pub lost_workers: u64,
}

#[derive(Default)]
struct Shared {
    stats: Mutex<CoordinatorStats>,
    workers: Mutex<Vec<WorkerInfo>>,
}

#[derive(Clone)]
pub struct CoordinatorMonitor {
    shared: Arc<Shared>,
}

impl CoordinatorMonitor {
    pub fn stats(&self) -> CoordinatorStats {
        self.shared.stats.lock().expect("stats lock").clone()
    }

    pub fn workers(&self) -> Vec<WorkerInfo> {
        self.shared.workers.lock().expect("registry lock").clone()
    }
}

enum Event {
    Submit(Task),
    Connected { conn: u64, name: String, address: SocketAddr, stream: TcpStream },
    Message { conn: u64, msg: WireMessage },
    Closed { conn: u64, reason: String },
    Shutdown,
}

/// Coordinator side of the TCP runtime.
pub struct TcpExecutor {
    listener: Option<TcpListener>,
    local_addr: SocketAddr,
    options: CoordinatorOptions,
    events_tx: Sender<Event>,
    events_rx: Option<Receiver<Event>>,
    result_tx: Sender<TaskResult>,
    result_rx: Receiver<TaskResult>,
    shared: Arc<Shared>,
    stop: Arc<AtomicBool>,
    threads: Vec<JoinHandle<()>>,
    state: Lifecycle,
}

impl TcpExecutor {
    /// Binds the listening socket. Connections are accepted once started.
    pub fn bind<A: ToSocketAddrs>(addr: A, options: CoordinatorOptions) -> Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let local_addr = listener.local_addr()?;
        let (events_tx, events_rx) = unbounded();
        let (result_tx, result_rx) = unbounded();
        Ok(TcpExecutor {
            listener: Some(listener),
            local_addr,
            options,
            events_tx,
            events_rx: Some(events_rx),
            result_tx,
            result_rx,
            shared: Arc::default(),
            stop: Arc::default(),
            threads: Vec::new(),
            state: Lifecycle::Created,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    pub fn stats(&self) -> CoordinatorStats {
        self.monitor().stats()
    }

    /// Every worker seen so far, including lost ones.
    pub fn workers(&self) -> Vec<WorkerInfo> {
        self.monitor().workers()
    }

    /// Read-only view of stats and registry that can outlive a borrow of
    /// the executor.
    pub fn monitor(&self) -> CoordinatorMonitor {
        CoordinatorMonitor { shared: Arc::clone(&self.shared) }
    }

    /// Blocks until at least `count` workers are connected.
    pub fn wait_for_workers(&self, count: usize, timeout: Duration) -> Result<()> {
        let deadline = Instant::now() + timeout;
        loop {
            let connected = self.stats().connected;
            if connected >= count {
                return Ok(());
            }
            if Instant::now() >= deadline {
                return Err(Error::Executor(format!("{connected} of {count} workers connected after {timeout:?}")));
            }
            thread::sleep(Duration::from_millis(10));
        }
    }
}

impl Executor for TcpExecutor {
    fn start(&mut self) -> Result<()> {
        if self.state != Lifecycle::Created {
            return Err(Error::Executor("coordinator already started".into()));
        }
        let listener = self.listener.take().expect("listener present before start");
        listener.set_nonblocking(true)?;
        let events = self.events_tx.clone();
        let stop = Arc::clone(&self.stop);
        let handshake = self.options.handshake_timeout;
        self.threads.push(
            thread::Builder::new()
                .name("ofs-acceptor".into())
                .spawn(move || accept_loop(listener, events, stop, handshake))?,
        );

        let mut scheduler = Scheduler {
            options: self.options.clone(),
            conns: BTreeMap::new(),
            idle: VecDeque::new(),
            queue: VecDeque::new(),
            payloads: HashMap::new(),
            assigned: HashMap::new(),
            done: HashSet::new(),
            registry: BTreeMap::new(),
            stats: CoordinatorStats::default(),
            results: self.result_tx.clone(),
            shared: Arc::clone(&self.shared),
        };
        let events = self.events_rx.take().expect("events present before start");
        self.threads.push(thread::Builder::new().name("ofs-scheduler".into()).spawn(move || scheduler.run(events))?);
        self.state = Lifecycle::Running;
        log::info!("coordinator listening on {}", self.local_addr);
        Ok(())
    }

    fn submit(&mut self, task: Task) -> Result<()> {
        check_running(self.state)?;
        self.events_tx.send(Event::Submit(task)).map_err(|_| Error::Executor("scheduler stopped".into()))
    }

    fn completed(&self) -> &Receiver<TaskResult> {
        &self.result_rx
    }

    fn shutdown(&mut self) -> Result<()> {
        if self.state == Lifecycle::Stopped {
            return Ok(());
        }
        self.state = Lifecycle::Stopped;
        self.stop.store(true, Ordering::SeqCst);
        let _ = self.events_tx.send(Event::Shutdown);
        for t in self.threads.drain(..) {
            if t.join().is_err() {
                log::error!("coordinator thread panicked");
            }
        }
        Ok(())
    }
}

impl Drop for TcpExecutor {
    fn drop(&mut self) {
        let _ = self.shutdown();
    }
}

fn accept_loop(listener: TcpListener, events: Sender<Event>, stop: Arc<AtomicBool>, handshake: Duration) {
    let mut next_conn = 0u64;
    while !stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, address)) => {
                let conn = next_conn;
                next_conn += 1;
                let events = events.clone();
                let spawned = thread::Builder::new()
                    .name(format!("ofs-conn-{conn}"))
                    .spawn(move || connection_reader(conn, stream, address, events, handshake));
                if let Err(e) = spawned {
                    log::error!("cannot spawn reader for {address}: {e}");
                }
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(10)),
            Err(e) => {
                log::warn!("accept failed: {e}");
                thread::sleep(Duration::from_millis(50));
            }
        }
    }
}

fn handshake(stream: &mut TcpStream, timeout: Duration) -> Result<Hello> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(timeout))?;
    let msg = WireMessage::read_from(stream)?;
    if msg.kind != MessageType::Hello {
        return Err(Error::Protocol(format!("expected HELLO, got {:?}", msg.kind)));
    }
    let hello = Hello::decode(&msg.payload)?;
    stream.set_read_timeout(None)?;
    Ok(hello)
}

fn connection_reader(conn: u64, mut stream: TcpStream, address: SocketAddr, events: Sender<Event>, timeout: Duration) {
    let hello = match handshake(&mut stream, timeout) {
        Ok(h) => h,
        Err(e) => {
            log::warn!("handshake with {address} failed: {e}");
            let _ = stream.shutdown(Shutdown::Both);
            return;
        }
    };
    if hello.version != PROTOCOL_VERSION {
        log::warn!(
            "worker `{}` at {address} speaks protocol {}, expected {PROTOCOL_VERSION}; closing",
            hello.name,
            hello.version
        );
        let _ = WireMessage::bye().write_to(&mut stream);
        let _ = stream.shutdown(Shutdown::Both);
        return;
    }
    let writer = match stream.try_clone() {
        Ok(w) => w,
        Err(e) => {
            log::warn!("cannot clone stream for {address}: {e}");
            return;
        }
    };
    if events.send(Event::Connected { conn, name: hello.name, address, stream: writer }).is_err() {
        return;
    }
    loop {
        match WireMessage::read_from(&mut stream) {
            Ok(msg) => {
                if events.send(Event::Message { conn, msg }).is_err() {
                    return;
                }
            }
            Err(e) => {
                let _ = events.send(Event::Closed { conn, reason: e.to_string() });
                return;
            }
        }
    }
}

struct Conn {
    stream: TcpStream,
    task: Option<TaskId>,
    unanswered_pings: u32,
}

struct Scheduler {
    options: CoordinatorOptions,
    conns: BTreeMap<u64, Conn>,
    idle: VecDeque<u64>,
    queue: VecDeque<TaskId>,
    payloads: HashMap<TaskId, Vec<u8>>,
    assigned: HashMap<TaskId, u64>,
    done: HashSet<TaskId>,
    registry: BTreeMap<u64, WorkerInfo>,
    stats: CoordinatorStats,
    results: Sender<TaskResult>,
    shared: Arc<Shared>,
}

impl Scheduler {
    fn run(&mut self, events: Receiver<Event>) {
        let mut next_ping = Instant::now() + self.options.ping_interval;
        loop {
            let wait = next_ping.saturating_duration_since(Instant::now());
            match events.recv_timeout(wait) {
                Ok(Event::Shutdown) | Err(RecvTimeoutError::Disconnected) => break,
                Ok(ev) => self.handle(ev),
                Err(RecvTimeoutError::Timeout) => {}
            }
            if Instant::now() >= next_ping {
                self.ping_round();
                next_ping = Instant::now() + self.options.ping_interval;
            }
            self.dispatch();
            self.publish();
        }
        for (_, mut c) in std::mem::take(&mut self.conns) {
            let _ = WireMessage::bye().write_to(&mut c.stream);
            let _ = c.stream.shutdown(Shutdown::Both);
        }
        if !self.queue.is_empty() || !self.assigned.is_empty() {
            log::warn!(
                "coordinator stopped with {} queued and {} in-flight tasks",
                self.queue.len(),
                self.assigned.len()
            );
        }
        self.registry.values_mut().for_each(|w| {
            if w.state != WorkerState::Lost {
                w.state = WorkerState::Idle;
                w.in_flight = None;
            }
        });
        self.publish();
    }

    fn handle(&mut self, ev: Event) {
        match ev {
            Event::Submit(task) => {
                if self.done.contains(&task.task_id) || self.payloads.contains_key(&task.task_id) {
                    log::warn!("ignoring resubmitted task id {}", task.task_id);
                    return;
                }
                self.queue.push_back(task.task_id);
                self.payloads.insert(task.task_id, task.payload);
            }
            Event::Connected { conn, name, address, stream } => {
                log::info!("worker `{name}` connected from {address}");
                self.conns.insert(conn, Conn { stream, task: None, unanswered_pings: 0 });
                self.idle.push_back(conn);
                self.registry.insert(
                    conn,
                    WorkerInfo { id: conn, name, address, state: WorkerState::Idle, in_flight: None, completed: 0 },
                );
            }
            Event::Message { conn, msg } => {
                let Some(c) = self.conns.get_mut(&conn) else { return };
                c.unanswered_pings = 0;
                match msg.kind {
                    MessageType::Ping => {}
                    MessageType::Result => match ResultFrame::decode(&msg.payload) {
                        Ok(frame) => self.on_result(conn, frame),
                        Err(e) => self.drop_conn(conn, &format!("bad RESULT: {e}")),
                    },
                    MessageType::Bye => self.drop_conn(conn, "worker said BYE"),
                    other => self.drop_conn(conn, &format!("unexpected {other:?} from worker")),
                }
            }
            Event::Closed { conn, reason } => {
                if self.conns.contains_key(&conn) {
                    self.drop_conn(conn, &reason);
                }
            }
            Event::Shutdown => {}
        }
    }

    fn on_result(&mut self, conn: u64, frame: ResultFrame) {
        let id = frame.task_id;
        if let Some(c) = self.conns.get_mut(&conn) {
            if c.task == Some(id) {
                c.task = None;
                self.idle.push_back(conn);
            }
        }
        if let Some(w) = self.registry.get_mut(&conn) {
            if w.in_flight == Some(id) {
                w.in_flight = None;
                w.state = WorkerState::Idle;
            }
            w.completed += 1;
        }
        if self.done.contains(&id) {
            self.stats.duplicates += 1;
            log::debug!("dropping duplicate result for task {id}");
            return;
        }
        if self.payloads.remove(&id).is_none() {
            log::warn!("result for unknown task {id}");
            return;
        }
        self.done.insert(id);
        self.assigned.remove(&id);
        self.queue.retain(|&q| q != id);
        self.stats.completed += 1;
        let status = if frame.succeeded {
            TaskStatus::Succeeded
        } else {
            TaskStatus::Failed(String::from_utf8_lossy(&frame.payload).into_owned())
        };
        let payload = if frame.succeeded { frame.payload } else { Vec::new() };
        let _ = self.results.send(TaskResult {
            task_id: id,
            status,
            payload,
            pure_execution_time: frame.pure_execution_time,
            collected_at: Instant::now(),
        });
    }

    fn drop_conn(&mut self, conn: u64, reason: &str) {
        let Some(c) = self.conns.remove(&conn) else { return };
        let _ = c.stream.shutdown(Shutdown::Both);
        self.idle.retain(|&i| i != conn);
        self.stats.lost_workers += 1;
        if let Some(w) = self.registry.get_mut(&conn) {
            log::warn!("worker `{}` lost: {reason}", w.name);
            w.state = WorkerState::Lost;
            w.in_flight = None;
        }
        if let Some(id) = c.task {
            if !self.done.contains(&id) {
                self.assigned.remove(&id);
                self.queue.push_front(id);
                self.stats.requeued += 1;
                log::info!("requeued task {id}");
            }
        }
    }

    fn ping_round(&mut self) {
        let mut lost = Vec::new();
        for (&id, c) in &mut self.conns {
            if c.unanswered_pings >= self.options.missed_pings {
                lost.push((id, format!("{} pings unanswered", c.unanswered_pings)));
                continue;
            }
            match WireMessage::ping().write_to(&mut c.stream) {
                Ok(()) => c.unanswered_pings += 1,
                Err(e) => lost.push((id, e.to_string())),
            }
        }
        for (id, reason) in lost {
            self.drop_conn(id, &reason);
        }
    }

    fn dispatch(&mut self) {
        while !self.queue.is_empty() {
            let Some(conn) = self.idle.pop_front() else { return };
            let Some(c) = self.conns.get_mut(&conn) else { continue };
            if c.task.is_some() {
                continue;
            }
            let id = self.queue.pop_front().expect("queue non-empty");
            let payload = &self.payloads[&id];
            match encode_task(id, payload).write_to(&mut c.stream) {
                Ok(()) => {
                    c.task = Some(id);
                    self.assigned.insert(id, conn);
                    self.stats.max_in_flight = self.stats.max_in_flight.max(self.assigned.len());
                    if let Some(w) = self.registry.get_mut(&conn) {
                        w.state = WorkerState::Busy;
                        w.in_flight = Some(id);
                    }
                }
                Err(e) => {
                    self.queue.push_front(id);
                    self.drop_conn(conn, &format!("send failed: {e}"));
                }
            }
        }
    }

    fn publish(&mut self) {
        self.stats.connected = self.conns.len();
        self.stats.queued = self.queue.len();
        self.stats.in_flight = self.assigned.len();
        *self.shared.stats.lock().expect("stats lock") = self.stats.clone();
        *self.shared.workers.lock().expect("registry lock") = self.registry.values().cloned().collect();
    }
}

#[derive(Clone, Debug)]
pub struct WorkerOptions {
    pub name: String,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
    /// Consecutive failed connection attempts before giving up; `None`
    /// retries forever.
    pub max_attempts: Option<u32>,
}

impl Default for WorkerOptions {
    fn default() -> Self {
        WorkerOptions {
            name: format!("worker-{}", std::process::id()),
            initial_backoff: Duration::from_secs(1),
            max_backoff: Duration::from_secs(30),
            max_attempts: None,
        }
    }
}

enum SessionEnd {
    Bye,
    Lost(String),
}

/// Connects to the coordinator and executes tasks until it says BYE.
///
/// Lost connections are retried with exponential backoff.
pub fn worker_loop(addr: &str, handler: TaskHandler, options: &WorkerOptions) -> Result<()> {
    let mut backoff = options.initial_backoff;
    let mut failures = 0u32;
    loop {
        match TcpStream::connect(addr) {
            Ok(stream) => {
                failures = 0;
                backoff = options.initial_backoff;
                match serve(stream, &handler, &options.name) {
                    SessionEnd::Bye => {
                        log::info!("coordinator said BYE");
                        return Ok(());
                    }
                    SessionEnd::Lost(reason) => log::warn!("connection to {addr} lost: {reason}"),
                }
            }
            Err(e) => {
                failures += 1;
                log::warn!("cannot reach {addr}: {e}");
                if options.max_attempts.is_some_and(|m| failures >= m) {
                    return Err(Error::Executor(format!("gave up on {addr} after {failures} attempts")));
                }
            }
        }
        thread::sleep(backoff);
        backoff = (backoff * 2).min(options.max_backoff);
    }
}

fn serve(stream: TcpStream, handler: &TaskHandler, name: &str) -> SessionEnd {
    let setup = || -> Result<(TcpStream, Arc<Mutex<TcpStream>>)> {
        stream.set_nodelay(true)?;
        let mut w = stream.try_clone()?;
        Hello { version: PROTOCOL_VERSION, name: name.to_string() }.encode().write_to(&mut w)?;
        Ok((stream.try_clone()?, Arc::new(Mutex::new(w))))
    };
    let (mut reader, writer) = match setup() {
        Ok(s) => s,
        Err(e) => return SessionEnd::Lost(e.to_string()),
    };

    // Tasks run off the reader thread so pings are answered mid-task.
    let (task_tx, task_rx) = unbounded::<(TaskId, Vec<u8>)>();
    let exec_writer = Arc::clone(&writer);
    let handler = Arc::clone(handler);
    thread::spawn(move || {
        for (id, payload) in task_rx {
            let ex = execute(&handler, &payload);
            let (succeeded, body) = match ex.status {
                TaskStatus::Succeeded => (true, ex.payload),
                TaskStatus::Failed(msg) => (false, msg.into_bytes()),
            };
            let frame =
                ResultFrame { task_id: id, succeeded, pure_execution_time: ex.pure_execution_time, payload: body };
            if frame.encode().write_to(&mut *exec_writer.lock().expect("writer lock")).is_err() {
                return;
            }
        }
    });

    loop {
        let msg = match WireMessage::read_from(&mut reader) {
            Ok(m) => m,
            Err(e) if is_disconnect(&e) => return SessionEnd::Lost("coordinator closed the connection".into()),
            Err(e) => return SessionEnd::Lost(e.to_string()),
        };
        match msg.kind {
            MessageType::Ping => {
                if let Err(e) = WireMessage::ping().write_to(&mut *writer.lock().expect("writer lock")) {
                    return SessionEnd::Lost(e.to_string());
                }
            }
            MessageType::Task => match decode_task(&msg.payload) {
                Ok(t) => {
                    let _ = task_tx.send(t);
                }
                Err(e) => return SessionEnd::Lost(e.to_string()),
            },
            MessageType::Bye => return SessionEnd::Bye,
            other => return SessionEnd::Lost(format!("unexpected {other:?} from coordinator")),
        }
    }
}

/// Starts `count` in-process worker threads connected to `addr`.
pub fn spawn_local_workers(addr: SocketAddr, count: usize, handler: TaskHandler) -> Vec<JoinHandle<Result<()>>> {
    (0..count)
        .map(|i| {
            let handler = Arc::clone(&handler);
            let options = WorkerOptions {
                name: format!("local-{i}"),
                initial_backoff: Duration::from_millis(50),
                max_backoff: Duration::from_secs(1),
                max_attempts: Some(20),
            };
            thread::spawn(move || worker_loop(&addr.to_string(), handler, &options))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::TaskOutput;

    fn echo() -> TaskHandler {
        Arc::new(|p: &[u8]| {
            if p == b"fail" {
                return Err("asked to fail".into());
            }
            if let Some(ms) = p.strip_prefix(b"sleep") {
                let ms: u64 = std::str::from_utf8(ms).unwrap().parse().unwrap();
                thread::sleep(Duration::from_millis(ms));
            }
            Ok(TaskOutput { payload: p.to_vec(), pure_execution_time: None })
        })
    }

    fn coordinator() -> TcpExecutor {
        let mut e = TcpExecutor::bind("127.0.0.1:0", CoordinatorOptions::default()).unwrap();
        e.start().unwrap();
        e
    }

    fn collect(e: &TcpExecutor, n: usize) -> Vec<TaskResult> {
        (0..n).map(|_| e.completed().recv_timeout(Duration::from_secs(20)).expect("result")).collect()
    }

    #[test]
    fn single_task_single_worker() {
        let mut e = coordinator();
        let workers = spawn_local_workers(e.local_addr(), 1, echo());
        e.wait_for_workers(1, Duration::from_secs(5)).unwrap();
        e.submit(Task::new(1, b"hello".to_vec())).unwrap();
        e.submit(Task::new(2, b"fail".to_vec())).unwrap();
        let mut r = collect(&e, 2);
        r.sort_by_key(|r| r.task_id);
        assert_eq!(r[0].payload, b"hello");
        assert!(r[0].status.is_success());
        assert_eq!(r[1].status, TaskStatus::Failed("asked to fail".into()));
        e.shutdown().unwrap();
        for w in workers {
            w.join().unwrap().unwrap();
        }
        assert!(matches!(e.submit(Task::new(3, vec![])), Err(Error::Executor(_))));
    }

    #[test]
    fn tasks_wait_for_workers_and_in_flight_is_bounded() {
        let mut e = coordinator();
        for i in 0..10 {
            e.submit(Task::new(i, b"sleep20".to_vec())).unwrap();
        }
        thread::sleep(Duration::from_millis(100));
        assert_eq!(e.stats().queued, 10);
        let _workers = spawn_local_workers(e.local_addr(), 4, echo());
        let mut ids: Vec<_> = collect(&e, 10).into_iter().map(|r| r.task_id).collect();
        ids.sort();
        assert_eq!(ids, (0..10).collect::<Vec<_>>());
        let stats = e.stats();
        assert!(stats.max_in_flight <= 4, "{stats:?}");
        assert_eq!(stats.completed, 10);
        assert!(e.completed().recv_timeout(Duration::from_millis(100)).is_err());
    }

    #[test]
    fn version_mismatch_gets_bye() {
        let e = coordinator();
        let mut s = TcpStream::connect(e.local_addr()).unwrap();
        Hello { version: PROTOCOL_VERSION + 1, name: "old".into() }.encode().write_to(&mut s).unwrap();
        let reply = WireMessage::read_from(&mut s).unwrap();
        assert_eq!(reply.kind, MessageType::Bye);
        assert_eq!(e.stats().connected, 0);
    }

    #[test]
    fn crashed_worker_task_is_requeued_once() {
        let mut e = coordinator();
        // A fake worker that takes a task and dies without answering.
        let mut fake = TcpStream::connect(e.local_addr()).unwrap();
        Hello { version: PROTOCOL_VERSION, name: "doomed".into() }.encode().write_to(&mut fake).unwrap();
        e.wait_for_workers(1, Duration::from_secs(5)).unwrap();
        e.submit(Task::new(5, b"payload".to_vec())).unwrap();
        let msg = WireMessage::read_from(&mut fake).unwrap();
        assert_eq!(decode_task(&msg.payload).unwrap().0, 5);
        let _healthy = spawn_local_workers(e.local_addr(), 1, echo());
        e.wait_for_workers(2, Duration::from_secs(5)).unwrap();
        drop(fake);
        let r = collect(&e, 1);
        assert_eq!(r[0].task_id, 5);
        assert!(e.completed().recv_timeout(Duration::from_millis(200)).is_err());
        let stats = e.stats();
        assert_eq!(stats.requeued, 1);
        assert!(e.workers().iter().any(|w| w.name == "doomed" && w.state == WorkerState::Lost));
    }

    #[test]
    fn silent_worker_is_declared_lost() {
        let mut e = TcpExecutor::bind(
            "127.0.0.1:0",
            CoordinatorOptions { ping_interval: Duration::from_millis(50), missed_pings: 3, ..Default::default() },
        )
        .unwrap();
        e.start().unwrap();
        let mut mute = TcpStream::connect(e.local_addr()).unwrap();
        Hello { version: PROTOCOL_VERSION, name: "mute".into() }.encode().write_to(&mut mute).unwrap();
        e.wait_for_workers(1, Duration::from_secs(5)).unwrap();
        let deadline = Instant::now() + Duration::from_secs(5);
        while e.stats().connected > 0 {
            assert!(Instant::now() < deadline, "mute worker never dropped");
            thread::sleep(Duration::from_millis(20));
        }
        assert_eq!(e.stats().lost_workers, 1);
    }

    #[test]
    fn duplicate_results_are_dropped() {
        let mut e = coordinator();
        let mut fake = TcpStream::connect(e.local_addr()).unwrap();
        Hello { version: PROTOCOL_VERSION, name: "chatty".into() }.encode().write_to(&mut fake).unwrap();
        e.wait_for_workers(1, Duration::from_secs(5)).unwrap();
        e.submit(Task::new(9, b"x".to_vec())).unwrap();
        let msg = WireMessage::read_from(&mut fake).unwrap();
        assert_eq!(msg.kind, MessageType::Task);
        let frame = ResultFrame { task_id: 9, succeeded: true, pure_execution_time: Duration::ZERO, payload: vec![1] };
        frame.encode().write_to(&mut fake).unwrap();
        frame.encode().write_to(&mut fake).unwrap();
        assert_eq!(collect(&e, 1)[0].task_id, 9);
        assert!(e.completed().recv_timeout(Duration::from_millis(200)).is_err());
        assert_eq!(e.stats().duplicates, 1);
    }
}
