//! Parallel evaluation of an output index range.
//!
//! A fixed pool of `W` workers pulls tasks (contiguous index ranges) in
//! ascending order. Finished chunks go to a single assembler on the calling
//! thread, which hands them to the sink strictly in ascending start order.
//! A task may only start while fewer than `W` chunks are outstanding
//! (started but not yet delivered), so at most `W · chunk_size` amplitudes
//! are resident at any time.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Condvar, Mutex};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chunk::{evaluate_chunk, StateChunk};
use crate::circuit::Circuit;
use crate::state::InputState;
use crate::Address;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

pub type SinkResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

/// Consumer of output chunks, fed in ascending index order.
pub trait ChunkSink {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult;

    fn finish(&mut self) -> SinkResult {
        Ok(())
    }
}

impl<S: ChunkSink + ?Sized> ChunkSink for &mut S {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult {
        (**self).accept(chunk)
    }

    fn finish(&mut self) -> SinkResult {
        (**self).finish()
    }
}

impl<A: ChunkSink, B: ChunkSink> ChunkSink for (A, B) {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult {
        self.0.accept(chunk)?;
        self.1.accept(chunk)
    }

    fn finish(&mut self) -> SinkResult {
        self.0.finish()?;
        self.1.finish()
    }
}

/// Keeps every chunk in memory.
#[derive(Debug, Default)]
pub struct CollectSink {
    pub chunks: Vec<StateChunk>,
}

impl CollectSink {
    /// All amplitudes, concatenated.
    pub fn amplitudes(&self) -> Vec<num_complex::Complex64> {
        self.chunks
            .iter()
            .flat_map(|c| c.amps.iter().copied())
            .collect()
    }
}

impl ChunkSink for CollectSink {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult {
        self.chunks.push(chunk.clone());
        Ok(())
    }
}

/// SHA-256 over the little-endian bytes of every amplitude, in order.
/// Independent of how the range was chunked.
#[derive(Default)]
pub struct HashSink {
    hasher: Sha256,
}

impl HashSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hex_digest(self) -> String {
        self.hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl ChunkSink for HashSink {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult {
        for amp in &chunk.amps {
            self.hasher.update(amp.re.to_le_bytes());
            self.hasher.update(amp.im.to_le_bytes());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("empty or inverted range [{start}, {end})")]
    EmptyRange { start: Address, end: Address },
    #[error("range end {end} exceeds dimension {dim}")]
    RangeBeyondDimension { end: Address, dim: u64 },
    #[error("chunk size must be at least 1")]
    ZeroChunkSize,
    #[error("worker count must be at least 1")]
    ZeroWorkers,
}

/// Partition of `[start, end)` into tasks of `chunk_size` indices, run on
/// `workers` threads. The last task may be short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecutionPlan {
    start: Address,
    end: Address,
    chunk_size: u64,
    workers: usize,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl ExecutionPlan {
    pub fn new(range: Range<Address>, chunk_size: u64, workers: usize) -> Result<Self, PlanError> {
        if range.start >= range.end {
            return Err(PlanError::EmptyRange {
                start: range.start,
                end: range.end,
            });
        }
        if chunk_size == 0 {
            return Err(PlanError::ZeroChunkSize);
        }
        if workers == 0 {
            return Err(PlanError::ZeroWorkers);
        }
        Ok(ExecutionPlan {
            start: range.start,
            end: range.end,
            chunk_size,
            workers,
        })
    }

    /// The whole state vector of `circuit`.
    pub fn full(circuit: &Circuit, chunk_size: u64, workers: usize) -> Result<Self, PlanError> {
        Self::new(0..circuit.dim(), chunk_size, workers)
    }

    pub fn range(&self) -> Range<Address> {
        self.start..self.end
    }

    pub fn chunk_size(&self) -> u64 {
        self.chunk_size
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn task_count(&self) -> usize {
        (self.end - self.start).div_ceil(self.chunk_size) as usize
    }

    pub fn task(&self, k: usize) -> Range<Address> {
        let lo = self.start + k as u64 * self.chunk_size;
        lo..(lo + self.chunk_size).min(self.end)
    }

    pub fn tasks(&self) -> impl Iterator<Item = Range<Address>> + '_ {
        (0..self.task_count()).map(|k| self.task(k))
    }

    pub fn validate_for(&self, circuit: &Circuit) -> Result<(), PlanError> {
        if self.end > circuit.dim() {
            return Err(PlanError::RangeBeyondDimension {
                end: self.end,
                dim: circuit.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Wall-clock time of the evaluation and delivery phase.
    pub elapsed: Duration,
    /// Largest number of amplitudes resident in task buffers at once.
    pub peak_amplitudes: usize,
    pub tasks_completed: usize,
    pub indices: u64,
}

impl RunReport {
    /// Peak task-buffer memory in bytes.
    pub fn peak_bytes(&self) -> usize {
        self.peak_amplitudes * std::mem::size_of::<num_complex::Complex64>()
    }
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Core(#[from] crate::Error),
    /// Indices `[plan start, delivered_end)` reached the sink before it
    /// failed; anything written after that is missing.
    #[error("sink failed; partial output covers indices below {delivered_end}: {source}")]
    Sink {
        delivered_end: Address,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

/// Live/peak counter for amplitude buffers.
#[derive(Debug, Default)]
struct AmplitudeLedger {
    live: AtomicUsize,
    peak: AtomicUsize,
}

impl AmplitudeLedger {
    fn reserve(&self, n: usize) {
        let now = self.live.fetch_add(n, Ordering::SeqCst) + n;
        self.peak.fetch_max(now, Ordering::SeqCst);
    }

    fn release(&self, n: usize) {
        self.live.fetch_sub(n, Ordering::SeqCst);
    }
}

struct Admission {
    next: usize,
    delivered: usize,
    abort: bool,
}

/// Evaluates every index of `plan` exactly once and delivers the chunks to
/// `sink` in ascending order. The output is bit-identical for any worker
/// count and chunk size.
pub fn run_parallel<S: ChunkSink + ?Sized>(
    circuit: &Circuit,
    input: &InputState,
    plan: &ExecutionPlan,
    sink: &mut S,
) -> Result<RunReport, ExecError> {
    plan.validate_for(circuit)?;
    if input.num_qubits() != circuit.num_qubits() {
        return Err(crate::Error::QubitMismatch {
            input: input.num_qubits(),
            circuit: circuit.num_qubits(),
        }
        .into());
    }

    let task_count = plan.task_count();
    let window = plan.workers;
    let ledger = AmplitudeLedger::default();
    let admission = Mutex::new(Admission {
        next: 0,
        delivered: 0,
        abort: false,
    });
    let turn = Condvar::new();
    let started = Instant::now();

    let result = std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, crate::Result<StateChunk>)>();
        for _ in 0..plan.workers.min(task_count) {
            let tx = tx.clone();
            let (ledger, admission, turn) = (&ledger, &admission, &turn);
            scope.spawn(move || loop {
                let k = {
                    let mut state = admission.lock().unwrap();
                    loop {
                        if state.abort || state.next >= task_count {
                            return;
                        }
                        if state.next < state.delivered + window {
                            break;
                        }
                        state = turn.wait(state).unwrap();
                    }
                    state.next += 1;
                    state.next - 1
                };
                let range = plan.task(k);
                let len = (range.end - range.start) as usize;
                ledger.reserve(len);
                let chunk = evaluate_chunk(circuit, input, range.start, len as u64);
                if tx.send((k, chunk)).is_err() {
                    return;
                }
            });
        }
        drop(tx);

        let outcome = assemble(plan, sink, &rx, &ledger, &admission, &turn);
        admission.lock().unwrap().abort = true;
        turn.notify_all();
        outcome
    });
    result?;

    Ok(RunReport {
        elapsed: started.elapsed(),
        peak_amplitudes: ledger.peak.load(Ordering::SeqCst),
        tasks_completed: task_count,
        indices: plan.end - plan.start,
    })
}

fn assemble<S: ChunkSink + ?Sized>(
    plan: &ExecutionPlan,
    sink: &mut S,
    rx: &mpsc::Receiver<(usize, crate::Result<StateChunk>)>,
    ledger: &AmplitudeLedger,
    admission: &Mutex<Admission>,
    turn: &Condvar,
) -> Result<(), ExecError> {
    let task_count = plan.task_count();
    let mut pending: BTreeMap<usize, StateChunk> = BTreeMap::new();
    let mut delivered = 0;
    while delivered < task_count {
        let (k, chunk) = rx
            .recv()
            .expect("workers exited before finishing all tasks");
        pending.insert(k, chunk?);
        while let Some(chunk) = pending.remove(&delivered) {
            sink.accept(&chunk).map_err(|source| ExecError::Sink {
                delivered_end: chunk.start,
                source,
            })?;
            ledger.release(chunk.len());
            delivered += 1;
            admission.lock().unwrap().delivered = delivered;
            turn.notify_all();
        }
    }
    sink.finish().map_err(|source| ExecError::Sink {
        delivered_end: plan.end,
        source,
    })
}
