//! Scaling benchmark: seeded random circuits timed over a range of qubit
//! counts.
//!
//! Workload per gate: 80% bit flip with 0–2 controls, 10% swap, 10%
//! controlled phase with 1–2 controls and a uniform angle. The input is
//! the product state with every qubit at `0.6|0⟩ + 0.8|1⟩`.

use std::f64::consts::TAU;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::executor::{run_parallel, ExecError, ExecutionPlan, HashSink};
use crate::gate::{Bit, GateStep};
use crate::state::{InputState, QubitPair};

pub const DEFAULT_SEED: u64 = 0x5eed;

/// One random gate over `num_qubits` bits using the benchmark mix. Gate
/// kind, control count and angle come from `shape`; bit positions from
/// `bits`.
pub fn random_step<R: Rng + ?Sized>(num_qubits: u32, shape: &mut R, bits: &mut R) -> GateStep {
    let m = num_qubits as usize;
    let roll: f64 = shape.gen();
    let count = shape.gen_range(0..=2usize);
    let theta = shape.gen_range(0.0..TAU);
    if roll < 0.1 && m >= 2 {
        let pick = sample(bits, m, 2);
        return GateStep::swap(Bit(pick.index(0) as u32), Bit(pick.index(1) as u32));
    }
    if roll < 0.2 {
        let count = count.clamp(1, m.min(2));
        let controls = sample(bits, m, count)
            .iter()
            .map(|b| Bit(b as u32))
            .collect::<Vec<_>>();
        return GateStep::phase(theta, controls);
    }
    let count = count.min(m - 1);
    let pick = sample(bits, m, count + 1);
    let target = Bit(pick.index(0) as u32);
    let controls = pick
        .iter()
        .skip(1)
        .map(|b| Bit(b as u32))
        .collect::<Vec<_>>();
    GateStep::toffoli(controls, target)
}

/// Deterministic random circuit. For a fixed seed the sequence of gate
/// kinds, control counts and angles is the same for every qubit count, so
/// circuits of different widths do equal work per amplitude.
pub fn random_circuit(num_qubits: u32, steps: usize, seed: u64) -> crate::Result<Circuit> {
    let mut shape = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = ChaCha8Rng::seed_from_u64(seed);
    bits.set_stream(num_qubits as u64 + 1);
    let steps = (0..steps)
        .map(|_| random_step(num_qubits, &mut shape, &mut bits))
        .collect();
    Circuit::new(num_qubits, steps)
}

pub fn bench_input(num_qubits: u32) -> crate::Result<InputState> {
    InputState::uniform(num_qubits, QubitPair::real(0.6, 0.8))
}

/// Chunk size used when none is given: enough tasks to keep every worker
/// busy, clamped to `[2^10, 2^16]` and to the dimension.
pub fn auto_chunk_size(num_qubits: u32, workers: usize) -> u64 {
    let dim = crate::dimension(num_qubits);
    (dim / (8 * workers as u64))
        .clamp(1 << 10, 1 << 16)
        .min(dim)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub min_qubits: u32,
    pub max_qubits: u32,
    pub steps: usize,
    pub workers: usize,
    pub repeats: usize,
    pub seed: u64,
    pub chunk_size: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    #[serde(rename = "M")]
    pub num_qubits: u32,
    pub steps: usize,
    #[serde(rename = "W")]
    pub workers: usize,
    pub chunk: u64,
    /// Fastest of the repeats, execution phase only.
    pub seconds: f64,
    /// `seconds / seconds(M - 1)`; absent for the first row.
    pub growth: Option<f64>,
    pub output_hash: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid qubit range {min}..={max}")]
    Range { min: u32, max: u32 },
    #[error("repeats, steps and workers must be at least 1")]
    Zero,
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Runs the sweep, calling `on_record` as each row completes.
pub fn run_bench(
    config: &BenchConfig,
    mut on_record: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>, BenchError> {
    if config.min_qubits == 0
        || config.min_qubits > config.max_qubits
        || config.max_qubits > crate::MAX_QUBITS
    {
        return Err(BenchError::Range {
            min: config.min_qubits,
            max: config.max_qubits,
        });
    }
    if config.repeats == 0 || config.workers == 0 {
        return Err(BenchError::Zero);
    }
    let mut records: Vec<BenchRecord> = Vec::new();
    for m in config.min_qubits..=config.max_qubits {
        let circuit = random_circuit(m, config.steps, config.seed)?;
        let input = bench_input(m)?;
        let chunk = config
            .chunk_size
            .unwrap_or_else(|| auto_chunk_size(m, config.workers));
        let plan = ExecutionPlan::full(&circuit, chunk, config.workers).map_err(ExecError::from)?;
        let mut best = f64::INFINITY;
        let mut output_hash = String::new();
        for _ in 0..config.repeats {
            let mut sink = HashSink::new();
            let report = run_parallel(&circuit, &input, &plan, &mut sink)?;
            best = best.min(report.elapsed.as_secs_f64().max(f64::MIN_POSITIVE));
            output_hash = sink.hex_digest();
        }
        let growth = records
            .last()
            .filter(|prev| prev.num_qubits + 1 == m)
            .map(|prev| best / prev.seconds);
        let record = BenchRecord {
            num_qubits: m,
            steps: config.steps,
            workers: config.workers,
            chunk,
            seconds: best,
            growth,
            output_hash,
        };
        on_record(&record);
        records.push(record);
    }
    Ok(records)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], sink: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}
