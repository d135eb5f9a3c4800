//! Streaming basis-state statistics over ordered output chunks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::chunk::StateChunk;
use crate::executor::{ChunkSink, SinkResult};
use crate::Address;

pub const DEFAULT_TOP_K: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChunkOrderError {
    #[error("chunk starting at {start} overlaps or precedes data already seen (next expected {expected})")]
    Overlap { start: Address, expected: Address },
    #[error("gap before chunk starting at {start} (next expected {expected})")]
    Gap { start: Address, expected: Address },
    #[error("chunk [{start}, {end}) exceeds dimension {dim}")]
    OutOfRange {
        start: Address,
        end: Address,
        dim: u64,
    },
}

/// Ranked by probability, higher first; ties go to the lower index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Ranked {
    prob: f64,
    index: Address,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    /// `Greater` means ranked worse, so a max-heap keeps the worst on top.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .prob
            .total_cmp(&self.prob)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Accumulates total probability, the `k` most probable indices and
/// per-qubit marginals `P(bit j = 1)` over a contiguous run of chunks.
#[derive(Debug, Clone)]
pub struct ProbabilityAccumulator {
    num_qubits: u32,
    k: usize,
    range: Option<Range<Address>>,
    total: f64,
    top: BinaryHeap<Ranked>,
    marginals: Vec<f64>,
}

impl ProbabilityAccumulator {
    pub fn new(num_qubits: u32, k: usize) -> Self {
        ProbabilityAccumulator {
            num_qubits,
            k,
            range: None,
            total: 0.0,
            top: BinaryHeap::with_capacity(k + 1),
            marginals: vec![0.0; num_qubits as usize],
        }
    }

    pub fn push(&mut self, chunk: &StateChunk) -> Result<(), ChunkOrderError> {
        let dim = crate::dimension(self.num_qubits);
        if chunk.end() > dim {
            return Err(ChunkOrderError::OutOfRange {
                start: chunk.start,
                end: chunk.end(),
                dim,
            });
        }
        match &self.range {
            Some(r) if chunk.start < r.end => {
                return Err(ChunkOrderError::Overlap {
                    start: chunk.start,
                    expected: r.end,
                })
            }
            Some(r) if chunk.start > r.end => {
                return Err(ChunkOrderError::Gap {
                    start: chunk.start,
                    expected: r.end,
                })
            }
            _ => {}
        }
        let start = self.range.as_ref().map_or(chunk.start, |r| r.start);
        self.range = Some(start..chunk.end());

        for (index, amp) in chunk.indexed() {
            let prob = amp.norm_sqr();
            self.total += prob;
            let mut bits = index;
            let mut j = 0;
            while bits != 0 {
                if bits & 1 == 1 {
                    self.marginals[j] += prob;
                }
                bits >>= 1;
                j += 1;
            }
            let candidate = Ranked { prob, index };
            if self.top.len() < self.k {
                self.top.push(candidate);
            } else if let Some(mut worst) = self.top.peek_mut() {
                if candidate < *worst {
                    *worst = candidate;
                }
            }
        }
        Ok(())
    }

    pub fn report(&self) -> ProbabilityReport {
        let mut top: Vec<Ranked> = self.top.iter().copied().collect();
        top.sort();
        ProbabilityReport {
            range: self.range.clone().unwrap_or(0..0),
            total: self.total,
            top: top.into_iter().map(|r| (r.index, r.prob)).collect(),
            marginals: self.marginals.clone(),
        }
    }
}

impl ChunkSink for ProbabilityAccumulator {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult {
        self.push(chunk)?;
        Ok(())
    }
}

/// Convenience wrapper over [`ProbabilityAccumulator`].
pub fn probabilities<'a>(
    chunks: impl IntoIterator<Item = &'a StateChunk>,
    num_qubits: u32,
    k: usize,
) -> Result<ProbabilityReport, ChunkOrderError> {
    let mut acc = ProbabilityAccumulator::new(num_qubits, k);
    for chunk in chunks {
        acc.push(chunk)?;
    }
    Ok(acc.report())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    /// `key=value` records, one per line.
    Kv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityReport {
    pub range: Range<Address>,
    /// Sum of `|amp|²` over the covered range.
    pub total: f64,
    /// `(index, probability)`, most probable first.
    pub top: Vec<(Address, f64)>,
    /// `marginals[j]` is `P(bit j+1 = 1)` over the covered range.
    pub marginals: Vec<f64>,
}

impl ProbabilityReport {
    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Text => {
                let _ = writeln!(out, "range: [{}, {})", self.range.start, self.range.end);
                let _ = writeln!(out, "total probability: {}", self.total);
                let _ = writeln!(out, "top {} by probability:", self.top.len());
                for (index, prob) in &self.top {
                    let _ = writeln!(out, "  {index} {prob}");
                }
                let _ = writeln!(out, "marginals P(bit = 1):");
                for (j, p) in self.marginals.iter().enumerate() {
                    let _ = writeln!(out, "  {} {p}", j + 1);
                }
            }
            ReportFormat::Kv => {
                let _ = writeln!(out, "range_start={}", self.range.start);
                let _ = writeln!(out, "range_end={}", self.range.end);
                let _ = writeln!(out, "total={}", self.total);
                for (rank, (index, prob)) in self.top.iter().enumerate() {
                    let _ = writeln!(out, "top.{rank}={index}:{prob}");
                }
                for (j, p) in self.marginals.iter().enumerate() {
                    let _ = writeln!(out, "marginal.{}={p}", j + 1);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunk::evaluate_chunk;
    use crate::circuit::Circuit;
    use crate::state::{InputState, QubitPair};
    use num_complex::Complex64;

    fn chunk(start: Address, probs: &[f64]) -> StateChunk {
        StateChunk::new(
            start,
            probs
                .iter()
                .map(|p| Complex64::new(p.sqrt(), 0.0))
                .collect(),
        )
    }

    #[test]
    fn all_ones_input() {
        let circuit = Circuit::empty(4).unwrap();
        let input = InputState::uniform(4, QubitPair::ONE).unwrap();
        let out = evaluate_chunk(&circuit, &input, 0, 16).unwrap();
        let report = probabilities([&out], 4, 1).unwrap();
        assert_eq!(report.total, 1.0);
        assert_eq!(report.top, vec![(15, 1.0)]);
        assert_eq!(report.marginals, vec![1.0; 4]);
    }

    #[test]
    fn product_state_marginal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut input = InputState::zeros(2).unwrap();
        input.set(0, QubitPair::real(h, h));
        let out = evaluate_chunk(&Circuit::empty(2).unwrap(), &input, 0, 4).unwrap();
        let report = probabilities([&out], 2, DEFAULT_TOP_K).unwrap();
        assert!((report.marginals[0] - 0.5).abs() < 1e-15);
        assert_eq!(report.marginals[1], 0.0);
    }

    #[test]
    fn ties_break_to_lower_index() {
        let a = chunk(0, &[0.25, 0.0, 0.25]);
        let b = chunk(3, &[0.25, 0.25, 0.0, 0.0, 0.0]);
        let report = probabilities([&a, &b], 3, 3).unwrap();
        assert_eq!(report.top, vec![(0, 0.25), (2, 0.25), (3, 0.25)]);
        assert_eq!(report.range, 0..8);
    }

    #[test]
    fn top_k_independent_of_chunking() {
        let probs = [0.1, 0.3, 0.05, 0.3, 0.1, 0.05, 0.05, 0.05];
        let whole = probabilities([&chunk(0, &probs)], 3, 4).unwrap();
        let pieces: Vec<_> = (0..8).map(|i| chunk(i as u64, &probs[i..i + 1])).collect();
        let split = probabilities(&pieces, 3, 4).unwrap();
        assert_eq!(whole.top, split.top);
        let order: Vec<_> = whole.top.iter().map(|t| t.0).collect();
        assert_eq!(order, vec![1, 3, 0, 4]);
    }

    #[test]
    fn rejects_bad_order() {
        let mut acc = ProbabilityAccumulator::new(3, 2);
        acc.push(&chunk(2, &[0.1, 0.1])).unwrap();
        assert_eq!(
            acc.push(&chunk(3, &[0.1])),
            Err(ChunkOrderError::Overlap {
                start: 3,
                expected: 4
            })
        );
        assert_eq!(
            acc.push(&chunk(0, &[0.1])),
            Err(ChunkOrderError::Overlap {
                start: 0,
                expected: 4
            })
        );
        assert_eq!(
            acc.push(&chunk(5, &[0.1])),
            Err(ChunkOrderError::Gap {
                start: 5,
                expected: 4
            })
        );
        assert!(acc.push(&chunk(7, &[0.1, 0.1])).is_err());
        acc.push(&chunk(4, &[0.1])).unwrap();
        assert_eq!(acc.report().range, 2..5);
    }

    #[test]
    fn kv_rendering() {
        let report = probabilities([&chunk(0, &[1.0, 0.0])], 1, 1).unwrap();
        assert_eq!(
            report.render(ReportFormat::Kv),
            "range_start=0\nrange_end=2\ntotal=1\ntop.0=0:1\nmarginal.1=0\n"
        );
        assert!(report
            .render(ReportFormat::Text)
            .contains("total probability: 1"));
    }
}
