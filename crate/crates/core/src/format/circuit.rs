//! Line-based circuit format.
//!
//! ```text
//! # comment
//! qubits 3
//! init 1 0 0 1 0          # qubit 1 starts as |1>: re0 im0 re1 im1
//! x 1 c 2                 # NOT / CNOT / Toffoli: target, then controls
//! cphase pi c 1 2         # phase e^{i theta} when all controls are 1
//! swap 1 3
//! ```
//!
//! Bit positions are one-based; bit 1 is the least significant address bit.
//! Angles are radians, or `pi`, `-pi`, `pi/<n>`, `-pi/<n>`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{parse_f64, FormatError};
use crate::circuit::Circuit;
use crate::error::Error;
use crate::gate::{Bit, GateStep};
use crate::state::{InputState, QubitPair};
use crate::MAX_QUBITS;

#[derive(Debug, Clone, PartialEq)]
pub struct InitDirective {
    pub line: usize,
    pub qubit: Bit,
    pub pair: QubitPair,
}

/// A parsed circuit file, with source line numbers kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDocument {
    pub num_qubits: u32,
    pub inits: Vec<InitDirective>,
    pub steps: Vec<(usize, GateStep)>,
}

impl CircuitDocument {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut num_qubits: Option<u32> = None;
        let mut inits: Vec<InitDirective> = Vec::new();
        let mut steps = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some((&keyword, args)) = tokens.split_first() else {
                continue;
            };

            if keyword == "qubits" {
                if num_qubits.is_some() {
                    return Err(FormatError::syntax(line, "duplicate `qubits` declaration"));
                }
                let [count] = args else {
                    return Err(FormatError::syntax(line, "expected `qubits <count>`"));
                };
                let m = parse_count(count, line)?;
                if m == 0 || m > MAX_QUBITS {
                    return Err(FormatError::Semantic {
                        line,
                        source: Error::QubitCount(m),
                    });
                }
                num_qubits = Some(m);
                continue;
            }

            let Some(m) = num_qubits else {
                return Err(FormatError::syntax(
                    line,
                    format!("`{keyword}` before `qubits` declaration"),
                ));
            };

            match keyword {
                "init" => {
                    let [q, re0, im0, re1, im1] = args else {
                        return Err(FormatError::syntax(
                            line,
                            "expected `init <qubit> <re0> <im0> <re1> <im1>`",
                        ));
                    };
                    let qubit = parse_bit(q, m, line)?;
                    if let Some(prev) = inits.iter().find(|d| d.qubit == qubit) {
                        return Err(FormatError::syntax(
                            line,
                            format!("qubit {qubit} already initialized on line {}", prev.line),
                        ));
                    }
                    let pair = QubitPair::new(
                        Complex64::new(parse_f64(re0, line)?, parse_f64(im0, line)?),
                        Complex64::new(parse_f64(re1, line)?, parse_f64(im1, line)?),
                    );
                    if !pair.is_normalized() {
                        log::warn!(
                            "line {line}: qubit {qubit} is not normalized (norm² = {})",
                            pair.norm_sqr()
                        );
                    }
                    inits.push(InitDirective { line, qubit, pair });
                }
                "x" => {
                    let Some((target, rest)) = args.split_first() else {
                        return Err(FormatError::syntax(
                            line,
                            "expected `x <target> [c <controls>...]`",
                        ));
                    };
                    let target = parse_bit(target, m, line)?;
                    let controls = parse_controls(rest, m, line, false)?;
                    push_step(&mut steps, GateStep::BitFlip { target, controls }, m, line)?;
                }
                "cphase" => {
                    let Some((theta, rest)) = args.split_first() else {
                        return Err(FormatError::syntax(
                            line,
                            "expected `cphase <theta> c <controls>...`",
                        ));
                    };
                    let theta = parse_angle(theta, line)?;
                    let controls = parse_controls(rest, m, line, true)?;
                    push_step(&mut steps, GateStep::Phase { theta, controls }, m, line)?;
                }
                "swap" => {
                    let [a, b] = args else {
                        return Err(FormatError::syntax(line, "expected `swap <a> <b>`"));
                    };
                    let step = GateStep::Swap {
                        a: parse_bit(a, m, line)?,
                        b: parse_bit(b, m, line)?,
                    };
                    push_step(&mut steps, step, m, line)?;
                }
                other => {
                    return Err(FormatError::syntax(
                        line,
                        format!("unknown keyword `{other}`"),
                    ));
                }
            }
        }

        let num_qubits = num_qubits
            .ok_or_else(|| FormatError::Invalid("missing `qubits` declaration".into()))?;
        Ok(CircuitDocument {
            num_qubits,
            inits,
            steps,
        })
    }

    pub fn circuit(&self) -> Circuit {
        let steps = self.steps.iter().map(|(_, s)| s.clone()).collect();
        Circuit::new(self.num_qubits, steps).expect("steps validated during parsing")
    }

    /// Input state with uninitialized qubits in `|0⟩`.
    pub fn input_state(&self) -> InputState {
        let mut input = InputState::zeros(self.num_qubits).expect("qubit count validated");
        for init in &self.inits {
            input.set(init.qubit.0 as usize, init.pair);
        }
        input
    }
}

/// Parses circuit text into the circuit and its input state.
pub fn parse_circuit(text: &str) -> Result<(Circuit, InputState), FormatError> {
    let doc = CircuitDocument::parse(text)?;
    Ok((doc.circuit(), doc.input_state()))
}

/// Writes a circuit and input state back to text. Qubits in `|0⟩` get no
/// `init` line.
pub fn serialize_circuit(circuit: &Circuit, input: &InputState) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", circuit.num_qubits());
    for (j, pair) in input.qubits().iter().enumerate() {
        if *pair != QubitPair::ZERO {
            let _ = writeln!(
                out,
                "init {} {} {} {} {}",
                j + 1,
                pair.amp0.re,
                pair.amp0.im,
                pair.amp1.re,
                pair.amp1.im
            );
        }
    }
    for step in circuit.steps() {
        let _ = match step {
            GateStep::BitFlip { target, controls } if controls.is_empty() => {
                writeln!(out, "x {target}")
            }
            GateStep::BitFlip { target, controls } => {
                writeln!(out, "x {target} c {}", join(controls))
            }
            GateStep::Phase { theta, controls } => {
                writeln!(out, "cphase {theta} c {}", join(controls))
            }
            GateStep::Swap { a, b } => writeln!(out, "swap {a} {b}"),
        };
    }
    out
}

fn join(bits: &[Bit]) -> String {
    bits.iter()
        .map(Bit::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn push_step(
    steps: &mut Vec<(usize, GateStep)>,
    step: GateStep,
    num_qubits: u32,
    line: usize,
) -> Result<(), FormatError> {
    step.validate(num_qubits)
        .map_err(|source| FormatError::Semantic { line, source })?;
    steps.push((line, step));
    Ok(())
}

fn parse_count(token: &str, line: usize) -> Result<u32, FormatError> {
    token
        .parse::<u32>()
        .map_err(|_| FormatError::syntax(line, format!("malformed integer {token:?}")))
}

fn parse_bit(token: &str, num_qubits: u32, line: usize) -> Result<Bit, FormatError> {
    let position = parse_count(token, line)?;
    match Bit::from_one_based(position) {
        Some(bit) if bit.0 < num_qubits => Ok(bit),
        _ => Err(FormatError::Semantic {
            line,
            source: Error::BitOutOfRange {
                bit: position,
                num_qubits,
            },
        }),
    }
}

fn parse_controls(
    tokens: &[&str],
    num_qubits: u32,
    line: usize,
    required: bool,
) -> Result<Vec<Bit>, FormatError> {
    match tokens.split_first() {
        None if !required => Ok(Vec::new()),
        Some((&"c", bits)) if !bits.is_empty() => bits
            .iter()
            .map(|t| parse_bit(t, num_qubits, line))
            .collect(),
        Some((&"c", _)) => Err(FormatError::syntax(
            line,
            "`c` must be followed by control bits",
        )),
        _ => Err(FormatError::syntax(line, "expected `c <controls>...`")),
    }
}

fn parse_angle(token: &str, line: usize) -> Result<f64, FormatError> {
    let (sign, body) = match token.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, token),
    };
    if body == "pi" {
        return Ok(sign * PI);
    }
    if let Some(divisor) = body.strip_prefix("pi/") {
        let d = parse_f64(divisor, line)?;
        if d == 0.0 {
            return Err(FormatError::syntax(line, "division by zero in angle"));
        }
        return Ok(sign * PI / d);
    }
    parse_f64(token, line)
}
