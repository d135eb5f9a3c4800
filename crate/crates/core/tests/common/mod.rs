#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use qsim::{Bit, Circuit, Complex64, GateStep, InputState, QubitPair};
use rand::seq::SliceRandom;
use rand::Rng;

/// Explicit Kronecker product `q_M ⊗ … ⊗ q_1` by plain nested loops: the
/// factor for bit 1 varies fastest.
pub fn kron_vector(input: &InputState) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for q in input.qubits().iter().rev() {
        let mut next = Vec::with_capacity(acc.len() * 2);
        for a in &acc {
            next.push(a * q.amp0);
            next.push(a * q.amp1);
        }
        acc = next;
    }
    acc
}

pub fn max_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn random_pair<R: Rng>(rng: &mut R) -> QubitPair {
    QubitPair::new(
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    )
}

/// Random normalized product state.
pub fn random_input<R: Rng>(m: u32, rng: &mut R) -> InputState {
    let qubits = (0..m)
        .map(|_| {
            let q = random_pair(rng);
            let n = q.norm_sqr().sqrt();
            QubitPair::new(q.amp0 / n, q.amp1 / n)
        })
        .collect();
    InputState::new(qubits).unwrap()
}

/// Any valid step on `m` qubits, with up to `m - 1` controls.
pub fn random_step<R: Rng>(m: u32, rng: &mut R) -> GateStep {
    let mut bits: Vec<Bit> = (0..m).map(Bit).collect();
    bits.shuffle(rng);
    match rng.gen_range(0..3) {
        0 if m >= 2 => GateStep::swap(bits[0], bits[1]),
        1 => {
            let n = rng.gen_range(1..=m as usize);
            let theta = if rng.gen_bool(0.3) {
                PI
            } else {
                rng.gen_range(-TAU..TAU)
            };
            GateStep::phase(theta, bits[..n].to_vec())
        }
        _ => {
            let n = rng.gen_range(0..m as usize);
            GateStep::toffoli(bits[1..=n].to_vec(), bits[0])
        }
    }
}

pub fn random_circuit<R: Rng>(m: u32, steps: usize, rng: &mut R) -> Circuit {
    Circuit::new(m, (0..steps).map(|_| random_step(m, rng)).collect()).unwrap()
}

prop_compose! {
    pub fn arb_bits(m: u32)(perm in Just((0..m).collect::<Vec<u32>>()).prop_shuffle()) -> Vec<Bit> {
        perm.into_iter().map(Bit).collect()
    }
}

pub fn arb_step(m: u32) -> impl Strategy<Value = GateStep> {
    let flip = (arb_bits(m), 0..m as usize)
        .prop_map(|(bits, n)| GateStep::toffoli(bits[1..=n].to_vec(), bits[0]));
    let phase = (
        arb_bits(m),
        1..=m as usize,
        prop_oneof![Just(PI), -TAU..TAU],
    )
        .prop_map(|(bits, n, theta)| GateStep::phase(theta, bits[..n].to_vec()));
    if m >= 2 {
        let swap = arb_bits(m).prop_map(|bits| GateStep::swap(bits[0], bits[1]));
        prop_oneof![3 => flip, 1 => phase, 1 => swap].boxed()
    } else {
        prop_oneof![flip, phase].boxed()
    }
}

pub fn arb_circuit(
    qubits: std::ops::RangeInclusive<u32>,
    max_steps: usize,
) -> impl Strategy<Value = Circuit> {
    qubits.prop_flat_map(move |m| {
        prop::collection::vec(arb_step(m), 0..=max_steps)
            .prop_map(move |steps| Circuit::new(m, steps).unwrap())
    })
}

pub fn arb_pair() -> impl Strategy<Value = QubitPair> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(a, b, c, d)| QubitPair::new(Complex64::new(a, b), Complex64::new(c, d)))
}

pub fn arb_input(m: u32) -> impl Strategy<Value = InputState> {
    prop::collection::vec(arb_pair(), m as usize).prop_map(|q| InputState::new(q).unwrap())
}

/// Circuit together with a matching input state.
pub fn arb_case(
    qubits: std::ops::RangeInclusive<u32>,
    max_steps: usize,
) -> impl Strategy<Value = (Circuit, InputState)> {
    arb_circuit(qubits, max_steps).prop_flat_map(|c| {
        let m = c.num_qubits();
        (Just(c), arb_input(m))
    })
}
